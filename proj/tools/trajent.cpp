#include <iostream>

#include "trajent/cli.hpp"

int main(int argc, char** argv) {
  trajent::configure_logging();
  return trajent::run_cli(argc, argv, std::cout, std::cerr);
}
