#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_util.hpp"
#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"

using namespace trajent;
using testutil::frob_diff;

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(frob_diff(kron2(Mat2::identity(), Mat2::identity()), Mat4::identity()), 0.0);
}

TEST(Kron, LoweringOnFirstQubitActsOnUpDown) {
  Vec4 ud;
  ud[basis::ud] = 1.0;
  const Vec4 out = kron2(pauli::lower(), Mat2::identity()) * ud;
  EXPECT_EQ(out[basis::dd], cplx(1.0));
  EXPECT_EQ(out[basis::uu] + out[basis::ud] + out[basis::du], cplx(0.0));
}

TEST(Kron, SigmaYSigmaYIsAntiDiagonal) {
  const Mat4 f = kron2(pauli::y(), pauli::y());
  Mat4 expected;
  expected(0, 3) = -1.0;
  expected(1, 2) = 1.0;
  expected(2, 1) = 1.0;
  expected(3, 0) = -1.0;
  EXPECT_EQ(frob_diff(f, expected), 0.0);
  EXPECT_EQ(frob_diff(spin_flip(), expected), 0.0);
}

TEST(Kron, MixedProductAndBilinearity) {
  for (int i = 0; i < 50; ++i) {
    const auto a = testutil::random_matrix<2>(), b = testutil::random_matrix<2>();
    const auto c = testutil::random_matrix<2>(), d = testutil::random_matrix<2>();
    EXPECT_LT(frob_diff(kron2(a, b) * kron2(c, d), kron2(a * c, b * d)), 1e-12);
    const cplx s = testutil::random_complex();
    EXPECT_LT(frob_diff(kron2(a + s * c, b), kron2(a, b) + s * kron2(c, b)), 1e-12);
    EXPECT_LT(frob_diff(kron2(a, b + s * d), kron2(a, b) + s * kron2(a, d)), 1e-12);
  }
}

TEST(Expm, ZeroGivesIdentity) { EXPECT_EQ(frob_diff(expm(Mat4{}), Mat4::identity()), 0.0); }

TEST(Expm, Diagonal) {
  const std::array<cplx, 4> d{cplx(0.3, 1.0), cplx(-2.0, 0.5), cplx(4.0), cplx(0.0, -7.0)};
  std::array<cplx, 4> e{};
  for (int i = 0; i < 4; ++i) e[i] = std::exp(d[i]);
  const Mat4 got = expm(Mat4::diagonal(d));
  EXPECT_LT(frob_diff(got, Mat4::diagonal(e)), 1e-13 * frobenius_norm(Mat4::diagonal(e)));
}

TEST(Expm, CommonBathDampingMap) {
  const double g = 0.7, t = 1.3;
  const Scenario s = preset_common_bath(g);
  const Mat4 u = expm(cplx(-t) * s.damping());
  const double e = std::exp(-g * t);
  Mat4 expected;
  expected(basis::uu, basis::uu) = e;
  expected(basis::dd, basis::dd) = 1.0;
  expected(basis::ud, basis::ud) = 0.5 * (e + 1.0);
  expected(basis::du, basis::du) = 0.5 * (e + 1.0);
  expected(basis::ud, basis::du) = 0.5 * (e - 1.0);
  expected(basis::du, basis::ud) = 0.5 * (e - 1.0);
  EXPECT_LT(frob_diff(u, expected), 1e-14);
}

TEST(Expm, InverseProperty) {
  for (int i = 0; i < 100; ++i) {
    Mat4 m = testutil::random_matrix<4>();
    m *= cplx(testutil::uniform(0.0, 10.0) / frobenius_norm(m));
    EXPECT_LT(frob_diff(expm(m) * expm(-m), Mat4::identity()), 1e-9);
  }
}

TEST(Expm, AgreesWithEigenOracle) {
  for (int i = 0; i < 100; ++i) {
    Mat4 m = testutil::random_matrix<4>();
    m *= cplx(testutil::uniform(0.0, 6.0) / frobenius_norm(m));
    const Mat4 got = expm(m, 1e-12);
    const Eigen::Matrix4cd ref = testutil::to_eigen(m).exp();
    double err = 0.0, nrm = 0.0;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        err += std::norm(got(r, c) - ref(r, c));
        nrm += std::norm(ref(r, c));
      }
    EXPECT_LE(std::sqrt(err), 1e-12 * std::sqrt(nrm));
  }
}

TEST(Expm, AgreesWithRungeKutta) {
  for (int i = 0; i < 50; ++i) {
    Mat4 m = testutil::random_matrix<4>();
    m *= cplx(testutil::uniform(0.0, 2.0) / frobenius_norm(m));
    Mat4 x = Mat4::identity();
    const int n = 200;
    const cplx h(1.0 / n);
    for (int k = 0; k < n; ++k) {
      const Mat4 k1 = m * x;
      const Mat4 k2 = m * (x + cplx(0.5) * h * k1);
      const Mat4 k3 = m * (x + cplx(0.5) * h * k2);
      const Mat4 k4 = m * (x + h * k3);
      x += (h / cplx(6.0)) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
    }
    EXPECT_LT(frob_diff(expm(m), x), 1e-6);
  }
}

TEST(Expm, RejectsBadInput) {
  EXPECT_THROW(expm(Mat4::identity(), 0.0), ConfigError);
  Mat4 m;
  m(1, 2) = std::nan("");
  EXPECT_THROW(expm(m), NumericalError);
}

TEST(Det, Examples) {
  EXPECT_EQ(det2(pauli::lower()), cplx(0.0));
  const double r = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(std::abs(det2(pauli::along({r, r, r})) + 1.0), 0.0, 1e-15);
  const cplx a(0.4, -1.2);
  EXPECT_LT(std::abs(trace2(pauli::lower() + a * Mat2::identity()) - 2.0 * a), 1e-15);
  EXPECT_EQ(trace4(Mat4::identity()), cplx(4.0));
}

TEST(HermEig, Examples) {
  const auto id = herm_eig4(Mat4::identity());
  for (double v : id.values) EXPECT_NEAR(v, 1.0, 1e-14);

  const auto d = herm_eig4(Mat4::diagonal({cplx(2.0), cplx(4.0), cplx(1.0), cplx(3.0)}));
  EXPECT_NEAR(d.values[0], 4.0, 1e-14);
  EXPECT_NEAR(d.values[1], 3.0, 1e-14);
  EXPECT_NEAR(d.values[2], 2.0, 1e-14);
  EXPECT_NEAR(d.values[3], 1.0, 1e-14);

  for (int i = 0; i < 20; ++i) {
    const auto psi = testutil::random_state();
    const auto e = herm_eig4(psi.projector());
    EXPECT_NEAR(e.values[0], 1.0, 1e-12);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(e.values[k], 0.0, 1e-12);
  }
}

TEST(HermEig, DecompositionProperties) {
  for (int i = 0; i < 200; ++i) {
    const Mat4 m = testutil::random_hermitian<4>();
    const auto e = herm_eig4(m);
    for (int k = 0; k + 1 < 4; ++k) EXPECT_GE(e.values[k], e.values[k + 1]);
    Mat4 recon;
    for (std::size_t k = 0; k < 4; ++k) {
      Vec4 v;
      for (std::size_t r = 0; r < 4; ++r) v[r] = e.vectors(r, k);
      EXPECT_LT(norm(m * v - e.values[k] * v), 1e-9);
      recon += cplx(e.values[k]) * outer(v, v);
    }
    EXPECT_LT(frob_diff(adjoint(e.vectors) * e.vectors, Mat4::identity()), 1e-9);
    EXPECT_LT(frob_diff(recon, m), 1e-9);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> oracle(testutil::to_eigen(m));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.values[k], oracle.eigenvalues()(3 - k), 1e-10);
  }
}

TEST(HermEig, RejectsNonHermitian) {
  Mat4 m = Mat4::identity();
  m(0, 1) = 1e-6;
  EXPECT_THROW(herm_eig4(m), ConfigError);
  m(0, 1) = 1e-12;
  EXPECT_NO_THROW(herm_eig4(m));
}

TEST(HermEig, DegenerateSpectrum) {
  // Rank-2 projector rotated by a random unitary.
  const auto u = herm_eig4(testutil::random_hermitian<4>()).vectors;
  const Mat4 m = u * Mat4::diagonal({cplx(1.0), cplx(1.0), cplx(0.0), cplx(0.0)}) * adjoint(u);
  const auto e = herm_eig4(m);
  EXPECT_NEAR(e.values[0], 1.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  EXPECT_NEAR(e.values[2], 0.0, 1e-12);
  EXPECT_NEAR(e.values[3], 0.0, 1e-12);
}
