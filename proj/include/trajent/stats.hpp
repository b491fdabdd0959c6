// stats.hpp - ensemble averages, standard errors and exponential-rate fits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gsl/gsl_fit.h>

#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/trajectory.hpp"

namespace trajent {

// Count / mean / sum of squared deviations, mergeable (Chan et al.).
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments r;
    r.n = a.n + b.n;
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * (b.n / r.n);
    r.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / r.n);
    return r;
  }

  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double standard_error() const { return n > 0.0 ? std::sqrt(variance() / n) : 0.0; }
};

// Per-grid-point partial sums for one block of trajectories.
struct EnsemblePartial {
  std::vector<Moments> concurrence;
  std::vector<Moments> eof;
  std::vector<Mat4> rho_sum;  // empty unless states were retained
  std::size_t count = 0;

  explicit EnsemblePartial(std::size_t points = 0, bool with_rho = false)
      : concurrence(points), eof(points), rho_sum(with_rho ? points : 0) {}

  void add(const TrajectoryRecord& r) {
    if (r.concurrences.size() != concurrence.size()) throw ConfigError("ensemble: time grids differ between records");
    for (std::size_t k = 0; k < concurrence.size(); ++k) {
      const double c = r.concurrences[k];
      concurrence[k].add(c);
      eof[k].add(eof_from_concurrence(std::min(c, 1.0)));
    }
    if (!rho_sum.empty()) {
      if (r.states.size() != rho_sum.size()) throw ConfigError("ensemble: record has no retained states");
      for (std::size_t k = 0; k < rho_sum.size(); ++k) rho_sum[k] += outer(r.states[k], r.states[k]);
    }
    ++count;
  }

  static EnsemblePartial merge(const EnsemblePartial& a, const EnsemblePartial& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    EnsemblePartial r(a.concurrence.size(), !a.rho_sum.empty());
    for (std::size_t k = 0; k < a.concurrence.size(); ++k) {
      r.concurrence[k] = Moments::merge(a.concurrence[k], b.concurrence[k]);
      r.eof[k] = Moments::merge(a.eof[k], b.eof[k]);
    }
    for (std::size_t k = 0; k < r.rho_sum.size(); ++k) r.rho_sum[k] = a.rho_sum[k] + b.rho_sum[k];
    r.count = a.count + b.count;
    return r;
  }
};

// Reduces partials[lo, hi) by recursive halving; the order depends only on the
// number of partials.
inline EnsemblePartial pairwise_reduce(const std::vector<EnsemblePartial>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return EnsemblePartial::merge(pairwise_reduce(parts, lo, mid), pairwise_reduce(parts, mid, hi));
}

struct EnsembleSummary {
  std::vector<double> times;
  std::vector<double> mean_c;
  std::vector<double> stderr_c;
  std::vector<double> mean_eof;
  std::vector<double> stderr_eof;
  std::size_t n_traj = 0;
  std::optional<std::vector<Mat4>> empirical_rho;
};

inline EnsembleSummary summarize(const std::vector<double>& times, const EnsemblePartial& p) {
  EnsembleSummary s;
  s.times = times;
  s.n_traj = p.count;
  for (std::size_t k = 0; k < p.concurrence.size(); ++k) {
    s.mean_c.push_back(p.concurrence[k].mean);
    s.stderr_c.push_back(p.concurrence[k].standard_error());
    s.mean_eof.push_back(p.eof[k].mean);
    s.stderr_eof.push_back(p.eof[k].standard_error());
  }
  if (!p.rho_sum.empty()) {
    std::vector<Mat4> rho;
    rho.reserve(p.rho_sum.size());
    for (const auto& m : p.rho_sum) rho.push_back(m * cplx(1.0 / static_cast<double>(p.count)));
    s.empirical_rho = std::move(rho);
  }
  return s;
}

// Pointwise mean and standard error of the concurrence over records sharing
// one grid. Empirical density matrices are included when every record kept
// its states.
inline EnsembleSummary average(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw ConfigError("average: no records");
  const auto& times = records.front().times;
  for (const auto& r : records)
    if (r.times != times) throw ConfigError("average: time grids differ between records");
  const bool with_rho =
      std::all_of(records.begin(), records.end(), [&](const auto& r) { return r.states.size() == times.size(); });
  std::vector<EnsemblePartial> parts;
  parts.reserve(records.size());
  for (const auto& r : records) {
    EnsemblePartial p(times.size(), with_rho);
    p.add(r);
    parts.push_back(std::move(p));
  }
  return summarize(times, pairwise_reduce(parts, 0, parts.size()));
}

// (1/N) sum |psi><psi| per grid point.
inline std::vector<Mat4> empirical_density(const std::vector<TrajectoryRecord>& records) {
  if (records.empty()) throw ConfigError("empirical_density: no records");
  for (const auto& r : records)
    if (r.states.size() != records.front().times.size())
      throw ConfigError("empirical_density: records must retain their states");
  auto s = average(records);
  return *s.empirical_rho;
}

// ------------------------------- rate fitting ---------------------------------

struct RateFit {
  double rate = 0.0;
  double rate_stderr = 0.0;
  double amplitude = 0.0;  // fitted C(0)
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

struct RateFitOutcome {
  std::optional<RateFit> fit;
  std::string diagnostic;  // set when no fit could be made
};

inline constexpr std::size_t kMinFitPoints = 10;

// Weighted least squares on ln(mean) versus t over the longest prefix where
// the mean exceeds five standard errors, with weights (mean / stderr)^2.
// Points with zero standard error (t = 0, or a noiseless series) take the
// largest weight found among the others; if no point has a positive standard
// error the fit is unweighted.
inline RateFitOutcome fit_rate(const std::vector<double>& times, const std::vector<double>& mean,
                               const std::vector<double>& stderr_c) {
  if (times.size() != mean.size() || times.size() != stderr_c.size())
    return {std::nullopt, "fit_rate: column lengths differ"};
  std::size_t n = 0;
  while (n < mean.size() && mean[n] > 0.0 && mean[n] > 5.0 * stderr_c[n] && std::isfinite(mean[n])) ++n;
  if (n < kMinFitPoints)
    return {std::nullopt, "fit_rate: only " + std::to_string(n) + " usable points before the signal drops below 5 stderr"};

  std::vector<double> x(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> y(n), w(n, 0.0);
  double w_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = std::log(mean[k]);
    const double rel = stderr_c[k] / mean[k];
    if (rel > 0.0) w[k] = 1.0 / (rel * rel);
    w_max = std::max(w_max, w[k]);
  }
  const bool weighted = w_max > 0.0;
  for (auto& wk : w)
    if (wk == 0.0) wk = weighted ? w_max : 1.0;

  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  int status = 0;
  if (weighted) {
    status = gsl_fit_wlinear(x.data(), 1, w.data(), 1, y.data(), 1, n, &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  } else {
    status = gsl_fit_linear(x.data(), 1, y.data(), 1, n, &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  }
  if (status != 0) return {std::nullopt, "fit_rate: least-squares solver failed"};

  double ybar = 0.0, wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = weighted ? w[k] : 1.0;
    ybar += wk * y[k];
    wsum += wk;
  }
  ybar /= wsum;
  double sst = 0.0, sse = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = weighted ? w[k] : 1.0;
    sst += wk * (y[k] - ybar) * (y[k] - ybar);
    const double r = y[k] - (c0 + c1 * x[k]);
    sse += wk * r * r;
  }

  RateFit f;
  f.rate = -c1;
  f.rate_stderr = std::sqrt(std::max(cov11, 0.0));
  f.amplitude = std::exp(c0);
  f.t_lo = x.front();
  f.t_hi = x.back();
  f.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  f.points = n;
  return {f, {}};
}

inline RateFitOutcome fit_rate(const EnsembleSummary& s) { return fit_rate(s.times, s.mean_c, s.stderr_c); }

// Fit of the full ensemble with rate_stderr replaced by the spread of the
// rates refitted on `resamples` bootstrap resamples of the trajectories.
inline RateFitOutcome bootstrap_fit(const std::vector<TrajectoryRecord>& records, std::size_t resamples,
                                    std::uint64_t seed) {
  if (records.empty()) throw ConfigError("bootstrap_fit: no records");
  if (resamples < 2) throw ConfigError("bootstrap_fit: need at least 2 resamples");
  RateFitOutcome base = fit_rate(average(records));
  if (!base.fit) return base;

  const auto& times = records.front().times;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
  Moments rates;
  for (std::size_t b = 0; b < resamples; ++b) {
    EnsemblePartial p(times.size());
    for (std::size_t k = 0; k < records.size(); ++k) p.add(records[pick(rng)]);
    if (const auto f = fit_rate(summarize(times, p)); f.fit) rates.add(f.fit->rate);
  }
  if (rates.n < 2.0) return {std::nullopt, "bootstrap_fit: resampled fits failed"};
  base.fit->rate_stderr = std::sqrt(rates.variance());
  return base;
}

}  // namespace trajent
