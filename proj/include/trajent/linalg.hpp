// linalg.hpp - fixed-size dense complex linear algebra for one and two qubits.
//
// Basis ordering for a single qubit is {up, down}; for a pair it is
// {up-up, up-down, down-up, down-down}, i.e. the row-major Kronecker order.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <utility>

#include "trajent/errors.hpp"

namespace trajent {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

template <std::size_t N>
struct Vector {
  std::array<cplx, N> data{};

  constexpr cplx& operator[](std::size_t i) { return data[i]; }
  constexpr const cplx& operator[](std::size_t i) const { return data[i]; }
  static constexpr std::size_t size() { return N; }

  Vector& operator+=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) data[i] += o.data[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    for (std::size_t i = 0; i < N; ++i) data[i] -= o.data[i];
    return *this;
  }
  Vector& operator*=(cplx s) {
    for (auto& x : data) x *= s;
    return *this;
  }
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(cplx s, Vector a) { return a *= s; }
  friend Vector operator*(Vector a, cplx s) { return a *= s; }
};

template <std::size_t N>
struct SquareMatrix {
  // Row-major.
  std::array<cplx, N * N> data{};

  constexpr cplx& operator()(std::size_t r, std::size_t c) { return data[r * N + c]; }
  constexpr const cplx& operator()(std::size_t r, std::size_t c) const { return data[r * N + c]; }
  static constexpr std::size_t dim() { return N; }

  static SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }
  static SquareMatrix zero() { return SquareMatrix{}; }
  static SquareMatrix diagonal(const std::array<cplx, N>& d) {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] += o.data[i];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) data[i] -= o.data[i];
    return *this;
  }
  SquareMatrix& operator*=(cplx s) {
    for (auto& x : data) x *= s;
    return *this;
  }
  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator-(SquareMatrix a) { return a *= -1.0; }
  friend SquareMatrix operator*(cplx s, SquareMatrix a) { return a *= s; }
  friend SquareMatrix operator*(SquareMatrix a, cplx s) { return a *= s; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < N; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend Vector<N> operator*(const SquareMatrix& a, const Vector<N>& v) {
    Vector<N> r;
    for (std::size_t i = 0; i < N; ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < N; ++j) acc += a(i, j) * v[j];
      r[i] = acc;
    }
    return r;
  }
};

using Mat2 = SquareMatrix<2>;
using Mat4 = SquareMatrix<4>;
using Vec2 = Vector<2>;
using Vec4 = Vector<4>;

template <std::size_t N>
SquareMatrix<N> adjoint(const SquareMatrix<N>& m) {
  SquareMatrix<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r(i, j) = std::conj(m(j, i));
  return r;
}

template <std::size_t N>
SquareMatrix<N> conjugate(const SquareMatrix<N>& m) {
  SquareMatrix<N> r;
  for (std::size_t i = 0; i < N * N; ++i) r.data[i] = std::conj(m.data[i]);
  return r;
}

template <std::size_t N>
SquareMatrix<N> transpose(const SquareMatrix<N>& m) {
  SquareMatrix<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r(i, j) = m(j, i);
  return r;
}

template <std::size_t N>
Vector<N> conjugate(const Vector<N>& v) {
  Vector<N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = std::conj(v[i]);
  return r;
}

template <std::size_t N>
cplx trace(const SquareMatrix<N>& m) {
  cplx t{};
  for (std::size_t i = 0; i < N; ++i) t += m(i, i);
  return t;
}

inline cplx trace2(const Mat2& m) { return trace(m); }
inline cplx trace4(const Mat4& m) { return trace(m); }

inline cplx det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

// <a|b>, antilinear in the first argument.
template <std::size_t N>
cplx inner(const Vector<N>& a, const Vector<N>& b) {
  cplx acc{};
  for (std::size_t i = 0; i < N; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

template <std::size_t N>
double squared_norm(const Vector<N>& v) {
  double acc = 0.0;
  for (const auto& x : v.data) acc += std::norm(x);
  return acc;
}

template <std::size_t N>
double norm(const Vector<N>& v) {
  return std::sqrt(squared_norm(v));
}

// <v|m|v>
template <std::size_t N>
cplx expectation(const SquareMatrix<N>& m, const Vector<N>& v) {
  return inner(v, m * v);
}

template <std::size_t N>
double frobenius_norm(const SquareMatrix<N>& m) {
  double acc = 0.0;
  for (const auto& x : m.data) acc += std::norm(x);
  return std::sqrt(acc);
}

template <std::size_t N>
double max_abs_entry(const SquareMatrix<N>& m) {
  double acc = 0.0;
  for (const auto& x : m.data) acc = std::max(acc, std::abs(x));
  return acc;
}

template <std::size_t N>
bool all_finite(const SquareMatrix<N>& m) {
  return std::all_of(m.data.begin(), m.data.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

template <std::size_t N>
bool all_finite(const Vector<N>& v) {
  return std::all_of(v.data.begin(), v.data.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

// |a><b|
template <std::size_t N>
SquareMatrix<N> outer(const Vector<N>& a, const Vector<N>& b) {
  SquareMatrix<N> r;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) r(i, j) = a[i] * std::conj(b[j]);
  return r;
}

inline Mat4 kron2(const Mat2& a, const Mat2& b) {
  Mat4 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return r;
}

inline Vec4 kron2(const Vec2& a, const Vec2& b) {
  return Vec4{{a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]}};
}

// --------------------------- single-qubit operators ---------------------------

namespace pauli {

inline Mat2 identity() { return Mat2::identity(); }

inline Mat2 x() {
  Mat2 m;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline Mat2 y() {
  Mat2 m;
  m(0, 1) = -kI;
  m(1, 0) = kI;
  return m;
}

inline Mat2 z() {
  Mat2 m;
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// |down><up|
inline Mat2 lower() {
  Mat2 m;
  m(1, 0) = 1.0;
  return m;
}

// |up><down|
inline Mat2 raise() {
  Mat2 m;
  m(0, 1) = 1.0;
  return m;
}

// v.sigma for a real 3-vector.
inline Mat2 along(const std::array<double, 3>& v) {
  return cplx(v[0]) * x() + cplx(v[1]) * y() + cplx(v[2]) * z();
}

}  // namespace pauli

inline Mat4 lift_a(const Mat2& m) { return kron2(m, Mat2::identity()); }
inline Mat4 lift_b(const Mat2& m) { return kron2(Mat2::identity(), m); }

// sigma_y (x) sigma_y, the spin-flip used by the concurrence.
inline const Mat4& spin_flip() {
  static const Mat4 m = kron2(pauli::y(), pauli::y());
  return m;
}

// --------------------------------- expm ---------------------------------------

template <std::size_t N>
double one_norm(const SquareMatrix<N>& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < N; ++i) col += std::abs(m(i, j));
    best = std::max(best, col);
  }
  return best;
}

inline constexpr double kDefaultExpmTol = 1e-15;

// Taylor series with scaling and squaring. The scaled matrix has 1-norm
// <= 0.5 and the series is cut once a term drops below tol * 1e-2 relative
// to the partial sum.
template <std::size_t N>
SquareMatrix<N> expm(const SquareMatrix<N>& m, double tol = kDefaultExpmTol) {
  if (!(tol > 0.0)) throw ConfigError("expm: tolerance must be positive");
  if (!all_finite(m)) throw NumericalError("expm: non-finite input");
  constexpr int kMaxSquarings = 64;
  constexpr int kMaxTerms = 60;

  const double nrm = one_norm(m);
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  if (squarings > kMaxSquarings) throw NumericalError("expm: squaring budget exceeded");

  const SquareMatrix<N> a = m * cplx(std::ldexp(1.0, -squarings));
  SquareMatrix<N> sum = SquareMatrix<N>::identity();
  SquareMatrix<N> term = SquareMatrix<N>::identity();
  bool converged = false;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = (term * a) * cplx(1.0 / k);
    sum += term;
    if (one_norm(term) <= tol * 1e-2 * one_norm(sum)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NumericalError("expm: Taylor series did not converge");
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// --------------------------- Hermitian eigensolver -----------------------------

template <std::size_t N>
struct HermitianEigen {
  std::array<double, N> values{};  // descending
  SquareMatrix<N> vectors;         // columns are eigenvectors
};

template <std::size_t N>
double hermiticity_defect(const SquareMatrix<N>& m) {
  return max_abs_entry(m - adjoint(m));
}

// Cyclic complex Jacobi. Each rotation removes the phase of the pivot and
// then applies a real Givens rotation.
template <std::size_t N>
HermitianEigen<N> herm_eig(const SquareMatrix<N>& m, double herm_tol = 1e-10) {
  if (!all_finite(m)) throw NumericalError("herm_eig: non-finite input");
  if (hermiticity_defect(m) > herm_tol) throw ConfigError("herm_eig: matrix is not Hermitian");

  SquareMatrix<N> a = m;
  for (std::size_t i = 0; i < N; ++i) a(i, i) = a(i, i).real();
  SquareMatrix<N> v = SquareMatrix<N>::identity();

  auto off_norm = [&a] {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (i != j) s += std::norm(a(i, j));
    return s;
  };
  const double scale = std::max(frobenius_norm(m), 1e-300);

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (std::sqrt(off_norm()) <= 1e-17 * scale) break;
    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= 1e-300) continue;
        const cplx phase = a(p, q) / r;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // G = D * P with D = diag(1, e^{-i phi}) on (p, q).
        const cplx gpp = c;
        const cplx gpq = s;
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);

        // a <- a * G (columns p, q)
        for (std::size_t i = 0; i < N; ++i) {
          const cplx aip = a(i, p);
          const cplx aiq = a(i, q);
          a(i, p) = aip * gpp + aiq * gqp;
          a(i, q) = aip * gpq + aiq * gqq;
        }
        // a <- G^dagger * a (rows p, q)
        for (std::size_t j = 0; j < N; ++j) {
          const cplx apj = a(p, j);
          const cplx aqj = a(q, j);
          a(p, j) = std::conj(gpp) * apj + std::conj(gqp) * aqj;
          a(q, j) = std::conj(gpq) * apj + std::conj(gqq) * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t i = 0; i < N; ++i) {
          const cplx vip = v(i, p);
          const cplx viq = v(i, q);
          v(i, p) = vip * gpp + viq * gqp;
          v(i, q) = vip * gpq + viq * gqq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw NumericalError("herm_eig: Jacobi sweeps did not converge");

  std::array<std::size_t, N> order;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  HermitianEigen<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < N; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline HermitianEigen<4> herm_eig4(const Mat4& m, double herm_tol = 1e-10) { return herm_eig(m, herm_tol); }

// f(m) for Hermitian m through its eigendecomposition.
template <std::size_t N, typename F>
SquareMatrix<N> hermitian_function(const HermitianEigen<N>& e, F&& f) {
  SquareMatrix<N> r;
  for (std::size_t k = 0; k < N; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) r(i, j) += fk * e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  return r;
}

}  // namespace trajent
