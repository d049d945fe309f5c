#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crmimo/errors.hpp"

namespace crmimo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Square complex matrix that is Hermitian by construction: the input is
/// replaced by (A + A^H) / 2, so the stored entries are exactly conjugate
/// symmetric and the diagonal is exactly real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const ComplexMatrix& a) : m_(symmetrize(a)) {}

  static HermitianMatrix zero(Eigen::Index n) {
    return HermitianMatrix(Raw{}, ComplexMatrix::Zero(n, n));
  }
  static HermitianMatrix identity(Eigen::Index n) {
    return HermitianMatrix(Raw{}, ComplexMatrix::Identity(n, n));
  }
  static HermitianMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m = ComplexMatrix::Zero(Eigen::Index(d.size()), Eigen::Index(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(Eigen::Index(i), Eigen::Index(i)) = d[i];
    return HermitianMatrix(Raw{}, std::move(m));
  }
  /// v v^H
  static HermitianMatrix outer(const ComplexVector& v) { return HermitianMatrix(v * v.adjoint()); }

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.diagonal().real().sum(); }
  double frobenius() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(Raw{}, m_ + o.m_); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(Raw{}, m_ - o.m_); }
  HermitianMatrix operator*(double s) const { return HermitianMatrix(Raw{}, m_ * s); }
  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    m_ += o.m_;
    return *this;
  }

  /// Largest |A_ij - conj(A_ji)|; zero for every constructed value.
  double asymmetry() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

 private:
  struct Raw {};
  HermitianMatrix(Raw, ComplexMatrix m) : m_(std::move(m)) {}

  static ComplexMatrix symmetrize(const ComplexMatrix& a) {
    if (a.rows() != a.cols() || a.rows() < 1) {
      throw Error(ErrorKind::DimensionMismatch, "Hermitian matrix must be square and non-empty");
    }
    ComplexMatrix s = (a + a.adjoint()) * 0.5;
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = Complex(s(i, i).real(), 0.0);
    return s;
  }

  ComplexMatrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& a) { return a * s; }

/// Eigenvalues descending, eigenvectors as matching unit-norm columns.
struct EigenDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  ComplexVector vector(Eigen::Index j) const { return eigenvectors.col(j); }
  HermitianMatrix reconstruct() const {
    return HermitianMatrix(eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
                           eigenvectors.adjoint());
  }
};

namespace detail {

inline bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

inline double off_diagonal_norm2(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return s;
}

// Rotates the phase of v so that its first "large" entry (modulus at least half
// the maximum) is real and positive. Makes eigenvector output reproducible.
inline void canonical_phase(Eigen::Ref<ComplexVector> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double a = std::abs(v(k));
    if (a >= 0.5 * vmax) {
      v *= std::conj(v(k)) / a;
      v(k) = Complex(a, 0.0);
      return;
    }
  }
}

inline bool lex_greater_real(const ComplexVector& a, const ComplexVector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k).real() > b(k).real()) return true;
    if (a(k).real() < b(k).real()) return false;
  }
  return false;
}

}  // namespace detail

/// Cyclic complex Jacobi eigensolver. Sweeps until the off-diagonal Frobenius
/// mass drops below 1e-12 relative to ||A||_F.
inline EigenDecomposition eig_hermitian(const HermitianMatrix& h) {
  const ComplexMatrix& src = h.matrix();
  if (!detail::all_finite(src)) throw Error(ErrorKind::InvalidInput, "non-finite matrix entry");
  const Eigen::Index n = src.rows();
  ComplexMatrix a = src;
  ComplexMatrix v = ComplexMatrix::Identity(n, n);

  const double total2 = a.squaredNorm();
  const double stop2 = 1e-24 * total2;
  for (int sweep = 0; sweep < 100; ++sweep) {
    const double off2 = detail::off_diagonal_norm2(a);
    if (off2 <= stop2 || off2 == 0.0) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Negligible relative to both diagonal entries: zero it outright.
        if (sweep > 3 && std::abs(app) + 1e18 * mag == std::abs(app) &&
            std::abs(aqq) + 1e18 * mag == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Unitary block on (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const Complex upp = c;
        const Complex upq = s;
        const Complex uqp = -s * std::conj(phase);
        const Complex uqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * upp + akq * uqp;
          a(k, q) = akp * upq + akq * uqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * upp + vkq * uqp;
          v(k, q) = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (Eigen::Index j = 0; j < n; ++j) {
    v.col(j).normalize();
    detail::canonical_phase(v.col(j));
  }
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double lx = a(x, x).real(), ly = a(y, y).real();
    if (lx != ly) return lx > ly;
    return detail::lex_greater_real(v.col(x), v.col(y));
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src_col = order[static_cast<std::size_t>(j)];
    out.eigenvalues(j) = a(src_col, src_col).real();
    out.eigenvectors.col(j) = v.col(src_col);
  }
  return out;
}

/// Nearest PSD matrix in Frobenius norm: negative eigenvalues clipped to zero.
inline HermitianMatrix psd_project(const HermitianMatrix& a) {
  const EigenDecomposition e = eig_hermitian(a);
  if (e.eigenvalues.minCoeff() >= 0.0) return a;
  RealVector clipped = e.eigenvalues.cwiseMax(0.0);
  return HermitianMatrix(e.eigenvectors * clipped.cast<Complex>().asDiagonal() *
                         e.eigenvectors.adjoint());
}

/// Lower-triangular Cholesky factor L with A = L L^H.
/// Throws NotPositiveDefinite when a pivot is <= 1e-14.
inline ComplexMatrix cholesky(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 1e-14)) {
      throw Error(ErrorKind::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(d) + " at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

inline double logdet_from_cholesky(const ComplexMatrix& l) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < l.rows(); ++j) s += std::log(l(j, j).real());
  return 2.0 * s;
}

/// ln det(A), in nats.
inline double logdet_pd(const HermitianMatrix& a) { return logdet_from_cholesky(cholesky(a.matrix())); }

/// Solves L L^H X = B given the Cholesky factor.
inline ComplexMatrix cholesky_solve(const ComplexMatrix& l, const ComplexMatrix& b) {
  const Eigen::Index n = l.rows();
  ComplexMatrix y = b;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex s = y(i, c);
      for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * y(k, c);
      y(i, c) = s / l(i, i).real();
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Complex s = y(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * y(k, c);
      y(i, c) = s / l(i, i).real();
    }
  }
  return y;
}

inline ComplexVector solve_pd(const HermitianMatrix& a, const ComplexVector& b) {
  if (b.size() != a.dim()) throw Error(ErrorKind::DimensionMismatch, "solve_pd: rhs size");
  return cholesky_solve(cholesky(a.matrix()), b);
}

inline HermitianMatrix inverse_pd(const HermitianMatrix& a) {
  const ComplexMatrix l = cholesky(a.matrix());
  return HermitianMatrix(cholesky_solve(l, ComplexMatrix::Identity(a.dim(), a.dim())));
}

/// Largest eigenvalue (convenience wrapper).
inline double max_eigenvalue(const HermitianMatrix& a) { return eig_hermitian(a).eigenvalues(0); }

}  // namespace crmimo
