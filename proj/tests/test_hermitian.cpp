#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace crmimo;

namespace {

ComplexMatrix random_square(std::uint64_t seed, int n) {
  CounterRng rng(seed);
  ComplexMatrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = rng.next_cscg();
  return a;
}

// Laplace expansion along the first row; fine for n <= 5.
Complex cofactor_det(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  Complex d = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    ComplexMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index k = 0;
      for (Eigen::Index cc = 0; cc < n; ++cc)
        if (cc != c) minor(r - 1, k++) = a(r, cc);
    }
    d += (c % 2 == 0 ? 1.0 : -1.0) * a(0, c) * cofactor_det(minor);
  }
  return d;
}

}  // namespace

TEST(HermitianMatrix, ConstructionSymmetrizes) {
  const HermitianMatrix h(random_square(3, 4));
  EXPECT_EQ(h.asymmetry(), 0.0);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(h(i, i).imag(), 0.0);
  EXPECT_THROW(HermitianMatrix(ComplexMatrix(2, 3)), Error);
}

TEST(Eig, MatchesReferenceSolver) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 1 + int(seed % 6);
    const HermitianMatrix h(random_square(seed, n));
    const EigenDecomposition e = eig_hermitian(h);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(h.matrix());
    for (int i = 0; i < n; ++i) EXPECT_NEAR(e.eigenvalues(i), ref.eigenvalues()(n - 1 - i), 1e-11) << "seed " << seed;
    const ComplexMatrix v = e.eigenvectors;
    EXPECT_LT(fixtures::max_abs(v.adjoint() * v - ComplexMatrix::Identity(n, n)), 1e-12);
    EXPECT_LT(fixtures::max_abs(v * e.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint() - h.matrix()), 1e-11);
  }
}

TEST(Eig, RepeatedEigenvaluesAndDiagonal) {
  const HermitianMatrix d = HermitianMatrix::diagonal({2.0, 5.0, 2.0});
  const EigenDecomposition e = eig_hermitian(d);
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 5.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 2.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(2), 2.0);
}

TEST(Eig, RejectsNonFinite) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eig_hermitian(HermitianMatrix(a)), Error);
}

TEST(PsdProject, ClipsNegativeSpectrum) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const HermitianMatrix h(random_square(seed + 100, 4));
    const HermitianMatrix p = psd_project(h);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(h.matrix());
    const auto lam = ref.eigenvalues();
    EXPECT_GE(eig_hermitian(p).eigenvalues.minCoeff(), -1e-12);
    // Distance to the PSD cone is the norm of the negative part.
    double neg2 = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) neg2 += std::pow(std::min(0.0, lam(i)), 2);
    EXPECT_NEAR((h - p).frobenius(), std::sqrt(neg2), 1e-10);
    EXPECT_LT((psd_project(p) - p).frobenius(), 1e-10);
  }
}

TEST(Cholesky, LogdetAgreesWithCofactorDeterminant) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const int n = 1 + int(seed % 5);
    const ComplexMatrix a = random_square(seed + 200, n);
    const HermitianMatrix pd(a * a.adjoint() + ComplexMatrix::Identity(n, n) * 0.1);
    const Complex det = cofactor_det(pd.matrix());
    EXPECT_NEAR(det.imag(), 0.0, 1e-9 * std::abs(det));
    EXPECT_NEAR(logdet_pd(pd), std::log(det.real()), 1e-10);
  }
}

TEST(Cholesky, SolveAndInverse) {
  const ComplexMatrix a = random_square(77, 4);
  const HermitianMatrix pd(a * a.adjoint() + ComplexMatrix::Identity(4, 4));
  ComplexVector b(4);
  b << Complex(1, 2), Complex(-1, 0), Complex(0, 0.5), Complex(3, -1);
  EXPECT_LT((pd.matrix() * solve_pd(pd, b) - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(fixtures::max_abs(inverse_pd(pd).matrix() * pd.matrix() - ComplexMatrix::Identity(4, 4)), 1e-12);
  EXPECT_THROW(solve_pd(pd, ComplexVector::Zero(3)), Error);
}

TEST(Cholesky, RejectsSingular) {
  ComplexVector v(3);
  v << 1.0, Complex(0, 1), 2.0;
  try {
    cholesky(HermitianMatrix::outer(v).matrix());
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
}
