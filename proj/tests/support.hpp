#pragma once

#include <cstdint>
#include <vector>

#include "crmimo/crmimo.hpp"

namespace crmimo::fixtures {

/// Random instance with `pu` primary users at distance ratio 1.
inline Scenario random_scenario(std::uint64_t seed, int K, int nt, int nr, int pu = 0, double p_u = 10.0) {
  ScenarioParams p;
  p.K = K;
  p.N_t = nt;
  p.N_r = nr;
  p.P_u = p_u;
  p.seed = seed;
  p.l_ratio.assign(std::size_t(pu), 1.0);
  // Distinct weights so the decoding order is strict.
  for (int k = 0; k < K; ++k) p.weights.push_back(1.0 + 0.37 * double((k * 7 + int(seed)) % K));
  return generate_scenario(p);
}

/// Two single-antenna users with real gains 0.6 and 1.2, weights (2, 1), P_u = 4.
inline Scenario scalar_pair() {
  Scenario s;
  s.K = 2;
  s.N_t = s.N_r = 1;
  s.channels = {ComplexMatrix::Constant(1, 1, 0.6), ComplexMatrix::Constant(1, 1, 1.2)};
  s.weights = {2.0, 1.0};
  s.P_u = 4.0;
  s.validate();
  return s;
}

/// Random PSD dual-MAC covariances A A^H * scale.
inline MacCovarianceSet random_covariances(std::uint64_t seed, int K, int nr, double scale) {
  CounterRng rng(seed);
  MacCovarianceSet q;
  for (int k = 0; k < K; ++k) {
    ComplexMatrix a(nr, nr);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nr; ++c) a(r, c) = rng.next_cscg();
    q.q.emplace_back(a * a.adjoint() * scale);
  }
  return q;
}

// Central differences of f along the Hermitian basis directions of user k.
inline HermitianMatrix fd_gradient(const Scenario& s, const UserOrdering& o, const MacCovarianceSet& q,
                                   const HermitianMatrix& r_w, int k, double h) {
  const int n = s.N_r;
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  const auto along = [&](const ComplexMatrix& d) {
    MacCovarianceSet plus = q, minus = q;
    plus.q[std::size_t(k)] = HermitianMatrix(q.q[std::size_t(k)].matrix() + h * d);
    minus.q[std::size_t(k)] = HermitianMatrix(q.q[std::size_t(k)].matrix() - h * d);
    return (weighted_sum_rate_mac(s, o, plus, r_w) - weighted_sum_rate_mac(s, o, minus, r_w)) / (2.0 * h);
  };
  for (int i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    g(i, i) = along(e);
    for (int j = i + 1; j < n; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(n, n), im = ComplexMatrix::Zero(n, n);
      re(i, j) = re(j, i) = 1.0;
      im(i, j) = Complex(0, 1);
      im(j, i) = Complex(0, -1);
      // tr(G D) = 2 Re G_ji for the real direction, -2 Im G_ji for the imaginary one.
      const double a = along(re) / 2.0, b = along(im) / 2.0;
      g(j, i) = Complex(a, -b);
      g(i, j) = std::conj(g(j, i));
    }
  }
  return HermitianMatrix(g);
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace crmimo::fixtures
