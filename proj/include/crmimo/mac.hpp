#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "crmimo/hermitian.hpp"
#include "crmimo/scenario.hpp"

namespace crmimo {

/// Dual-MAC transmit covariances Q_i^m (N_r x N_r), indexed by original user.
struct MacCovarianceSet {
  std::vector<HermitianMatrix> q;

  static MacCovarianceSet zeros(int K, int n) {
    return {std::vector<HermitianMatrix>(std::size_t(K), HermitianMatrix::zero(n))};
  }
  double total_trace() const {
    double s = 0.0;
    for (const auto& m : q) s += m.trace();
    return s;
  }
  MacCovarianceSet scaled(double c) const {
    MacCovarianceSet out;
    for (const auto& m : q) out.q.push_back(m * c);
    return out;
  }
};

/// Noise covariance of the dual MAC and the matching scalar budget.
struct NoiseShape {
  HermitianMatrix r_w;         // sum_j q_t[j] h_j h_j^H + q_u I
  HermitianMatrix r_w_ridged;  // r_w + 1e-9 tr(r_w)/N_t I, used by every solve
  std::vector<double> q_t;
  double q_u = 0.0;
  double budget = 0.0;         // sum_j q_t[j] P_t[j] + q_u P_u
};

inline constexpr double kRidge = 1e-9;
inline constexpr double kAuxFloor = 1e-8;

inline HermitianMatrix add_ridge(const HermitianMatrix& r) {
  const double level = kRidge * r.trace() / double(r.dim());
  return r + HermitianMatrix::identity(r.dim()) * level;
}

inline NoiseShape noise_shape(const Scenario& s, const std::vector<double>& q_t, double q_u) {
  if (q_t.size() != s.pu_channels.size())
    throw Error(ErrorKind::DimensionMismatch, "noise_shape: one q_t per PU channel");
  bool any = q_u >= kAuxFloor;
  for (double q : q_t) {
    if (q < 0.0) throw Error(ErrorKind::InvalidInput, "noise_shape: q_t must be >= 0");
    any = any || q >= kAuxFloor;
  }
  if (q_u < 0.0) throw Error(ErrorKind::InvalidInput, "noise_shape: q_u must be >= 0");
  if (!any) throw Error(ErrorKind::AllZeroAuxiliaries, "every auxiliary variable is below 1e-8");

  ComplexMatrix r = ComplexMatrix::Identity(s.N_t, s.N_t) * q_u;
  double budget = q_u * s.P_u;
  for (std::size_t j = 0; j < q_t.size(); ++j) {
    const ComplexVector& h = s.pu_channels[j];
    r += q_t[j] * (h * h.adjoint());
    budget += q_t[j] * s.P_t[j];
  }
  NoiseShape n;
  n.r_w = HermitianMatrix(r);
  n.r_w_ridged = add_ridge(n.r_w);
  n.q_t = q_t;
  n.q_u = q_u;
  n.budget = budget;
  return n;
}

namespace detail {

inline ComplexMatrix mac_term(const ComplexMatrix& h, const HermitianMatrix& q) {
  return h.adjoint() * q.matrix() * h;  // H^H Q H, N_t x N_t
}

// F_i = R_w + sum_{j <= i} H_j^H Q_j H_j along the decoding order, i = 0..K.
inline std::vector<ComplexMatrix> cumulative_f(const Scenario& s, const UserOrdering& o,
                                               const MacCovarianceSet& q, const HermitianMatrix& r_w) {
  std::vector<ComplexMatrix> f;
  f.reserve(o.pi.size() + 1);
  f.push_back(r_w.matrix());
  for (int user : o.pi) {
    f.push_back(f.back() + mac_term(s.channels[std::size_t(user)], q.q[std::size_t(user)]));
  }
  return f;
}

}  // namespace detail

/// Per-user dual-MAC rates (nats) under SIC in the given order: user pi[i]
/// gets ln|F_i| - ln|F_{i-1}|.
inline std::vector<double> per_user_rates_mac(const Scenario& s, const UserOrdering& o,
                                              const MacCovarianceSet& q, const HermitianMatrix& r_w) {
  const auto f = detail::cumulative_f(s, o, q, r_w);
  std::vector<double> logdets;
  for (const auto& m : f) logdets.push_back(logdet_from_cholesky(cholesky(m)));
  std::vector<double> rates(std::size_t(s.K), 0.0);
  for (std::size_t i = 0; i < o.pi.size(); ++i)
    rates[std::size_t(o.pi[i])] = std::max(0.0, logdets[i + 1] - logdets[i]);
  return rates;
}

/// sum_i Delta_i (ln|F_i| - ln|R_w|); zero at Q = 0.
inline double weighted_sum_rate_mac(const Scenario& s, const UserOrdering& o, const MacCovarianceSet& q,
                                    const HermitianMatrix& r_w) {
  const auto f = detail::cumulative_f(s, o, q, r_w);
  const double base = logdet_from_cholesky(cholesky(f[0]));
  double total = 0.0;
  for (std::size_t i = 0; i < o.pi.size(); ++i) {
    if (o.deltas[i] == 0.0) continue;
    total += o.deltas[i] * (logdet_from_cholesky(cholesky(f[i + 1])) - base);
  }
  return total;
}

/// d f / d Q_k = sum_{j >= pos(k)} Delta_j H_k F_j^{-1} H_k^H.
inline HermitianMatrix mac_gradient(const Scenario& s, const UserOrdering& o, const MacCovarianceSet& q,
                                    const HermitianMatrix& r_w, int k) {
  const auto f = detail::cumulative_f(s, o, q, r_w);
  const int pos = o.position_of(k);
  const Eigen::Index nt = s.N_t;
  ComplexMatrix m = ComplexMatrix::Zero(nt, nt);
  for (std::size_t j = std::size_t(pos); j < o.pi.size(); ++j) {
    if (o.deltas[j] == 0.0) continue;
    m += o.deltas[j] * cholesky_solve(cholesky(f[j + 1]), ComplexMatrix::Identity(nt, nt));
  }
  const ComplexMatrix& h = s.channels[std::size_t(k)];
  return HermitianMatrix(h * m * h.adjoint());
}

/// Closed-form point-to-point water-filling over the right singular vectors
/// of H (N_r x N_t): returns the N_t x N_t covariance and its rate in nats.
struct WaterfillResult {
  HermitianMatrix covariance;
  double rate = 0.0;
  double water_level = 0.0;
};

inline WaterfillResult waterfill_single_user(const ComplexMatrix& h, double power, double sigma2 = 1.0) {
  if (power < 0.0) throw Error(ErrorKind::InvalidInput, "waterfill: negative power");
  const EigenDecomposition e = eig_hermitian(HermitianMatrix(h.adjoint() * h));
  const Eigen::Index n = e.eigenvalues.size();
  // Modes with gain g_i = s_i^2 / sigma2, sorted descending by eig_hermitian.
  std::vector<double> gains;
  for (Eigen::Index i = 0; i < n; ++i) gains.push_back(std::max(0.0, e.eigenvalues(i)) / sigma2);

  WaterfillResult out;
  std::vector<double> alloc(std::size_t(n), 0.0);
  if (power > 0.0) {
    // Largest active set m such that the level mu = (P + sum 1/g) / m exceeds 1/g_m.
    double inv_sum = 0.0;
    double mu = 0.0;
    std::size_t active = 0;
    for (std::size_t m = 0; m < gains.size(); ++m) {
      if (gains[m] <= 0.0) break;
      const double candidate = (power + inv_sum + 1.0 / gains[m]) / double(m + 1);
      if (candidate <= 1.0 / gains[m]) break;
      inv_sum += 1.0 / gains[m];
      mu = candidate;
      active = m + 1;
    }
    for (std::size_t m = 0; m < active; ++m) alloc[m] = std::max(0.0, mu - 1.0 / gains[m]);
    out.water_level = mu;
  }
  RealVector p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = alloc[std::size_t(i)];
    out.rate += std::log1p(p(i) * gains[std::size_t(i)]);
  }
  out.covariance = HermitianMatrix(e.eigenvectors * p.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint());
  return out;
}

/// P - sigma2 * sum_i tr(Q_i): subgradient of the dual function in lambda.
inline double subgradient_of_dual(const MacCovarianceSet& q, double budget, double sigma2 = 1.0) {
  return budget - sigma2 * q.total_trace();
}

// ---------------------------------------------------------------------------
// Inner projected-gradient ascent for a fixed water level.

struct InnerOptions {
  double step = 0.1;           // t: first trial step of every block update
  double grad_tol = 1e-8;      // stop when every ||projected gradient||_F^2 <= grad_tol
  int max_iterations = 10000;  // full Gauss-Seidel sweeps
  // First trial step from the Barzilai-Borwein ratio of the block's last
  // move instead of `step`; backtracking still guarantees monotonicity.
  bool spectral_step = true;
};

struct InnerResult {
  MacCovarianceSet covariances;
  double lagrangian = 0.0;     // f(Q) - lambda * sigma2 * sum tr(Q)
  double objective = 0.0;      // f(Q)
  double max_grad_norm2 = 0.0;
  int iterations = 0;
  bool converged = false;      // false: cap hit or progress stalled above grad_tol
  std::vector<double> lagrangian_trace;  // after each sweep
};

namespace detail {

// Incremental state for the block updates: per-position MAC terms and, for
// each position with a nonzero Delta, the matrix F_j with its Cholesky factor.
class AscentWorkspace {
 public:
  AscentWorkspace(const Scenario& s, const UserOrdering& o, const HermitianMatrix& r_w, const MacCovarianceSet& q)
      : s_(s), o_(o), q_(q) {
    const std::size_t K = o.pi.size();
    terms_.resize(K);
    for (std::size_t i = 0; i < K; ++i) terms_[i] = mac_term(channel(i), q_.q[std::size_t(o.pi[i])]);
    for (std::size_t j = 0; j < K; ++j)
      if (o.deltas[j] > 0.0) active_.push_back(j);
    f_.resize(active_.size());
    chol_.resize(active_.size());
    logdet_.resize(active_.size());
    ComplexMatrix run = r_w.matrix();
    std::size_t a = 0;
    for (std::size_t j = 0; j < K && a < active_.size(); ++j) {
      run += terms_[j];
      if (j == active_[a]) {
        f_[a] = run;
        chol_[a] = cholesky(run);
        logdet_[a] = logdet_from_cholesky(chol_[a]);
        ++a;
      }
    }
    base_logdet_ = logdet_from_cholesky(cholesky(r_w.matrix()));
  }

  const ComplexMatrix& channel(std::size_t pos) const { return s_.channels[std::size_t(o_.pi[pos])]; }
  const MacCovarianceSet& covariances() const { return q_; }

  double objective() const {
    double f = 0.0;
    for (std::size_t a = 0; a < active_.size(); ++a) f += o_.deltas[active_[a]] * (logdet_[a] - base_logdet_);
    return f;
  }

  ComplexMatrix gradient(std::size_t pos) const {
    const Eigen::Index nt = s_.N_t;
    ComplexMatrix m = ComplexMatrix::Zero(nt, nt);
    for (std::size_t a = 0; a < active_.size(); ++a) {
      if (active_[a] < pos) continue;
      m += o_.deltas[active_[a]] * cholesky_solve(chol_[a], ComplexMatrix::Identity(nt, nt));
    }
    const ComplexMatrix& h = channel(pos);
    return h * m * h.adjoint();
  }

  struct Trial {
    ComplexMatrix term;
    std::vector<ComplexMatrix> f, chol;
    std::vector<double> logdet;
    double delta_objective = 0.0;
  };

  Trial trial(std::size_t pos, const HermitianMatrix& candidate) const {
    Trial t;
    t.term = mac_term(channel(pos), candidate);
    const ComplexMatrix diff = t.term - terms_[pos];
    for (std::size_t a = 0; a < active_.size(); ++a) {
      if (active_[a] < pos) continue;
      ComplexMatrix f = f_[a] + diff;
      ComplexMatrix c = cholesky(f);
      const double ld = logdet_from_cholesky(c);
      t.delta_objective += o_.deltas[active_[a]] * (ld - logdet_[a]);
      t.f.push_back(std::move(f));
      t.chol.push_back(std::move(c));
      t.logdet.push_back(ld);
    }
    return t;
  }

  void accept(std::size_t pos, const HermitianMatrix& candidate, Trial&& t) {
    terms_[pos] = std::move(t.term);
    std::size_t k = 0;
    for (std::size_t a = 0; a < active_.size(); ++a) {
      if (active_[a] < pos) continue;
      f_[a] = std::move(t.f[k]);
      chol_[a] = std::move(t.chol[k]);
      logdet_[a] = t.logdet[k];
      ++k;
    }
    q_.q[std::size_t(o_.pi[pos])] = candidate;
  }

 private:
  const Scenario& s_;
  const UserOrdering& o_;
  MacCovarianceSet q_;
  std::vector<ComplexMatrix> terms_;
  std::vector<std::size_t> active_;
  std::vector<ComplexMatrix> f_, chol_;
  std::vector<double> logdet_;
  double base_logdet_ = 0.0;
};

}  // namespace detail

/// Maximizes f(Q) - lambda sigma2 sum tr(Q) over PSD Q for fixed lambda.
/// Users are updated one at a time along the decoding order with
/// Q_k <- [Q_k + t (df/dQ_k - lambda sigma2 I)]^+; a step that would lower the
/// Lagrangian is retried with t halved, so accepted iterates never decrease it.
inline InnerResult inner_ascent(const Scenario& s, const UserOrdering& o, const HermitianMatrix& r_w, double lambda,
                                const MacCovarianceSet& q_init, const InnerOptions& opt = {}) {
  if (lambda < 0.0) throw Error(ErrorKind::InvalidInput, "inner_ascent: lambda must be >= 0");
  if (!(opt.step > 0.0)) throw Error(ErrorKind::InvalidInput, "inner_ascent: step must be > 0");
  const double price = lambda * s.sigma2;
  detail::AscentWorkspace ws(s, o, r_w, q_init);
  const auto lagrangian = [&](double f, const MacCovarianceSet& q) { return f - price * q.total_trace(); };

  InnerResult out;
  double current = lagrangian(ws.objective(), ws.covariances());
  const Eigen::Index nr = s.N_r;
  const ComplexMatrix price_i = ComplexMatrix::Identity(nr, nr) * price;

  // Previous iterate and gradient of each block, for the spectral step.
  std::vector<std::optional<std::pair<HermitianMatrix, HermitianMatrix>>> memory(o.pi.size());

  for (int sweep = 1; sweep <= opt.max_iterations; ++sweep) {
    double worst = 0.0;
    const double before = current;
    for (std::size_t pos = 0; pos < o.pi.size(); ++pos) {
      const HermitianMatrix q_old = ws.covariances().q[std::size_t(o.pi[pos])];
      const HermitianMatrix grad(ws.gradient(pos) - price_i);
      const HermitianMatrix reference = psd_project(q_old + grad * opt.step);
      const double g2 = (reference - q_old).matrix().squaredNorm() / (opt.step * opt.step);
      worst = std::max(worst, g2);
      double t = opt.step;
      if (opt.spectral_step && memory[pos]) {
        // Barzilai-Borwein: t = <s, s> / <s, y> with s the last move and y the
        // decrease of the gradient along it (positive for a concave objective).
        const ComplexMatrix step = q_old.matrix() - memory[pos]->first.matrix();
        const ComplexMatrix decrease = memory[pos]->second.matrix() - grad.matrix();
        const double sy = (step.adjoint() * decrease).trace().real();
        const double ss = step.squaredNorm();
        if (sy > 0.0 && ss > 0.0) t = std::clamp(ss / sy, opt.step * 1e-3, opt.step * 1e6);
      }
      memory[pos].emplace(q_old, grad);
      if (g2 == 0.0) continue;
      HermitianMatrix candidate = t == opt.step ? reference : psd_project(q_old + grad * t);
      for (int halving = 0; halving < 60; ++halving) {
        std::optional<detail::AscentWorkspace::Trial> trial;
        try {
          trial = ws.trial(pos, candidate);
        } catch (const Error& e) {
          // A step so large that F_j loses definiteness in floating point is rejected like any other.
          if (e.kind() != ErrorKind::NotPositiveDefinite) throw;
        }
        const double gain =
            trial ? trial->delta_objective - price * (candidate.trace() - q_old.trace()) : -1.0;
        if (gain >= 0.0) {
          current += gain;
          ws.accept(pos, candidate, std::move(*trial));
          break;
        }
        t *= 0.5;
        candidate = psd_project(q_old + grad * t);
      }
    }
    out.iterations = sweep;
    out.max_grad_norm2 = worst;
    out.lagrangian_trace.push_back(current);
    if (worst <= opt.grad_tol) {
      out.converged = true;
      break;
    }
    // A whole sweep gained nothing measurable: what is left is below the
    // round-off of the log-determinants and further sweeps cannot help.
    if (current - before <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(current))) break;
  }
  out.covariances = ws.covariances();
  out.objective = ws.objective();
  out.lagrangian = lagrangian(out.objective, out.covariances);
  return out;
}

/// Dual function g(lambda) = max_Q f(Q) - lambda (sigma2 sum tr Q - P),
/// evaluated with inner_ascent. Returns the value and the maximizer.
struct DualEvaluation {
  double value = 0.0;
  double subgradient = 0.0;
  InnerResult inner;
};

inline DualEvaluation evaluate_dual(const Scenario& s, const UserOrdering& o, const HermitianMatrix& r_w,
                                    double budget, double lambda, const MacCovarianceSet& q_init,
                                    const InnerOptions& opt = {}) {
  DualEvaluation d;
  d.inner = inner_ascent(s, o, r_w, lambda, q_init, opt);
  d.value = d.inner.lagrangian + lambda * budget;
  d.subgradient = subgradient_of_dual(d.inner.covariances, budget, s.sigma2);
  return d;
}

// ---------------------------------------------------------------------------
// DIPA: bisection on the water level around the inner ascent.

struct DipaOptions {
  InnerOptions inner;
  double eps = 1e-6;            // lambda bracket width (normalized units)
  double eps_power_rel = 1e-5;  // accept when |power - P| <= eps_power_rel * P
  int max_bisections = 200;
};

struct DipaTraceRow {
  int iteration = 0;
  double objective = 0.0;  // nats
  double power = 0.0;      // sigma2 sum tr(Q)
  double lambda = 0.0;
};

struct DipaResult {
  MacCovarianceSet covariances;
  double lambda_star = 0.0;
  double objective = 0.0;   // nats, equals weighted_sum_rate_mac(covariances)
  double power = 0.0;       // sigma2 sum tr(Q)
  double budget = 0.0;
  bool inactive = false;    // budget not reached even as lambda -> 0
  bool inner_capped = false;
  int inner_iterations = 0;
  std::vector<DipaTraceRow> trace;
};

/// Warm start in normalized units (R_w scaled to unit average eigenvalue).
struct DipaWarmStart {
  MacCovarianceSet covariances;
  double lambda = 0.0;
};

namespace detail {

struct LevelPoint {
  double lambda = 0.0;
  MacCovarianceSet q;
  double power = 0.0;
  double objective = 0.0;
};

}  // namespace detail

/// Solves the dual-MAC weighted sum-rate problem for fixed auxiliaries.
///
/// The problem is invariant under (R_w, P, Q, lambda) -> (c R_w, c P, c Q,
/// lambda / c), so the search runs with R_w scaled to unit average eigenvalue
/// and the result is mapped back. lambda_max is the level at which the
/// gradient at Q = 0 is negative semidefinite for every user. When the bracket
/// closes before the power hits P within tolerance, the two bracketing
/// solutions are mixed so that the budget is met exactly.
inline DipaResult dipa(const Scenario& s, const UserOrdering& o, const NoiseShape& noise, const DipaOptions& opt = {},
                       DipaWarmStart* warm = nullptr) {
  if (!(noise.budget > 0.0)) throw Error(ErrorKind::InvalidInput, "dipa: budget must be > 0");
  const double scale = double(s.N_t) / noise.r_w.trace();
  const HermitianMatrix r = noise.r_w_ridged * scale;
  const double budget = noise.budget * scale;
  const double tol_power = opt.eps_power_rel * budget;

  DipaResult out;
  out.budget = noise.budget;
  int iteration = 0;
  const auto power_of = [&](const MacCovarianceSet& q) { return s.sigma2 * q.total_trace(); };
  const auto record = [&](const detail::LevelPoint& p) {
    out.trace.push_back({++iteration, p.objective, p.power / scale, p.lambda * scale});
  };

  MacCovarianceSet chain = (warm && warm->covariances.q.size() == std::size_t(s.K))
                               ? warm->covariances
                               : MacCovarianceSet::zeros(s.K, s.N_r);
  const auto solve_at = [&](double lambda) {
    InnerResult in = inner_ascent(s, o, r, lambda, chain, opt.inner);
    out.inner_iterations += in.iterations;
    out.inner_capped = out.inner_capped || !in.converged;
    chain = in.covariances;
    detail::LevelPoint p{lambda, std::move(in.covariances), 0.0, in.objective};
    p.power = power_of(p.q);
    record(p);
    return p;
  };

  const HermitianMatrix r_inv = inverse_pd(r);
  double top = 0.0;
  for (int k = 0; k < s.K; ++k) {
    const ComplexMatrix& h = s.channels[std::size_t(k)];
    top = std::max(top, max_eigenvalue(HermitianMatrix(h * r_inv.matrix() * h.adjoint())));
  }
  const double w_max = *std::max_element(s.weights.begin(), s.weights.end());
  // Q = 0 is optimal at and above this level.
  const double lambda_ceiling = std::max(w_max * top / s.sigma2, 1e-300);

  std::optional<detail::LevelPoint> lo;  // power > P
  detail::LevelPoint hi{lambda_ceiling, MacCovarianceSet::zeros(s.K, s.N_r), 0.0, 0.0};
  std::optional<detail::LevelPoint> done;

  const auto classify = [&](detail::LevelPoint&& p) {
    if (std::abs(p.power - budget) <= tol_power) {
      done = std::move(p);
    } else if (p.power > budget) {
      lo = std::move(p);
    } else {
      hi = std::move(p);
    }
  };

  bool hi_evaluated = false;
  if (warm && warm->lambda > 0.0 && warm->lambda < lambda_ceiling) {
    // Walk away from the previous level with doubling log-steps until the
    // budget is bracketed.
    classify(solve_at(warm->lambda));
    hi_evaluated = hi.lambda < lambda_ceiling;
    double factor = 1.0 + 1e-3;
    while (!done && !lo && hi.lambda > opt.eps) {
      classify(solve_at(hi.lambda / factor));
      factor *= factor;
    }
    factor = 1.0 + 1e-3;
    while (!done && lo && !hi_evaluated && lo->lambda * factor < lambda_ceiling) {
      classify(solve_at(lo->lambda * factor));
      hi_evaluated = hi.lambda < lambda_ceiling;
      factor *= factor;
    }
  }

  // Bracket refinement: false position on the power curve, with a plain
  // bisection step whenever the previous step failed to halve the bracket.
  bool bisect = true;
  for (int b = 0; b < opt.max_bisections && !done; ++b) {
    const double lower = lo ? lo->lambda : 0.0;
    const double width = hi.lambda - lower;
    if (width <= opt.eps) break;
    double next = lower + 0.5 * width;
    if (lo && !bisect) {
      const double frac = (lo->power - budget) / (lo->power - hi.power);
      next = lower + std::clamp(frac, 0.01, 0.99) * width;
    }
    classify(solve_at(next));
    bisect = hi.lambda - (lo ? lo->lambda : 0.0) > 0.5 * width;
  }

  detail::LevelPoint result;
  if (done) {
    result = std::move(*done);
  } else if (!lo) {
    // Budget never reached: constraint inactive for this instance.
    result = hi;
    out.inactive = true;
    result.lambda = 0.0;
  } else {
    const double theta = (budget - hi.power) / (lo->power - hi.power);
    result.lambda = theta * lo->lambda + (1.0 - theta) * hi.lambda;
    for (int k = 0; k < s.K; ++k) {
      result.q.q.push_back(lo->q.q[std::size_t(k)] * theta + hi.q.q[std::size_t(k)] * (1.0 - theta));
    }
    result.power = power_of(result.q);
  }

  if (warm) {
    warm->covariances = result.q;
    warm->lambda = result.lambda > 0.0 ? result.lambda : warm->lambda;
  }
  out.covariances = result.q.scaled(1.0 / scale);
  out.lambda_star = result.lambda * scale;
  out.power = result.power / scale;
  out.objective = weighted_sum_rate_mac(s, o, out.covariances, noise.r_w_ridged);
  out.trace.push_back({++iteration, out.objective, out.power, out.lambda_star});
  return out;
}

inline DipaResult dipa(const Scenario& s, const UserOrdering& o, const std::vector<double>& q_t, double q_u,
                       const DipaOptions& opt = {}) {
  return dipa(s, o, noise_shape(s, q_t, q_u), opt);
}

}  // namespace crmimo
