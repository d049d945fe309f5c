#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "crmimo/bc.hpp"
#include "crmimo/mac.hpp"
#include "crmimo/parallel.hpp"
#include "crmimo/scenario.hpp"

namespace crmimo {

struct AuxiliaryPoint {
  std::vector<double> q_t;
  double q_u = 0.0;
};

enum class ConstraintMode { Cognitive, PerAntenna, SumPowerOnly };

inline const char* to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::Cognitive: return "cognitive";
    case ConstraintMode::PerAntenna: return "per-antenna";
    case ConstraintMode::SumPowerOnly: return "sum-power-only";
  }
  return "unknown";
}

struct SipaOptions {
  double step = 0.1;
  double eps = 1e-3;            // complementary-slackness tolerance
  bool diminishing = false;     // t_n = step / sqrt(n)
  int max_outer = 5000;
  double feasibility_tol = 1e-4;
  int inactive_after = 50;      // consecutive clamped iterations
  double clamp = 1e-8;
  double q_t_init = 1.0;
  double q_u_init = 1.0;
  bool warm_start = true;
  // Divide each violation by its threshold before the step, i.e. run the
  // subgradient method on the constraints written as I_j / P_t,j <= 1 and
  // S / P_u <= 1. Same feasible set, steps independent of the power scale.
  bool relative_update = false;
  // false: run exactly max_outer iterations and report the last one.
  bool stop_at_convergence = true;
  // Per-antenna mode: threshold on every antenna (defaults to P_u / N_t).
  std::optional<double> per_antenna_threshold;
  ConstraintMode mode = ConstraintMode::Cognitive;
  DipaOptions dipa;
};

struct SipaTraceRow {
  int iteration = 0;
  std::vector<double> q_t;
  double q_u = 0.0;
  double rate = 0.0;  // weighted sum rate, nats
  double power = 0.0;
  std::vector<double> interference;
  double lambda = 0.0;
};

struct SolveReport {
  AuxiliaryPoint aux;
  MacCovarianceSet mac_cov;
  BcCovarianceSet bc_cov;
  std::vector<double> per_user_rates;
  double weighted_sum_rate = 0.0;
  double sum_power = 0.0;
  std::vector<double> interference;
  std::vector<double> thresholds;        // P_t actually enforced (per antenna in that mode)
  std::vector<bool> pu_inactive;         // multiplier declared zero
  bool power_inactive = false;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  ConstraintMode mode = ConstraintMode::Cognitive;
  std::vector<SipaTraceRow> trace;
};

/// The scenario the outer loop actually runs on for a given mode.
inline Scenario constrained_scenario(const Scenario& s, const SipaOptions& opt) {
  Scenario out = s;
  switch (opt.mode) {
    case ConstraintMode::Cognitive:
      break;
    case ConstraintMode::SumPowerOnly:
      out.pu_channels.clear();
      out.P_t.clear();
      out.l_ratio.clear();
      break;
    case ConstraintMode::PerAntenna: {
      const double thr = opt.per_antenna_threshold.value_or(s.P_u / double(s.N_t));
      if (!(thr > 0.0)) throw Error(ErrorKind::InvalidInput, "per-antenna threshold must be > 0");
      out.pu_channels.clear();
      for (int a = 0; a < s.N_t; ++a) out.pu_channels.push_back(ComplexVector::Unit(s.N_t, a));
      out.P_t.assign(std::size_t(s.N_t), thr);
      out.l_ratio.clear();
      break;
    }
  }
  return out;
}

/// [P_t - sum_i h^H Q_i h ..., P_u - sum_i tr Q_i].
inline std::vector<double> sipa_subgradient(const BcCovarianceSet& qb, const Scenario& s) {
  const HermitianMatrix total = qb.q.empty() ? HermitianMatrix::zero(s.N_t) : qb.total();
  std::vector<double> g;
  for (std::size_t j = 0; j < s.pu_channels.size(); ++j)
    g.push_back(s.P_t[j] - s.pu_channels[j].dot(total.matrix() * s.pu_channels[j]).real());
  g.push_back(s.P_u - total.trace());
  return g;
}

/// Value of the outer dual function at one auxiliary point together with the
/// BC solution that attains it.
struct DualPoint {
  double value = 0.0;     // weighted sum rate, nats
  double lambda = 0.0;    // inner water level
  DipaResult dipa;
  BcMapping mapping;
  std::vector<double> subgradient;
};

inline DualPoint evaluate_outer_dual(const Scenario& s, const UserOrdering& o, const AuxiliaryPoint& q,
                                     const DipaOptions& opt = {}, DipaWarmStart* warm = nullptr) {
  const NoiseShape noise = noise_shape(s, q.q_t, q.q_u);
  DualPoint d;
  d.dipa = dipa(s, o, noise, opt, warm);
  d.mapping = map_mac_to_bc(s, o, d.dipa.covariances, noise.r_w_ridged);
  d.value = d.dipa.objective;
  d.lambda = d.dipa.lambda_star;
  d.subgradient = sipa_subgradient(d.mapping.covariances, s);
  return d;
}

/// Outer subgradient loop over the auxiliary variables.
///
/// Each iteration solves the dual MAC for the current (q_t, q_u), maps the
/// result to the BC and moves every multiplier along its constraint violation.
/// Multipliers are clamped at `clamp`; one that stays clamped for
/// `inactive_after` consecutive iterations is reported as exactly zero.
/// Convergence needs both the slackness products within eps and primal
/// feasibility within `feasibility_tol`. Without convergence the best feasible
/// iterate (or the last one if none was feasible) is returned.
inline SolveReport sipa(const Scenario& input, const SipaOptions& opt = {}) {
  if (!(opt.step > 0.0)) throw Error(ErrorKind::InvalidInput, "sipa: step must be > 0");
  if (!(opt.eps > 0.0)) throw Error(ErrorKind::InvalidInput, "sipa: eps must be > 0");
  if (opt.max_outer < 1) throw Error(ErrorKind::InvalidInput, "sipa: max_outer must be >= 1");
  input.validate();
  const Scenario s = constrained_scenario(input, opt);
  const UserOrdering o = order_users(s.weights);
  const std::size_t N = s.pu_channels.size();

  AuxiliaryPoint q{std::vector<double>(N, opt.q_t_init), opt.q_u_init};
  std::vector<int> clamped_t(N, 0);
  int clamped_u = 0;
  DipaWarmStart warm;

  std::optional<SolveReport> best;
  bool best_feasible = false;
  std::vector<SipaTraceRow> trace;

  for (int n = 1; n <= opt.max_outer; ++n) {
    DualPoint d = evaluate_outer_dual(s, o, q, opt.dipa, opt.warm_start ? &warm : nullptr);
    const HermitianMatrix total = d.mapping.covariances.total();

    SolveReport r;
    r.mode = opt.mode;
    r.thresholds = s.P_t;
    r.iterations = n;
    r.sum_power = total.trace();
    for (std::size_t j = 0; j < N; ++j)
      r.interference.push_back(s.pu_channels[j].dot(total.matrix() * s.pu_channels[j]).real());
    r.per_user_rates = per_user_rates_bc(s, o, d.mapping.streams);
    r.weighted_sum_rate = 0.0;
    for (int i = 0; i < s.K; ++i) r.weighted_sum_rate += s.weights[std::size_t(i)] * r.per_user_rates[std::size_t(i)];
    r.lambda = d.lambda;

    r.aux = q;
    r.pu_inactive.resize(N);
    for (std::size_t j = 0; j < N; ++j) {
      r.pu_inactive[j] = clamped_t[j] >= opt.inactive_after;
      if (r.pu_inactive[j]) r.aux.q_t[j] = 0.0;
    }
    r.power_inactive = clamped_u >= opt.inactive_after;
    if (r.power_inactive) r.aux.q_u = 0.0;

    bool feasible = r.sum_power <= s.P_u * (1.0 + opt.feasibility_tol);
    bool slack_ok = std::abs(r.aux.q_u * (r.sum_power - s.P_u)) <= opt.eps;
    for (std::size_t j = 0; j < N; ++j) {
      feasible = feasible && r.interference[j] <= s.P_t[j] * (1.0 + opt.feasibility_tol);
      slack_ok = slack_ok && std::abs(r.aux.q_t[j] * (r.interference[j] - s.P_t[j])) <= opt.eps;
    }

    trace.push_back({n, q.q_t, q.q_u, r.weighted_sum_rate, r.sum_power, r.interference, r.lambda});
    r.mac_cov = std::move(d.dipa.covariances);
    r.bc_cov = std::move(d.mapping.covariances);
    const std::vector<double> violation = [&] {
      std::vector<double> v;
      for (std::size_t j = 0; j < N; ++j)
        v.push_back((r.interference[j] - s.P_t[j]) / (opt.relative_update ? s.P_t[j] : 1.0));
      v.push_back((r.sum_power - s.P_u) / (opt.relative_update ? s.P_u : 1.0));
      return v;
    }();

    if (feasible && slack_ok && opt.stop_at_convergence) {
      r.converged = true;
      r.trace = std::move(trace);
      return r;
    }
    if (!opt.stop_at_convergence && n == opt.max_outer) {
      r.converged = feasible && slack_ok;
      r.trace = std::move(trace);
      return r;
    }
    if (!best || (feasible && (!best_feasible || r.weighted_sum_rate > best->weighted_sum_rate)) ||
        (!feasible && !best_feasible)) {
      best = std::move(r);
      best_feasible = feasible;
    }

    const double t = opt.diminishing ? opt.step / std::sqrt(double(n)) : opt.step;
    for (std::size_t j = 0; j < N; ++j) {
      q.q_t[j] += t * violation[j];
      if (q.q_t[j] <= opt.clamp) {
        q.q_t[j] = opt.clamp;
        ++clamped_t[j];
      } else {
        clamped_t[j] = 0;
      }
    }
    q.q_u += t * violation[N];
    if (q.q_u <= opt.clamp) {
      q.q_u = opt.clamp;
      ++clamped_u;
    } else {
      clamped_u = 0;
    }
  }
  best->converged = false;
  best->trace = std::move(trace);
  return std::move(*best);
}

// ---------------------------------------------------------------------------
// Capacity-region sweep.

struct RegionPoint {
  std::vector<double> weights;
  std::vector<double> rates;  // nats per user
  double weighted_sum_rate = 0.0;
  bool converged = false;
  std::string failure;        // empty on success
};

/// Evenly spaced weight vectors: for K = 2 the segment (theta, 1 - theta) with
/// theta = k / (n - 1); for K > 2 all compositions of n - 1 into K parts.
/// Zero weights are raised to 1e-6 so every user stays in the problem.
inline std::vector<std::vector<double>> weight_grid(int K, int n) {
  if (K < 1 || n < 1) throw Error(ErrorKind::InvalidInput, "weight_grid: K and n must be >= 1");
  std::vector<std::vector<double>> grid;
  if (K == 1) {
    grid.assign(std::size_t(n), {1.0});
    return grid;
  }
  const int parts = std::max(1, n - 1);
  std::vector<int> c(std::size_t(K), 0);
  const auto emit = [&] {
    std::vector<double> w;
    for (int x : c) w.push_back(std::max(1e-6, double(x) / double(parts)));
    grid.push_back(std::move(w));
  };
  // Enumerate compositions of `parts` into K nonnegative parts, first coordinate descending.
  const auto recurse = [&](auto&& self, int index, int remaining) -> void {
    if (index == K - 1) {
      c[std::size_t(index)] = remaining;
      emit();
      return;
    }
    for (int x = remaining; x >= 0; --x) {
      c[std::size_t(index)] = x;
      self(self, index + 1, remaining - x);
    }
  };
  recurse(recurse, 0, parts);
  return grid;
}

/// Solves one weighted problem per grid entry. Points run concurrently on up
/// to `workers` threads; a failing point is recorded and the sweep continues.
inline std::vector<RegionPoint> region_sweep(const Scenario& s, const std::vector<std::vector<double>>& grid,
                                             const SipaOptions& opt = {}, int workers = 1) {
  std::vector<RegionPoint> out(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    RegionPoint& p = out[i];
    p.weights = grid[i];
    try {
      Scenario local = s;
      local.weights = grid[i];
      const SolveReport r = sipa(local, opt);
      p.rates = r.per_user_rates;
      p.weighted_sum_rate = r.weighted_sum_rate;
      p.converged = r.converged;
    } catch (const Error& e) {
      p.failure = e.what();
      p.rates.assign(std::size_t(s.K), 0.0);
    }
  });
  return out;
}

}  // namespace crmimo
