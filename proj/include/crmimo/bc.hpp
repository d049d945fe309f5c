#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "crmimo/hermitian.hpp"
#include "crmimo/mac.hpp"
#include "crmimo/scenario.hpp"

namespace crmimo {

inline constexpr double kStreamFloor = 1e-12;

/// One spatial data stream of user `user`.
/// v: MAC transmit direction (N_r), q: its MAC power,
/// u: BC beamformer (N_t, unit norm), p: its BC power.
struct Stream {
  int user = 0;
  ComplexVector v;
  double q = 0.0;
  ComplexVector u;
  double sinr = 0.0;
  double p = 0.0;
};

/// Streams per original user index, each list in encoding order.
using StreamSet = std::vector<std::vector<Stream>>;

struct BcCovarianceSet {
  std::vector<HermitianMatrix> q;  // N_t x N_t, indexed by original user

  HermitianMatrix total() const {
    HermitianMatrix s = HermitianMatrix::zero(q.empty() ? 0 : q.front().dim());
    for (const auto& m : q) s += m;
    return s;
  }
};

inline StreamSet decompose_streams(const MacCovarianceSet& q) {
  StreamSet out(q.q.size());
  for (std::size_t i = 0; i < q.q.size(); ++i) {
    const EigenDecomposition e = eig_hermitian(q.q[i]);
    for (Eigen::Index j = 0; j < e.eigenvalues.size(); ++j) {
      if (e.eigenvalues(j) < kStreamFloor) continue;
      Stream st;
      st.user = int(i);
      st.v = e.eigenvectors.col(j);
      st.q = e.eigenvalues(j);
      out[i].push_back(std::move(st));
    }
  }
  return out;
}

/// MMSE-SIC receivers of the dual MAC. For stream j of the user at position i
/// the interference-plus-noise covariance is R_w plus every stream of positions
/// < i plus the earlier streams of the same user; u = C^{-1} g / ||C^{-1} g||
/// with g = H_i^H v and SINR = q g^H C^{-1} g.
inline void mmse_beamformers(const Scenario& s, const UserOrdering& o, StreamSet& streams, const HermitianMatrix& r_w) {
  if (streams.size() != std::size_t(s.K)) throw Error(ErrorKind::DimensionMismatch, "one stream list per user");
  ComplexMatrix c = r_w.matrix();
  for (int user : o.pi) {
    const ComplexMatrix& h = s.channels[std::size_t(user)];
    for (Stream& st : streams[std::size_t(user)]) {
      const ComplexVector g = h.adjoint() * st.v;
      const ComplexVector x = cholesky_solve(cholesky(c), g);
      st.sinr = std::max(0.0, st.q * g.dot(x).real());
      const double n = x.norm();
      st.u = n > 0.0 ? ComplexVector(x / n) : ComplexVector(ComplexVector::Zero(s.N_t));
      c += st.q * (g * g.adjoint());
    }
  }
}

/// |u^H H_i^H v|^2: coupling of BC beam u into the receive direction v of user i.
inline double coupling(const ComplexMatrix& h, const ComplexVector& u, const ComplexVector& v) {
  return std::norm(u.dot(h.adjoint() * v));
}

/// BC powers that reproduce the MAC SINRs under DPC. The stream of user
/// position i is interfered by all streams of positions > i and by the later
/// streams of the same user, so powers are filled from the last position and
/// the last stream backwards.
inline void bc_power_recursion(const Scenario& s, const UserOrdering& o, StreamSet& streams) {
  for (int pos = o.size() - 1; pos >= 0; --pos) {
    const int user = o.pi[std::size_t(pos)];
    const ComplexMatrix& h = s.channels[std::size_t(user)];
    auto& own = streams[std::size_t(user)];
    for (int j = int(own.size()) - 1; j >= 0; --j) {
      Stream& st = own[std::size_t(j)];
      const double gain = std::abs(st.u.dot(h.adjoint() * st.v));
      if (gain <= kStreamFloor) throw Error(ErrorKind::DegenerateStream, "user " + std::to_string(user));
      double interference = s.sigma2;
      for (int later = pos + 1; later < o.size(); ++later)
        for (const Stream& other : streams[std::size_t(o.pi[std::size_t(later)])])
          interference += other.p * coupling(h, other.u, st.v);
      for (std::size_t l = std::size_t(j) + 1; l < own.size(); ++l) interference += own[l].p * coupling(h, own[l].u, st.v);
      st.p = st.sinr * interference / (gain * gain);
    }
  }
}

/// SINR of every stream on the BC side for the powers stored in `streams`.
inline std::vector<std::vector<double>> bc_sinrs(const Scenario& s, const UserOrdering& o, const StreamSet& streams) {
  std::vector<std::vector<double>> out(streams.size());
  for (int pos = 0; pos < o.size(); ++pos) {
    const int user = o.pi[std::size_t(pos)];
    const ComplexMatrix& h = s.channels[std::size_t(user)];
    const auto& own = streams[std::size_t(user)];
    for (std::size_t j = 0; j < own.size(); ++j) {
      double interference = s.sigma2;
      for (int later = pos + 1; later < o.size(); ++later)
        for (const Stream& other : streams[std::size_t(o.pi[std::size_t(later)])])
          interference += other.p * coupling(h, other.u, own[j].v);
      for (std::size_t l = j + 1; l < own.size(); ++l) interference += own[l].p * coupling(h, own[l].u, own[j].v);
      out[std::size_t(user)].push_back(own[j].p * coupling(h, own[j].u, own[j].v) / interference);
    }
  }
  return out;
}

inline BcCovarianceSet assemble_bc(const Scenario& s, const StreamSet& streams) {
  BcCovarianceSet out;
  for (const auto& own : streams) {
    ComplexMatrix m = ComplexMatrix::Zero(s.N_t, s.N_t);
    for (const Stream& st : own) m += st.p * (st.u * st.u.adjoint());
    out.q.emplace_back(m);
  }
  return out;
}

/// Left-hand side of the combined BC constraint:
/// sum_j q_t[j] sum_i h_j^H Q_i h_j + q_u sum_i tr(Q_i).
inline double bc_constraint_value(const BcCovarianceSet& qb, const std::vector<double>& q_t, double q_u,
                                  const std::vector<ComplexVector>& pu_channels) {
  if (q_t.size() != pu_channels.size()) throw Error(ErrorKind::DimensionMismatch, "one q_t per PU channel");
  if (qb.q.empty()) return 0.0;
  const HermitianMatrix total = qb.total();
  double value = q_u * total.trace();
  for (std::size_t j = 0; j < q_t.size(); ++j)
    value += q_t[j] * pu_channels[j].dot(total.matrix() * pu_channels[j]).real();
  return value;
}

/// Per-user BC rates (nats) from the stream SINRs.
inline std::vector<double> per_user_rates_bc(const Scenario& s, const UserOrdering& o, const StreamSet& streams) {
  const auto sinr = bc_sinrs(s, o, streams);
  std::vector<double> rates(std::size_t(s.K), 0.0);
  for (std::size_t i = 0; i < sinr.size(); ++i)
    for (double x : sinr[i]) rates[i] += std::log1p(x);
  return rates;
}

inline double weighted_sum_rate_bc(const Scenario& s, const UserOrdering& o, const StreamSet& streams) {
  const auto rates = per_user_rates_bc(s, o, streams);
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) total += s.weights[i] * rates[i];
  return total;
}

/// DPC rates from covariances: the user at position i sees the users at
/// positions > i as interference,
/// r = ln|sigma2 I + H (sum_{k>=i} Q_k) H^H| - ln|sigma2 I + H (sum_{k>i} Q_k) H^H|.
inline std::vector<double> per_user_rates_dpc(const Scenario& s, const UserOrdering& o, const BcCovarianceSet& qb) {
  std::vector<double> rates(std::size_t(s.K), 0.0);
  ComplexMatrix tail = ComplexMatrix::Zero(s.N_t, s.N_t);
  const ComplexMatrix noise = ComplexMatrix::Identity(s.N_r, s.N_r) * s.sigma2;
  for (int pos = o.size() - 1; pos >= 0; --pos) {
    const int user = o.pi[std::size_t(pos)];
    const ComplexMatrix& h = s.channels[std::size_t(user)];
    const double without = logdet_from_cholesky(cholesky(noise + h * tail * h.adjoint()));
    tail += qb.q[std::size_t(user)].matrix();
    const double with = logdet_from_cholesky(cholesky(noise + h * tail * h.adjoint()));
    rates[std::size_t(user)] = std::max(0.0, with - without);
  }
  return rates;
}

inline double weighted_sum_rate_dpc(const Scenario& s, const UserOrdering& o, const BcCovarianceSet& qb) {
  const auto rates = per_user_rates_dpc(s, o, qb);
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) total += s.weights[i] * rates[i];
  return total;
}

struct BcMapping {
  StreamSet streams;
  BcCovarianceSet covariances;
  int dropped = 0;  // streams removed as numerically dead
};

/// Full MAC-to-BC mapping: eigen-streams, MMSE receivers, BC power recursion
/// and covariance assembly.
inline BcMapping map_mac_to_bc(const Scenario& s, const UserOrdering& o, const MacCovarianceSet& qm,
                               const HermitianMatrix& r_w) {
  BcMapping m;
  m.streams = decompose_streams(qm);
  mmse_beamformers(s, o, m.streams, r_w);
  for (auto& own : m.streams) {
    const auto dead = [&](const Stream& st) {
      return std::abs(st.u.dot(s.channels[std::size_t(st.user)].adjoint() * st.v)) <= kStreamFloor;
    };
    const auto before = own.size();
    std::erase_if(own, dead);
    m.dropped += int(before - own.size());
  }
  bc_power_recursion(s, o, m.streams);
  m.covariances = assemble_bc(s, m.streams);
  return m;
}

}  // namespace crmimo
