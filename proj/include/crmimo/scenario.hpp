#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "crmimo/errors.hpp"
#include "crmimo/hermitian.hpp"
#include "crmimo/rng.hpp"

namespace crmimo {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// One optimization instance. Powers are linear, relative to unit noise.
struct Scenario {
  int K = 1;
  int N_t = 1;
  int N_r = 1;
  std::vector<ComplexMatrix> channels;     // K matrices, N_r x N_t
  std::vector<ComplexVector> pu_channels;  // N vectors, N_t
  std::vector<double> weights;             // K, all > 0
  double P_u = 1.0;
  std::vector<double> P_t;                 // N thresholds
  double sigma2 = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> l_ratio;             // generation metadata, one per PU

  int num_pu() const { return static_cast<int>(pu_channels.size()); }

  /// Throws InvalidInput / DimensionMismatch on violated invariants.
  void validate() const {
    if (K < 1 || N_t < 1 || N_r < 1) throw Error(ErrorKind::InvalidInput, "K, N_t, N_r must be >= 1");
    if (channels.size() != std::size_t(K)) throw Error(ErrorKind::DimensionMismatch, "expected K channel matrices");
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (channels[i].rows() != N_r || channels[i].cols() != N_t)
        throw Error(ErrorKind::DimensionMismatch, "channels.H[" + std::to_string(i) + "] must be N_r x N_t");
    }
    if (weights.size() != std::size_t(K)) throw Error(ErrorKind::DimensionMismatch, "expected K weights");
    for (double w : weights)
      if (!(w > 0.0)) throw Error(ErrorKind::InvalidInput, "weights must be > 0");
    if (!(P_u > 0.0)) throw Error(ErrorKind::InvalidInput, "P_u must be > 0");
    if (!(sigma2 > 0.0)) throw Error(ErrorKind::InvalidInput, "sigma2 must be > 0");
    if (P_t.size() != pu_channels.size()) throw Error(ErrorKind::DimensionMismatch, "one P_t per PU channel");
    for (std::size_t j = 0; j < pu_channels.size(); ++j) {
      if (pu_channels[j].size() != N_t)
        throw Error(ErrorKind::DimensionMismatch, "channels.h_o[" + std::to_string(j) + "] must have N_t entries");
      if (!(P_t[j] > 0.0)) throw Error(ErrorKind::InvalidInput, "P_t must be > 0");
    }
  }

  bool operator==(const Scenario&) const = default;
};

struct ScenarioParams {
  int K = 1;
  int N_t = 1;
  int N_r = 1;
  std::vector<double> l_ratio;  // one entry per PU; empty means no PU
  std::vector<double> P_t;      // linear, one per PU (defaults to 1.0 = 0 dB)
  std::vector<double> weights;  // defaults to all ones
  double P_u = 1.0;
  double sigma2 = 1.0;
  std::uint64_t seed = 0;
};

/// Channel draws: H_1..H_K row-major, then a_1..a_N, each entry CSCG(0,1) from
/// the counter stream of `seed`. PU channel j is (1 / l_ratio_j)^2 a_j, i.e.
/// path-loss exponent 4 with the SU distance l_1 as the reference.
inline Scenario generate_scenario(const ScenarioParams& p) {
  if (p.K < 1 || p.N_t < 1 || p.N_r < 1) throw Error(ErrorKind::InvalidInput, "dimensions must be positive");
  for (double l : p.l_ratio)
    if (!(l >= 1.0)) throw Error(ErrorKind::InvalidInput, "l_ratio must be >= 1");

  Scenario s;
  s.K = p.K;
  s.N_t = p.N_t;
  s.N_r = p.N_r;
  s.P_u = p.P_u;
  s.sigma2 = p.sigma2;
  s.seed = p.seed;
  s.l_ratio = p.l_ratio;
  s.weights = p.weights.empty() ? std::vector<double>(std::size_t(p.K), 1.0) : p.weights;
  s.P_t = p.P_t.empty() ? std::vector<double>(p.l_ratio.size(), 1.0) : p.P_t;

  CounterRng rng(p.seed);
  for (int k = 0; k < p.K; ++k) {
    ComplexMatrix h(p.N_r, p.N_t);
    for (int r = 0; r < p.N_r; ++r)
      for (int c = 0; c < p.N_t; ++c) h(r, c) = rng.next_cscg();
    s.channels.push_back(std::move(h));
  }
  for (double l : p.l_ratio) {
    const double scale = std::pow(1.0 / l, 2);
    ComplexVector a(p.N_t);
    for (int c = 0; c < p.N_t; ++c) a(c) = rng.next_cscg();
    s.pu_channels.push_back(scale * a);
  }
  s.validate();
  return s;
}

/// Decoding order with nonincreasing weights; `pi[i]` is the 0-based user at
/// position i and `deltas[i] = w[pi[i]] - w[pi[i+1]]` (zero past the end).
struct UserOrdering {
  std::vector<int> pi;
  std::vector<double> deltas;

  int size() const { return static_cast<int>(pi.size()); }
  /// Position of a user in the order.
  int position_of(int user) const {
    for (std::size_t i = 0; i < pi.size(); ++i)
      if (pi[i] == user) return static_cast<int>(i);
    throw Error(ErrorKind::InvalidInput, "user not in ordering");
  }
};

inline UserOrdering order_users(const std::vector<double>& weights) {
  UserOrdering o;
  o.pi.resize(weights.size());
  std::iota(o.pi.begin(), o.pi.end(), 0);
  std::stable_sort(o.pi.begin(), o.pi.end(), [&](int a, int b) { return weights[std::size_t(a)] > weights[std::size_t(b)]; });
  o.deltas.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double next = i + 1 < weights.size() ? weights[std::size_t(o.pi[i + 1])] : 0.0;
    o.deltas[i] = weights[std::size_t(o.pi[i])] - next;
  }
  return o;
}

// ---------------------------------------------------------------------------
// JSON scenario files

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::SchemaError, path);
  return *it;
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw Error(ErrorKind::SchemaError, path);
  return j.get<double>();
}

inline Complex complex_at(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::SchemaError, path);
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

// Accepts either the linear key or its "<key>_dB" form; linear wins if both.
inline double power_field(const json& j, const std::string& key, const std::string& path) {
  if (auto it = j.find(key); it != j.end()) return number_at(*it, path);
  if (auto it = j.find(key + "_dB"); it != j.end()) return db_to_linear(number_at(*it, path + "_dB"));
  throw Error(ErrorKind::SchemaError, path);
}

inline int count_field(const json& j, const std::string& key) {
  const json& v = require(j, key, key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw Error(ErrorKind::SchemaError, key);
  return v.get<int>();
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using detail::json;
  json j;
  j["K"] = s.K;
  j["N_t"] = s.N_t;
  j["N_r"] = s.N_r;
  j["weights"] = s.weights;
  j["P_u"] = s.P_u;
  j["P_u_dB"] = linear_to_db(s.P_u);
  json pu = json::array();
  for (std::size_t i = 0; i < s.P_t.size(); ++i) {
    json e;
    e["P_t"] = s.P_t[i];
    e["P_t_dB"] = linear_to_db(s.P_t[i]);
    if (i < s.l_ratio.size()) e["l_ratio"] = s.l_ratio[i];
    pu.push_back(e);
  }
  j["pu"] = pu;
  j["sigma2"] = s.sigma2;
  j["seed"] = s.seed;
  json hs = json::array();
  for (const auto& h : s.channels) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < h.cols(); ++c) row.push_back(detail::complex_json(h(r, c)));
      rows.push_back(row);
    }
    hs.push_back(rows);
  }
  json hos = json::array();
  for (const auto& h : s.pu_channels) {
    json v = json::array();
    for (Eigen::Index c = 0; c < h.size(); ++c) v.push_back(detail::complex_json(h(c)));
    hos.push_back(v);
  }
  j["channels"] = {{"H", hs}, {"h_o", hos}};
  return j;
}

/// Parses a scenario object. Without "channels" the channels are generated
/// from (K, N_t, N_r, pu[].l_ratio, seed); with it the explicit entries win.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  using detail::json;
  if (!j.is_object()) throw Error(ErrorKind::SchemaError, "<root>");
  ScenarioParams p;
  p.K = detail::count_field(j, "K");
  p.N_t = detail::count_field(j, "N_t");
  p.N_r = detail::count_field(j, "N_r");
  p.P_u = detail::power_field(j, "P_u", "P_u");
  if (auto it = j.find("weights"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorKind::SchemaError, "weights");
    for (std::size_t i = 0; i < it->size(); ++i)
      p.weights.push_back(detail::number_at((*it)[i], "weights[" + std::to_string(i) + "]"));
    if (p.weights.size() != std::size_t(p.K)) throw Error(ErrorKind::DimensionMismatch, "weights: expected K entries");
  }
  if (auto it = j.find("pu"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorKind::SchemaError, "pu");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "pu[" + std::to_string(i) + "]";
      const json& e = (*it)[i];
      if (!e.is_object()) throw Error(ErrorKind::SchemaError, path);
      p.P_t.push_back(detail::power_field(e, "P_t", path + ".P_t"));
      p.l_ratio.push_back(e.contains("l_ratio") ? detail::number_at(e["l_ratio"], path + ".l_ratio") : 1.0);
    }
  }
  if (auto it = j.find("sigma2"); it != j.end()) p.sigma2 = detail::number_at(*it, "sigma2");
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
      throw Error(ErrorKind::SchemaError, "seed");
    p.seed = it->get<std::uint64_t>();
  }

  auto ch = j.find("channels");
  if (ch == j.end()) return generate_scenario(p);

  Scenario s;
  s.K = p.K;
  s.N_t = p.N_t;
  s.N_r = p.N_r;
  s.P_u = p.P_u;
  s.P_t = p.P_t;
  s.l_ratio = p.l_ratio;
  s.sigma2 = p.sigma2;
  s.seed = p.seed;
  s.weights = p.weights.empty() ? std::vector<double>(std::size_t(p.K), 1.0) : p.weights;
  const json& hs = detail::require(*ch, "H", "channels.H");
  if (!hs.is_array()) throw Error(ErrorKind::SchemaError, "channels.H");
  if (hs.size() != std::size_t(p.K)) throw Error(ErrorKind::DimensionMismatch, "channels.H: expected K matrices");
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const std::string path = "channels.H[" + std::to_string(k) + "]";
    const json& rows = hs[k];
    if (!rows.is_array() || rows.size() != std::size_t(p.N_r)) throw Error(ErrorKind::DimensionMismatch, path + ": expected N_r rows");
    ComplexMatrix h(p.N_r, p.N_t);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].is_array() || rows[r].size() != std::size_t(p.N_t))
        throw Error(ErrorKind::DimensionMismatch, path + "[" + std::to_string(r) + "]: expected N_t entries");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        h(Eigen::Index(r), Eigen::Index(c)) =
            detail::complex_at(rows[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    s.channels.push_back(std::move(h));
  }
  const json empty = json::array();
  const json& hos = ch->contains("h_o") ? (*ch)["h_o"] : empty;
  if (!hos.is_array()) throw Error(ErrorKind::SchemaError, "channels.h_o");
  if (hos.size() != p.P_t.size()) throw Error(ErrorKind::DimensionMismatch, "channels.h_o: expected one vector per pu entry");
  for (std::size_t k = 0; k < hos.size(); ++k) {
    const std::string path = "channels.h_o[" + std::to_string(k) + "]";
    if (!hos[k].is_array() || hos[k].size() != std::size_t(p.N_t)) throw Error(ErrorKind::DimensionMismatch, path + ": expected N_t entries");
    ComplexVector v(p.N_t);
    for (std::size_t c = 0; c < hos[k].size(); ++c)
      v(Eigen::Index(c)) = detail::complex_at(hos[k][c], path + "[" + std::to_string(c) + "]");
    s.pu_channels.push_back(std::move(v));
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scenario file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("<parse> ") + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write scenario file " + path);
  out << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace crmimo
