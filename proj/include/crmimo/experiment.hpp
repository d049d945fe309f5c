#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "crmimo/bc.hpp"
#include "crmimo/mac.hpp"
#include "crmimo/parallel.hpp"
#include "crmimo/scenario.hpp"
#include "crmimo/sipa.hpp"

namespace crmimo::experiment {

inline constexpr const char* kSolverVersion = "1.0.0";
inline constexpr const char* kTraceSchema = "crmimo.trace.v1";

inline double to_bits(double nats) { return nats / std::numbers::ln2; }

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// In-memory RFC 4180 table: CRLF line endings, fields quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw Error(ErrorKind::InvalidInput, "csv row width differs from header");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  static std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }

  std::string str() const {
    std::string out;
    const auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += quote(r[i]);
      }
      out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create directory " + dir.string());
}

// ---------------------------------------------------------------------------
// Solve reports.

inline CsvTable trace_table(const SolveReport& r) {
  std::vector<std::string> header{"iteration", "objective_nats", "objective_bits", "sum_power_dB"};
  const std::size_t N = r.thresholds.size();
  for (std::size_t j = 0; j < N; ++j) header.push_back("interference_dB_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < N; ++j) header.push_back("q_t_" + std::to_string(j + 1));
  header.insert(header.end(), {"q_u", "lambda"});
  CsvTable t(header);
  for (const SipaTraceRow& row : r.trace) {
    std::vector<std::string> cells{std::to_string(row.iteration), fmt(row.rate), fmt(to_bits(row.rate)),
                                   fmt(linear_to_db(row.power))};
    for (double x : row.interference) cells.push_back(fmt(linear_to_db(x)));
    for (double x : row.q_t) cells.push_back(fmt(x));
    cells.push_back(fmt(row.q_u));
    cells.push_back(fmt(row.lambda));
    t.add(std::move(cells));
  }
  return t;
}

inline nlohmann::json matrix_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json options_json(const SipaOptions& o) {
  nlohmann::json j;
  j["mode"] = to_string(o.mode);
  j["step"] = o.step;
  j["eps"] = o.eps;
  j["diminishing"] = o.diminishing;
  j["max_outer"] = o.max_outer;
  j["feasibility_tol"] = o.feasibility_tol;
  j["inactive_after"] = o.inactive_after;
  j["clamp"] = o.clamp;
  j["q_t_init"] = o.q_t_init;
  j["q_u_init"] = o.q_u_init;
  j["warm_start"] = o.warm_start;
  j["relative_update"] = o.relative_update;
  j["stop_at_convergence"] = o.stop_at_convergence;
  if (o.per_antenna_threshold) j["per_antenna_threshold"] = *o.per_antenna_threshold;
  j["dipa"] = {{"eps", o.dipa.eps},
               {"eps_power_rel", o.dipa.eps_power_rel},
               {"max_bisections", o.dipa.max_bisections},
               {"inner_step", o.dipa.inner.step},
               {"inner_grad_tol", o.dipa.inner.grad_tol},
               {"inner_max_iterations", o.dipa.inner.max_iterations}};
  return j;
}

inline nlohmann::json report_json(const SolveReport& r, const Scenario& s, const SipaOptions& o) {
  nlohmann::json j;
  j["solver_version"] = kSolverVersion;
  j["csv_schema"] = kTraceSchema;
  j["config"] = options_json(o);
  j["scenario"] = scenario_to_json(s);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["q_t"] = r.aux.q_t;
  j["q_u"] = r.aux.q_u;
  j["pu_inactive"] = r.pu_inactive;
  j["power_inactive"] = r.power_inactive;
  j["lambda"] = r.lambda;
  j["weighted_sum_rate_nats"] = r.weighted_sum_rate;
  j["weighted_sum_rate_bits"] = to_bits(r.weighted_sum_rate);
  j["per_user_rates_nats"] = r.per_user_rates;
  std::vector<double> bits;
  for (double x : r.per_user_rates) bits.push_back(to_bits(x));
  j["per_user_rates_bits"] = bits;
  j["sum_power"] = r.sum_power;
  j["sum_power_dB"] = linear_to_db(r.sum_power);
  j["interference"] = r.interference;
  std::vector<double> db;
  for (double x : r.interference) db.push_back(linear_to_db(x));
  j["interference_dB"] = db;
  j["thresholds"] = r.thresholds;
  nlohmann::json mac = nlohmann::json::array(), bc = nlohmann::json::array();
  for (const auto& m : r.mac_cov.q) mac.push_back(matrix_json(m.matrix()));
  for (const auto& m : r.bc_cov.q) bc.push_back(matrix_json(m.matrix()));
  j["mac_covariances"] = mac;
  j["bc_covariances"] = bc;
  return j;
}

// ---------------------------------------------------------------------------
// Minimal SVG line chart.

struct Series {
  std::string name;
  std::vector<double> x, y;
};

inline std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                                  const std::vector<Series>& series) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
    << ")\" text-anchor=\"middle\">" << xml_escape(y_label) << "</text>\n";
  o << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(y0) << "</text>\n";
  o << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    o << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
      << colors[k % 6] << "\">" << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline std::string trace_svg(const SolveReport& r) {
  Series s{"weighted sum rate", {}, {}};
  for (const auto& row : r.trace) {
    s.x.push_back(row.iteration);
    s.y.push_back(to_bits(row.rate));
  }
  return svg_line_chart("SIPA trace", "iteration", "weighted sum rate (bits/s/Hz)", {s});
}

// ---------------------------------------------------------------------------
// Reproduction of the five simulation setups.

struct ExampleOutcome {
  int id = 0;
  bool pass = false;
  std::string summary;
  std::vector<std::pair<std::string, CsvTable>> tables;  // file name, contents
};

inline std::vector<std::uint64_t> seed_list(int n) {
  std::vector<std::uint64_t> seeds;
  for (int i = 1; i <= n; ++i) seeds.push_back(std::uint64_t(i));
  return seeds;
}

inline int default_seed_count(int example) {
  switch (example) {
    case 1: return 20;
    case 4:
    case 5: return 50;
    default: return 1;
  }
}

inline Scenario example1_scenario(std::uint64_t seed) {
  ScenarioParams p;
  p.K = 1, p.N_t = 4, p.N_r = 4, p.P_u = db_to_linear(10.0), p.seed = seed;
  return generate_scenario(p);
}

inline Scenario example2_scenario(std::uint64_t seed) {
  ScenarioParams p;
  p.K = 20, p.N_t = 4, p.N_r = 4, p.P_u = db_to_linear(10.0), p.seed = seed;
  return generate_scenario(p);
}

inline Scenario example3_scenario(std::uint64_t seed) {
  ScenarioParams p;
  p.K = 5, p.N_t = 5, p.N_r = 3, p.P_u = db_to_linear(13.0), p.seed = seed;
  p.weights = {5, 1, 1, 1, 1};
  p.l_ratio = {1.0, 1.0};
  p.P_t = {1.0, 1.0};
  return generate_scenario(p);
}

/// Examples 4 and 5: K = 5, N_t = 5, N_r = 3, equal weights, one PU at 0 dB.
inline Scenario single_pu_scenario(std::uint64_t seed, double p_u_db, double l_ratio) {
  ScenarioParams p;
  p.K = 5, p.N_t = 5, p.N_r = 3, p.P_u = db_to_linear(p_u_db), p.seed = seed;
  p.l_ratio = {l_ratio};
  p.P_t = {1.0};
  return generate_scenario(p);
}

/// Example 1: DIPA against closed-form water-filling for a single user.
inline ExampleOutcome example1(int seeds, int workers) {
  ExampleOutcome out;
  out.id = 1;
  const auto list = seed_list(seeds);
  struct Point {
    double dipa = 0.0, wf = 0.0;
    std::vector<DipaTraceRow> trace;
  };
  std::vector<Point> pts(list.size());
  parallel_for(list.size(), workers, [&](std::size_t i) {
    const Scenario s = example1_scenario(list[i]);
    const DipaResult r = dipa(s, order_users(s.weights), {}, 1.0);
    pts[i] = {r.objective, waterfill_single_user(s.channels[0], s.P_u, s.sigma2).rate, r.trace};
  });
  CsvTable per_seed({"seed", "dipa_rate_nats", "waterfill_rate_nats", "abs_diff_nats"});
  double worst = 0.0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double d = std::abs(pts[i].dipa - pts[i].wf);
    worst = std::max(worst, d);
    per_seed.add({std::to_string(list[i]), fmt(pts[i].dipa), fmt(pts[i].wf), fmt(d)});
  }
  CsvTable fig({"iteration", "dipa_rate_bits", "waterfill_rate_bits"});
  if (!pts.empty())
    for (const auto& row : pts[0].trace)
      fig.add({std::to_string(row.iteration), fmt(to_bits(row.objective)), fmt(to_bits(pts[0].wf))});
  out.pass = worst <= 1e-4;
  out.summary = "max |DIPA - water-filling| = " + fmt(worst) + " nats over " + std::to_string(seeds) + " seeds";
  out.tables.emplace_back("example1_seeds.csv", std::move(per_seed));
  out.tables.emplace_back("fig4.csv", std::move(fig));
  return out;
}

/// Example 2: DIPA convergence for K = 20 users, with the BC mapping checked.
inline ExampleOutcome example2(int seeds, int workers) {
  ExampleOutcome out;
  out.id = 2;
  const auto list = seed_list(seeds);
  struct Point {
    DipaResult r;
    double bc = 0.0;
  };
  std::vector<Point> pts(list.size());
  parallel_for(list.size(), workers, [&](std::size_t i) {
    const Scenario s = example2_scenario(list[i]);
    const UserOrdering o = order_users(s.weights);
    const NoiseShape n = noise_shape(s, {}, 1.0);
    Point p{dipa(s, o, n), 0.0};
    p.bc = weighted_sum_rate_bc(s, o, map_mac_to_bc(s, o, p.r.covariances, n.r_w_ridged).streams);
    pts[i] = std::move(p);
  });
  CsvTable fig({"seed", "iteration", "objective_bits", "sum_power_dB", "lambda"});
  bool ok = true;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (const auto& row : pts[i].r.trace)
      fig.add({std::to_string(list[i]), std::to_string(row.iteration), fmt(to_bits(row.objective)),
               fmt(linear_to_db(row.power)), fmt(row.lambda)});
    const double gap = std::abs(pts[i].r.objective - pts[i].bc) / std::max(1.0, pts[i].r.objective);
    worst_gap = std::max(worst_gap, gap);
    ok = ok && gap <= 1e-5 && std::abs(pts[i].r.power - pts[i].r.budget) <= 1e-4 * pts[i].r.budget;
  }
  out.pass = ok;
  out.summary = "budget met and max relative MAC/BC gap " + fmt(worst_gap);
  out.tables.emplace_back("fig5.csv", std::move(fig));
  return out;
}

/// Max minus min of the weighted sum rate over the last `window` trace rows.
inline double terminal_band(const SolveReport& r, std::size_t window) {
  const std::size_t n = r.trace.size();
  const std::size_t from = n > window ? n - window : 0;
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = from; i < n; ++i) lo = std::min(lo, r.trace[i].rate), hi = std::max(hi, r.trace[i].rate);
  return n ? hi - lo : 0.0;
}

inline constexpr int kExample3Length = 1500;
inline constexpr int kExample3Window = 300;

inline SipaOptions example3_options(double step) {
  SipaOptions o;
  o.step = step;
  o.max_outer = kExample3Length;
  o.stop_at_convergence = false;
  return o;
}

/// Example 3: SIPA traces for t = 0.1 and t = 0.01 on the two-PU geometry.
inline ExampleOutcome example3(int seeds, int workers) {
  ExampleOutcome out;
  out.id = 3;
  const auto list = seed_list(seeds);
  const std::vector<double> steps{0.1, 0.01};
  std::vector<SolveReport> runs(list.size() * steps.size());
  parallel_for(runs.size(), workers, [&](std::size_t k) {
    runs[k] = sipa(example3_scenario(list[k / steps.size()]), example3_options(steps[k % steps.size()]));
  });
  CsvTable rate({"seed", "step", "iteration", "weighted_rate_bits"});
  CsvTable power({"seed", "step", "iteration", "sum_power_dB", "interference_dB_1", "interference_dB_2"});
  CsvTable bands({"seed", "step", "terminal_band_nats", "final_sum_power_dB", "final_interference_dB_1",
                  "final_interference_dB_2", "converged"});
  bool tight = true;
  double band_coarse = 0.0, band_fine = 0.0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    const std::string seed = std::to_string(list[k / steps.size()]);
    const std::string step = fmt(steps[k % steps.size()]);
    for (const auto& row : r.trace) {
      rate.add({seed, step, std::to_string(row.iteration), fmt(to_bits(row.rate))});
      power.add({seed, step, std::to_string(row.iteration), fmt(linear_to_db(row.power)),
                 fmt(linear_to_db(row.interference[0])), fmt(linear_to_db(row.interference[1]))});
    }
    const double band = terminal_band(r, kExample3Window);
    (k % steps.size() == 0 ? band_coarse : band_fine) += band / double(list.size());
    bands.add({seed, step, fmt(band), fmt(linear_to_db(r.sum_power)), fmt(linear_to_db(r.interference[0])),
               fmt(linear_to_db(r.interference[1])), r.converged ? "1" : "0"});
    const double pu = db_to_linear(13.0);
    tight = tight && std::abs(r.sum_power - pu) <= 0.01 * pu;
    for (double x : r.interference) tight = tight && std::abs(x - 1.0) <= 0.01;
  }
  out.pass = tight && band_fine < band_coarse;
  out.summary = "constraints tight: " + std::string(tight ? "yes" : "no") + "; mean terminal band t=0.1: " +
                fmt(band_coarse) + " nats, t=0.01: " + fmt(band_fine) + " nats";
  out.tables.emplace_back("fig6.csv", std::move(rate));
  out.tables.emplace_back("fig7.csv", std::move(power));
  out.tables.emplace_back("example3_bands.csv", std::move(bands));
  return out;
}

/// Options for the power and distance sweeps: violations are taken relative
/// to their thresholds, so a single step size covers 0 dB through 20 dB.
inline SipaOptions sweep_options() {
  SipaOptions o;
  o.relative_update = true;
  return o;
}

/// Sum rate with and without the PU for one (seed, P_u, distance) point.
struct PuComparison {
  double with_pu = 0.0;
  double without_pu = 0.0;
  bool converged = true;
};

inline PuComparison compare_pu(const Scenario& s, const SipaOptions& base = sweep_options()) {
  SipaOptions cognitive = base, free = base;
  cognitive.mode = ConstraintMode::Cognitive;
  free.mode = ConstraintMode::SumPowerOnly;
  const SolveReport a = sipa(s, cognitive);
  const SolveReport b = sipa(s, free);
  return {a.weighted_sum_rate, b.weighted_sum_rate, a.converged && b.converged};
}

inline const std::vector<double>& example4_powers_db() {
  static const std::vector<double> v{0.0, 5.0, 10.0, 15.0, 20.0};
  return v;
}

inline const std::vector<double>& example5_ratios() {
  static const std::vector<double> v{1.0, 2.0, 4.0, 8.0, 12.0};
  return v;
}

/// Example 4: averaged sum rate against P_u with one PU and with none.
inline ExampleOutcome example4(int seeds, int workers) {
  ExampleOutcome out;
  out.id = 4;
  const auto list = seed_list(seeds);
  const auto& powers = example4_powers_db();
  std::vector<PuComparison> pts(list.size() * powers.size());
  parallel_for(pts.size(), workers, [&](std::size_t k) {
    pts[k] = compare_pu(single_pu_scenario(list[k % list.size()], powers[k / list.size()], 1.0));
  });
  CsvTable fig({"P_u_dB", "rate_single_pu_bits", "rate_no_pu_bits", "seeds", "all_converged"});
  CsvTable raw({"P_u_dB", "seed", "rate_single_pu_nats", "rate_no_pu_nats", "converged"});
  bool ok = true;
  for (std::size_t p = 0; p < powers.size(); ++p) {
    double a = 0.0, b = 0.0;
    bool conv = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& c = pts[p * list.size() + i];
      a += c.with_pu / double(list.size());
      b += c.without_pu / double(list.size());
      conv = conv && c.converged;
      raw.add({fmt(powers[p]), std::to_string(list[i]), fmt(c.with_pu), fmt(c.without_pu), c.converged ? "1" : "0"});
    }
    ok = ok && b >= a;
    fig.add({fmt(powers[p]), fmt(to_bits(a)), fmt(to_bits(b)), std::to_string(list.size()), conv ? "1" : "0"});
  }
  out.pass = ok;
  out.summary = std::string("no-PU rate ") + (ok ? ">=" : "NOT >=") + " single-PU rate at every P_u";
  out.tables.emplace_back("fig8.csv", std::move(fig));
  out.tables.emplace_back("example4_points.csv", std::move(raw));
  return out;
}

/// Averaged sum rate against l_2/l_1 for one P_u, with the no-PU reference.
struct DistanceCurve {
  double p_u_db = 0.0;
  std::vector<double> with_pu;  // one per ratio, nats
  double without_pu = 0.0;
  bool converged = true;
};

inline std::vector<DistanceCurve> distance_curves(const std::vector<double>& powers_db,
                                                  const std::vector<double>& ratios, int seeds, int workers) {
  const auto list = seed_list(seeds);
  const std::size_t per_power = (ratios.size() + 1) * list.size();
  std::vector<double> values(powers_db.size() * per_power, 0.0);
  std::vector<char> conv(values.size(), 1);
  parallel_for(values.size(), workers, [&](std::size_t k) {
    const std::size_t p = k / per_power, rest = k % per_power;
    const std::size_t r = rest / list.size(), i = rest % list.size();
    SipaOptions o = sweep_options();
    if (r == ratios.size()) o.mode = ConstraintMode::SumPowerOnly;
    const Scenario s = single_pu_scenario(list[i], powers_db[p], r < ratios.size() ? ratios[r] : 1.0);
    const SolveReport rep = sipa(s, o);
    values[k] = rep.weighted_sum_rate;
    conv[k] = rep.converged;
  });
  std::vector<DistanceCurve> curves;
  for (std::size_t p = 0; p < powers_db.size(); ++p) {
    DistanceCurve c;
    c.p_u_db = powers_db[p];
    for (std::size_t r = 0; r <= ratios.size(); ++r) {
      double mean = 0.0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::size_t k = p * per_power + r * list.size() + i;
        mean += values[k] / double(list.size());
        c.converged = c.converged && conv[k];
      }
      if (r < ratios.size()) c.with_pu.push_back(mean);
      else c.without_pu = mean;
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

/// Nondecreasing up to a one-sided slack of `tol` times the curve's range.
inline bool nondecreasing_within(const std::vector<double>& v, double tol) {
  if (v.empty()) return true;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double slack = tol * (*hi - *lo);
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1] - slack) return false;
  return true;
}

inline bool saturated(const DistanceCurve& c) {
  return !c.with_pu.empty() && c.with_pu.back() >= (1.0 - 0.005) * c.without_pu;
}

/// Example 5: averaged sum rate against l_2/l_1 at P_u = 15 and 20 dB.
inline ExampleOutcome example5(int seeds, int workers, std::vector<double> powers_db = {15.0, 20.0}) {
  ExampleOutcome out;
  out.id = 5;
  const auto& ratios = example5_ratios();
  const auto curves = distance_curves(powers_db, ratios, seeds, workers);
  CsvTable fig({"P_u_dB", "l_ratio", "rate_single_pu_bits", "rate_no_pu_bits", "saturated"});
  bool ok = true;
  std::string notes;
  for (const auto& c : curves) {
    const bool mono = nondecreasing_within(c.with_pu, 0.02);
    const bool sat = saturated(c);
    for (std::size_t r = 0; r < ratios.size(); ++r) {
      const bool row_sat = c.with_pu[r] >= (1.0 - 0.005) * c.without_pu;
      fig.add({fmt(c.p_u_db), fmt(ratios[r]), fmt(to_bits(c.with_pu[r])), fmt(to_bits(c.without_pu)),
               row_sat ? "1" : "0"});
    }
    ok = ok && mono;
    if (c.p_u_db == 15.0) ok = ok && sat;
    notes += "P_u=" + fmt(c.p_u_db) + " dB: monotone " + (mono ? "yes" : "no") + ", saturated " + (sat ? "yes" : "no") +
             "; ";
  }
  out.pass = ok;
  out.summary = notes;
  out.tables.emplace_back("fig9.csv", std::move(fig));
  return out;
}

inline ExampleOutcome run_example(int id, int seeds, int workers) {
  if (seeds < 1) throw Error(ErrorKind::InvalidInput, "seeds must be >= 1");
  switch (id) {
    case 1: return example1(seeds, workers);
    case 2: return example2(seeds, workers);
    case 3: return example3(seeds, workers);
    case 4: return example4(seeds, workers);
    case 5: return example5(seeds, workers);
    default: throw Error(ErrorKind::InvalidInput, "example must be 1..5");
  }
}

}  // namespace crmimo::experiment
