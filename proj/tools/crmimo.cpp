#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crmimo/crmimo.hpp"

namespace fs = std::filesystem;
using namespace crmimo;
namespace ex = crmimo::experiment;

namespace {

struct SolveArgs {
  std::string scenario;
  std::string out;
  double step = 0.1;
  double eps = 1e-3;
  bool diminishing = false;
  int max_outer = 5000;
  std::string mode = "cognitive";
  double threshold = 0.0;
  bool svg = false;
  bool relative = false;
};

ConstraintMode parse_mode(const std::string& m) {
  if (m == "cognitive") return ConstraintMode::Cognitive;
  if (m == "per-antenna") return ConstraintMode::PerAntenna;
  if (m == "sum-power") return ConstraintMode::SumPowerOnly;
  throw Error(ErrorKind::InvalidInput, "unknown mode " + m);
}

SipaOptions solve_options(const SolveArgs& a) {
  SipaOptions o;
  o.step = a.step;
  o.eps = a.eps;
  o.diminishing = a.diminishing;
  o.max_outer = a.max_outer;
  o.mode = parse_mode(a.mode);
  o.relative_update = a.relative;
  if (a.threshold > 0.0) o.per_antenna_threshold = a.threshold;
  return o;
}

int cmd_solve(const SolveArgs& a) {
  const Scenario s = load_scenario(a.scenario);
  const SipaOptions o = solve_options(a);
  const SolveReport r = sipa(s, o);
  ex::ensure_directory(a.out);
  ex::write_text(fs::path(a.out) / "report.json", ex::report_json(r, s, o).dump(2) + "\n");
  ex::write_text(fs::path(a.out) / "trace.csv", ex::trace_table(r).str());
  if (a.svg) ex::write_text(fs::path(a.out) / "trace.svg", ex::trace_svg(r));
  std::printf("weighted sum rate %.6f bits/s/Hz (%.6f nats), sum power %.4f dB, %d iterations, %s\n",
              ex::to_bits(r.weighted_sum_rate), r.weighted_sum_rate, linear_to_db(r.sum_power), r.iterations,
              r.converged ? "converged" : "NOT converged");
  return r.converged ? 0 : 2;
}

void write_tables(const fs::path& dir, const std::vector<std::pair<std::string, ex::CsvTable>>& tables) {
  ex::ensure_directory(dir);
  for (const auto& [name, table] : tables) ex::write_text(dir / name, table.str());
}

int cmd_repro(int example, int seeds, const std::string& out, bool svg) {
  if (seeds <= 0) seeds = ex::default_seed_count(example);
  const ex::ExampleOutcome r = ex::run_example(example, seeds, worker_count());
  write_tables(out, r.tables);
  if (svg) {
    for (const auto& [name, table] : r.tables) {
      // Plot every numeric column after the first against the first.
      std::vector<ex::Series> series;
      for (std::size_t c = 1; c < table.header().size(); ++c) {
        ex::Series s{table.header()[c], {}, {}};
        for (const auto& row : table.rows()) {
          s.x.push_back(std::stod(row[0]));
          s.y.push_back(std::stod(row[c]));
        }
        series.push_back(std::move(s));
      }
      const fs::path p = fs::path(out) / (fs::path(name).stem().string() + ".svg");
      ex::write_text(p, ex::svg_line_chart(name, table.header()[0], "value", series));
    }
  }
  std::printf("example %d: %s  [%s]\n", example, r.pass ? "PASS" : "FAIL", r.summary.c_str());
  return r.pass ? 0 : 2;
}

int cmd_region(const std::string& scenario, int grid, const std::string& out) {
  const Scenario s = load_scenario(scenario);
  const auto weights = weight_grid(s.K, grid);
  const auto points = region_sweep(s, weights, {}, worker_count());
  std::vector<std::string> header;
  for (int i = 0; i < s.K; ++i) header.push_back("w_" + std::to_string(i + 1));
  for (int i = 0; i < s.K; ++i) header.push_back("rate_bits_" + std::to_string(i + 1));
  header.insert(header.end(), {"weighted_sum_rate_bits", "converged", "failures"});
  ex::CsvTable t(header);
  int failed = 0;
  for (const auto& p : points) {
    std::vector<std::string> row;
    for (double w : p.weights) row.push_back(ex::fmt(w));
    for (double r : p.rates) row.push_back(ex::fmt(ex::to_bits(r)));
    row.push_back(ex::fmt(ex::to_bits(p.weighted_sum_rate)));
    row.push_back(p.converged ? "1" : "0");
    row.push_back(p.failure);
    failed += p.failure.empty() ? 0 : 1;
    t.add(std::move(row));
  }
  ex::ensure_directory(out);
  ex::write_text(fs::path(out) / "region.csv", t.str());
  std::printf("%zu weight vectors, %d failed\n", points.size(), failed);
  return 0;
}

int cmd_sweep_power(const std::string& scenario, double from, double to, double by, const std::string& out) {
  if (!(by > 0.0) || to < from) throw Error(ErrorKind::InvalidInput, "need from <= to and step > 0");
  const Scenario s = load_scenario(scenario);
  std::vector<double> grid;
  for (double x = from; x <= to + 1e-9; x += by) grid.push_back(x);
  std::vector<ex::PuComparison> pts(grid.size());
  parallel_for(grid.size(), worker_count(), [&](std::size_t i) {
    Scenario local = s;
    local.P_u = db_to_linear(grid[i]);
    pts[i] = ex::compare_pu(local);
  });
  ex::CsvTable t({"P_u_dB", "rate_with_pu_bits", "rate_no_pu_bits", "converged"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.add({ex::fmt(grid[i]), ex::fmt(ex::to_bits(pts[i].with_pu)), ex::fmt(ex::to_bits(pts[i].without_pu)),
           pts[i].converged ? "1" : "0"});
  ex::ensure_directory(out);
  ex::write_text(fs::path(out) / "sweep_power.csv", t.str());
  std::printf("%zu power points written\n", grid.size());
  return 0;
}

/// Moves every PU to distance ratio `l` by rescaling its channel: the stored
/// vector is (1 / l_old)^2 a, so multiplying by (l_old / l)^2 gives (1 / l)^2 a.
Scenario at_distance(const Scenario& s, double l) {
  Scenario out = s;
  for (std::size_t j = 0; j < out.pu_channels.size(); ++j) {
    const double old = j < s.l_ratio.size() ? s.l_ratio[j] : 1.0;
    out.pu_channels[j] *= (old / l) * (old / l);
  }
  out.l_ratio.assign(out.pu_channels.size(), l);
  return out;
}

int cmd_sweep_distance(const std::string& scenario, const std::vector<double>& ratios, const std::string& out) {
  const Scenario s = load_scenario(scenario);
  for (double l : ratios)
    if (!(l > 0.0)) throw Error(ErrorKind::InvalidInput, "distance ratios must be > 0");
  std::vector<double> rates(ratios.size() + 1);
  std::vector<char> conv(rates.size(), 1);
  parallel_for(rates.size(), worker_count(), [&](std::size_t i) {
    SipaOptions o = ex::sweep_options();
    if (i == ratios.size()) o.mode = ConstraintMode::SumPowerOnly;
    const SolveReport r = sipa(i < ratios.size() ? at_distance(s, ratios[i]) : s, o);
    rates[i] = r.weighted_sum_rate;
    conv[i] = r.converged;
  });
  ex::CsvTable t({"l_ratio", "rate_with_pu_bits", "rate_no_pu_bits", "converged"});
  for (std::size_t i = 0; i < ratios.size(); ++i)
    t.add({ex::fmt(ratios[i]), ex::fmt(ex::to_bits(rates[i])), ex::fmt(ex::to_bits(rates.back())),
           conv[i] && conv.back() ? "1" : "0"});
  ex::ensure_directory(out);
  ex::write_text(fs::path(out) / "sweep_distance.csv", t.str());
  std::printf("%zu distance points written\n", ratios.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted sum-rate optimization for cognitive-radio MIMO broadcast channels"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run SIPA on a scenario file");
  s->add_option("--scenario", solve.scenario, "Scenario JSON")->required();
  s->add_option("--out", solve.out, "Output directory")->required();
  s->add_option("--step", solve.step, "Outer step size t");
  s->add_option("--eps", solve.eps, "Complementary-slackness tolerance");
  s->add_flag("--diminishing", solve.diminishing, "Use t / sqrt(n) steps");
  s->add_option("--max-outer", solve.max_outer, "Outer iteration cap");
  s->add_option("--mode", solve.mode, "cognitive | per-antenna | sum-power");
  s->add_option("--threshold", solve.threshold, "Per-antenna power threshold (linear)");
  s->add_flag("--relative", solve.relative, "Step on violations relative to their thresholds");
  s->add_flag("--svg", solve.svg, "Also write trace.svg");

  int example = 0, seeds = 0;
  std::string repro_out;
  bool repro_svg = false;
  auto* r = app.add_subcommand("repro", "Reproduce one of the five simulation examples");
  r->add_option("--example", example, "Example number")->required()->check(CLI::Range(1, 5));
  r->add_option("--out", repro_out, "Output directory")->required();
  r->add_option("--seeds", seeds, "Number of channel realizations (seeds 1..n)");
  r->add_flag("--svg", repro_svg, "Also write one SVG chart per CSV");

  std::string region_scenario, region_out;
  int grid = 9;
  auto* g = app.add_subcommand("region", "Sweep user weights to trace the rate region");
  g->add_option("--scenario", region_scenario, "Scenario JSON")->required();
  g->add_option("--grid", grid, "Points per weight axis")->check(CLI::PositiveNumber);
  g->add_option("--out", region_out, "Output directory")->required();

  std::string sp_scenario, sp_out;
  double sp_from = 0.0, sp_to = 20.0, sp_by = 5.0;
  auto* p = app.add_subcommand("sweep-power", "Sum rate against P_u with and without the PUs");
  p->add_option("--scenario", sp_scenario, "Scenario JSON")->required();
  p->add_option("--from", sp_from, "First P_u in dB");
  p->add_option("--to", sp_to, "Last P_u in dB");
  p->add_option("--by", sp_by, "P_u increment in dB");
  p->add_option("--out", sp_out, "Output directory")->required();

  std::string sd_scenario, sd_out;
  std::vector<double> ratios{1, 2, 4, 8, 12};
  auto* d = app.add_subcommand("sweep-distance", "Sum rate against the PU distance ratio");
  d->add_option("--scenario", sd_scenario, "Scenario JSON")->required();
  d->add_option("--ratios", ratios, "Distance ratios l2/l1")->delimiter(',');
  d->add_option("--out", sd_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_solve(solve);
    if (*r) return cmd_repro(example, seeds, repro_out, repro_svg);
    if (*g) return cmd_region(region_scenario, grid, region_out);
    if (*p) return cmd_sweep_power(sp_scenario, sp_from, sp_to, sp_by, sp_out);
    if (*d) return cmd_sweep_distance(sd_scenario, ratios, sd_out);
  } catch (const Error& e) {
    std::cerr << "crmimo: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "crmimo: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
