#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace crmimo;
namespace ex = crmimo::experiment;

TEST(Csv, QuotingAndLineEndings) {
  ex::CsvTable t({"name", "value"});
  t.add({"plain", "1"});
  t.add({"with,comma", "say \"hi\""});
  EXPECT_EQ(t.str(), "name,value\r\nplain,1\r\n\"with,comma\",\"say \"\"hi\"\"\"\r\n");
  EXPECT_THROW(t.add({"short"}), Error);
}

TEST(Csv, NumbersRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 43.083498670012345})
    EXPECT_EQ(std::stod(ex::fmt(x)), x);
  EXPECT_DOUBLE_EQ(ex::to_bits(std::log(2.0)), 1.0);
}

TEST(Report, UnitsAreLabelled) {
  const Scenario s = experiment::example3_scenario(1);
  const SipaOptions o;
  const SolveReport r = sipa(s, o);
  const nlohmann::json j = ex::report_json(r, s, o);
  EXPECT_EQ(j["csv_schema"], ex::kTraceSchema);
  EXPECT_DOUBLE_EQ(j["weighted_sum_rate_bits"].get<double>(), r.weighted_sum_rate / std::log(2.0));
  EXPECT_NEAR(j["sum_power_dB"].get<double>(), 10.0 * std::log10(r.sum_power), 1e-12);
  EXPECT_EQ(j["mac_covariances"].size(), 5u);
  EXPECT_EQ(j["bc_covariances"][0].size(), 5u);
  EXPECT_EQ(scenario_from_json(j["scenario"]), s);

  const ex::CsvTable t = ex::trace_table(r);
  EXPECT_EQ(t.header(), (std::vector<std::string>{"iteration", "objective_nats", "objective_bits", "sum_power_dB",
                                                  "interference_dB_1", "interference_dB_2", "q_t_1", "q_t_2", "q_u",
                                                  "lambda"}));
  EXPECT_EQ(t.rows().size(), r.trace.size());
  EXPECT_NEAR(std::stod(t.rows().back()[3]), 10.0 * std::log10(r.trace.back().power), 1e-12);
}

TEST(Harness, SeedsAndBands) {
  EXPECT_EQ(ex::seed_list(3), (std::vector<std::uint64_t>{1, 2, 3}));
  SolveReport r;
  for (int i = 0; i < 10; ++i) r.trace.push_back({i + 1, {}, 0.0, i < 5 ? 100.0 : 1.0 + 0.1 * (i % 2), 0.0, {}, 0.0});
  EXPECT_NEAR(ex::terminal_band(r, 5), 0.1, 1e-15);
  EXPECT_NEAR(ex::terminal_band(r, 50), 99.0, 1e-12);
  EXPECT_TRUE(ex::nondecreasing_within({1.0, 2.0, 1.99, 3.0}, 0.01));
  EXPECT_FALSE(ex::nondecreasing_within({1.0, 2.0, 1.9, 3.0}, 0.01));
}

TEST(Harness, ExampleRunsAreDeterministic) {
  const auto a = ex::run_example(1, 4, 3);
  const auto b = ex::run_example(1, 4, 1);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    EXPECT_EQ(a.tables[i].first, b.tables[i].first);
    EXPECT_EQ(a.tables[i].second.str(), b.tables[i].second.str());
  }
  EXPECT_TRUE(a.pass);
}

TEST(Harness, ParallelForPropagatesErrors) {
  std::vector<int> hit(20, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 20);
  EXPECT_THROW(parallel_for(8, 3, [](std::size_t i) {
                 if (i == 5) throw Error(ErrorKind::InvalidInput, "boom");
               }),
               Error);
}

TEST(Svg, ChartIsWellFormed) {
  const std::string svg = ex::svg_line_chart("title <&>", "x", "y", {{"a", {0, 1, 2}, {1, 3, 2}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(svg.find("<&>"), std::string::npos);
}
