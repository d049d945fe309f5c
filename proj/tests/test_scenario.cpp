#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace crmimo;

namespace {

// Textbook sequential SplitMix64: the state advances by the golden gamma
// before every output.
struct SequentialSplitMix {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

}  // namespace

TEST(CounterRng, MatchesSequentialSplitMix) {
  CounterRng zero(0);
  EXPECT_EQ(zero.next_u64(), 0xE220A8397B1DCDAFULL);
  for (std::uint64_t seed : {1ULL, 42ULL, 0xDEADBEEFULL}) {
    SequentialSplitMix ref{seed};
    CounterRng rng(seed);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(rng.next_u64(), ref.next()) << "seed " << seed << " draw " << i;
  }
  EXPECT_EQ(CounterRng::at(9, 500), [] {
    SequentialSplitMix r{9};
    for (int i = 0; i < 500; ++i) r.next();
    return r.next();
  }());
}

TEST(CounterRng, ComplexGaussianMoments) {
  CounterRng rng(2024);
  const int n = 200000;
  Complex mean = 0.0;
  double power = 0.0, re2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.next_cscg();
    mean += z;
    power += std::norm(z);
    re2 += z.real() * z.real();
  }
  EXPECT_LT(std::abs(mean / double(n)), 0.01);
  EXPECT_NEAR(power / n, 1.0, 0.01);
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
}

TEST(Generate, DeterministicAndPathLossScaled) {
  ScenarioParams p;
  p.K = 3;
  p.N_t = 4;
  p.N_r = 2;
  p.seed = 11;
  p.l_ratio = {1.0, 4.0};
  const Scenario a = generate_scenario(p);
  EXPECT_EQ(a, generate_scenario(p));
  EXPECT_EQ(a.weights, std::vector<double>(3, 1.0));
  EXPECT_EQ(a.P_t, std::vector<double>(2, 1.0));

  // PU draws follow the user channels in the counter stream.
  CounterRng rng(11);
  for (int i = 0; i < 3 * 4 * 2; ++i) rng.next_cscg();
  for (int c = 0; c < 4; ++c) EXPECT_EQ(a.pu_channels[0](c), rng.next_cscg());
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(a.pu_channels[1](c) - rng.next_cscg() / 16.0), 0.0, 1e-15);

  p.seed = 12;
  EXPECT_NE(a.channels[0], generate_scenario(p).channels[0]);
}

TEST(Generate, RejectsBadParameters) {
  ScenarioParams p;
  p.l_ratio = {0.5};
  EXPECT_THROW(generate_scenario(p), Error);
  p.l_ratio.clear();
  p.K = 0;
  EXPECT_THROW(generate_scenario(p), Error);
}

TEST(Ordering, NonincreasingWeightsAndDeltas) {
  const UserOrdering o = order_users({1.0, 5.0, 2.0, 5.0});
  EXPECT_EQ(o.pi, (std::vector<int>{1, 3, 2, 0}));
  EXPECT_EQ(o.deltas, (std::vector<double>{0.0, 3.0, 1.0, 1.0}));
  EXPECT_EQ(o.position_of(2), 2);
  EXPECT_THROW(o.position_of(7), Error);
}

TEST(Json, RoundTripIsExact) {
  const Scenario s = fixtures::random_scenario(5, 3, 3, 2, 2);
  EXPECT_EQ(scenario_from_json(scenario_to_json(s)), s);
  const auto path = std::filesystem::temp_directory_path() / "crmimo_roundtrip.json";
  save_scenario(s, path.string());
  EXPECT_EQ(load_scenario(path.string()), s);
  std::filesystem::remove(path);
}

TEST(Json, GeneratedAndDecibelFields) {
  const auto j = nlohmann::json::parse(R"({"K": 2, "N_t": 3, "N_r": 1, "P_u_dB": 10, "seed": 4,
                                           "pu": [{"P_t_dB": 0, "l_ratio": 2}]})");
  const Scenario s = scenario_from_json(j);
  EXPECT_NEAR(s.P_u, 10.0, 1e-12);
  EXPECT_NEAR(s.P_t[0], 1.0, 1e-15);
  ScenarioParams p;
  p.K = 2;
  p.N_t = 3;
  p.N_r = 1;
  p.P_u = s.P_u;
  p.seed = 4;
  p.l_ratio = {2.0};
  EXPECT_EQ(s, generate_scenario(p));
}

TEST(Json, SchemaErrorsNameTheField) {
  const auto kind_and_detail = [](const std::string& text) {
    try {
      scenario_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return std::pair<ErrorKind, std::string>(e.kind(), e.detail());
    }
    return std::pair<ErrorKind, std::string>(ErrorKind::Io, "no error");
  };
  EXPECT_EQ(kind_and_detail(R"({"N_t": 1, "N_r": 1, "P_u": 1})").second, "K");
  EXPECT_EQ(kind_and_detail(R"({"K": 1, "N_t": 1, "N_r": 1})").second, "P_u");
  EXPECT_EQ(kind_and_detail(R"({"K": 1, "N_t": 1, "N_r": 1, "P_u": 1, "pu": [{"l_ratio": 1}]})").second, "pu[0].P_t");
  EXPECT_EQ(kind_and_detail(R"({"K": 1, "N_t": 1, "N_r": 1, "P_u": 1, "channels": {"H": [[[[1, 0, 3]]]]}})").second,
            "channels.H[0][0][0]");
  EXPECT_EQ(kind_and_detail(R"({"K": 2, "N_t": 1, "N_r": 1, "P_u": 1, "weights": [1]})").first,
            ErrorKind::DimensionMismatch);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), Error);
}

TEST(Scenario, ValidateCatchesBadWeights) {
  Scenario s = fixtures::scalar_pair();
  s.weights[1] = 0.0;
  EXPECT_THROW(s.validate(), Error);
  s = fixtures::scalar_pair();
  s.pu_channels.push_back(ComplexVector::Ones(1));
  EXPECT_THROW(s.validate(), Error);
}
