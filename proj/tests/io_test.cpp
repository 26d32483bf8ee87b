#include "rsrl/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "rsrl/envs.hpp"
#include "test_util.hpp"

namespace rsrl {
namespace {

const char* kTwoStateDoc = R"({
  "S": 2, "A": 1, "H": 1,
  "P": [[[[0.5, 0.5]], [[0.0, 1.0]]]],
  "r": [[[0.0], [1.0]]],
  "initial_state_rule": {"kind": "fixed", "state": 1}
})";

TEST(MdpJson, ParsesDocumentedExample) {
  const auto m = mdp_from_json(json::parse(kTwoStateDoc));
  EXPECT_EQ(m.num_states(), 2);
  EXPECT_EQ(m.num_actions(), 1);
  EXPECT_EQ(m.horizon(), 1);
  EXPECT_EQ(m.P(0, 0, 0, 1), 0.5);
  EXPECT_EQ(m.r(0, 1, 0), 1.0);
  EXPECT_EQ(m.initial_state_rule().kind, InitialStateKind::kFixed);
  EXPECT_EQ(m.initial_state_rule().state, 1);
}

TEST(MdpJsonProperty, RoundTripIsExact) {
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto m = random_mdp(1 + seed % 4, 1 + seed % 3, 1 + seed % 5, seed, 0.3);
    switch (seed % 3) {
      case 0: m.set_initial_state_rule(InitialStateRule::fixed(static_cast<int>(seed % m.num_states()))); break;
      case 1: m.set_initial_state_rule(InitialStateRule::cyclic()); break;
      default: m.set_initial_state_rule(InitialStateRule::seeded_random()); break;
    }
    const auto text = mdp_to_json(m).dump();
    EXPECT_EQ(mdp_from_json(json::parse(text)), m) << seed;
  }
}

TEST(MdpJson, RuleStrings) {
  EXPECT_EQ(rule_from_json(json("cyclic")).kind, InitialStateKind::kCyclic);
  EXPECT_EQ(rule_from_json(json("seeded-random")).kind, InitialStateKind::kSeededRandom);
  const auto fixed = rule_from_json(json("fixed"));
  EXPECT_EQ(fixed.kind, InitialStateKind::kFixed);
  EXPECT_EQ(fixed.state, 0);
  EXPECT_THROW(rule_from_json(json("sometimes")), ValidationError);
  EXPECT_THROW(rule_from_json(json(3)), ValidationError);
  EXPECT_THROW(rule_from_json(json::parse(R"({"kind": "fixed", "state": 0.5})")), ValidationError);
}

TEST(MdpJson, ShapeErrorsNameThePath) {
  auto doc = json::parse(kTwoStateDoc);
  doc["P"][0][1][0] = json::array({1.0});
  try {
    mdp_from_json(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("P[0][1][0]"), std::string::npos) << e.what();
  }
}

TEST(MdpJson, MissingOrBadFields) {
  auto doc = json::parse(kTwoStateDoc);
  doc.erase("S");
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
  doc = json::parse(kTwoStateDoc);
  doc["H"] = 0;
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
  doc = json::parse(kTwoStateDoc);
  doc["r"][0][0][0] = "high";
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
  doc = json::parse(kTwoStateDoc);
  doc.erase("P");
  EXPECT_THROW(mdp_from_json(doc), ValidationError);
  EXPECT_THROW(mdp_from_json(json::array()), ValidationError);
}

TEST(MdpJson, ValidationRunsAfterParsing) {
  auto doc = json::parse(kTwoStateDoc);
  doc["P"][0][0][0] = json::array({0.6, 0.6});
  EXPECT_THROW(mdp_from_json(doc), NonStochasticKernel);
  doc = json::parse(kTwoStateDoc);
  doc["r"][0][0][0] = 1.5;
  EXPECT_THROW(mdp_from_json(doc), RewardOutOfRange);
}

TEST(MdpJson, RenormalizeFlagRescuesScaledRows) {
  auto doc = json::parse(kTwoStateDoc);
  doc["P"][0][0][0] = json::array({2.0, 6.0});
  EXPECT_THROW(mdp_from_json(doc), NonStochasticKernel);
  const auto m = mdp_from_json(doc, true);
  EXPECT_DOUBLE_EQ(m.P(0, 0, 0, 0), 0.25);
  EXPECT_DOUBLE_EQ(m.P(0, 0, 0, 1), 0.75);
}

TEST(MdpFile, SaveThenLoad) {
  const auto path = (std::filesystem::temp_directory_path() / "rsrl_io_test_mdp.json").string();
  const auto m = testing::preference_flip_mdp();
  save_mdp(m, path);
  EXPECT_EQ(load_mdp(path), m);
  std::remove(path.c_str());
}

TEST(MdpFile, MissingFileIsIoError) {
  EXPECT_THROW(load_mdp("/nonexistent/dir/mdp.json"), IoError);
}

TEST(MdpFile, MalformedJsonIsValidationError) {
  const auto path = (std::filesystem::temp_directory_path() / "rsrl_io_test_bad.json").string();
  write_text_file(path, "{\"S\": 2,");
  EXPECT_THROW(load_mdp(path), ValidationError);
  std::remove(path.c_str());
}

TEST(SolutionJson, ShapesAndValues) {
  const auto m = testing::preference_flip_mdp();
  const auto sol = solve_optimal(m, RiskParam(1.0));
  const auto j = solution_to_json(sol, 1.0);
  EXPECT_EQ(j["beta"].get<double>(), 1.0);
  ASSERT_EQ(j["V"].size(), 3u);
  ASSERT_EQ(j["Q"].size(), 3u);
  ASSERT_EQ(j["policy"].size(), 2u);
  EXPECT_EQ(j["V"][0].size(), 3u);
  EXPECT_EQ(j["Q"][0][0].size(), 2u);
  EXPECT_NEAR(j["V"][0][0].get<double>(), testing::kLseBetaPlusOne, 1e-12);
  EXPECT_EQ(j["policy"][0][0].get<int>(), 1);
  for (double v : j["V"][2]) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace rsrl
