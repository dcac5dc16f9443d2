#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixoram/config.hpp"
#include "mixoram/deployment.hpp"
#include "mixoram/harness.hpp"
#include "mixoram/report.hpp"

using namespace mixoram;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Verdict* find_verdict(const ExperimentReport& rep, const std::string& name) {
  for (const auto& v : rep.verdicts()) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

}  // namespace

TEST(Report, SummaryCsvAndNaming) {
  ExperimentReport rep("demo");
  rep.set_stem("parallel-layered_16_2_1");
  rep.set_columns({"trial", "value"});
  rep.add_row({"0", "1.5"});
  EXPECT_THROW(rep.add_row({"1"}), Error);
  rep.set("n", std::uint64_t{16});
  rep.set("ratio", 0.25);
  rep.verdict("ok", true, "fine");
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.csv(), "trial,value\n0,1.5\n");
  auto sum = rep.summary();
  EXPECT_NE(sum.find("experiment=demo\n"), std::string::npos);
  EXPECT_NE(sum.find("ratio=0.25\n"), std::string::npos);
  EXPECT_NE(sum.find("verdict.ok=PASS (fine)\n"), std::string::npos);
  EXPECT_NE(sum.find("result=PASS"), std::string::npos);
  rep.verdict("bad", false);
  EXPECT_FALSE(rep.passed());

  auto dir = std::filesystem::temp_directory_path() / "mixoram_report_test";
  std::filesystem::remove_all(dir);
  auto csv = rep.write(dir);
  EXPECT_EQ(csv.filename(), "parallel-layered_16_2_1.csv");
  EXPECT_TRUE(std::filesystem::exists(dir / "parallel-layered_16_2_1.summary"));
  EXPECT_EQ(slurp(csv), rep.csv());
  std::filesystem::remove_all(dir);
}

TEST(Report, MergePrefixesKeys) {
  ExperimentReport inner("x");
  inner.set("k", std::uint64_t{3});
  inner.verdict("v", false);
  ExperimentReport outer("y");
  outer.merge(inner, "inner.");
  EXPECT_EQ(outer.get("inner.k"), "3");
  EXPECT_FALSE(outer.passed());
}

TEST(Config, ParsingAndScenario) {
  auto cfg = parse_config("# comment\n design = cascade-rebuild \n n=64\nm=4\n\nseed=7\ntransport=tcp\n");
  EXPECT_EQ(cfg.at("design"), "cascade-rebuild");
  EXPECT_EQ(config_u64(cfg, "n", 0), 64u);
  EXPECT_EQ(config_u64(cfg, "missing", 5), 5u);
  EXPECT_THROW(config_u64(parse_config("n=abc"), "n", 0), Error);
  EXPECT_TRUE(config_bool(parse_config("x=true"), "x", false));
  EXPECT_DOUBLE_EQ(config_double(parse_config("x=0.5"), "x", 0), 0.5);
  auto sc = scenario_from_config(cfg);
  EXPECT_EQ(sc.design, Design::kCascadeRebuild);
  EXPECT_EQ(sc.n, 64u);
  EXPECT_EQ(sc.m, 4u);
  EXPECT_EQ(sc.transport, TransportKind::kTcp);
  EXPECT_EQ(sc.cache_slots(), 8u);
  EXPECT_EQ(sc.stem(), "cascade-rebuild_64_4_7");
  EXPECT_THROW(scenario_from_config(parse_config("design=star")), Error);
}

TEST(Harness, CeilSqrtAndSeeds) {
  EXPECT_EQ(ceil_sqrt(16), 4u);
  EXPECT_EQ(ceil_sqrt(17), 5u);
  EXPECT_EQ(ceil_sqrt(1), 1u);
  EXPECT_EQ(derive_seed(1, 2, "mix", 3), derive_seed(1, 2, "mix", 3));
  EXPECT_NE(derive_seed(1, 2, "mix", 3), derive_seed(1, 2, "mix", 4));
  EXPECT_NE(derive_seed(1, 2, "mix"), derive_seed(1, 3, "mix"));
  auto a = trial_rng(1, 0, "x");
  auto b = trial_rng(1, 0, "x");
  EXPECT_EQ(a(), b());
}

TEST(Harness, SameSeedSameReport) {
  Scenario sc;
  sc.design = Design::kParallelRebuild;
  sc.n = 16;
  sc.m = 2;
  sc.seed = 42;
  auto a = run_eviction_e2e(sc);
  auto b = run_eviction_e2e(sc);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.summary(), b.summary());
  auto k1 = run_krts_experiment(16, 4, 200, 3);
  auto k2 = run_krts_experiment(16, 4, 200, 3);
  EXPECT_EQ(k1.summary(), k2.summary());
}

TEST(Indistinguishability, DifferentSequencesSameShape) {
  std::vector<Query> a{{AccessOp::kRead, 0}, {AccessOp::kRead, 0}, {AccessOp::kRead, 0}, {AccessOp::kRead, 0}};
  std::vector<Query> b{{AccessOp::kWrite, 3}, {AccessOp::kRead, 9}, {AccessOp::kRead, 15}, {AccessOp::kWrite, 1}};
  for (auto d : kAllDesigns) {
    Scenario sc;
    sc.design = d;
    sc.n = 16;
    sc.m = 2;
    sc.evictions = 2;
    auto rep = run_indistinguishability_probe(sc, a, b);
    EXPECT_TRUE(rep.passed()) << to_string(d);
  }
}

TEST(Indistinguishability, UnequalLengthsAreNotComparable) {
  Scenario sc;
  std::vector<Query> a{{AccessOp::kRead, 0}};
  std::vector<Query> b{{AccessOp::kRead, 0}, {AccessOp::kRead, 1}};
  auto rep = run_indistinguishability_probe(sc, a, b);
  EXPECT_FALSE(rep.passed());
  auto* v = find_verdict(rep, "comparable");
  ASSERT_NE(v, nullptr);
  EXPECT_FALSE(v->pass);
}

TEST(Experiments, KrtsStaysBelowBound) {
  auto rep = run_krts_experiment(32, 4, 2000, 1);
  EXPECT_TRUE(rep.passed()) << rep.summary();
}

TEST(Experiments, CouponFormulaValue) {
  auto rep = run_coupon_experiment(1000000, 1000, 1, 0, 0, 0, 1);
  EXPECT_NEAR(std::stod(rep.get("E_all")), 14392.7, 0.1);
}
