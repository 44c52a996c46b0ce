#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "cdrleak/analysis.hpp"
#include "cdrleak/io.hpp"

using namespace cdrleak;

namespace {

Scenario baseline(double e_max = 19) {
  Scenario s;
  s.production = {10, 0.5};
  s.damage = {0.01, 0.001};
  s.extraction = {1, 0.2};
  s.removal = {0.5, 0.3};
  s.lambda = 0.5;
  s.e_max = e_max;
  return s;
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

void expect_same_bits(const Scenario& a, const Scenario& b) {
  EXPECT_EQ(bits(a.production.fa), bits(b.production.fa));
  EXPECT_EQ(bits(a.production.fb), bits(b.production.fb));
  EXPECT_EQ(bits(a.damage.g1), bits(b.damage.g1));
  EXPECT_EQ(bits(a.damage.g2), bits(b.damage.g2));
  EXPECT_EQ(bits(a.extraction.c1), bits(b.extraction.c1));
  EXPECT_EQ(bits(a.extraction.c2), bits(b.extraction.c2));
  EXPECT_EQ(bits(a.removal.h1), bits(b.removal.h1));
  EXPECT_EQ(bits(a.removal.h2), bits(b.removal.h2));
  EXPECT_EQ(bits(a.lambda), bits(b.lambda));
  EXPECT_EQ(bits(a.e_max), bits(b.e_max));
}

double number(const Cell& c) {
  EXPECT_TRUE(std::holds_alternative<double>(c)) << (std::holds_alternative<std::string>(c) ? std::get<std::string>(c) : "");
  return std::holds_alternative<double>(c) ? std::get<double>(c) : std::nan("");
}

std::vector<double> column(const Table& t, std::size_t col) {
  std::vector<double> out;
  for (const auto& row : t.rows) out.push_back(number(row.at(col)));
  return out;
}

}  // namespace

TEST(Rng, SplitMix64ReferenceSequence) {
  // Reference outputs of SplitMix64 seeded with 0 and 1234567.
  SplitMix64 a(0);
  EXPECT_EQ(a.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(a.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(a.next(), 0x06c45d188009454fULL);
  SplitMix64 b(1234567);
  EXPECT_EQ(b.next(), 6457827717110365317ULL);
  EXPECT_EQ(b.next(), 3203168211198807973ULL);
  for (int i = 0; i < 1000; ++i) {
    const double u = b.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RandomScenario, SameSeedSameBits) {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 123456789ULL}) expect_same_bits(random_scenario(seed), random_scenario(seed));
  const auto a = random_scenario(1), b = random_scenario(2);
  EXPECT_NE(bits(a.production.fa), bits(b.production.fa));
}

TEST(RandomScenario, SeedZeroMatchesGoldenFile) {
  const auto golden = load_scenario(CDRLEAK_GOLDEN_DIR "/seed0_scenario.json");
  expect_same_bits(random_scenario(0), golden);
}

TEST(RandomScenario, DrawsValidScenarios) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_TRUE(validate_scenario(random_scenario(seed)).ok());
}

TEST(RandomScenario, RejectionLimitWithoutValidDamages) {
  ScenarioBounds b;
  b.g2 = {-1.0, 0.0};
  try {
    random_scenario(3, b);
    FAIL() << "expected RejectionLimit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RejectionLimit);
  }
}

TEST(Verify, EmptySeedListPassesVacuously) {
  const auto rep = verify_propositions(std::span<const std::uint64_t>{});
  EXPECT_EQ(rep.n_scenarios, 0);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.failures.empty());
  EXPECT_EQ(rep.checks.size(), verification_checks().size());
}

TEST(Verify, SmallBatchPassesAndIsWorkerIndependent) {
  std::vector<std::uint64_t> seeds(12);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{100});
  const auto one = verify_propositions(seeds);
  EXPECT_TRUE(one.passed());
  EXPECT_EQ(one.n_scenarios + static_cast<int>(std::count_if(one.skipped.begin(), one.skipped.end(),
                                                             [](const SeedIssue& s) { return s.check == "scenario"; })),
            12);
  for (const auto& c : one.checks) {
    if (c.name == "exporter_case" || c.name == "balanced_case") continue;
    EXPECT_EQ(c.evaluated, one.n_scenarios) << c.name;
  }

  VerifyOptions par;
  par.workers = 3;
  const auto three = verify_propositions(seeds, par);
  std::ostringstream a, b;
  write_csv(a, report_table(one));
  write_csv(b, report_table(three));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Verify, FailingToleranceIsReportedNotThrown) {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  VerifyOptions opt;
  opt.tolerances.leakage_identity = -1.0;  // impossible threshold
  const auto rep = verify_propositions(seeds, opt);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.check("leakage_identity").passed, 0);
  std::ostringstream out;
  write_csv(out, report_table(rep));
  EXPECT_NE(out.str().find("FAIL"), std::string::npos);
  EXPECT_NE(out.str().find("failure,leakage_identity"), std::string::npos);
}

TEST(Verify, BoundaryScenariosAreSkipped) {
  ScenarioBounds b;
  b.h1 = {50.0, 60.0};  // removal never pays
  VerifyOptions opt;
  opt.bounds = b;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  const auto rep = verify_propositions(seeds, opt);
  EXPECT_EQ(rep.n_scenarios, 0);
  EXPECT_TRUE(rep.passed());
  ASSERT_EQ(rep.skipped.size(), 3u);
  for (const auto& s : rep.skipped) EXPECT_NE(s.detail.find("NoInteriorOptimum"), std::string::npos) << s.detail;
}

TEST(Sweep, SupplyLeakageRisesWithExtractionSlope) {
  SweepSpec spec{baseline(), "c2", {0, 0.1, 0.2, 0.4}, {"e_w", "lr_s", "alpha", "dphi_dr"}, Allocation{1, 0.5}};
  const auto t = sweep(spec);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.header, (std::vector<std::string>{"c2", "e_w", "lr_s", "alpha", "dphi_dr"}));
  const auto lr = column(t, 2);
  EXPECT_EQ(lr[0], 0.0);
  for (std::size_t i = 1; i < lr.size(); ++i) EXPECT_GT(lr[i], lr[i - 1]);
  EXPECT_EQ(column(t, 3)[0], 1.0);
  // Row for c2 = 0.2 is the baseline evaluation.
  EXPECT_DOUBLE_EQ(number(t.rows[2][1]), solve_phi(baseline(), 1, 0.5).e_w);
}

TEST(Sweep, CdrLeakageRisesWithDamageCurvature) {
  SweepSpec spec{baseline(15), "g2", {0.0005, 0.001, 0.0015, 0.002, 0.0025}, {"dphi_dr"}, Allocation{4, 1}};
  const auto d = column(sweep(spec), 1);
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GT(d[i], d[i - 1]);
}

TEST(Sweep, TradeBalanceEffectFallsWithOwnership) {
  SweepSpec spec{baseline(), "lambda", {0, 0.25, 0.5, 0.75, 1}, {"theta", "trade_case"}, std::nullopt};
  const auto t = sweep(spec);
  const auto th = column(t, 1);
  for (std::size_t i = 1; i < th.size(); ++i) EXPECT_LT(th[i], th[i - 1]);
  EXPECT_EQ(std::get<std::string>(t.rows.front()[2]), "NetImporter");
  EXPECT_EQ(std::get<std::string>(t.rows.back()[2]), "NetExporter");
}

TEST(Sweep, FailedPointsCarryErrorMarkers) {
  SweepSpec spec{baseline(), "h1", {0.5, 50}, {"e_a_star", "tau_star"}, std::nullopt};
  const auto t = sweep(spec);
  EXPECT_TRUE(std::holds_alternative<double>(t.rows[0][1]));
  EXPECT_EQ(std::get<std::string>(t.rows[1][1]), "ERR:NoInteriorOptimum");
  EXPECT_EQ(std::get<std::string>(t.rows[1][2]), "ERR:NoInteriorOptimum");

  SweepSpec invalid{baseline(), "g2", {0.001, -0.001}, {"e_w"}, Allocation{4, 1}};
  const auto u = sweep(invalid);
  EXPECT_TRUE(std::holds_alternative<double>(u.rows[0][1]));
  EXPECT_EQ(std::get<std::string>(u.rows[1][1]), "ERR:InvalidScenario");

  SweepSpec unsolvable{baseline(5), "c1", {1}, {"e_w"}, Allocation{4.9, 0}};
  EXPECT_EQ(std::get<std::string>(sweep(unsolvable).rows[0][1]), "ERR:NoBracket");
}

TEST(Sweep, UnknownNamesAreConfigErrors) {
  SweepSpec bad_param{baseline(), "gamma", {1}, {"e_w"}, std::nullopt};
  EXPECT_THROW(sweep(bad_param), Error);
  SweepSpec bad_output{baseline(), "c2", {0.1}, {"leak"}, std::nullopt};
  try {
    sweep(bad_output);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(Sweep, ParallelRowsKeepInputOrder) {
  SweepSpec spec{baseline(15), "c2", {0.4, 0, 0.3, 0.1, 0.2}, {"lr_s"}, Allocation{4, 1}};
  std::ostringstream a, b;
  write_csv(a, sweep(spec, 1));
  write_csv(b, sweep(spec, 4));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Curves, CrossingBracketsTheEquilibrium) {
  const Scenario s = baseline(15);
  const auto grid = curve_grid(s, 4, 100);
  ASSERT_EQ(grid.size(), 100u);
  const auto pts = mc_mb_curves(s, 4, 1, grid);
  const auto br = crossing_bracket(pts);
  ASSERT_TRUE(br.has_value());
  const double e_w = solve_phi(s, 4, 1).e_w;
  EXPECT_LE(br->first, e_w);
  EXPECT_GE(br->second, e_w);
  EXPECT_LE(br->second - br->first, (s.e_max - 4) / 99 + 1e-12);
}

TEST(Curves, LowerDomesticUseMovesCrossingRight) {
  const Scenario s = baseline(15);
  std::vector<double> grid(2001);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 11.0 * static_cast<double>(i) / 2000.0;
  const auto before = crossing_bracket(mc_mb_curves(s, 4, 1, grid));
  const auto after = crossing_bracket(mc_mb_curves(s, 3, 1, grid));
  ASSERT_TRUE(before && after);
  EXPECT_GT(after->first, before->first);
}

TEST(Curves, RemovalShiftsOnlyMarginalBenefitUnderFlatSupply) {
  Scenario s = baseline(19.5);
  s.extraction.c2 = 0;
  const auto grid = curve_grid(s, 1, 101);
  const auto x = mc_mb_curves(s, 1, 0.5, grid);
  const auto z = mc_mb_curves(s, 1, 1.5, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(x[i].mc, z[i].mc);
    EXPECT_GT(z[i].mb, x[i].mb);
  }
  const auto bx = crossing_bracket(x), bz = crossing_bracket(z);
  ASSERT_TRUE(bx && bz);
  EXPECT_GT(bz->first, bx->first);
}

TEST(Curves, GridOutsideDomainRejected) {
  const Scenario s = baseline(15);
  const std::vector<double> grid{0.0, 12.0};
  EXPECT_THROW(mc_mb_curves(s, 4, 1, grid), Error);
}

TEST(Csv, RoundTripFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  Table t;
  t.header = {"a", "b"};
  t.rows.push_back({1.5, std::string("x,y")});
  t.rows.push_back({error_cell(ErrorCode::NoBracket), std::string("say \"hi\"")});
  std::ostringstream out;
  write_csv(out, t);
  EXPECT_EQ(out.str(), "a,b\n1.5,\"x,y\"\nERR:NoBracket,\"say \"\"hi\"\"\"\n");
}
