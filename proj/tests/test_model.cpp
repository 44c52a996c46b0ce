#include <gtest/gtest.h>

#include <cmath>

#include "cdrleak/model.hpp"
#include "cdrleak/rng.hpp"

using namespace cdrleak;

namespace {

Scenario baseline() {
  Scenario s;
  s.production = {10, 0.5};
  s.damage = {0.01, 0.001};
  s.extraction = {1, 0.2};
  s.removal = {0.5, 0.3};
  s.lambda = 0.5;
  s.e_max = 15;
  return s;
}

bool check_passed(const ValidationReport& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return c.passed;
  ADD_FAILURE() << "no check named " << name;
  return false;
}

}  // namespace

TEST(Production, EvaluatesPolynomialAndDerivatives) {
  const ProductionSpec spec{10, 0.5};
  const auto at0 = production_eval(spec, 0);
  EXPECT_EQ(at0.value, 0.0);
  EXPECT_EQ(at0.d1, 10.0);
  EXPECT_EQ(at0.d2, -0.5);
  const auto at4 = production_eval(spec, 4);
  EXPECT_DOUBLE_EQ(at4.value, 36.0);
  EXPECT_DOUBLE_EQ(at4.d1, 8.0);
  EXPECT_DOUBLE_EQ(at4.d2, -0.5);
}

TEST(Production, RejectsPointsWhereMarginalProductIsNotPositive) {
  const ProductionSpec spec{10, 0.5};
  try {
    production_eval(spec, 20);
    FAIL() << "expected DomainError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
  EXPECT_THROW(production_eval(spec, -1e-12), Error);
}

TEST(Damage, UnitAtZeroAndPolynomialElsewhere) {
  const DamageSpec spec{0.01, 0.001};
  const auto at0 = damage_eval(spec, 0);
  EXPECT_EQ(at0.value, 1.0);
  EXPECT_DOUBLE_EQ(at0.d1, -0.01);
  EXPECT_DOUBLE_EQ(at0.d2, -0.002);
  const auto at10 = damage_eval(spec, 10);
  EXPECT_NEAR(at10.value, 0.8, 1e-15);
  EXPECT_NEAR(at10.d1, -0.03, 1e-15);
}

TEST(Damage, CollapseWhenOutputIsDestroyed) {
  try {
    damage_eval({0.1, 0.01}, 20);
    FAIL() << "expected DamageCollapse";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DamageCollapse);
  }
}

TEST(Damage, DiagnosticSwitchRemovesDamages) {
  Scenario s = baseline();
  s.damage_channel_enabled = false;
  const auto d = damage_factor(s, 12.0);
  EXPECT_EQ(d.value, 1.0);
  EXPECT_EQ(d.d1, 0.0);
  EXPECT_EQ(d.d2, 0.0);
}

TEST(ExtractionRemoval, MarginalCosts) {
  const auto c = extraction_eval({1, 0.2}, 5);
  EXPECT_DOUBLE_EQ(c.d1, 2.0);
  EXPECT_DOUBLE_EQ(c.d2, 0.2);
  const auto flat = extraction_eval({1, 0}, 7);
  EXPECT_EQ(flat.d1, 1.0);
  EXPECT_EQ(flat.d2, 0.0);
  EXPECT_DOUBLE_EQ(removal_eval({0.5, 0.3}, 2).d1, 1.1);
  EXPECT_THROW(extraction_eval({1, 0.2}, -1), Error);
  EXPECT_THROW(removal_eval({0.5, 0.3}, -0.5), Error);
}

TEST(Validation, BaselinePassesEveryAssumption) {
  const auto rep = validate_scenario(baseline());
  EXPECT_TRUE(rep.ok()) << rep.failures();
  EXPECT_GE(rep.checks.size(), 10u);
}

TEST(Validation, FlatDamageCurvatureFails) {
  Scenario s = baseline();
  s.damage.g2 = 0;
  const auto rep = validate_scenario(s);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(check_passed(rep, "damage_concave"));
  EXPECT_NE(rep.failures().find("Omega''"), std::string::npos);
}

TEST(Validation, OwnershipShareOutOfRange) {
  Scenario s = baseline();
  s.lambda = 1.2;
  const auto rep = validate_scenario(s);
  EXPECT_FALSE(check_passed(rep, "ownership_share"));
  EXPECT_TRUE(check_passed(rep, "damage_concave"));
}

TEST(Validation, DomainBoundBeyondSaturation) {
  Scenario s = baseline();
  s.e_max = 20;
  EXPECT_FALSE(check_passed(validate_scenario(s), "production_marginal_positive"));
}

TEST(Validation, DamagesCollapsingInsideDomain) {
  Scenario s = baseline();
  s.damage = {0.1, 0.01};
  const auto rep = validate_scenario(s);
  EXPECT_FALSE(check_passed(rep, "damage_positive"));
}

TEST(Validation, DeterministicAndSideEffectFree) {
  const Scenario s = baseline();
  const auto a = validate_scenario(s);
  const auto b = validate_scenario(s);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].name, b.checks[i].name);
    EXPECT_EQ(a.checks[i].passed, b.checks[i].passed);
  }
}

TEST(Validation, RequireValidThrowsWithFailedAssumptions) {
  Scenario s = baseline();
  s.damage.g2 = -0.001;
  try {
    require_valid(s);
    FAIL() << "expected InvalidScenario";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScenario);
    EXPECT_NE(std::string(e.what()).find("Omega''"), std::string::npos);
  }
}

// Analytic derivatives against central differences (step 1e-5, relative
// tolerance 1e-6) on random valid specs over [0, e_max].
TEST(ModelProperty, DerivativesMatchFiniteDifferences) {
  SplitMix64 rng(2024);
  constexpr double h = 1e-5;
  auto rel_close = [](double analytic, double fd, double scale) {
    return std::abs(analytic - fd) <= 1e-6 * std::max(std::abs(analytic), scale);
  };
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Scenario s;
    s.production = {rng.uniform(5, 15), rng.uniform(0.2, 1.0)};
    s.damage = {rng.uniform(0, 0.03), rng.uniform(1e-4, 3e-3)};
    s.extraction = {rng.uniform(0, 3), rng.uniform(0, 0.5)};
    s.removal = {rng.uniform(0, 1), rng.uniform(0, 1)};
    s.lambda = rng.uniform(0, 1);
    s.e_max = rng.uniform(0.5, 0.95) * s.production.fa / s.production.fb;
    if (!validate_scenario(s).ok()) continue;
    ++checked;
    for (int k = 1; k < 20; ++k) {
      const double e = s.e_max * k / 20.0;
      const auto f = production_eval(s.production, e);
      const auto fp = production_eval(s.production, e + h), fm = production_eval(s.production, e - h);
      EXPECT_TRUE(rel_close(f.d1, (fp.value - fm.value) / (2 * h), 1.0));
      EXPECT_TRUE(rel_close(f.d2, (fp.d1 - fm.d1) / (2 * h), 1.0));

      const auto d = damage_eval(s.damage, e);
      const auto dp = damage_eval(s.damage, e + h), dm = damage_eval(s.damage, e - h);
      EXPECT_TRUE(rel_close(d.d1, (dp.value - dm.value) / (2 * h), 1e-3));
      EXPECT_TRUE(rel_close(d.d2, (dp.d1 - dm.d1) / (2 * h), 1e-3));

      const auto c = extraction_eval(s.extraction, e);
      const auto cp = extraction_eval(s.extraction, e + h), cm = extraction_eval(s.extraction, e - h);
      EXPECT_TRUE(rel_close(c.d1, (cp.value - cm.value) / (2 * h), 1.0));
      EXPECT_TRUE(rel_close(c.d2, (cp.d1 - cm.d1) / (2 * h), 1e-2));

      const auto r = removal_eval(s.removal, e);
      const auto rp = removal_eval(s.removal, e + h), rm = removal_eval(s.removal, e - h);
      EXPECT_TRUE(rel_close(r.d1, (rp.value - rm.value) / (2 * h), 1.0));
    }
    EXPECT_EQ(damage_eval(s.damage, 0.0).value, 1.0);
  }
  EXPECT_GT(checked, 100);
}
