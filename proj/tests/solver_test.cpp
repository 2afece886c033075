#include <gtest/gtest.h>

#include <tuple>

#include "oracles.hpp"

using namespace exofab;
using namespace exofab::test;

namespace {

void expect_matches_oracle(const Requirements& req, const std::string& label) {
  SolveResult r = solve(req);
  OracleResult o = oracle_solve(req);
  EXPECT_EQ(r.candidate_count, o.total) << label;
  EXPECT_EQ(r.skipped_for_missing_calibration.size(), o.skipped) << label;
  EXPECT_EQ(r.rejected_count, o.rejected) << label;
  EXPECT_EQ(r.feasible, !o.front.empty()) << label;
  ASSERT_EQ(r.pareto_front.size(), o.front.size()) << label;
  for (std::size_t i = 0; i < o.front.size(); ++i) {
    EXPECT_EQ(r.pareto_front[i].config, o.front[i].config) << label << " #" << i;
    EXPECT_EQ(r.pareto_front[i].fabric, o.front[i].fabric) << label << " #" << i;
    EXPECT_EQ(r.pareto_front[i].layers, o.front[i].layers) << label << " #" << i;
    EXPECT_EQ(r.pareto_front[i].stitches, o.front[i].stitches) << label << " #" << i;
    EXPECT_NEAR(r.pareto_front[i].minutes, o.front[i].minutes, 1e-9) << label << " #" << i;
  }
}

Requirements splint_query() {
  Requirements r;
  r.geometry = GeometryTag::splint;
  r.fabric_constraint = FabricConstraint::non_stretch;
  r.min_compression = ForceRequirement{6.4, 5.0};
  return r;
}

Requirements bra_query() {
  Requirements r;
  r.geometry = GeometryTag::bra_dome;
  r.fabric_constraint = FabricConstraint::stretch;
  r.min_compression = ForceRequirement{1.8, 19.0};
  r.formability = FormabilityNeed::double_curve;
  return r;
}

Requirements strong_query() {
  Requirements r;
  r.min_compression = ForceRequirement{200.0, 20.0};
  return r;
}

// Re-checks one candidate's constraints straight against the predictor.
bool independently_feasible(const CandidateDesign& c, const Requirements& req) {
  auto f = [&](LoadMode m, double d) {
    return predict({c.config, c.fabric, c.layers, d, m, req.geometry}, CalibrationTable::bundled()).force_n;
  };
  if (req.min_compression && f(LoadMode::compression, req.min_compression->displacement_mm) < req.min_compression->force_n)
    return false;
  if (req.max_tensile && f(LoadMode::tensile, req.max_tensile->displacement_mm) > req.max_tensile->force_n) return false;
  if (req.formability != FormabilityNeed::none) {
    const FabricSpec& fab = fabric(c.fabric);
    if (classify_formability(c.config, c.fabric, req.mold_diameter_mm, c.layers).form != FormClass::good) return false;
    if (req.formability == FormabilityNeed::double_curve && fab.stretch != StretchClass::stretch) return false;
  }
  return true;
}

}  // namespace

TEST(Enumerate, Cardinality) {
  Requirements r;
  r.formability = FormabilityNeed::single_curve;
  EXPECT_EQ(enumerate_candidates(r).size(), 72u);
  r.fabric_constraint = FabricConstraint::non_stretch;
  EXPECT_EQ(enumerate_candidates(r).size(), 36u);
  r.fabric_constraint = FabricConstraint::any;
  r.max_layers = 1;
  EXPECT_EQ(enumerate_candidates(r).size(), 18u);
  r.fabric_constraint = FabricConstraint::named;
  r.fabric_name = "stretch-189";
  r.max_layers = 4;
  EXPECT_EQ(enumerate_candidates(r).size(), 36u);
}

TEST(Solve, SplintNeedsFourLayers) {
  SolveResult r = solve(splint_query());
  ASSERT_TRUE(r.feasible);
  ASSERT_EQ(r.pareto_front.size(), 1u);
  const CandidateDesign& c = r.pareto_front[0];
  EXPECT_EQ(c.config, "L0.66_S1");
  EXPECT_EQ(c.fabric, "nonstretch-336");
  EXPECT_EQ(c.layers, 4);
  EXPECT_EQ(c.compression->force_n, 7.8);
  // the three-layer splint (6.3 N) is the only other evaluable design
  EXPECT_EQ(r.rejected_count, 2u);
  EXPECT_EQ(r.skipped_for_missing_calibration.size(), 33u);
}

TEST(Solve, BraDomeIsFeasibleOnStretch) {
  SolveResult r = solve(bra_query());
  ASSERT_TRUE(r.feasible);
  const CandidateDesign& c = r.pareto_front.at(0);
  EXPECT_EQ(c.config, "L1_S15");
  EXPECT_EQ(c.fabric, "stretch-390");
  EXPECT_EQ(c.primitive, Primitive::concentric);
  EXPECT_EQ(c.formability->form, FormClass::good);
  EXPECT_EQ(c.compression->force_n, 1.8);
}

TEST(Solve, TwoHundredNewtonsIsInfeasible) {
  SolveResult r = solve(strong_query());
  EXPECT_FALSE(r.feasible);
  ASSERT_TRUE(r.nearest_miss.has_value());
  EXPECT_EQ(r.nearest_miss->compression->force_n, 96.6);
  EXPECT_EQ(r.nearest_miss->fabric, "stretch-390");
  EXPECT_EQ(r.nearest_miss->layers, 4);
  EXPECT_EQ(r.binding_constraint, "min_compression");
  std::string rep = feasibility_report(r);
  EXPECT_NE(rep.find("status: infeasible"), std::string::npos);
  EXPECT_NE(rep.find("reason: min_compression"), std::string::npos);
  EXPECT_NE(rep.find("96.6 N"), std::string::npos);
  EXPECT_NE(rep.find("binding constraint"), std::string::npos);
}

TEST(Solve, UncalibratedFabricIsReportedNotGuessed) {
  Requirements r;
  r.fabric_constraint = FabricConstraint::named;
  r.fabric_name = "nonstretch-167";
  r.min_compression = ForceRequirement{1.0, 5.0};
  SolveResult s = solve(r);
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.skipped_for_missing_calibration.size(), 36u);
  EXPECT_FALSE(s.nearest_miss.has_value());
  EXPECT_EQ(s.binding_constraint, "calibration");
}

TEST(Solve, ContradictoryConstraints) {
  Requirements r;
  r.fabric_constraint = FabricConstraint::non_stretch;
  r.formability = FormabilityNeed::double_curve;
  SolveResult s = solve(r);
  EXPECT_FALSE(s.feasible);
  EXPECT_EQ(s.binding_constraint, "formability");
  EXPECT_NE(feasibility_report(s).find("status: infeasible"), std::string::npos);
}

TEST(Solve, InvalidRequirements) {
  Requirements r;
  EXPECT_THROW(solve(r), Error);
  r.min_compression = ForceRequirement{-1, 5};
  EXPECT_THROW(solve(r), Error);
  r.min_compression = ForceRequirement{1, 5};
  r.max_layers = 0;
  EXPECT_THROW(solve(r), Error);
}

TEST(Solve, FeasibleReportListsFront) {
  Requirements r;
  r.min_compression = ForceRequirement{10.0, 20.0};
  SolveResult s = solve(r);
  ASSERT_TRUE(s.feasible);
  std::string rep = feasibility_report(s);
  EXPECT_NE(rep.find("status: feasible"), std::string::npos);
  for (const auto& c : s.pareto_front) EXPECT_NE(rep.find(c.config + " linear on " + c.fabric), std::string::npos);
  EXPECT_NE(rep.find("why:"), std::string::npos);
  EXPECT_EQ(feasibility_report(solve(r)), rep);
}

TEST(Solve, MatchesBruteForceOracleOnNamedQueries) {
  expect_matches_oracle(splint_query(), "splint");
  expect_matches_oracle(bra_query(), "bra");
  expect_matches_oracle(strong_query(), "strong");
}

TEST(SolveProperties, RandomRequirementSets) {
  Gen g(50);
  int feasible_sets = 0;
  for (int i = 0; i < 50; ++i) {
    Requirements req = random_requirements(g);
    const std::string label = "set " + std::to_string(i);
    expect_matches_oracle(req, label);

    SolveResult r = solve(req);
    feasible_sets += r.feasible;
    for (const auto& a : r.pareto_front) {
      EXPECT_TRUE(independently_feasible(a, req)) << label;
      for (const auto& b : r.pareto_front) EXPECT_FALSE(dominates(a, b)) << label;
    }
    // Every feasible design left off the front is dominated by a member.
    for (const auto& c : enumerate_candidates(req)) {
      if (!c.feasible()) continue;
      bool on_front = std::any_of(r.pareto_front.begin(), r.pareto_front.end(), [&](const auto& f) {
        return f.config == c.config && f.fabric == c.fabric && f.layers == c.layers;
      });
      if (on_front) continue;
      bool covered = std::any_of(r.pareto_front.begin(), r.pareto_front.end(),
                                 [&](const auto& f) { return dominates(f, c); });
      EXPECT_TRUE(covered) << label << " " << c.config << " " << c.fabric << " x" << c.layers;
    }
    for (std::size_t k = 1; k < r.pareto_front.size(); ++k)
      EXPECT_TRUE(tie_break_less(r.pareto_front[k - 1], r.pareto_front[k])) << label;
  }
  // the generator should exercise both outcomes
  EXPECT_GT(feasible_sets, 5);
  EXPECT_LT(feasible_sets, 45);
}
