// Copyright 2026 The lgcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lgcert/io.hpp"
#include "lgcert/lgsolver.hpp"
#include "lgcert/witnesses.hpp"

namespace lgcert {
namespace {

CertificateStructure single_var() { return CertificateStructure(1, {Certificate({Subset::of({1})})}); }

// Independent oracle for the 1-subset structure on two variables. By symmetry
// both certificates send a fraction a directly to their sink and 1 - a
// through the other singleton; root arcs carry weight u, upper arcs v.
double grid_oracle_two() {
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia <= 400; ++ia) {
    const double a = ia / 400.0;
    const double root = a * a + (1 - a) * (1 - a);
    for (int iu = 1; iu <= 800; ++iu) {
      const double u = root + iu * 0.0025;
      const double slack = 1 - root / u;
      const double v = (1 - a) * (1 - a) / slack;
      best = std::min(best, std::sqrt(2 * u + 2 * v));
    }
  }
  return best;
}

TEST(Oracle, GridSearchGivesSqrtTwo) { EXPECT_NEAR(grid_oracle_two(), std::sqrt(2.0), 1e-3); }

TEST(FlowResiduals, SingleArc) {
  auto c = single_var();
  FlowAssignment f(1, 1);
  Arc e{Subset{}, Subset::of({1})};
  f.set(e, 0, 1.0);
  for (const auto& r : flow_residuals(c, f)) EXPECT_EQ(r.residual, 0.0);
  f.set(e, 0, 0.0);
  auto res = flow_residuals(c, f);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].subset, Subset{});
  EXPECT_EQ(res[0].residual, -1.0);
}

TEST(FlowResiduals, OneSubsetTwoVariables) {
  auto c = build_ksubset(2, 1);
  FlowAssignment f(2, 2);
  f.set({Subset{}, Subset::of({1})}, 0, 1.0);
  f.set({Subset{}, Subset::of({2})}, 1, 1.0);
  for (const auto& r : flow_residuals(c, f)) EXPECT_EQ(r.residual, 0.0);
}

TEST(FlowResiduals, RejectsNonArc) {
  FlowAssignment f(2, 1);
  EXPECT_THROW(f.set({Subset{}, Subset::of({1, 2})}, 0, 1.0), StructuralError);
  EXPECT_THROW(f.set({Subset{}, Subset::of({3})}, 0, 1.0), StructuralError);
}

TEST(PrimalConstraint, ZeroOverZeroIsZero) {
  FlowAssignment f(1, 1);
  Arc e{Subset{}, Subset::of({1})};
  f.set(e, 0, 1.0);
  EXPECT_EQ(primal_constraint_values(f, WeightAssignment(1, 1.0))[0], 1.0);
  EXPECT_TRUE(std::isinf(primal_constraint_values(f, WeightAssignment(1, 0.0))[0]));
  f.set(e, 0, 0.0);
  EXPECT_EQ(primal_constraint_values(f, WeightAssignment(1, 0.0))[0], 0.0);
}

TEST(SolvePrimal, SmallClosedForms) {
  EXPECT_NEAR(solve_primal(single_var()).objective, 1.0, 1e-6);
  auto two = solve_primal(build_ksubset(2, 1));
  EXPECT_NEAR(two.objective, std::sqrt(2.0), 1e-4);
  EXPECT_NEAR(two.objective, grid_oracle_two(), 1e-3);
  EXPECT_NEAR(solve_primal(build_ksubset(4, 1)).objective, 2.0, 1e-3);
}

TEST(SolvePrimal, SolutionIsFeasible) {
  auto c = build_hidden_shift(2);
  auto sol = solve_primal(c);
  for (const auto& r : flow_residuals(c, sol.flow)) EXPECT_NEAR(r.residual, 0.0, 1e-6);
  for (double v : primal_constraint_values(sol.flow, sol.weights)) EXPECT_LE(v, 1.0 + 1e-6);
  EXPECT_NEAR(sol.objective, std::sqrt(sol.weights.total()), 1e-12);
}

TEST(SolvePrimal, EmptySetCertificateIsFree) {
  CertificateStructure c(1, {Certificate({Subset{}}), Certificate({Subset::of({1})})});
  auto sol = solve_primal(c);
  EXPECT_NEAR(sol.objective, 1.0, 1e-6);
  auto d = solve_dual(c);
  EXPECT_EQ(d.witness(Subset{}, 0), 0.0);
  EXPECT_LE(d.objective, sol.objective + 1e-6);
}

TEST(SolvePrimal, InvariantUnderCertificateOrder) {
  SolverParams p;
  auto c = build_ksubset(4, 2);
  const double base = solve_primal(c, p).objective;
  std::mt19937_64 rng(7);
  std::vector<int> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    EXPECT_NEAR(solve_primal(c.reordered(order), p).objective, base, 2 * p.tolerance * base);
  }
}

TEST(SolverParams, Validation) {
  SolverParams p;
  p.tolerance = 0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.tolerance = 1e-6;
  p.max_iterations = 0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(SolvePrimal, IterationCapFlagsNonConvergence) {
  SolverParams p;
  p.max_iterations = 1;
  auto sol = solve_primal(build_ksubset(4, 2), p);
  EXPECT_FALSE(sol.converged);
  EXPECT_GT(sol.objective, 0);
}

TEST(DualObjective, ClosedForms) {
  DualWitness z(2, 4);
  EXPECT_EQ(dual_objective(z), 0.0);
  for (int m = 0; m < 4; ++m) z(Subset{}, m) = 1.0;
  EXPECT_EQ(dual_objective(z), 2.0);
  EXPECT_NEAR(dual_objective(ksubset_witness(8, 1)), std::sqrt(8.0), 1e-12);
}

TEST(Margin, HandCases) {
  auto c = build_ksubset(2, 1);
  EXPECT_EQ(dual_feasibility_margin(c, DualWitness(2, 2)), 0.0);
  DualWitness w(2, 2);
  w(Subset{}, 0) = 1;
  w(Subset{}, 1) = 1;
  w(Subset::of({2}), 0) = 1;
  w(Subset::of({1}), 1) = 1;
  EXPECT_EQ(dual_feasibility_margin(c, w), 1.0);
  EXPECT_LE(dual_feasibility_margin(build_ksubset(6, 2), ksubset_witness(6, 2)), 3.0);
}

TEST(Margin, ZeroConditionViolationNamesSubset) {
  auto c = build_ksubset(2, 1);
  DualWitness w(2, 2);
  w(Subset::of({1}), 0) = 0.5;
  try {
    dual_feasibility_margin(c, w);
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("{1}"), std::string::npos);
  }
}

TEST(Normalize, ScalesByRootMargin) {
  auto c = build_ksubset(2, 1);
  DualWitness w(2, 2);
  w(Subset{}, 0) = 2;  // margin 4 on the arc {} -> {1}
  auto n = normalize_witness(w, c);
  EXPECT_DOUBLE_EQ(n(Subset{}, 0), 1.0);
  DualWitness small(2, 2);
  small(Subset{}, 0) = 0.5;
  EXPECT_EQ(normalize_witness(small, c).values(), small.values());
  DualWitness zero(2, 2);
  EXPECT_EQ(normalize_witness(zero, c).values(), zero.values());
}

TEST(Normalize, PreservesZerosAndRatios) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  auto c = build_ksubset(5, 2);
  DualWitness w(5, c.size());
  for (std::uint32_t s = 0; s < 32; ++s) {
    for (int m = 0; m < c.size(); ++m) {
      if (!c[m].contains(Subset::from_mask(s))) w(Subset::from_mask(s), m) = u(rng);
    }
  }
  auto n = normalize_witness(w, c);
  EXPECT_NEAR(dual_feasibility_margin(c, n), 1.0, 1e-12);
  const double ratio = n(Subset{}, 0) / w(Subset{}, 0);
  for (std::size_t i = 0; i < w.values().size(); ++i) {
    if (w.values()[i] == 0.0) {
      EXPECT_EQ(n.values()[i], 0.0);
    } else {
      EXPECT_NEAR(n.values()[i] / w.values()[i], ratio, 1e-12);
    }
  }
}

TEST(SolveDual, SmallCases) {
  EXPECT_GE(solve_dual(single_var()).objective, 1.0 - 1e-6);
  auto two = solve_dual(build_ksubset(2, 1));
  EXPECT_GE(two.objective, std::sqrt(2.0) - 1e-3);
  EXPECT_LE(dual_feasibility_margin(build_ksubset(2, 1), two.witness), 1.0 + 1e-9);
  auto c = build_ksubset(4, 2);
  auto closed = normalize_witness(ksubset_witness(4, 2), c);
  EXPECT_GE(solve_dual(c).objective, 0.95 * dual_objective(closed));
}

TEST(Duality, GapWithinTwoPercent) {
  for (auto c : {build_ksubset(2, 1), build_ksubset(3, 1)}) {
    auto r = duality_report(c);
    EXPECT_LE(r.gap, 0.02);
    EXPECT_LE(r.dual, r.primal + 1e-6);
  }
  EXPECT_NEAR(duality_report(build_ksubset(3, 1)).primal, std::sqrt(3.0), 1e-3);
  auto h = duality_report(build_hidden_shift(2));
  EXPECT_LE(h.dual, h.primal + 1e-6);
}

// Random unit flow for certificate m: a mixture of random monotone paths,
// each stopped on entering the certificate.
std::vector<double> random_flow(const CertificateStructure& c, int m, std::mt19937_64& rng) {
  ArcIndex idx(c.n());
  std::vector<double> p(idx.size(), 0.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> mix(3);
  for (double& x : mix) x = u(rng);
  const double total = std::accumulate(mix.begin(), mix.end(), 0.0);
  std::vector<int> order(c.n());
  std::iota(order.begin(), order.end(), 1);
  for (double share : mix) {
    std::shuffle(order.begin(), order.end(), rng);
    Subset s;
    for (int j : order) {
      if (c[m].contains(s)) break;
      p[idx(s, j)] += share / total;
      s = s.with(j);
    }
  }
  return p;
}

TEST(Duality, WeakDualityOnRandomFeasiblePairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0), a(-1.0, 1.0);
  std::vector<CertificateStructure> family = {build_ksubset(3, 1), build_ksubset(3, 2), build_ksubset(4, 2),
                                              build_hidden_shift(2)};
  for (const auto& c : family) {
    ASSERT_LE(c.n(), 4);
    for (int trial = 0; trial < 20; ++trial) {
      FlowAssignment f(c.n(), c.size());
      for (int m = 0; m < c.size(); ++m) f.of(m) = random_flow(c, m, rng);
      for (const auto& r : flow_residuals(c, f)) ASSERT_NEAR(r.residual, 0.0, 1e-12);
      std::vector<double> w(f.arc_count());
      for (double& x : w) x = u(rng);
      WeightAssignment wa(w);
      double worst = 0;
      for (double v : primal_constraint_values(f, wa)) worst = std::max(worst, v);
      for (std::size_t e = 0; e < w.size(); ++e) wa[e] *= worst;
      const double primal = std::sqrt(wa.total());

      DualWitness dw(c.n(), c.size());
      for (std::uint32_t s = 0; s < dw.subset_count(); ++s) {
        for (int m = 0; m < c.size(); ++m) {
          if (!c[m].contains(Subset::from_mask(s))) dw(Subset::from_mask(s), m) = a(rng);
        }
      }
      dw = normalize_witness(dw, c);
      EXPECT_LE(dual_objective(dw), primal + 1e-9);
    }
  }
}

TEST(OptimalWeights, NeverWorseThanFeasibleWeights) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  auto c = build_ksubset(4, 2);
  for (int trial = 0; trial < 10; ++trial) {
    FlowAssignment f(c.n(), c.size());
    for (int m = 0; m < c.size(); ++m) f.of(m) = random_flow(c, m, rng);
    std::vector<double> w(f.arc_count());
    for (double& x : w) x = u(rng);
    WeightAssignment wa(w);
    double worst = 0;
    for (double v : primal_constraint_values(f, wa)) worst = std::max(worst, v);
    for (std::size_t e = 0; e < w.size(); ++e) wa[e] *= worst;
    auto fit = optimal_weights(f);
    EXPECT_LE(fit.weights.total(), wa.total() + 1e-9);
    for (double v : primal_constraint_values(f, fit.weights)) EXPECT_LE(v, 1.0 + 1e-9);
  }
}

TEST(Serialization, WitnessRoundTrip) {
  auto w = ksubset_witness(4, 2);
  auto back = witness_from_json(witness_to_json(w));
  EXPECT_EQ(back.values(), w.values());
  EXPECT_EQ(witness_hash(back), witness_hash(w));
  auto j = witness_to_json(w);
  ASSERT_FALSE(j["entries"].empty());
  const auto& e = j["entries"][0];
  EXPECT_TRUE(e.contains("subset_mask") && e.contains("cert_index") && e.contains("alpha"));
}

}  // namespace
}  // namespace lgcert
