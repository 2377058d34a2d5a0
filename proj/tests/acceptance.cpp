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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lgcert/adversary.hpp"
#include "lgcert/arrays.hpp"
#include "lgcert/fourier.hpp"
#include "lgcert/general.hpp"
#include "lgcert/lgsolver.hpp"
#include "lgcert/witnesses.hpp"

namespace lgcert {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream log;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      log << "    failed: " << what << "\n";
    }
  }
  template <typename... T>
  void note(const T&... parts) {
    log << "    ";
    (log << ... << parts);
    log << "\n";
  }
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; infinity when none is stated
  std::function<void(Outcome&)> body;
};

// Minimum of sqrt(2u + 2v) over the 1-subset n=2 program parametrized by the
// flow split a and the weight u of one first-level arc.
double grid_oracle_two() {
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia <= 400; ++ia) {
    const double a = ia / 400.0;
    const double root = a * a + (1 - a) * (1 - a);
    for (int iu = 1; iu <= 800; ++iu) {
      const double u = root + iu * 0.0025;
      const double v = (1 - a) * (1 - a) / (1 - root / u);
      best = std::min(best, std::sqrt(2 * u + 2 * v));
    }
  }
  return best;
}

void duality(Outcome& o) {
  // KKT by hand: symmetric flow 1/2 on each arc, weights 1/2, objective sqrt(2).
  const double kkt = std::sqrt(2.0);
  const double grid = grid_oracle_two();
  o.note("sqrt(2) oracle: kkt=", kkt, " grid=", grid);
  o.expect(std::abs(grid - kkt) <= 1e-3, "grid oracle agrees with the KKT value");
  std::vector<CertificateStructure> cases = {build_ksubset(2, 1), build_ksubset(3, 1), build_ksubset(4, 1),
                                             build_hidden_shift(2)};
  const char* labels[] = {"ksubset(2,1)", "ksubset(3,1)", "ksubset(4,1)", "hidden_shift(2)"};
  for (std::size_t t = 0; t < cases.size(); ++t) {
    auto r = duality_report(cases[t]);
    const std::string label = labels[t];
    o.note(label, ": primal=", r.primal, " dual=", r.dual, " gap=", r.gap);
    o.expect(r.dual <= r.primal + 1e-6, label + " weak duality");
    o.expect(r.gap <= 0.02, label + " relative gap <= 2%");
    if (t == 0) {
      o.expect(std::abs(r.primal - kkt) <= 1e-3, "1-subset n=2 primal = sqrt(2)");
      o.expect(std::abs(r.dual - kkt) <= 1e-3, "1-subset n=2 dual = sqrt(2)");
    }
  }
}

void ksubset(Outcome& o) {
  for (auto [n, k] : std::vector<std::pair<int, int>>{{4, 1}, {8, 1}, {6, 2}, {9, 2}, {8, 3}}) {
    auto w = ksubset_witness(n, k);
    const double want = std::pow(static_cast<double>(n), static_cast<double>(k) / (k + 1));
    const double obj = dual_objective(w);
    const double margin = dual_feasibility_margin(build_ksubset(n, k), w);
    o.note("(", n, ",", k, "): objective=", obj, " target=", want, " margin=", margin);
    o.expect(std::abs(obj - want) <= 1e-9, "objective n^{k/(k+1)}");
    o.expect(margin <= 8.0, "margin <= 8");
  }
}

void hidden_shift(Outcome& o) {
  for (int n : {2, 4, 8}) {
    auto w = hidden_shift_witness(n);
    const double obj = dual_objective(w);
    const double margin = dual_feasibility_margin(build_hidden_shift(n), w);
    o.note("n=", n, ": objective=", obj, " margin=", margin);
    o.expect(std::abs(obj - std::cbrt(static_cast<double>(n))) <= 1e-9, "objective n^{1/3}");
    o.expect(margin <= 2.0 + 1e-9, "margin <= 2");
  }
}

void triangle(Outcome& o) {
  for (int n : {5, 6}) {
    TriangleWitnessModel model(n);
    const double h = std::pow(static_cast<double>(n), -3.0 / 14.0);
    const double want = std::sqrt(static_cast<double>(binomial(n, 3))) * h;
    std::vector<double> a0(model.cert_count());
    model.fill(Subset{}, a0);
    bool exact = true;
    for (double v : a0) exact &= v == h;
    const double obj = dual_objective(model);
    const double margin = dual_feasibility_margin(model.structure(), model);
    const double cap = 100 * std::log2(static_cast<double>(n));
    o.note("n=", n, ": objective=", obj, " target=", want, " margin=", margin, " (cap ", cap, ")");
    o.expect(std::abs(obj - want) <= 1e-9, "objective sqrt(C(n,3)) n^{-3/14}");
    o.expect(exact, "alpha_empty(M) = n^{-3/14} exactly");
    o.expect(std::isfinite(margin) && margin <= cap, "margin finite and <= 100 log2 n");
  }
}

void arrays(Outcome& o) {
  int checked = 0;
  for (int q = 2; q <= 16; ++q) {
    for (int k = 1; k <= 3; ++k) {
      auto r = verify_orthogonal_array(sum_array(q, k));
      ++checked;
      o.expect(r.ok, "sum_array(" + std::to_string(q) + "," + std::to_string(k) + ") is orthogonal");
    }
  }
  auto rows = sum_array(5, 3).rows();
  auto removed = rows[7];
  rows.erase(rows.begin() + 7);
  rows.push_back({removed[0], removed[1], (removed[2] + 1) % 5});
  auto r = verify_orthogonal_array(OrthogonalArray(5, 3, rows));
  o.note(checked, " sum arrays verified; planted violation ok=", r.ok,
         " counterexample=", r.counterexample ? "yes" : "no");
  o.expect(!r.ok && r.counterexample.has_value(), "planted violation detected with a counterexample");
}

void orthogonality(Outcome& o) {
  auto inst = build_bounded_instance(build_ksubset(3, 2), 8);
  for (int m = 0; m < inst.cert().size(); ++m) {
    auto r = verify_orthogonality_property(inst, m);
    o.note("M", m, ": ", r.sets_checked, " sets checked, ok=", r.ok);
    o.expect(r.ok, "orthogonality holds for M" + std::to_string(m));
  }
  // One certificate generated by {1,2} and {2,3}; arrays x1 = x2, x2 = x3.
  CertificateStructure chain(3, {Certificate({Subset::of({1, 2}), Subset::of({2, 3})})});
  std::vector<std::vector<int>> diag;
  for (int a = 0; a < 3; ++a) diag.push_back({a, a});
  OrthogonalArray d(3, 2, diag);
  auto bad = HardInstance::from_arrays(chain, 3, {{d, d}});
  auto r = verify_orthogonality_property(bad, 0);
  o.expect(!r.ok && r.violation.has_value(), "chain counterexample flagged");
  if (r.violation) {
    o.note("chain counterexample flagged at S=", r.violation->s.to_string());
    o.expect(r.violation->s == Subset::of({1, 3}), "violation at S = {1,3}");
  }
}

void negatives(Outcome& o) {
  auto inst = build_bounded_instance(build_ksubset(3, 2), 8);
  const std::size_t y = inst.negatives().size();
  // Events x_a + x_b = 0 for the three pairs: 3*64 singles, 3*8 pairs, 2 triples.
  const int ie = 512 - (3 * 64 - 3 * 8 + 2);
  o.note("|Y|=", y, " inclusion-exclusion=", ie);
  o.expect(y == 342, "|Y| = 342");
  o.expect(static_cast<int>(y) == ie, "inclusion-exclusion agrees");
  o.expect(y >= 256, "|Y| >= q^n / 2");
}

void adversary(Outcome& o) {
  auto c = build_ksubset(3, 2);
  auto inst = build_bounded_instance(c, 8);
  auto w = normalize_witness(ksubset_witness(3, 2), c);
  auto tilde = assemble_tilde(w, 8);
  o.note("Gamma~ is ", tilde.rows(), "x", tilde.cols());
  o.expect(tilde.rows() == 1536 && tilde.cols() == 512, "dense shape 1536x512");
  auto r = adv_ratio(inst, w);
  o.note("u*Gamma v=", r.u_gamma_v, " expected=", r.u_gamma_v_expected);
  o.expect(std::abs(r.u_gamma_v - r.u_gamma_v_expected) <= 1e-9, "test vector identity");
  double worst_part = 0;
  for (int j = 1; j <= 3; ++j) {
    auto b = bounded_norm_certificates(inst, w, j);
    for (double v : b.part_norms) worst_part = std::max(worst_part, v);
  }
  o.note("max ||Gamma^_i||=", worst_part, " max_j ||Gamma o Delta_j||=", r.max_delta, " ||Gamma||=", r.gamma_norm,
         " ratio=", r.ratio, " witness objective=", r.witness_objective);
  o.expect(worst_part <= 1 + 1e-6, "every ||Gamma^_i|| <= 1");
  o.expect(r.max_delta <= 4 + 1e-6, "max_j ||Gamma o Delta_j|| <= 4");
  o.expect(r.ratio >= 0.25 * r.witness_objective, "ratio >= objective / 4");
}

void hadamard(Outcome& o) {
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> g;
  int violations = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 2 + static_cast<int>(uniform_below(rng, 4));
    const int rows = 4 + static_cast<int>(uniform_below(rng, 40));
    const int cols = 4 + static_cast<int>(uniform_below(rng, 40));
    Eigen::MatrixXd a(rows, cols);
    for (auto& x : a.reshaped()) x = g(rng);
    std::vector<int> rs(rows), cs(cols);
    for (int& s : rs) s = static_cast<int>(uniform_below(rng, q));
    for (int& s : cs) s = static_cast<int>(uniform_below(rng, q));
    const double lhs = spectral_norm(hadamard_delta(a, rs, cs)).norm;
    const double rhs = spectral_norm(a).norm;
    worst = std::max(worst, lhs / rhs);
    if (lhs > 2 * rhs + 1e-9) ++violations;
  }
  o.note("violations=", violations, " worst ratio=", worst);
  o.expect(violations == 0, "no violations");
}

void fourier(Outcome& o) {
  for (int p : {1009, 10007}) {
    for (std::uint64_t seed : {0, 1, 2}) {
      auto u = random_low_bias_set(p, 0.5, seed);
      const double cap = 4 * std::sqrt(std::log(p) / p);
      o.note("p=", p, " seed=", seed, ": bias=", u.bias, " cap=", cap);
      o.expect(u.bias <= cap, "bias <= 4 sqrt(ln p / p)");
    }
    std::vector<int> all(p);
    for (int i = 0; i < p; ++i) all[i] = i;
    const double full = fourier_bias(all, p);
    const double point = fourier_bias(std::vector<int>{0}, p);
    o.note("p=", p, ": bias(Z_p)=", full, " bias({0})-1/p=", point - 1.0 / p);
    o.expect(full <= 1e-12, "bias(Z_p) = 0");
    o.expect(std::abs(point - 1.0 / p) <= 1e-12, "bias({0}) = 1/p");
  }
}

void zeta(Outcome& o) {
  CertificateStructure cert(3, {Certificate({Subset::of({1, 2})})});
  for (std::uint64_t seed : {0, 1, 2}) {
    auto g = make_general_instance(cert, 7, random_subset(7, 2, seed));
    auto st = check_zeta_claim(g, 0, 0);
    o.note("seed=", seed, ": |xi-delta|<=", st.max_equal_error, " unrelated<=", st.max_unrelated_abs,
           " shifted<=", st.max_shifted_abs, " (bias ", st.bias, ") brute-fast<=", st.max_brute_fast_diff);
    o.expect(st.equal_pairs > 0 && st.shifted_pairs > 0 && st.unrelated_pairs > 0, "all three cases occur");
    o.expect(st.holds(1e-12, 1e-10), "claim holds");
  }
}

void general(Outcome& o) {
  auto cert = build_hidden_shift(2);
  auto w = hidden_shift_witness(2);
  std::vector<std::vector<double>> gaps(cert.size());
  for (int p : {16, 32, 64}) {
    auto g = build_general_instance(cert, p, 0);
    for (int m = 0; m < cert.size(); ++m) {
      auto r = btilde_bhat_gap_max(g, w, m);
      gaps[m].push_back(r.gap);
      o.note("p=", p, " M", m, ": gap=", r.gap, " bound=", r.bound);
      o.expect(r.gap <= r.bound, "gap <= n^ell (bias/delta) max beta^2");
    }
  }
  for (int m = 0; m < cert.size(); ++m) {
    for (std::size_t t = 1; t < gaps[m].size(); ++t) {
      o.expect(gaps[m][t] < gaps[m][t - 1], "gap strictly decreasing for M" + std::to_string(m));
    }
  }

  // B^ entries against direct enumeration of X_M at p = 8.
  auto g = build_general_instance(cert, 8, 0);
  double worst = 0;
  std::size_t compared = 0;
  for (int j : {1, 2}) {
    auto beta = delta_beta(w, j);
    for (int m = 0; m < cert.size(); ++m) {
      std::vector<ZTuple> reps;
      std::vector<std::pair<ZTuple, ZTuple>> pairs;
      for_each_class_type(g, m, [&](const ZTuple& v) {
        if (pairs.size() >= 12) return;
        auto cls = equivalence_class(g, beta, m, v);
        if (cls.members.size() < 2) return;
        pairs.push_back({cls.members[0], cls.members[1]});
        pairs.push_back({cls.members[0], cls.members[0]});
        reps.push_back(cls.members[0]);
      });
      for (std::size_t t = 1; t < reps.size(); ++t) pairs.push_back({reps[t - 1], reps[t]});
      auto brute = bhat_entries_brute(g, beta, m, pairs);
      for (std::size_t t = 0; t < pairs.size(); ++t) {
        worst = std::max(worst, std::abs(brute[t] - bhat_entry(g, beta, m, pairs[t].first, pairs[t].second)));
      }
      compared += pairs.size();
    }
  }
  o.note("p=8: ", compared, " B^ entries brute-verified, max diff=", worst);
  o.expect(compared > 0, "entries compared");
  o.expect(worst <= 1e-10, "brute and fast B^ entries agree");
}

}  // namespace
}  // namespace lgcert

int main() {
  using namespace lgcert;
  const double none = std::numeric_limits<double>::infinity();
  std::vector<Criterion> criteria = {
      {1, "duality gap on small structures", 60, duality},
      {2, "k-subset witness objective and margin", 120, ksubset},
      {3, "hidden shift witness objective and margin", none, hidden_shift},
      {4, "triangle witness objective and margin", 600, triangle},
      {5, "orthogonal arrays", none, arrays},
      {6, "orthogonality property", none, orthogonality},
      {7, "negative input count", none, negatives},
      {8, "adversary pipeline norms", 120, adversary},
      {9, "Delta_j Hadamard bound on random matrices", none, hadamard},
      {10, "Fourier bias", none, fourier},
      {11, "restricted character inner products", none, zeta},
      {12, "general construction gap", 300, general},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.time_limit) {
      o.expect(false, "runtime " + std::to_string(secs) + "s over " + std::to_string(c.time_limit) + "s");
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s (%.2fs)\n%s", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs, o.log.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
