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

#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "lgcert/adversary.hpp"
#include "lgcert/arrays.hpp"
#include "lgcert/fourier.hpp"
#include "lgcert/general.hpp"
#include "lgcert/io.hpp"
#include "lgcert/lgsolver.hpp"
#include "lgcert/structures.hpp"
#include "lgcert/witnesses.hpp"

namespace lgcert {

inline constexpr int kConfigSchema = 1;

enum class Suite { duality, witnesses, arrays, adversary, fourier, general, all };

inline std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::duality: return "duality";
    case Suite::witnesses: return "witnesses";
    case Suite::arrays: return "arrays";
    case Suite::adversary: return "adversary";
    case Suite::fourier: return "fourier";
    case Suite::general: return "general";
    case Suite::all: return "all";
  }
  return "?";
}

inline Suite parse_suite(std::string_view s) {
  for (Suite v : {Suite::duality, Suite::witnesses, Suite::arrays, Suite::adversary, Suite::fourier,
                  Suite::general, Suite::all}) {
    if (s == to_string(v)) return v;
  }
  throw ParameterError("unknown suite '" + std::string(s) + "'");
}

struct StructureSpec {
  StructureKind kind = StructureKind::ksubset;
  std::vector<int> params;
  CertificateStructure build() const { return build_named_structure(kind, params); }
  std::string label() const {
    std::string s(to_string(kind));
    s += "(";
    for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "," : "") + std::to_string(params[i]);
    return s + ")";
  }
};

struct ExperimentConfig {
  Suite suite = Suite::all;
  std::uint64_t seed = 0;
  std::optional<StructureSpec> structure;  // overrides the per-suite defaults
  SolverParams solver;
  int q = 8;
  std::vector<int> general_p = {16, 32, 64};
  std::vector<int> bias_p = {1009, 10007};
  double bias_delta = 0.5;
  int bias_seeds = 3;
  std::vector<int> triangle_n = {5, 6};
  std::string out_dir = "results";
  bool parallel = false;

  // Normalized document; its hash keys the results directory.
  json to_json() const {
    json j = {{"schema", kConfigSchema}, {"suite", std::string(to_string(suite))}, {"seed", seed}};
    if (structure) {
      j["structure"] = {{"kind", std::string(to_string(structure->kind))}, {"params", structure->params}};
    } else {
      j["structure"] = nullptr;
    }
    j["solver"] = {{"tolerance", solver.tolerance}, {"max_iterations", solver.max_iterations}};
    j["instance"] = {{"q", q}, {"p", general_p}};
    j["fourier"] = {{"p", bias_p}, {"delta", bias_delta}, {"seeds", bias_seeds}};
    j["witnesses"] = {{"triangle_n", triangle_n}};
    j["output"] = {{"dir", out_dir}};
    return j;
  }

  // The output directory and the parallel flag do not change results.
  std::uint64_t hash() const {
    json j = to_json();
    j.erase("output");
    return Fnv1a().add(j.dump()).value();
  }
};

struct ValidatedConfig {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value(); }
};

namespace detail {

inline bool runs(Suite selected, Suite s) { return selected == Suite::all || selected == s; }

inline StructureSpec default_structure(Suite s) {
  switch (s) {
    case Suite::general: return {StructureKind::hidden_shift, {2}};
    default: return {StructureKind::ksubset, {3, 2}};
  }
}

}  // namespace detail

// Parses and checks a config document against every cap used by the
// selected suites. Missing fields take defaults.
inline ValidatedConfig validate_config(const json& doc) {
  ValidatedConfig out;
  ExperimentConfig c;
  auto& err = out.errors;
  auto field = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const json::exception& e) {
      err.push_back(std::string(what) + ": " + e.what());
    } catch (const Error& e) {
      err.push_back(std::string(what) + ": " + e.what());
    }
  };
  if (!doc.is_object()) {
    err.push_back("config: expected a JSON object");
    return out;
  }
  field("schema", [&] {
    int v = doc.value("schema", kConfigSchema);
    if (v != kConfigSchema) throw ParameterError("unsupported schema version " + std::to_string(v));
  });
  field("suite", [&] { c.suite = parse_suite(doc.value("suite", std::string("all"))); });
  field("seed", [&] { c.seed = doc.value("seed", std::uint64_t{0}); });
  field("structure", [&] {
    if (doc.contains("structure") && !doc["structure"].is_null()) {
      const auto& s = doc["structure"];
      c.structure = StructureSpec{parse_structure_kind(s.at("kind").get<std::string>()),
                                  s.at("params").get<std::vector<int>>()};
    }
  });
  field("solver", [&] {
    if (doc.contains("solver")) {
      const auto& s = doc["solver"];
      c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
      c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
    }
    c.solver.seed = c.seed;
    c.solver.validate();
  });
  field("instance", [&] {
    if (doc.contains("instance")) {
      const auto& s = doc["instance"];
      c.q = s.value("q", c.q);
      if (s.contains("p")) c.general_p = s["p"].get<std::vector<int>>();
    }
  });
  field("fourier", [&] {
    if (doc.contains("fourier")) {
      const auto& s = doc["fourier"];
      if (s.contains("p")) c.bias_p = s["p"].get<std::vector<int>>();
      c.bias_delta = s.value("delta", c.bias_delta);
      c.bias_seeds = s.value("seeds", c.bias_seeds);
    }
    for (int p : c.bias_p) {
      if (p < 2) throw ParameterError("fourier.p entries must be >= 2");
    }
    if (!(c.bias_delta > 0 && c.bias_delta < 1)) throw ParameterError("fourier.delta must lie in (0, 1)");
    if (c.bias_seeds < 1) throw ParameterError("fourier.seeds must be >= 1");
  });
  field("witnesses", [&] {
    if (doc.contains("witnesses")) {
      c.triangle_n = doc["witnesses"].value("triangle_n", c.triangle_n);
    }
    for (int n : c.triangle_n) {
      if (n < 3 || n > 7) {
        throw CapacityError("witnesses.triangle_n = " + std::to_string(n) +
                            " outside [3, 7] (edge lattice cap 2^" + std::to_string(kLatticeCap) + ")");
      }
    }
  });
  field("output", [&] {
    if (doc.contains("output")) c.out_dir = doc["output"].value("dir", c.out_dir);
  });
  if (!err.empty()) return out;

  // Caps of the structure-dependent suites.
  auto spec_for = [&](Suite s) { return c.structure.value_or(detail::default_structure(s)); };
  if (detail::runs(c.suite, Suite::duality) || detail::runs(c.suite, Suite::adversary)) {
    field("structure", [&] {
      auto cert = spec_for(Suite::duality).build();
      require_lattice(cert.n());
    });
  }
  if (detail::runs(c.suite, Suite::arrays) || detail::runs(c.suite, Suite::adversary)) {
    field("instance.q", [&] {
      auto cert = spec_for(Suite::arrays).build();
      for (int m = 0; m < cert.size(); ++m) {
        if (cert[m].generator_count() != 1) {
          throw StructuralError(spec_for(Suite::arrays).label() +
                                " is not generated by single sets; bounded instances need one generator per certificate");
        }
      }
      if (c.q < 2 * cert.size()) {
        throw ParameterError("q = " + std::to_string(c.q) + " < 2|C| = " + std::to_string(2 * cert.size()) +
                             " (bounded instances need q >= 2|C|)");
      }
      checked_power(c.q, cert.n(), kInputCap, "instance inputs q^n");
    });
  }
  if (detail::runs(c.suite, Suite::general)) {
    field("instance.p", [&] {
      auto cert = spec_for(Suite::general).build();
      require_lattice(cert.n());
      int ell = 0;
      for (const auto& m : cert.certificates()) ell = std::max(ell, m.generator_count());
      for (int p : c.general_p) {
        if (p < 2 || std::lround(static_cast<double>(p) / (2.0 * ell * cert.size())) < 1) {
          throw ParameterError("p = " + std::to_string(p) + " gives round(p / (2 ell |C|)) = 0");
        }
      }
    });
  }
  if (err.empty()) out.config = c;
  return out;
}

enum class Relation { at_most, at_least };

struct CheckRecord {
  std::string id;
  std::string anchor;  // the claim being checked, or "plumbing"
  double measured = 0;
  Relation relation = Relation::at_most;
  double bound = 0;
  bool pass = false;
  std::string note;
};

inline CheckRecord make_check(std::string id, std::string anchor, double measured, Relation rel,
                              double bound, std::string note = {}) {
  bool pass = rel == Relation::at_most ? measured <= bound : measured >= bound;
  if (std::isnan(measured)) pass = false;
  return {std::move(id), std::move(anchor), measured, rel, bound, pass, std::move(note)};
}

struct RunReport {
  std::string config_hash;
  Suite suite = Suite::all;
  std::vector<CheckRecord> records;
  double seconds = 0;

  bool passed() const {
    for (const auto& r : records) {
      if (!r.pass) return false;
    }
    return !records.empty();
  }

  std::string csv() const {
    std::string out = "id,anchor,measured,relation,bound,pass,note\n";
    for (const auto& r : records) {
      out += csv_escape(r.id) + "," + csv_escape(r.anchor) + "," + format_double(r.measured) + "," +
             (r.relation == Relation::at_most ? "<=" : ">=") + "," + format_double(r.bound) + "," +
             (r.pass ? "pass" : "fail") + "," + csv_escape(r.note) + "\n";
    }
    return out;
  }

  json to_json() const {
    json recs = json::array();
    for (const auto& r : records) {
      recs.push_back({{"id", r.id},
                      {"anchor", r.anchor},
                      {"measured", r.measured},
                      {"relation", r.relation == Relation::at_most ? "<=" : ">="},
                      {"bound", r.bound},
                      {"pass", r.pass},
                      {"note", r.note}});
    }
    return {{"config_hash", config_hash},
            {"suite", std::string(to_string(suite))},
            {"passed", passed()},
            {"records", recs}};
  }
};

inline json environment_fingerprint() {
  return {{"compiler", __VERSION__},
          {"cplusplus", static_cast<long>(__cplusplus)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"pointer_bits", static_cast<int>(sizeof(void*) * 8)}};
}

namespace detail {

using CheckFn = std::function<std::vector<CheckRecord>()>;

struct NamedCheck {
  std::string id;
  std::string anchor;
  CheckFn fn;
};

inline std::vector<NamedCheck> duality_checks(const ExperimentConfig& c) {
  std::vector<StructureSpec> specs;
  if (c.structure) {
    specs.push_back(*c.structure);
  } else {
    specs = {{StructureKind::ksubset, {2, 1}}, {StructureKind::ksubset, {3, 1}},
             {StructureKind::ksubset, {4, 1}}, {StructureKind::hidden_shift, {2}}};
  }
  std::vector<NamedCheck> out;
  for (const auto& spec : specs) {
    std::string id = "duality." + spec.label();
    out.push_back({id, "learning graph primal and dual optima coincide", [spec, c, id] {
                     auto rep = duality_report(spec.build(), c.solver);
                     std::string note = "primal=" + format_double(rep.primal) + " dual=" + format_double(rep.dual);
                     return std::vector<CheckRecord>{
                         make_check(id + ".weak", "weak duality: dual objective <= primal objective",
                                    rep.dual - rep.primal, Relation::at_most, 1e-6, note),
                         make_check(id + ".gap", "learning graph primal and dual optima coincide", rep.gap,
                                    Relation::at_most, 0.02, note)};
                   }});
  }
  return out;
}

inline std::vector<NamedCheck> witness_checks(const ExperimentConfig& c) {
  std::vector<NamedCheck> out;
  for (auto [n, k] : std::vector<std::pair<int, int>>{{4, 1}, {8, 1}, {6, 2}, {9, 2}, {8, 3}}) {
    std::string id = "witness.ksubset(" + std::to_string(n) + "," + std::to_string(k) + ")";
    out.push_back({id, "k-subset witness objective n^{k/(k+1)}", [n, k, id] {
                     auto w = ksubset_witness(n, k);
                     double want = std::pow(static_cast<double>(n), static_cast<double>(k) / (k + 1));
                     double margin = dual_feasibility_margin(build_ksubset(n, k), w);
                     return std::vector<CheckRecord>{
                         make_check(id + ".objective", "k-subset witness objective n^{k/(k+1)}",
                                    std::abs(dual_objective(w) - want), Relation::at_most, 1e-9),
                         make_check(id + ".margin", "k-subset witness arc constraint bounded by a constant",
                                    margin, Relation::at_most, 8.0)};
                   }});
  }
  for (int n : {2, 4, 8}) {
    std::string id = "witness.hidden_shift(" + std::to_string(n) + ")";
    out.push_back({id, "hidden shift witness objective n^{1/3}", [n, id] {
                     auto w = hidden_shift_witness(n);
                     double margin = dual_feasibility_margin(build_hidden_shift(n), w);
                     return std::vector<CheckRecord>{
                         make_check(id + ".objective", "hidden shift witness objective n^{1/3}",
                                    std::abs(dual_objective(w) - std::cbrt(static_cast<double>(n))),
                                    Relation::at_most, 1e-9),
                         make_check(id + ".margin", "hidden shift witness arc constraint at most 2", margin,
                                    Relation::at_most, 2.0 + 1e-9)};
                   }});
  }
  for (int n : c.triangle_n) {
    std::string id = "witness.triangle(" + std::to_string(n) + ")";
    out.push_back({id, "triangle witness objective sqrt(C(n,3)) n^{-3/14}", [n, id] {
                     TriangleWitnessModel model(n);
                     auto scan = feasibility_scan(model.structure(), model);
                     const double h = std::pow(static_cast<double>(n), -3.0 / 14.0);
                     double want = std::sqrt(static_cast<double>(binomial(n, 3))) * h;
                     std::vector<double> a0(model.cert_count());
                     model.fill(Subset{}, a0);
                     double a0_err = 0;
                     for (double v : a0) a0_err = std::max(a0_err, std::abs(v - h));
                     const double log_n = std::log2(static_cast<double>(n));
                     return std::vector<CheckRecord>{
                         make_check(id + ".objective", "triangle witness objective sqrt(C(n,3)) n^{-3/14}",
                                    std::abs(dual_objective(model) - want), Relation::at_most, 1e-9),
                         make_check(id + ".alpha_empty", "triangle witness alpha_empty(M) = n^{-3/14}", a0_err,
                                    Relation::at_most, 1e-12),
                         make_check(id + ".margin", "triangle witness arc constraint is O(log n)", scan.margin,
                                    Relation::at_most, 100 * log_n,
                                    "margin/log2(n)=" + format_double(scan.margin / log_n))};
                   }});
  }
  return out;
}

inline std::vector<NamedCheck> array_checks(const ExperimentConfig& c) {
  std::vector<NamedCheck> out;
  out.push_back({"oa.sum_arrays", "sum arrays have strength k-1", [] {
                   int failures = 0;
                   for (int q = 2; q <= 16; ++q) {
                     for (int k = 1; k <= 3; ++k) failures += verify_orthogonal_array(sum_array(q, k)).ok ? 0 : 1;
                   }
                   return std::vector<CheckRecord>{make_check("oa.sum_arrays", "sum arrays have strength k-1",
                                                              failures, Relation::at_most, 0,
                                                              "q in [2,16], k in [1,3]")};
                 }});
  out.push_back({"oa.planted", "orthogonal array definition", [] {
                   auto rows = sum_array(5, 3).rows();
                   rows.pop_back();
                   auto r = verify_orthogonal_array(OrthogonalArray(5, 3, rows));
                   double detected = (!r.ok && r.counterexample) ? 1.0 : 0.0;
                   return std::vector<CheckRecord>{make_check("oa.planted", "orthogonal array definition", detected,
                                                              Relation::at_least, 1.0,
                                                              "one row removed from sum_array(5,3)")};
                 }});
  auto spec = c.structure.value_or(default_structure(Suite::arrays));
  const int q = c.q;
  std::string id = "instance." + spec.label() + ".q" + std::to_string(q);
  out.push_back({id, "negative set holds at least half the inputs", [spec, q, id] {
                   auto inst = build_bounded_instance(spec.build(), q);
                   std::vector<CheckRecord> recs;
                   const double total = static_cast<double>(inst.input_count());
                   double union_bound = total;
                   for (int m = 0; m < inst.cert().size(); ++m) union_bound -= inst.positives(m).size();
                   recs.push_back(make_check(id + ".y_size", "negative set holds at least half the inputs",
                                             inst.negatives().size(), Relation::at_least, total / 2));
                   recs.push_back(make_check(id + ".union_bound", "|Y| >= q^n - sum_M |X_M|",
                                             inst.negatives().size(), Relation::at_least, union_bound));
                   for (int m = 0; m < inst.cert().size(); ++m) {
                     auto chk = verify_orthogonality_property(inst, m);
                     std::string note = chk.ok ? "" : "violated at S=" + chk.violation->s.to_string();
                     recs.push_back(make_check(id + ".orthogonality.M" + std::to_string(m),
                                               "positive sets project uniformly outside M", chk.ok ? 0.0 : 1.0,
                                               Relation::at_most, 0.0, note));
                   }
                   return recs;
                 }});
  return out;
}

inline DualWitness pipeline_witness(const CertificateStructure& cert, const ExperimentConfig& c) {
  if (cert.kind() == StructureKind::ksubset) {
    return normalize_witness(ksubset_witness(cert.params()[0], cert.params()[1]), cert);
  }
  if (cert.kind() == StructureKind::hidden_shift) return hidden_shift_witness(cert.params()[0]);
  return normalize_witness(solve_dual(cert, c.solver).witness, cert);
}

inline std::vector<NamedCheck> adversary_checks(const ExperimentConfig& c) {
  auto spec = c.structure.value_or(default_structure(Suite::adversary));
  std::string id = "adversary." + spec.label() + ".q" + std::to_string(c.q);
  return {{id, "adversary bound from the learning graph witness", [spec, c, id] {
             auto cert = spec.build();
             auto inst = build_bounded_instance(cert, c.q);
             auto w = pipeline_witness(cert, c);
             auto adv = adv_ratio(inst, w);
             std::vector<CheckRecord> recs;
             recs.push_back(make_check(id + ".u_gamma_v", "u*Gamma v = sqrt(|Y|/q^n sum alpha_empty^2)",
                                       std::abs(adv.u_gamma_v - adv.u_gamma_v_expected), Relation::at_most, 1e-9));
             recs.push_back(make_check(id + ".gamma_norm", "||Gamma|| >= sqrt(|Y|/q^n) * witness objective",
                                       adv.gamma_norm, Relation::at_least,
                                       std::sqrt(adv.negative_fraction) * adv.witness_objective - 1e-9));
             int k = lmi_partition(cert).k;
             double worst_part = 0;
             for (int j = 1; j <= inst.n(); ++j) {
               auto b = bounded_norm_certificates(inst, w, j);
               for (double v : b.part_norms) worst_part = std::max(worst_part, v);
             }
             recs.push_back(make_check(id + ".part_norms", "each ||Gamma^_i|| <= 1", worst_part, Relation::at_most,
                                       1 + 1e-6));
             recs.push_back(make_check(id + ".delta_norms", "max_j ||Gamma o Delta_j|| <= 2k", adv.max_delta,
                                       Relation::at_most, 2.0 * k + 1e-6));
             recs.push_back(make_check(id + ".ratio", "adversary ratio is a constant fraction of the objective",
                                       adv.ratio, Relation::at_least, 0.25 * adv.witness_objective,
                                       "objective=" + format_double(adv.witness_objective)));
             return recs;
           }}};
}

inline std::vector<NamedCheck> fourier_checks(const ExperimentConfig& c) {
  std::vector<NamedCheck> out;
  for (int p : c.bias_p) {
    for (int s = 0; s < c.bias_seeds; ++s) {
      std::string id = "fourier.bias.p" + std::to_string(p) + ".seed" + std::to_string(c.seed + s);
      const std::uint64_t seed = c.seed + s;
      const double delta = c.bias_delta;
      out.push_back({id, "random sets have Fourier bias O(sqrt(log p / p))", [p, seed, delta, id] {
                       auto u = random_low_bias_set(p, delta, seed);
                       return std::vector<CheckRecord>{
                           make_check(id, "random sets have Fourier bias O(sqrt(log p / p))", u.bias,
                                      Relation::at_most, 4 * std::sqrt(std::log(p) / p),
                                      "|U|=" + std::to_string(u.elements.size()))};
                     }});
    }
    std::string id = "fourier.exact.p" + std::to_string(p);
    out.push_back({id, "Fourier bias of Z_p is 0 and of a point is 1/p", [p, id] {
                     std::vector<int> all(p);
                     for (int i = 0; i < p; ++i) all[i] = i;
                     return std::vector<CheckRecord>{
                         make_check(id + ".full", "Fourier bias of Z_p is 0", fourier_bias(all, p), Relation::at_most,
                                    1e-12),
                         make_check(id + ".point", "Fourier bias of a point is 1/p",
                                    std::abs(fourier_bias(std::vector<int>{0}, p) - 1.0 / p), Relation::at_most,
                                    1e-12)};
                   }});
  }
  const std::uint64_t seed = c.seed;
  out.push_back({"zeta.p7", "inner products of restricted characters", [seed] {
                   CertificateStructure cert(3, {Certificate({Subset::of({1, 2})})});
                   auto g = make_general_instance(cert, 7, random_subset(7, 2, seed));
                   auto st = check_zeta_claim(g, 0, 0);
                   return std::vector<CheckRecord>{
                       make_check("zeta.p7.equal", "xi = delta when w = w'", st.max_equal_error, Relation::at_most,
                                  1e-12),
                       make_check("zeta.p7.unrelated", "xi = 0 when w' is not a shift of w", st.max_unrelated_abs,
                                  Relation::at_most, 1e-12),
                       make_check("zeta.p7.shifted", "|xi| <= bias when w' is a shift of w", st.max_shifted_abs,
                                  Relation::at_most, st.bias + 1e-12),
                       make_check("zeta.p7.brute_fast", "brute and fast inner products agree",
                                  st.max_brute_fast_diff, Relation::at_most, 1e-10)};
                 }});
  return out;
}

inline DualWitness general_witness(const CertificateStructure& cert, const ExperimentConfig& c) {
  if (cert.kind() == StructureKind::hidden_shift) return hidden_shift_witness(cert.params()[0]);
  if (cert.kind() == StructureKind::ksubset) {
    return normalize_witness(ksubset_witness(cert.params()[0], cert.params()[1]), cert);
  }
  return normalize_witness(solve_dual(cert, c.solver).witness, cert);
}

inline std::vector<NamedCheck> general_checks(const ExperimentConfig& c) {
  auto spec = c.structure.value_or(default_structure(Suite::general));
  std::string id = "general." + spec.label();
  return {{id, "||B~_M - B^_M|| tends to 0 as p grows", [spec, c, id] {
             auto cert = spec.build();
             auto w = general_witness(cert, c);
             std::vector<CheckRecord> recs;
             std::vector<std::vector<double>> gaps(cert.size());
             for (int p : c.general_p) {
               auto g = build_general_instance(cert, p, c.seed);
               for (int m = 0; m < cert.size(); ++m) {
                 auto r = btilde_bhat_gap_max(g, w, m);
                 gaps[m].push_back(r.gap);
                 recs.push_back(make_check(id + ".p" + std::to_string(p) + ".M" + std::to_string(m),
                                           "off-diagonal blocks bounded by n^ell (bias/delta) max beta^2", r.gap,
                                           Relation::at_most, r.bound,
                                           "bias=" + format_double(g.u.bias) + " delta=" + format_double(g.delta)));
               }
             }
             for (int m = 0; m < cert.size(); ++m) {
               double worst_step = -std::numeric_limits<double>::infinity();
               for (std::size_t t = 1; t < gaps[m].size(); ++t) worst_step = std::max(worst_step, gaps[m][t] - gaps[m][t - 1]);
               if (gaps[m].size() > 1) {
                 recs.push_back(make_check(id + ".decreasing.M" + std::to_string(m),
                                           "||B~_M - B^_M|| decreases along the p ladder", worst_step,
                                           Relation::at_most, -1e-15, "largest step gap[t] - gap[t-1]"));
               }
             }
             return recs;
           }}};
}

inline std::vector<NamedCheck> suite_checks(const ExperimentConfig& c) {
  std::vector<NamedCheck> all;
  auto add = [&](std::vector<NamedCheck> v) {
    for (auto& x : v) all.push_back(std::move(x));
  };
  if (runs(c.suite, Suite::duality)) add(duality_checks(c));
  if (runs(c.suite, Suite::witnesses)) add(witness_checks(c));
  if (runs(c.suite, Suite::arrays)) add(array_checks(c));
  if (runs(c.suite, Suite::adversary)) add(adversary_checks(c));
  if (runs(c.suite, Suite::fourier)) add(fourier_checks(c));
  if (runs(c.suite, Suite::general)) add(general_checks(c));
  return all;
}

inline std::vector<CheckRecord> run_guarded(const NamedCheck& check) {
  try {
    return check.fn();
  } catch (const std::exception& e) {
    return {CheckRecord{check.id, check.anchor, std::nan(""), Relation::at_most, 0, false,
                        std::string("error: ") + e.what()}};
  }
}

}  // namespace detail

// Runs every check of the selected suite. A throwing check becomes a failed
// record; the rest of the suite still runs.
inline RunReport run_suite(const ExperimentConfig& c) {
  RunReport rep;
  rep.config_hash = hex_digest(c.hash());
  rep.suite = c.suite;
  auto t0 = std::chrono::steady_clock::now();
  auto checks = detail::suite_checks(c);
  if (c.parallel) {
    std::vector<std::future<std::vector<CheckRecord>>> futs;
    for (const auto& ch : checks) futs.push_back(std::async(std::launch::async, detail::run_guarded, std::cref(ch)));
    for (auto& f : futs) {
      for (auto& r : f.get()) rep.records.push_back(std::move(r));
    }
  } else {
    for (const auto& ch : checks) {
      for (auto& r : detail::run_guarded(ch)) rep.records.push_back(std::move(r));
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Writes report.csv, report.json and metadata.json under out_dir/<config
// hash>/. Timestamps and timings live only in metadata.json.
inline std::filesystem::path write_report(const RunReport& rep, const ExperimentConfig& c) {
  std::filesystem::path dir = std::filesystem::path(c.out_dir) / rep.config_hash;
  write_atomic(dir / "report.csv", rep.csv());
  write_atomic(dir / "report.json", rep.to_json().dump(2) + "\n");
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json meta = {{"config", c.to_json()},
               {"config_hash", rep.config_hash},
               {"written_at", stamp},
               {"seconds", rep.seconds},
               {"parallel", c.parallel},
               {"environment", environment_fingerprint()}};
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return dir;
}

}  // namespace lgcert
