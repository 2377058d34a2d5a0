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

// lgcert: command line front end for the certificate-structure toolkit.
//
// Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
// or parameter errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lgcert/experiment.hpp"

namespace {

using namespace lgcert;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "json";
  bool parallel = false;
};

struct StructureArgs {
  std::string kind = "ksubset";
  std::vector<int> params = {3, 2};
  std::string file;  // structure JSON, overrides kind/params

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "ksubset|triangle|collision|set_equality|hidden_shift")
        ->capture_default_str();
    app->add_option("--params", params, "comma-separated integers")->delimiter(',')->capture_default_str();
    app->add_option("--structure", file, "structure JSON file")->check(CLI::ExistingFile);
  }

  CertificateStructure build() const {
    if (!file.empty()) return structure_from_json(read_json_file(file));
    return build_named_structure(parse_structure_kind(kind), params);
  }
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

// Witness used by the adversary and general commands when none is supplied.
DualWitness default_witness(const CertificateStructure& cert, const SolverParams& solver) {
  ExperimentConfig c;
  c.solver = solver;
  return detail::pipeline_witness(cert, c);
}

ExperimentConfig load_config(const Globals& g, const std::string& suite) {
  json doc = g.config_path.empty() ? json::object() : read_json_file(g.config_path);
  if (!suite.empty()) doc["suite"] = suite;
  if (g.seed) doc["seed"] = *g.seed;
  if (!g.out_dir.empty()) doc["output"]["dir"] = g.out_dir;
  auto v = validate_config(doc);
  if (!v.ok()) {
    std::string msg = "invalid config:";
    for (const auto& e : v.errors) msg += "\n  " + e;
    throw ParameterError(msg);
  }
  auto c = *v.config;
  c.parallel = c.parallel || g.parallel;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lgcert: learning graph certificates, hard instances and adversary checks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out_dir, "results directory");
  app.add_option("--format", g.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--parallel", g.parallel, "run independent checks concurrently");

  int status = kExitPass;
  SolverParams solver;

  // structure
  auto* structure = app.add_subcommand("structure", "certificate structures")->require_subcommand(1);
  StructureArgs st_build;
  std::string st_file;
  auto* st_b = structure->add_subcommand("build", "build a named structure");
  st_build.attach(st_b);
  st_b->add_option("--file", st_file, "also write the JSON here");
  st_b->callback([&] {
    auto cert = st_build.build();
    json j = structure_to_json(cert);
    if (!st_file.empty()) write_atomic(st_file, j.dump(2) + "\n");
    emit(j);
  });
  StructureArgs st_show;
  auto* st_s = structure->add_subcommand("show", "summarize a structure");
  st_show.attach(st_s);
  st_s->callback([&] {
    auto cert = st_show.build();
    auto prof = minimal_profile(cert);
    json certs = json::array();
    for (const auto& m : cert.certificates()) {
      json gens = json::array();
      for (Subset a : m.minimal_sets()) gens.push_back(a.to_string());
      certs.push_back(gens);
    }
    emit({{"kind", std::string(to_string(cert.kind()))},
          {"n", cert.n()},
          {"certificates", cert.size()},
          {"minimal_set_counts", prof.counts},
          {"hash", hex_digest(structure_hash(cert))},
          {"minimal_sets", certs}});
  });

  // lg
  auto* lg = app.add_subcommand("lg", "learning graph programs")->require_subcommand(1);
  lg->fallthrough();
  lg->add_option("--tolerance", solver.tolerance, "relative solver tolerance")->capture_default_str();
  lg->add_option("--max-iterations", solver.max_iterations)->capture_default_str();
  StructureArgs lg_s;
  auto* lg_p = lg->add_subcommand("primal", "solve the flow/weight program");
  lg_s.attach(lg_p);
  lg_p->callback([&] {
    solver.validate();
    auto sol = solve_primal(lg_s.build(), solver);
    emit({{"objective", sol.objective},
          {"lower_bound", sol.lower_bound},
          {"residual", sol.residual},
          {"iterations", sol.iterations},
          {"converged", sol.converged}});
  });
  auto* lg_d = lg->add_subcommand("dual", "solve the witness program");
  lg_s.attach(lg_d);
  bool lg_emit_witness = false;
  lg_d->add_flag("--witness", lg_emit_witness, "include the witness entries");
  lg_d->callback([&] {
    solver.validate();
    auto sol = solve_dual(lg_s.build(), solver);
    json j = {{"objective", sol.objective}, {"iterations", sol.iterations}, {"converged", sol.converged}};
    if (lg_emit_witness) j["witness"] = witness_to_json(sol.witness);
    emit(j);
  });
  auto* lg_g = lg->add_subcommand("gap", "solve both programs and compare");
  lg_s.attach(lg_g);
  double gap_limit = 0.02;
  lg_g->add_option("--max-gap", gap_limit, "relative gap accepted")->capture_default_str();
  lg_g->callback([&] {
    solver.validate();
    auto rep = duality_report(lg_s.build(), solver);
    bool ok = rep.gap <= gap_limit;
    emit({{"primal", rep.primal},
          {"dual", rep.dual},
          {"gap", rep.gap},
          {"primal_iterations", rep.primal_iterations},
          {"dual_iterations", rep.dual_iterations},
          {"pass", ok}});
    if (!ok) status = kExitFail;
  });

  // witness
  auto* witness = app.add_subcommand("witness", "explicit dual witnesses")->require_subcommand(1);
  witness->fallthrough();
  bool measure = false;
  witness->add_flag("--measure-margin", measure, "emit n,objective,margin,margin/log2n as CSV");
  int wn = 4, wk = 1;
  std::string w_file;
  witness->add_option("--file", w_file, "also write the witness JSON here");
  auto report_witness = [&](const auto& w, const CertificateStructure& cert, int size) {
    if (measure) {
      auto scan = feasibility_scan(cert, w);
      const double obj = dual_objective(w);
      const double log_n = std::log2(static_cast<double>(size));
      std::cout << "n,objective,margin,margin_over_log2n\n"
                << size << "," << format_double(obj) << "," << format_double(scan.margin) << ","
                << format_double(log_n > 0 ? scan.margin / log_n : scan.margin) << "\n";
      return;
    }
    auto dense = DualWitness::materialize(w);
    json j = witness_to_json(dense);
    if (!w_file.empty()) write_atomic(w_file, j.dump() + "\n");
    emit(j);
  };
  auto* w_k = witness->add_subcommand("ksubset", "witness for k-subset structures");
  w_k->add_option("--n", wn)->required();
  w_k->add_option("--k", wk)->required();
  w_k->callback([&] { report_witness(ksubset_witness(wn, wk), build_ksubset(wn, wk), wn); });
  auto* w_h = witness->add_subcommand("hiddenshift", "witness for hidden shift");
  w_h->add_option("--n", wn)->required();
  w_h->callback([&] { report_witness(hidden_shift_witness(wn), build_hidden_shift(wn), wn); });
  auto* w_t = witness->add_subcommand("triangle", "witness for triangle finding (n = vertices)");
  w_t->add_option("--n", wn)->required();
  w_t->callback([&] {
    TriangleWitnessModel model(wn);
    report_witness(model, model.structure(), wn);
  });

  // oa
  auto* oa = app.add_subcommand("oa", "orthogonal arrays")->require_subcommand(1);
  int oq = 8, ok_ = 2;
  std::string oa_file;
  auto* oa_m = oa->add_subcommand("make", "sum-zero array of strength k-1");
  oa_m->add_option("--q", oq)->required();
  oa_m->add_option("--k", ok_)->required();
  oa_m->callback([&] { emit(array_to_json(sum_array(oq, ok_), std::numeric_limits<std::size_t>::max())); });
  auto* oa_v = oa->add_subcommand("verify", "check the strength condition");
  oa_v->add_option("--file", oa_file, "array JSON")->check(CLI::ExistingFile);
  oa_v->add_option("--q", oq);
  oa_v->add_option("--k", ok_);
  oa_v->callback([&] {
    auto t = oa_file.empty() ? sum_array(oq, ok_) : array_from_json(read_json_file(oa_file));
    auto r = verify_orthogonal_array(t);
    json j = {{"ok", r.ok}, {"divisible", r.divisible}, {"expected", r.expected}, {"note", r.note}};
    if (r.counterexample) {
      j["counterexample"] = {{"index", r.counterexample->index},
                             {"assignment", r.counterexample->assignment},
                             {"count", r.counterexample->count}};
    }
    emit(j);
    if (!r.ok) status = kExitFail;
  });

  // instance
  auto* instance = app.add_subcommand("instance", "bounded hard instances")->require_subcommand(1);
  StructureArgs in_s;
  int iq = 8;
  auto* in_b = instance->add_subcommand("build", "enumerate positive and negative inputs");
  in_s.attach(in_b);
  in_b->add_option("--q", iq)->capture_default_str();
  in_b->callback([&] { emit(instance_summary(build_bounded_instance(in_s.build(), iq))); });
  auto* in_v = instance->add_subcommand("verify", "check orthogonality and |Y| >= q^n/2");
  in_s.attach(in_v);
  in_v->add_option("--q", iq)->capture_default_str();
  in_v->callback([&] {
    auto inst = build_bounded_instance(in_s.build(), iq);
    json per = json::array();
    bool all_ok = true;
    for (int m = 0; m < inst.cert().size(); ++m) {
      auto chk = verify_orthogonality_property(inst, m);
      json e = {{"certificate", m}, {"ok", chk.ok}, {"sets_checked", chk.sets_checked}};
      if (chk.violation) {
        e["violation"] = {{"s", chk.violation->s.to_string()},
                          {"z", chk.violation->z},
                          {"count", chk.violation->count},
                          {"expected", chk.violation->expected}};
      }
      all_ok = all_ok && chk.ok;
      per.push_back(e);
    }
    const double half = static_cast<double>(inst.input_count()) / 2;
    bool y_ok = static_cast<double>(inst.negatives().size()) >= half;
    emit({{"instance", instance_summary(inst)},
          {"orthogonality", per},
          {"negatives", inst.negatives().size()},
          {"half_inputs", half},
          {"negatives_ok", y_ok}});
    if (!all_ok || !y_ok) status = kExitFail;
  });

  // adversary
  auto* adversary = app.add_subcommand("adversary", "adversary matrices")->require_subcommand(1);
  StructureArgs ad_s;
  int aq = 8;
  std::string ad_witness;
  auto* ad_r = adversary->add_subcommand("report", "norms of Gamma and Gamma o Delta_j");
  ad_s.attach(ad_r);
  ad_r->add_option("--q", aq)->capture_default_str();
  ad_r->add_option("--witness", ad_witness, "witness JSON (default: built-in witness)")
      ->check(CLI::ExistingFile);
  ad_r->callback([&] {
    auto cert = ad_s.build();
    auto inst = build_bounded_instance(cert, aq);
    auto w = ad_witness.empty() ? default_witness(cert, solver) : witness_from_json(read_json_file(ad_witness));
    auto adv = adv_ratio(inst, w);
    json checks = json::array();
    bool all_ok = true;
    for (int j = 1; j <= inst.n(); ++j) {
      auto b = bounded_norm_certificates(inst, w, j);
      checks.push_back({{"j", j},
                        {"k", b.k},
                        {"part_norms", b.part_norms},
                        {"hat_norm", b.hat_norm},
                        {"prime_norm", b.prime_norm},
                        {"delta_norm", b.delta_norm},
                        {"pass", b.ok()}});
      all_ok = all_ok && b.ok();
    }
    emit({{"instance_hash", hex_digest(inst.hash())},
          {"witness_hash", hex_digest(witness_hash(w))},
          {"gamma_norm", adv.gamma_norm},
          {"per_j_norms", adv.delta_norms},
          {"ratio", adv.ratio},
          {"witness_objective", adv.witness_objective},
          {"u_gamma_v", adv.u_gamma_v},
          {"u_gamma_v_expected", adv.u_gamma_v_expected},
          {"bound_checks", checks}});
    if (!all_ok) status = kExitFail;
  });

  // fourier
  auto* fourier = app.add_subcommand("fourier", "Fourier bias over Z_p")->require_subcommand(1);
  int fp = 7;
  std::vector<int> elements;
  auto* f_b = fourier->add_subcommand("bias", "bias of an explicit set");
  f_b->add_option("--p", fp)->required();
  f_b->add_option("--set", elements, "comma-separated elements")->delimiter(',')->required();
  f_b->callback([&] {
    auto u = make_biased_set(fp, elements);
    emit({{"p", u.p}, {"size", u.elements.size()}, {"density", u.density}, {"bias", u.bias}});
  });
  std::vector<int> scan_p = {1009, 10007};
  int scan_seeds = 3;
  double scan_delta = 0.5;
  auto* f_s = fourier->add_subcommand("scan", "bias of random sets against 4 sqrt(ln p / p)");
  f_s->add_option("--p", scan_p)->delimiter(',')->capture_default_str();
  f_s->add_option("--seeds", scan_seeds)->capture_default_str();
  f_s->add_option("--delta", scan_delta)->capture_default_str();
  f_s->callback([&] {
    if (!(scan_delta > 0 && scan_delta < 1)) throw ParameterError("--delta must lie in (0, 1)");
    std::cout << "p,seed,size,bias,bound\n";
    for (int p : scan_p) {
      for (int s = 0; s < scan_seeds; ++s) {
        const std::uint64_t seed = seed_or(g, 0) + s;
        auto u = random_low_bias_set(p, scan_delta, seed);
        const double bound = 4 * std::sqrt(std::log(p) / p);
        std::cout << p << "," << seed << "," << u.elements.size() << "," << format_double(u.bias) << ","
                  << format_double(bound) << "\n";
        if (u.bias > bound) status = kExitFail;
      }
    }
  });

  // general
  auto* general = app.add_subcommand("general", "construction over Z_p^ell")->require_subcommand(1);
  StructureArgs ge_s;
  ge_s.kind = "hidden_shift";
  ge_s.params = {2};
  std::vector<int> ge_p = {16, 32, 64};
  auto* ge_g = general->add_subcommand("gap", "||B~_M - B^_M|| along a p ladder");
  ge_s.attach(ge_g);
  ge_g->add_option("--p", ge_p)->delimiter(',')->capture_default_str();
  ge_g->callback([&] {
    auto cert = ge_s.build();
    ExperimentConfig c;
    c.solver = solver;
    auto w = detail::general_witness(cert, c);
    std::cout << "p,M,gap,bound\n";
    for (int p : ge_p) {
      auto inst = build_general_instance(cert, p, seed_or(g, 0));
      for (int m = 0; m < cert.size(); ++m) {
        auto r = btilde_bhat_gap_max(inst, w, m);
        std::cout << p << "," << m << "," << format_double(r.gap) << "," << format_double(r.bound) << "\n";
        if (r.gap > r.bound) status = kExitFail;
      }
    }
  });

  // verify-all
  auto* verify = app.add_subcommand("verify-all", "run a configured suite and write a report");
  std::string suite_override;
  verify->add_option("--suite", suite_override, "override the config suite");
  bool dry_run = false;
  verify->add_flag("--dry-run", dry_run, "validate the config and stop");
  verify->callback([&] {
    auto c = load_config(g, suite_override);
    if (dry_run) {
      emit({{"config", c.to_json()}, {"config_hash", hex_digest(c.hash())}});
      return;
    }
    auto rep = run_suite(c);
    auto dir = write_report(rep, c);
    if (g.format == "csv") {
      std::cout << rep.csv();
    } else {
      for (const auto& r : rep.records) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.id;
        if (!r.pass) std::cout << "  [" << r.anchor << "] " << format_double(r.measured) << " " << r.note;
        std::cout << "\n";
      }
      std::cout << "report: " << dir.string() << "\n";
    }
    if (!rep.passed()) status = kExitFail;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitFail;
  }
  return status;
}
