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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <bit>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "lgcert/dual_witness.hpp"
#include "lgcert/errors.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

struct SolverParams {
  double tolerance = 1e-6;  // relative
  int max_iterations = 10000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(tolerance > 0)) throw ParameterError("solver tolerance must be > 0");
    if (max_iterations < 1) throw ParameterError("solver max_iterations must be >= 1");
  }
};

// p_e(M) stored densely per certificate over the lattice arc numbering.
class FlowAssignment {
 public:
  FlowAssignment() = default;
  FlowAssignment(int n, int cert_count) : index_(n), flows_(cert_count) {
    for (auto& f : flows_) f.assign(index_.size(), 0.0);
  }

  int n() const { return index_.n(); }
  int cert_count() const { return static_cast<int>(flows_.size()); }
  std::size_t arc_count() const { return index_.size(); }
  const ArcIndex& arcs() const { return index_; }

  double get(const Arc& e, int m) const { return flows_.at(m)[checked(e)]; }
  void set(const Arc& e, int m, double v) { flows_.at(m)[checked(e)] = v; }

  std::vector<double>& of(int m) { return flows_[m]; }
  const std::vector<double>& of(int m) const { return flows_[m]; }

 private:
  std::size_t checked(const Arc& e) const {
    std::uint32_t diff = e.target.mask() ^ e.source.mask();
    if (!e.source.is_subset_of(e.target) || std::popcount(diff) != 1 ||
        !e.target.within(index_.n())) {
      throw StructuralError("arc " + e.source.to_string() + " -> " + e.target.to_string() +
                            " is not a lattice arc on " + std::to_string(index_.n()) +
                            " variables");
    }
    return index_(e);
  }

  ArcIndex index_{1};
  std::vector<std::vector<double>> flows_;
};

// w_e >= 0 over the lattice arc numbering.
class WeightAssignment {
 public:
  WeightAssignment() = default;
  explicit WeightAssignment(std::size_t arcs, double value = 0.0) : w_(arcs, value) {}
  explicit WeightAssignment(std::vector<double> w) : w_(std::move(w)) {
    for (double v : w_) {
      if (!(v >= 0)) throw InvariantError("weights must be nonnegative");
    }
  }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  double& operator[](std::size_t i) { return w_[i]; }
  const std::vector<double>& values() const { return w_; }
  double total() const {
    double s = 0;
    for (double v : w_) s += v;
    return s;
  }

 private:
  std::vector<double> w_;
};

struct PrimalSolution {
  FlowAssignment flow;
  WeightAssignment weights;
  double objective = 0;             // sqrt(sum_e w_e)
  std::vector<double> mu;           // per-certificate multiplier of the energy constraint
  std::vector<double> nu;           // conservation multipliers, laid out [S * |C| + M]
  double lower_bound = 0;           // objective of the witness rebuilt from (mu, nu)
  int iterations = 0;
  double residual = 0;              // (objective - lower_bound) / objective
  bool converged = false;
};

// ---------------------------------------------------------------------------

struct ResidualEntry {
  int cert;
  Subset subset;
  double residual;
};

// One entry per conservation or source constraint. A certificate containing
// the empty set has no constraints.
inline std::vector<ResidualEntry> flow_residuals(const CertificateStructure& cert,
                                                 const FlowAssignment& flow) {
  if (flow.n() != cert.n() || flow.cert_count() != cert.size()) {
    throw StructuralError("flow assignment does not match the structure's shape");
  }
  const int n = cert.n();
  const std::uint32_t top = std::uint32_t{1} << n;
  const ArcIndex& idx = flow.arcs();
  std::vector<ResidualEntry> out;
  for (int m = 0; m < cert.size(); ++m) {
    const auto& M = cert[m];
    if (M.contains(Subset{})) continue;
    const auto& p = flow.of(m);
    for (std::uint32_t s = 0; s < top; ++s) {
      Subset S = Subset::from_mask(s);
      if (M.contains(S)) continue;
      double in = 0, outflow = 0;
      for (int j = 1; j <= n; ++j) {
        if (s & Subset::bit(j)) {
          in += p[idx(S.without(j), j)];
        } else {
          outflow += p[idx(S, j)];
        }
      }
      out.push_back({m, S, s == 0 ? outflow - 1.0 : in - outflow});
    }
  }
  return out;
}

// sum_e p_e(M)^2 / w_e per certificate, with 0/0 = 0.
inline std::vector<double> primal_constraint_values(const FlowAssignment& flow,
                                                    const WeightAssignment& w) {
  if (w.size() != flow.arc_count()) {
    throw StructuralError("weights and flow cover different arc sets");
  }
  std::vector<double> out(flow.cert_count(), 0.0);
  for (int m = 0; m < flow.cert_count(); ++m) {
    const auto& p = flow.of(m);
    double sum = 0;
    for (std::size_t e = 0; e < p.size(); ++e) {
      if (p[e] == 0.0) continue;
      if (w[e] == 0.0) {
        sum = std::numeric_limits<double>::infinity();
        break;
      }
      sum += p[e] * p[e] / w[e];
    }
    out[m] = sum;
  }
  return out;
}

struct WeightFit {
  WeightAssignment weights;
  std::vector<double> mu;
};

// For fixed flows, the weights minimizing sum_e w_e under every energy
// constraint: w_e = sqrt(sum_M mu_M p_e(M)^2), with mu found by a
// multiplicative fixed point and a final rescale onto the feasible set.
inline WeightFit optimal_weights(const FlowAssignment& flow, std::vector<double> mu = {},
                                 int max_rounds = 500) {
  const int c = flow.cert_count();
  const std::size_t arcs = flow.arc_count();
  if (mu.empty()) mu.assign(c, 1.0);
  std::vector<bool> active(c, false);
  for (int m = 0; m < c; ++m) {
    for (double v : flow.of(m)) {
      if (v != 0.0) {
        active[m] = true;
        break;
      }
    }
    if (!active[m]) mu[m] = 0.0;
  }

  WeightAssignment w(arcs);
  std::vector<double> value(c);
  auto refit = [&] {
    for (std::size_t e = 0; e < arcs; ++e) {
      double s = 0;
      for (int m = 0; m < c; ++m) {
        double p = flow.of(m)[e];
        s += mu[m] * p * p;
      }
      w[e] = std::sqrt(s);
    }
    value = primal_constraint_values(flow, w);
  };

  for (int round = 0; round < max_rounds; ++round) {
    refit();
    double err = 0;
    for (int m = 0; m < c; ++m) {
      if (active[m]) err = std::max(err, std::abs(value[m] - 1.0));
    }
    if (err < 1e-13) break;
    for (int m = 0; m < c; ++m) {
      if (active[m]) mu[m] *= value[m];
    }
  }
  refit();

  double worst = 0;
  for (int m = 0; m < c; ++m) {
    if (active[m]) worst = std::max(worst, value[m]);
  }
  if (worst > 0 && std::isfinite(worst)) {
    for (std::size_t e = 0; e < arcs; ++e) w[e] *= worst;
    for (double& v : mu) v *= worst * worst;
  }
  return {std::move(w), std::move(mu)};
}

namespace detail {

// Weighted Laplacian of the lattice with every S in M merged into a grounded
// super-sink; unit current injected at the empty set.
class ElectricalNetwork {
 public:
  ElectricalNetwork(const CertificateStructure& cert, int m, const ArcIndex& index)
      : n_(cert.n()), index_(&index) {
    const std::uint32_t top = std::uint32_t{1} << n_;
    node_.assign(top, -1);
    const auto& M = cert[m];
    degenerate_ = M.contains(Subset{});
    if (degenerate_) return;
    int count = 0;
    for (std::uint32_t s = 0; s < top; ++s) {
      if (!M.contains(Subset::from_mask(s))) node_[s] = count++;
    }
    nodes_ = count;
    for (std::uint32_t s = 0; s < top; ++s) {
      if (node_[s] < 0) continue;
      for (int j = 1; j <= n_; ++j) {
        if (s & Subset::bit(j)) continue;
        std::uint32_t t = s | Subset::bit(j);
        edges_.push_back({s, t, (*index_)(Subset::from_mask(s), j)});
      }
    }
  }

  bool degenerate() const { return degenerate_; }

  // Fills the flow (over all arcs) and node potentials (over all subsets,
  // zero on the sink). Returns the energy sum p^2 / w.
  double solve(const std::vector<double>& conductance, std::vector<double>& flow,
               std::vector<double>& potential) {
    flow.assign(index_->size(), 0.0);
    potential.assign(node_.size(), 0.0);
    if (degenerate_) return 0.0;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges_.size() * 4);
    for (const auto& e : edges_) {
      double g = conductance[e.arc];
      int a = node_[e.source];
      int b = node_[e.target];
      trip.emplace_back(a, a, g);
      if (b >= 0) {
        trip.emplace_back(b, b, g);
        trip.emplace_back(a, b, -g);
        trip.emplace_back(b, a, -g);
      }
    }
    Eigen::SparseMatrix<double> lap(nodes_, nodes_);
    lap.setFromTriplets(trip.begin(), trip.end());
    if (!solver_) {
      solver_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
      solver_->analyzePattern(lap);
    }
    solver_->factorize(lap);
    if (solver_->info() != Eigen::Success) {
      throw ConsistencyError("lattice Laplacian factorization failed");
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nodes_);
    rhs[node_[0]] = 1.0;
    Eigen::VectorXd phi = solver_->solve(rhs);
    for (std::size_t s = 0; s < node_.size(); ++s) {
      if (node_[s] >= 0) potential[s] = phi[node_[s]];
    }
    for (const auto& e : edges_) {
      flow[e.arc] = conductance[e.arc] * (potential[e.source] - potential[e.target]);
    }
    return potential[0];
  }

 private:
  struct Edge {
    std::uint32_t source, target;
    std::size_t arc;
  };
  int n_;
  const ArcIndex* index_;
  bool degenerate_ = false;
  int nodes_ = 0;
  std::vector<int> node_;
  std::vector<Edge> edges_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> solver_;
};

}  // namespace detail

// Alternating minimization of sum_e w_e: electrical (minimum-energy) flows for
// the current weights, then the exact weight fit for those flows. Stops once
// the witness rebuilt from the multipliers certifies the requested relative
// gap.
inline PrimalSolution solve_primal(const CertificateStructure& cert,
                                   const SolverParams& params = {}) {
  params.validate();
  const int n = cert.n();
  const int c = cert.size();
  require_lattice(n);

  PrimalSolution sol;
  sol.flow = FlowAssignment(n, c);
  const ArcIndex& index = sol.flow.arcs();
  const std::size_t arcs = index.size();
  const std::size_t subsets = std::size_t{1} << n;

  std::vector<detail::ElectricalNetwork> nets;
  nets.reserve(c);
  for (int m = 0; m < c; ++m) nets.emplace_back(cert, m, index);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> jitter(0.0, 1e-3);
  std::vector<double> w(arcs);
  for (double& v : w) v = 1.0 + jitter(rng);
  std::vector<double> mu(c, 1.0);
  std::vector<std::vector<double>> potential(c);

  auto electrical = [&](const std::vector<double>& weights) {
    double top = *std::max_element(weights.begin(), weights.end());
    std::vector<double> g(weights);
    for (double& v : g) v = std::max(v, 1e-14 * top);
    for (int m = 0; m < c; ++m) nets[m].solve(g, sol.flow.of(m), potential[m]);
    return g;
  };

  // Lower bound from the Lagrangian reconstruction alpha_S(M) = sqrt(mu_M) phi_S(M).
  DualWitness rebuilt(n, c);
  auto certify = [&]() {
    for (std::size_t s = 0; s < subsets; ++s) {
      for (int m = 0; m < c; ++m) {
        rebuilt(Subset::from_mask(static_cast<std::uint32_t>(s)), m) =
            std::sqrt(mu[m]) * potential[m][s];
      }
    }
    double margin = dual_feasibility_margin(cert, rebuilt);
    double obj = dual_objective(rebuilt);
    return margin > 0 ? obj / std::sqrt(margin) : 0.0;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_w;
  std::vector<std::vector<double>> best_flow;
  int it = 0;
  for (; it < params.max_iterations; ++it) {
    w = electrical(w);
    WeightFit fit = optimal_weights(sol.flow, mu);
    mu = fit.mu;
    w = fit.weights.values();
    double objective = std::sqrt(std::accumulate(w.begin(), w.end(), 0.0));
    if (objective < best) {
      best = objective;
      best_w = w;
      best_flow.clear();
      for (int m = 0; m < c; ++m) best_flow.push_back(sol.flow.of(m));
    }
    // Certify against the potentials of the freshly fitted weights.
    electrical(w);
    double lb = certify();
    sol.lower_bound = std::max(sol.lower_bound, lb);
    sol.residual = (best - sol.lower_bound) / best;
    if (sol.residual <= params.tolerance) {
      sol.converged = true;
      ++it;
      break;
    }
  }

  sol.iterations = it;
  sol.objective = best;
  sol.weights = WeightAssignment(best_w);
  for (int m = 0; m < c; ++m) sol.flow.of(m) = best_flow[m];
  sol.mu = mu;
  sol.nu.assign(subsets * c, 0.0);
  for (std::size_t s = 0; s < subsets; ++s) {
    for (int m = 0; m < c; ++m) sol.nu[s * c + m] = 2.0 * mu[m] * potential[m][s];
  }
  return sol;
}

// ---------------------------------------------------------------------------

struct DualSolution {
  DualWitness witness;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Smoothed ratio log(sum_M alpha_empty^2) - (1/r) log(sum_e m_e^r) and its
// gradient; m_e is the per-arc margin term.
class SmoothedDualRatio {
 public:
  SmoothedDualRatio(const CertificateStructure& cert) : cert_(cert) {
    const int n = cert.n();
    const std::uint32_t top = std::uint32_t{1} << n;
    fixed_.assign(static_cast<std::size_t>(top) * cert.size(), 0);
    for (std::uint32_t s = 0; s < top; ++s) {
      for (int m = 0; m < cert.size(); ++m) {
        fixed_[static_cast<std::size_t>(s) * cert.size() + m] =
            cert[m].contains(Subset::from_mask(s));
      }
    }
  }

  const std::vector<char>& fixed() const { return fixed_; }

  // Largest arc term; used to keep iterates at margin 1.
  double max_margin(const std::vector<double>& x) const {
    double mx = 0;
    for_each_arc(x, [&](std::size_t, std::size_t, double me) { mx = std::max(mx, me); });
    return mx;
  }

  double value(const std::vector<double>& x, double r, std::vector<double>* grad) const {
    const int c = cert_.size();
    double obj = 0;
    for (int m = 0; m < c; ++m) obj += x[m] * x[m];
    double mx = max_margin(x);
    if (obj <= 0 || mx <= 0) {
      if (grad) grad->assign(x.size(), 0.0);
      return -std::numeric_limits<double>::infinity();
    }
    double z = 0;
    for_each_arc(x, [&](std::size_t, std::size_t, double me) { z += std::pow(me / mx, r); });
    double f = std::log(obj) - (std::log(z) / r + std::log(mx));
    if (grad) {
      grad->assign(x.size(), 0.0);
      for (int m = 0; m < c; ++m) (*grad)[m] += 2.0 * x[m] / obj;
      for_each_arc(x, [&](std::size_t a, std::size_t b, double me) {
        double weight = std::pow(me / mx, r - 1.0) / (z * mx);
        if (weight < 1e-300) return;
        for (int m = 0; m < c; ++m) {
          double d = 2.0 * weight * (x[a + m] - x[b + m]);
          (*grad)[a + m] -= d;
          (*grad)[b + m] += d;
        }
      });
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (fixed_[i]) (*grad)[i] = 0.0;
      }
    }
    return f;
  }

 private:
  template <typename Fn>
  void for_each_arc(const std::vector<double>& x, Fn&& fn) const {
    const int n = cert_.n();
    const int c = cert_.size();
    const std::uint32_t top = std::uint32_t{1} << n;
    for (std::uint32_t s = 0; s < top; ++s) {
      std::size_t a = static_cast<std::size_t>(s) * c;
      for (int j = 1; j <= n; ++j) {
        if (s & Subset::bit(j)) continue;
        std::size_t b = static_cast<std::size_t>(s | Subset::bit(j)) * c;
        double me = 0;
        for (int m = 0; m < c; ++m) {
          double d = x[a + m] - x[b + m];
          me += d * d;
        }
        fn(a, b, me);
      }
    }
  }

  const CertificateStructure& cert_;
  std::vector<char> fixed_;
};

}  // namespace detail

// Projected gradient ascent on a smoothed objective/margin ratio with step
// halving; the max over arcs is approached by a power mean of increasing order
// and every iterate is renormalized to margin 1.
inline DualSolution solve_dual(const CertificateStructure& cert, const SolverParams& params = {}) {
  params.validate();
  const int n = cert.n();
  const int c = cert.size();
  require_lattice(n);
  detail::SmoothedDualRatio ratio(cert);

  DualWitness w(n, c);
  std::vector<double>& x = w.values();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> jitter(0.0, 1e-2);
  const std::uint32_t top = std::uint32_t{1} << n;
  // Start from the distance to the certificate: min_i |A_i \ S|.
  for (std::uint32_t s = 0; s < top; ++s) {
    for (int m = 0; m < c; ++m) {
      std::size_t i = static_cast<std::size_t>(s) * c + m;
      if (ratio.fixed()[i]) continue;
      int dist = n;
      for (Subset a : cert[m].minimal_sets()) {
        dist = std::min(dist, (a.mask() & ~s) ? std::popcount(a.mask() & ~s) : 0);
      }
      x[i] = dist * (1.0 + jitter(rng));
    }
  }

  auto rescale = [&](std::vector<double>& v) {
    double mx = ratio.max_margin(v);
    if (mx > 0) {
      double f = 1.0 / std::sqrt(mx);
      for (double& e : v) e *= f;
    }
  };
  rescale(x);

  const std::vector<double> orders = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  const int budget = std::max(1, params.max_iterations / static_cast<int>(orders.size()));
  int total = 0;
  bool stalled_last = false;
  std::vector<double> grad, trial;
  for (double r : orders) {
    double step = 1e-1;
    double f = ratio.value(x, r, &grad);
    double window_start = f;
    stalled_last = false;
    for (int it = 0; it < budget; ++it, ++total) {
      bool accepted = false;
      while (step > 1e-14) {
        trial = x;
        for (std::size_t i = 0; i < x.size(); ++i) trial[i] += step * grad[i];
        rescale(trial);
        std::vector<double> tgrad;
        double ft = ratio.value(trial, r, &tgrad);
        if (ft > f) {
          x.swap(trial);
          grad.swap(tgrad);
          f = ft;
          step *= 1.5;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        stalled_last = true;
        break;
      }
      if ((it + 1) % 50 == 0) {
        if (f - window_start < params.tolerance * 1e-3) {
          stalled_last = true;
          break;
        }
        window_start = f;
      }
    }
  }

  DualSolution out;
  out.witness = normalize_witness(w, cert);
  // normalize_witness never scales up; the ratio is homogeneous so scale to margin exactly 1.
  double margin = dual_feasibility_margin(cert, out.witness);
  if (margin > 0 && margin < 1) {
    double f = 1.0 / std::sqrt(margin);
    for (double& v : out.witness.values()) v *= f;
  }
  out.objective = dual_objective(out.witness);
  out.iterations = total;
  out.converged = stalled_last;
  return out;
}

// ---------------------------------------------------------------------------

struct DualityReport {
  double primal = 0;
  double dual = 0;
  double gap = 0;  // (primal - dual) / primal
  int primal_iterations = 0;
  int dual_iterations = 0;
  bool primal_converged = false;
  bool dual_converged = false;
};

// Runs both solvers. Throws ConsistencyError when the dual value exceeds the
// primal value by more than the tolerance.
inline DualityReport duality_report(const CertificateStructure& cert,
                                    const SolverParams& params = {}) {
  PrimalSolution p = solve_primal(cert, params);
  DualSolution d = solve_dual(cert, params);
  DualityReport r;
  r.primal = p.objective;
  r.dual = d.objective;
  r.gap = r.primal > 0 ? (r.primal - r.dual) / r.primal : 0.0;
  r.primal_iterations = p.iterations;
  r.dual_iterations = d.iterations;
  r.primal_converged = p.converged;
  r.dual_converged = d.converged;
  if (r.dual > r.primal + params.tolerance * std::max(1.0, r.primal)) {
    throw ConsistencyError("weak duality violated: dual " + std::to_string(r.dual) +
                           " exceeds primal " + std::to_string(r.primal));
  }
  return r;
}

}  // namespace lgcert
