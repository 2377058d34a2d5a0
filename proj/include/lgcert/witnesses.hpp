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
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lgcert/dual_witness.hpp"
#include "lgcert/errors.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

// alpha_S(M) = C(n,k)^{-1/2} max{n^{k/(k+1)} - |S|, 0} for S outside M.
inline DualWitness ksubset_witness(int n, int k) {
  CertificateStructure cert = build_ksubset(n, k);
  require_lattice(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(binomial(n, k)));
  const double height = std::pow(static_cast<double>(n), static_cast<double>(k) / (k + 1));
  DualWitness w(n, cert.size());
  const std::uint32_t top = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < top; ++s) {
    Subset S = Subset::from_mask(s);
    double v = scale * std::max(height - S.size(), 0.0);
    if (v == 0.0) continue;
    for (int m = 0; m < cert.size(); ++m) {
      if (!cert[m].contains(S)) w(S, m) = v;
    }
  }
  return w;
}

// Witness on the n hidden-shift matchings, n^{-1/2} max{n^{1/3} - |S|, 0},
// embedded into a larger structure on the same 2n variables by assigning zero
// to every certificate that is not a hidden-shift matching.
inline DualWitness hidden_shift_witness(int n, StructureKind target = StructureKind::hidden_shift) {
  if (target != StructureKind::hidden_shift && target != StructureKind::set_equality &&
      target != StructureKind::collision) {
    throw ParameterError("hidden_shift_witness: target must be hidden_shift, set_equality or collision");
  }
  CertificateStructure shifts = build_hidden_shift(n);
  CertificateStructure host = build_named_structure(target, {n});
  require_lattice(host.n());

  std::vector<int> slot(host.size(), -1);
  for (int h = 0; h < host.size(); ++h) {
    auto key = host[h].canonical();
    for (int m = 0; m < shifts.size(); ++m) {
      if (shifts[m].canonical() == key) slot[h] = m;
    }
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double height = std::cbrt(static_cast<double>(n));
  DualWitness w(host.n(), host.size());
  const std::uint32_t top = std::uint32_t{1} << host.n();
  for (std::uint32_t s = 0; s < top; ++s) {
    Subset S = Subset::from_mask(s);
    double v = scale * std::max(height - S.size(), 0.0);
    if (v == 0.0) continue;
    for (int h = 0; h < host.size(); ++h) {
      if (slot[h] >= 0 && !host[h].contains(S)) w(S, h) = v;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Triangle witness.

// Median of 0, x and 1.
inline double median01(double x) { return std::max(0.0, std::min(x, 1.0)); }

// Continuous indicator of "degree about d": 0 below d/2, ramps to 1 on
// [d/2, d), flat on [d, 2d), ramps down on [2d, 5d/2], 0 afterwards.
inline double tau(double x, double d) {
  if (x < d / 2) return 0.0;
  if (x < d) return (2 * x - d) / d;
  if (x < 2 * d) return 1.0;
  if (x <= 2.5 * d) return (5 * d - 2 * x) / d;
  return 0.0;
}

// Degree intervals: level 0 is [0, n^{3/7}); level i >= 1 is
// [2^{i-1} n^{3/7}, 2^i n^{3/7}); the last level is closed and reaches n.
struct TriangleWitnessConfig {
  int n = 0;
  double base = 0;                  // n^{3/7}
  std::vector<double> boundaries;   // lower ends: 0, base, 2 base, ...
  int degree_levels = 0;            // number of degree intervals
  int k = 0;                        // 3 * degree_levels: (new edge, degree range) classes

  explicit TriangleWitnessConfig(int vertices) : n(vertices) {
    base = std::pow(static_cast<double>(n), 3.0 / 7.0);
    boundaries.push_back(0.0);
    double hi = base;
    while (hi <= n) {
      boundaries.push_back(hi);
      hi *= 2;
    }
    degree_levels = static_cast<int>(boundaries.size());
    k = 3 * degree_levels;
  }

  // Interval containing a degree.
  int level(double degree) const {
    int l = 0;
    while (l + 1 < degree_levels && degree >= boundaries[l + 1]) ++l;
    return l;
  }
};

// Edge set with adjacency queries, over the TriangleEdges variable order.
class EdgeSubset {
 public:
  EdgeSubset(const TriangleEdges& edges, Subset s) : edges_(&edges), set_(s) {
    const int n = edges.vertices();
    adj_.assign(n + 1, 0);
    for (int var : s.members()) {
      auto [u, v] = edges.endpoints(var);
      adj_[u] |= Subset::bit(v);
      adj_[v] |= Subset::bit(u);
    }
  }
  Subset set() const { return set_; }
  bool has(int u, int v) const { return (adj_[u] & Subset::bit(v)) != 0; }
  int degree(int v) const { return std::popcount(adj_[v]); }
  std::uint32_t neighbours(int v) const { return adj_[v]; }
  std::uint32_t common_neighbours(int u, int v) const { return adj_[u] & adj_[v]; }

 private:
  const TriangleEdges* edges_;
  Subset set_;
  std::vector<std::uint32_t> adj_;
};

// Evaluates
//   alpha_S(M) = max{n^{-3/14} - n^{-3/2}|S| - sum_i g_i(S,M), 0}
// lazily. For a triangle {a,b,c} each vertex in turn plays the apex a with
// opposite pair {b,c}:
//   level 0:  n^{-3/14} median(2 - deg a / n^{3/7})            if ab, ac in S
//   level i:  n^{-3/14} median(min{2 deg a/d, nu/n^{3/7}} - 1) if deg a in level i
// with d the level's lower end and nu = sum over common neighbours v of b, c
// of tau(deg v, d).
class TriangleWitnessModel {
 public:
  explicit TriangleWitnessModel(int n)
      : config_(n), edges_(n), cert_(build_triangle(n)) {
    if (n > 7) throw CapacityError("triangle witness: n > 7 exceeds the edge lattice cap");
    require_lattice(edges_.edge_count());
    height_ = std::pow(static_cast<double>(n), -3.0 / 14.0);
    slope_ = std::pow(static_cast<double>(n), -1.5);
    for (int a = 1; a <= n; ++a) {
      for (int b = a + 1; b <= n; ++b) {
        for (int c = b + 1; c <= n; ++c) triangles_.push_back({a, b, c});
      }
    }
  }

  int n() const { return edges_.edge_count(); }
  int cert_count() const { return static_cast<int>(triangles_.size()); }
  int vertices() const { return config_.n; }
  const TriangleWitnessConfig& config() const { return config_; }
  const CertificateStructure& structure() const { return cert_; }
  const TriangleEdges& edges() const { return edges_; }

  void fill(Subset s, std::span<double> out) const {
    EdgeSubset g(edges_, s);
    const double base_value = height_ - slope_ * s.size();
    for (std::size_t m = 0; m < triangles_.size(); ++m) {
      const auto& t = triangles_[m];
      if (g.has(t[0], t[1]) && g.has(t[0], t[2]) && g.has(t[1], t[2])) {
        out[m] = 0.0;
        continue;
      }
      if (base_value <= 0) {
        out[m] = 0.0;
        continue;
      }
      double sum = 0;
      for (int r = 0; r < 3; ++r) {
        sum += g_sum(g, t[r], t[(r + 1) % 3], t[(r + 2) % 3]);
      }
      out[m] = std::max(base_value - sum, 0.0);
    }
  }

  // Sum over levels of g_i for apex a and opposite pair {b, c}.
  double g_sum(const EdgeSubset& g, int a, int b, int c) const {
    const double deg_a = g.degree(a);
    double total = 0;
    if (g.has(a, b) && g.has(a, c)) {
      total += height_ * median01(2.0 - deg_a / config_.base);
    }
    int level = config_.level(deg_a);
    if (level >= 1) {
      const double d = config_.boundaries[level];
      double nu = 0;
      for (std::uint32_t cn = g.common_neighbours(b, c); cn != 0; cn &= cn - 1) {
        int v = std::countr_zero(cn) + 1;
        nu += tau(g.degree(v), d);
      }
      total += height_ * median01(std::min(2.0 * deg_a / d, nu / config_.base) - 1.0);
    }
    return total;
  }

 private:
  TriangleWitnessConfig config_;
  TriangleEdges edges_;
  CertificateStructure cert_;
  double height_ = 0;
  double slope_ = 0;
  std::vector<std::array<int, 3>> triangles_;
};

// Dense triangle witness. n = 7 has 2^21 x 35 entries, past the dense cap,
// and is served by TriangleWitnessModel instead.
inline DualWitness triangle_witness(int n) {
  if (n < 3 || n > 7) throw CapacityError("triangle witness needs 3 <= n <= 7");
  if (n == 7) throw CapacityError("dense triangle witness at n = 7 exceeds 2^25 entries; use TriangleWitnessModel");
  TriangleWitnessModel model(n);
  return DualWitness::materialize(model);
}

}  // namespace lgcert
