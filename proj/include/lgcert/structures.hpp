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
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lgcert/errors.hpp"
#include "lgcert/hash.hpp"
#include "lgcert/subset.hpp"

namespace lgcert {

// Full-lattice operations (2^n nodes) are refused above this variable count.
inline constexpr int kLatticeCap = 22;

// Upward-closed family of subsets, represented by its inclusion-minimal
// generators.
class Certificate {
 public:
  Certificate() = default;

  // Throws InvariantError if the list is empty or two generators are
  // comparable under inclusion.
  explicit Certificate(std::vector<Subset> minimal_sets)
      : minimal_sets_(std::move(minimal_sets)) {
    if (minimal_sets_.empty()) {
      throw InvariantError("certificate needs at least one minimal set");
    }
    for (std::size_t a = 0; a < minimal_sets_.size(); ++a) {
      for (std::size_t b = 0; b < minimal_sets_.size(); ++b) {
        if (a != b && minimal_sets_[a].is_subset_of(minimal_sets_[b])) {
          throw InvariantError("minimal sets " + minimal_sets_[a].to_string() +
                               " and " + minimal_sets_[b].to_string() +
                               " are comparable");
        }
      }
    }
  }

  const std::vector<Subset>& minimal_sets() const { return minimal_sets_; }
  int generator_count() const { return static_cast<int>(minimal_sets_.size()); }

  // S belongs to the certificate iff it contains some generator.
  bool contains(Subset s) const {
    return std::any_of(minimal_sets_.begin(), minimal_sets_.end(),
                       [s](Subset a) { return a.is_subset_of(s); });
  }

  // Generators as a sorted list, for set comparisons between structures.
  std::vector<Subset> canonical() const {
    auto v = minimal_sets_;
    std::sort(v.begin(), v.end());
    return v;
  }

 private:
  std::vector<Subset> minimal_sets_;
};

enum class StructureKind { ksubset, triangle, collision, set_equality, hidden_shift, custom };

inline std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::ksubset: return "ksubset";
    case StructureKind::triangle: return "triangle";
    case StructureKind::collision: return "collision";
    case StructureKind::set_equality: return "set_equality";
    case StructureKind::hidden_shift: return "hidden_shift";
    case StructureKind::custom: return "custom";
  }
  return "custom";
}

inline StructureKind parse_structure_kind(std::string_view s) {
  if (s == "ksubset" || s == "k-subset") return StructureKind::ksubset;
  if (s == "triangle") return StructureKind::triangle;
  if (s == "collision") return StructureKind::collision;
  if (s == "set_equality" || s == "set-equality") return StructureKind::set_equality;
  if (s == "hidden_shift" || s == "hidden-shift" || s == "hiddenshift") {
    return StructureKind::hidden_shift;
  }
  if (s == "custom") return StructureKind::custom;
  throw ParameterError("unknown structure kind '" + std::string(s) + "'");
}

class CertificateStructure {
 public:
  CertificateStructure(int n, std::vector<Certificate> certificates,
                       StructureKind kind = StructureKind::custom,
                       std::vector<int> params = {})
      : n_(n), certificates_(std::move(certificates)), kind_(kind),
        params_(std::move(params)) {
    if (n_ < 1 || n_ > kMaxVariables) {
      throw ParameterError("variable count " + std::to_string(n_) +
                           " outside [1, 32]");
    }
    if (certificates_.empty()) {
      throw InvariantError("certificate structure needs at least one certificate");
    }
    for (const auto& c : certificates_) {
      for (Subset a : c.minimal_sets()) {
        if (!a.within(n_)) {
          throw InvariantError("minimal set " + a.to_string() + " not inside [" +
                               std::to_string(n_) + "]");
        }
      }
    }
  }

  int n() const { return n_; }
  int size() const { return static_cast<int>(certificates_.size()); }
  const Certificate& operator[](int m) const { return certificates_[m]; }
  const std::vector<Certificate>& certificates() const { return certificates_; }
  StructureKind kind() const { return kind_; }
  const std::vector<int>& params() const { return params_; }

  // Same structure with certificates permuted: result[i] = this[order[i]].
  CertificateStructure reordered(const std::vector<int>& order) const {
    std::vector<Certificate> c;
    c.reserve(order.size());
    for (int i : order) c.push_back(certificates_.at(i));
    return CertificateStructure(n_, std::move(c), kind_, params_);
  }

 private:
  int n_;
  std::vector<Certificate> certificates_;
  StructureKind kind_;
  std::vector<int> params_;
};

inline bool contains(const Certificate& m, Subset s) { return m.contains(s); }

// Hash over n and the generator masks in stored order.
inline std::uint64_t structure_hash(const CertificateStructure& cert) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(cert.n())).add(static_cast<std::uint64_t>(cert.size()));
  for (const auto& c : cert.certificates()) {
    h.add(static_cast<std::uint64_t>(c.generator_count()));
    for (Subset a : c.minimal_sets()) h.add(a.mask());
  }
  return h.value();
}

// ---------------------------------------------------------------------------
// Triangle edge variables: pairs u<v of [n] in lexicographic order, numbered
// from 1.

class TriangleEdges {
 public:
  explicit TriangleEdges(int vertices) : n_(vertices) {
    for (int u = 1; u <= n_; ++u) {
      for (int v = u + 1; v <= n_; ++v) ends_.emplace_back(u, v);
    }
  }
  int vertices() const { return n_; }
  int edge_count() const { return static_cast<int>(ends_.size()); }

  // Variable index of edge {u, v}; order of arguments does not matter.
  int index(int u, int v) const {
    if (u > v) std::swap(u, v);
    // edges before row u: sum_{r<u} (n - r)
    return (u - 1) * n_ - (u - 1) * u / 2 + (v - u);
  }
  std::pair<int, int> endpoints(int var) const { return ends_.at(var - 1); }

 private:
  int n_;
  std::vector<std::pair<int, int>> ends_;
};

// ---------------------------------------------------------------------------
// Named builders.

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

inline void for_each_combination(int n, int k, const auto& fn) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 1);
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i + 1) --i;
    if (i < 0) return;
    ++idx[i];
    for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

inline void matchings_rec(std::vector<int>& rest, std::vector<Subset>& cur,
                          std::vector<Certificate>& out) {
  if (rest.empty()) {
    out.emplace_back(cur);
    return;
  }
  int a = rest.front();
  for (std::size_t t = 1; t < rest.size(); ++t) {
    int b = rest[t];
    std::vector<int> next;
    next.reserve(rest.size() - 2);
    for (std::size_t s = 1; s < rest.size(); ++s) {
      if (s != t) next.push_back(rest[s]);
    }
    cur.push_back(Subset::of({a, b}));
    matchings_rec(next, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline CertificateStructure build_ksubset(int n, int k) {
  detail::require(n >= 1 && n <= kMaxVariables, "ksubset: need 1 <= n <= 32");
  detail::require(k >= 1 && k <= n, "ksubset: need 1 <= k <= n");
  if (binomial(n, k) > (1u << 20)) {
    throw CapacityError("ksubset: C(n,k) above 2^20 certificates");
  }
  std::vector<Certificate> certs;
  detail::for_each_combination(n, k, [&](const std::vector<int>& idx) {
    certs.emplace_back(std::vector<Subset>{Subset::of(idx)});
  });
  return {n, std::move(certs), StructureKind::ksubset, {n, k}};
}

// Variables are the C(n,2) vertex pairs in TriangleEdges order.
inline CertificateStructure build_triangle(int n) {
  detail::require(n >= 3, "triangle: need n >= 3 vertices");
  if (binomial(n, 2) > static_cast<std::uint64_t>(kMaxVariables)) {
    throw CapacityError("triangle: n = " + std::to_string(n) + " gives " +
                        std::to_string(binomial(n, 2)) + " edge variables (a lattice of 2^" +
                        std::to_string(binomial(n, 2)) + " subsets); the cap is 32 variables, n <= 8");
  }
  TriangleEdges edges(n);
  std::vector<Certificate> certs;
  detail::for_each_combination(n, 3, [&](const std::vector<int>& t) {
    Subset s = Subset::of({edges.index(t[0], t[1]), edges.index(t[0], t[2]),
                           edges.index(t[1], t[2])});
    certs.emplace_back(std::vector<Subset>{s});
  });
  return {edges.edge_count(), std::move(certs), StructureKind::triangle, {n}};
}

// All perfect matchings of [2n]; pairs listed with the smallest unmatched
// element first.
inline CertificateStructure build_collision(int n) {
  detail::require(n >= 1, "collision: need n >= 1");
  if (n > 6) throw CapacityError("collision: n > 6 gives more than 10395 certificates");
  std::vector<int> rest(2 * n);
  std::iota(rest.begin(), rest.end(), 1);
  std::vector<Subset> cur;
  std::vector<Certificate> certs;
  detail::matchings_rec(rest, cur, certs);
  return {2 * n, std::move(certs), StructureKind::collision, {n}};
}

// Matchings pairing i with n + sigma(i), sigma in lexicographic order.
inline CertificateStructure build_set_equality(int n) {
  detail::require(n >= 1, "set_equality: need n >= 1");
  if (n > 5) throw CapacityError("set_equality: n > 5 gives more than 120 certificates");
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  std::vector<Certificate> certs;
  do {
    std::vector<Subset> pairs;
    for (int i = 1; i <= n; ++i) pairs.push_back(Subset::of({i, n + sigma[i - 1]}));
    certs.emplace_back(std::move(pairs));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return {2 * n, std::move(certs), StructureKind::set_equality, {n}};
}

// For d = 1..n, the matching {a, n+1+((a+d) mod n)}.
inline CertificateStructure build_hidden_shift(int n) {
  detail::require(n >= 1, "hidden_shift: need n >= 1");
  if (2 * n > kMaxVariables) throw CapacityError("hidden_shift: 2n exceeds 32 variables");
  std::vector<Certificate> certs;
  for (int d = 1; d <= n; ++d) {
    std::vector<Subset> pairs;
    for (int a = 1; a <= n; ++a) pairs.push_back(Subset::of({a, n + 1 + ((a + d) % n)}));
    certs.emplace_back(std::move(pairs));
  }
  return {2 * n, std::move(certs), StructureKind::hidden_shift, {n}};
}

inline CertificateStructure build_named_structure(StructureKind kind,
                                                  const std::vector<int>& params) {
  auto want = [&](std::size_t count) {
    if (params.size() != count) {
      throw ParameterError(std::string(to_string(kind)) + ": expected " +
                           std::to_string(count) + " parameter(s), got " +
                           std::to_string(params.size()));
    }
  };
  switch (kind) {
    case StructureKind::ksubset: want(2); return build_ksubset(params[0], params[1]);
    case StructureKind::triangle: want(1); return build_triangle(params[0]);
    case StructureKind::collision: want(1); return build_collision(params[0]);
    case StructureKind::set_equality: want(1); return build_set_equality(params[0]);
    case StructureKind::hidden_shift: want(1); return build_hidden_shift(params[0]);
    case StructureKind::custom: break;
  }
  throw ParameterError("custom structures are built from explicit minimal sets");
}

// ---------------------------------------------------------------------------

struct MinimalProfile {
  std::vector<int> counts;           // l(M) per certificate
  int max_count = 0;
  std::optional<int> bounded_size;   // set iff every l(M) == 1
};

inline MinimalProfile minimal_profile(const CertificateStructure& cert) {
  MinimalProfile p;
  bool single = true;
  int largest = 0;
  for (const auto& c : cert.certificates()) {
    p.counts.push_back(c.generator_count());
    p.max_count = std::max(p.max_count, c.generator_count());
    single = single && c.generator_count() == 1;
    for (Subset a : c.minimal_sets()) largest = std::max(largest, a.size());
  }
  if (single) p.bounded_size = largest;
  return p;
}

// ---------------------------------------------------------------------------
// Subset lattice.

struct Arc {
  Subset source;
  Subset target;
  int variable() const { return std::countr_zero(target.mask() ^ source.mask()) + 1; }
  bool operator==(const Arc&) const = default;
};

inline void require_lattice(int n) {
  if (n < 1) throw ParameterError("lattice needs n >= 1");
  if (n > kLatticeCap) {
    throw CapacityError("lattice on " + std::to_string(n) +
                        " variables exceeds the cap of " + std::to_string(kLatticeCap));
  }
}

// Arcs in source-mask order, then by added variable.
inline std::vector<Arc> lattice_arcs(int n) {
  require_lattice(n);
  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(n) << (n - 1));
  const std::uint32_t top = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < top; ++s) {
    for (int j = 1; j <= n; ++j) {
      if (!(s & Subset::bit(j))) {
        arcs.push_back({Subset::from_mask(s), Subset::from_mask(s | Subset::bit(j))});
      }
    }
  }
  return arcs;
}

// Constant-time arc numbering consistent with lattice_arcs.
class ArcIndex {
 public:
  explicit ArcIndex(int n) : n_(n) {
    require_lattice(n);
    const std::uint32_t top = std::uint32_t{1} << n;
    offset_.resize(top + 1);
    std::size_t acc = 0;
    for (std::uint32_t s = 0; s < top; ++s) {
      offset_[s] = acc;
      acc += static_cast<std::size_t>(n - std::popcount(s));
    }
    offset_[top] = acc;
  }
  int n() const { return n_; }
  std::size_t size() const { return offset_.back(); }

  // Index of the arc source -> source + {j}; j must not be in source.
  std::size_t operator()(Subset source, int j) const {
    std::uint32_t below = source.mask() & (Subset::bit(j) - 1);
    return offset_[source.mask()] + static_cast<std::size_t>(j - 1 - std::popcount(below));
  }
  std::size_t operator()(const Arc& e) const { return (*this)(e.source, e.variable()); }

 private:
  int n_;
  std::vector<std::size_t> offset_;
};

}  // namespace lgcert
