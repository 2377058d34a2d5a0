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
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgcert/adversary.hpp"
#include "lgcert/arrays.hpp"
#include "lgcert/dual_witness.hpp"
#include "lgcert/errors.hpp"
#include "lgcert/fourier.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

// Alphabet Z_p^ell with ell the largest generator count. Component i of
// certificate M requires the i-th coordinates over A_M^(i) to sum into U.
struct GeneralInstance {
  CertificateStructure cert;
  int p = 0;
  int ell = 0;
  BiasedSet u;
  double delta = 0;
  std::uint64_t seed = 0;

  int n() const { return cert.n(); }
  int components(int m) const { return cert[m].generator_count(); }
  Subset generator(int m, int i) const { return cert[m].minimal_sets().at(i); }
  bool in_u(long long s) const {
    int r = static_cast<int>(((s % p) + p) % p);
    return std::binary_search(u.elements.begin(), u.elements.end(), r);
  }
  // q = p^ell, refused past 2^31.
  std::uint32_t alphabet() const {
    return static_cast<std::uint32_t>(checked_power(p, ell, std::uint64_t{1} << 31, "alphabet"));
  }
};

inline GeneralInstance build_general_instance(const CertificateStructure& cert, int p, std::uint64_t seed) {
  if (p < 2) throw ParameterError("general instance: p must be >= 2");
  GeneralInstance g{cert, p, 0, {}, 0, seed};
  for (const auto& c : cert.certificates()) g.ell = std::max(g.ell, c.generator_count());
  const double target = static_cast<double>(p) / (2.0 * g.ell * cert.size());
  const int m = static_cast<int>(std::lround(target));
  if (m < 1) {
    throw ParameterError("general instance: round(p / (2 ell |C|)) = round(" + std::to_string(target) +
                         ") is 0; p = " + std::to_string(p) + " is too small");
  }
  g.u = random_subset(p, m, seed);
  g.delta = g.u.density;
  return g;
}

// Instance with a caller-chosen U, for checks at a prescribed density.
inline GeneralInstance make_general_instance(const CertificateStructure& cert, int p, BiasedSet u) {
  if (u.p != p || u.elements.empty()) throw ParameterError("general instance: U must be a nonempty subset of Z_p");
  GeneralInstance g{cert, p, 0, std::move(u), 0, 0};
  for (const auto& c : cert.certificates()) g.ell = std::max(g.ell, c.generator_count());
  g.delta = g.u.density;
  return g;
}

enum class ZetaMethod { brute, fast };

// xi = (chi_w[X_M^(i)])^* (chi_w'[X_M^(i)]) over Z_p^n, with 0-based component i.
inline cplx zeta_inner(const std::vector<int>& w, const std::vector<int>& w2, int m, int i,
                       const GeneralInstance& g, ZetaMethod method = ZetaMethod::fast) {
  const int n = g.n();
  if (static_cast<int>(w.size()) != n || static_cast<int>(w2.size()) != n) {
    throw ParameterError("zeta_inner: tuples must have n coordinates");
  }
  if (i < 0 || i >= g.ell) throw ParameterError("zeta_inner: component outside [0, ell)");
  const int p = g.p;
  if (i >= g.components(m)) return w == w2 ? cplx(1.0) : cplx(0.0);
  const Subset a = g.generator(m, i);

  if (method == ZetaMethod::fast) {
    const int first = a.members().front();
    auto wb = shift(w, a, -w[first - 1], p);
    auto wb2 = shift(w2, a, -w2[first - 1], p);
    if (wb != wb2) return 0.0;
    const int c = ((w2[first - 1] - w[first - 1]) % p + p) % p;
    cplx sum = 0.0;
    for (int x : g.u.elements) {
      sum += std::polar(1.0, 2 * std::numbers::pi * static_cast<double>((static_cast<long long>(c) * x) % p) / p);
    }
    return sum / static_cast<double>(p);
  }

  const std::uint64_t total = checked_power(p, n, std::uint64_t{1} << 20, "zeta_inner brute force");
  std::vector<cplx> roots(p);
  for (int k = 0; k < p; ++k) roots[k] = std::polar(1.0, 2 * std::numbers::pi * k / p);
  std::vector<int> diff(n), x(n, 0);
  for (int j = 0; j < n; ++j) diff[j] = ((w2[j] - w[j]) % p + p) % p;
  cplx sum = 0.0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    long long s = 0, phase = 0;
    for (int j = 1; j <= n; ++j) {
      if (a.contains(j)) s += x[j - 1];
      phase += static_cast<long long>(diff[j - 1]) * x[j - 1];
    }
    if (g.in_u(s)) sum += roots[phase % p];
    for (int j = 0; j < n; ++j) {
      if (++x[j] < p) break;
      x[j] = 0;
    }
  }
  return sum / static_cast<double>(total);
}

struct ZetaClaimStats {
  std::uint64_t equal_pairs = 0;
  std::uint64_t shifted_pairs = 0;    // w != w' related by a shift on A
  std::uint64_t unrelated_pairs = 0;
  double max_equal_error = 0;         // |xi - delta| over w = w'
  double max_shifted_abs = 0;         // max |xi| over shifted pairs
  double max_unrelated_abs = 0;       // max |xi| over unrelated pairs
  double max_brute_fast_diff = 0;
  double bias = 0;
  double delta = 0;

  bool holds(double exact_tol = 1e-12, double agree_tol = 1e-10) const {
    return max_equal_error <= exact_tol && max_unrelated_abs <= exact_tol &&
           max_shifted_abs <= bias + exact_tol && max_brute_fast_diff <= agree_tol;
  }
};

// Every pair (w, w') in Z_p^n x Z_p^n, classified by trying all p shifts.
inline ZetaClaimStats check_zeta_claim(const GeneralInstance& g, int m, int i, bool with_brute = true) {
  const int n = g.n();
  const int p = g.p;
  const std::uint64_t total = checked_power(p, n, std::uint64_t{1} << 12, "zeta claim check");
  const Subset a = g.generator(m, i);
  ZetaClaimStats st;
  st.bias = g.u.bias;
  st.delta = g.delta;
  auto decode = [&](std::uint64_t idx) {
    std::vector<int> w(n);
    for (int j = 0; j < n; ++j) {
      w[j] = static_cast<int>(idx % p);
      idx /= p;
    }
    return w;
  };
  for (std::uint64_t x = 0; x < total; ++x) {
    auto w = decode(x);
    for (std::uint64_t y = 0; y < total; ++y) {
      auto w2 = decode(y);
      cplx xi = zeta_inner(w, w2, m, i, g, ZetaMethod::fast);
      if (with_brute) {
        cplx b = zeta_inner(w, w2, m, i, g, ZetaMethod::brute);
        st.max_brute_fast_diff = std::max(st.max_brute_fast_diff, std::abs(b - xi));
      }
      if (x == y) {
        ++st.equal_pairs;
        st.max_equal_error = std::max(st.max_equal_error, std::abs(xi - g.delta));
        continue;
      }
      bool related = false;
      for (int c = 1; c < p && !related; ++c) related = shift(w, a, c, p) == w2;
      if (related) {
        ++st.shifted_pairs;
        st.max_shifted_abs = std::max(st.max_shifted_abs, std::abs(xi));
      } else {
        ++st.unrelated_pairs;
        st.max_unrelated_abs = std::max(st.max_unrelated_abs, std::abs(xi));
      }
    }
  }
  return st;
}

// Hard instance over the alphabet Z_p^ell, symbols encoded as
// sum_i s^(i) p^i. Only for enumerable sizes.
inline HardInstance to_hard_instance(const GeneralInstance& g) {
  const std::uint32_t q = g.alphabet();
  checked_power(static_cast<int>(q), g.n(), kInputCap, "general instance inputs");
  std::vector<std::vector<OrthogonalArray>> arrays(g.cert.size());
  for (int m = 0; m < g.cert.size(); ++m) {
    for (int i = 0; i < g.components(m); ++i) {
      const int k = g.generator(m, i).size();
      const std::uint64_t total = checked_power(static_cast<int>(q), k, kInputCap, "component array");
      std::vector<std::vector<int>> rows;
      std::vector<int> t(k, 0);
      std::uint64_t pi = 1;
      for (int r = 0; r < i; ++r) pi *= g.p;
      for (std::uint64_t idx = 0; idx < total; ++idx) {
        long long s = 0;
        for (int v : t) s += static_cast<long long>((v / pi) % g.p);
        if (g.in_u(s)) rows.push_back(t);
        for (int c = k - 1; c >= 0; --c) {
          if (++t[c] < static_cast<int>(q)) break;
          t[c] = 0;
        }
      }
      arrays[m].emplace_back(static_cast<int>(q), k, std::move(rows));
    }
  }
  return HardInstance::from_arrays(g.cert, static_cast<int>(q), std::move(arrays));
}

// |Y| as the product over components of the count of x^(i) in Z_p^n that
// avoid every component-i constraint.
inline double negative_count(const GeneralInstance& g) {
  const int n = g.n();
  const std::uint64_t total = checked_power(g.p, n, kInputCap, "negative_count");
  double product = 1;
  for (int i = 0; i < g.ell; ++i) {
    std::vector<std::vector<int>> gens;
    for (int m = 0; m < g.cert.size(); ++m) {
      if (i < g.components(m)) gens.push_back(g.generator(m, i).members());
    }
    std::vector<int> x(n, 0);
    std::uint64_t count = 0;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      bool hit = false;
      for (const auto& a : gens) {
        long long s = 0;
        for (int j : a) s += x[j - 1];
        if (g.in_u(s)) {
          hit = true;
          break;
        }
      }
      if (!hit) ++count;
      for (int j = 0; j < n; ++j) {
        if (++x[j] < g.p) break;
        x[j] = 0;
      }
    }
    product *= static_cast<double>(count);
  }
  return product;
}

// ---------------------------------------------------------------------------
// Blocks of B^_M in the Fourier basis.

// v in Z^n stored as ell component tuples: v[i][j-1] = v_j^(i).
using ZTuple = std::vector<std::vector<int>>;

inline Subset support(const ZTuple& v) {
  Subset s;
  for (const auto& comp : v) {
    for (std::size_t j = 0; j < comp.size(); ++j) {
      if (comp[j] != 0) s = s.with(static_cast<int>(j) + 1);
    }
  }
  return s;
}

// e_v^* B^_M e_v' from the per-component inner products.
inline cplx bhat_entry(const GeneralInstance& g, const DualWitness& beta, int m, const ZTuple& v,
                       const ZTuple& v2, ZetaMethod method = ZetaMethod::fast) {
  cplx prod = beta(support(v), m) * beta(support(v2), m);
  if (prod == 0.0) return 0.0;
  for (int i = 0; i < g.ell; ++i) {
    prod *= zeta_inner(v[i], v2[i], m, i, g, method);
    if (i < g.components(m)) prod /= g.delta;
  }
  return prod;
}

// The same entries by enumerating X_M over (Z_p^ell)^n and summing
// conj(e_v[x]) e_v'[x] directly; one pass serves every requested pair.
inline std::vector<cplx> bhat_entries_brute(const GeneralInstance& g, const DualWitness& beta, int m,
                                            const std::vector<std::pair<ZTuple, ZTuple>>& pairs) {
  const int n = g.n();
  const int p = g.p;
  const int ell = g.ell;
  const std::uint64_t total = checked_power(p, ell * n, kInputCap, "bhat brute force");
  std::vector<cplx> roots(p);
  for (int k = 0; k < p; ++k) roots[k] = std::polar(1.0, 2 * std::numbers::pi * k / p);
  // diff[k][i*n + j] = v'^(i)_j - v^(i)_j
  std::vector<std::vector<int>> diff(pairs.size(), std::vector<int>(ell * n));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (int i = 0; i < ell; ++i) {
      for (int j = 0; j < n; ++j) {
        diff[k][i * n + j] = ((pairs[k].second[i][j] - pairs[k].first[i][j]) % p + p) % p;
      }
    }
  }
  std::vector<std::vector<int>> gens;
  for (int i = 0; i < g.components(m); ++i) gens.push_back(g.generator(m, i).members());

  std::vector<int> x(ell * n, 0);  // x[i*n + j] = x^(i)_{j+1}
  std::vector<cplx> sums(pairs.size(), 0.0);
  std::uint64_t size = 0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    bool in = true;
    for (std::size_t i = 0; i < gens.size() && in; ++i) {
      long long s = 0;
      for (int j : gens[i]) s += x[i * n + j - 1];
      in = g.in_u(s);
    }
    if (in) {
      ++size;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        long long phase = 0;
        for (int t = 0; t < ell * n; ++t) phase += static_cast<long long>(diff[k][t]) * x[t];
        sums[k] += roots[phase % p];
      }
    }
    for (int t = 0; t < ell * n; ++t) {
      if (++x[t] < p) break;
      x[t] = 0;
    }
  }
  // q^n / |X_M| * q^{-n} * sum = sum / |X_M|.
  std::vector<cplx> out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out[k] = beta(support(pairs[k].first), m) * beta(support(pairs[k].second), m) * sums[k] /
             static_cast<double>(size);
  }
  return out;
}

struct EquivalenceClass {
  ZTuple representative;
  std::vector<ZTuple> members;
  std::vector<std::vector<int>> offsets;  // per member, shift c_i per component
};

// Members of v's class: shifts v^(i) + c_i A_M^(i) with beta nonzero. A
// nonzero beta needs a zero at some index of every generator, so c_i ranges
// over the negated values of v^(i) on A_M^(i).
inline EquivalenceClass equivalence_class(const GeneralInstance& g, const DualWitness& beta, int m,
                                          const ZTuple& v) {
  EquivalenceClass cls;
  cls.representative = v;
  const int comps = g.components(m);
  std::vector<std::vector<int>> cand(comps);
  for (int i = 0; i < comps; ++i) {
    for (int j : g.generator(m, i).members()) cand[i].push_back((g.p - v[i][j - 1]) % g.p);
    std::sort(cand[i].begin(), cand[i].end());
    cand[i].erase(std::unique(cand[i].begin(), cand[i].end()), cand[i].end());
  }
  std::vector<int> pick(comps, 0);
  while (true) {
    ZTuple w = v;
    std::vector<int> off(comps);
    for (int i = 0; i < comps; ++i) {
      off[i] = cand[i][pick[i]];
      w[i] = shift(w[i], g.generator(m, i), off[i], g.p);
    }
    if (beta(support(w), m) != 0.0) {
      cls.members.push_back(std::move(w));
      cls.offsets.push_back(std::move(off));
    }
    int i = 0;
    for (; i < comps; ++i) {
      if (++pick[i] < static_cast<int>(cand[i].size())) break;
      pick[i] = 0;
    }
    if (i == comps) break;
  }
  return cls;
}

// Pairwise-equivalence check straight from the definition.
inline bool equivalent(const GeneralInstance& g, const DualWitness& beta, int m, const ZTuple& v,
                       const ZTuple& v2) {
  if (beta(support(v), m) == 0.0 || beta(support(v2), m) == 0.0) return false;
  for (int i = 0; i < g.ell; ++i) {
    if (i >= g.components(m)) {
      if (v[i] != v2[i]) return false;
      continue;
    }
    Subset a = g.generator(m, i);
    int first = a.members().front();
    if (shift(v[i], a, v2[i][first - 1] - v[i][first - 1], g.p) != v2[i]) return false;
  }
  return true;
}

// Spectral norm of the off-diagonal part of one class block.
inline double class_offdiagonal_norm(const GeneralInstance& g, const DualWitness& beta, int m,
                                     const EquivalenceClass& cls) {
  const auto k = static_cast<Eigen::Index>(cls.members.size());
  if (k < 2) return 0.0;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = r + 1; c < k; ++c) {
      cplx e = bhat_entry(g, beta, m, cls.members[r], cls.members[c]);
      h(r, c) = e;
      h(c, r) = std::conj(e);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Calls fn(v) for one representative of every class type: per component
// below ell(M), the zero pattern off A and the values on A with the smallest
// variable fixed at 0; per remaining component, the zero pattern. Nonzero
// entries off the zero pattern are set to 1, since only their support
// matters.
template <typename Fn>
void for_each_class_type(const GeneralInstance& g, int m, Fn&& fn) {
  const int n = g.n();
  const int comps = g.components(m);
  struct Axis {
    std::vector<int> a;     // generator members (empty above ell(M))
    std::vector<int> rest;  // variables whose only attribute is zero/nonzero
    std::uint64_t count;
  };
  std::vector<Axis> axes;
  double types = 1;
  for (int i = 0; i < g.ell; ++i) {
    Axis ax;
    Subset a = i < comps ? g.generator(m, i) : Subset{};
    ax.a = a.members();
    for (int j = 1; j <= n; ++j) {
      if (!a.contains(j)) ax.rest.push_back(j);
    }
    ax.count = std::uint64_t{1} << ax.rest.size();
    for (std::size_t t = 1; t < ax.a.size(); ++t) ax.count *= g.p;
    types *= static_cast<double>(ax.count);
    axes.push_back(std::move(ax));
  }
  if (types > static_cast<double>(std::uint64_t{1} << 26)) {
    throw CapacityError("class-type enumeration: " + std::to_string(types) + " types exceed 2^26");
  }
  std::vector<std::uint64_t> idx(axes.size(), 0);
  ZTuple v(g.ell, std::vector<int>(n, 0));
  while (true) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const auto& ax = axes[i];
      std::uint64_t code = idx[i];
      for (std::size_t t = 0; t < ax.rest.size(); ++t) {
        v[i][ax.rest[t] - 1] = (code >> t) & 1;
      }
      code >>= ax.rest.size();
      for (std::size_t t = 0; t < ax.a.size(); ++t) {
        if (t == 0) {
          v[i][ax.a[t] - 1] = 0;
        } else {
          v[i][ax.a[t] - 1] = static_cast<int>(code % g.p);
          code /= g.p;
        }
      }
    }
    fn(v);
    std::size_t i = 0;
    for (; i < axes.size(); ++i) {
      if (++idx[i] < axes[i].count) break;
      idx[i] = 0;
    }
    if (i == axes.size()) break;
  }
}

struct GapReport {
  int j = 0;
  double gap = 0;             // ||B~_M - B^_M|| = max class off-diagonal norm
  double bound = 0;           // n^ell (bias / delta) max_S beta_S(M)^2
  double max_beta_sq = 0;
  std::uint64_t classes = 0;  // class types visited
  std::size_t max_class = 0;
};

// B~_M is diagonal with entries beta_S(M)^2 in the e_v basis and B^_M shares
// that diagonal, so the difference is the off-diagonal part of B^_M, which is
// block diagonal over equivalence classes.
inline GapReport btilde_bhat_gap(const GeneralInstance& g, const DualWitness& w, int j, int m) {
  if (w.n() != g.n() || w.cert_count() != g.cert.size()) {
    throw StructuralError("btilde_bhat_gap: witness does not match the instance structure");
  }
  if (m < 0 || m >= g.cert.size()) throw ParameterError("btilde_bhat_gap: certificate index out of range");
  DualWitness beta = delta_beta(w, j);
  GapReport r;
  r.j = j;
  for (std::size_t s = 0; s < beta.subset_count(); ++s) {
    double b = beta(Subset::from_mask(static_cast<std::uint32_t>(s)), m);
    r.max_beta_sq = std::max(r.max_beta_sq, b * b);
  }
  r.bound = std::pow(static_cast<double>(g.n()), g.ell) * (g.u.bias / g.delta) * r.max_beta_sq;
  if (r.max_beta_sq == 0) return r;
  for_each_class_type(g, m, [&](const ZTuple& v) {
    ++r.classes;
    EquivalenceClass cls = equivalence_class(g, beta, m, v);
    r.max_class = std::max(r.max_class, cls.members.size());
    r.gap = std::max(r.gap, class_offdiagonal_norm(g, beta, m, cls));
  });
  return r;
}

// Largest gap over the query index j.
inline GapReport btilde_bhat_gap_max(const GeneralInstance& g, const DualWitness& w, int m) {
  GapReport best;
  for (int j = 1; j <= g.n(); ++j) {
    GapReport r = btilde_bhat_gap(g, w, j, m);
    if (j == 1 || r.gap > best.gap) {
      GapReport keep = r;
      keep.bound = std::max(r.bound, best.bound);
      best = keep;
    } else {
      best.bound = std::max(best.bound, r.bound);
    }
  }
  return best;
}

}  // namespace lgcert
