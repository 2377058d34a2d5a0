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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgcert/errors.hpp"
#include "lgcert/hash.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

// Inputs [q]^n are enumerated only up to this many points.
inline constexpr std::uint64_t kInputCap = std::uint64_t{1} << 24;

// q^k, or CapacityError naming `what` when it exceeds `cap`.
inline std::uint64_t checked_power(int q, int k, std::uint64_t cap, const std::string& what) {
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (r > cap / static_cast<std::uint64_t>(q)) {
      throw CapacityError(what + ": " + std::to_string(q) + "^" + std::to_string(k) +
                          " exceeds the enumeration cap " + std::to_string(cap));
    }
    r *= static_cast<std::uint64_t>(q);
  }
  return r;
}

// Set of tuples in [q]^k, kept sorted and duplicate-free.
class OrthogonalArray {
 public:
  OrthogonalArray(int q, int k, std::vector<std::vector<int>> rows)
      : q_(q), k_(k), rows_(std::move(rows)) {
    if (q < 2) throw ParameterError("orthogonal array: q must be >= 2");
    if (k < 1) throw ParameterError("orthogonal array: k must be >= 1");
    for (const auto& r : rows_) {
      if (static_cast<int>(r.size()) != k) {
        throw ParameterError("orthogonal array: row of length " + std::to_string(r.size()) +
                             ", expected " + std::to_string(k));
      }
      for (int v : r) {
        if (v < 0 || v >= q) {
          throw ParameterError("orthogonal array: symbol " + std::to_string(v) +
                               " outside [0, " + std::to_string(q) + ")");
        }
      }
    }
    std::sort(rows_.begin(), rows_.end());
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
  }

  int q() const { return q_; }
  int k() const { return k_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::vector<int>>& rows() const { return rows_; }

  bool contains(std::span<const int> t) const {
    return std::binary_search(rows_.begin(), rows_.end(), t,
                              [](const auto& a, const auto& b) {
                                return std::lexicographical_compare(a.begin(), a.end(),
                                                                    b.begin(), b.end());
                              });
  }

  // Membership table indexed by sum_c t_c q^c.
  std::vector<std::uint8_t> table() const {
    std::vector<std::uint8_t> t(checked_power(q_, k_, kInputCap, "array table"), 0);
    for (const auto& r : rows_) {
      std::uint64_t idx = 0;
      for (int c = k_ - 1; c >= 0; --c) idx = idx * q_ + r[c];
      t[idx] = 1;
    }
    return t;
  }

  std::uint64_t hash() const {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(q_)).add(static_cast<std::uint64_t>(k_));
    h.add(rows_.size());
    for (const auto& r : rows_) {
      for (int v : r) h.add(static_cast<std::uint64_t>(v));
    }
    return h.value();
  }

 private:
  int q_;
  int k_;
  std::vector<std::vector<int>> rows_;
};

// {x in [q]^k : sum x = 0 mod q}.
inline OrthogonalArray sum_array(int q, int k) {
  if (q < 2) throw ParameterError("sum_array: q must be >= 2");
  if (k < 1) throw ParameterError("sum_array: k must be >= 1");
  const std::uint64_t total = checked_power(q, k, kInputCap, "sum_array");
  std::vector<std::vector<int>> rows;
  rows.reserve(total / q);
  std::vector<int> t(k, 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    int s = 0;
    for (int v : t) s += v;
    if (s % q == 0) rows.push_back(t);
    for (int c = k - 1; c >= 0; --c) {
      if (++t[c] < q) break;
      t[c] = 0;
    }
  }
  return OrthogonalArray(q, k, std::move(rows));
}

struct ArrayCounterexample {
  int index = 0;                // 1-based free coordinate
  std::vector<int> assignment;  // length k, -1 at the free coordinate
  std::uint64_t count = 0;      // completions found
};

struct ArrayVerification {
  bool ok = false;
  bool divisible = true;
  double expected = 0;  // |T| / q^{k-1}
  std::string note;
  std::optional<ArrayCounterexample> counterexample;
};

// Checks that every assignment of k-1 coordinates has exactly |T|/q^{k-1}
// completions. The reported counterexample has the largest deviation; ties go
// to the larger free index, then to the lexicographically smallest assignment.
inline ArrayVerification verify_orthogonal_array(const OrthogonalArray& t) {
  const int q = t.q();
  const int k = t.k();
  const std::uint64_t cells = checked_power(q, k - 1, kInputCap, "verify_orthogonal_array");
  ArrayVerification out;
  out.expected = static_cast<double>(t.size()) / static_cast<double>(cells);
  if (t.size() % cells != 0) {
    out.divisible = false;
    out.note = "|T| = " + std::to_string(t.size()) + " is not divisible by q^(k-1) = " +
               std::to_string(cells);
  }

  double worst = 0;
  std::vector<std::uint64_t> counts(cells);
  for (int i = k - 1; i >= 0; --i) {
    std::fill(counts.begin(), counts.end(), 0);
    // Key with the first remaining coordinate most significant, so key order
    // is lexicographic order of the assignment.
    for (const auto& r : t.rows()) {
      std::uint64_t key = 0;
      for (int c = 0; c < k; ++c) {
        if (c != i) key = key * q + r[c];
      }
      ++counts[key];
    }
    for (std::uint64_t key = 0; key < cells; ++key) {
      double dev = std::abs(static_cast<double>(counts[key]) - out.expected);
      if (dev > 1e-12 && dev > worst) {
        worst = dev;
        ArrayCounterexample ce;
        ce.index = i + 1;
        ce.count = counts[key];
        ce.assignment.assign(k, -1);
        std::uint64_t rest = key;
        for (int c = k - 1; c >= 0; --c) {
          if (c == i) continue;
          ce.assignment[c] = static_cast<int>(rest % q);
          rest /= q;
        }
        out.counterexample = std::move(ce);
      }
    }
  }
  out.ok = out.divisible && !out.counterexample;
  return out;
}

enum class FValue { one, zero, outside_promise };

inline std::string_view to_string(FValue v) {
  switch (v) {
    case FValue::one: return "one";
    case FValue::zero: return "zero";
    case FValue::outside_promise: return "outside_promise";
  }
  return "?";
}

// Inputs are encoded as sum_j x_j q^{j-1}.
class HardInstance {
 public:
  // arrays[m][i] constrains the coordinates of the i-th generator of
  // certificate m, listed in increasing variable order.
  static HardInstance from_arrays(CertificateStructure cert, int q,
                                  std::vector<std::vector<OrthogonalArray>> arrays) {
    if (q < 2) throw ParameterError("instance: q must be >= 2");
    const std::uint64_t total = checked_power(q, cert.n(), kInputCap, "instance inputs");
    if (static_cast<int>(arrays.size()) != cert.size()) {
      throw StructuralError("instance: " + std::to_string(arrays.size()) +
                            " array lists for " + std::to_string(cert.size()) + " certificates");
    }
    for (int m = 0; m < cert.size(); ++m) {
      const auto& gens = cert[m].minimal_sets();
      if (arrays[m].size() != gens.size()) {
        throw StructuralError("instance: certificate " + std::to_string(m) + " has " +
                              std::to_string(gens.size()) + " generators but " +
                              std::to_string(arrays[m].size()) + " arrays");
      }
      for (std::size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].empty()) throw ParameterError("instance: empty generator has no array");
        if (arrays[m][i].q() != q || arrays[m][i].k() != gens[i].size()) {
          throw StructuralError("instance: array for certificate " + std::to_string(m) +
                                " generator " + gens[i].to_string() + " has shape (q=" +
                                std::to_string(arrays[m][i].q()) + ", k=" +
                                std::to_string(arrays[m][i].k()) + ")");
        }
      }
    }
    HardInstance inst(std::move(cert), q, std::move(arrays), total);
    inst.enumerate();
    return inst;
  }

  const CertificateStructure& cert() const { return cert_; }
  int q() const { return q_; }
  int n() const { return cert_.n(); }
  std::uint64_t input_count() const { return total_; }
  const std::vector<std::vector<OrthogonalArray>>& arrays() const { return arrays_; }

  // X_M and Y as sorted input codes.
  const std::vector<std::uint32_t>& positives(int m) const { return x_.at(m); }
  const std::vector<std::uint32_t>& negatives() const { return y_; }

  int digit(std::uint32_t x, int var) const {
    return static_cast<int>((x / pow_[var - 1]) % static_cast<std::uint64_t>(q_));
  }
  std::vector<int> decode(std::uint32_t x) const {
    std::vector<int> d(n());
    for (int j = 0; j < n(); ++j) {
      d[j] = static_cast<int>(x % q_);
      x /= q_;
    }
    return d;
  }
  std::uint32_t encode(std::span<const int> digits) const {
    if (static_cast<int>(digits.size()) != n()) {
      throw ParameterError("input has " + std::to_string(digits.size()) + " coordinates, expected " +
                           std::to_string(n()));
    }
    std::uint64_t x = 0;
    for (int j = n() - 1; j >= 0; --j) {
      if (digits[j] < 0 || digits[j] >= q_) {
        throw ParameterError("input symbol " + std::to_string(digits[j]) + " outside [0, " +
                             std::to_string(q_) + ")");
      }
      x = x * q_ + digits[j];
    }
    return static_cast<std::uint32_t>(x);
  }

  bool satisfies(std::uint32_t x, int m, int i) const {
    Subset a = cert_[m].minimal_sets()[i];
    std::uint64_t idx = 0;
    auto vars = a.members();
    for (int c = static_cast<int>(vars.size()) - 1; c >= 0; --c) idx = idx * q_ + digit(x, vars[c]);
    return tables_[m][i][idx] != 0;
  }
  bool in_positive(std::uint32_t x, int m) const {
    return std::binary_search(x_[m].begin(), x_[m].end(), x);
  }
  bool in_negative(std::uint32_t x) const { return std::binary_search(y_.begin(), y_.end(), x); }

  std::uint64_t hash() const {
    Fnv1a h;
    h.add(structure_hash(cert_)).add(static_cast<std::uint64_t>(q_));
    for (const auto& per : arrays_) {
      for (const auto& a : per) h.add(a.hash());
    }
    return h.value();
  }

 private:
  HardInstance(CertificateStructure cert, int q, std::vector<std::vector<OrthogonalArray>> arrays,
               std::uint64_t total)
      : cert_(std::move(cert)), q_(q), arrays_(std::move(arrays)), total_(total) {
    pow_.resize(cert_.n());
    std::uint64_t p = 1;
    for (int j = 0; j < cert_.n(); ++j) {
      pow_[j] = p;
      p *= q_;
    }
    tables_.resize(arrays_.size());
    for (std::size_t m = 0; m < arrays_.size(); ++m) {
      for (const auto& a : arrays_[m]) tables_[m].push_back(a.table());
    }
  }

  void enumerate() {
    const int c = cert_.size();
    x_.assign(c, {});
    std::vector<int> digits(n(), 0);
    std::vector<std::vector<std::vector<int>>> vars(c);
    for (int m = 0; m < c; ++m) {
      for (Subset a : cert_[m].minimal_sets()) vars[m].push_back(a.members());
    }
    for (std::uint64_t x = 0; x < total_; ++x) {
      bool any_array = false;
      for (int m = 0; m < c; ++m) {
        bool all = true;
        for (std::size_t i = 0; i < vars[m].size(); ++i) {
          const auto& v = vars[m][i];
          std::uint64_t idx = 0;
          for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k) idx = idx * q_ + digits[v[k] - 1];
          if (tables_[m][i][idx]) {
            any_array = true;
          } else {
            all = false;
          }
        }
        if (all) x_[m].push_back(static_cast<std::uint32_t>(x));
      }
      if (!any_array) y_.push_back(static_cast<std::uint32_t>(x));
      for (int j = 0; j < n(); ++j) {
        if (++digits[j] < q_) break;
        digits[j] = 0;
      }
    }
  }

  CertificateStructure cert_;
  int q_;
  std::vector<std::vector<OrthogonalArray>> arrays_;
  std::uint64_t total_;
  std::vector<std::uint64_t> pow_;
  std::vector<std::vector<std::vector<std::uint8_t>>> tables_;
  std::vector<std::vector<std::uint32_t>> x_;
  std::vector<std::uint32_t> y_;
};

// Instance for a structure with one generator per certificate. Arrays default
// to sum arrays; a supplied list holds one array per certificate.
inline HardInstance build_bounded_instance(const CertificateStructure& cert, int q,
                                           std::optional<std::vector<OrthogonalArray>> arrays = {}) {
  for (int m = 0; m < cert.size(); ++m) {
    if (cert[m].generator_count() != 1) {
      throw StructuralError("build_bounded_instance: certificate " + std::to_string(m) + " has " +
                            std::to_string(cert[m].generator_count()) +
                            " minimal sets; bounded instances need exactly one");
    }
  }
  if (q < 2 * cert.size()) {
    throw ParameterError("build_bounded_instance: q = " + std::to_string(q) + " < 2|C| = " +
                         std::to_string(2 * cert.size()) + " (needs q >= 2|C|)");
  }
  checked_power(q, cert.n(), kInputCap, "build_bounded_instance");
  std::vector<std::vector<OrthogonalArray>> per;
  per.reserve(cert.size());
  if (arrays) {
    if (static_cast<int>(arrays->size()) != cert.size()) {
      throw StructuralError("build_bounded_instance: " + std::to_string(arrays->size()) +
                            " arrays for " + std::to_string(cert.size()) + " certificates");
    }
    for (const auto& a : *arrays) per.push_back({a});
  } else {
    for (int m = 0; m < cert.size(); ++m) {
      per.push_back({sum_array(q, cert[m].minimal_sets()[0].size())});
    }
  }
  return HardInstance::from_arrays(cert, q, std::move(per));
}

inline FValue evaluate_f(const HardInstance& inst, std::span<const int> x) {
  const std::uint32_t code = inst.encode(x);
  for (int m = 0; m < inst.cert().size(); ++m) {
    if (inst.in_positive(code, m)) return FValue::one;
  }
  return inst.in_negative(code) ? FValue::zero : FValue::outside_promise;
}

struct OrthogonalityViolation {
  Subset s;
  std::vector<int> z;  // values on the members of s, increasing variable order
  std::uint64_t count = 0;
  double expected = 0;
};

struct OrthogonalityCheck {
  bool ok = true;
  std::uint64_t sets_checked = 0;
  std::optional<OrthogonalityViolation> violation;
};

// For every S outside certificate m and every z in [q]^S, counts the x in X_M
// with x_S = z against |X_M| / q^|S|. Reports the first violation in
// increasing mask order, then lexicographic z.
inline OrthogonalityCheck verify_orthogonality_property(const HardInstance& inst, int m) {
  if (m < 0 || m >= inst.cert().size()) throw ParameterError("certificate index out of range");
  const auto& xm = inst.positives(m);
  const int n = inst.n();
  const int q = inst.q();
  if ((std::uint64_t{1} << n) * std::max<std::uint64_t>(xm.size(), 1) > (std::uint64_t{1} << 34)) {
    throw CapacityError("orthogonality check: 2^n * |X_M| exceeds 2^34");
  }
  OrthogonalityCheck out;
  std::vector<std::uint64_t> counts;
  const std::uint32_t top = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    Subset s = Subset::from_mask(mask);
    if (inst.cert()[m].contains(s)) continue;
    ++out.sets_checked;
    auto vars = s.members();
    const std::uint64_t cells = checked_power(q, s.size(), kInputCap, "orthogonality check");
    counts.assign(cells, 0);
    for (std::uint32_t x : xm) {
      std::uint64_t key = 0;
      for (int v : vars) key = key * q + inst.digit(x, v);
      ++counts[key];
    }
    for (std::uint64_t key = 0; key < cells; ++key) {
      if (counts[key] * cells == xm.size()) continue;
      OrthogonalityViolation v;
      v.s = s;
      v.count = counts[key];
      v.expected = static_cast<double>(xm.size()) / static_cast<double>(cells);
      v.z.assign(vars.size(), 0);
      std::uint64_t rest = key;
      for (int c = static_cast<int>(vars.size()) - 1; c >= 0; --c) {
        v.z[c] = static_cast<int>(rest % q);
        rest /= q;
      }
      out.ok = false;
      out.violation = std::move(v);
      return out;
    }
  }
  return out;
}

}  // namespace lgcert
