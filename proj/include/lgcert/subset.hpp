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
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "lgcert/errors.hpp"

namespace lgcert {

// Largest variable count a Subset can hold.
inline constexpr int kMaxVariables = 32;

// A set of variable indices drawn from [1, n], stored as a bitmask where
// variable j occupies bit j-1.
class Subset {
 public:
  constexpr Subset() = default;

  static constexpr Subset from_mask(std::uint32_t mask) { return Subset(mask); }

  // Builds a subset from 1-based variable indices.
  static Subset of(std::initializer_list<int> vars) {
    return of(std::vector<int>(vars));
  }
  static Subset of(const std::vector<int>& vars) {
    std::uint32_t m = 0;
    for (int v : vars) {
      if (v < 1 || v > kMaxVariables) {
        throw ParameterError("variable index " + std::to_string(v) +
                             " outside [1, 32]");
      }
      m |= bit(v);
    }
    return Subset(m);
  }

  // The full set [n].
  static constexpr Subset full(int n) {
    return Subset(n >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(int var) const { return (mask_ & bit(var)) != 0; }
  constexpr bool is_subset_of(Subset other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  constexpr bool within(int n) const { return is_subset_of(full(n)); }

  constexpr Subset with(int var) const { return Subset(mask_ | bit(var)); }
  constexpr Subset without(int var) const { return Subset(mask_ & ~bit(var)); }
  constexpr Subset operator|(Subset o) const { return Subset(mask_ | o.mask_); }
  constexpr Subset operator&(Subset o) const { return Subset(mask_ & o.mask_); }

  // Largest element, or 0 for the empty set.
  constexpr int max_element() const { return 32 - std::countl_zero(mask_); }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
      out.push_back(std::countr_zero(m) + 1);
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int v : members()) {
      if (!first) s += ",";
      s += std::to_string(v);
      first = false;
    }
    return s + "}";
  }

  constexpr auto operator<=>(const Subset&) const = default;

  static constexpr std::uint32_t bit(int var) {
    return std::uint32_t{1} << (var - 1);
  }

 private:
  constexpr explicit Subset(std::uint32_t mask) : mask_(mask) {}
  std::uint32_t mask_ = 0;
};

// Exact binomial coefficient; throws CapacityError on 64-bit overflow.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > ~std::uint64_t{0} / num) {
      throw CapacityError("binomial(" + std::to_string(n) + "," +
                          std::to_string(k) + ") overflows 64 bits");
    }
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace lgcert
