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

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgcert/errors.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

// Largest number of stored (subset, certificate) entries in a dense witness.
inline constexpr std::uint64_t kWitnessEntryCap = std::uint64_t{1} << 25;

// Anything that can report alpha_S(M) for every certificate M at once.
template <typename W>
concept WitnessSource = requires(const W& w, Subset s, std::span<double> out) {
  { w.n() } -> std::convertible_to<int>;
  { w.cert_count() } -> std::convertible_to<int>;
  w.fill(s, out);
};

// Dense assignment alpha_S(M) over the full subset lattice, laid out
// subset-major so that one subset's values for all certificates are
// contiguous.
class DualWitness {
 public:
  DualWitness() = default;
  DualWitness(int n, int cert_count) : n_(n), certs_(cert_count) {
    require_lattice(n);
    std::uint64_t entries = (std::uint64_t{1} << n) * static_cast<std::uint64_t>(cert_count);
    if (entries > kWitnessEntryCap) {
      throw CapacityError("dense witness with " + std::to_string(entries) +
                          " entries exceeds the cap of 2^25");
    }
    alpha_.assign(entries, 0.0);
  }

  int n() const { return n_; }
  int cert_count() const { return certs_; }
  std::size_t subset_count() const { return std::size_t{1} << n_; }

  double operator()(Subset s, int m) const { return alpha_[index(s, m)]; }
  double& operator()(Subset s, int m) { return alpha_[index(s, m)]; }

  void fill(Subset s, std::span<double> out) const {
    const double* row = alpha_.data() + static_cast<std::size_t>(s.mask()) * certs_;
    std::copy(row, row + certs_, out.begin());
  }
  std::span<const double> row(Subset s) const {
    return {alpha_.data() + static_cast<std::size_t>(s.mask()) * certs_,
            static_cast<std::size_t>(certs_)};
  }

  std::vector<double>& values() { return alpha_; }
  const std::vector<double>& values() const { return alpha_; }

  // Copies any witness source into dense storage.
  template <WitnessSource W>
  static DualWitness materialize(const W& src) {
    DualWitness w(src.n(), src.cert_count());
    const std::uint32_t top = std::uint32_t{1} << src.n();
    for (std::uint32_t s = 0; s < top; ++s) {
      src.fill(Subset::from_mask(s),
               std::span<double>(w.alpha_.data() + static_cast<std::size_t>(s) * w.certs_,
                                 static_cast<std::size_t>(w.certs_)));
    }
    return w;
  }

 private:
  std::size_t index(Subset s, int m) const {
    return static_cast<std::size_t>(s.mask()) * certs_ + static_cast<std::size_t>(m);
  }

  int n_ = 0;
  int certs_ = 0;
  std::vector<double> alpha_;
};

// sqrt(sum_M alpha_empty(M)^2).
template <WitnessSource W>
double dual_objective(const W& w) {
  std::vector<double> a(w.cert_count());
  w.fill(Subset{}, a);
  double sum = 0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

struct MarginScan {
  double margin = 0;  // max over arcs of sum_M (alpha_s - alpha_t)^2
  Arc worst{};
};

namespace detail {

template <WitnessSource W>
void check_shape(const CertificateStructure& cert, const W& w) {
  if (w.n() != cert.n() || w.cert_count() != cert.size()) {
    throw StructuralError("witness shape (" + std::to_string(w.n()) + " vars, " +
                          std::to_string(w.cert_count()) +
                          " certs) does not match the structure (" +
                          std::to_string(cert.n()) + ", " + std::to_string(cert.size()) + ")");
  }
}

inline void check_zero_condition(const CertificateStructure& cert, Subset s,
                                 std::span<const double> a) {
  for (int m = 0; m < cert.size(); ++m) {
    if (a[m] != 0.0 && cert[m].contains(s)) {
      throw InvariantError("alpha_S(M) = " + std::to_string(a[m]) + " is nonzero at S = " +
                           s.to_string() + ", M = #" + std::to_string(m) +
                           " although S belongs to M");
    }
  }
}

}  // namespace detail

// Exhaustive scan of every lattice arc. Throws InvariantError if the witness
// is nonzero on some S belonging to M.
template <WitnessSource W>
MarginScan feasibility_scan(const CertificateStructure& cert, const W& w) {
  detail::check_shape(cert, w);
  const int n = cert.n();
  const int c = cert.size();
  require_lattice(n);
  std::vector<double> a(c), b(c);
  MarginScan best;
  const std::uint32_t top = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < top; ++s) {
    Subset src = Subset::from_mask(s);
    w.fill(src, a);
    detail::check_zero_condition(cert, src, a);
    for (int j = 1; j <= n; ++j) {
      if (s & Subset::bit(j)) continue;
      Subset dst = src.with(j);
      w.fill(dst, b);
      double sum = 0;
      for (int m = 0; m < c; ++m) {
        double d = a[m] - b[m];
        sum += d * d;
      }
      if (sum > best.margin) best = {sum, Arc{src, dst}};
    }
  }
  return best;
}

// The witness is feasible iff this is at most 1.
template <WitnessSource W>
double dual_feasibility_margin(const CertificateStructure& cert, const W& w) {
  return feasibility_scan(cert, w).margin;
}

// Divides every alpha by sqrt(max(margin, 1)); an all-zero witness is
// returned unchanged.
inline DualWitness normalize_witness(const DualWitness& w, const CertificateStructure& cert) {
  double margin = dual_feasibility_margin(cert, w);
  DualWitness out = w;
  if (margin <= 1.0) return out;
  const double f = 1.0 / std::sqrt(margin);
  for (double& v : out.values()) v *= f;
  return out;
}

}  // namespace lgcert
