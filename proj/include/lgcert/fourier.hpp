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
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lgcert/errors.hpp"
#include "lgcert/subset.hpp"

namespace lgcert {

using cplx = std::complex<double>;

namespace detail {

inline void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx w = std::polar(1.0, ang * static_cast<double>(k));
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

// Arbitrary length through a power-of-two convolution.
inline void bluestein(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small.
    std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(k2) /
                                   static_cast<double>(n));
  }
  std::vector<cplx> x(m), y(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
  fft_pow2(x, -1);
  fft_pow2(y, -1);
  for (std::size_t i = 0; i < m; ++i) x[i] *= y[i];
  fft_pow2(x, 1);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k] / static_cast<double>(m);
}

}  // namespace detail

// X[a] = sum_b x[b] exp(sign * 2 pi i a b / N), no normalization.
inline std::vector<cplx> dft(std::vector<cplx> x, int sign = -1) {
  if (sign != 1 && sign != -1) throw ParameterError("dft: sign must be +1 or -1");
  const std::size_t n = x.size();
  if (n <= 1) return x;
  if ((n & (n - 1)) == 0) {
    detail::fft_pow2(x, sign);
  } else {
    detail::bluestein(x, sign);
  }
  return x;
}

// DFT scaled by N^{-1/2}.
inline std::vector<cplx> unitary_dft(std::vector<cplx> x, int sign = -1) {
  const double s = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(x.size(), 1)));
  x = dft(std::move(x), sign);
  for (auto& v : x) v *= s;
  return x;
}

// (1/p) max_{a != 0} |sum_{u in U} e^{2 pi i a u / p}|.
inline double fourier_bias(std::span<const int> u, int p) {
  if (p < 1) throw ParameterError("fourier_bias: p must be positive");
  std::vector<cplx> ind(p, 0.0);
  for (int x : u) {
    if (x < 0 || x >= p) throw ParameterError("fourier_bias: element " + std::to_string(x) +
                                              " outside Z_" + std::to_string(p));
    ind[x] = 1.0;
  }
  auto f = dft(std::move(ind), 1);
  double best = 0;
  for (int a = 1; a < p; ++a) best = std::max(best, std::abs(f[a]));
  return best / p;
}

struct BiasedSet {
  int p = 0;
  std::vector<int> elements;  // sorted
  double density = 0;
  double bias = 0;
};

inline BiasedSet make_biased_set(int p, std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  BiasedSet s;
  s.p = p;
  s.bias = fourier_bias(elements, p);
  s.density = static_cast<double>(elements.size()) / p;
  s.elements = std::move(elements);
  return s;
}

// Uniform integer in [0, bound) by rejection, so results do not depend on
// the standard library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r > limit);
  return r % bound;
}

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// m distinct elements of Z_p by a partial Fisher-Yates shuffle.
inline BiasedSet random_subset(int p, int m, std::uint64_t seed) {
  if (p < 1 || m < 1 || m > p) throw ParameterError("random_subset: need 1 <= m <= p");
  std::vector<int> perm(p);
  for (int i = 0; i < p; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < m; ++i) {
    auto r = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(p - i)));
    std::swap(perm[i], perm[r]);
  }
  perm.resize(m);
  return make_biased_set(p, std::move(perm));
}

// round(delta p) elements (at least one) drawn without replacement.
inline BiasedSet random_low_bias_set(int p, double delta, std::uint64_t seed) {
  if (p < 1) throw ParameterError("random_low_bias_set: p must be positive");
  if (!(delta > 0 && delta < 1)) throw ParameterError("random_low_bias_set: delta must lie in (0, 1)");
  return random_subset(p, std::max(1, static_cast<int>(std::lround(delta * p))), seed);
}

// w + cA over Z_p; w[j-1] is the coordinate of variable j.
inline std::vector<int> shift(std::vector<int> w, Subset a, int c, int p) {
  for (int j : a.members()) {
    if (j > static_cast<int>(w.size())) throw ParameterError("shift: variable outside the tuple");
    w[j - 1] = static_cast<int>(((static_cast<long long>(w[j - 1]) + c) % p + p) % p);
  }
  return w;
}

}  // namespace lgcert
