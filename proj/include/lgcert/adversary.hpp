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
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgcert/arrays.hpp"
#include "lgcert/dual_witness.hpp"
#include "lgcert/errors.hpp"
#include "lgcert/fourier.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {

// ---------------------------------------------------------------------------
// Bases and projectors.

enum class BasisFlavor { real_householder, fourier };

// Orthonormal columns e_0 .. e_{q-1} of C^q with e_0 = (1, ..., 1)/sqrt(q).
struct UnitBasis {
  int q = 0;
  BasisFlavor flavor = BasisFlavor::real_householder;
  Eigen::MatrixXcd vectors;

  // sum_i e_i e_i^* over the given columns.
  Eigen::MatrixXcd projector(int first, int last) const {
    return vectors.middleCols(first, last - first) * vectors.middleCols(first, last - first).adjoint();
  }
  Eigen::MatrixXcd e0() const { return projector(0, 1); }
  Eigen::MatrixXcd e1() const { return projector(1, q); }
};

inline UnitBasis build_basis(int q, BasisFlavor flavor = BasisFlavor::real_householder) {
  if (q < 2) throw ParameterError("build_basis: q must be >= 2");
  UnitBasis b;
  b.q = q;
  b.flavor = flavor;
  b.vectors.resize(q, q);
  if (flavor == BasisFlavor::fourier) {
    const double s = 1.0 / std::sqrt(static_cast<double>(q));
    for (int a = 0; a < q; ++a) {
      for (int x = 0; x < q; ++x) {
        int ax = static_cast<int>((static_cast<long long>(a) * x) % q);
        b.vectors(x, a) = std::polar(s, 2 * std::numbers::pi * ax / q);
      }
    }
  } else {
    // Householder reflection exchanging the first standard vector with e_0.
    Eigen::VectorXd f = Eigen::VectorXd::Constant(q, 1.0 / std::sqrt(static_cast<double>(q)));
    Eigen::VectorXd u = -f;
    u(0) += 1.0;
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(q, q) - 2.0 * u * u.transpose() / u.squaredNorm();
    b.vectors = h.cast<cplx>();
  }
  return b;
}

// E_S = (x)_j E_{s_j} on [q]^n, inputs ordered with coordinate 1 fastest.
inline Eigen::MatrixXcd projector_matrix(Subset s, int n, const UnitBasis& basis) {
  Eigen::MatrixXcd e0 = basis.e0();
  Eigen::MatrixXcd e1 = basis.e1();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (int j = n; j >= 1; --j) {
    const Eigen::MatrixXcd& f = s.contains(j) ? e1 : e0;
    Eigen::MatrixXcd next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
      }
    }
    out = std::move(next);
  }
  return out;
}

// beta_S(M) = alpha_S(M) - alpha_{S+j}(M) for j outside S, zero otherwise.
inline DualWitness delta_beta(const DualWitness& w, int j) {
  if (j < 1 || j > w.n()) throw ParameterError("delta_beta: index " + std::to_string(j) + " outside [1, n]");
  DualWitness beta(w.n(), w.cert_count());
  const std::uint32_t top = std::uint32_t{1} << w.n();
  for (std::uint32_t s = 0; s < top; ++s) {
    Subset src = Subset::from_mask(s);
    if (src.contains(j)) continue;
    for (int m = 0; m < w.cert_count(); ++m) beta(src, m) = w(src, m) - w(src.with(j), m);
  }
  return beta;
}

// g(D) = q^{-n} sum_S c_S prod_{j in S} (j in D ? q-1 : -1), the entry of
// sum_S c_S E_S at inputs agreeing exactly on D.
inline std::vector<double> agreement_kernel(std::span<const double> coeff, int n, int q) {
  std::vector<double> t(coeff.begin(), coeff.end());
  for (int j = 0; j < n; ++j) {
    const std::uint32_t bit = std::uint32_t{1} << j;
    for (std::uint32_t mask = 0; mask < t.size(); ++mask) {
      if (mask & bit) continue;
      double a = t[mask], b = t[mask | bit];
      t[mask] = a - b;
      t[mask | bit] = a + (q - 1) * b;
    }
  }
  const double scale = std::pow(static_cast<double>(q), -n);
  for (double& v : t) v *= scale;
  return t;
}

// ---------------------------------------------------------------------------
// Block operators.

// Rows are stacked blocks (certificate, inputs, scale); block m holds
// scale * sum_S c_S(M) E_S restricted to its inputs and the shared columns.
class BlockOperator {
 public:
  struct RowBlock {
    int cert = 0;
    std::vector<std::uint32_t> inputs;
    double scale = 1.0;
  };

  BlockOperator(int n, int q, const DualWitness& coeff, std::vector<RowBlock> blocks,
                std::vector<std::uint32_t> cols)
      : n_(n), q_(q), blocks_(std::move(blocks)), cols_(std::move(cols)) {
    if (coeff.n() != n) throw StructuralError("block operator: coefficient table on the wrong n");
    total_ = checked_power(q, n, kInputCap, "block operator");
    pow_.resize(n);
    std::uint64_t p = 1;
    for (int j = 0; j < n; ++j) {
      pow_[j] = p;
      p *= q;
    }
    coeff_.resize(coeff.cert_count());
    kernel_.resize(coeff.cert_count());
    for (int m = 0; m < coeff.cert_count(); ++m) {
      coeff_[m].resize(coeff.subset_count());
      for (std::size_t s = 0; s < coeff.subset_count(); ++s) {
        coeff_[m][s] = coeff(Subset::from_mask(static_cast<std::uint32_t>(s)), m);
      }
      kernel_[m] = agreement_kernel(coeff_[m], n, q);
    }
    std::size_t r = 0;
    for (const auto& b : blocks_) {
      if (b.cert < 0 || b.cert >= coeff.cert_count()) throw StructuralError("block operator: bad certificate index");
      row_offset_.push_back(r);
      r += b.inputs.size();
    }
    rows_ = r;
  }

  int n() const { return n_; }
  int q() const { return q_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_.size(); }
  const std::vector<RowBlock>& blocks() const { return blocks_; }
  const std::vector<std::uint32_t>& columns() const { return cols_; }
  std::optional<int> delta() const { return delta_; }

  // Same operator with every entry at x_j = y_j set to zero.
  BlockOperator with_delta(int j) const {
    if (j < 1 || j > n_) throw ParameterError("with_delta: index outside [1, n]");
    BlockOperator out = *this;
    out.delta_ = j;
    return out;
  }

  int digit(std::uint32_t x, int var) const {
    return static_cast<int>((x / pow_[var - 1]) % static_cast<std::uint64_t>(q_));
  }
  std::uint32_t agreement(std::uint32_t x, std::uint32_t y) const {
    std::uint32_t d = 0;
    for (int j = 0; j < n_; ++j) {
      if (x % q_ == y % q_) d |= std::uint32_t{1} << j;
      x /= q_;
      y /= q_;
    }
    return d;
  }

  double block_entry(int block, std::uint32_t x, std::uint32_t y) const {
    std::uint32_t d = agreement(x, y);
    if (delta_ && (d & Subset::bit(*delta_))) return 0.0;
    const auto& b = blocks_[block];
    return b.scale * kernel_[b.cert][d];
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd a(rows_, cols_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& in = blocks_[b].inputs;
      for (std::size_t r = 0; r < in.size(); ++r) {
        for (std::size_t c = 0; c < cols_.size(); ++c) {
          a(row_offset_[b] + r, c) = block_entry(static_cast<int>(b), in[r], cols_[c]);
        }
      }
    }
    return a;
  }

  // out = A v without forming A.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(rows_);
    std::vector<double> full(total_);
    auto run = [&](std::optional<int> sym, double sign) {
      std::fill(full.begin(), full.end(), 0.0);
      for (std::size_t c = 0; c < cols_.size(); ++c) {
        if (sym && digit(cols_[c], *delta_) != *sym) continue;
        full[cols_[c]] = v(c);
      }
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        auto g = apply_full(blocks_[b].cert, full);
        const auto& in = blocks_[b].inputs;
        for (std::size_t r = 0; r < in.size(); ++r) {
          if (sym && digit(in[r], *delta_) != *sym) continue;
          out(row_offset_[b] + r) += sign * blocks_[b].scale * g[in[r]];
        }
      }
    };
    run(std::nullopt, 1.0);
    if (delta_) {
      for (int c = 0; c < q_; ++c) run(c, -1.0);
    }
    return out;
  }

  // out = A^T v; each block sum_S c_S E_S is symmetric.
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(cols_.size());
    std::vector<double> full(total_);
    auto run = [&](std::optional<int> sym, double sign) {
      std::vector<double> acc(total_, 0.0);
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::fill(full.begin(), full.end(), 0.0);
        const auto& in = blocks_[b].inputs;
        for (std::size_t r = 0; r < in.size(); ++r) {
          if (sym && digit(in[r], *delta_) != *sym) continue;
          full[in[r]] = blocks_[b].scale * v(row_offset_[b] + r);
        }
        auto g = apply_full(blocks_[b].cert, full);
        for (std::uint64_t x = 0; x < total_; ++x) acc[x] += g[x];
      }
      for (std::size_t c = 0; c < cols_.size(); ++c) {
        if (sym && digit(cols_[c], *delta_) != *sym) continue;
        out(c) += sign * acc[cols_[c]];
      }
    };
    run(std::nullopt, 1.0);
    if (delta_) {
      for (int c = 0; c < q_; ++c) run(c, -1.0);
    }
    return out;
  }

 private:
  // (sum_S c_S E_S) f over all of [q]^n. Each coordinate splits a vector into
  // its E_0 part (average along that coordinate) and E_1 part (remainder).
  std::vector<double> apply_full(int cert, const std::vector<double>& f) const {
    std::vector<double> out(total_, 0.0);
    std::vector<std::vector<double>> stack(n_ + 1, std::vector<double>(total_));
    stack[0] = f;
    recurse(coeff_[cert], 0, 0, stack, out);
    return out;
  }

  void recurse(const std::vector<double>& c, int j, std::uint32_t mask,
               std::vector<std::vector<double>>& stack, std::vector<double>& out) const {
    const auto& u = stack[j];
    if (j == n_) {
      if (c[mask] != 0.0) {
        for (std::uint64_t x = 0; x < total_; ++x) out[x] += c[mask] * u[x];
      }
      return;
    }
    // Subtrees whose coefficients all vanish are skipped.
    const std::uint32_t rest = ((std::uint32_t{1} << n_) - 1) & ~((std::uint32_t{2} << j) - 1);
    auto live = [&](std::uint32_t prefix) {
      for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
        if (c[prefix | sub] != 0.0) return true;
        if (sub == 0) return false;
      }
    };
    auto& next = stack[j + 1];
    const std::uint64_t stride = pow_[j];
    const double inv = 1.0 / q_;
    for (int part = 0; part < 2; ++part) {
      const std::uint32_t m = part ? (mask | (std::uint32_t{1} << j)) : mask;
      if (!live(m)) continue;
      for (std::uint64_t base = 0; base < total_; ++base) {
        if ((base / stride) % q_ != 0) continue;
        double mean = 0;
        for (int a = 0; a < q_; ++a) mean += u[base + a * stride];
        mean *= inv;
        for (int a = 0; a < q_; ++a) {
          const std::uint64_t x = base + a * stride;
          next[x] = part ? u[x] - mean : mean;
        }
      }
      recurse(c, j + 1, m, stack, out);
    }
  }

  int n_;
  int q_;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> pow_;
  std::vector<std::vector<double>> coeff_;
  std::vector<std::vector<double>> kernel_;
  std::vector<RowBlock> blocks_;
  std::vector<std::size_t> row_offset_;
  std::size_t rows_ = 0;
  std::vector<std::uint32_t> cols_;
  std::optional<int> delta_;
};

// Every certificate block over all of [q]^n. Coefficients alpha give Gamma~,
// coefficients beta give Gamma~'.
inline BlockOperator assemble_tilde(const DualWitness& coeff, int q) {
  const std::uint64_t total = checked_power(q, coeff.n(), kInputCap, "assemble_tilde");
  std::vector<std::uint32_t> all(total);
  for (std::uint64_t x = 0; x < total; ++x) all[x] = static_cast<std::uint32_t>(x);
  std::vector<BlockOperator::RowBlock> blocks;
  for (int m = 0; m < coeff.cert_count(); ++m) blocks.push_back({m, all, 1.0});
  return BlockOperator(coeff.n(), q, coeff, std::move(blocks), std::move(all));
}

enum class ColumnSet { negatives, all_inputs };

inline void check_compatible(const HardInstance& inst, const DualWitness& w) {
  if (w.n() != inst.n() || w.cert_count() != inst.cert().size()) {
    throw StructuralError("witness shape (n=" + std::to_string(w.n()) + ", |C|=" +
                          std::to_string(w.cert_count()) + ") does not match the instance (n=" +
                          std::to_string(inst.n()) + ", |C|=" +
                          std::to_string(inst.cert().size()) + ")");
  }
}

// Rows (x, M) with x in X_M, scaled by sqrt(q^n / |X_M|). Columns Y give
// Gamma (from alpha) or Gamma' (from beta); all columns give Gamma^.
inline BlockOperator assemble(const HardInstance& inst, const DualWitness& coeff, ColumnSet cols,
                              bool verify_orthogonality = true) {
  check_compatible(inst, coeff);
  std::vector<BlockOperator::RowBlock> blocks;
  for (int m = 0; m < inst.cert().size(); ++m) {
    const auto& xm = inst.positives(m);
    if (xm.empty()) continue;
    if (verify_orthogonality) {
      auto chk = verify_orthogonality_property(inst, m);
      if (!chk.ok) {
        throw InvariantError("X_M for certificate " + std::to_string(m) +
                             " is not uniform on " + chk.violation->s.to_string());
      }
    }
    const double scale = std::sqrt(static_cast<double>(inst.input_count()) / xm.size());
    blocks.push_back({m, xm, scale});
  }
  std::vector<std::uint32_t> columns;
  if (cols == ColumnSet::negatives) {
    columns = inst.negatives();
  } else {
    columns.resize(inst.input_count());
    for (std::uint64_t x = 0; x < inst.input_count(); ++x) columns[x] = static_cast<std::uint32_t>(x);
  }
  return BlockOperator(inst.n(), inst.q(), coeff, std::move(blocks), std::move(columns));
}

// ---------------------------------------------------------------------------
// Spectral norms.

enum class NormMethod { automatic, dense_eigen, power_iteration };

inline std::string_view to_string(NormMethod m) {
  switch (m) {
    case NormMethod::automatic: return "automatic";
    case NormMethod::dense_eigen: return "dense_eigen";
    case NormMethod::power_iteration: return "power_iteration";
  }
  return "?";
}

struct SpectralReport {
  double norm = 0;
  int iterations = 0;
  double residual = 0;
  NormMethod method = NormMethod::dense_eigen;
  bool converged = true;
};

struct PowerParams {
  double tolerance = 1e-9;  // on the Rayleigh quotient change, relative
  int max_iterations = 5000;
  std::uint64_t seed = 0;
};

// Dense path limits: smaller side of the Gram matrix and total entries.
inline constexpr std::size_t kDenseGramCap = 4096;
inline constexpr std::size_t kDenseEntryCap = std::size_t{1} << 24;

inline bool dense_feasible(std::size_t rows, std::size_t cols) {
  return std::min(rows, cols) <= kDenseGramCap && rows * cols <= kDenseEntryCap;
}

inline SpectralReport dense_norm(const Eigen::MatrixXd& a) {
  SpectralReport r;
  r.method = NormMethod::dense_eigen;
  if (a.size() == 0) return r;
  Eigen::MatrixXd g = a.rows() >= a.cols() ? Eigen::MatrixXd(a.transpose() * a)
                                            : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) {
    r.converged = false;
    return r;
  }
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  r.norm = std::sqrt(top);
  Eigen::VectorXd v = es.eigenvectors().col(es.eigenvalues().size() - 1);
  r.residual = (g * v - top * v).norm() / std::max(1.0, top);
  return r;
}

// Power iteration on A^T A. The start vector is all-ones plus a seeded
// perturbation; all-ones alone can sit inside a single eigenspace.
template <typename Apply, typename ApplyT>
SpectralReport power_norm(const Apply& apply, const ApplyT& apply_t, std::size_t cols,
                          const PowerParams& params = {}) {
  SpectralReport r;
  r.method = NormMethod::power_iteration;
  r.converged = false;
  if (cols == 0) {
    r.converged = true;
    return r;
  }
  std::mt19937_64 rng(params.seed);
  Eigen::VectorXd x(cols);
  for (std::size_t i = 0; i < cols; ++i) x(i) = 1.0 + (uniform_unit(rng) - 0.5);
  x.normalize();
  double lambda = 0;
  for (int it = 1; it <= params.max_iterations; ++it) {
    Eigen::VectorXd y = apply_t(apply(x));
    const double next = x.dot(y);
    const double ny = y.norm();
    r.iterations = it;
    if (ny == 0) {
      lambda = 0;
      r.residual = 0;
      r.converged = true;
      break;
    }
    r.residual = (y - next * x).norm() / std::max(1.0, next);
    x = y / ny;
    const bool settled = it > 1 && std::abs(next - lambda) <= params.tolerance * std::max(1.0, next);
    lambda = next;
    if (settled) {
      r.converged = true;
      break;
    }
  }
  r.norm = std::sqrt(std::max(lambda, 0.0));
  return r;
}

inline SpectralReport spectral_norm(const Eigen::MatrixXd& a, NormMethod method = NormMethod::automatic,
                                    const PowerParams& params = {}) {
  if (method == NormMethod::power_iteration) {
    return power_norm([&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a * v); },
                      [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(a.transpose() * v); },
                      static_cast<std::size_t>(a.cols()), params);
  }
  return dense_norm(a);
}

inline SpectralReport spectral_norm(const BlockOperator& op, NormMethod method = NormMethod::automatic,
                                    const PowerParams& params = {}) {
  if (method == NormMethod::automatic) {
    method = dense_feasible(op.rows(), op.cols()) ? NormMethod::dense_eigen : NormMethod::power_iteration;
  }
  if (method == NormMethod::dense_eigen) {
    if (!dense_feasible(op.rows(), op.cols())) {
      throw CapacityError("dense spectral norm: " + std::to_string(op.rows()) + " x " +
                          std::to_string(op.cols()) + " exceeds the dense limits");
    }
    return dense_norm(op.dense());
  }
  return power_norm([&](const Eigen::VectorXd& v) { return op.apply(v); },
                    [&](const Eigen::VectorXd& v) { return op.apply_adjoint(v); }, op.cols(), params);
}

// A o Delta_j for a dense matrix whose rows and columns carry the symbol of
// coordinate j.
inline Eigen::MatrixXd hadamard_delta(const Eigen::MatrixXd& a, std::span<const int> row_symbols,
                                      std::span<const int> col_symbols) {
  if (static_cast<Eigen::Index>(row_symbols.size()) != a.rows() ||
      static_cast<Eigen::Index>(col_symbols.size()) != a.cols()) {
    throw StructuralError("hadamard_delta: label count does not match the matrix shape");
  }
  Eigen::MatrixXd out = a;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (row_symbols[r] == col_symbols[c]) out(r, c) = 0.0;
    }
  }
  return out;
}

struct DeltaNorm {
  BlockOperator op;
  SpectralReport report;
};

inline DeltaNorm hadamard_delta(const BlockOperator& op, int j, NormMethod method = NormMethod::automatic) {
  BlockOperator d = op.with_delta(j);
  SpectralReport r = spectral_norm(d, method);
  return {std::move(d), r};
}

// ---------------------------------------------------------------------------
// Bounded-generation pipeline.

// part[m][S] in 1..k: the lowest i whose generator element a_{M,i} is missing
// from S; 0 when S belongs to M.
struct LmiPartition {
  int k = 0;
  std::vector<std::vector<int>> part;
};

inline LmiPartition lmi_partition(const CertificateStructure& cert) {
  require_lattice(cert.n());
  LmiPartition out;
  for (int m = 0; m < cert.size(); ++m) {
    if (cert[m].generator_count() != 1) {
      throw StructuralError("lmi_partition: certificate " + std::to_string(m) +
                            " is not generated by a single set");
    }
    out.k = std::max(out.k, cert[m].minimal_sets()[0].size());
  }
  const std::uint32_t top = std::uint32_t{1} << cert.n();
  out.part.assign(cert.size(), std::vector<int>(top, 0));
  for (int m = 0; m < cert.size(); ++m) {
    auto elems = cert[m].minimal_sets()[0].members();
    for (std::uint32_t s = 0; s < top; ++s) {
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (!(s & Subset::bit(elems[i]))) {
          out.part[m][s] = static_cast<int>(i) + 1;
          break;
        }
      }
    }
  }
  return out;
}

inline void require_feasible(const CertificateStructure& cert, const DualWitness& w) {
  const double margin = dual_feasibility_margin(cert, w);
  if (margin > 1.0 + 1e-9) {
    throw ParameterError("witness margin " + std::to_string(margin) +
                         " exceeds 1; normalize the witness first");
  }
}

struct BoundedNormReport {
  int j = 0;
  int k = 0;
  std::vector<double> part_norms;  // ||Gamma^_i||, i = 1..k
  double hat_norm = 0;             // ||Gamma^||
  double prime_norm = 0;           // ||Gamma'||
  double delta_norm = 0;           // ||Gamma o Delta_j||
  bool parts_ok = false;
  bool hat_ok = false;
  bool prime_ok = false;
  bool delta_ok = false;
  bool ok() const { return parts_ok && hat_ok && prime_ok && delta_ok; }
};

inline BoundedNormReport bounded_norm_certificates(const HardInstance& inst, const DualWitness& w, int j,
                                                   NormMethod method = NormMethod::automatic) {
  check_compatible(inst, w);
  require_feasible(inst.cert(), w);
  LmiPartition lmi = lmi_partition(inst.cert());
  DualWitness beta = delta_beta(w, j);

  BoundedNormReport r;
  r.j = j;
  r.k = lmi.k;
  r.parts_ok = true;
  for (int i = 1; i <= lmi.k; ++i) {
    DualWitness part(beta.n(), beta.cert_count());
    for (std::size_t s = 0; s < beta.subset_count(); ++s) {
      Subset S = Subset::from_mask(static_cast<std::uint32_t>(s));
      for (int m = 0; m < beta.cert_count(); ++m) {
        if (lmi.part[m][s] == i) part(S, m) = beta(S, m);
      }
    }
    double v = spectral_norm(assemble(inst, part, ColumnSet::all_inputs, false), method).norm;
    r.part_norms.push_back(v);
    r.parts_ok = r.parts_ok && v <= 1.0 + 1e-6;
  }
  r.hat_norm = spectral_norm(assemble(inst, beta, ColumnSet::all_inputs, false), method).norm;
  r.prime_norm = spectral_norm(assemble(inst, beta, ColumnSet::negatives, false), method).norm;
  r.delta_norm = hadamard_delta(assemble(inst, w, ColumnSet::negatives, false), j, method).report.norm;
  r.hat_ok = r.hat_norm <= r.k + 1e-6;
  r.prime_ok = r.prime_norm <= r.hat_norm + 1e-9;
  r.delta_ok = r.delta_norm <= 2.0 * r.k + 1e-6;
  return r;
}

struct AdvReport {
  double gamma_norm = 0;
  std::vector<double> delta_norms;  // j = 1..n
  double max_delta = 0;
  double ratio = 0;
  double witness_objective = 0;
  double negative_fraction = 0;  // |Y| / q^n
  double u_gamma_v = 0;
  double u_gamma_v_expected = 0;  // sqrt(|Y|/q^n sum_M alpha_empty(M)^2)
};

// ||Gamma|| / max_j ||Gamma o Delta_j|| for a feasible witness.
inline AdvReport adv_ratio(const HardInstance& inst, const DualWitness& w,
                           NormMethod method = NormMethod::automatic) {
  check_compatible(inst, w);
  require_feasible(inst.cert(), w);
  BlockOperator gamma = assemble(inst, w, ColumnSet::negatives);
  AdvReport r;
  r.witness_objective = dual_objective(w);
  r.negative_fraction = static_cast<double>(inst.negatives().size()) / inst.input_count();
  r.gamma_norm = spectral_norm(gamma, method).norm;
  if (r.gamma_norm == 0) throw InvariantError("adversary matrix is zero");
  for (int j = 1; j <= inst.n(); ++j) {
    r.delta_norms.push_back(hadamard_delta(gamma, j, method).report.norm);
    r.max_delta = std::max(r.max_delta, r.delta_norms.back());
  }
  r.ratio = r.max_delta > 0 ? r.gamma_norm / r.max_delta : std::numeric_limits<double>::infinity();

  // Test vectors u ~ alpha_empty(M) / sqrt(|X_M|) on rows, v uniform on Y.
  std::vector<double> a0(inst.cert().size());
  w.fill(Subset{}, a0);
  double sum_sq = 0;
  for (double v : a0) sum_sq += v * v;
  r.u_gamma_v_expected = std::sqrt(r.negative_fraction * sum_sq);
  if (sum_sq > 0 && !inst.negatives().empty()) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(gamma.cols(), 1.0 / std::sqrt(gamma.cols()));
    Eigen::VectorXd gv = gamma.apply(v);
    std::size_t row = 0;
    double dot = 0;
    for (const auto& b : gamma.blocks()) {
      const double u = a0[b.cert] / std::sqrt(b.inputs.size() * sum_sq);
      for (std::size_t r2 = 0; r2 < b.inputs.size(); ++r2) dot += u * gv(row++);
    }
    r.u_gamma_v = dot;
  }
  return r;
}

}  // namespace lgcert
