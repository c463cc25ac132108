// Copyright 2026 The hidpoly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "hidpoly/fibers.hpp"
#include "hidpoly/gf.hpp"
#include "hidpoly/polyring.hpp"

namespace hidpoly {

using DenseOperator = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

/// Single-copy objects (dimension d^2) are limited to d <= 31.
inline constexpr std::uint32_t kSingleCopyMaxD = 31;
/// The V_x pipeline is limited to d <= 7 and n <= 2.
inline constexpr std::uint32_t kPipelineMaxD = 7;
inline constexpr unsigned kPipelineMaxN = 2;

/// (1/sqrt d) sum_{x,y} chi(xy) |x><y|.
DenseOperator dft_matrix(const FieldCtx& ctx);
/// S_delta = sum_x |delta + x><x|.
DenseOperator shift_operator(const FieldCtx& ctx, Felt delta);

/// |phi_{Q,z}> = (1/sqrt d) sum_r |r> (x) |Q(r) + z>, basis index r*d + s.
DenseVector phi_state(const FieldCtx& ctx, const UniPoly& q, Felt z);

/// rho_Q as the average over z of |phi_{Q,z}><phi_{Q,z}|.
DenseOperator rho_q_average(const FieldCtx& ctx, const UniPoly& q);
/// rho_Q as (1/d^2) sum_{b,c} |b><c| (x) S_{Q(b) - Q(c)}.
DenseOperator rho_q_shift_form(const FieldCtx& ctx, const UniPoly& q);
/// Builds both forms and throws InvariantViolation if they differ by more
/// than 1e-12 in any entry. Throws GuardExceeded for d > 31.
DenseOperator build_rho_q(const FieldCtx& ctx, const UniPoly& q);

/// (I (x) DFT) rho (I (x) DFT^dagger).
DenseOperator conjugate_fourier(const FieldCtx& ctx, const DenseOperator& rho);

/// Frobenius norm of the entries ((b,x),(c,x')) with x != x'.
double off_block_mass(const FieldCtx& ctx, const DenseOperator& rho_tilde);
/// The d x d block (b, c) of a single-copy conjugated state at Fourier label x.
DenseOperator x_block(const FieldCtx& ctx, const DenseOperator& rho_tilde, Felt x);
/// Block x of rho_tilde^(n) for x in F^n: the tensor product of single-copy
/// blocks, indexed by b in F^n (first coordinate most significant).
DenseOperator multi_copy_block(const FieldCtx& ctx, const DenseOperator& rho_tilde, std::span<const Felt> x);
/// d^(-2n) sum_{w,v} chi(<q,w> - <q,v>) sqrt(eta_w eta_v) |S_w><S_v|, from fiber data.
DenseOperator block_from_fibers(const FieldCtx& ctx, const EtaTable& table, std::span<const Felt> q);

/// |S_w^x> over F^n (zero vector for an empty fiber). Needs stored solutions.
DenseVector fiber_state(const EtaTable& table, std::uint64_t w_index);

bool is_hermitian(const DenseOperator& m, double tol);
bool is_psd(const DenseOperator& m, double tol);
bool is_unitary(const DenseOperator& m, double tol);

/// The fiber-collapsing isometry V_x = U3 U2 U1 on a direct-sum space:
/// a main sector with basis (w, j, l), w in F^n, j in [0, D), l in [0, D]
/// (l = 0 is the idle value of the eta register), plus a bad sector of d^n
/// states holding the b outside B_good^x.
class VxCircuit {
 public:
  static VxCircuit build(const FieldCtx& ctx, const EtaTable& table, const GoodSets& good);

  std::uint64_t dim() const { return static_cast<std::uint64_t>(u1_.rows()); }
  std::uint64_t points() const { return points_; }
  std::uint64_t cap() const { return cap_; }

  const SparseOperator& u1() const { return u1_; }
  const SparseOperator& u2() const { return u2_; }
  const SparseOperator& u3() const { return u3_; }
  /// U3 U2 U1 as a dense matrix.
  DenseOperator v() const;
  /// U3 U2 U1 m, without forming V.
  DenseOperator apply(const DenseOperator& m) const;

  /// Index of |w> (x) |0> (x) |0>; also the embedding of |b> (x) |0> (x) |0>.
  std::uint64_t main_index(std::uint64_t w, std::uint64_t j, std::uint64_t l) const;
  std::uint64_t bad_index(std::uint64_t b) const;
  /// The dim x d^n embedding b -> |b, 0, 0>.
  DenseOperator embedding() const;
  /// Embedding of a state over F^n.
  DenseVector embed(const DenseVector& state) const;
  /// Columns of V E for b in B_good^x.
  DenseOperator good_isometry() const;
  const std::vector<char>& good_points() const { return good_b_; }

 private:
  std::uint64_t points_ = 0;
  std::uint64_t cap_ = 0;
  std::vector<char> good_b_;
  SparseOperator u1_, u2_, u3_;
};

struct PipelineResult {
  double good_mass = 0.0;
  double success = 0.0;                // P(q' = q | good)
  std::vector<double> probabilities;  // P(q' | good) by index of q'
};

/// Collapses rho_tilde^(n) onto x, projects with P_good, applies V_x and
/// measures |psi_{q'}> (x) |0, 0>. `q` has degree <= n. Throws GuardExceeded
/// outside d <= 7, n <= 2.
PipelineResult pipeline_probability(const FieldCtx& ctx, const UniPoly& q, std::span<const Felt> x,
                                    const GoodSets& good);

/// "rows cols" then one line per row of "re im" pairs.
void write_matrix(std::ostream& out, const DenseOperator& m);

}  // namespace hidpoly
