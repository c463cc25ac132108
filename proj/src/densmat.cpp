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

#include "hidpoly/densmat.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hidpoly/errors.hpp"

namespace hidpoly {

namespace {

void guard_single(const FieldCtx& ctx) {
  if (ctx.d() > kSingleCopyMaxD) {
    throw GuardExceeded("single-copy matrix guard: d = " + std::to_string(ctx.d()) + " > " +
                        std::to_string(kSingleCopyMaxD));
  }
}

void guard_pipeline(const FieldCtx& ctx, unsigned n) {
  if (ctx.d() > kPipelineMaxD || n > kPipelineMaxN) {
    throw GuardExceeded("pipeline matrix guard: needs d <= " + std::to_string(kPipelineMaxD) +
                        " and n <= " + std::to_string(kPipelineMaxN) + " (d = " + std::to_string(ctx.d()) +
                        ", n = " + std::to_string(n) + ")");
  }
}

void require_dim(const FieldCtx& ctx, const DenseOperator& rho) {
  const Eigen::Index dim = static_cast<Eigen::Index>(ctx.d()) * ctx.d();
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("expected a " + std::to_string(dim) + "-dimensional operator");
  }
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
  DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

FeltVec hidden_coefficients(const UniPoly& q, unsigned n) {
  if (q.degree() > static_cast<int>(n)) throw std::invalid_argument("polynomial degree exceeds n");
  FeltVec out(n);
  for (unsigned i = 1; i <= n; ++i) out[i - 1] = q.coeff(i);
  return out;
}

}  // namespace

DenseOperator dft_matrix(const FieldCtx& ctx) {
  guard_single(ctx);
  const std::uint32_t d = ctx.d();
  DenseOperator f(d, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::uint32_t x = 0; x < d; ++x) {
    for (std::uint32_t y = 0; y < d; ++y) f(x, y) = s * ctx.chi(ctx.mul(Felt{x}, Felt{y}));
  }
  return f;
}

DenseOperator shift_operator(const FieldCtx& ctx, Felt delta) {
  guard_single(ctx);
  const std::uint32_t d = ctx.d();
  DenseOperator s = DenseOperator::Zero(d, d);
  for (std::uint32_t x = 0; x < d; ++x) s(ctx.add(delta, Felt{x}).value, x) = 1.0;
  return s;
}

DenseVector phi_state(const FieldCtx& ctx, const UniPoly& q, Felt z) {
  guard_single(ctx);
  const std::uint32_t d = ctx.d();
  DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(d) * d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::uint32_t r = 0; r < d; ++r) {
    const Felt val = ctx.add(eval_uni(ctx, q, Felt{r}), z);
    v(static_cast<Eigen::Index>(r) * d + val.value) = s;
  }
  return v;
}

DenseOperator rho_q_average(const FieldCtx& ctx, const UniPoly& q) {
  guard_single(ctx);
  const std::uint32_t d = ctx.d();
  DenseOperator rho = DenseOperator::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (std::uint32_t z = 0; z < d; ++z) {
    const DenseVector phi = phi_state(ctx, q, Felt{z});
    rho += phi * phi.adjoint();
  }
  return rho / static_cast<double>(d);
}

DenseOperator rho_q_shift_form(const FieldCtx& ctx, const UniPoly& q) {
  guard_single(ctx);
  const std::uint32_t d = ctx.d();
  DenseOperator rho(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  const double scale = 1.0 / (static_cast<double>(d) * d);
  for (std::uint32_t b = 0; b < d; ++b) {
    for (std::uint32_t c = 0; c < d; ++c) {
      const Felt delta = ctx.sub(eval_uni(ctx, q, Felt{b}), eval_uni(ctx, q, Felt{c}));
      rho.block(static_cast<Eigen::Index>(b) * d, static_cast<Eigen::Index>(c) * d, d, d) =
          scale * shift_operator(ctx, delta);
    }
  }
  return rho;
}

DenseOperator build_rho_q(const FieldCtx& ctx, const UniPoly& q) {
  guard_single(ctx);
  DenseOperator a = rho_q_average(ctx, q);
  const DenseOperator b = rho_q_shift_form(ctx, q);
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff > 1e-12) {
    throw InvariantViolation("the two constructions of rho_Q differ by " + std::to_string(diff));
  }
  return a;
}

DenseOperator conjugate_fourier(const FieldCtx& ctx, const DenseOperator& rho) {
  require_dim(ctx, rho);
  const DenseOperator u = kron(DenseOperator::Identity(ctx.d(), ctx.d()), dft_matrix(ctx));
  return u * rho * u.adjoint();
}

double off_block_mass(const FieldCtx& ctx, const DenseOperator& rho_tilde) {
  require_dim(ctx, rho_tilde);
  const std::uint32_t d = ctx.d();
  double sq = 0.0;
  for (Eigen::Index i = 0; i < rho_tilde.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho_tilde.cols(); ++j) {
      if (i % d != j % d) sq += std::norm(rho_tilde(i, j));
    }
  }
  return std::sqrt(sq);
}

DenseOperator x_block(const FieldCtx& ctx, const DenseOperator& rho_tilde, Felt x) {
  require_dim(ctx, rho_tilde);
  ctx.check(x);
  const std::uint32_t d = ctx.d();
  DenseOperator out(d, d);
  for (std::uint32_t b = 0; b < d; ++b) {
    for (std::uint32_t c = 0; c < d; ++c) {
      out(b, c) = rho_tilde(static_cast<Eigen::Index>(b) * d + x.value, static_cast<Eigen::Index>(c) * d + x.value);
    }
  }
  return out;
}

DenseOperator multi_copy_block(const FieldCtx& ctx, const DenseOperator& rho_tilde, std::span<const Felt> x) {
  if (x.empty()) throw std::invalid_argument("x must be nonempty");
  checked_power(ctx.d(), static_cast<unsigned>(2 * x.size()), 1u << 24, "multi-copy block guard (d^(2n))");
  DenseOperator out = x_block(ctx, rho_tilde, x[0]);
  for (std::size_t j = 1; j < x.size(); ++j) out = kron(out, x_block(ctx, rho_tilde, x[j]));
  return out;
}

DenseVector fiber_state(const EtaTable& table, std::uint64_t w_index) {
  if (!table.has_solutions()) throw std::invalid_argument("fiber_state needs an eta table with solutions");
  DenseVector v = DenseVector::Zero(static_cast<Eigen::Index>(table.total()));
  const auto sols = table.solutions(w_index);
  if (sols.empty()) return v;
  const double s = 1.0 / std::sqrt(static_cast<double>(sols.size()));
  for (std::uint32_t b : sols) v(b) = s;
  return v;
}

DenseOperator block_from_fibers(const FieldCtx& ctx, const EtaTable& table, std::span<const Felt> q) {
  const unsigned n = table.n();
  if (q.size() != n) throw std::invalid_argument("q has the wrong length");
  if (table.k() != n) throw std::invalid_argument("block_from_fibers needs k = n");
  const Eigen::Index dim = static_cast<Eigen::Index>(table.total());
  DenseVector acc = DenseVector::Zero(dim);
  for (std::uint64_t w = 0; w < table.size(); ++w) {
    if (table.eta(w) == 0) continue;
    const CharValue phase = ctx.chi(dot(ctx, q, tuple_at(ctx, w, n)));
    acc += phase * std::sqrt(static_cast<double>(table.eta(w))) * fiber_state(table, w);
  }
  // The block is rank one: sum_{w,v} a_w conj(a_v) |S_w><S_v|.
  return acc * acc.adjoint() / std::pow(static_cast<double>(ctx.d()), 2.0 * n);
}

bool is_hermitian(const DenseOperator& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const DenseOperator& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<DenseOperator> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tol;
}

bool is_unitary(const DenseOperator& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - DenseOperator::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

std::uint64_t VxCircuit::main_index(std::uint64_t w, std::uint64_t j, std::uint64_t l) const {
  return (w * cap_ + j) * (cap_ + 1) + l;
}

std::uint64_t VxCircuit::bad_index(std::uint64_t b) const { return points_ * cap_ * (cap_ + 1) + b; }

VxCircuit VxCircuit::build(const FieldCtx& ctx, const EtaTable& table, const GoodSets& good) {
  const unsigned n = table.n();
  guard_pipeline(ctx, n);
  if (n != good.n() || table.k() != n) throw std::invalid_argument("V_x needs k = n and matching good sets");
  if (!table.has_solutions()) throw std::invalid_argument("V_x needs an eta table with solutions");
  VxCircuit c;
  c.points_ = table.size();
  c.cap_ = good.cap();
  const std::uint64_t dim = c.points_ * c.cap_ * (c.cap_ + 1) + c.points_;
  const auto idx = [](std::uint64_t i) { return static_cast<Eigen::Index>(i); };

  // U1: |b,0,0> -> |w, j, eta_w> for good b, -> bad sector otherwise;
  // the remaining basis states are paired up in increasing order.
  std::vector<std::int64_t> target_of(dim, -1);
  std::vector<char> target_used(dim, 0);
  c.good_b_.assign(c.points_, 0);
  std::vector<char> w_is_good(c.points_, 0);
  for (std::uint64_t w = 0; w < c.points_; ++w) {
    if (!good.w_good(table, w)) continue;
    w_is_good[w] = 1;
    const auto sols = table.solutions(w);
    for (std::uint64_t j = 0; j < sols.size(); ++j) {
      c.good_b_[sols[j]] = 1;
      const std::uint64_t t = c.main_index(w, j, sols.size());
      target_of[c.main_index(sols[j], 0, 0)] = static_cast<std::int64_t>(t);
      target_used[t] = 1;
    }
  }
  for (std::uint64_t b = 0; b < c.points_; ++b) {
    if (c.good_b_[b]) continue;
    target_of[c.main_index(b, 0, 0)] = static_cast<std::int64_t>(c.bad_index(b));
    target_used[c.bad_index(b)] = 1;
  }
  std::uint64_t free_target = 0;
  for (std::uint64_t s = 0; s < dim; ++s) {
    if (target_of[s] >= 0) continue;
    while (target_used[free_target]) ++free_target;
    target_of[s] = static_cast<std::int64_t>(free_target);
    target_used[free_target] = 1;
  }
  using Triplet = Eigen::Triplet<std::complex<double>>;
  std::vector<Triplet> t1;
  t1.reserve(dim);
  for (std::uint64_t s = 0; s < dim; ++s) t1.emplace_back(target_of[s], idx(s), 1.0);
  c.u1_.resize(idx(dim), idx(dim));
  c.u1_.setFromTriplets(t1.begin(), t1.end());

  // U2: controlled on l >= 1, the l-point Fourier transform on j < l.
  std::vector<Triplet> t2;
  std::vector<char> touched(dim, 0);
  for (std::uint64_t w = 0; w < c.points_; ++w) {
    for (std::uint64_t l = 1; l <= c.cap_; ++l) {
      const double s = 1.0 / std::sqrt(static_cast<double>(l));
      for (std::uint64_t j = 0; j < l; ++j) {
        touched[c.main_index(w, j, l)] = 1;
        for (std::uint64_t jp = 0; jp < l; ++jp) {
          const double angle = 2.0 * std::numbers::pi * static_cast<double>(j * jp % l) / static_cast<double>(l);
          t2.emplace_back(idx(c.main_index(w, jp, l)), idx(c.main_index(w, j, l)), s * std::polar(1.0, angle));
        }
      }
    }
  }
  for (std::uint64_t s = 0; s < dim; ++s) {
    if (!touched[s]) t2.emplace_back(idx(s), idx(s), 1.0);
  }
  c.u2_.resize(idx(dim), idx(dim));
  c.u2_.setFromTriplets(t2.begin(), t2.end());

  // U3: l -> l - eta_w mod (D + 1) for good w.
  std::vector<Triplet> t3;
  for (std::uint64_t s = 0; s < dim; ++s) {
    const std::uint64_t w = s / (c.cap_ * (c.cap_ + 1));
    std::uint64_t to = s;
    if (s < c.points_ * c.cap_ * (c.cap_ + 1) && w_is_good[w]) {
      const std::uint64_t l = s % (c.cap_ + 1);
      const std::uint64_t j = (s / (c.cap_ + 1)) % c.cap_;
      to = c.main_index(w, j, (l + c.cap_ + 1 - table.eta(w)) % (c.cap_ + 1));
    }
    t3.emplace_back(idx(to), idx(s), 1.0);
  }
  c.u3_.resize(idx(dim), idx(dim));
  c.u3_.setFromTriplets(t3.begin(), t3.end());
  return c;
}

DenseOperator VxCircuit::v() const {
  const SparseOperator v = u3_ * (u2_ * u1_);
  return DenseOperator(v);
}

DenseOperator VxCircuit::apply(const DenseOperator& m) const {
  if (m.rows() != static_cast<Eigen::Index>(dim())) throw std::invalid_argument("operand has the wrong dimension");
  DenseOperator out = u1_ * m;
  out = u2_ * out;
  return u3_ * out;
}

DenseOperator VxCircuit::embedding() const {
  DenseOperator e = DenseOperator::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(points_));
  for (std::uint64_t b = 0; b < points_; ++b) e(static_cast<Eigen::Index>(main_index(b, 0, 0)), b) = 1.0;
  return e;
}

DenseVector VxCircuit::embed(const DenseVector& state) const {
  if (state.size() != static_cast<Eigen::Index>(points_)) throw std::invalid_argument("state has the wrong dimension");
  DenseVector out = DenseVector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::uint64_t b = 0; b < points_; ++b) out(static_cast<Eigen::Index>(main_index(b, 0, 0))) = state(b);
  return out;
}

DenseOperator VxCircuit::good_isometry() const {
  const DenseOperator ve = apply(embedding());
  std::vector<Eigen::Index> cols;
  for (std::uint64_t b = 0; b < points_; ++b) {
    if (good_b_[b]) cols.push_back(static_cast<Eigen::Index>(b));
  }
  DenseOperator out(ve.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = ve.col(cols[i]);
  return out;
}

PipelineResult pipeline_probability(const FieldCtx& ctx, const UniPoly& q, std::span<const Felt> x,
                                    const GoodSets& good) {
  const unsigned n = static_cast<unsigned>(x.size());
  guard_pipeline(ctx, n);
  if (n != good.n()) throw std::invalid_argument("x length does not match the good sets");
  const FeltVec coeffs = hidden_coefficients(q, n);

  const DenseOperator rho_tilde = conjugate_fourier(ctx, build_rho_q(ctx, q));
  DenseOperator block = multi_copy_block(ctx, rho_tilde, x);
  const double marginal = block.trace().real();
  block /= marginal;

  const EtaTable table = eta_table(ctx, x, true);
  const VxCircuit vx = VxCircuit::build(ctx, table, good);
  PipelineResult res;
  const auto& good_b = vx.good_points();
  for (std::uint64_t b = 0; b < table.total(); ++b) {
    if (good_b[b]) res.good_mass += block(b, b).real();
  }
  if (res.good_mass <= 0.0) return res;
  DenseOperator projected = DenseOperator::Zero(block.rows(), block.cols());
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      if (good_b[i] && good_b[j]) projected(i, j) = block(i, j) / res.good_mass;
    }
  }

  const DenseOperator ve = vx.apply(vx.embedding());
  const std::uint64_t points = table.size();
  const double s = 1.0 / std::sqrt(static_cast<double>(points));
  res.probabilities.resize(points);
  for (std::uint64_t qi = 0; qi < points; ++qi) {
    const FeltVec qp = tuple_at(ctx, qi, n);
    DenseVector psi = DenseVector::Zero(static_cast<Eigen::Index>(vx.dim()));
    for (std::uint64_t w = 0; w < points; ++w) {
      psi(static_cast<Eigen::Index>(vx.main_index(w, 0, 0))) = s * ctx.chi(dot(ctx, qp, tuple_at(ctx, w, n)));
    }
    const DenseVector u = ve.adjoint() * psi;
    res.probabilities[qi] = (u.adjoint() * projected * u)(0, 0).real();
  }
  res.success = res.probabilities[tuple_index(ctx, coeffs)];
  return res;
}

void write_matrix(std::ostream& out, const DenseOperator& m) {
  const auto old = out.precision(17);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j != 0) out << ' ';
      out << m(i, j).real() << ' ' << m(i, j).imag();
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace hidpoly
