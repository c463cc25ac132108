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

#include "hidpoly/blackbox.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace hidpoly {
namespace {

// All exponent vectors of arity m with 1 <= |alpha| <= n, in graded-lex order.
std::vector<Exponents> nonconstant_monomials(unsigned m, unsigned n) {
  std::vector<Exponents> out;
  Exponents alpha(m, 0);
  auto rec = [&](auto&& self, unsigned var, unsigned budget) -> void {
    if (var == m) {
      if (total_degree(alpha) >= 1) out.push_back(alpha);
      return;
    }
    for (unsigned a = 0; a <= budget; ++a) {
      alpha[var] = a;
      self(self, var + 1, budget - a);
    }
    alpha[var] = 0;
  };
  rec(rec, 0, n);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

}  // namespace

HiddenInstance::HiddenInstance(std::shared_ptr<const FieldCtx> ctx, MultiPoly q, FeltVec pi, unsigned n,
                               std::uint64_t seed)
    : ctx_(std::move(ctx)), q_(std::move(q)), pi_(std::move(pi)), n_(n), seed_(seed) {}

HiddenInstance HiddenInstance::sample(const FieldCtx& ctx, unsigned m, unsigned n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample_instance: m and n must be at least 1");
  if (ctx.d() <= n) {
    throw std::invalid_argument("sample_instance: field size " + std::to_string(ctx.d()) + " must exceed degree " +
                                std::to_string(n));
  }
  Rng coeff_rng = split_rng(seed, 0);
  MultiPoly q(m);
  for (const Exponents& alpha : nonconstant_monomials(m, n)) {
    q.set(alpha, Felt{static_cast<std::uint32_t>(uniform_below(coeff_rng, ctx.d()))});
  }
  Rng perm_rng = split_rng(seed, 1);
  FeltVec pi(ctx.d());
  for (std::uint32_t i = 0; i < ctx.d(); ++i) pi[i] = Felt{i};
  for (std::uint32_t i = ctx.d() - 1; i > 0; --i) {
    std::swap(pi[i], pi[uniform_below(perm_rng, i + 1)]);
  }
  return HiddenInstance(std::make_shared<const FieldCtx>(ctx), std::move(q), std::move(pi), n, seed);
}

HiddenInstance HiddenInstance::with_fixed(const FieldCtx& ctx, MultiPoly q, FeltVec pi, unsigned n) {
  if (pi.size() != ctx.d()) throw std::invalid_argument("permutation must list every field element");
  std::vector<bool> hit(ctx.d(), false);
  for (const Felt v : pi) {
    ctx.check(v);
    if (hit[v.value]) throw std::invalid_argument("permutation is not a bijection");
    hit[v.value] = true;
  }
  if (q.constant_term().value != 0) throw std::invalid_argument("hidden polynomial must have zero constant term");
  if (q.total_degree() > n) throw std::invalid_argument("hidden polynomial exceeds the degree bound");
  return HiddenInstance(std::make_shared<const FieldCtx>(ctx), std::move(q), std::move(pi), n, 0);
}

HiddenInstance HiddenInstance::with_identity(const FieldCtx& ctx, MultiPoly q, unsigned n) {
  FeltVec pi(ctx.d());
  for (std::uint32_t i = 0; i < ctx.d(); ++i) pi[i] = Felt{i};
  return with_fixed(ctx, std::move(q), std::move(pi), n);
}

Felt HiddenInstance::query(std::span<const Felt> r, Felt s) {
  if (r.size() != q_.arity()) {
    throw std::invalid_argument("query: expected " + std::to_string(q_.arity()) + " coordinates, got " +
                                std::to_string(r.size()));
  }
  ctx_->check(s);
  ++query_count_;
  return pi_[ctx_->sub(s, eval_multi(*ctx_, q_, r)).value];
}

nlohmann::json HiddenInstance::to_json(bool reveal) const {
  nlohmann::json j;
  j["field"] = ctx_->descriptor();
  j["modulus"] = ctx_->modulus_string();
  j["seed"] = seed_;
  j["m"] = q_.arity();
  j["n"] = n_;
  if (reveal) {
    j["Q"] = to_string(q_);
    std::vector<std::uint32_t> pi;
    for (const Felt v : pi_) pi.push_back(v.value);
    j["pi"] = pi;
  }
  return j;
}

bool verify_candidate(Oracle& oracle, const MultiPoly& cand, unsigned trials, Rng& rng) {
  if (trials < 2) throw std::invalid_argument("verify_candidate: need at least 2 trials");
  const FieldCtx& ctx = oracle.field();
  if (cand.arity() != oracle.arity()) throw std::invalid_argument("verify_candidate: candidate arity mismatch");
  if (cand.constant_term().value != 0) throw std::invalid_argument("verify_candidate: candidate has a constant term");

  std::uint64_t space = 1;
  for (unsigned i = 0; i < oracle.arity() && space < trials; ++i) space *= ctx.d();
  std::set<std::uint64_t> points;
  if (space <= trials) {
    for (std::uint64_t i = 0; i < space; ++i) points.insert(i);
  } else {
    // space > trials here, so the product below cannot overflow past it meaningfully.
    std::uint64_t total = 1;
    for (unsigned i = 0; i < oracle.arity(); ++i) total = total > (~0ULL / ctx.d()) ? ~0ULL : total * ctx.d();
    while (points.size() < trials) points.insert(uniform_below(rng, total));
  }

  std::optional<Felt> first;
  bool consistent = true;
  for (const std::uint64_t idx : points) {
    const FeltVec r = tuple_at(ctx, idx, oracle.arity());
    const Felt answer = oracle.query(r, eval_multi(ctx, cand, r));
    if (!first) {
      first = answer;
    } else if (answer != *first) {
      consistent = false;
    }
  }
  return consistent;
}

}  // namespace hidpoly
