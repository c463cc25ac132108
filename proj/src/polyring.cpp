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

#include "hidpoly/polyring.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hidpoly {

UniPoly::UniPoly(FeltVec coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().value == 0) coeffs_.pop_back();
}

UniPoly UniPoly::without_constant() const {
  FeltVec c = coeffs_;
  if (!c.empty()) c[0] = Felt{0};
  return UniPoly(std::move(c));
}

Felt eval_uni(const FieldCtx& ctx, const UniPoly& q, Felt r) {
  ctx.check(r);
  Felt acc = ctx.zero();
  for (auto it = q.coeffs().rbegin(); it != q.coeffs().rend(); ++it) {
    ctx.check(*it);
    acc = ctx.add(ctx.mul(acc, r), *it);
  }
  return acc;
}

UniPoly lagrange_interpolate(const FieldCtx& ctx, std::span<const std::pair<Felt, Felt>> points, unsigned degree_bound) {
  const std::size_t need = static_cast<std::size_t>(degree_bound) + 1;
  if (ctx.d() <= degree_bound) throw std::invalid_argument("interpolation: field too small for the degree bound");
  if (points.size() < need) {
    throw std::invalid_argument("interpolation: " + std::to_string(points.size()) + " points for degree bound " +
                                std::to_string(degree_bound));
  }
  std::set<Felt> seen;
  for (const auto& [t, y] : points) {
    ctx.check(t);
    ctx.check(y);
    if (!seen.insert(t).second) throw std::invalid_argument("interpolation: duplicate abscissa " + std::to_string(t.value));
  }

  // master(X) = prod_j (X - t_j) over the first `need` points.
  FeltVec master{ctx.one()};
  for (std::size_t j = 0; j < need; ++j) {
    FeltVec next(master.size() + 1, ctx.zero());
    for (std::size_t k = 0; k < master.size(); ++k) {
      next[k + 1] = ctx.add(next[k + 1], master[k]);
      next[k] = ctx.sub(next[k], ctx.mul(master[k], points[j].first));
    }
    master = std::move(next);
  }

  FeltVec result(need, ctx.zero());
  for (std::size_t i = 0; i < need; ++i) {
    const Felt ti = points[i].first;
    // basis(X) = master(X) / (X - t_i) by synthetic division.
    FeltVec basis(need, ctx.zero());
    Felt carry = ctx.zero();
    for (std::size_t k = need; k-- > 0;) {
      carry = ctx.add(master[k + 1], ctx.mul(carry, ti));
      basis[k] = carry;
    }
    Felt denom = ctx.one();
    for (std::size_t j = 0; j < need; ++j) {
      if (j != i) denom = ctx.mul(denom, ctx.sub(ti, points[j].first));
    }
    const Felt scale = ctx.div(points[i].second, denom);
    for (std::size_t k = 0; k < need; ++k) result[k] = ctx.add(result[k], ctx.mul(scale, basis[k]));
  }

  UniPoly poly(std::move(result));
  for (std::size_t i = need; i < points.size(); ++i) {
    if (eval_uni(ctx, poly, points[i].first) != points[i].second) {
      throw std::invalid_argument("interpolation: points are inconsistent with degree bound " + std::to_string(degree_bound));
    }
  }
  return poly;
}

unsigned total_degree(const Exponents& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0u); }

bool GrlexLess::operator()(const Exponents& a, const Exponents& b) const {
  const unsigned da = total_degree(a);
  const unsigned db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

Felt MultiPoly::coeff(const Exponents& alpha) const {
  const auto it = terms_.find(alpha);
  return it == terms_.end() ? Felt{0} : it->second;
}

void MultiPoly::set(const Exponents& alpha, Felt c) {
  if (alpha.size() != arity_) throw std::invalid_argument("monomial arity mismatch");
  if (c.value == 0) {
    terms_.erase(alpha);
  } else {
    terms_[alpha] = c;
  }
}

void MultiPoly::add_term(const FieldCtx& ctx, Exponents alpha, Felt c) {
  ctx.check(c);
  if (alpha.size() != arity_) throw std::invalid_argument("monomial arity mismatch");
  for (unsigned& a : alpha) {
    if (a >= ctx.d()) a = (a - 1) % (ctx.d() - 1) + 1;
  }
  set(alpha, ctx.add(coeff(alpha), c));
}

unsigned MultiPoly::total_degree() const {
  unsigned deg = 0;
  for (const auto& [alpha, c] : terms_) deg = std::max(deg, hidpoly::total_degree(alpha));
  return deg;
}

MultiPoly MultiPoly::without_constant() const {
  MultiPoly out = *this;
  out.set(Exponents(arity_, 0), Felt{0});
  return out;
}

Felt eval_multi(const FieldCtx& ctx, const MultiPoly& q, std::span<const Felt> point) {
  if (point.size() != q.arity()) {
    throw std::invalid_argument("eval_multi: point has " + std::to_string(point.size()) + " coordinates, polynomial arity " +
                                std::to_string(q.arity()));
  }
  for (const Felt a : point) ctx.check(a);
  Felt acc = ctx.zero();
  for (const auto& [alpha, c] : q.terms()) {
    Felt term = c;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] != 0) term = ctx.mul(term, ctx.pow(point[j], alpha[j]));
    }
    acc = ctx.add(acc, term);
  }
  return acc;
}

MultiPoly substitute(const FieldCtx& ctx, const MultiPoly& q, unsigned var, Felt t) {
  if (q.arity() < 2) throw std::invalid_argument("substitute: arity must be at least 2");
  if (var >= q.arity()) throw std::invalid_argument("substitute: variable index out of range");
  ctx.check(t);
  MultiPoly out(q.arity() - 1);
  for (const auto& [alpha, c] : q.terms()) {
    Exponents rest;
    rest.reserve(alpha.size() - 1);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (j != var) rest.push_back(alpha[j]);
    }
    out.add_term(ctx, std::move(rest), ctx.mul(c, ctx.pow(t, alpha[var])));
  }
  return out;
}

MultiPoly slice_multi(const FieldCtx& ctx, const MultiPoly& q, Felt t) {
  if (q.arity() < 2) throw std::invalid_argument("slice_multi: arity must be at least 2");
  return substitute(ctx, q, q.arity() - 1, t);
}

MultiPoly to_multi(const UniPoly& q) {
  MultiPoly out(1);
  for (std::size_t i = 0; i < q.coeffs().size(); ++i) out.set({static_cast<unsigned>(i)}, q.coeffs()[i]);
  return out;
}

UniPoly to_uni(const MultiPoly& q) {
  if (q.arity() != 1) throw std::invalid_argument("to_uni: polynomial is not univariate");
  FeltVec coeffs;
  for (const auto& [alpha, c] : q.terms()) {
    if (coeffs.size() <= alpha[0]) coeffs.resize(alpha[0] + 1, Felt{0});
    coeffs[alpha[0]] = c;
  }
  return UniPoly(std::move(coeffs));
}

std::string to_string(const UniPoly& q) {
  std::string out;
  for (std::size_t i = 0; i < q.coeffs().size(); ++i) {
    if (q.coeffs()[i].value == 0) continue;
    if (!out.empty()) out += '+';
    out += std::to_string(q.coeffs()[i].value);
    if (i > 0) out += "*X^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

std::string to_string(const MultiPoly& q) {
  std::string out;
  for (const auto& [alpha, c] : q.terms()) {
    if (!out.empty()) out += '+';
    out += std::to_string(c.value);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] != 0) out += "*X" + std::to_string(j + 1) + "^" + std::to_string(alpha[j]);
    }
  }
  return out.empty() ? "0" : out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

unsigned parse_number(std::string_view s, std::string_view context) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed polynomial term '" + std::string(context) + "'");
  }
  return v;
}

MultiPoly parse_terms(const FieldCtx& ctx, std::string_view text, unsigned arity, bool univariate) {
  std::string compact;
  for (const char ch : text) {
    if (ch != ' ') compact += ch;
  }
  MultiPoly out(arity);
  if (compact == "0") return out;
  for (const std::string_view term : split(compact, '+')) {
    const auto factors = split(term, '*');
    Exponents alpha(arity, 0);
    const Felt c = ctx.element(parse_number(factors[0], term));
    for (std::size_t k = 1; k < factors.size(); ++k) {
      std::string_view f = factors[k];
      if (f.empty() || f[0] != 'X') throw std::invalid_argument("malformed polynomial term '" + std::string(term) + "'");
      f.remove_prefix(1);
      const auto caret = f.find('^');
      const std::string_view var_text = f.substr(0, caret);
      const unsigned power = caret == std::string_view::npos ? 1 : parse_number(f.substr(caret + 1), term);
      const unsigned var = univariate && var_text.empty() ? 1 : parse_number(var_text, term);
      if (var < 1 || var > arity) throw std::invalid_argument("variable index out of range in '" + std::string(term) + "'");
      alpha[var - 1] += power;
    }
    out.add_term(ctx, std::move(alpha), c);
  }
  return out;
}

}  // namespace

UniPoly parse_uni(const FieldCtx& ctx, std::string_view text) { return to_uni(parse_terms(ctx, text, 1, true)); }

MultiPoly parse_multi(const FieldCtx& ctx, std::string_view text, unsigned arity) {
  return parse_terms(ctx, text, arity, false);
}

}  // namespace hidpoly
