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

#include "hidpoly/pgm.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gtest/gtest.h"

#include "hidpoly/errors.hpp"
#include "oracles.hpp"

namespace hidpoly {
namespace {

std::uint64_t ipow(std::uint64_t d, unsigned k) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < k; ++i) r *= d;
  return r;
}

std::vector<EtaTable> all_tables(const FieldCtx& f, unsigned n, bool solutions = false) {
  std::vector<EtaTable> out;
  for (std::uint64_t xi = 0; xi < ipow(f.d(), n); ++xi) out.push_back(eta_table(f, tuple_at(f, xi, n), solutions));
  return out;
}

// Direct evaluation of d^(-3n) sum_x (sum_w sqrt(eta))^2 from naive counts.
double naive_ideal(const FieldCtx& f, unsigned n) {
  double total = 0.0;
  for (std::uint64_t xi = 0; xi < ipow(f.d(), n); ++xi) {
    double s = 0.0;
    for (std::uint32_t c : testing::naive_counts(f, tuple_at(f, xi, n), n)) s += std::sqrt(double(c));
    total += s * s;
  }
  return total / std::pow(double(f.d()), 3.0 * n);
}

TEST(IdealSuccess, OneVariableClosedForm) {
  for (const char* desc : {"3^1", "5^1", "7^1", "11^1", "2^2", "2^3"}) {
    const FieldCtx f = parse_field(desc);
    const double d = f.d();
    const auto tables = all_tables(f, 1);
    const double v = ideal_success(f, tables);
    EXPECT_NEAR(v, 1 - 1 / d + 1 / (d * d), 1e-12) << desc;
    EXPECT_NEAR(v, naive_ideal(f, 1), 1e-12) << desc;
  }
  EXPECT_NEAR(ideal_success(make_field(3, 1), all_tables(make_field(3, 1), 1)), 7.0 / 9.0, 1e-15);
}

TEST(IdealSuccess, MatchesNaiveOracleTwoVariables) {
  for (const char* desc : {"3^1", "2^2", "5^1", "7^1"}) {
    const FieldCtx f = parse_field(desc);
    EXPECT_NEAR(ideal_success(f, all_tables(f, 2)), naive_ideal(f, 2), 1e-12) << desc;
  }
  const FieldCtx f3 = make_field(3, 1);
  EXPECT_NEAR(ideal_success(f3, all_tables(f3, 3)), naive_ideal(f3, 3), 1e-12);
}

TEST(IdealSuccess, TableOrderDoesNotMatter) {
  const FieldCtx f = make_field(5, 1);
  auto tables = all_tables(f, 2);
  const double before = ideal_success(f, tables);
  std::reverse(tables.begin(), tables.end());
  EXPECT_DOUBLE_EQ(ideal_success(f, tables), before);
}

TEST(IdealSuccess, CoverageErrors) {
  const FieldCtx f = make_field(5, 1);
  auto tables = all_tables(f, 2);
  tables.pop_back();
  EXPECT_THROW(ideal_success(f, tables), std::invalid_argument);
  tables.push_back(tables.front());
  EXPECT_THROW(ideal_success(f, tables), std::invalid_argument);
}

TEST(ApproxSuccess, SecondAnalysisGf7) {
  const FieldCtx f = make_field(7, 1);
  const auto tables = all_tables(f, 2);
  const GoodSets good = GoodSets::make(f, 2, Analysis::Second);
  const double approx = approx_success(tables, good);
  EXPECT_GT(approx, 0.0);
  EXPECT_LE(approx, 1.0);
  EXPECT_GE(approx, lemma2_lower_bound(tables, good) - 1e-9);
  EXPECT_LE(approx, ideal_success(f, tables) + 1e-9);
}

TEST(ApproxSuccess, EmptyGoodSetIsZero) {
  const FieldCtx f = make_field(2, 1);
  const auto tables = all_tables(f, 2);
  const GoodSets good = GoodSets::make(f, 2, Analysis::Second);
  EXPECT_EQ(approx_success(tables, good), 0.0);
  EXPECT_EQ(lemma2_lower_bound(tables, good), 0.0);
}

TEST(ApproxSuccess, OneVariableEqualsIdealOnUnits) {
  // n = 1, first analysis: every x != 0 is good with all fibers of size 1.
  const FieldCtx f = make_field(7, 1);
  const auto tables = all_tables(f, 1);
  const double d = 7;
  EXPECT_NEAR(approx_success(tables, GoodSets::make(f, 1, Analysis::First)), (d - 1) / d, 1e-12);
}

// |A(q - q')|^2 / (d^n |B_good|) from the definition, with naive characters.
std::vector<double> naive_distribution(const FieldCtx& f, const EtaTable& t, const GoodSets& good, const FeltVec& q) {
  const testing::NaiveField nf(f);
  const unsigned n = t.n();
  std::uint64_t bgood = 0;
  for (std::uint64_t w = 0; w < t.size(); ++w) bgood += good.w_good(t, w) ? t.eta(w) : 0;
  std::vector<double> out(t.size(), 0.0);
  for (std::uint64_t qi = 0; qi < t.size(); ++qi) {
    const FeltVec qp = tuple_at(f, qi, n);
    std::complex<double> amp = 0.0;
    for (std::uint64_t w = 0; w < t.size(); ++w) {
      if (!good.w_good(t, w)) continue;
      const FeltVec wt = tuple_at(f, w, n);
      Felt phase{0};
      for (unsigned i = 0; i < n; ++i) phase = nf.add(phase, nf.mul(f.sub(q[i], qp[i]), wt[i]));
      amp += std::sqrt(double(t.eta(w))) * nf.chi(phase);
    }
    out[qi] = std::norm(amp) / (double(t.size()) * double(bgood));
  }
  return out;
}

TEST(OutcomeDistribution, MatchesNaiveAmplitude) {
  for (auto [desc, an] : std::vector<std::pair<const char*, Analysis>>{
           {"5^1", Analysis::First}, {"2^2", Analysis::Second}, {"7^1", Analysis::Second}, {"3^2", Analysis::First}}) {
    const FieldCtx f = parse_field(desc);
    const GoodSets good = GoodSets::make(f, 2, an);
    Rng rng(17);
    for (int it = 0; it < 6; ++it) {
      FeltVec x;
      do {
        x = tuple_at(f, uniform_below(rng, f.d() * f.d()), 2);
      } while (!good.x_good(x));
      const FeltVec q = tuple_at(f, uniform_below(rng, f.d() * f.d()), 2);
      const EtaTable t = eta_table(f, x, false);
      const OutcomeDist dist = outcome_distribution(f, t, good, q);
      EXPECT_EQ(dist.branch, Branch::GoodBranch);
      const auto expect = naive_distribution(f, t, good, q);
      ASSERT_EQ(dist.probabilities.size(), expect.size());
      double sum = 0.0;
      for (std::size_t i = 0; i < expect.size(); ++i) {
        EXPECT_NEAR(dist.probabilities[i], expect[i], 1e-12) << desc;
        EXPECT_GE(dist.probabilities[i], -1e-12);
        sum += dist.probabilities[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      std::uint64_t bgood = 0;
      for (std::uint64_t w = 0; w < t.size(); ++w) bgood += good.w_good(t, w) ? t.eta(w) : 0;
      EXPECT_DOUBLE_EQ(dist.good_mass, double(bgood) / double(t.size()));
    }
  }
}

TEST(OutcomeDistribution, ShiftCovariance) {
  const FieldCtx f = make_field(7, 1);
  const GoodSets good = GoodSets::make(f, 2, Analysis::First);
  const FeltVec x{Felt{2}, Felt{5}};
  const EtaTable t = eta_table(f, x, false);
  Rng rng(3);
  for (int it = 0; it < 10; ++it) {
    const FeltVec q = tuple_at(f, uniform_below(rng, 49), 2);
    const FeltVec delta = tuple_at(f, uniform_below(rng, 49), 2);
    const FeltVec q2{f.add(q[0], delta[0]), f.add(q[1], delta[1])};
    const auto a = outcome_distribution(f, t, good, q).probabilities;
    const auto b = outcome_distribution(f, t, good, q2).probabilities;
    for (std::uint64_t qi = 0; qi < 49; ++qi) {
      const FeltVec qp = tuple_at(f, qi, 2);
      const FeltVec qp2{f.add(qp[0], delta[0]), f.add(qp[1], delta[1])};
      EXPECT_NEAR(a[qi], b[tuple_index(f, qp2)], 1e-12);
    }
  }
}

TEST(OutcomeDistribution, OneVariableIsDeterministic) {
  const FieldCtx f = make_field(11, 1);
  const GoodSets good = GoodSets::make(f, 1, Analysis::First);
  const FeltVec q{Felt{4}};
  for (std::uint32_t x = 1; x < 11; ++x) {
    const auto dist = outcome_distribution(f, eta_table(f, FeltVec{Felt{x}}, false), good, q);
    EXPECT_NEAR(dist.probabilities[4], 1.0, 1e-12);
    EXPECT_NEAR(dist.good_mass, 1.0, 1e-15);
  }
}

TEST(OutcomeDistribution, SingleFiberIsUniform) {
  const FieldCtx f = make_field(5, 1);
  const auto dist = ideal_outcome_distribution(f, eta_table(f, FeltVec{Felt{0}}, false), FeltVec{Felt{3}});
  EXPECT_EQ(dist.branch, Branch::Ideal);
  for (double p : dist.probabilities) EXPECT_NEAR(p, 0.2, 1e-12);
}

TEST(OutcomeDistribution, BadX) {
  const FieldCtx f = make_field(7, 1);
  const GoodSets good = GoodSets::make(f, 2, Analysis::First);
  const auto dist = outcome_distribution(f, eta_table(f, FeltVec{Felt{0}, Felt{1}}, false), good,
                                         FeltVec{Felt{1}, Felt{1}});
  EXPECT_EQ(dist.branch, Branch::BadBranch);
  EXPECT_EQ(dist.good_mass, 0.0);
  EXPECT_TRUE(dist.probabilities.empty());
}

TEST(OutcomeDistribution, IdealSumsToIdealSuccess) {
  // Averaging P(q' = q) over x reproduces the ideal formula.
  const FieldCtx f = make_field(5, 1);
  const auto tables = all_tables(f, 2);
  const FeltVec q{Felt{2}, Felt{3}};
  double avg = 0.0;
  for (const auto& t : tables) avg += ideal_outcome_distribution(f, t, q).probabilities[tuple_index(f, q)];
  EXPECT_NEAR(avg / 25.0, ideal_success(f, tables), 1e-12);
}

TEST(DistCsv, Format) {
  const FieldCtx f = make_field(2, 1);
  const auto dist = ideal_outcome_distribution(f, eta_table(f, FeltVec{Felt{1}}, false), FeltVec{Felt{1}});
  const std::string csv = dist_csv(f, dist, true);
  ASSERT_EQ(csv.rfind("x,q_prime,probability\n1,0,", 0), 0u) << csv;
  EXPECT_LT(std::stod(csv.substr(26, csv.find('\n', 26) - 26)), 1e-15);
  EXPECT_EQ(csv.substr(csv.size() - 6), "1,1,1\n");
}

TEST(CoefficientVector, Basic) {
  const FieldCtx f = make_field(7, 1);
  EXPECT_EQ(coefficient_vector(to_multi(parse_uni(f, "3*X^2 + 2*X^1 + 5")), 2), (FeltVec{Felt{2}, Felt{3}}));
  EXPECT_EQ(coefficient_vector(to_multi(parse_uni(f, "1*X^1")), 3), (FeltVec{Felt{1}, Felt{0}, Felt{0}}));
  EXPECT_THROW(coefficient_vector(to_multi(parse_uni(f, "1*X^3")), 2), std::invalid_argument);
}

TEST(Sampler, XIsUniform) {
  const FieldCtx f = make_field(7, 1);
  OutcomeSampler sampler(GoodSets::make(f, 2, Analysis::First));
  sampler.precompute(1);
  Rng rng(2026);
  const FeltVec q{Felt{1}, Felt{2}};
  std::vector<double> counts(49, 0.0);
  const int runs = 10'000;
  for (int i = 0; i < runs; ++i) counts[sampler.run_once(q, rng).x_index] += 1;
  double stat = 0.0;
  const double expect = runs / 49.0;
  for (double c : counts) stat += (c - expect) * (c - expect) / expect;
  const boost::math::chi_squared chi2(48);
  EXPECT_LT(stat, boost::math::quantile(chi2, 0.999));
}

double run_mc(HiddenInstance& inst, OutcomeSampler& sampler, std::uint64_t seed, McEstimate* out = nullptr) {
  Rng rng(seed);
  const McEstimate mc = monte_carlo(inst, sampler, 10'000, rng);
  if (out != nullptr) *out = mc;
  return mc.estimate;
}

TEST(Sampler, MonteCarloMatchesApprox) {
  const FieldCtx f = make_field(7, 1);
  const GoodSets good = GoodSets::make(f, 2, Analysis::First);
  const double p = approx_success(all_tables(f, 2), good);
  OutcomeSampler sampler(good);
  const double sigma = std::sqrt(p * (1 - p) / 1e4);

  auto ident = HiddenInstance::with_identity(f, to_multi(parse_uni(f, "4*X^2 + 3*X^1")), 2);
  McEstimate mc;
  const double a = run_mc(ident, sampler, 11, &mc);
  EXPECT_LT(std::abs(a - p), 4 * sigma);
  EXPECT_EQ(ident.query_count(), 2u * 10'000u);
  EXPECT_EQ(mc.runs, 10'000u);

  FeltVec pi(7);
  for (std::uint32_t i = 0; i < 7; ++i) pi[i] = Felt{(3 * i + 5) % 7};
  auto perm = HiddenInstance::with_fixed(f, to_multi(parse_uni(f, "4*X^2 + 3*X^1")), pi, 2);
  const double b = run_mc(perm, sampler, 12);
  EXPECT_LT(std::abs(b - p), 4 * sigma);
  EXPECT_LT(std::abs(a - b), 4 * std::sqrt(2.0) * sigma);
}

TEST(Sampler, BadBranchRateMatchesGoodMass) {
  const FieldCtx f = make_field(5, 1);
  const GoodSets good = GoodSets::make(f, 2, Analysis::Second);
  double expect_good = 0.0;
  for (const auto& t : all_tables(f, 2)) {
    if (!good.x_good(t.x())) continue;
    for (std::uint64_t w = 0; w < t.size(); ++w) expect_good += good.w_good(t, w) ? t.eta(w) : 0;
  }
  expect_good /= 625.0;
  OutcomeSampler sampler(good);
  Rng rng(5);
  const int runs = 20'000;
  int good_runs = 0;
  for (int i = 0; i < runs; ++i) good_runs += sampler.run_once(FeltVec{Felt{1}, Felt{0}}, rng).branch == Branch::GoodBranch;
  EXPECT_LT(std::abs(good_runs / double(runs) - expect_good), 4 * std::sqrt(expect_good * (1 - expect_good) / runs));
}

TEST(IdentifyUnivariate, RecoversCoefficients) {
  const FieldCtx f = make_field(11, 1);
  OutcomeSampler sampler(GoodSets::make(f, 2, Analysis::First));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto inst = HiddenInstance::sample(f, 1, 2, seed);
    Rng rng(seed + 100);
    const VoteResult v = identify_univariate(inst, sampler, 9, 450, rng);
    ASSERT_TRUE(v.candidate.has_value());
    EXPECT_EQ(*v.candidate, to_uni(inst.reveal()).without_constant());
    EXPECT_GE(v.runs, 9u);
  }
}

TEST(SuccessReport, AgreesWithTableFormulas) {
  for (auto [desc, an] : std::vector<std::pair<const char*, Analysis>>{
           {"7^1", Analysis::First}, {"7^1", Analysis::Second}, {"2^2", Analysis::Second}, {"5^1", Analysis::First}}) {
    const FieldCtx f = parse_field(desc);
    const GoodSets good = GoodSets::make(f, 2, an);
    const auto tables = all_tables(f, 2);
    const SuccessReport r = success_report(good, 2);
    EXPECT_NEAR(r.ideal_success, ideal_success(f, tables), 1e-12) << desc;
    EXPECT_NEAR(r.approx_success, approx_success(tables, good), 1e-12) << desc;
    EXPECT_NEAR(r.lemma2_lower_bound, lemma2_lower_bound(tables, good), 1e-12) << desc;
    EXPECT_LE(r.corollary_bound, r.lemma2_lower_bound + 1e-9);
    EXPECT_NO_THROW(check_sandwich(r));
  }
}

TEST(SuccessReport, JsonKeys) {
  const SuccessReport r = success_report(GoodSets::make(make_field(5, 1), 2, Analysis::First), 1);
  const auto j = to_json(r);
  for (const char* key : {"field", "modulus", "d", "n", "analysis", "good_sets", "ideal_success", "approx_success",
                          "lemma2_lower_bound", "corollary_bound", "kappa"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(SuccessReport, SandwichViolationThrows) {
  SuccessReport r;
  r.ideal_success = 0.4;
  r.approx_success = 0.5;
  EXPECT_THROW(check_sandwich(r), InvariantViolation);
}

TEST(SuccessReport, JobsDoNotChangeResult) {
  const GoodSets good = GoodSets::make(make_field(11, 1), 2, Analysis::First);
  const SuccessReport a = success_report(good, 1);
  const SuccessReport b = success_report(good, 3);
  EXPECT_EQ(a.approx_success, b.approx_success);
  EXPECT_EQ(a.ideal_success, b.ideal_success);
}

// Regression fixtures for n = 2, recorded from this implementation.
TEST(SuccessReport, RegressionFixtures) {
  struct Row {
    std::uint32_t d;
    Analysis an;
    double approx;
  };
  const std::vector<Row> rows = {
      {7, Analysis::First, 0.4333854399113525},   {11, Analysis::First, 0.468737941816528},
      {19, Analysis::First, 0.4872544586179589},  {31, Analysis::First, 0.4940667012205872},
      {61, Analysis::First, 0.49776094934558657}, {7, Analysis::Second, 0.3434229242928602},
      {11, Analysis::Second, 0.40043659628002093}, {19, Analysis::Second, 0.44250342079596555},
      {31, Analysis::Second, 0.46483076614168806}, {61, Analysis::Second, 0.4821605968642891},
  };
  double prev_second = 0.0;
  for (const Row& row : rows) {
    const SuccessReport r = success_report(GoodSets::make(make_field(row.d, 1), 2, row.an));
    EXPECT_NEAR(r.approx_success, row.approx, 1e-9) << row.d;
    EXPECT_GE(r.approx_success, 0.05);
    if (row.an == Analysis::Second) {
      EXPECT_GT(r.approx_success, prev_second);
      prev_second = r.approx_success;
      EXPECT_LE(r.corollary_bound, 1.0 / 16.0);
    }
  }
}

}  // namespace
}  // namespace hidpoly
