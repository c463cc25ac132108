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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidpoly/blackbox.hpp"
#include "hidpoly/fibers.hpp"
#include "hidpoly/gf.hpp"
#include "hidpoly/rng.hpp"

namespace hidpoly {

/// Success probability of the ideal measurement (U_x exact on every fiber):
///   d^(-3n) * sum_x (sum_w sqrt(eta_w^x))^2.
/// `tables` must contain exactly one table for every x in F^n.
double ideal_success(const FieldCtx& ctx, std::span<const EtaTable> tables);

/// Success probability of the approximate measurement:
///   d^(-3n) * sum_{x in X_good} (sum_{w in W_good^x} sqrt(eta_w^x))^2.
double approx_success(std::span<const EtaTable> tables, const GoodSets& good);

/// |X_good| * (min_x |W_good^x|)^2 / d^(3n).
double lemma2_lower_bound(std::span<const EtaTable> tables, const GoodSets& good);

enum class Branch { Ideal, GoodBranch, BadBranch };

std::string to_string(Branch b);

/// Distribution of the Fourier-basis outcome q' for one x. Probabilities are
/// indexed by the lexicographic index of q' and are conditional on the branch;
/// they are empty for BadBranch.
struct OutcomeDist {
  FeltVec x;
  Branch branch = Branch::BadBranch;
  double good_mass = 0.0;
  std::vector<double> probabilities;
};

/// Good-branch distribution. The amplitude of q' is
///   (d^n |B_good^x|)^(-1/2) * sum_{w in W_good^x} sqrt(eta_w) chi(<q - q', w>)
/// and good_mass = |B_good^x| / d^n.
OutcomeDist outcome_distribution(const FieldCtx& ctx, const EtaTable& table, const GoodSets& good,
                                 std::span<const Felt> q);
/// Same with every fiber kept (the ideal measurement); good_mass = 1.
OutcomeDist ideal_outcome_distribution(const FieldCtx& ctx, const EtaTable& table, std::span<const Felt> q);

/// CSV rows "x,q_prime,probability" (tuples joined by ';').
std::string dist_csv(const FieldCtx& ctx, const OutcomeDist& dist, bool header);

/// Coefficients (q_1, ..., q_n) of a univariate hidden polynomial; the constant
/// is dropped. Throws if the polynomial is not univariate or has degree > n.
FeltVec coefficient_vector(const MultiPoly& q, unsigned n);

struct RunOutcome {
  std::uint64_t x_index = 0;
  Branch branch = Branch::BadBranch;
  std::optional<FeltVec> q_prime;  // set for GoodBranch
};

/// Exact sampler for single runs of the univariate algorithm with k = n copies.
/// It draws from the analytic branch and outcome distributions instead of
/// simulating state vectors. Per-x data are built on first use, so a sampler
/// may be shared between threads only after precompute().
class OutcomeSampler {
 public:
  OutcomeSampler(GoodSets good, std::uint64_t budget = kEnumerationBudget);

  const GoodSets& good() const { return good_; }
  unsigned n() const { return good_.n(); }

  /// Builds the data for every x (in parallel).
  void precompute(unsigned jobs = 0);

  /// x uniform on F^n; BadBranch when x is not good or the P_good projection
  /// fails; otherwise q' from the good-branch distribution for hidden q.
  RunOutcome run_once(std::span<const Felt> q, Rng& rng);
  /// Same for a univariate oracle: reads its hidden coefficients (simulation
  /// only) and charges n queries for the n copies of the state.
  RunOutcome run_once(Oracle& oracle, Rng& rng);

 private:
  struct PerX {
    bool ready = false;
    double good_mass = 0.0;
    std::vector<double> shift_cdf;  // cumulative distribution of q - q'
  };
  const PerX& per_x(std::uint64_t x_index);

  GoodSets good_;
  std::uint64_t budget_;
  std::uint64_t x_count_;
  std::vector<PerX> cache_;
};

struct McEstimate {
  std::uint64_t runs = 0;
  std::uint64_t successes = 0;
  std::uint64_t bad_branch = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
};

nlohmann::json to_json(const McEstimate& mc);

/// Fraction of `runs` runs whose outcome q' equals the hidden coefficients.
McEstimate monte_carlo(Oracle& oracle, OutcomeSampler& sampler, std::uint64_t runs, Rng& rng);

struct VoteResult {
  std::optional<UniPoly> candidate;
  std::uint64_t runs = 0;
  std::uint64_t bad_runs = 0;
};

/// Repeats runs (retrying bad branches) until `votes` good-branch outcomes are
/// collected or `max_runs` is reached, then returns the majority outcome as a
/// polynomial with zero constant term. Ties go to the first tied outcome that
/// passes verify_candidate, else the smallest tied outcome.
VoteResult identify_univariate(Oracle& oracle, OutcomeSampler& sampler, unsigned votes, std::uint64_t max_runs,
                               Rng& rng);

struct SuccessReport {
  std::string field;
  std::string modulus;
  std::uint32_t d = 0;
  unsigned n = 0;
  GoodSummary good;
  double ideal_success = 0.0;
  double approx_success = 0.0;
  double lemma2_lower_bound = 0.0;
  /// First analysis: d^(-3n) (d-1)^n ((d)_n / D - kappa d^(n-1))^2 with kappa
  /// the smallest integer such that kappa d^(n-1) covers the image of the
  /// points with repeated coordinates for every good x. Second analysis (n = 2):
  /// |X_good| (d^n / D)^2 / d^(3n).
  double corollary_bound = 0.0;
  std::uint64_t kappa = 0;
  std::optional<McEstimate> mc;
};

nlohmann::json to_json(const SuccessReport& r);

/// Streams over every x (d^(2n) work, parallel over x) and fills every field
/// except `mc`. Throws InvariantViolation if
/// lemma2 <= approx <= ideal <= 1 fails beyond 1e-9.
SuccessReport success_report(const GoodSets& good, unsigned jobs = 0, std::uint64_t budget = 1'000'000'000);

/// Throws InvariantViolation unless 0 <= lemma2 <= approx <= ideal <= 1 (1e-9 slack).
void check_sandwich(const SuccessReport& r);

}  // namespace hidpoly
