#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bai/distributions.hpp"
#include "bai/info_geometry.hpp"

#include "json.hpp"

namespace bai {

// Which lower bound f on the pairwise rate feeds the successive-rejects
// upper bound: the rate itself, or the squared gap (valid on [0,1] models).
enum class UpperBoundKind { pairwise_rate, gap_squared };

struct SrUpperBound {
  double rate = 0.0;                  // nonpositive, possibly -inf
  UpperBoundKind kind = UpperBoundKind::pairwise_rate;
  std::vector<std::size_t> ordering;  // arms sorted by ascending f, ordering[0] = best arm
  std::size_t argmin_k = 2;           // 1-based position in the ordering achieving the min
};

struct MonotonousLowerBound {
  double rate = 0.0;
  std::size_t k = 2;  // rank of the competing arm (1-based, 2..K)
  std::size_t j = 2;  // rank window index (2..k)
  double x = 0.0;     // minimizing threshold
};

// Expected-value comparison bound evaluated at a finite budget via alternative
// instances whose means exceed the best arm's. Controls the maximum of the
// misidentification probabilities over the original and alternative instances,
// not the original instance alone.
struct AlternativesBound {
  double rate = 0.0;    // -(sum_a 1/KL(nu_a, zeta_a))^{-1} - ln(4)/T
  std::uint64_t budget = 0;
  std::string caveat;
};

// Every bound applicable to a problem, on the ln-probability-per-round scale
// (nonpositive, -inf allowed). Absent optionals were not applicable; the
// `skipped` map records why.
struct BoundReport {
  std::string problem_digest;
  std::size_t num_arms = 0;
  bool generic = false;
  bool unique_optimum = false;
  // A suboptimal arm's support touches the best arm's lower support end with
  // atoms on both sides; weak and strict one-sided rates then differ there.
  bool shared_end_atoms = false;

  std::optional<SrUpperBound> ub_sr_chernoff;
  std::optional<SrUpperBound> ub_sr_gap;
  std::optional<double> lb_balanced;
  std::optional<MonotonousLowerBound> lb_monotonous;
  std::optional<double> lb_pairwise;
  std::optional<double> lb_two_arm;  // K = 2 only; equals lb_pairwise
  std::optional<double> lb_gap;
  std::optional<double> c_model;     // constant used by lb_gap
  std::optional<AlternativesBound> lb_alternatives;
  std::optional<double> gaussian_c;  // sum of 2 sigma^2 / gap^2
  std::optional<double> lb_minimax_bernoulli;  // existence-only: holds for some
                                               // instance/subsequence, not this one
  std::vector<std::pair<std::string, std::string>> skipped;
};

// Individual evaluators. Ranks are 1-based and follow descending means.
SrUpperBound sr_upper_bound(const BanditProblem& problem, UpperBoundKind kind);
double balanced_lower_bound(const BanditProblem& problem);
MonotonousLowerBound monotonous_lower_bound(const BanditProblem& problem);
double pairwise_lower_bound(const BanditProblem& problem);
double gap_scaled_lower_bound(const BanditProblem& problem, double c_model);
AlternativesBound alternatives_lower_bound(const BanditProblem& problem,
                                           const std::vector<Distribution>& alternatives,
                                           std::uint64_t budget);
// Gaussian-only helper: C(problem) plus the bound with the canonical
// alternatives mean* + gap_k.
std::pair<double, AlternativesBound> gaussian_alternatives_bound(const BanditProblem& problem,
                                                                 std::uint64_t budget);
double minimax_bernoulli_value(const BanditProblem& problem);

struct BoundOptions {
  std::optional<double> c_model;     // override for the gap-scaled bound
  std::optional<std::uint64_t> budget;  // enables the alternatives bound
};

BoundReport evaluate_bounds(const BanditProblem& problem, const BoundOptions& options = {});

nlohmann::json to_json(const BoundReport& report);

// Shared JSON convention for rates: finite doubles stay numbers, infinities
// become the strings "-inf" / "+inf".
nlohmann::json rate_to_json(double value);

}  // namespace bai
