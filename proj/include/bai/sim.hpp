#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bai/bounds.hpp"
#include "bai/distributions.hpp"
#include "bai/strategies.hpp"

#include "json.hpp"

namespace bai {

// Thrown by slope_fit when fewer than three grid cells have a positive
// estimate; largest_usable_budget is the largest budget that still produced
// errors (0 when none did).
class insufficient_data_error : public std::runtime_error {
 public:
  insufficient_data_error(const std::string& what, std::uint64_t largest_usable_budget)
      : std::runtime_error(what), largest_usable_budget_(largest_usable_budget) {}
  std::uint64_t largest_usable_budget() const noexcept { return largest_usable_budget_; }

 private:
  std::uint64_t largest_usable_budget_;
};

struct ErrorEstimate {
  double p_hat = 0.0;
  double stderr_ = 0.0;  // sqrt(p(1-p)/R)
  std::uint64_t replications = 0;
};

// Fraction of replications whose recommendation misses the best arm.
// Child streams are a pure function of (master_seed, budget, replication), so
// the estimate is identical for any worker count or grid partition.
ErrorEstimate estimate_misid_prob(const BanditProblem& problem, StrategyKind kind, std::uint64_t budget,
                                  std::uint64_t replications, std::uint64_t master_seed,
                                  unsigned workers = 1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;  // two standard errors of the slope
  std::size_t cells_used = 0;
};

// Ordinary least squares of ln(p) on the budget, using only cells with p > 0.
SlopeFit slope_fit(const std::vector<std::pair<std::uint64_t, double>>& cells);

// Probability that the better arm's sample average falls at or below the
// worse arm's, estimated per sample size over a grid.
struct FlipCell {
  std::uint64_t sample_size = 0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
};

struct FlipReport {
  std::vector<FlipCell> cells;
  std::uint64_t replications = 0;
  std::size_t dropped_zero_cells = 0;
  std::optional<SlopeFit> fit;
  std::string fit_note;      // set when no fit was possible
  double rate = 0.0;         // pairwise rate of the pair (+inf possible)
};

FlipReport flip_prob_experiment(const Distribution& worse, const Distribution& better,
                                const std::vector<std::uint64_t>& sample_sizes, std::uint64_t replications,
                                std::uint64_t master_seed, unsigned workers = 1);

struct SimConfig {
  BanditProblem problem;
  StrategyKind strategy = StrategyKind::successive_rejects;
  std::vector<std::uint64_t> budgets;  // strictly increasing
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  bool bounds = true;
  unsigned workers = 1;
};

// Config JSON:
// {"problem": <path or inline problem object>, "strategy": "sr"|"uniform"|"sh",
//  "budgets": [..], "replications": n, "seed": n, "bounds": true|false,
//  "workers": n}
SimConfig config_from_json(const nlohmann::json& j);

struct SimCell {
  std::uint64_t budget = 0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
  std::uint64_t replications = 0;
  double wall_ms = 0.0;
};

struct Verdict {
  std::string outcome;  // UB_CONSISTENT / UB_INCONSISTENT / LB_CONSISTENT / LB_INCONSISTENT
  double bound = 0.0;
  double tolerance = 0.0;
};

struct SimReport {
  SimConfig config;
  std::vector<SimCell> cells;
  std::size_t dropped_zero_cells = 0;
  std::optional<SlopeFit> fit;
  std::string status;  // OK / DEGENERATE_ZERO_ERROR / INSUFFICIENT_DATA
  std::string status_detail;
  double resolution_floor = 0.0;  // -ln(R)/T_max: rates below it are unresolvable by plain MC
  std::optional<Verdict> upper_verdict;
  std::optional<Verdict> lower_verdict;
  std::optional<BoundReport> bounds;
  std::optional<FrequencyChecks> frequencies;
  double wall_ms_total = 0.0;
};

// Joins error estimation over the budget grid, the slope fit, the bound
// evaluators, and the frequency checks into one self-contained report.
// Consistency verdicts compare the fitted slope against the successive-rejects
// upper bound and the balanced lower bound with slack half_width + 2/T_max.
SimReport run_experiment(const SimConfig& config);

// Deterministic given the config seed when include_timing is false.
nlohmann::json to_json(const SimReport& report, bool include_timing = true);
std::string to_csv(const SimReport& report);

}  // namespace bai
