#pragma once

#include <cstdint>
#include <vector>

#include "bai/distributions.hpp"

namespace bai {

enum class StrategyKind { successive_rejects, uniform, sequential_halving };

const char* to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& name);

// Successive-rejects phase plan for K arms and budget T. phase_lengths holds
// the integer lengths after the floor-remainder rule (the leftover budget is
// added to phase 1); pulls_per_arm[r] is the per-surviving-arm pull count of
// phase r+1 and cumulative[r] the resulting per-arm sample size N_{r+1}.
struct PhaseSchedule {
  std::size_t num_arms = 0;
  std::uint64_t budget = 0;
  double overline_ln_k = 0.0;                // 1/2 + sum_{k=2}^K 1/k
  std::vector<std::uint64_t> phase_lengths;  // K-1 entries
  std::vector<std::uint64_t> pulls_per_arm;  // per phase
  std::vector<std::uint64_t> cumulative;     // N_r, strictly increasing
  std::vector<double> gamma;                 // 1 / ((K-r+1) * overline_ln_k)
};

PhaseSchedule sr_schedule(std::size_t num_arms, std::uint64_t budget);

// Smallest budget for which every phase pulls every surviving arm at least once.
std::uint64_t sr_minimum_budget(std::size_t num_arms);

struct StrategyTrace {
  std::vector<std::uint64_t> pulls;         // per arm, sums to rewards_consumed
  std::vector<std::size_t> rejection_order; // successive rejects / halving only
  std::size_t recommendation = 0;
  std::uint64_t rewards_consumed = 0;
};

// Runs one strategy on the problem. Rewards are drawn lazily, one per pull,
// from per-arm child streams of `stream`, so coupled seeds feed identical
// reward tables across strategies. All ties break toward the lowest index.
StrategyTrace run_strategy(StrategyKind kind, const BanditProblem& problem, std::uint64_t budget,
                           const RngStream& stream);

// Empirical pull-frequency checks over independent replications:
// the worst arm should be pulled at most a 1/K fraction of the time and the
// rank-a arm at most 1/a, each up to three standard errors.
struct FrequencyChecks {
  std::uint64_t replications = 0;
  bool balanced_worst = false;
  double worst_frequency = 0.0;
  double worst_margin = 0.0;                // (1/K + 3 se) - frequency
  std::vector<bool> monotonous;             // per rank, 1-based rank a at [a-1]
  std::vector<double> rank_frequency;
  std::vector<double> rank_margin;          // (1/a + 3 se) - frequency
  bool all_pass() const;
};

FrequencyChecks empirical_frequency_checks(const BanditProblem& problem, StrategyKind kind,
                                           std::uint64_t budget, std::uint64_t replications,
                                           std::uint64_t master_seed);

}  // namespace bai
