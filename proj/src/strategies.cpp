#include "bai/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bai {

namespace {

double overline_ln(std::size_t num_arms) {
  double v = 0.5;
  for (std::size_t k = 2; k <= num_arms; ++k) v += 1.0 / static_cast<double>(k);
  return v;
}

// Schedule arithmetic without validation; used both by sr_schedule and by the
// minimum-budget search.
PhaseSchedule build_schedule(std::size_t num_arms, std::uint64_t budget) {
  PhaseSchedule s;
  s.num_arms = num_arms;
  s.budget = budget;
  s.overline_ln_k = overline_ln(num_arms);
  const double t = static_cast<double>(budget);

  std::vector<double> real_lengths;
  real_lengths.push_back(t / s.overline_ln_k);
  for (std::size_t r = 2; r + 1 <= num_arms; ++r)
    real_lengths.push_back(t / (static_cast<double>(num_arms - r + 2) * s.overline_ln_k));

  std::uint64_t used = 0;
  for (double len : real_lengths) {
    s.phase_lengths.push_back(static_cast<std::uint64_t>(std::floor(len)));
    used += s.phase_lengths.back();
  }
  s.phase_lengths[0] += budget - used;  // leftover budget goes to phase 1

  std::uint64_t cum = 0;
  for (std::size_t r = 1; r < num_arms; ++r) {
    const std::uint64_t surviving = num_arms - r + 1;
    s.pulls_per_arm.push_back(s.phase_lengths[r - 1] / surviving);
    cum += s.pulls_per_arm.back();
    s.cumulative.push_back(cum);
    s.gamma.push_back(1.0 / (static_cast<double>(surviving) * s.overline_ln_k));
  }
  return s;
}

bool schedule_valid(const PhaseSchedule& s) {
  return std::all_of(s.pulls_per_arm.begin(), s.pulls_per_arm.end(),
                     [](std::uint64_t p) { return p >= 1; });
}

struct ArmDraws {
  const BanditProblem* problem;
  std::vector<RngStream> streams;

  ArmDraws(const BanditProblem& p, const RngStream& root) : problem(&p) {
    streams.reserve(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) streams.push_back(root.child(a));
  }

  double pull(std::size_t arm, StrategyTrace& trace) {
    ++trace.pulls[arm];
    ++trace.rewards_consumed;
    return draw_one(problem->arms[arm], streams[arm]);
  }
};

StrategyTrace run_successive_rejects(const BanditProblem& problem, std::uint64_t budget,
                                     const RngStream& stream) {
  const std::size_t K = problem.size();
  const PhaseSchedule schedule = sr_schedule(K, budget);
  StrategyTrace trace;
  trace.pulls.assign(K, 0);
  ArmDraws draws(problem, stream);

  std::vector<std::size_t> survivors(K);
  std::iota(survivors.begin(), survivors.end(), 0);
  std::vector<double> sums(K, 0.0);

  for (std::size_t r = 0; r + 1 < K; ++r) {
    for (std::size_t arm : survivors)
      for (std::uint64_t i = 0; i < schedule.pulls_per_arm[r]; ++i) sums[arm] += draws.pull(arm, trace);
    // All survivors hold the same sample count N_r, so comparing sums is
    // comparing averages. Ties reject the lowest index.
    std::size_t reject = survivors[0];
    for (std::size_t arm : survivors)
      if (sums[arm] < sums[reject]) reject = arm;
    trace.rejection_order.push_back(reject);
    survivors.erase(std::find(survivors.begin(), survivors.end(), reject));
  }
  trace.recommendation = survivors[0];
  return trace;
}

StrategyTrace run_uniform(const BanditProblem& problem, std::uint64_t budget, const RngStream& stream) {
  const std::size_t K = problem.size();
  const std::uint64_t per_arm = budget / K;
  if (per_arm == 0) throw std::invalid_argument("uniform strategy: budget must be at least the number of arms");
  StrategyTrace trace;
  trace.pulls.assign(K, 0);
  ArmDraws draws(problem, stream);

  std::vector<double> sums(K, 0.0);
  for (std::size_t a = 0; a < K; ++a)
    for (std::uint64_t i = 0; i < per_arm; ++i) sums[a] += draws.pull(a, trace);

  std::size_t best = 0;
  for (std::size_t a = 1; a < K; ++a)
    if (sums[a] > sums[best]) best = a;
  trace.recommendation = best;
  return trace;
}

StrategyTrace run_sequential_halving(const BanditProblem& problem, std::uint64_t budget,
                                     const RngStream& stream) {
  const std::size_t K = problem.size();
  const std::size_t rounds = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(K))));
  const std::uint64_t per_round = budget / rounds;
  if (per_round < K)
    throw std::invalid_argument("sequential halving: budget must allow one pull per arm per round");
  StrategyTrace trace;
  trace.pulls.assign(K, 0);
  ArmDraws draws(problem, stream);

  std::vector<std::size_t> survivors(K);
  std::iota(survivors.begin(), survivors.end(), 0);

  while (survivors.size() > 1) {
    const std::uint64_t per_arm = per_round / survivors.size();
    std::vector<std::pair<double, std::size_t>> round_means;
    round_means.reserve(survivors.size());
    for (std::size_t arm : survivors) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < per_arm; ++i) sum += draws.pull(arm, trace);
      round_means.emplace_back(sum / static_cast<double>(per_arm), arm);
    }
    std::sort(round_means.begin(), round_means.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t keep = (survivors.size() + 1) / 2;
    for (std::size_t i = round_means.size(); i-- > keep;) trace.rejection_order.push_back(round_means[i].second);
    survivors.clear();
    for (std::size_t i = 0; i < keep; ++i) survivors.push_back(round_means[i].second);
    std::sort(survivors.begin(), survivors.end());
  }
  trace.recommendation = survivors[0];
  return trace;
}

}  // namespace

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::successive_rejects: return "sr";
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::sequential_halving: return "sh";
  }
  return "?";
}

StrategyKind strategy_from_string(const std::string& name) {
  if (name == "sr" || name == "successive_rejects") return StrategyKind::successive_rejects;
  if (name == "uniform") return StrategyKind::uniform;
  if (name == "sh" || name == "sequential_halving") return StrategyKind::sequential_halving;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected sr, uniform, or sh)");
}

std::uint64_t sr_minimum_budget(std::size_t num_arms) {
  // Feasibility is monotone in the budget: phase lengths and per-arm pulls are
  // nondecreasing in T.
  std::uint64_t t = num_arms * (num_arms - 1);
  while (!schedule_valid(build_schedule(num_arms, t))) ++t;
  return t;
}

PhaseSchedule sr_schedule(std::size_t num_arms, std::uint64_t budget) {
  if (num_arms < 2) throw std::invalid_argument("sr_schedule: need at least two arms");
  if (budget >= num_arms * (num_arms - 1)) {
    PhaseSchedule s = build_schedule(num_arms, budget);
    if (schedule_valid(s)) return s;
  }
  std::ostringstream os;
  os << "sr_schedule: budget " << budget << " too small for " << num_arms
     << " arms; minimum budget is " << sr_minimum_budget(num_arms);
  throw std::invalid_argument(os.str());
}

StrategyTrace run_strategy(StrategyKind kind, const BanditProblem& problem, std::uint64_t budget,
                           const RngStream& stream) {
  switch (kind) {
    case StrategyKind::successive_rejects: return run_successive_rejects(problem, budget, stream);
    case StrategyKind::uniform: return run_uniform(problem, budget, stream);
    case StrategyKind::sequential_halving: return run_sequential_halving(problem, budget, stream);
  }
  throw std::logic_error("unreachable");
}

bool FrequencyChecks::all_pass() const {
  if (!balanced_worst) return false;
  return std::all_of(monotonous.begin(), monotonous.end(), [](bool b) { return b; });
}

FrequencyChecks empirical_frequency_checks(const BanditProblem& problem, StrategyKind kind,
                                           std::uint64_t budget, std::uint64_t replications,
                                           std::uint64_t master_seed) {
  if (!problem.generic)
    throw std::invalid_argument("empirical_frequency_checks: order statistics require a generic problem");
  if (replications == 0) throw std::invalid_argument("empirical_frequency_checks: need at least one replication");

  const std::size_t K = problem.size();
  std::vector<double> sum(K, 0.0), sumsq(K, 0.0);
  const RngStream root(master_seed);
  const double t = static_cast<double>(budget);
  for (std::uint64_t rep = 0; rep < replications; ++rep) {
    const StrategyTrace trace = run_strategy(kind, problem, budget, root.child(rep));
    for (std::size_t rank = 0; rank < K; ++rank) {
      const double f = static_cast<double>(trace.pulls[problem.by_rank[rank]]) / t;
      sum[rank] += f;
      sumsq[rank] += f * f;
    }
  }

  FrequencyChecks out;
  out.replications = replications;
  const double r = static_cast<double>(replications);
  out.rank_frequency.resize(K);
  out.rank_margin.resize(K);
  out.monotonous.resize(K);
  for (std::size_t rank = 0; rank < K; ++rank) {
    const double mean = sum[rank] / r;
    const double var = std::max(0.0, sumsq[rank] / r - mean * mean);
    const double se = replications > 1 ? std::sqrt(var / (r - 1.0)) : 0.0;
    const double bound = 1.0 / static_cast<double>(rank + 1) + 3.0 * se;
    out.rank_frequency[rank] = mean;
    out.rank_margin[rank] = bound - mean;
    out.monotonous[rank] = mean <= bound;
  }
  // The worst arm is rank K, whose monotonous bound 1/K coincides with the
  // balanced-against-the-worst-arm bound.
  out.worst_frequency = out.rank_frequency[K - 1];
  out.worst_margin = out.rank_margin[K - 1];
  out.balanced_worst = out.monotonous[K - 1];
  return out;
}

}  // namespace bai
