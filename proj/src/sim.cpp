#include "bai/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "bai/io.hpp"

namespace bai {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// Splits replication indices across workers; the per-replication work depends
// only on the derived child stream, so any partition yields the same counts.
template <class PerReplication>
std::uint64_t count_over_replications(std::uint64_t replications, unsigned workers, PerReplication&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || replications < 2 * workers) {
    std::uint64_t count = 0;
    for (std::uint64_t rep = 0; rep < replications; ++rep) count += body(rep) ? 1 : 0;
    return count;
  }
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::uint64_t lo = replications * w / workers;
      const std::uint64_t hi = replications * (w + 1) / workers;
      std::uint64_t local = 0;
      for (std::uint64_t rep = lo; rep < hi; ++rep) local += body(rep) ? 1 : 0;
      partial[w] = local;
    });
  }
  for (auto& t : pool) t.join();
  std::uint64_t count = 0;
  for (std::uint64_t c : partial) count += c;
  return count;
}

ErrorEstimate make_estimate(std::uint64_t errors, std::uint64_t replications) {
  ErrorEstimate e;
  e.replications = replications;
  e.p_hat = static_cast<double>(errors) / static_cast<double>(replications);
  e.stderr_ = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(replications));
  return e;
}

}  // namespace

ErrorEstimate estimate_misid_prob(const BanditProblem& problem, StrategyKind kind, std::uint64_t budget,
                                  std::uint64_t replications, std::uint64_t master_seed, unsigned workers) {
  if (replications == 0) throw std::invalid_argument("estimate_misid_prob: need at least one replication");
  const RngStream per_budget = RngStream(master_seed).child(budget);
  const std::size_t best = problem.best_arm;
  const std::uint64_t errors = count_over_replications(replications, workers, [&](std::uint64_t rep) {
    return run_strategy(kind, problem, budget, per_budget.child(rep)).recommendation != best;
  });
  return make_estimate(errors, replications);
}

SlopeFit slope_fit(const std::vector<std::pair<std::uint64_t, double>>& cells) {
  std::vector<std::pair<double, double>> pts;
  std::uint64_t largest_usable = 0;
  for (const auto& [budget, p] : cells) {
    if (p > 0.0) {
      pts.emplace_back(static_cast<double>(budget), std::log(p));
      largest_usable = std::max(largest_usable, budget);
    }
  }
  if (pts.size() < 3) {
    std::ostringstream os;
    os << "slope_fit: need at least 3 cells with positive estimates, got " << pts.size();
    if (largest_usable > 0)
      os << " (largest usable budget: " << largest_usable << ")";
    else
      os << " (no usable budget)";
    throw insufficient_data_error(os.str(), largest_usable);
  }

  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double xb = sx / n, yb = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - xb) * (x - xb);
    sxy += (x - xb) * (y - yb);
  }
  SlopeFit fit;
  fit.cells_used = pts.size();
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  double ssr = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
  }
  const double dof = n - 2.0;
  fit.half_width = dof > 0.0 ? 2.0 * std::sqrt(ssr / dof / sxx) : 0.0;
  return fit;
}

FlipReport flip_prob_experiment(const Distribution& worse, const Distribution& better,
                                const std::vector<std::uint64_t>& sample_sizes, std::uint64_t replications,
                                std::uint64_t master_seed, unsigned workers) {
  if (!(worse.mean() < better.mean()))
    throw std::invalid_argument("flip_prob_experiment: requires E(worse) < E(better)");
  if (replications == 0) throw std::invalid_argument("flip_prob_experiment: need at least one replication");

  FlipReport report;
  report.replications = replications;
  report.rate = pair_rate(worse, better).value;

  const RngStream root(master_seed);
  for (std::uint64_t n : sample_sizes) {
    if (n == 0) throw std::invalid_argument("flip_prob_experiment: sample sizes must be positive");
    const RngStream per_n = root.child(n);
    const std::uint64_t flips = count_over_replications(replications, workers, [&](std::uint64_t rep) {
      RngStream stream = per_n.child(rep);
      RngStream worse_stream = stream.child(0);
      RngStream better_stream = stream.child(1);
      double worse_sum = 0.0, better_sum = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) worse_sum += draw_one(worse, worse_stream);
      for (std::uint64_t i = 0; i < n; ++i) better_sum += draw_one(better, better_stream);
      return better_sum <= worse_sum;
    });
    const ErrorEstimate e = make_estimate(flips, replications);
    report.cells.push_back(FlipCell{n, e.p_hat, e.stderr_});
  }

  std::vector<std::pair<std::uint64_t, double>> pts;
  for (const auto& c : report.cells) {
    if (c.p_hat > 0.0)
      pts.emplace_back(c.sample_size, c.p_hat);
    else
      ++report.dropped_zero_cells;
  }
  try {
    report.fit = slope_fit(pts);
  } catch (const insufficient_data_error& e) {
    report.fit_note = e.what();
  }
  return report;
}

SimConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  SimConfig cfg;
  if (!j.contains("problem")) throw std::invalid_argument("config: missing field 'problem'");
  if (j.at("problem").is_string())
    cfg.problem = problem_from_file(j.at("problem").get<std::string>());
  else
    cfg.problem = problem_from_json(j.at("problem"));

  if (!j.contains("strategy") || !j.at("strategy").is_string())
    throw std::invalid_argument("config: field 'strategy' must be a string");
  cfg.strategy = strategy_from_string(j.at("strategy").get<std::string>());

  if (!j.contains("budgets") || !j.at("budgets").is_array() || j.at("budgets").empty())
    throw std::invalid_argument("config: field 'budgets' must be a nonempty array");
  for (const auto& b : j.at("budgets")) {
    if (!b.is_number_unsigned() || b.get<std::uint64_t>() == 0)
      throw std::invalid_argument("config: budgets must be positive integers");
    cfg.budgets.push_back(b.get<std::uint64_t>());
  }
  for (std::size_t i = 1; i < cfg.budgets.size(); ++i)
    if (cfg.budgets[i] <= cfg.budgets[i - 1])
      throw std::invalid_argument("config: budgets must be strictly increasing");

  if (!j.contains("replications") || !j.at("replications").is_number_unsigned() ||
      j.at("replications").get<std::uint64_t>() == 0)
    throw std::invalid_argument("config: field 'replications' must be a positive integer");
  cfg.replications = j.at("replications").get<std::uint64_t>();

  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.bounds = j.value("bounds", true);
  cfg.workers = j.value("workers", 1u);
  if (cfg.workers == 0) throw std::invalid_argument("config: workers must be positive");
  return cfg;
}

SimReport run_experiment(const SimConfig& config) {
  if (config.budgets.empty()) throw std::invalid_argument("run_experiment: empty budget grid");
  const double t0 = now_ms();

  SimReport report;
  report.config = config;
  const std::uint64_t t_max = config.budgets.back();
  report.resolution_floor = -std::log(static_cast<double>(config.replications)) / static_cast<double>(t_max);

  for (std::uint64_t budget : config.budgets) {
    const double c0 = now_ms();
    const ErrorEstimate e =
        estimate_misid_prob(config.problem, config.strategy, budget, config.replications, config.seed,
                            config.workers);
    report.cells.push_back(SimCell{budget, e.p_hat, e.stderr_, e.replications, now_ms() - c0});
  }

  std::vector<std::pair<std::uint64_t, double>> pts;
  for (const auto& c : report.cells) {
    if (c.p_hat > 0.0)
      pts.emplace_back(c.budget, c.p_hat);
    else
      ++report.dropped_zero_cells;
  }

  if (pts.empty()) {
    report.status = "DEGENERATE_ZERO_ERROR";
    report.status_detail = "no replication misidentified the best arm on any budget";
  } else {
    try {
      report.fit = slope_fit(pts);
      report.status = "OK";
    } catch (const insufficient_data_error& e) {
      report.status = "INSUFFICIENT_DATA";
      std::ostringstream os;
      os << e.what() << "; plain Monte Carlo cannot resolve rates below " << report.resolution_floor
         << " at the largest budget";
      report.status_detail = os.str();
    }
  }

  if (config.bounds) {
    report.bounds = evaluate_bounds(config.problem, BoundOptions{std::nullopt, t_max});
    if (report.fit && report.bounds->ub_sr_chernoff) {
      const double tol = report.fit->half_width + 2.0 / static_cast<double>(t_max);
      if (std::isfinite(report.bounds->ub_sr_chernoff->rate)) {
        Verdict v;
        v.bound = report.bounds->ub_sr_chernoff->rate;
        v.tolerance = tol;
        v.outcome = report.fit->slope <= v.bound + tol ? "UB_CONSISTENT" : "UB_INCONSISTENT";
        report.upper_verdict = v;
      }
      if (report.bounds->lb_balanced && std::isfinite(*report.bounds->lb_balanced)) {
        Verdict v;
        v.bound = *report.bounds->lb_balanced;
        v.tolerance = tol;
        v.outcome = report.fit->slope >= v.bound - tol ? "LB_CONSISTENT" : "LB_INCONSISTENT";
        report.lower_verdict = v;
      }
    }
  }

  if (config.problem.generic) {
    const std::uint64_t freq_reps = std::min<std::uint64_t>(config.replications, 200);
    report.frequencies = empirical_frequency_checks(config.problem, config.strategy, t_max, freq_reps,
                                                    RngStream(config.seed).child(0x5EEDF00DULL).seed());
  }

  report.wall_ms_total = now_ms() - t0;
  return report;
}

nlohmann::json to_json(const SimReport& r, bool include_timing) {
  nlohmann::json j;
  j["config"] = {{"problem", problem_to_json(r.config.problem)},
                 {"strategy", to_string(r.config.strategy)},
                 {"budgets", r.config.budgets},
                 {"replications", r.config.replications},
                 {"seed", r.config.seed},
                 {"bounds", r.config.bounds},
                 {"workers", r.config.workers}};
  j["generic"] = r.config.problem.generic;

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json cell = {{"T", c.budget}, {"p_hat", c.p_hat}, {"stderr", c.stderr_}, {"R", c.replications}};
    if (include_timing) cell["wall_ms"] = c.wall_ms;
    cells.push_back(cell);
  }
  j["cells"] = cells;
  j["dropped_zero_cells"] = r.dropped_zero_cells;
  j["status"] = r.status;
  if (!r.status_detail.empty()) j["status_detail"] = r.status_detail;
  j["resolution_floor"] = r.resolution_floor;

  if (r.fit) {
    j["fit"] = {{"slope", r.fit->slope},
                {"intercept", r.fit->intercept},
                {"half_width", r.fit->half_width},
                {"cells_used", r.fit->cells_used}};
  }
  const auto verdict_json = [](const Verdict& v) {
    return nlohmann::json{{"outcome", v.outcome}, {"bound", rate_to_json(v.bound)}, {"tolerance", v.tolerance}};
  };
  if (r.upper_verdict) j["upper_verdict"] = verdict_json(*r.upper_verdict);
  if (r.lower_verdict) j["lower_verdict"] = verdict_json(*r.lower_verdict);
  if (r.bounds) j["bounds"] = to_json(*r.bounds);
  if (r.frequencies) {
    const auto& f = *r.frequencies;
    j["frequencies"] = {{"replications", f.replications},
                        {"balanced_worst", f.balanced_worst},
                        {"worst_frequency", f.worst_frequency},
                        {"worst_margin", f.worst_margin},
                        {"rank_frequency", f.rank_frequency},
                        {"rank_margin", f.rank_margin},
                        {"monotonous", f.monotonous}};
  }
  if (include_timing) j["wall_ms_total"] = r.wall_ms_total;
  return j;
}

std::string to_csv(const SimReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "T,p_hat,stderr,R\n";
  for (const auto& c : r.cells) os << c.budget << "," << c.p_hat << "," << c.stderr_ << "," << c.replications << "\n";
  return os.str();
}

}  // namespace bai
