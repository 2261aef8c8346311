#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bai/bounds.hpp"
#include "bai/distributions.hpp"
#include "bai/info_geometry.hpp"
#include "bai/io.hpp"
#include "bai/sim.hpp"
#include "bai/strategies.hpp"
#include "bai/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPropertyFailure = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BAI_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw std::invalid_argument("BAI_SEED must be an unsigned integer");
    }
  }
  return 0;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot write to " + out_path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string fixed7(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(7) << v;
  return os.str();
}

std::vector<std::uint64_t> parse_budget_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stoull(token));
  }
  if (out.empty()) throw std::invalid_argument("--budgets: expected a comma-separated list of integers");
  return out;
}

nlohmann::json quantities_json(const bai::BanditProblem& problem) {
  using namespace bai;
  nlohmann::json arms = nlohmann::json::array();
  const bool exp_family = !problem.arms[0].is_finite_support();
  for (std::size_t a = 0; a < problem.size(); ++a) {
    nlohmann::json row;
    row["arm"] = a + 1;
    row["mean"] = problem.means[a];
    row["gap"] = problem.gaps[a];
    if (a != problem.best_arm) {
      const double x = problem.means[a];
      row["linf_below_weak"] = rate_to_json(linf(problem.best(), x, Side::below, false).value);
      row["linf_below_strict"] = rate_to_json(linf(problem.best(), x, Side::below, true).value);
      row["pair_rate"] = rate_to_json(pair_rate(problem.arms[a], problem.best()).value);
      if (exp_family) row["chernoff_d"] = rate_to_json(chernoff_d(problem.arms[a], problem.best()).value);
    }
    arms.push_back(row);
  }
  nlohmann::json j;
  j["problem"] = problem.digest();
  j["generic"] = problem.generic;
  j["best_arm"] = problem.best_arm + 1;
  j["worst_arm"] = problem.worst_arm + 1;
  j["arms"] = arms;
  return j;
}

std::string quantities_table(const nlohmann::json& q) {
  std::ostringstream os;
  os << "problem: " << q["problem"].get<std::string>() << "\n";
  os << "best arm: " << q["best_arm"] << "   worst arm: " << q["worst_arm"]
     << "   generic: " << (q["generic"].get<bool>() ? "yes" : "no") << "\n\n";
  os << std::left << std::setw(5) << "arm" << std::setw(12) << "mean" << std::setw(12) << "gap"
     << std::setw(18) << "linf_below_weak" << std::setw(19) << "linf_below_strict" << std::setw(12)
     << "pair_rate" << std::setw(12) << "chernoff_d" << "\n";
  const auto cell = [](const nlohmann::json& row, const char* key) -> std::string {
    if (!row.contains(key)) return "-";
    const auto& v = row.at(key);
    if (v.is_string()) return v.get<std::string>();
    return fixed7(v.get<double>());
  };
  for (const auto& row : q["arms"]) {
    os << std::left << std::setw(5) << row["arm"].get<std::size_t>() << std::setw(12)
       << fixed7(row["mean"].get<double>()) << std::setw(12) << fixed7(row["gap"].get<double>())
       << std::setw(18) << cell(row, "linf_below_weak") << std::setw(19) << cell(row, "linf_below_strict")
       << std::setw(12) << cell(row, "pair_rate") << std::setw(12) << cell(row, "chernoff_d") << "\n";
  }
  return os.str();
}

std::string bounds_table(const nlohmann::json& b) {
  std::ostringstream os;
  os << "problem: " << b["problem"].get<std::string>() << "\n\n";
  const auto rate_str = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    return fixed7(v.get<double>());
  };
  os << "upper bounds (rate per round):\n";
  for (const auto& [name, entry] : b["upper"].items())
    os << "  " << std::left << std::setw(22) << name << rate_str(entry["rate"]) << "\n";
  os << "lower bounds (rate per round):\n";
  for (const auto& [name, entry] : b["lower"].items()) {
    if (!entry.is_object() || !entry.contains("rate")) continue;
    os << "  " << std::left << std::setw(22) << name << rate_str(entry["rate"]) << "\n";
  }
  if (b["lower"].contains("gaussian_c"))
    os << "  " << std::left << std::setw(22) << "gaussian_c" << fixed7(b["lower"]["gaussian_c"].get<double>())
       << "\n";
  if (!b["skipped"].empty()) {
    os << "skipped:\n";
    for (const auto& [name, reason] : b["skipped"].items())
      os << "  " << std::left << std::setw(22) << name << reason.get<std::string>() << "\n";
  }
  return os.str();
}

int run(int argc, char** argv) {
  CLI::App app{"fixed-budget best-arm identification: rates, bounds, strategies, simulation"};
  app.require_subcommand(1);

  std::string problem_path, out_path, format = "table", config_path, strategy = "sr", budgets_csv;
  std::uint64_t replications = 1000;
  std::uint64_t budget = 0;
  std::optional<std::uint64_t> seed_opt;
  std::optional<double> c_model;
  unsigned workers = 1;
  bool no_bounds = false;

  const auto add_common = [&](CLI::App* cmd, bool needs_problem) {
    if (needs_problem) cmd->add_option("--problem", problem_path, "problem JSON file")->required();
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--format", format, "output format: table, json, or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    cmd->add_option("--seed", seed_opt, "random seed (fallback: BAI_SEED, then 0)");
  };

  auto* quantities = app.add_subcommand("quantities", "per-arm means, gaps, one-sided rates, pairwise rates");
  add_common(quantities, true);

  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate every applicable upper and lower bound");
  add_common(bounds_cmd, true);
  bounds_cmd->add_option("--budget", budget, "budget for the finite-budget alternatives bound");
  bounds_cmd->add_option("--c-model", c_model, "override the KL-vs-gap model constant");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo misidentification error over a budget grid");
  add_common(simulate, false);
  simulate->add_option("--config", config_path, "config JSON file");
  simulate->add_option("--problem", problem_path, "problem JSON file (with --strategy/--budgets/--replications)");
  simulate->add_option("--strategy", strategy, "sr, uniform, or sh");
  simulate->add_option("--budgets", budgets_csv, "comma-separated budget grid");
  simulate->add_option("--replications", replications, "replications per budget cell");
  simulate->add_option("--workers", workers, "parallel workers for replications");
  simulate->add_flag("--no-bounds", no_bounds, "skip the bound report");

  auto* flip = app.add_subcommand("flip", "pairwise sample-mean flip probabilities on a 2-arm problem");
  add_common(flip, true);
  flip->add_option("--budgets", budgets_csv, "comma-separated per-arm sample sizes")->required();
  flip->add_option("--replications", replications, "replications per cell");
  flip->add_option("--workers", workers, "parallel workers");

  auto* verify = app.add_subcommand("verify", "run the library's property suite");
  verify->add_option("--seed", seed_opt, "random seed (fallback: BAI_SEED, then 0)");

  CLI11_PARSE(app, argc, argv);
  const std::uint64_t seed = seed_opt ? *seed_opt : default_seed();

  if (quantities->parsed()) {
    const bai::BanditProblem problem = bai::problem_from_file(problem_path);
    const nlohmann::json q = quantities_json(problem);
    if (format == "json")
      emit(q.dump(2), out_path);
    else
      emit(quantities_table(q), out_path);
    return kExitOk;
  }

  if (bounds_cmd->parsed()) {
    const bai::BanditProblem problem = bai::problem_from_file(problem_path);
    bai::BoundOptions options;
    options.c_model = c_model;
    if (budget > 0) options.budget = budget;
    const nlohmann::json b = bai::to_json(bai::evaluate_bounds(problem, options));
    if (format == "json")
      emit(b.dump(2), out_path);
    else
      emit(bounds_table(b), out_path);
    return kExitOk;
  }

  if (simulate->parsed()) {
    bai::SimConfig cfg;
    if (!config_path.empty()) {
      cfg = bai::config_from_json(bai::load_json_file(config_path));
      if (seed_opt) cfg.seed = *seed_opt;
      if (workers > 1) cfg.workers = workers;
    } else {
      if (problem_path.empty())
        throw std::invalid_argument("simulate: provide --config or --problem with --budgets");
      if (budgets_csv.empty()) throw std::invalid_argument("simulate: --budgets is required without --config");
      cfg.problem = bai::problem_from_file(problem_path);
      cfg.strategy = bai::strategy_from_string(strategy);
      cfg.budgets = parse_budget_list(budgets_csv);
      cfg.replications = replications;
      cfg.seed = seed;
      cfg.bounds = !no_bounds;
      cfg.workers = workers;
    }
    const bai::SimReport report = bai::run_experiment(cfg);
    if (format == "csv")
      emit(bai::to_csv(report), out_path);
    else
      emit(bai::to_json(report).dump(2), out_path);
    return kExitOk;
  }

  if (flip->parsed()) {
    const bai::BanditProblem problem = bai::problem_from_file(problem_path);
    if (problem.size() != 2) throw std::invalid_argument("flip: the problem must have exactly two arms");
    const bai::Distribution& worse = problem.arms[problem.worst_arm];
    const bai::Distribution& better = problem.best();
    const bai::FlipReport report =
        bai::flip_prob_experiment(worse, better, parse_budget_list(budgets_csv), replications, seed, workers);
    nlohmann::json j;
    j["pair_rate"] = bai::rate_to_json(report.rate);
    j["replications"] = report.replications;
    j["dropped_zero_cells"] = report.dropped_zero_cells;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : report.cells)
      cells.push_back({{"N", c.sample_size}, {"p_hat", c.p_hat}, {"stderr", c.stderr_}});
    j["cells"] = cells;
    if (report.fit)
      j["fit"] = {{"slope", report.fit->slope},
                  {"intercept", report.fit->intercept},
                  {"half_width", report.fit->half_width},
                  {"cells_used", report.fit->cells_used}};
    else
      j["fit_note"] = report.fit_note;
    if (format == "csv") {
      std::ostringstream os;
      os.precision(17);
      os << "N,p_hat,stderr,R\n";
      for (const auto& c : report.cells)
        os << c.sample_size << "," << c.p_hat << "," << c.stderr_ << "," << report.replications << "\n";
      emit(os.str(), out_path);
    } else {
      emit(j.dump(2), out_path);
    }
    return kExitOk;
  }

  // verify
  const auto results = bai::run_property_suite(seed);
  std::ostringstream os;
  for (const auto& r : results) {
    const char* tag = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
    os << tag << "  " << std::left << std::setw(44) << r.name << " " << r.detail << "\n";
  }
  const bool ok = bai::all_passed(results);
  os << (ok ? "all properties passed" : "PROPERTY FAILURES PRESENT") << "\n";
  std::cout << os.str();
  return ok ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
