#include "bai/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unique_optimum(const BanditProblem& p, const char* op) {
  const double best = p.best_mean();
  std::size_t count = 0;
  for (double m : p.means)
    if (m == best) ++count;
  if (count != 1) throw std::invalid_argument(std::string(op) + ": requires a unique optimal arm");
}

void require_generic(const BanditProblem& p, const char* op) {
  if (!p.generic) throw std::invalid_argument(std::string(op) + ": requires a generic problem (pairwise-distinct means)");
}

bool unit_interval_model(const BanditProblem& p) {
  if (p.arms[0].is_finite_support()) return true;
  return p.arms[0].exp_family().family == Family::bernoulli;
}

template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi) {
  constexpr double kRatio = 0.61803398874989485;
  double a = lo, b = hi;
  double x1 = b - kRatio * (b - a);
  double x2 = a + kRatio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int i = 0; i < 250 && (b - a) > tol; ++i) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kRatio * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kRatio * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

}  // namespace

SrUpperBound sr_upper_bound(const BanditProblem& problem, UpperBoundKind kind) {
  require_unique_optimum(problem, "sr_upper_bound");
  if (kind == UpperBoundKind::gap_squared && !unit_interval_model(problem))
    throw std::invalid_argument("sr_upper_bound: the squared-gap variant requires a [0,1]-supported model");

  const std::size_t K = problem.size();
  std::vector<double> f(K, 0.0);
  for (std::size_t a = 0; a < K; ++a) {
    if (a == problem.best_arm) continue;
    if (kind == UpperBoundKind::pairwise_rate)
      f[a] = pair_rate(problem.arms[a], problem.best()).value;
    else
      f[a] = problem.gaps[a] * problem.gaps[a];
  }

  SrUpperBound out;
  out.kind = kind;
  out.ordering.resize(K);
  std::iota(out.ordering.begin(), out.ordering.end(), 0);
  std::sort(out.ordering.begin(), out.ordering.end(), [&](std::size_t a, std::size_t b) {
    if (a == problem.best_arm) return true;
    if (b == problem.best_arm) return false;
    if (f[a] != f[b]) return f[a] < f[b];
    return a < b;
  });

  double ovln = 0.5;
  for (std::size_t k = 2; k <= K; ++k) ovln += 1.0 / static_cast<double>(k);

  double best = kInf;
  out.argmin_k = 2;
  for (std::size_t k = 2; k <= K; ++k) {
    const double v = f[out.ordering[k - 1]] / static_cast<double>(k);
    if (v < best) {
      best = v;
      out.argmin_k = k;
    }
  }
  out.rate = -best / ovln;
  return out;
}

double balanced_lower_bound(const BanditProblem& problem) {
  require_generic(problem, "balanced_lower_bound");
  const std::size_t K = problem.size();
  double best = kInf;
  for (std::size_t k = 2; k <= K; ++k) {
    const double v = linf(problem.best(), problem.rank_mean(k), Side::below, /*strict=*/true).value /
                     static_cast<double>(k);
    best = std::min(best, v);
  }
  return -best;
}

MonotonousLowerBound monotonous_lower_bound(const BanditProblem& problem) {
  require_generic(problem, "monotonous_lower_bound");
  const std::size_t K = problem.size();
  const double range = problem.rank_mean(1) - problem.rank_mean(K);

  MonotonousLowerBound out;
  double best = kInf;
  out.x = problem.rank_mean(2);
  for (std::size_t k = 2; k <= K; ++k) {
    const Distribution& competitor = problem.arms[problem.rank_arm(k)];
    const SupportInfo sc = support(competitor);
    const SupportInfo sb = support(problem.best());
    for (std::size_t j = 2; j <= k; ++j) {
      // x ranges over [mu_(j), mu_(j-1)); the half-open right end is taken as
      // a left limit, and the window is clamped to where both one-sided rates
      // are finite. Weak variants are used for evaluation: inside the open
      // window they agree with the strict ones, and the infimum over a
      // nondegenerate interval is unchanged.
      const double wj = 1.0 / static_cast<double>(j);
      const double wj1 = 1.0 / static_cast<double>(j - 1);
      const auto value_at = [&](double x) {
        return wj1 * linf(competitor, x, Side::above, /*strict=*/false).value +
               wj * linf(problem.best(), x, Side::below, /*strict=*/false).value;
      };
      double lo = problem.rank_mean(j);
      double hi = problem.rank_mean(j - 1) - 1e-9 * range;
      lo = std::max(lo, sb.lower);
      hi = std::min(hi, sc.upper);
      // A degenerate window leaves only support-end points, where the strict
      // rates are infinite; it contributes nothing.
      if (!(lo < hi)) continue;
      auto [xstar, v] = golden_min(value_at, lo, hi);
      for (double xe : {lo, hi}) {
        const double ve = value_at(xe);
        if (ve < v) {
          v = ve;
          xstar = xe;
        }
      }
      if (v < best) {
        best = v;
        out.k = k;
        out.j = j;
        out.x = xstar;
      }
    }
  }
  out.rate = -best;
  return out;
}

double pairwise_lower_bound(const BanditProblem& problem) {
  require_generic(problem, "pairwise_lower_bound");
  const std::size_t K = problem.size();
  const Distribution& star = problem.best();
  const SupportInfo ss = support(star);
  double best = kInf;

  for (std::size_t a = 0; a < K; ++a) {
    if (a == problem.best_arm) continue;
    const Distribution& rival = problem.arms[a];
    const SupportInfo sr = support(rival);
    // The max of the two one-sided rates is finite only where both are; the
    // increasing branch is the above-rate of the rival, the decreasing one the
    // below-rate of the best arm.
    const auto up = [&](double x) { return linf(rival, x, Side::above, /*strict=*/false).value; };
    const auto down = [&](double x) { return linf(star, x, Side::below, /*strict=*/false).value; };
    double lo = std::max(problem.means[a], ss.lower);
    double hi = std::min(problem.best_mean(), sr.upper);
    double contribution = kInf;
    if (lo < hi) {
      const double inset = 1e-12 * (hi - lo);
      double blo = lo + inset, bhi = hi - inset;
      for (int i = 0; i < 200 && (bhi - blo) > 1e-14 * (hi - lo); ++i) {
        const double mid = 0.5 * (blo + bhi);
        if (up(mid) < down(mid))
          blo = mid;
        else
          bhi = mid;
      }
      for (double x : {lo + inset, 0.5 * (blo + bhi), hi - inset})
        contribution = std::min(contribution, std::max(up(x), down(x)));
    }
    // At a single shared point the strict rates are infinite, so a singleton
    // window contributes nothing.
    best = std::min(best, contribution);
  }
  return -best;
}

double gap_scaled_lower_bound(const BanditProblem& problem, double c_model) {
  require_generic(problem, "gap_scaled_lower_bound");
  if (!(c_model > 0.0)) throw std::invalid_argument("gap_scaled_lower_bound: c_model must be positive");
  const std::size_t K = problem.size();
  double best = kInf;
  for (std::size_t k = 2; k <= K; ++k) {
    const double gap = problem.best_mean() - problem.rank_mean(k);
    best = std::min(best, gap * gap / static_cast<double>(k));
  }
  return -5.0 * c_model * best;
}

AlternativesBound alternatives_lower_bound(const BanditProblem& problem,
                                           const std::vector<Distribution>& alternatives,
                                           std::uint64_t budget) {
  require_unique_optimum(problem, "alternatives_lower_bound");
  if (budget == 0) throw std::invalid_argument("alternatives_lower_bound: budget must be positive");
  if (alternatives.size() != problem.size() - 1)
    throw std::invalid_argument("alternatives_lower_bound: need one alternative per suboptimal arm");

  double inv_sum = 0.0;
  std::size_t idx = 0;
  for (std::size_t a = 0; a < problem.size(); ++a) {
    if (a == problem.best_arm) continue;
    const Distribution& zeta = alternatives[idx++];
    if (!(zeta.mean() > problem.best_mean()))
      throw std::invalid_argument("alternatives_lower_bound: every alternative mean must exceed the best mean");
    const double kl = kl_divergence(problem.arms[a], zeta);
    inv_sum += 1.0 / kl;
  }
  AlternativesBound out;
  out.budget = budget;
  out.rate = -1.0 / inv_sum - std::log(4.0) / static_cast<double>(budget);
  out.caveat = "bounds the max error over the original and alternative instances";
  return out;
}

std::pair<double, AlternativesBound> gaussian_alternatives_bound(const BanditProblem& problem,
                                                                 std::uint64_t budget) {
  if (problem.arms[0].is_finite_support() ||
      problem.arms[0].exp_family().family != Family::gaussian_fixed_variance)
    throw std::invalid_argument("gaussian_alternatives_bound: fixed-variance Gaussian arms required");
  require_unique_optimum(problem, "gaussian_alternatives_bound");

  const double sigma2 = problem.arms[0].exp_family().sigma2;
  double c = 0.0;
  std::vector<Distribution> alternatives;
  for (std::size_t a = 0; a < problem.size(); ++a) {
    if (a == problem.best_arm) continue;
    c += 2.0 * sigma2 / (problem.gaps[a] * problem.gaps[a]);
    alternatives.push_back(Distribution::gaussian(problem.best_mean() + problem.gaps[a], sigma2));
  }
  return {c, alternatives_lower_bound(problem, alternatives, budget)};
}

double minimax_bernoulli_value(const BanditProblem& problem) {
  require_generic(problem, "minimax_bernoulli_value");
  if (problem.size() < 3) throw std::invalid_argument("minimax_bernoulli_value: requires at least three arms");
  if (problem.arms[0].is_finite_support() || problem.arms[0].exp_family().family != Family::bernoulli)
    throw std::invalid_argument("minimax_bernoulli_value: Bernoulli arms required");
  for (double m : problem.means)
    if (m < 0.25 || m > 0.75)
      throw std::invalid_argument("minimax_bernoulli_value: all parameters must lie in [1/4, 3/4]");

  double inv_sum = 0.0;
  for (std::size_t a = 0; a < problem.size(); ++a) {
    if (a == problem.best_arm) continue;
    inv_sum += 1.0 / (problem.gaps[a] * problem.gaps[a]);
  }
  return -(30.0 / std::log(static_cast<double>(problem.size()))) / inv_sum;
}

BoundReport evaluate_bounds(const BanditProblem& problem, const BoundOptions& options) {
  BoundReport report;
  report.problem_digest = problem.digest();
  report.num_arms = problem.size();
  report.generic = problem.generic;
  {
    const double best = problem.best_mean();
    std::size_t count = 0;
    for (double m : problem.means)
      if (m == best) ++count;
    report.unique_optimum = count == 1;
  }
  const SupportInfo sb = support(problem.best());
  for (std::size_t a = 0; a < problem.size() && !report.shared_end_atoms; ++a) {
    if (a == problem.best_arm) continue;
    const SupportInfo sa = support(problem.arms[a]);
    if (std::isfinite(sa.upper) && sa.upper == sb.lower && sa.mass_at_upper > 0.0 && sb.mass_at_lower > 0.0)
      report.shared_end_atoms = true;
  }

  if (!report.unique_optimum) {
    report.skipped.emplace_back("all", "no unique optimal arm");
    return report;
  }

  report.ub_sr_chernoff = sr_upper_bound(problem, UpperBoundKind::pairwise_rate);
  if (unit_interval_model(problem))
    report.ub_sr_gap = sr_upper_bound(problem, UpperBoundKind::gap_squared);
  else
    report.skipped.emplace_back("ub_sr_gap", "squared-gap bound needs a [0,1]-supported model");

  if (!problem.generic) {
    report.skipped.emplace_back("lower bounds", "problem is not generic");
    return report;
  }

  report.lb_balanced = balanced_lower_bound(problem);
  report.lb_monotonous = monotonous_lower_bound(problem);
  report.lb_pairwise = pairwise_lower_bound(problem);
  if (problem.size() == 2) report.lb_two_arm = *report.lb_pairwise;

  std::optional<double> c_model = options.c_model;
  if (!c_model && !problem.arms[0].is_finite_support()) {
    const auto& ef = problem.arms[0].exp_family();
    if (ef.family == Family::gaussian_fixed_variance) {
      c_model = 1.0 / (2.0 * ef.sigma2);
    } else if (ef.family == Family::bernoulli) {
      // Tightest symmetric parameter range [p, 1-p] containing all arms.
      double p = 0.5;
      for (double m : problem.means) p = std::min({p, m, 1.0 - m});
      c_model = 1.0 / (2.0 * p * (1.0 - p));
    }
  }
  if (c_model) {
    report.c_model = c_model;
    report.lb_gap = gap_scaled_lower_bound(problem, *c_model);
  } else {
    report.skipped.emplace_back("lb_gap", "no KL-vs-gap constant available for this model");
  }

  if (!problem.arms[0].is_finite_support() &&
      problem.arms[0].exp_family().family == Family::gaussian_fixed_variance) {
    const double sigma2 = problem.arms[0].exp_family().sigma2;
    double c = 0.0;
    for (std::size_t a = 0; a < problem.size(); ++a)
      if (a != problem.best_arm) c += 2.0 * sigma2 / (problem.gaps[a] * problem.gaps[a]);
    report.gaussian_c = c;
    if (options.budget && *options.budget > 0)
      report.lb_alternatives = gaussian_alternatives_bound(problem, *options.budget).second;
    else
      report.skipped.emplace_back("lb_alternatives", "needs a budget (pass one to enable)");
  } else {
    report.skipped.emplace_back("lb_alternatives", "auto-chosen alternatives exist for Gaussian arms only");
  }

  try {
    report.lb_minimax_bernoulli = minimax_bernoulli_value(problem);
  } catch (const std::invalid_argument& e) {
    report.skipped.emplace_back("lb_minimax_bernoulli", e.what());
  }
  return report;
}

nlohmann::json rate_to_json(double value) {
  if (std::isfinite(value)) return value;
  return value > 0 ? "+inf" : "-inf";
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["problem"] = r.problem_digest;
  j["num_arms"] = r.num_arms;
  j["generic"] = r.generic;
  j["unique_optimum"] = r.unique_optimum;
  j["shared_end_atoms"] = r.shared_end_atoms;

  nlohmann::json upper = nlohmann::json::object();
  const auto dump_ub = [](const SrUpperBound& b) {
    nlohmann::json o;
    o["rate"] = rate_to_json(b.rate);
    o["variant"] = "weak one-sided rates";
    nlohmann::json ordering = nlohmann::json::array();
    for (std::size_t a : b.ordering) ordering.push_back(a + 1);
    o["ordering"] = ordering;
    o["argmin_k"] = b.argmin_k;
    return o;
  };
  if (r.ub_sr_chernoff) upper["sr_chernoff"] = dump_ub(*r.ub_sr_chernoff);
  if (r.ub_sr_gap) upper["sr_gap"] = dump_ub(*r.ub_sr_gap);
  j["upper"] = upper;

  nlohmann::json lower = nlohmann::json::object();
  if (r.lb_balanced) lower["balanced"] = {{"rate", rate_to_json(*r.lb_balanced)}, {"variant", "strict one-sided rates"}};
  if (r.lb_monotonous)
    lower["monotonous"] = {{"rate", rate_to_json(r.lb_monotonous->rate)},
                           {"variant", "strict one-sided rates"},
                           {"argmin", {{"k", r.lb_monotonous->k}, {"j", r.lb_monotonous->j}, {"x", r.lb_monotonous->x}}}};
  if (r.lb_pairwise) lower["pairwise"] = {{"rate", rate_to_json(*r.lb_pairwise)}, {"variant", "strict one-sided rates"}};
  if (r.lb_two_arm) lower["two_arm"] = {{"rate", rate_to_json(*r.lb_two_arm)}};
  if (r.lb_gap) lower["gap"] = {{"rate", rate_to_json(*r.lb_gap)}, {"c_model", *r.c_model}};
  if (r.lb_alternatives)
    lower["alternatives"] = {{"rate", rate_to_json(r.lb_alternatives->rate)},
                             {"budget", r.lb_alternatives->budget},
                             {"caveat", r.lb_alternatives->caveat}};
  if (r.gaussian_c) lower["gaussian_c"] = *r.gaussian_c;
  if (r.lb_minimax_bernoulli)
    lower["minimax_bernoulli"] = {{"rate", rate_to_json(*r.lb_minimax_bernoulli)},
                                  {"note", "existence-only: holds for some instance and budget subsequence"}};
  j["lower"] = lower;

  nlohmann::json skipped = nlohmann::json::object();
  for (const auto& [name, reason] : r.skipped) skipped[name] = reason;
  j["skipped"] = skipped;
  return j;
}

}  // namespace bai
