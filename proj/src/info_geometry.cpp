#include "bai/info_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLambdaGuard = 700.0;

struct MgfEval {
  double log_mgf;
  double tilted_mean;
};

MgfEval mgf_eval(const Distribution& d, double lambda) {
  if (d.is_finite_support()) {
    const auto& fs = d.finite_support();
    const auto& xs = fs.atoms();
    const auto& ws = fs.weights();
    double zmax = -kInf;
    for (std::size_t i = 0; i < xs.size(); ++i)
      zmax = std::max(zmax, std::log(ws[i]) + lambda * xs[i]);
    double sum = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = std::exp(std::log(ws[i]) + lambda * xs[i] - zmax);
      sum += e;
      wsum += e * xs[i];
    }
    return {zmax + std::log(sum), wsum / sum};
  }
  const auto& ef = d.exp_family();
  switch (ef.family) {
    case Family::bernoulli: {
      const double p = ef.mean;
      if (lambda > 0.0) {
        // ln(1-p+p e^l) = l + ln(1 + (1-p)(e^{-l}-1))
        const double lm = (1.0 - p) * std::expm1(-lambda);
        return {lambda + std::log1p(lm), p / (p + (1.0 - p) * std::exp(-lambda))};
      }
      const double el = std::exp(lambda);
      return {std::log1p(p * std::expm1(lambda)), p * el / (1.0 - p + p * el)};
    }
    case Family::gaussian_fixed_variance:
      return {lambda * ef.mean + 0.5 * lambda * lambda * ef.sigma2, ef.mean + lambda * ef.sigma2};
    case Family::poisson:
      return {ef.mean * std::expm1(lambda), ef.mean * std::exp(lambda)};
  }
  throw std::logic_error("unreachable");
}

// Golden-section maximization of a concave function on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi) {
  constexpr double kRatio = 0.61803398874989485;
  double a = lo, b = hi;
  double x1 = b - kRatio * (b - a);
  double x2 = a + kRatio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double tol = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int i = 0; i < 250 && (b - a) > tol; ++i) {
    if (f1 < f2) {
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

template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi) {
  auto [x, v] = golden_max([&](double t) { return -f(t); }, lo, hi);
  return {x, -v};
}

bool supported_on_unit_interval(const Distribution& d) {
  if (d.is_finite_support()) return true;
  return d.exp_family().family == Family::bernoulli;
}

}  // namespace

const char* to_string(RateMethod m) {
  switch (m) {
    case RateMethod::closed_form_d: return "closed_form_d";
    case RateMethod::duality_tilt: return "duality_tilt";
    case RateMethod::atom_formula: return "atom_formula";
    case RateMethod::infinite_by_support: return "infinite_by_support";
  }
  return "?";
}

double log_mgf(const Distribution& d, double lambda) { return mgf_eval(d, lambda).log_mgf; }

double log_mgf_derivative(const Distribution& d, double lambda) { return mgf_eval(d, lambda).tilted_mean; }

RateValue fenchel_dual(const Distribution& d, double x) {
  const double mu = d.mean();
  if (x == mu) return RateValue{0.0, 0.0, RateMethod::duality_tilt};

  const SupportInfo s = support(d);
  if (x < s.lower || x > s.upper) return RateValue{kInf, std::nullopt, RateMethod::infinite_by_support};
  if (x == s.lower && std::isfinite(s.lower)) {
    const double mass = s.mass_at_lower;
    if (mass > 0.0) return RateValue{-std::log(mass), std::nullopt, RateMethod::atom_formula};
    return RateValue{kInf, std::nullopt, RateMethod::atom_formula};
  }
  if (x == s.upper && std::isfinite(s.upper)) {
    const double mass = s.mass_at_upper;
    if (mass > 0.0) return RateValue{-std::log(mass), std::nullopt, RateMethod::atom_formula};
    return RateValue{kInf, std::nullopt, RateMethod::atom_formula};
  }

  const auto objective = [&](double l) { return l * x - mgf_eval(d, l).log_mgf; };
  const auto slope = [&](double l) { return x - mgf_eval(d, l).tilted_mean; };  // nonincreasing in l

  double lo = -1.0, hi = 1.0;
  while (slope(lo) <= 0.0 && lo > -kLambdaGuard) lo *= 2.0;
  while (slope(hi) >= 0.0 && hi < kLambdaGuard) hi *= 2.0;
  lo = std::max(lo, -kLambdaGuard);
  hi = std::min(hi, kLambdaGuard);
  if (slope(lo) <= 0.0) {
    // The supremum is approached as lambda -> -inf; the guard value is within
    // exp(-guard * residual-mass) of the limit.
    return RateValue{std::max(0.0, objective(lo)), std::nullopt, RateMethod::duality_tilt};
  }
  if (slope(hi) >= 0.0) {
    return RateValue{std::max(0.0, objective(hi)), std::nullopt, RateMethod::duality_tilt};
  }
  auto [lstar, value] = golden_max(objective, lo, hi);
  return RateValue{std::max(0.0, value), lstar, RateMethod::duality_tilt};
}

RateValue linf(const Distribution& d, double x, Side side, bool strict) {
  const SupportInfo s = support(d);
  if (side == Side::below) {
    if (strict && std::isfinite(s.lower) && x == s.lower)
      return RateValue{kInf, std::nullopt, RateMethod::infinite_by_support};
    if (x > d.mean()) return RateValue{0.0, 0.0, RateMethod::duality_tilt};
    return fenchel_dual(d, x);
  }
  if (strict && std::isfinite(s.upper) && x == s.upper)
    return RateValue{kInf, std::nullopt, RateMethod::infinite_by_support};
  if (x < d.mean()) return RateValue{0.0, 0.0, RateMethod::duality_tilt};
  return fenchel_dual(d, x);
}

Distribution tilt(const Distribution& d, double lambda) {
  if (!d.is_finite_support())
    throw std::invalid_argument("tilt: finite-support distributions only; exponential families tilt by mean shift");
  const auto& fs = d.finite_support();
  const auto& xs = fs.atoms();
  const auto& ws = fs.weights();
  std::vector<double> logw(xs.size());
  double zmax = -kInf;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    logw[i] = std::log(ws[i]) + lambda * xs[i];
    zmax = std::max(zmax, logw[i]);
  }
  double sum = 0.0;
  for (double& lw : logw) {
    lw = std::exp(lw - zmax);
    sum += lw;
  }
  std::vector<double> weights(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) weights[i] = logw[i] / sum;
  return Distribution::finite(xs, std::move(weights));
}

RateValue pair_rate(const Distribution& worse, const Distribution& better) {
  require_same_model(worse, better, "pair_rate");
  const double mu_w = worse.mean();
  const double mu_b = better.mean();
  if (!(mu_w < mu_b)) throw std::invalid_argument("pair_rate: requires E(worse) < E(better)");

  const SupportInfo sw = support(worse);
  const SupportInfo sb = support(better);
  // Outside [m(better), M(worse)] one of the two transforms is +inf.
  const double lo = std::max(mu_w, sb.lower);
  const double hi = std::min(mu_b, sw.upper);
  if (lo > hi) return RateValue{kInf, std::nullopt, RateMethod::infinite_by_support};

  const auto sum_at = [&](double x) { return fenchel_dual(worse, x).value + fenchel_dual(better, x).value; };

  if (lo == hi) {
    const double v = sum_at(lo);
    return RateValue{v, std::isfinite(v) ? std::optional<double>(lo) : std::nullopt,
                     std::isfinite(v) ? RateMethod::atom_formula : RateMethod::infinite_by_support};
  }

  const double inset = 1e-12 * (hi - lo);
  auto [xstar, value] = golden_min(sum_at, lo + inset, hi - inset);
  double best_x = xstar;
  double best_v = value;
  for (double xe : {lo, hi}) {
    const double v = sum_at(xe);
    if (v < best_v) {
      best_v = v;
      best_x = xe;
    }
  }
  if (!std::isfinite(best_v)) return RateValue{kInf, std::nullopt, RateMethod::infinite_by_support};
  return RateValue{best_v, best_x, RateMethod::duality_tilt};
}

RateValue chernoff_d(const Distribution& worse, const Distribution& better) {
  if (worse.is_finite_support() || better.is_finite_support())
    throw std::invalid_argument("chernoff_d: exponential-family distributions only");
  require_same_model(worse, better, "chernoff_d");
  const auto& w = worse.exp_family();
  const auto& b = better.exp_family();
  if (!(w.mean < b.mean)) throw std::invalid_argument("chernoff_d: requires E(worse) < E(better)");

  const auto diff = [&](double y) {
    return mean_divergence(w.family, w.sigma2, y, w.mean) - mean_divergence(b.family, b.sigma2, y, b.mean);
  };
  double lo = w.mean, hi = b.mean;
  for (int i = 0; i < 200 && (hi - lo) > 1e-15 * (b.mean - w.mean); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (diff(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double y = 0.5 * (lo + hi);
  const double v = 0.5 * (mean_divergence(w.family, w.sigma2, y, w.mean) +
                          mean_divergence(b.family, b.sigma2, y, b.mean));
  return RateValue{v, y, RateMethod::closed_form_d};
}

GapBounds gap_lower_bounds(const Distribution& worse, const Distribution& better) {
  if (!supported_on_unit_interval(worse) || !supported_on_unit_interval(better))
    throw std::invalid_argument("gap_lower_bounds: requires a [0,1]-supported model");
  require_same_model(worse, better, "gap_lower_bounds");
  const double gap = better.mean() - worse.mean();
  if (gap < 0.0) throw std::invalid_argument("gap_lower_bounds: requires E(worse) <= E(better)");
  return GapBounds{2.0 * gap * gap, gap * gap};
}

}  // namespace bai
