#include "bai/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAtomMergeTol = 1e-12;
constexpr double kWeightSumTol = 1e-12;

double xlogx_over(double x, double y) {
  // x * ln(x / y) with the 0 ln 0 = 0 convention.
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

FiniteSupport::FiniteSupport(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("finite-support distribution: atoms and weights must be nonempty and of equal length");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  double sum = 0.0;
  for (std::size_t i : order) {
    const double a = atoms[i];
    const double w = weights[i];
    if (!std::isfinite(a) || a < 0.0 || a > 1.0)
      throw std::invalid_argument("finite-support distribution: atoms must lie in [0,1]");
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("finite-support distribution: weights must be nonnegative");
    sum += w;
    if (w == 0.0) continue;
    if (!atoms_.empty() && a - atoms_.back() < kAtomMergeTol) {
      weights_.back() += w;
    } else {
      atoms_.push_back(a);
      weights_.push_back(w);
    }
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("finite-support distribution: weights must sum to 1 within 1e-12");
  if (atoms_.empty())
    throw std::invalid_argument("finite-support distribution: all weights are zero");

  for (double& w : weights_) w /= sum;
  cdf_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cdf_[i] = acc;
    mean_ += atoms_[i] * weights_[i];
  }
  cdf_.back() = 1.0;
}

Distribution Distribution::finite(std::vector<double> atoms, std::vector<double> weights) {
  return Distribution(FiniteSupport(std::move(atoms), std::move(weights)));
}

Distribution Distribution::bernoulli(double mean) {
  if (!(mean > 0.0 && mean < 1.0))
    throw std::invalid_argument("bernoulli distribution: mean must lie in (0,1)");
  return Distribution(ExpFamilyMember{Family::bernoulli, mean, 0.0});
}

Distribution Distribution::gaussian(double mean, double sigma2) {
  if (!std::isfinite(mean)) throw std::invalid_argument("gaussian distribution: mean must be finite");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw std::invalid_argument("gaussian distribution: sigma2 must be positive");
  return Distribution(ExpFamilyMember{Family::gaussian_fixed_variance, mean, sigma2});
}

Distribution Distribution::poisson(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson distribution: mean must be positive");
  return Distribution(ExpFamilyMember{Family::poisson, mean, 0.0});
}

double Distribution::mean() const noexcept {
  if (is_finite_support()) return finite_support().mean();
  return exp_family().mean;
}

std::string Distribution::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (is_finite_support()) {
    os << "finite(" << finite_support().atoms().size() << " atoms, mean " << mean() << ")";
    return os.str();
  }
  const auto& ef = exp_family();
  switch (ef.family) {
    case Family::bernoulli: os << "bernoulli(" << ef.mean << ")"; break;
    case Family::gaussian_fixed_variance: os << "gaussian(" << ef.mean << ", sigma2=" << ef.sigma2 << ")"; break;
    case Family::poisson: os << "poisson(" << ef.mean << ")"; break;
  }
  return os.str();
}

SupportInfo support(const Distribution& d) {
  if (d.is_finite_support()) {
    const auto& fs = d.finite_support();
    return SupportInfo{fs.atoms().front(), fs.atoms().back(), fs.weights().front(), fs.weights().back()};
  }
  const auto& ef = d.exp_family();
  switch (ef.family) {
    case Family::bernoulli:
      return SupportInfo{0.0, 1.0, 1.0 - ef.mean, ef.mean};
    case Family::gaussian_fixed_variance:
      return SupportInfo{-kInf, kInf, 0.0, 0.0};
    case Family::poisson:
      return SupportInfo{0.0, kInf, std::exp(-ef.mean), 0.0};
  }
  throw std::logic_error("unreachable");
}

bool same_model(const Distribution& p, const Distribution& q) {
  if (p.is_finite_support() != q.is_finite_support()) return false;
  if (p.is_finite_support()) return true;
  const auto& a = p.exp_family();
  const auto& b = q.exp_family();
  if (a.family != b.family) return false;
  if (a.family == Family::gaussian_fixed_variance && a.sigma2 != b.sigma2) return false;
  return true;
}

void require_same_model(const Distribution& p, const Distribution& q, const char* op) {
  if (!same_model(p, q)) {
    std::ostringstream os;
    os << op << ": distributions must belong to the same model, got " << p.describe() << " and " << q.describe();
    throw std::invalid_argument(os.str());
  }
}

double mean_divergence(Family family, double sigma2, double x, double mu) {
  switch (family) {
    case Family::bernoulli: {
      if (!(mu > 0.0 && mu < 1.0)) return kInf;
      if (x < 0.0 || x > 1.0) return kInf;
      return xlogx_over(x, mu) + xlogx_over(1.0 - x, 1.0 - mu);
    }
    case Family::gaussian_fixed_variance:
      return (x - mu) * (x - mu) / (2.0 * sigma2);
    case Family::poisson: {
      if (!(mu > 0.0)) return kInf;
      if (x < 0.0) return kInf;
      return xlogx_over(x, mu) - x + mu;
    }
  }
  throw std::logic_error("unreachable");
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  require_same_model(p, q, "kl_divergence");
  if (p.is_finite_support()) {
    const auto& a = p.finite_support();
    const auto& b = q.finite_support();
    double total = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.atoms().size(); ++i) {
      while (j < b.atoms().size() && b.atoms()[j] < a.atoms()[i]) ++j;
      if (j == b.atoms().size() || b.atoms()[j] != a.atoms()[i]) return kInf;
      total += a.weights()[i] * std::log(a.weights()[i] / b.weights()[j]);
    }
    return std::max(0.0, total);
  }
  const auto& a = p.exp_family();
  const auto& b = q.exp_family();
  return mean_divergence(a.family, a.sigma2, a.mean, b.mean);
}

namespace {

// Exact Poisson sampling: Knuth's product method, with large means split into
// independent chunks to keep the uniform products away from underflow.
std::uint64_t draw_poisson(double mean, RngStream& stream) {
  std::uint64_t total = 0;
  while (mean > 30.0) {
    total += draw_poisson(30.0, stream);
    mean -= 30.0;
  }
  const double threshold = std::exp(-mean);
  double prod = stream.uniform();
  std::uint64_t k = 0;
  while (prod > threshold) {
    ++k;
    prod *= stream.uniform();
  }
  return total + k;
}

}  // namespace

double draw_one(const Distribution& d, RngStream& stream) {
  if (d.is_finite_support()) {
    const auto& fs = d.finite_support();
    if (fs.atoms().size() == 1) return fs.atoms()[0];
    const double u = stream.uniform();
    const auto it = std::lower_bound(fs.cdf().begin(), fs.cdf().end(), u);
    const std::size_t idx = std::min<std::size_t>(it - fs.cdf().begin(), fs.atoms().size() - 1);
    return fs.atoms()[idx];
  }
  const auto& ef = d.exp_family();
  switch (ef.family) {
    case Family::bernoulli:
      return stream.uniform() <= ef.mean ? 1.0 : 0.0;
    case Family::gaussian_fixed_variance:
      return ef.mean + std::sqrt(ef.sigma2) * stream.gaussian();
    case Family::poisson:
      return static_cast<double>(draw_poisson(ef.mean, stream));
  }
  throw std::logic_error("unreachable");
}

std::vector<double> sample_batch(const Distribution& d, std::size_t n, RngStream& stream) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw_one(d, stream));
  return out;
}

BanditProblem analyze_problem(std::vector<Distribution> arms) {
  if (arms.size() < 2) throw std::invalid_argument("analyze_problem: need at least two arms");
  for (std::size_t i = 1; i < arms.size(); ++i) require_same_model(arms[0], arms[i], "analyze_problem");

  BanditProblem p;
  p.arms = std::move(arms);
  p.means.reserve(p.arms.size());
  for (const auto& a : p.arms) p.means.push_back(a.mean());

  p.best_arm = 0;
  p.worst_arm = 0;
  for (std::size_t a = 1; a < p.means.size(); ++a) {
    if (p.means[a] > p.means[p.best_arm]) p.best_arm = a;
    if (p.means[a] < p.means[p.worst_arm]) p.worst_arm = a;
  }
  p.gaps.reserve(p.means.size());
  for (double m : p.means) p.gaps.push_back(p.means[p.best_arm] - m);

  p.by_rank.resize(p.means.size());
  std::iota(p.by_rank.begin(), p.by_rank.end(), 0);
  std::sort(p.by_rank.begin(), p.by_rank.end(), [&](std::size_t a, std::size_t b) {
    if (p.means[a] != p.means[b]) return p.means[a] > p.means[b];
    return a < b;
  });

  p.generic = true;
  for (std::size_t r = 1; r < p.by_rank.size() && p.generic; ++r)
    if (p.means[p.by_rank[r]] == p.means[p.by_rank[r - 1]]) p.generic = false;
  return p;
}

std::string BanditProblem::digest() const {
  std::ostringstream os;
  os.precision(12);
  if (arms[0].is_finite_support()) {
    os << "finite";
  } else {
    switch (arms[0].exp_family().family) {
      case Family::bernoulli: os << "bernoulli"; break;
      case Family::gaussian_fixed_variance: os << "gaussian(sigma2=" << arms[0].exp_family().sigma2 << ")"; break;
      case Family::poisson: os << "poisson"; break;
    }
  }
  os << " K=" << arms.size() << " means=[";
  for (std::size_t a = 0; a < means.size(); ++a) os << (a ? "," : "") << means[a];
  os << "]";
  return os.str();
}

}  // namespace bai
