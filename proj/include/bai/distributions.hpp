#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "bai/rng.hpp"

namespace bai {

enum class Family { bernoulli, gaussian_fixed_variance, poisson };

// Nonparametric reward distribution with finitely many support points in [0,1].
// Construction canonicalizes the input: atoms are sorted, atoms closer than
// 1e-12 are merged (weights summed), zero-weight atoms are dropped, and the
// weights are renormalized. Atom comparisons elsewhere rely on this canonical
// form and use exact equality.
class FiniteSupport {
 public:
  FiniteSupport(std::vector<double> atoms, std::vector<double> weights);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& cdf() const noexcept { return cdf_; }
  double mean() const noexcept { return mean_; }

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

// Member of a canonical one-parameter exponential family, mean-parameterized.
// sigma2 is meaningful for the fixed-variance Gaussian family only.
struct ExpFamilyMember {
  Family family;
  double mean;
  double sigma2;
};

class Distribution {
 public:
  static Distribution finite(std::vector<double> atoms, std::vector<double> weights);
  static Distribution bernoulli(double mean);
  static Distribution gaussian(double mean, double sigma2);
  static Distribution poisson(double mean);

  bool is_finite_support() const noexcept { return std::holds_alternative<FiniteSupport>(v_); }
  const FiniteSupport& finite_support() const { return std::get<FiniteSupport>(v_); }
  const ExpFamilyMember& exp_family() const { return std::get<ExpFamilyMember>(v_); }

  double mean() const noexcept;
  std::string describe() const;

 private:
  explicit Distribution(FiniteSupport fs) : v_(std::move(fs)) {}
  explicit Distribution(ExpFamilyMember ef) : v_(ef) {}
  std::variant<FiniteSupport, ExpFamilyMember> v_;
};

// Support ends and the probability mass sitting exactly on them.
// lower/upper may be -inf/+inf for unbounded families.
struct SupportInfo {
  double lower;
  double upper;
  double mass_at_lower;
  double mass_at_upper;
};

SupportInfo support(const Distribution& d);

// True when both distributions live in the same model: both finite-support,
// or both in the same exponential family (with equal sigma2 for Gaussians).
bool same_model(const Distribution& p, const Distribution& q);
void require_same_model(const Distribution& p, const Distribution& q, const char* op);

// KL(p, q). Finite-support pairs compare atoms by exact equality (inputs are
// canonical); an atom of p absent from q yields +inf. Exponential families use
// the mean-parameterized closed forms. Mismatched models throw.
double kl_divergence(const Distribution& p, const Distribution& q);

// Mean-parameterized divergence d(x, mu) of an exponential family, extended
// continuously to the closure of the mean interval and by +inf outside it.
double mean_divergence(Family family, double sigma2, double x, double mu);

double draw_one(const Distribution& d, RngStream& stream);
std::vector<double> sample_batch(const Distribution& d, std::size_t n, RngStream& stream);

struct BanditProblem {
  std::vector<Distribution> arms;
  std::vector<double> means;
  std::vector<double> gaps;           // mu* - mu_a, zero at the best arm
  std::size_t best_arm = 0;           // ties broken by lowest index
  std::size_t worst_arm = 0;          // ties broken by lowest index
  std::vector<std::size_t> by_rank;   // by_rank[0] = best arm, descending means
  bool generic = false;               // all means pairwise distinct (exact)

  std::size_t size() const noexcept { return arms.size(); }
  const Distribution& best() const { return arms[best_arm]; }
  double best_mean() const { return means[best_arm]; }
  // rank is 1-based: rank_arm(1) == best_arm.
  std::size_t rank_arm(std::size_t rank) const { return by_rank[rank - 1]; }
  double rank_mean(std::size_t rank) const { return means[by_rank[rank - 1]]; }
  std::string digest() const;
};

BanditProblem analyze_problem(std::vector<Distribution> arms);

}  // namespace bai
