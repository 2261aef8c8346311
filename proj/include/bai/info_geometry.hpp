#pragma once

#include <optional>
#include <string>

#include "bai/distributions.hpp"

namespace bai {

enum class RateMethod { closed_form_d, duality_tilt, atom_formula, infinite_by_support };

const char* to_string(RateMethod m);

// A nonnegative large-deviation rate, possibly +inf. attained_at carries the
// interior optimizer when one exists: the tilt lambda for Legendre-transform
// values, the crossing/minimizing x for pairwise rates.
struct RateValue {
  double value = 0.0;
  std::optional<double> attained_at;
  RateMethod method = RateMethod::duality_tilt;

  bool is_infinite() const noexcept { return !std::isfinite(value); }
};

// Logarithmic moment-generating function phi_nu(lambda), overflow-safe.
double log_mgf(const Distribution& d, double lambda);

// Derivative of the log-MGF, i.e. the mean of the lambda-tilted distribution.
double log_mgf_derivative(const Distribution& d, double lambda);

// Fenchel-Legendre transform phi*_nu(x) = sup_lambda {lambda x - phi_nu(lambda)},
// computed by concave 1-D maximization (bracket doubling from [-1,1] with an
// overflow guard at |lambda| = 700, then golden section). Exact special cases:
// returns 0 at x = E(nu), -ln(mass) at a support end carrying an atom, and
// +inf strictly outside the support range.
RateValue fenchel_dual(const Distribution& d, double x);

enum class Side { below, above };

// Constrained-mean KL infimum. side=below with strict=false is
// inf{KL(zeta,nu) : E(zeta) <= x}, equal to the Fenchel dual for x <= E(nu)
// and 0 above the mean. The strict variant differs only at a support end
// carrying an atom, where it is +inf. side=above mirrors the upper end.
// Lower-bound evaluators use strict variants; the pairwise rate uses weak.
RateValue linf(const Distribution& d, double x, Side side, bool strict);

// Exponential reweighting of a finite-support distribution by e^{lambda x},
// renormalized in the log domain. The mean of the result is phi'_nu(lambda).
Distribution tilt(const Distribution& d, double lambda);

// Chernoff-type pairwise rate: inf over x in [E(worse), E(better)] of
// phi*_worse(x) + phi*_better(x), by golden-section on the convex sum with
// the endpoints compared explicitly. +inf when the supports are separated;
// a shared support-end atom leaves the single feasible point.
RateValue pair_rate(const Distribution& worse, const Distribution& better);

// Classical Chernoff information for an exponential-family pair: the common
// value d(y, mu') = d(y, mu) found by bisection on the monotone difference.
RateValue chernoff_d(const Distribution& worse, const Distribution& better);

// Gap-based floors valid on [0,1]-supported models: pinsker = 2*gap^2 bounds
// each one-sided rate from below, hoeffding_phi = gap^2 bounds the pairwise
// rate. Unbounded families are rejected.
struct GapBounds {
  double pinsker;
  double hoeffding_phi;
};
GapBounds gap_lower_bounds(const Distribution& worse, const Distribution& better);

}  // namespace bai
