#ifndef HIPPA_CATALOGUE_HPP
#define HIPPA_CATALOGUE_HPP

#include "hippa/functions.hpp"

namespace hippa {

/// Build a problem from a string id:
///   norm_power:q=<r>,dim=<n>[,r=<radius>]
///   affine:q=<r>,A=<file>,b=<file>[,r=<radius>]
///   quotient:q=<r>,dim=<n>,den=<c>[,M=<r>][,case=<affine|nonneg_concave|nonpos_convex>]
///   counterexample:<sum_shifted|lq_sum|lq_norm>[,q=<r>]
///   cubic            (1-D x^3, for the stationarity checker)
ObjectiveFunction parse_problem(const std::string& id);

/// Build a feasible set from a string spec:
///   whole
///   ball:c=<file|0>,r=<real>
///   box:l=<file>,u=<file>
///   halfspace:a=<file>,beta=<real>
ConvexSet parse_set(const std::string& spec, Eigen::Index dim);

/// Starting points: ones | zeros | minimizer | rand:<radius> | <csv file>.
Vector parse_x0(const std::string& spec, const ObjectiveFunction& f, std::uint64_t seed);

}  // namespace hippa

#endif  // HIPPA_CATALOGUE_HPP
