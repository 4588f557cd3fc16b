#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qac/lattice.hpp"

namespace qac {

// Exact small-instance Gibbs expectations for a DiscreteAction under the
// Gauss-Hermite tensor product measure. Two independent evaluation paths:
//
//  * a slice-transfer contraction, algebraically identical to the full
//    tensor sum but reordered so that small boxes stay cheap at any P
//    (per-slice state space q^{|box|});
//  * a literal tensor enumeration over all q^{|box| P} node tuples with a
//    different loop order, used for arbitrary observables and as the
//    cross-check oracle.
//
// Partition values are normalized against the free measure (V = 0, J = 0,
// xi = 0 gives exactly 1).

struct OracleLimits {
  // per-slice transfer states and total matmul work
  int max_states = 2048;
  double max_transfer_work = 6e9;
  // naive tensor terms q^{|box| P}
  double max_naive_terms = 4.2e7;
};

// Z(xi) relative to the free measure.
double exact_partition(const DiscreteAction& action, const QuadratureScheme& quad,
                       const OracleLimits& limits = {});

// Product-moment factor x_{site,slice}^power.
struct MomentFactor {
  int site = 0;
  int slice = 0;
  int power = 1;
};

// < prod_k x_{site_k, slice_k}^{power_k} > under the normalized kernel.
double exact_moment(const DiscreteAction& action, const QuadratureScheme& quad,
                    std::span<const MomentFactor> factors, const OracleLimits& limits = {});

// Moments of S = eps sum_{l,t} x_{l,t} up to k_max: returns <S^k>, k = 0..k_max.
std::vector<double> exact_smoments(const DiscreteAction& action, const QuadratureScheme& quad,
                                   int k_max, const OracleLimits& limits = {});

// Normalized expectation of an arbitrary observable of the slice variables,
// layout x[site * P + slice]; evaluated by the naive tensor enumeration.
double exact_expectation(const DiscreteAction& action,
                         const std::function<double(std::span<const double>)>& observable,
                         const QuadratureScheme& quad, const OracleLimits& limits = {});

// Naive-path partition value (independent loop order); test oracle.
double exact_partition_naive(const DiscreteAction& action, const QuadratureScheme& quad,
                             const OracleLimits& limits = {});

// Connected pair correlation K_{ll'}(t,t') via the transfer path.
double exact_pair_correlation(const DiscreteAction& action, const QuadratureScheme& quad,
                              int site1, int slice1, int site2, int slice2,
                              const OracleLimits& limits = {});

// Ursell function U_{l1 l2 l3 l4}(t1,..,t4) from 4-point and 2-point moments.
double exact_ursell(const DiscreteAction& action, const QuadratureScheme& quad,
                    std::span<const MomentFactor> legs, const OracleLimits& limits = {});

}  // namespace qac
