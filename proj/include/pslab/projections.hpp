#pragma once

#include <string>
#include <vector>

#include "pslab/resolvent.hpp"
#include "pslab/types.hpp"

namespace pslab {

struct ProjectionSeries {
  std::string source;                            // "exact_rotated(theta)", "asymptotic_rotated(theta)", "numeric(...)"
  std::vector<std::pair<int, double>> entries;   // (k, log ||P_k||)
};

// log P_k(x) for x >= 1 through the scaled three-term recurrence; stable up to
// k ~ 1e5 via periodic renormalization.
double legendre_log(int k, double x);

// log ||P_k|| = -1/2 log cos(theta) + log P_k(1/cos theta) for the rotated
// oscillator eigenprojections.
double rotated_norm_exact(double theta, int k);

// Laplace-Heine leading term in log form:
// log [ (2 pi k |sin theta|)^{-1/2} ((1+|sin theta|)/cos theta)^{k+1/2} ].
double rotated_norm_asymptotic(double theta, int k);

// lim_k (log ||P_k||) / k = (1/2) log((1+|sin theta|)/(1-|sin theta|)).
double rate_limit(double theta);

ProjectionSeries exact_rotated_series(double theta, int k_max);

// ||P_k|| = ||psi_k|| ||phi_k|| / |<phi_k, psi_k>| from the biorthogonal
// eigensystem, eigenvalues sorted by real part. Requires k_max <= N/4.
ProjectionSeries numeric_projection_norms(const DiscretizedOperator& op, int k_max);

enum class RateLaw { linear_in_k, linear_in_sqrt_k };

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  double stderr_slope = 0.0;
};

RateFit rate_fit(const ProjectionSeries& series, RateLaw law);

// Operator norm of sum_{k<=K} P_k assembled from the eigensystem.
double partial_sum_projection_norm(const EigenSystem& es, int K);

}  // namespace pslab
