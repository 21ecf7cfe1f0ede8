#pragma once

#include <cstdint>
#include <vector>

#include "pslab/discretize.hpp"
#include "pslab/pseudomode.hpp"
#include "pslab/resolvent.hpp"
#include "pslab/types.hpp"

namespace pslab {

struct PerturbationExperiment {
  double epsilon = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<cplx> cloud;          // all perturbed eigenvalues
  std::vector<double> norms;        // realized ||V|| per sample (all < epsilon)
};

// Complex Ginibre draws rescaled to norm 0.99 * epsilon; eigenvalues of
// base + V accumulate into the cloud. Deterministic in (seed, samples).
PerturbationExperiment random_cloud(const DiscretizedOperator& base, double epsilon, int samples,
                                    std::uint64_t seed, int threads = 0);

struct RankOneResult {
  CMat V;                 // rank-one perturbation
  double norm_V = 0.0;    // = ||(A - z) psi|| / ||psi||
  double planted_eig_error = 0.0;  // min |lambda - z| over eig(A + V), relative
  CVec psi;               // pseudomode coefficients in the base's basis
};

// V = -((A - z) psi) <psi, .> / ||psi||^2 makes z an exact eigenvalue of A + V.
RankOneResult rank_one_from_pseudomode(const DiscretizedOperator& base, cplx z, const CVec& psi,
                                       double eps_requested);

struct JordanSweepRow {
  double epsilon = 0.0;
  std::vector<cplx> lowest;      // lowest six eigenvalues by real part
  double pairing_defect = 0.0;   // min biorthogonal pairing among the lowest pair
};

struct JordanSweepReport {
  std::vector<JordanSweepRow> rows;
  bool collision_found = false;
  double eps_lo = 0.0, eps_hi = 0.0;  // bracket for the real -> complex transition
  double defect_min_eps = 0.0;        // sweep location of the minimal pairing defect
};

// Perturbed-oscillator sweep: H(eps) = HO + i eps S with S the singular
// dipole-pair potential; brackets the lowest-pair collision.
JordanSweepReport jordan_sweep(const std::vector<double>& epsilon_list, int N);

struct SemigroupResult {
  std::vector<double> t;
  std::vector<double> norm;       // ||e^{-t H}||
  bool accretive = true;          // numerical range in the right half-plane
};

SemigroupResult semigroup_norm(const DiscretizedOperator& base, const std::vector<double>& t_list);

struct AiryDiagnostics {
  std::vector<cplx> eig_shift;        // matched eigenvalue differences under window shift
  double max_shift_deviation = 0.0;   // max |shift - i c| over matched pairs
  double min_shift_modulus = 0.0;
  std::vector<double> resolvent_ratio;  // |R(z)| / |R(z + 3i)| per probe
  GrowthFit exponent_fit;
  std::vector<double> crossings;
  std::vector<double> eps_levels;
};

AiryDiagnostics airy_diagnostics(int N, double window_half, double shift_c,
                                 const std::vector<double>& probes);

}  // namespace pslab
