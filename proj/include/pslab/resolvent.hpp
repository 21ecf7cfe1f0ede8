#pragma once

#include <optional>
#include <vector>

#include "pslab/discretize.hpp"
#include "pslab/types.hpp"

namespace pslab {

struct Region {
  double re_min, re_max, im_min, im_max;
};

struct PseudospectrumGrid {
  Region region{};
  int n_re = 0, n_im = 0;
  RMat values;  // n_im rows x n_re cols of log10 ||(H - z)^{-1}||, capped
  CVec eigenvalues;
  double ceiling_log10 = 16.0;

  double re_at(int j) const;
  double im_at(int i) const;
  double value_at(double re, double im) const;  // bilinear interpolation
};

struct GridOptions {
  int threads = 0;          // 0 = hardware concurrency
  double ceiling = 1e16;
  bool attach_eigenvalues = true;
};

// 1 / sigma_min(H - z), capped at `ceiling` when sigma_min underflows
// (sigma_min < 1e-16 * ||H||). Full dense SVD for N <= 600, LU-based inverse
// iteration on the Gram matrix above.
double resolvent_norm(const DiscretizedOperator& op, cplx z, double ceiling = 1e16);

PseudospectrumGrid pseudospectrum_grid(const DiscretizedOperator& op, const Region& region, int n_re,
                                       int n_im, const GridOptions& opts = {});

// Reusable sigma_min engine for sweeps (tridiagonal solves for grid bases,
// Schur-triangular inverse iteration otherwise). Warm vector persists across
// calls when provided.
class SigmaMinSweeper {
 public:
  explicit SigmaMinSweeper(const DiscretizedOperator& op);
  ~SigmaMinSweeper();
  SigmaMinSweeper(SigmaMinSweeper&&) noexcept;
  double sigma_min(cplx z, CVec* warm = nullptr) const;
  CVec eigenvalues() const;  // by-product of the Schur path; dense solve otherwise
  double norm_scale() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Polyline {
  std::vector<cplx> points;
  bool closed = false;
};

// Marching squares at the levels -log10(eps); linear interpolation on edges.
std::vector<Polyline> contour_extract(const PseudospectrumGrid& grid, double eps_level);
std::vector<std::vector<Polyline>> contour_extract(const PseudospectrumGrid& grid,
                                                   const std::vector<double>& eps_levels);

struct NumericalRange {
  std::vector<double> angles;
  std::vector<double> support;  // max Re(e^{-i phi} <psi, H psi>)
  std::vector<cplx> points;     // boundary support points (convex)
  // Lower bound for dist(z, Num(H)); 0 when z lies inside all half-planes.
  double distance_outside(cplx z) const;
};

NumericalRange numerical_range_boundary(const DiscretizedOperator& op, int n_angles = 256);

struct EigenSystem {
  CVec values;   // sorted by real part
  CMat right;    // columns psi_k
  CMat left;     // columns phi_k with A^H phi_k = conj(lambda_k) phi_k
  RVec pairing;  // |<phi_k, psi_k>| / (||phi_k|| ||psi_k||)
  RVec match_residual;              // |conj(mu_left) - lambda_right| per pair
  std::vector<int> near_defective;  // pairing below 1e-10
  double spectral_range() const;
};

EigenSystem eigen_system(const DiscretizedOperator& op);
CVec eigenvalues_only(const DiscretizedOperator& op);

struct GrowthFit {
  double exponent = 0.0;
  double r_squared = 0.0;
  double stderr_slope = 0.0;
};

// Least-squares slope of log(crossing) against log log(1/eps).
GrowthFit growth_exponent_fit(const std::vector<double>& eps_levels, const std::vector<double>& crossings);

struct LinearFit {
  double intercept = 0.0, slope = 0.0, r_squared = 0.0, stderr_slope = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Largest real-axis crossing of log10||R|| = -log10(eps) from samples along
// the positive real axis (for the growth-exponent experiments).
std::vector<double> real_axis_crossings(const DiscretizedOperator& op, const std::vector<double>& eps_levels,
                                        double re_min, double re_max, int n_samples);

}  // namespace pslab
