#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pslab/cheb.hpp"
#include "pslab/model.hpp"
#include "pslab/resolvent.hpp"
#include "pslab/types.hpp"

namespace pslab {

// Eikonal phase record on a working interval: phi' = sign * sqrt(z - V) with
// the branch continued from the center, phi(x0) = 0.
struct PhaseRecord {
  double x0 = 0.0;
  double a = 0.0, b = 0.0;
  cplx z;  // reduced target
  int sign = -1;
  ChebSeries phi;
  ChebSeries dphi;
  ChebSeries sqrt_dphi;  // branch-continuous sqrt(phi'), anchored at x0
  cplx ddphi_x0;         // phi''(x0) = -V'(x0) / (2 phi'(x0))
  double min_abs_dphi = 0.0;
  std::function<cplx(cplx)> V;
  std::function<cplx(cplx)> dV;
};

struct PhaseOptions {
  std::optional<int> force_sign;
  // permit Re(z - V) <= 0 away from the center, tracking the sqrt branch
  // continuously (the shifted-oscillator construction needs this)
  bool allow_continuation = false;
};

PhaseRecord phase_build(const std::function<cplx(cplx)>& V, const std::function<cplx(cplx)>& dV, cplx z,
                        double x0, double a, double b, const PhaseOptions& opts = {});

// a_0 = sqrt(phi'(x0))/sqrt(phi'(x)); a_{j+1} = phi'^{-1/2} int_{x0}^x i a_j'' / (2 sqrt(phi')).
// Each amplitude is substituted back into its transport equation; residual
// beyond 1e-8 * max|a_j| raises ResolutionExceeded.
std::vector<ChebSeries> transport_amplitudes(const PhaseRecord& phase, int J);

// floor(1 / (e C1 h)) with C1 = max(||a_0||_{B(R0)}, (2/R0) ||1/phi'||_{B(R0)}),
// sup norms on the disc of radius R0 around x0 via the analytic continuation.
int truncation_order(const PhaseRecord& phase, double h, double R0);

// Smooth bump: 1 on [p1, p2], 0 outside [s1, s2], exp(-1/t) mollifier ramps.
struct Cutoff {
  double p1 = 0.0, p2 = 0.0, s1 = 0.0, s2 = 0.0;
  double operator()(double x) const;
};

Cutoff cutoff_build(double p1, double p2, double s1, double s2);

struct Pseudomode {
  double h = 0.0;
  cplx z;          // reduced target the construction used
  cplx z_operator; // target in operator coordinates (z * prefactor)
  double x0 = 0.0;
  double interval_a = 0.0, interval_b = 0.0;
  int terms = 0;
  Cutoff cutoff;
  std::vector<ChebSeries> amplitudes;
  ChebSeries phi;
  ChebSeries u;      // sampled pseudomode on [s1, s2]
  ChebSeries image;  // (H_h - z) u on [s1, s2]
  double residual = 0.0;  // ||(H_h - z) u|| / ||u||, certified by quadrature
  int resolution = 0;     // Lobatto points used by the certification
  double min_abs_dphi = 0.0;
  cplx ddphi_x0;
};

// Assembles u = chi e^{i phi / h} sum h^j a_j, applies (H_h - z) by spectral
// differentiation, and certifies the residual ratio by Clenshaw-Curtis
// quadrature, refining until it stabilizes to three significant digits.
Pseudomode assemble_and_certify(const PhaseRecord& phase, const std::vector<ChebSeries>& amplitudes,
                                const Cutoff& cutoff, double h, double prefactor_abs = 1.0);

struct PseudomodeRequest {
  cplx z;          // operator coordinates (reduced internally via the prefactor)
  double h = 1.0;
  int terms = 0;   // number of series terms J+1; 0 = pick by truncation_order
  std::optional<Cutoff> cutoff;
  std::optional<double> x0;
  std::optional<std::pair<double, double>> interval;
  std::optional<int> sign;
  double half_width = 0.8;  // default interval x0 +- 0.8, clipped
};

// Builds the JWKB pseudomode for a Schroedinger-form model (airy, cubic,
// rotated_ho after factoring its prefactor) at target z.
Pseudomode build_pseudomode(const OperatorModel& model, const PseudomodeRequest& req);

// Shifted-oscillator variant in the rescaled variables:
//   H_h = -h^2 d^2/dy^2 + y^2 + 2 i h^{1/2} y - h  at target z (tilde coords).
Pseudomode shifted_rescaled_pseudomode(double h, cplx z, int terms,
                                       const std::optional<Cutoff>& cutoff = std::nullopt);

// Theorem normalization: h = 1/Re z, t = Im z / Re z, target 1 + it; valid for
// |Im z| <= 2 (1 - eps_margin) sqrt(Re z).
Pseudomode shifted_pseudomode(cplx z, double eps_margin, int terms);

enum class ScanLaw { inv_h, inv_sqrt_h };

struct ResidualScanRow {
  double h = 0.0;
  double residual = 0.0;
  int terms = 0;
};

struct ResidualScan {
  std::vector<ResidualScanRow> rows;
  bool has_fit = false;
  LinearFit fit;  // log(residual) against 1/h or 1/sqrt(h)
  ScanLaw law = ScanLaw::inv_h;
};

// Residual table across h. Targets are given in the reduced normal-form
// coordinates (z_of_h in tilde variables for shifted_ho). terms <= 0 picks the
// residual-minimizing truncation per h.
ResidualScan residual_scan(const OperatorModel& model, const std::function<cplx(double)>& z_of_h,
                           const std::vector<double>& h_list, int terms, ScanLaw law);

// Hermite-basis coefficients <h_k, u> of the pseudomode, k < N.
CVec project_to_hermite(const Pseudomode& pm, int N);

// -h^2 d^2/dx^2 + V for Schroedinger-form catalog models with polynomial V.
OperatorModel reduced_semiclassical_model(const OperatorModel& m, double h);
// The rescaled shifted oscillator as an assemblable model.
OperatorModel shifted_tilde_model(double h);

}  // namespace pslab
