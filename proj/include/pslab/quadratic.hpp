#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pslab/types.hpp"

namespace pslab {

// q(x, xi) = alpha x^2 + 2 beta x xi + gamma xi^2 with complex coefficients;
// the Weyl quantization sends xi to -i d/dx and symmetrizes the cross term.
struct QuadraticSymbol {
  cplx alpha, beta, gamma;
  cplx eval(cplx x, cplx xi) const { return alpha * x * x + 2.0 * beta * x * xi + gamma * xi * xi; }
};

enum class Ellipticity { elliptic, degenerate_range, nonelliptic };
std::string to_string(Ellipticity e);

Ellipticity classify(const QuadraticSymbol& q);

struct FundamentalData {
  Eigen::Matrix2cd F;   // [[beta, gamma], [-alpha, -beta]]
  cplx lambda;          // eigenvalue with Im a_+ > 0 convention
  cplx a_plus, a_minus; // eigenvector slopes (1, a_pm), +-Im a_pm > 0
  double theta = 0.0;   // identified rotation angle in [0, pi/2)
  cplx scale;           // lambda multiplier of the identified rotated oscillator
};

FundamentalData fundamental(const QuadraticSymbol& q);

// First `count` eigenvalues -i lambda (2k+1).
std::vector<cplx> quadratic_spectrum(const QuadraticSymbol& q, int count);

// (theta, scale) with sin theta = |(a+ - conj(a-)) / (a+ - a-)|.
std::pair<double, cplx> identify_rotated(const QuadraticSymbol& q);

// Weyl symbol of omega a*a + alpha a^2 + beta a*^2 + omega:
// (omega - alpha - beta) x^2 + 2 i(alpha - beta) x xi + (omega + alpha + beta) xi^2.
QuadraticSymbol swanson_to_weyl(double omega, double alpha, double beta);

struct SwansonCheck {
  double max_rel_deviation = 0.0;    // || H(Uf) - U(Rf) || / || U(Rf) ||
  double max_unitarity_dev = 0.0;    // | ||Uf|| - ||f|| |
  std::vector<double> per_sample;
};

// Applies the gauge-removing unitary chain numerically (Fourier transforms by
// direct quadrature on a uniform grid) and compares against the reduced
// rotated-oscillator form.
SwansonCheck swanson_unitary_check(double omega, double alpha, double beta, int n_samples = 5,
                                   int grid_n = 4096, double half_width = 30.0);

nlohmann::json quadratic_report(const QuadraticSymbol& q);

}  // namespace pslab
