#pragma once

#include <vector>

#include "pslab/types.hpp"

namespace pslab {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for integrals of the form int e^{-x^2} f(x) dx.
QuadRule gauss_hermite(int n);

// Same nodes with weights w_i * e^{x_i^2}, i.e. directly usable on integrands
// that already carry Gaussian decay (finite in double up to n ~ 300).
QuadRule gauss_hermite_modified(int n);

// Gauss-Legendre rule on [-1, 1] (use map_interval to move it).
QuadRule gauss_legendre(int n);
QuadRule map_interval(const QuadRule& r, double a, double b);

// Normalized Hermite functions h_0..h_kmax at x (orthonormal in L^2(R)).
std::vector<double> hermite_function_values(int kmax, double x);

// (kmax+1) x nodes.size() matrix with Phi(k, i) = h_k(nodes[i]).
RMat hermite_function_matrix(int kmax, const std::vector<double>& nodes);

// Exact ladder-algebra matrices in the Hermite-function basis, size n x n:
// position x = (a + a*)/sqrt(2) and d/dx = (a - a*)/sqrt(2).
RMat ladder_position(int n);
RMat ladder_derivative(int n);
RMat ladder_annihilation(int n);
RMat ladder_creation(int n);

}  // namespace pslab
