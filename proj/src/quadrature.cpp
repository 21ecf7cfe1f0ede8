#include "pslab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

// Golub-Welsch from the symmetric Jacobi matrix (zero diagonal here since both
// weight functions are even): nodes are eigenvalues, weights mu0 * v0^2.
QuadRule golub_welsch_even(const std::vector<double>& offdiag, double mu0) {
  const int n = int(offdiag.size()) + 1;
  RVec diag = RVec::Zero(n);
  RVec sub(n - 1);
  for (int i = 0; i < n - 1; ++i) sub(i) = offdiag[std::size_t(i)];
  Eigen::SelfAdjointEigenSolver<RMat> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("golub_welsch: tridiagonal eigensolve failed");
  QuadRule r;
  r.nodes.resize(std::size_t(n));
  r.weights.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    r.nodes[std::size_t(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[std::size_t(i)] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

QuadRule gauss_hermite_modified(int n) {
  // Nodes from the Jacobi matrix; weights from the Christoffel identity
  // w_i e^{x_i^2} = 1 / sum_{k<n} h_k(x_i)^2 with the stable Hermite-function
  // recurrence (Golub-Welsch eigenvector components drown in roundoff for the
  // outer nodes, which would poison the e^{x^2} rescaling).
  std::vector<double> off(std::size_t(n) - 1);
  for (int k = 1; k < n; ++k) off[std::size_t(k - 1)] = std::sqrt(double(k) / 2.0);
  QuadRule r = golub_welsch_even(off, std::sqrt(kPi));
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    auto h = hermite_function_values(n - 1, r.nodes[i]);
    double s = 0.0;
    for (double hv : h) s += hv * hv;
    r.weights[i] = 1.0 / s;
  }
  return r;
}

QuadRule gauss_hermite(int n) {
  QuadRule r = gauss_hermite_modified(n);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) r.weights[i] *= std::exp(-r.nodes[i] * r.nodes[i]);
  return r;
}

QuadRule gauss_legendre(int n) {
  std::vector<double> off(std::size_t(n) - 1);
  for (int k = 1; k < n; ++k) off[std::size_t(k - 1)] = double(k) / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch_even(off, 2.0);
}

QuadRule map_interval(const QuadRule& r, double a, double b) {
  QuadRule m = r;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    m.nodes[i] = mid + half * m.nodes[i];
    m.weights[i] *= half;
  }
  return m;
}

std::vector<double> hermite_function_values(int kmax, double x) {
  std::vector<double> h(std::size_t(kmax) + 1);
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (kmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 2; k <= kmax; ++k)
    h[std::size_t(k)] = x * std::sqrt(2.0 / double(k)) * h[std::size_t(k - 1)] -
                        std::sqrt(double(k - 1) / double(k)) * h[std::size_t(k - 2)];
  return h;
}

RMat hermite_function_matrix(int kmax, const std::vector<double>& nodes) {
  RMat phi(kmax + 1, int(nodes.size()));
  for (int i = 0; i < int(nodes.size()); ++i) {
    auto h = hermite_function_values(kmax, nodes[std::size_t(i)]);
    for (int k = 0; k <= kmax; ++k) phi(k, i) = h[std::size_t(k)];
  }
  return phi;
}

RMat ladder_annihilation(int n) {
  RMat a = RMat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

RMat ladder_creation(int n) {
  RMat c = RMat::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) c(k + 1, k) = std::sqrt(double(k + 1));
  return c;
}

RMat ladder_position(int n) {
  return (ladder_annihilation(n) + ladder_creation(n)) / std::sqrt(2.0);
}

RMat ladder_derivative(int n) {
  return (ladder_annihilation(n) - ladder_creation(n)) / std::sqrt(2.0);
}

}  // namespace pslab
