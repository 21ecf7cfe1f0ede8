#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "pslab/model.hpp"
#include "pslab/types.hpp"

namespace pslab {

enum class BasisType { hermite, grid };

struct DiscretizedOperator {
  CMat matrix;
  BasisType basis = BasisType::hermite;
  int N = 0;
  double a = 0.0, b = 0.0;  // grid window (grid basis only)
  std::shared_ptr<const OperatorModel> model;
  // quadrature usable for L^2 inner products of represented functions
  std::vector<double> qnodes;
  std::vector<double> qweights;

  bool is_tridiagonal() const;
  double norm_estimate() const;  // max row sum

  void export_matrix(std::ostream& os) const;             // array complex general
  static CMat import_matrix(std::istream& is);
  nlohmann::json quadrature_json() const;
};

// Exact ladder-algebra assembly in the first N Hermite modes. Requires all
// coefficients polynomial in x; throws UnsupportedCoefficients otherwise.
DiscretizedOperator hermite_assemble(const OperatorModel& m, int N);

// Second-order centered finite differences on N interior nodes of (a, b) with
// Dirichlet ends.
DiscretizedOperator grid_assemble(const OperatorModel& m, double a, double b, int N);

// <h_m, V h_n> for m, n < N by Gauss-Hermite quadrature away from singular
// points plus u^2 = |x - c| windows of half-width 0.5 around each singular
// point. Absolute entry error <= 1e-9 for N <= 60.
CMat potential_matrix_elements(const std::function<cplx(double)>& V, int N,
                               const std::vector<double>& singular_points = {});

struct ConvergenceQuantity {
  enum class Kind { eigenvalue, resolvent_norm } kind = Kind::eigenvalue;
  int eigen_index = 0;  // k-th by real part
  cplx z;               // resolvent probe
};

struct ConvergenceReport {
  std::vector<int> Ns;
  std::vector<cplx> values;
  std::vector<double> diffs;  // successive |value_{i+1} - value_i|
  bool converged = false;
};

ConvergenceReport convergence_check(const OperatorModel& m, const ConvergenceQuantity& q,
                                    const std::vector<int>& N_sequence, double tol = 1e-10);

// Default assembly per the selection rule: polynomial coefficients -> Hermite
// with N = 400; otherwise grid with N = 1500 on (-40, 40) or (0, L).
DiscretizedOperator assemble_default(const OperatorModel& m);

}  // namespace pslab
