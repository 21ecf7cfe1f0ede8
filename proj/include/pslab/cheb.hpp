#pragma once

#include <functional>
#include <vector>

#include "pslab/types.hpp"

namespace pslab {

// Chebyshev series with complex coefficients on a real interval [a, b]:
//   f(x) = sum_k c_k T_k(t),  t = (2x - (a+b)) / (b - a).
// Values live on the Chebyshev-Lobatto grid; transforms go through a DCT-I
// (FFT-backed when the grid size is a power of two).
class ChebSeries {
 public:
  ChebSeries() = default;
  ChebSeries(std::vector<cplx> coeffs, double a, double b);

  // Interpolate f at the n+1 Lobatto points of [a, b].
  static ChebSeries fit(const std::function<cplx(double)>& f, double a, double b, int n);

  // Double the grid until the coefficient tail drops below rel_tol * scale,
  // then trim. Throws ResolutionExceeded past max_n points.
  static ChebSeries fit_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                 double rel_tol = 1e-13, int max_n = (1 << 17));

  static std::vector<double> lobatto_points(int n, double a, double b);  // ascending, size n+1
  static std::vector<cplx> vals_to_coeffs(const std::vector<cplx>& v);   // v on ascending grid
  static std::vector<cplx> coeffs_to_vals(const std::vector<cplx>& c);
  static ChebSeries from_values(const std::vector<cplx>& vals, double a, double b);
  // Clenshaw-Curtis weights for the n+1 Lobatto points on [-1, 1].
  static std::vector<double> cc_weights(int n);

  cplx eval(double x) const;  // Clenshaw recurrence
  std::vector<cplx> values() const { return coeffs_to_vals(c_); }

  ChebSeries derivative() const;
  ChebSeries antiderivative() const;  // F with F(a) = 0
  cplx definite_integral() const;     // over [a, b]

  double l2_norm() const;   // sqrt(int |f|^2), exact for the interpolant
  double sup_norm() const;  // max |f| over a doubled sample grid

  ChebSeries conj() const;
  ChebSeries& trim(double rel_tol = 1e-14);

  int degree() const { return int(c_.size()) - 1; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<cplx>& coeffs() const { return c_; }

  ChebSeries operator+(const ChebSeries& o) const;
  ChebSeries operator-(const ChebSeries& o) const;
  ChebSeries& operator*=(cplx s);

 private:
  std::vector<cplx> c_;
  double a_ = -1.0, b_ = 1.0;
};

// L2 norm of f*g' style combinations are easiest through values; expose the
// quadrature helper used by ChebSeries::l2_norm.
double lobatto_l2_norm(const std::vector<cplx>& values, double a, double b);

}  // namespace pslab
