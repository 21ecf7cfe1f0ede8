#include "pslab/projections.hpp"

#include <cmath>

#include "pslab/errors.hpp"

namespace pslab {

double legendre_log(int k, double x) {
  if (x < 1.0) throw DomainError("legendre_log: x >= 1 required");
  if (k < 0) throw DomainError("legendre_log: k >= 0");
  if (k == 0) return 0.0;
  // (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}; P_j(x) >= 1 for x >= 1
  double pm = 1.0, pc = x;
  double log_scale = 0.0;
  const double big = 1e100;
  for (int j = 1; j < k; ++j) {
    double pn = ((2.0 * j + 1.0) * x * pc - double(j) * pm) / double(j + 1);
    pm = pc;
    pc = pn;
    if (pc > big) {
      pm /= big;
      pc /= big;
      log_scale += std::log(big);
    }
  }
  return std::log(pc) + log_scale;
}

double rotated_norm_exact(double theta, int k) {
  if (!(std::abs(theta) < kPi / 2.0)) throw DomainError("rotated_norm_exact: |theta| < pi/2");
  const double ct = std::cos(theta);
  return -0.5 * std::log(ct) + legendre_log(k, 1.0 / ct);
}

double rotated_norm_asymptotic(double theta, int k) {
  if (theta == 0.0) throw DomainError("rotated_norm_asymptotic: theta != 0 required");
  if (k < 1) throw DomainError("rotated_norm_asymptotic: k >= 1");
  const double s = std::abs(std::sin(theta));
  return -0.5 * std::log(2.0 * kPi * double(k) * s) +
         (double(k) + 0.5) * std::log((1.0 + s) / std::cos(theta));
}

double rate_limit(double theta) {
  if (!(std::abs(theta) < kPi / 2.0)) throw DomainError("rate_limit: |theta| < pi/2");
  const double s = std::abs(std::sin(theta));
  return 0.5 * std::log((1.0 + s) / (1.0 - s));
}

ProjectionSeries exact_rotated_series(double theta, int k_max) {
  ProjectionSeries ps;
  ps.source = "exact_rotated(" + std::to_string(theta) + ")";
  const double ct = std::cos(theta);
  const double x = 1.0 / ct;
  // one recurrence pass for the whole range
  double pm = 1.0, pc = x, log_scale = 0.0;
  const double big = 1e100;
  ps.entries.emplace_back(0, -0.5 * std::log(ct));
  if (k_max >= 1) ps.entries.emplace_back(1, -0.5 * std::log(ct) + std::log(pc) + log_scale);
  for (int j = 1; j < k_max; ++j) {
    double pn = ((2.0 * j + 1.0) * x * pc - double(j) * pm) / double(j + 1);
    pm = pc;
    pc = pn;
    if (pc > big) {
      pm /= big;
      pc /= big;
      log_scale += std::log(big);
    }
    ps.entries.emplace_back(j + 1, -0.5 * std::log(ct) + std::log(pc) + log_scale);
  }
  return ps;
}

ProjectionSeries numeric_projection_norms(const DiscretizedOperator& op, int k_max) {
  if (k_max > op.N / 4)
    throw Error("numeric_projection_norms: k_max exceeds the truncation trust region N/4");
  EigenSystem es = eigen_system(op);
  const double match_tol = 1e-6 * es.spectral_range();
  for (int k = 0; k <= k_max; ++k) {
    if (es.match_residual(k) > match_tol)
      throw AmbiguousPairing("numeric_projection_norms: left/right eigenvalue mismatch at k = " +
                             std::to_string(k));
    if (es.pairing(k) < 1e-10)
      throw DefectivePair("numeric_projection_norms: biorthogonal pairing defect at k = " + std::to_string(k));
  }
  ProjectionSeries ps;
  ps.source = "numeric(N=" + std::to_string(op.N) + ")";
  for (int k = 0; k <= k_max; ++k) {
    const double nrm =
        es.right.col(k).norm() * es.left.col(k).norm() / std::abs(es.left.col(k).dot(es.right.col(k)));
    ps.entries.emplace_back(k, std::log(nrm));
  }
  return ps;
}

RateFit rate_fit(const ProjectionSeries& series, RateLaw law) {
  if (series.entries.size() < 6) throw InsufficientData("rate_fit: need >= 6 entries");
  std::vector<double> x, y;
  for (const auto& [k, ln] : series.entries) {
    x.push_back(law == RateLaw::linear_in_k ? double(k) : std::sqrt(double(k)));
    y.push_back(ln);
  }
  LinearFit f = linear_fit(x, y);
  return RateFit{f.slope, f.r_squared, f.stderr_slope};
}

double partial_sum_projection_norm(const EigenSystem& es, int K) {
  const int n = int(es.right.rows());
  CMat S = CMat::Zero(n, n);
  for (int k = 0; k <= K; ++k) {
    const cplx denom = es.left.col(k).dot(es.right.col(k));
    S += (es.right.col(k) * es.left.col(k).adjoint()) / denom;
  }
  // power iteration on S^H S
  CVec v = CVec::Constant(n, cplx(1.0 / std::sqrt(double(n)), 0.0));
  double sig = 0.0;
  for (int it = 0; it < 200; ++it) {
    CVec w = S * v;
    CVec u = S.adjoint() * w;
    const double nu = u.norm();
    if (nu == 0.0) return 0.0;
    const double sig_new = std::sqrt(w.squaredNorm() / 1.0);
    v = u / nu;
    if (it > 2 && std::abs(sig_new - sig) < 1e-10 * sig_new) {
      sig = sig_new;
      break;
    }
    sig = sig_new;
  }
  return sig;
}

}  // namespace pslab
