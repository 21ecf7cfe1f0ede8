#include "pslab/pseudomode.hpp"

#include <algorithm>
#include <cmath>

#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"
#include "pslab/quadrature.hpp"

namespace pslab {

namespace {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// sqrt with the branch continued along a sequence of values, anchored at the
// principal branch at index j0.
std::vector<cplx> sqrt_continuous(const std::vector<cplx>& w, std::size_t j0) {
  std::vector<cplx> out(w.size());
  out[j0] = std::sqrt(w[j0]);
  for (std::size_t j = j0 + 1; j < w.size(); ++j) {
    cplx r = std::sqrt(w[j]);
    if (std::abs(r - out[j - 1]) > std::abs(-r - out[j - 1])) r = -r;
    out[j] = r;
  }
  for (std::size_t j = j0; j-- > 0;) {
    cplx r = std::sqrt(w[j]);
    if (std::abs(r - out[j + 1]) > std::abs(-r - out[j + 1])) r = -r;
    out[j] = r;
  }
  return out;
}

// Trimming at the analytic-decay level keeps the recursion's degrees near the
// functions' true resolution; spectral-differentiation noise scales like
// (degree)^2 per derivative, so runaway degrees poison later amplitudes.
constexpr double kSeriesTrim = 1e-13;

ChebSeries multiply(const ChebSeries& A, const ChebSeries& B) {
  const int n = next_pow2(A.degree() + B.degree() + 8);
  auto x = ChebSeries::lobatto_points(n, A.a(), A.b());
  std::vector<cplx> v(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) v[j] = A.eval(x[j]) * B.eval(x[j]);
  ChebSeries out = ChebSeries::from_values(v, A.a(), A.b());
  out.trim(kSeriesTrim);
  return out;
}

}  // namespace

PhaseRecord phase_build(const std::function<cplx(cplx)>& V, const std::function<cplx(cplx)>& dV, cplx z,
                        double x0, double a, double b, const PhaseOptions& opts) {
  if (!(a < x0 && x0 < b)) throw Error("phase_build: x0 must lie inside the interval");
  const cplx w0 = z - V(cplx(x0, 0.0));
  if (std::abs(w0.imag()) > 1e-10)
    throw CenterMismatch("phase_build: Im(z - V(x0)) = " + std::to_string(w0.imag()) +
                         " exceeds the 1e-10 tolerance");
  if (!(w0.real() > 0.0)) throw BranchFailure("phase_build: z - V(x0) must be a positive real number");

  int sign;
  if (opts.force_sign) {
    sign = *opts.force_sign >= 0 ? 1 : -1;
  } else {
    const double imdv = std::imag(dV(cplx(x0, 0.0)));
    sign = imdv > 0.0 ? -1 : (imdv < 0.0 ? 1 : -1);
  }

  // resolve phi' on a grid fine enough for spectral accuracy of sqrt(z - V)
  const double scale0 = std::abs(w0);
  ChebSeries dphi, sqrt_dphi;
  int n = 64;
  const int max_n = 1 << 14;
  double prev_min = 0.0;
  while (true) {
    auto x = ChebSeries::lobatto_points(n, a, b);
    std::vector<cplx> wv(x.size());
    double min_re = std::numeric_limits<double>::infinity();
    std::size_t j0 = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      wv[j] = z - V(cplx(x[j], 0.0));
      min_re = std::min(min_re, wv[j].real());
      if (std::abs(x[j] - x0) < std::abs(x[j0] - x0)) j0 = j;
    }
    if (!opts.allow_continuation && !(min_re > 0.0))
      throw BranchFailure("phase_build: Re(z - V) <= 0 on the interval (at min " + std::to_string(min_re) +
                          "); shrink the interval or use the continuation variant");
    auto root = sqrt_continuous(wv, j0);
    std::vector<cplx> dv(root.size());
    double min_abs = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < root.size(); ++j) {
      dv[j] = double(sign) * root[j];
      min_abs = std::min(min_abs, std::abs(dv[j]));
    }
    if (min_abs < 1e-8 * std::sqrt(scale0))
      throw BranchFailure("phase_build: phi' vanishes on the interval (|phi'|_min = " +
                          std::to_string(min_abs) + ")");
    dphi = ChebSeries::from_values(dv, a, b);
    sqrt_dphi = ChebSeries::from_values(sqrt_continuous(dv, j0), a, b);
    prev_min = min_abs;
    // converged when the coefficient tail is negligible
    double tail = 0.0, top = 0.0;
    for (int k = 0; k <= dphi.degree(); ++k) {
      const double m = std::abs(dphi.coeffs()[std::size_t(k)]);
      top = std::max(top, m);
      if (k >= dphi.degree() - dphi.degree() / 8) tail = std::max(tail, m);
    }
    if (tail <= 1e-13 * top || n >= max_n) break;
    n *= 2;
  }
  if (n > max_n) throw ResolutionExceeded("phase_build: phase did not resolve");

  PhaseRecord pr;
  pr.x0 = x0;
  pr.a = a;
  pr.b = b;
  pr.z = z;
  pr.sign = sign;
  pr.dphi = dphi;
  pr.sqrt_dphi = sqrt_dphi;
  pr.min_abs_dphi = prev_min;
  pr.V = V;
  pr.dV = dV;
  ChebSeries anti = dphi.antiderivative();
  const cplx at_x0 = anti.eval(x0);
  std::vector<cplx> coeffs = anti.coeffs();
  coeffs[0] -= at_x0;
  pr.phi = ChebSeries(std::move(coeffs), a, b);
  pr.ddphi_x0 = -dV(cplx(x0, 0.0)) / (2.0 * dphi.eval(x0));

  // eikonal residual check: phi'^2 + V - z = 0
  {
    auto x = ChebSeries::lobatto_points(std::max(128, 2 * dphi.degree()), a, b);
    double worst = 0.0;
    for (double xx : x) {
      const cplx d = pr.dphi.eval(xx);
      worst = std::max(worst, std::abs(d * d + V(cplx(xx, 0.0)) - z));
    }
    if (worst > 1e-10 * std::max(1.0, std::abs(z)))
      throw ResolutionExceeded("phase_build: eikonal residual " + std::to_string(worst));
  }

  // decay: Im phi''(x0) > 0, or (boundary case) Im phi strictly positive away
  // from the center
  const double d2 = pr.ddphi_x0.imag();
  if (d2 < -1e-10) throw DecayViolated("phase_build: Im phi''(x0) < 0; wrong transport branch");
  if (d2 <= 1e-10) {
    const double off = 0.2 * std::min(x0 - a, b - x0);
    double worst = std::numeric_limits<double>::infinity();
    for (double xx : ChebSeries::lobatto_points(256, a, b)) {
      if (std::abs(xx - x0) < off) continue;
      worst = std::min(worst, pr.phi.eval(xx).imag());
    }
    if (!(worst > 0.0))
      throw DecayViolated("phase_build: Im phi'' vanishes at x0 and Im phi is not positive off-center");
  }
  return pr;
}

std::vector<ChebSeries> transport_amplitudes(const PhaseRecord& phase, int J) {
  std::vector<ChebSeries> a;
  a.reserve(std::size_t(J) + 1);
  const double x0 = phase.x0;
  const cplx I(0.0, 1.0);

  // 1/sqrt(phi') as its own fit (division is not closed in coefficient space)
  ChebSeries inv_sqrt = ChebSeries::fit_adaptive(
      [&](double x) { return 1.0 / phase.sqrt_dphi.eval(x); }, phase.a, phase.b, 1e-14);
  const cplx s0 = phase.sqrt_dphi.eval(x0);

  // a0 is a direct fit; keep its full coefficient band (hard phases need the
  // 1e-13..1e-14 range for an accurate a0')
  ChebSeries a0 = inv_sqrt;
  a0 *= s0;
  a0.trim(1e-14);
  a.push_back(a0);

  for (int j = 0; j < J; ++j) {
    ChebSeries app = a.back().derivative().derivative();
    app.trim(kSeriesTrim);
    ChebSeries integrand = multiply(app, inv_sqrt);
    integrand *= 0.5 * I;
    ChebSeries G = integrand.antiderivative();
    G.trim(kSeriesTrim);
    {
      std::vector<cplx> c = G.coeffs();
      c[0] -= G.eval(x0);
      G = ChebSeries(std::move(c), phase.a, phase.b);
    }
    ChebSeries aj = multiply(G, inv_sqrt);
    aj.trim(kSeriesTrim);
    a.push_back(aj);
  }

  // substitute each amplitude back into its transport equation
  auto sci = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return std::string(buf);
  };
  auto xs = ChebSeries::lobatto_points(512, phase.a, phase.b);
  ChebSeries ddphi = phase.dphi.derivative();
  for (int j = 0; j <= J; ++j) {
    ChebSeries da = a[std::size_t(j)].derivative();
    ChebSeries app = j > 0 ? a[std::size_t(j) - 1].derivative().derivative() : ChebSeries();
    double worst = 0.0, amax = 0.0, dscale = 0.0;
    for (double xx : xs) {
      const cplx lhs = phase.dphi.eval(xx) * da.eval(xx) + 0.5 * ddphi.eval(xx) * a[std::size_t(j)].eval(xx);
      const cplx rhs = j > 0 ? 0.5 * I * app.eval(xx) : cplx(0.0);
      worst = std::max(worst, std::abs(lhs - rhs));
      amax = std::max(amax, std::abs(a[std::size_t(j)].eval(xx)));
      dscale = std::max(dscale, std::abs(phase.dphi.eval(xx) * da.eval(xx)) + std::abs(rhs));
    }
    if (worst > 1e-8 * std::max(amax, dscale))
      throw ResolutionExceeded("transport_amplitudes: equation residual " + sci(worst) +
                               " at j = " + std::to_string(j) + " (noise estimate " +
                               sci(1e-8 * std::max(amax, dscale)) + ")");
  }
  return a;
}

int truncation_order(const PhaseRecord& phase, double h, double R0) {
  if (!(h > 0.0) || !(R0 > 0.0)) throw Error("truncation_order: h > 0 and R0 > 0 required");
  const int m = 512;
  double min_abs_w = std::numeric_limits<double>::infinity();
  double winding = 0.0;
  cplx prev = phase.z - phase.V(cplx(phase.x0 + R0, 0.0));
  for (int k = 1; k <= m; ++k) {
    const double t = 2.0 * kPi * double(k) / double(m);
    const cplx zeta = cplx(phase.x0, 0.0) + R0 * cplx(std::cos(t), std::sin(t));
    const cplx w = phase.z - phase.V(zeta);
    min_abs_w = std::min(min_abs_w, std::abs(w));
    winding += std::arg(w / prev);
    prev = w;
  }
  if (std::abs(winding) > 1.0)
    throw Error("truncation_order: z - V has a zero inside B(x0, R0); R0 exceeds the analyticity window");
  // |a0| = |phi'(x0)|^{1/2} / |w|^{1/4}, |1/phi'| = |w|^{-1/2}; moduli peak on
  // the circle by the maximum principle
  const double abs_dphi_x0 = std::abs(phase.dphi.eval(phase.x0));
  const double sup_a0 = std::sqrt(abs_dphi_x0) / std::pow(min_abs_w, 0.25);
  const double sup_inv = 1.0 / std::sqrt(min_abs_w);
  const double C1 = std::max(sup_a0, (2.0 / R0) * sup_inv);
  return int(std::floor(1.0 / (std::exp(1.0) * C1 * h)));
}

double Cutoff::operator()(double x) const {
  auto ramp = [](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double g0 = std::exp(-1.0 / t);
    const double g1 = std::exp(-1.0 / (1.0 - t));
    return g0 / (g0 + g1);
  };
  if (x <= s1 || x >= s2) return 0.0;
  if (x >= p1 && x <= p2) return 1.0;
  if (x < p1) return ramp((x - s1) / (p1 - s1));
  return ramp((s2 - x) / (s2 - p2));
}

Cutoff cutoff_build(double p1, double p2, double s1, double s2) {
  if (!(s1 < p1 && p1 < p2 && p2 < s2))
    throw OrderingViolated("cutoff_build: need s1 < p1 < p2 < s2");
  return Cutoff{p1, p2, s1, s2};
}

Pseudomode assemble_and_certify(const PhaseRecord& phase, const std::vector<ChebSeries>& amplitudes,
                                const Cutoff& cutoff, double h, double prefactor_abs) {
  if (amplitudes.empty()) throw Error("assemble_and_certify: no amplitude terms");
  if (cutoff.s1 < phase.a - 1e-12 || cutoff.s2 > phase.b + 1e-12)
    throw Error("assemble_and_certify: cutoff support exceeds the phase interval");
  const double s1 = std::max(cutoff.s1, phase.a), s2 = std::min(cutoff.s2, phase.b);

  double max_dphi = 0.0;
  for (double xx : ChebSeries::lobatto_points(128, s1, s2))
    max_dphi = std::max(max_dphi, std::abs(phase.dphi.eval(xx)));
  const int n_osc = int(std::ceil(10.0 * (s2 - s1) * max_dphi / (2.0 * kPi * h)));

  struct Certified {
    double ratio;
    double scale;  // non-cancelled magnitude (||h^2 u''|| + ||(V-z)u||) / ||u||
  };
  auto residual_at = [&](int n, ChebSeries* u_out, ChebSeries* img_out) -> Certified {
    auto x = ChebSeries::lobatto_points(n, s1, s2);
    std::vector<cplx> uv(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double xx = x[j];
      const double chi = cutoff(xx);
      if (chi == 0.0) {
        uv[j] = 0.0;
        continue;
      }
      cplx amp(0.0);
      double hp = 1.0;
      for (const ChebSeries& ak : amplitudes) {
        amp += hp * ak.eval(xx);
        hp *= h;
      }
      uv[j] = chi * std::exp(cplx(0.0, 1.0) * phase.phi.eval(xx) / h) * amp;
    }
    ChebSeries u = ChebSeries::from_values(uv, s1, s2);
    // cap the differentiation-noise amplification at the function's true degree
    u.trim(1e-14);
    ChebSeries upp = u.derivative().derivative();
    std::vector<cplx> cpad = upp.coeffs();
    cpad.resize(std::size_t(n) + 1, cplx(0.0));
    auto uppv = ChebSeries::coeffs_to_vals(cpad);
    std::vector<cplx> img(x.size());
    std::vector<cplx> kin(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      kin[j] = -h * h * uppv[j];
      img[j] = kin[j] + (phase.V(cplx(x[j], 0.0)) - phase.z) * uv[j];
    }
    const double nu = lobatto_l2_norm(uv, s1, s2);
    const double nr = lobatto_l2_norm(img, s1, s2);
    const double nk = lobatto_l2_norm(kin, s1, s2);
    if (u_out) *u_out = u.trim(1e-14);
    if (img_out) *img_out = ChebSeries::from_values(img, s1, s2).trim(1e-14);
    if (nu == 0.0) throw UnderResolved("assemble_and_certify: pseudomode vanished on the sampling grid");
    return Certified{nr / nu, (nk + nr) / nu + std::abs(phase.z)};
  };

  int n = next_pow2(std::max(256, n_osc));
  const int max_n = 1 << 18;
  Certified r_prev = residual_at(n, nullptr, nullptr);
  while (true) {
    // exact eigenfunctions bottom out at the double-precision cancellation
    // floor of the spectral certifier; accept there
    if (r_prev.ratio <= 1e-11 * r_prev.scale) break;
    if (2 * n > max_n)
      throw UnderResolved("assemble_and_certify: residual did not stabilize by n = " + std::to_string(n) +
                          "; required resolution exceeds the budget");
    const int n2 = 2 * n;
    const Certified r = residual_at(n2, nullptr, nullptr);
    if (std::abs(r.ratio - r_prev.ratio) <= 5e-4 * std::max(r.ratio, 1e-300)) {
      n = n2;
      r_prev = r;
      break;
    }
    n = n2;
    r_prev = r;
  }

  Pseudomode pm;
  pm.h = h;
  pm.z = phase.z;
  pm.z_operator = phase.z;
  pm.x0 = phase.x0;
  pm.interval_a = phase.a;
  pm.interval_b = phase.b;
  pm.terms = int(amplitudes.size());
  pm.cutoff = cutoff;
  pm.amplitudes = amplitudes;
  pm.phi = phase.phi;
  pm.residual = prefactor_abs * residual_at(n, &pm.u, &pm.image).ratio;
  pm.resolution = n;
  pm.min_abs_dphi = phase.min_abs_dphi;
  pm.ddphi_x0 = phase.ddphi_x0;
  return pm;
}

namespace {

Cutoff default_cutoff(double c, double d) {
  const double len = d - c;
  return cutoff_build(c + 0.125 * len, d - 0.125 * len, c, d);
}

// Center candidates: roots of Im(z - V(x)) = 0 with Re(z - V) > 0, ordered by
// the tie-break (smallest |x0|, then positive).
std::vector<double> center_candidates(const std::function<cplx(cplx)>& V, cplx z, double R) {
  auto g = [&](double x) { return std::imag(z - V(cplx(x, 0.0))); };
  std::vector<double> roots;
  const int n = 8192;
  double xp = -R, gp = g(xp);
  for (int i = 1; i <= n; ++i) {
    const double x = -R + 2.0 * R * double(i) / double(n);
    const double gx = g(x);
    if ((gp <= 0.0 && gx > 0.0) || (gp >= 0.0 && gx < 0.0)) {
      double lo = xp, hi = x, glo = gp;
      for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo < 0.0) == (gm < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xp = x;
    gp = gx;
  }
  std::sort(roots.begin(), roots.end(), [](double p, double q) {
    if (std::abs(p) != std::abs(q)) return std::abs(p) < std::abs(q);
    return p > q;
  });
  std::vector<double> out;
  for (double r : roots)
    if (std::real(z - V(cplx(r, 0.0))) > 0.0) out.push_back(r);
  return out;
}

}  // namespace

Pseudomode build_pseudomode(const OperatorModel& model, const PseudomodeRequest& req) {
  if (!model.potential)
    throw Error("build_pseudomode: model has no Schroedinger form; use the shifted or custom entries");
  const PotentialForm& pf = *model.potential;
  const cplx z = reduced_target(model, req.z);
  auto V = pf.V;
  auto dV = pf.dV ? pf.dV : std::function<cplx(cplx)>([V](cplx x) {
    const double step = 1e-6 * std::max(1.0, std::abs(x));
    return (V(x + step) - V(x - step)) / (2.0 * step);
  });

  double x0;
  if (req.x0) {
    x0 = *req.x0;
  } else {
    auto cands = center_candidates(V, z, 50.0);
    if (cands.empty()) throw BranchFailure("build_pseudomode: no admissible center x0 for this target");
    x0 = cands.front();
  }

  double a, b;
  if (req.interval) {
    a = req.interval->first;
    b = req.interval->second;
  } else {
    a = x0 - req.half_width;
    b = x0 + req.half_width;
    // clip to keep Re(z - V) > 0 with a 10% margin of the center value
    const double margin = 0.1 * std::abs(z - V(cplx(x0, 0.0)));
    auto re_ok = [&](double x) { return std::real(z - V(cplx(x, 0.0))) > margin; };
    const int steps = 512;
    for (int i = 1; i <= steps; ++i) {
      const double x = x0 + (b - x0) * double(i) / double(steps);
      if (!re_ok(x)) {
        b = x0 + (b - x0) * double(i - 1) / double(steps);
        break;
      }
    }
    for (int i = 1; i <= steps; ++i) {
      const double x = x0 - (x0 - a) * double(i) / double(steps);
      if (!re_ok(x)) {
        a = x0 - (x0 - a) * double(i - 1) / double(steps);
        break;
      }
    }
    if (!(a < x0 && x0 < b))
      throw BranchFailure("build_pseudomode: admissible interval around x0 collapsed");
  }

  PhaseOptions popts;
  if (req.sign) popts.force_sign = *req.sign;
  PhaseRecord phase = phase_build(V, dV, z, x0, a, b, popts);

  const Cutoff cutoff = req.cutoff ? *req.cutoff : default_cutoff(a, b);
  int terms = req.terms;
  if (terms <= 0) terms = std::max(1, truncation_order(phase, req.h, 0.6 * std::min(x0 - a, b - x0)) + 1);
  auto amps = transport_amplitudes(phase, terms - 1);
  Pseudomode pm = assemble_and_certify(phase, amps, cutoff, req.h, std::abs(pf.prefactor));
  pm.z_operator = req.z;
  return pm;
}

Pseudomode shifted_rescaled_pseudomode(double h, cplx z, int terms, const std::optional<Cutoff>& cutoff) {
  if (!(h > 0.0)) throw Error("shifted_rescaled_pseudomode: h > 0");
  const double rh = std::sqrt(h);
  const cplx I(0.0, 1.0);
  auto V = [rh, h, I](cplx y) { return y * y + 2.0 * I * rh * y - h; };
  auto dV = [rh, I](cplx y) { return 2.0 * y + 2.0 * I * rh; };
  const double y0 = z.imag() / (2.0 * rh);
  const double a = y0 - 0.8, b = y0 + 0.8;
  PhaseOptions popts;
  popts.allow_continuation = true;
  PhaseRecord phase = phase_build(V, dV, z, y0, a, b, popts);
  const Cutoff cf = cutoff ? *cutoff : default_cutoff(a, b);
  auto amps = transport_amplitudes(phase, std::max(0, terms - 1));
  return assemble_and_certify(phase, amps, cf, h, 1.0);
}

Pseudomode shifted_pseudomode(cplx z, double eps_margin, int terms) {
  if (!(eps_margin > 0.0 && eps_margin < 1.0)) throw Error("shifted_pseudomode: eps_margin in (0,1)");
  if (!(z.real() > 0.0) || !(std::abs(z.imag()) <= 2.0 * (1.0 - eps_margin) * std::sqrt(z.real())))
    throw OutsideParabola("shifted_pseudomode: need Re z > 0 and |Im z| <= 2(1-eps) sqrt(Re z)");
  const double h = 1.0 / z.real();
  const double t = z.imag() / z.real();
  return shifted_rescaled_pseudomode(h, cplx(1.0, t), terms);
}

ResidualScan residual_scan(const OperatorModel& model, const std::function<cplx(double)>& z_of_h,
                           const std::vector<double>& h_list, int terms, ScanLaw law) {
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1])) throw Error("residual_scan: h_list must be positive decreasing");

  ResidualScan scan;
  scan.law = law;
  scan.rows.resize(h_list.size());
  parallel_for(int(h_list.size()), 0, [&](int i) {
    const double h = h_list[std::size_t(i)];
    const cplx z = z_of_h(h);
    auto build = [&](int J_terms) -> Pseudomode {
      if (model.kind == ModelKind::shifted_ho) return shifted_rescaled_pseudomode(h, z, J_terms);
      PseudomodeRequest req;
      // scan targets arrive in reduced coordinates; undo the reduction for the
      // request, which expects operator coordinates
      req.z = model.potential ? z * model.potential->prefactor : z;
      req.h = h;
      req.terms = J_terms;
      return build_pseudomode(model, req);
    };
    if (terms > 0) {
      Pseudomode pm = build(terms);
      scan.rows[std::size_t(i)] = {h, pm.residual, pm.terms};
    } else {
      // residual-minimizing truncation: walk J upward until the certified
      // residual has clearly passed its minimum
      double best = std::numeric_limits<double>::infinity();
      int best_terms = 1, worse = 0;
      for (int J = 1; J <= 14; ++J) {
        const double r = build(J).residual;
        if (r < best) {
          best = r;
          best_terms = J;
          worse = 0;
        } else if (++worse >= 2) {
          break;
        }
      }
      scan.rows[std::size_t(i)] = {h, best, best_terms};
    }
  });

  if (scan.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& row : scan.rows) {
      x.push_back(law == ScanLaw::inv_h ? 1.0 / row.h : 1.0 / std::sqrt(row.h));
      y.push_back(std::log(row.residual));
    }
    scan.fit = linear_fit(x, y);
    scan.has_fit = true;
  }
  return scan;
}

CVec project_to_hermite(const Pseudomode& pm, int N) {
  const double s1 = pm.u.a(), s2 = pm.u.b();
  // Gauss-Legendre with m nodes is exact to polynomial degree 2m - 1; the
  // integrand is (degree of the sampled u) x (local degree of h_k on the
  // support, ~ sqrt(2N) (s2-s1)/2)
  const int deg_h = int(std::sqrt(2.0 * N + 1.0) * (s2 - s1) / 2.0) + 16;
  const int m = std::min(6000, (pm.u.degree() + deg_h) / 2 + 64);
  QuadRule gl = map_interval(gauss_legendre(m), s1, s2);
  RMat phi = hermite_function_matrix(N - 1, gl.nodes);
  CVec c = CVec::Zero(N);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const cplx uw = pm.u.eval(gl.nodes[i]) * gl.weights[i];
    for (int k = 0; k < N; ++k) c(k) += phi(k, int(i)) * uw;
  }
  return c;
}

OperatorModel reduced_semiclassical_model(const OperatorModel& m, double h) {
  if (!m.potential) throw Error("reduced_semiclassical_model: model has no Schroedinger form");
  if (!m.polynomial_coefficients())
    throw UnsupportedCoefficients("reduced_semiclassical_model: potential must be polynomial");
  // V_reduced = a_0 / (-a_2), with a_2 the constant leading coefficient
  const cplx lead = -m.coeffs[2].poly()->eval(0.0);
  Poly v = *m.coeffs[0].poly();
  for (cplx& ck : v.c) ck /= lead;
  const PotentialForm pf = *m.potential;
  OperatorModel out;
  out.kind = ModelKind::custom;
  out.coeffs = {Coefficient::polynomial(v), Coefficient::polynomial(Poly{{cplx(0.0)}}),
                Coefficient::polynomial(Poly{{cplx(-h * h, 0.0)}})};
  out.scaling = m.scaling;
  out.potential = PotentialForm{pf.V, pf.dV, 1.0, "reduced semiclassical form"};
  out.notes = "-h^2 d^2/dx^2 + V, h = " + std::to_string(h);
  return out;
}

OperatorModel shifted_tilde_model(double h) {
  const cplx I(0.0, 1.0);
  const double rh = std::sqrt(h);
  OperatorModel out;
  out.kind = ModelKind::custom;
  out.coeffs = {Coefficient::polynomial(Poly{{cplx(-h, 0.0), 2.0 * I * rh, cplx(1.0, 0.0)}}),
                Coefficient::polynomial(Poly{{cplx(0.0)}}),
                Coefficient::polynomial(Poly{{cplx(-h * h, 0.0)}})};
  out.scaling = {2.0, 2};
  out.potential = PotentialForm{[rh, h, I](cplx y) { return y * y + 2.0 * I * rh * y - h; },
                                [rh, I](cplx y) { return 2.0 * y + 2.0 * I * rh; }, 1.0,
                                "rescaled shifted oscillator"};
  out.notes = "shifted oscillator in rescaled variables, h = " + std::to_string(h);
  return out;
}

}  // namespace pslab
