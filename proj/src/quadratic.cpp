#include "pslab/quadratic.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "pslab/errors.hpp"
#include "pslab/fft.hpp"
#include "pslab/quadrature.hpp"

namespace pslab {

std::string to_string(Ellipticity e) {
  switch (e) {
    case Ellipticity::elliptic: return "elliptic";
    case Ellipticity::degenerate_range: return "degenerate_range";
    case Ellipticity::nonelliptic: return "nonelliptic";
  }
  return "nonelliptic";
}

namespace {

// On the unit circle q(cos phi, sin phi) = A + B cos 2phi + C sin 2phi; zeros
// correspond to unit-modulus roots of (B - iC) u^2 + 2A u + (B + iC).
struct CircleForm {
  cplx A, B, C;
  cplx at(double phi) const { return A + B * std::cos(2 * phi) + C * std::sin(2 * phi); }
};

CircleForm circle_form(const QuadraticSymbol& q) {
  return CircleForm{0.5 * (q.alpha + q.gamma), 0.5 * (q.alpha - q.gamma), q.beta};
}

bool has_real_zero(const QuadraticSymbol& q) {
  const CircleForm cf = circle_form(q);
  const cplx a = cf.B - cplx(0, 1) * cf.C;
  const cplx b = 2.0 * cf.A;
  const cplx c = cf.B + cplx(0, 1) * cf.C;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return true;  // q identically zero
  const double tol = 1e-12;
  if (std::abs(a) <= tol * scale) {
    if (std::abs(b) <= tol * scale) return std::abs(c) <= tol * scale;
    return std::abs(std::abs(-c / b) - 1.0) <= 1e-10;
  }
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  for (const cplx u : {(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)}) {
    if (std::abs(std::abs(u) - 1.0) <= 1e-10) return true;
  }
  return false;
}

int circle_winding(const QuadraticSymbol& q) {
  const CircleForm cf = circle_form(q);
  const int n = 4096;
  double total = 0.0;
  cplx prev = cf.at(0.0);
  for (int i = 1; i <= n; ++i) {
    const double phi = kPi * double(i) / double(n);
    const cplx cur = cf.at(phi);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(total / (2.0 * kPi)));
}

}  // namespace

Ellipticity classify(const QuadraticSymbol& q) {
  if (has_real_zero(q)) return Ellipticity::nonelliptic;
  return circle_winding(q) == 0 ? Ellipticity::elliptic : Ellipticity::degenerate_range;
}

FundamentalData fundamental(const QuadraticSymbol& q) {
  if (classify(q) != Ellipticity::elliptic) throw NotElliptic("fundamental: symbol is not elliptic");
  FundamentalData fd;
  fd.F << q.beta, q.gamma, -q.alpha, -q.beta;
  const cplx lam2 = q.beta * q.beta - q.alpha * q.gamma;
  cplx lam = std::sqrt(lam2);
  // eigenvector slope for eigenvalue l: (F - l)(1, a)^T = 0 => a = (l - beta)/gamma
  if (std::abs(q.gamma) < 1e-14 * std::max(std::abs(q.alpha), std::abs(q.beta))) {
    // (a, 1) chart: second row gives -alpha a - beta = l a => a = -beta.../ fallback
    // For elliptic symbols gamma != 0 (q(0,1) = gamma); treat as a failure.
    throw NormalizationFailure("fundamental: eigenvector has vanishing first component");
  }
  cplx ap = (lam - q.beta) / q.gamma;
  cplx am = (-lam - q.beta) / q.gamma;
  if (ap.imag() < 0.0) {
    std::swap(ap, am);
    lam = -lam;
  }
  if (!(ap.imag() > 0.0) || !(am.imag() < 0.0))
    throw NormalizationFailure("fundamental: slope sign convention Im a_+ > 0 > Im a_- failed");
  fd.lambda = lam;
  fd.a_plus = ap;
  fd.a_minus = am;
  const double st = std::abs((ap - std::conj(am)) / (ap - am));
  fd.theta = std::asin(std::min(1.0, st));
  fd.scale = -cplx(0, 1) * lam;
  return fd;
}

std::vector<cplx> quadratic_spectrum(const QuadraticSymbol& q, int count) {
  FundamentalData fd = fundamental(q);
  std::vector<cplx> out;
  out.reserve(std::size_t(count));
  for (int k = 0; k < count; ++k) out.push_back(fd.scale * double(2 * k + 1));
  return out;
}

std::pair<double, cplx> identify_rotated(const QuadraticSymbol& q) {
  FundamentalData fd = fundamental(q);
  return {fd.theta, fd.scale};
}

QuadraticSymbol swanson_to_weyl(double omega, double alpha, double beta) {
  if (!(omega - std::abs(alpha + beta) > 0.0))
    throw ConstraintViolated("swanson_to_weyl: omega - |alpha + beta| > 0 required");
  return QuadraticSymbol{cplx(omega - alpha - beta, 0.0), cplx(0.0, alpha - beta),
                         cplx(omega + alpha + beta, 0.0)};
}

namespace {

// Uniform-grid Fourier transform by quadrature of (2 pi)^{-1/2} int e^{-i x xi} u(x) dx,
// with xi on the reciprocal uniform grid; reduces to a phased FFT.
struct GridFourier {
  int n;
  double L;        // grid covers [-L, L)
  double dx, dxi;
  std::vector<double> x, xi;

  explicit GridFourier(int n_, double L_) : n(n_), L(L_) {
    dx = 2.0 * L / double(n);
    dxi = 2.0 * kPi / (double(n) * dx);
    x.resize(std::size_t(n));
    xi.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) {
      x[std::size_t(j)] = -L + dx * double(j);
      xi[std::size_t(j)] = dxi * (double(j) - double(n) / 2.0);
    }
  }

  // Quadrature of (2 pi)^{-1/2} int e^{-i x xi} u dx over the grid factors into
  // a phased DFT: with Xi = n dxi / 2,
  //   F_k = (dx / sqrt(2 pi)) e^{i L xi_k} DFT[ e^{i j dx Xi} u_j ]_k.
  std::vector<cplx> forward(const std::vector<cplx>& u) const {
    std::vector<cplx> w(u);
    const double Xi = dxi * double(n) / 2.0;
    for (int j = 0; j < n; ++j) w[std::size_t(j)] *= std::exp(cplx(0.0, double(j) * dx * Xi));
    fft_pow2(w, -1);
    std::vector<cplx> out(std::size_t(n), cplx(0.0));
    const double c = dx / std::sqrt(2.0 * kPi);
    for (int k = 0; k < n; ++k)
      out[std::size_t(k)] = c * std::exp(cplx(0.0, L * xi[std::size_t(k)])) * w[std::size_t(k)];
    return out;
  }

  //   u_j = (dxi / sqrt(2 pi)) e^{-i j dx Xi} IDFT[ e^{-i L xi_k} v_k ]_j.
  std::vector<cplx> inverse(const std::vector<cplx>& v) const {
    std::vector<cplx> w(v);
    for (int k = 0; k < n; ++k) w[std::size_t(k)] *= std::exp(cplx(0.0, -L * xi[std::size_t(k)]));
    fft_pow2(w, +1);
    std::vector<cplx> out(std::size_t(n), cplx(0.0));
    const double c = dxi / std::sqrt(2.0 * kPi);
    const double Xi = dxi * double(n) / 2.0;
    for (int j = 0; j < n; ++j)
      out[std::size_t(j)] = c * std::exp(cplx(0.0, -double(j) * dx * Xi)) * w[std::size_t(j)];
    return out;
  }

  std::vector<cplx> derivative(const std::vector<cplx>& u) const {
    auto v = forward(u);
    for (int k = 0; k < n; ++k) v[std::size_t(k)] *= cplx(0.0, xi[std::size_t(k)]);
    return inverse(v);
  }

  double norm(const std::vector<cplx>& u) const {
    double s = 0.0;
    for (const cplx& c : u) s += std::norm(c);
    return std::sqrt(s * dx);
  }
};

}  // namespace

SwansonCheck swanson_unitary_check(double omega, double alpha, double beta, int n_samples, int grid_n,
                                   double half_width) {
  if (!(omega - std::abs(alpha + beta) > 0.0))
    throw ConstraintViolated("swanson_unitary_check: omega - |alpha + beta| > 0 required");
  if (!is_pow2(std::size_t(grid_n))) throw Error("swanson_unitary_check: grid_n must be a power of two");
  const double delta = std::sqrt((omega + alpha + beta) / (omega - alpha - beta));
  const cplx zeta = cplx(std::sqrt(omega * omega - (alpha + beta) * (alpha + beta)), alpha - beta);
  const cplx I(0.0, 1.0);

  GridFourier gf(grid_n, half_width);
  SwansonCheck result;

  for (int s = 0; s < n_samples; ++s) {
    // sample f = hermite function h_s (closed form, evaluable anywhere)
    auto f = [&](double x) { return hermite_function_values(s, x)[std::size_t(s)]; };
    auto Rf = [&](double x) {
      // zeta(-f'' + (conj zeta/zeta) x^2 f); h_s'' = (x^2 - (2s+1)) h_s
      const double hs = f(x);
      return zeta * (double(2 * s + 1) * hs - x * x * hs + (std::conj(zeta) / zeta) * (x * x) * hs);
    };

    auto apply_U = [&](const std::function<cplx(double)>& g) {
      // U3: scale, evaluated in closed form
      std::vector<cplx> u(std::size_t(grid_n), cplx(0.0));
      const double r = std::sqrt(2.0 * delta);
      for (int j = 0; j < grid_n; ++j)
        u[std::size_t(j)] = std::pow(2.0 * delta, 0.25) * g(r * gf.x[std::size_t(j)]);
      // U2: Fourier-side chirp
      auto v = gf.forward(u);
      for (int k = 0; k < grid_n; ++k)
        v[std::size_t(k)] *= std::exp(-I * gf.xi[std::size_t(k)] * gf.xi[std::size_t(k)] / (4.0 * delta));
      u = gf.inverse(v);
      // U1: Gaussian multiplier
      for (int j = 0; j < grid_n; ++j)
        u[std::size_t(j)] *= std::exp(-I * delta * gf.x[std::size_t(j)] * gf.x[std::size_t(j)] / 2.0);
      return u;
    };

    std::vector<cplx> Uf = apply_U(f);

    // aliasing guard: the image must have negligible mass at the window edge
    double edge = 0.0, peak = 0.0;
    for (int j = 0; j < grid_n; ++j) {
      peak = std::max(peak, std::abs(Uf[std::size_t(j)]));
      if (j < 8 || j >= grid_n - 8) edge = std::max(edge, std::abs(Uf[std::size_t(j)]));
    }
    if (edge > 1e-10 * peak)
      throw GridTooSmall("swanson_unitary_check: sample leaks to the window boundary");

    // H (Uf) with spectral derivatives; H in the ladder-expanded form
    // -(omega - alpha - beta) d^2/dx^2 + (omega + alpha + beta) x^2
    //   + (alpha - beta)(x d/dx + d/dx x)
    auto d1 = gf.derivative(Uf);
    auto d2 = gf.derivative(d1);
    std::vector<cplx> lhs(std::size_t(grid_n), cplx(0.0));
    for (int j = 0; j < grid_n; ++j) {
      const double x = gf.x[std::size_t(j)];
      lhs[std::size_t(j)] = -(omega - alpha - beta) * d2[std::size_t(j)] +
                            (omega + alpha + beta) * x * x * Uf[std::size_t(j)] +
                            (alpha - beta) * (2.0 * x * d1[std::size_t(j)] + Uf[std::size_t(j)]);
    }

    std::vector<cplx> rhs = apply_U(Rf);

    std::vector<cplx> diff(std::size_t(grid_n), cplx(0.0));
    for (int j = 0; j < grid_n; ++j) diff[std::size_t(j)] = lhs[std::size_t(j)] - rhs[std::size_t(j)];
    const double rel = gf.norm(diff) / gf.norm(rhs);
    result.per_sample.push_back(rel);
    result.max_rel_deviation = std::max(result.max_rel_deviation, rel);
    result.max_unitarity_dev = std::max(result.max_unitarity_dev, std::abs(gf.norm(Uf) - 1.0));
  }
  return result;
}

nlohmann::json quadratic_report(const QuadraticSymbol& q) {
  nlohmann::json j;
  auto put = [&j](const char* key, cplx v) { j[key] = {v.real(), v.imag()}; };
  put("alpha", q.alpha);
  put("beta", q.beta);
  put("gamma", q.gamma);
  const Ellipticity cls = classify(q);
  j["classification"] = to_string(cls);
  if (cls == Ellipticity::elliptic) {
    FundamentalData fd = fundamental(q);
    put("lambda", fd.lambda);
    put("a_plus", fd.a_plus);
    put("a_minus", fd.a_minus);
    j["theta"] = fd.theta;
    put("scale", fd.scale);
  }
  return j;
}

}  // namespace pslab
