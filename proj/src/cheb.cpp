#include "pslab/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "pslab/errors.hpp"
#include "pslab/fft.hpp"

namespace pslab {

namespace {

// CT(x)_k = x_0/2 + (-1)^k x_n/2 + sum_{j=1}^{n-1} x_j cos(pi j k / n), k = 0..n.
std::vector<cplx> cosine_transform(const std::vector<cplx>& x) {
  const int n = int(x.size()) - 1;
  std::vector<cplx> out(n + 1);
  if (n == 0) {
    out[0] = x[0];
    return out;
  }
  if (is_pow2(std::size_t(2 * n))) {
    std::vector<cplx> w(2 * n);
    w[0] = x[0];
    for (int j = 1; j < n; ++j) {
      w[j] = x[j];
      w[2 * n - j] = x[j];
    }
    w[n] = x[n];
    fft_pow2(w, -1);
    for (int k = 0; k <= n; ++k) out[k] = 0.5 * w[k];
    return out;
  }
  for (int k = 0; k <= n; ++k) {
    cplx s = 0.5 * (x[0] + (k % 2 ? -x[n] : x[n]));
    for (int j = 1; j < n; ++j) s += x[j] * std::cos(kPi * double(j) * double(k) / double(n));
    out[k] = s;
  }
  return out;
}

}  // namespace

ChebSeries::ChebSeries(std::vector<cplx> coeffs, double a, double b) : c_(std::move(coeffs)), a_(a), b_(b) {
  if (!(a < b)) throw Error("ChebSeries: need a < b");
  if (c_.empty()) c_.assign(1, cplx(0.0));
}

std::vector<double> ChebSeries::lobatto_points(int n, double a, double b) {
  std::vector<double> x(n + 1);
  if (n == 0) {
    x[0] = 0.5 * (a + b);
    return x;
  }
  for (int j = 0; j <= n; ++j) {
    // ascending: t_j = -cos(pi j / n)
    const double t = -std::cos(kPi * double(j) / double(n));
    x[j] = 0.5 * ((b - a) * t + (b + a));
  }
  x[0] = a;
  x[n] = b;
  return x;
}

std::vector<cplx> ChebSeries::vals_to_coeffs(const std::vector<cplx>& v) {
  const int n = int(v.size()) - 1;
  if (n == 0) return v;
  // cosine_transform expects values on the descending grid t_j = cos(pi j/n)
  std::vector<cplx> rv(v.rbegin(), v.rend());
  std::vector<cplx> ct = cosine_transform(rv);
  std::vector<cplx> c(n + 1);
  for (int k = 0; k <= n; ++k) c[k] = (2.0 / double(n)) * ct[k];
  c[0] *= 0.5;
  c[n] *= 0.5;
  return c;
}

std::vector<cplx> ChebSeries::coeffs_to_vals(const std::vector<cplx>& c) {
  const int n = int(c.size()) - 1;
  if (n == 0) return c;
  std::vector<cplx> d = c;
  d[0] *= 2.0;
  d[n] *= 2.0;
  std::vector<cplx> ct = cosine_transform(d);  // values on descending grid
  return std::vector<cplx>(ct.rbegin(), ct.rend());
}

std::vector<double> ChebSeries::cc_weights(int n) {
  static std::map<int, std::vector<double>> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  // w_j = (2/n) * CT(mu)_j with ends halved; mu_k = 2/(1-k^2) for even k.
  std::vector<cplx> mu(n + 1, cplx(0.0));
  for (int k = 0; k <= n; k += 2) mu[k] = 2.0 / (1.0 - double(k) * double(k));
  std::vector<cplx> ct = cosine_transform(mu);
  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = (2.0 / double(n)) * ct[j].real();
  w[0] *= 0.5;
  w[n] *= 0.5;
  std::reverse(w.begin(), w.end());  // match ascending grid (symmetric anyway)
  {
    std::lock_guard<std::mutex> lock(mtx);
    cache[n] = w;
  }
  return w;
}

ChebSeries ChebSeries::from_values(const std::vector<cplx>& vals, double a, double b) {
  return ChebSeries(vals_to_coeffs(vals), a, b);
}

ChebSeries ChebSeries::fit(const std::function<cplx(double)>& f, double a, double b, int n) {
  auto x = lobatto_points(n, a, b);
  std::vector<cplx> v(n + 1);
  for (int j = 0; j <= n; ++j) v[j] = f(x[j]);
  return ChebSeries(vals_to_coeffs(v), a, b);
}

ChebSeries ChebSeries::fit_adaptive(const std::function<cplx(double)>& f, double a, double b,
                                    double rel_tol, int max_n) {
  for (int n = 16; n <= max_n; n *= 2) {
    ChebSeries s = fit(f, a, b, n);
    double scale = 0.0;
    for (const cplx& ck : s.c_) scale = std::max(scale, std::abs(ck));
    if (scale == 0.0) return s;
    // tail test on the top eighth of the spectrum
    double tail = 0.0;
    for (int k = n - n / 8; k <= n; ++k) tail = std::max(tail, std::abs(s.c_[std::size_t(k)]));
    if (tail <= rel_tol * scale) {
      s.trim(rel_tol);
      return s;
    }
  }
  throw ResolutionExceeded("ChebSeries::fit_adaptive: coefficient tail did not settle below tolerance");
}

ChebSeries& ChebSeries::trim(double rel_tol) {
  double scale = 0.0;
  for (const cplx& ck : c_) scale = std::max(scale, std::abs(ck));
  int last = int(c_.size()) - 1;
  while (last > 0 && std::abs(c_[std::size_t(last)]) <= rel_tol * scale) --last;
  c_.resize(std::size_t(last) + 1);
  return *this;
}

cplx ChebSeries::eval(double x) const {
  const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
  cplx b1(0.0), b2(0.0);
  for (int k = int(c_.size()) - 1; k >= 1; --k) {
    cplx tmp = 2.0 * t * b1 - b2 + c_[std::size_t(k)];
    b2 = b1;
    b1 = tmp;
  }
  return t * b1 - b2 + c_[0];
}

ChebSeries ChebSeries::derivative() const {
  const int n = degree();
  std::vector<cplx> d(std::size_t(std::max(1, n)), cplx(0.0));
  if (n >= 1) {
    std::vector<cplx> w(n + 2, cplx(0.0));
    for (int k = n; k >= 1; --k) w[std::size_t(k - 1)] = w[std::size_t(k + 1)] + 2.0 * double(k) * c_[std::size_t(k)];
    w[0] *= 0.5;
    const double scale = 2.0 / (b_ - a_);
    for (int k = 0; k <= n - 1; ++k) d[std::size_t(k)] = scale * w[std::size_t(k)];
  }
  return ChebSeries(std::move(d), a_, b_);
}

ChebSeries ChebSeries::antiderivative() const {
  const int n = degree();
  std::vector<cplx> B(std::size_t(n) + 2, cplx(0.0));
  auto cc = [&](int k) -> cplx { return k <= n ? c_[std::size_t(k)] : cplx(0.0); };
  B[1] = cc(0) - 0.5 * cc(2);  // int T_0 = T_1, int T_1 = T_2 / 4
  for (int k = 2; k <= n + 1; ++k) B[std::size_t(k)] = (cc(k - 1) - cc(k + 1)) / (2.0 * double(k));
  const double scale = (b_ - a_) / 2.0;
  for (int k = 1; k <= n + 1; ++k) B[std::size_t(k)] *= scale;
  cplx at_a(0.0);
  for (int k = 1; k <= n + 1; ++k) at_a += (k % 2 ? -B[std::size_t(k)] : B[std::size_t(k)]);
  B[0] = -at_a;
  return ChebSeries(std::move(B), a_, b_);
}

cplx ChebSeries::definite_integral() const {
  cplx s(0.0);
  for (int k = 0; k <= degree(); k += 2) s += c_[std::size_t(k)] * (2.0 / (1.0 - double(k) * double(k)));
  return s * ((b_ - a_) / 2.0);
}

double lobatto_l2_norm(const std::vector<cplx>& values, double a, double b) {
  const int n = int(values.size()) - 1;
  auto w = ChebSeries::cc_weights(n);
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += w[std::size_t(j)] * std::norm(values[std::size_t(j)]);
  return std::sqrt(std::max(0.0, s * (b - a) / 2.0));
}

double ChebSeries::l2_norm() const {
  // resample on 2n so the quadrature is exact for |f|^2
  const int n = std::max(2, 2 * degree());
  std::vector<cplx> padded(c_);
  padded.resize(std::size_t(n) + 1, cplx(0.0));
  return lobatto_l2_norm(coeffs_to_vals(padded), a_, b_);
}

double ChebSeries::sup_norm() const {
  const int n = std::max(4, 2 * degree());
  std::vector<cplx> padded(c_);
  padded.resize(std::size_t(n) + 1, cplx(0.0));
  auto v = coeffs_to_vals(padded);
  double m = 0.0;
  for (const cplx& y : v) m = std::max(m, std::abs(y));
  return m;
}

ChebSeries ChebSeries::conj() const {
  std::vector<cplx> c(c_.size());
  for (std::size_t k = 0; k < c_.size(); ++k) c[k] = std::conj(c_[k]);
  return ChebSeries(std::move(c), a_, b_);
}

ChebSeries ChebSeries::operator+(const ChebSeries& o) const {
  std::vector<cplx> c(std::max(c_.size(), o.c_.size()), cplx(0.0));
  for (std::size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) c[k] += o.c_[k];
  return ChebSeries(std::move(c), a_, b_);
}

ChebSeries ChebSeries::operator-(const ChebSeries& o) const {
  std::vector<cplx> c(std::max(c_.size(), o.c_.size()), cplx(0.0));
  for (std::size_t k = 0; k < c_.size(); ++k) c[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) c[k] -= o.c_[k];
  return ChebSeries(std::move(c), a_, b_);
}

ChebSeries& ChebSeries::operator*=(cplx s) {
  for (cplx& ck : c_) ck *= s;
  return *this;
}

}  // namespace pslab
