#include <doctest.h>

#include <cmath>
#include <random>

#include "pslab/discretize.hpp"
#include "pslab/errors.hpp"
#include "pslab/model.hpp"
#include "pslab/resolvent.hpp"

using namespace pslab;

namespace {

DiscretizedOperator wrap(CMat A) {
  DiscretizedOperator op;
  op.N = int(A.rows());
  op.matrix = std::move(A);
  op.basis = BasisType::hermite;
  return op;
}

}  // namespace

TEST_CASE("resolvent norm: normal diagonal case") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  CHECK(resolvent_norm(wrap(A), cplx(0.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("resolvent norm: Jordan block frozen value (1+sqrt(5))/2") {
  CMat A = CMat::Zero(2, 2);
  A(0, 1) = 1.0;
  CHECK(resolvent_norm(wrap(A), cplx(1.0, 0.0)) ==
        doctest::Approx(1.6180339887498949).epsilon(1e-12));
}

TEST_CASE("resolvent norm: ceiling at the spectrum") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  CHECK(resolvent_norm(wrap(A), cplx(1.0, 0.0)) == doctest::Approx(1e16));
}

TEST_CASE("sweeper sigma_min agrees with dense SVD on dense and tridiagonal paths") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  // dense path (Schur-triangular iteration)
  {
    CMat A(40, 40);
    for (int j = 0; j < 40; ++j)
      for (int i = 0; i < 40; ++i) A(i, j) = cplx(g(rng), g(rng));
    DiscretizedOperator op = wrap(A);
    SigmaMinSweeper sw(op);
    for (cplx z : {cplx(0.3, -1.2), cplx(2.0, 0.7), cplx(-4.0, 0.0)}) {
      CMat M = A - z * CMat::Identity(40, 40);
      Eigen::BDCSVD<CMat> svd(M);
      const double exact = svd.singularValues()(39);
      CHECK(sw.sigma_min(z, nullptr) == doctest::Approx(exact).epsilon(1e-7));
    }
  }
  // tridiagonal path
  {
    OperatorModel airy = make_model(ModelKind::airy, {});
    DiscretizedOperator op = grid_assemble(airy, -15.0, 15.0, 120);
    SigmaMinSweeper sw(op);
    for (cplx z : {cplx(1.0, 0.5), cplx(3.0, -2.0)}) {
      CMat M = op.matrix - z * CMat::Identity(120, 120);
      Eigen::BDCSVD<CMat> svd(M);
      const double exact = svd.singularValues()(119);
      CHECK(sw.sigma_min(z, nullptr) == doctest::Approx(exact).epsilon(1e-7));
    }
  }
}

TEST_CASE("pseudospectrum grid of a normal matrix equals distance to spectrum") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  PseudospectrumGrid g = pseudospectrum_grid(wrap(A), Region{0.0, 3.0, -1.0, 1.0}, 31, 21);
  for (int i = 0; i < g.n_im; ++i)
    for (int j = 0; j < g.n_re; ++j) {
      const cplx z(g.re_at(j), g.im_at(i));
      const double d = std::min(std::abs(z - cplx(1.0, 0.0)), std::abs(z - cplx(2.0, 0.0)));
      if (d > 1e-6) CHECK(g.values(i, j) == doctest::Approx(-std::log10(d)).epsilon(1e-6));
    }
}

TEST_CASE("grid values match pointwise resolvent_norm (dual route)") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  DiscretizedOperator op = hermite_assemble(ho, 60);
  PseudospectrumGrid g = pseudospectrum_grid(op, Region{0.0, 10.0, -4.0, 4.0}, 11, 9);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ui(0, 10), uj(0, 8);
  for (int rep = 0; rep < 6; ++rep) {
    const int j = ui(rng), i = uj(rng);
    const double direct = std::log10(resolvent_norm(op, cplx(g.re_at(j), g.im_at(i))));
    CHECK(g.values(i, j) == doctest::Approx(direct).epsilon(1e-6));
  }
}

TEST_CASE("adjoint mirror: grids of H and H* reflect across the real axis") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.6}});
  DiscretizedOperator op = hermite_assemble(ho, 48);
  DiscretizedOperator adj = op;
  adj.matrix = op.matrix.adjoint();
  // region offset so no node sits on an eigenvalue, where sigma_min is pure
  // roundoff noise
  const Region reg{0.123, 8.123, -3.0, 3.0};
  PseudospectrumGrid g = pseudospectrum_grid(op, reg, 17, 13);
  PseudospectrumGrid ga = pseudospectrum_grid(adj, reg, 17, 13);
  for (int i = 0; i < 13; ++i)
    for (int j = 0; j < 17; ++j) {
      if (g.values(i, j) > 12.0) continue;
      CHECK(g.values(i, j) == doctest::Approx(ga.values(12 - i, j)).epsilon(1e-8));
    }
}

TEST_CASE("PT mirror: airy grid symmetric across the real axis") {
  OperatorModel airy = make_model(ModelKind::airy, {});
  DiscretizedOperator op = grid_assemble(airy, -12.0, 12.0, 150);
  PseudospectrumGrid g = pseudospectrum_grid(op, Region{0.0, 4.0, -2.0, 2.0}, 13, 11);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 13; ++j)
      CHECK(g.values(i, j) == doctest::Approx(g.values(10 - i, j)).epsilon(1e-9));
}

TEST_CASE("robust inclusions hold at matrix level on every node") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  DiscretizedOperator op = hermite_assemble(ho, 60);
  PseudospectrumGrid g = pseudospectrum_grid(op, Region{-2.0, 10.0, -5.0, 5.0}, 25, 21);
  NumericalRange nr = numerical_range_boundary(op, 128);
  CVec eigs = g.eigenvalues;
  for (int i = 0; i < g.n_im; ++i)
    for (int j = 0; j < g.n_re; ++j) {
      const cplx z(g.re_at(j), g.im_at(i));
      double dist_spec = 1e300;
      for (int k = 0; k < eigs.size(); ++k) dist_spec = std::min(dist_spec, std::abs(z - eigs(k)));
      if (dist_spec > 1e-8)  // first inclusion: ||R|| >= 1/dist(z, spec)
        CHECK(g.values(i, j) >= -std::log10(dist_spec) - 1e-6);
      const double dout = nr.distance_outside(z);  // second inclusion, outside Num(H)
      if (dout > 1e-3) CHECK(g.values(i, j) <= -std::log10(dout) + 1e-6);
    }
}

TEST_CASE("contours of a normal matrix are circles") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  PseudospectrumGrid g = pseudospectrum_grid(wrap(A), Region{0.0, 3.0, -1.0, 1.0}, 121, 81);
  auto polys = contour_extract(g, 0.5);
  REQUIRE(!polys.empty());
  const double cell = std::hypot(3.0 / 120.0, 2.0 / 80.0);
  int checked = 0;
  for (const auto& pl : polys) {
    for (const cplx& p : pl.points) {
      const double d = std::min(std::abs(p - cplx(1.0, 0.0)), std::abs(p - cplx(2.0, 0.0)));
      CHECK(std::abs(d - 0.5) < cell);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("contour extraction flags empty levels") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  PseudospectrumGrid g = pseudospectrum_grid(wrap(A), Region{0.0, 3.0, -1.0, 1.0}, 21, 15);
  CHECK_THROWS_AS(contour_extract(g, 1e-12), EmptyLevel);
}

TEST_CASE("numerical range: hermitian diagonal") {
  CMat A = CMat::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 3.0;
  NumericalRange nr = numerical_range_boundary(wrap(A), 64);
  for (const cplx& p : nr.points) {
    CHECK(p.imag() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(p.real() >= 1.0 - 1e-10);
    CHECK(p.real() <= 3.0 + 1e-10);
  }
  CHECK(nr.distance_outside(cplx(5.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("numerical range: rotated oscillator sector") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  DiscretizedOperator op = hermite_assemble(ho, 200);
  NumericalRange nr = numerical_range_boundary(op, 128);
  for (const cplx& p : nr.points)
    CHECK(std::abs(p.imag()) <= std::tan(kPi / 4.0) * p.real() + 1e-3 * std::abs(p));
}

TEST_CASE("eigen system: diagonal matrix and rotated oscillator eigenvalues") {
  {
    CMat A = CMat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    EigenSystem es = eigen_system(wrap(A));
    CHECK(std::abs(es.values(0) - cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(es.values(1) - cplx(2.0, 0.0)) < 1e-12);
    CHECK(es.pairing(0) == doctest::Approx(1.0));
  }
  {
    OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
    DiscretizedOperator op = hermite_assemble(ho, 120);
    EigenSystem es = eigen_system(op);
    for (int k = 0; k < 6; ++k) {
      CHECK(std::abs(es.values(k) - cplx(2.0 * k + 1.0, 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("swanson eigenvalues (2k+1) sqrt(omega^2 - 4 alpha beta)") {
  OperatorModel sw = make_model(ModelKind::swanson, {{"omega", 2.0}, {"alpha", 0.5}, {"beta", 0.25}});
  DiscretizedOperator op = hermite_assemble(sw, 160);
  CVec ev = eigenvalues_only(op);
  std::vector<double> re(ev.size());
  for (int i = 0; i < ev.size(); ++i) re[std::size_t(i)] = ev(i).real();
  std::sort(re.begin(), re.end());
  const double s = std::sqrt(3.5);
  for (int k = 0; k < 8; ++k) CHECK(re[std::size_t(k)] == doctest::Approx((2.0 * k + 1.0) * s).epsilon(1e-7));
}

TEST_CASE("growth exponent fit recovers a synthetic generator") {
  std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::vector<double> crossings;
  for (double e : eps) crossings.push_back(std::pow(std::log(1.0 / e), 2.0 / 3.0));
  GrowthFit f = growth_exponent_fit(eps, crossings);
  CHECK(f.exponent == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(growth_exponent_fit({1e-2, 1e-3, 2e-3}, {1.0, 2.0, 3.0}), InsufficientData);
}
