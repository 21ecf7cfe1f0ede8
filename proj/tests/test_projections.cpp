#include <doctest.h>

#include <cmath>

#include "pslab/discretize.hpp"
#include "pslab/errors.hpp"
#include "pslab/projections.hpp"

using namespace pslab;

TEST_CASE("legendre_log small cases") {
  CHECK(legendre_log(0, 3.7) == doctest::Approx(0.0));
  CHECK(legendre_log(1, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // P_2(x) = (3x^2 - 1)/2
  CHECK(legendre_log(2, 2.0) == doctest::Approx(std::log(5.5)).epsilon(1e-14));
  CHECK_THROWS_AS(legendre_log(3, 0.5), DomainError);
}

TEST_CASE("legendre_log at k = 500: long-double recurrence oracle and asymptotics") {
  const double x = std::sqrt(2.0);
  // oracle: plain recurrence in long double (value ~ e^{440} fits)
  long double pm = 1.0L, pc = (long double)x;
  for (int j = 1; j < 500; ++j) {
    long double pn = ((2.0L * j + 1.0L) * (long double)x * pc - (long double)j * pm) / (long double)(j + 1);
    pm = pc;
    pc = pn;
  }
  const double oracle = (double)std::log(pc);
  CHECK(legendre_log(500, x) == doctest::Approx(oracle).epsilon(1e-12));
  // Laplace-Heine: log P_k ~ (k+1/2) log(x + sqrt(x^2-1)) - log sqrt(2 pi k) - (1/4) log(x^2-1)
  const double lh = (500.5) * std::log(x + 1.0) - 0.5 * std::log(2.0 * kPi * 500.0) - 0.25 * std::log(1.0);
  CHECK(std::abs(legendre_log(500, x) - lh) / std::abs(lh) < 0.005);
}

TEST_CASE("legendre_log survives k = 1e5 without overflow") {
  const double v = legendre_log(100000, 1.0 / std::cos(kPi / 4.0));
  CHECK(std::isfinite(v));
  CHECK(v > 80000.0);  // rate log(1+sqrt 2) ~ 0.8814 per index
}

TEST_CASE("rotated_norm_exact frozen examples") {
  CHECK(rotated_norm_exact(0.0, 7) == doctest::Approx(0.0));
  // theta = pi/3: (cos)^{-1/2} = sqrt(2), P_1(2) = 2 -> log(2 sqrt 2)
  CHECK(rotated_norm_exact(kPi / 3.0, 1) == doctest::Approx(std::log(2.0 * std::sqrt(2.0))).epsilon(1e-13));
  // theta = pi/4, k = 0: (1/4) log 2
  CHECK(rotated_norm_exact(kPi / 4.0, 0) == doctest::Approx(0.25 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("asymptotic vs exact: within 2% by k = 200 at theta = pi/4") {
  const double th = kPi / 4.0;
  const double ratio = std::exp(rotated_norm_exact(th, 200) - rotated_norm_asymptotic(th, 200));
  CHECK(std::abs(ratio - 1.0) < 0.02);
  CHECK_THROWS_AS(rotated_norm_asymptotic(0.0, 10), DomainError);
}

TEST_CASE("rate_limit closed forms") {
  CHECK(rate_limit(0.0) == doctest::Approx(0.0));
  CHECK(rate_limit(kPi / 4.0) == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-14));
  CHECK(rate_limit(kPi / 3.0) ==
        doctest::Approx(0.5 * std::log((2.0 + std::sqrt(3.0)) / (2.0 - std::sqrt(3.0)))).epsilon(1e-14));
}

TEST_CASE("exact series slope over [500, 1000] matches the rate to 0.1%") {
  ProjectionSeries all = exact_rotated_series(kPi / 4.0, 1000);
  ProjectionSeries tail;
  tail.source = all.source;
  for (const auto& e : all.entries)
    if (e.first >= 500) tail.entries.push_back(e);
  RateFit f = rate_fit(tail, RateLaw::linear_in_k);
  CHECK(std::abs(f.rate - std::log(1.0 + std::sqrt(2.0))) / std::log(1.0 + std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("numeric projection norms: self-adjoint case is flat") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.0}});
  DiscretizedOperator op = hermite_assemble(ho, 60);
  ProjectionSeries ps = numeric_projection_norms(op, 10);
  for (const auto& [k, ln] : ps.entries) CHECK(std::abs(ln) < 1e-10);
}

TEST_CASE("numeric projection norms match the exact formula at theta = pi/4") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  DiscretizedOperator op = hermite_assemble(ho, 160);
  ProjectionSeries ps = numeric_projection_norms(op, 10);
  for (const auto& [k, ln] : ps.entries) {
    const double exact = rotated_norm_exact(kPi / 4.0, k);
    CHECK(std::abs(ln - exact) / std::max(1.0, std::abs(exact)) < 1e-4);
  }
}

TEST_CASE("projection property: idempotent, mutually annihilating, norms >= 1") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.7}});
  DiscretizedOperator op = hermite_assemble(ho, 80);
  EigenSystem es = eigen_system(op);
  for (int k = 0; k < 4; ++k) {
    const cplx dk = es.left.col(k).dot(es.right.col(k));
    CMat Pk = es.right.col(k) * es.left.col(k).adjoint() / dk;
    CHECK((Pk * Pk - Pk).cwiseAbs().maxCoeff() < 1e-8);
    for (int l = 0; l < 4; ++l) {
      if (l == k) continue;
      const cplx dl = es.left.col(l).dot(es.right.col(l));
      CMat Pl = es.right.col(l) * es.left.col(l).adjoint() / dl;
      CHECK((Pk * Pl).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  ProjectionSeries ps = numeric_projection_norms(op, 8);
  for (const auto& [k, ln] : ps.entries) CHECK(ln >= -1e-12);
}

TEST_CASE("partial sums of projections blow up for theta != 0") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  DiscretizedOperator op = hermite_assemble(ho, 170);
  EigenSystem es = eigen_system(op);
  double prev = 0.0;
  for (int K = 4; K <= 30; K += 2) {
    const double cur = partial_sum_projection_norm(es, K);
    CHECK(cur >= prev * (1.0 - 1e-10));
    prev = cur;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("defective pair is reported, not silently mangled") {
  DiscretizedOperator op;
  op.N = 4;
  op.basis = BasisType::hermite;
  op.matrix = CMat::Zero(4, 4);
  op.matrix(0, 0) = 1.0;
  op.matrix(0, 1) = 1.0;
  op.matrix(1, 1) = 1.0;  // Jordan block at 1
  op.matrix(2, 2) = 3.0;
  op.matrix(3, 3) = 4.0;
  CHECK_THROWS_AS(numeric_projection_norms(op, 1), DefectivePair);
}

TEST_CASE("rate_fit input validation") {
  ProjectionSeries tiny;
  tiny.entries = {{0, 0.0}, {1, 1.0}};
  CHECK_THROWS_AS(rate_fit(tiny, RateLaw::linear_in_k), InsufficientData);
}
