#include <doctest.h>

#include <cmath>

#include "pslab/discretize.hpp"
#include "pslab/errors.hpp"
#include "pslab/instability.hpp"
#include "pslab/pseudomode.hpp"

using namespace pslab;

namespace {

const cplx I(0.0, 1.0);

std::function<cplx(cplx)> airy_V() {
  return [](cplx x) { return I * x; };
}
std::function<cplx(cplx)> airy_dV() {
  return [](cplx) { return I; };
}
std::function<cplx(cplx)> rot_V() {
  return [](cplx x) { return I * x * x; };
}
std::function<cplx(cplx)> rot_dV() {
  return [](cplx x) { return 2.0 * I * x; };
}

}  // namespace

TEST_CASE("phase_build: airy at z = 1 has phi''(0) = i/2") {
  PhaseRecord pr = phase_build(airy_V(), airy_dV(), cplx(1.0, 0.0), 0.0, -0.8, 0.8);
  CHECK(std::abs(pr.ddphi_x0 - cplx(0.0, 0.5)) < 1e-12);
  CHECK(pr.sign == -1);
  CHECK(std::abs(pr.dphi.eval(0.0) - cplx(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(pr.phi.eval(0.0)) < 1e-13);
  // eikonal residual on a dense grid
  for (double x : ChebSeries::lobatto_points(64, -0.8, 0.8)) {
    const cplx d = pr.dphi.eval(x);
    CHECK(std::abs(d * d + I * x - 1.0) < 1e-10);
  }
}

TEST_CASE("phase_build: reduced rotated oscillator center values") {
  PhaseRecord pr = phase_build(rot_V(), rot_dV(), cplx(0.5, 1.0), 1.0, 0.2, 1.8);
  CHECK(std::abs(pr.dphi.eval(1.0) - cplx(-std::sqrt(0.5), 0.0)) < 1e-11);
  CHECK(pr.sign == -1);  // Im V'(1) = 2 > 0
  CHECK(pr.ddphi_x0.imag() > 0.0);
}

TEST_CASE("phase_build rejections") {
  // center mismatch: Im(z - V(x0)) too large
  CHECK_THROWS_AS(phase_build(rot_V(), rot_dV(), cplx(0.5, 1.0), 1.1, 0.3, 1.9), CenterMismatch);
  // Re(z - V) <= 0 on the interval (real potential, z below the max)
  auto V = [](cplx x) { return x * x; };
  auto dV = [](cplx x) { return 2.0 * x; };
  CHECK_THROWS_AS(phase_build(V, dV, cplx(0.25, 0.0), 0.0, -1.2, 1.2, {}), BranchFailure);
  // real potential with forced sign: phase purely real, decay invariant violated
  PhaseOptions force;
  force.force_sign = -1;
  CHECK_THROWS_AS(phase_build(V, dV, cplx(4.0, 0.0), 0.0, -0.8, 0.8, force), DecayViolated);
}

TEST_CASE("transport amplitudes: constant phase gives a0 = 1 and nothing else") {
  auto V = [](cplx) { return cplx(0.0); };
  auto dV = [](cplx) { return cplx(0.0); };
  PhaseOptions force;
  force.force_sign = -1;
  // z = 1, V = 0: phi' = -1 (linear phase); decay fails, so build the phase
  // pieces directly through a record with continuation allowed
  force.allow_continuation = true;
  PhaseRecord pr;
  bool threw = false;
  try {
    pr = phase_build(V, dV, cplx(1.0, 0.0), 0.0, -2.0, 2.0, force);
  } catch (const DecayViolated&) {
    threw = true;  // expected: no decay for a real linear phase
  }
  CHECK(threw);
  // build the record by hand for the amplitude recursion test
  pr.x0 = 0.0;
  pr.a = -2.0;
  pr.b = 2.0;
  pr.z = 1.0;
  pr.sign = -1;
  pr.V = V;
  pr.dV = dV;
  pr.dphi = ChebSeries::fit([](double) { return cplx(-1.0, 0.0); }, -2.0, 2.0, 8);
  pr.sqrt_dphi = ChebSeries::fit([](double) { return std::sqrt(cplx(-1.0, 0.0)); }, -2.0, 2.0, 8);
  pr.phi = ChebSeries::fit([](double x) { return cplx(-x, 0.0); }, -2.0, 2.0, 8);
  pr.min_abs_dphi = 1.0;
  auto amps = transport_amplitudes(pr, 3);
  REQUIRE(amps.size() == 4);
  for (double x : {-1.5, 0.0, 1.2}) {
    CHECK(std::abs(amps[0].eval(x) - cplx(1.0, 0.0)) < 1e-13);
    for (int j = 1; j <= 3; ++j) CHECK(std::abs(amps[std::size_t(j)].eval(x)) < 1e-13);
  }
}

TEST_CASE("transport amplitudes: airy initialization and nontriviality") {
  PhaseRecord pr = phase_build(airy_V(), airy_dV(), cplx(1.0, 0.0), 0.0, -0.8, 0.8);
  auto amps = transport_amplitudes(pr, 2);
  CHECK(std::abs(amps[0].eval(0.0) - cplx(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(amps[1].eval(0.0)) < 1e-12);
  CHECK(std::abs(amps[2].eval(0.0)) < 1e-12);
  CHECK(std::abs(amps[1].eval(0.5)) > 1e-4);
}

TEST_CASE("truncation order arithmetic and monotonicity") {
  // linear phase over a wide analytic window: C1 = max(1, (2/R0) * 1) = 1 at R0 = 2
  auto V = [](cplx) { return cplx(0.0); };
  auto dV = [](cplx) { return cplx(0.0); };
  PhaseRecord pr;
  pr.x0 = 0.0;
  pr.a = -3.0;
  pr.b = 3.0;
  pr.z = 1.0;
  pr.sign = -1;
  pr.V = V;
  pr.dV = dV;
  pr.dphi = ChebSeries::fit([](double) { return cplx(-1.0, 0.0); }, -3.0, 3.0, 8);
  CHECK(truncation_order(pr, 1.0 / 27.0, 2.0) == 9);
  const int n1 = truncation_order(pr, 1e-2, 2.0);
  const int n2 = truncation_order(pr, 2e-2, 2.0);
  CHECK(std::abs(n1 - 2 * n2) <= 1);
  // analyticity window violation: airy phase z - V vanishes at x = -i,
  // distance 1 from the center
  PhaseRecord pa = phase_build(airy_V(), airy_dV(), cplx(1.0, 0.0), 0.0, -0.8, 0.8);
  CHECK_THROWS_AS(truncation_order(pa, 1e-2, 1.5), Error);
}

TEST_CASE("cutoff: plateau, support, ordering") {
  Cutoff chi = cutoff_build(0.4, 1.6, 0.2, 1.8);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(0.4) == 1.0);
  CHECK(chi(0.1) == 0.0);
  CHECK(chi(1.9) == 0.0);
  CHECK(chi(0.3) > 0.0);
  CHECK(chi(0.3) < 1.0);
  CHECK(chi(1.7) > 0.0);
  CHECK(chi(1.7) < 1.0);
  CHECK_THROWS_AS(cutoff_build(1.6, 0.4, 0.2, 1.8), OrderingViolated);
}

TEST_CASE("certifier on an exact eigenfunction: Gaussian ground state") {
  // u = chi e^{i phi} with phi = i x^2 / 2 is the oscillator ground state up to
  // normalization; (H - 1)u = 0 away from the far-out cutoff ramps
  PhaseRecord pr;
  pr.x0 = 0.0;
  pr.a = -10.0;
  pr.b = 10.0;
  pr.z = 1.0;
  pr.sign = -1;
  pr.V = [](cplx x) { return x * x; };
  pr.dV = [](cplx x) { return 2.0 * x; };
  pr.phi = ChebSeries::fit([](double x) { return cplx(0.0, 0.5 * x * x); }, -10.0, 10.0, 64);
  pr.dphi = ChebSeries::fit([](double x) { return cplx(0.0, x); }, -10.0, 10.0, 64);
  pr.min_abs_dphi = 0.0;
  std::vector<ChebSeries> amps = {ChebSeries::fit([](double) { return cplx(1.0, 0.0); }, -10.0, 10.0, 4)};
  Pseudomode pm = assemble_and_certify(pr, amps, cutoff_build(-8.0, 8.0, -10.0, 10.0), 1.0);
  // the double-precision certifier floors near 5e-12 on exact eigenfunctions
  CHECK(pm.residual < 1e-11);
}

TEST_CASE("rotated oscillator reproduction: residual near 2.5041e-4") {
  OperatorModel m = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  PseudomodeRequest req;
  req.z = std::exp(-I * kPi / 4.0) * cplx(0.5, 1.0);
  req.h = std::pow(2.0, -5.0);
  req.terms = 7;
  Pseudomode pm = build_pseudomode(m, req);
  CHECK(pm.x0 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(pm.cutoff.s1 == doctest::Approx(0.2));
  CHECK(pm.cutoff.p1 == doctest::Approx(0.4));
  CHECK(pm.cutoff.p2 == doctest::Approx(1.6));
  CHECK(pm.cutoff.s2 == doctest::Approx(1.8));
  MESSAGE("rotated 7.9 residual = ", pm.residual);
  CHECK(pm.residual > 2.5041e-4 / 3.0);
  CHECK(pm.residual < 2.5041e-4 * 3.0);
}

TEST_CASE("shifted oscillator reproduction: residual near 2.0290e-3") {
  const double h = std::pow(2.0, -8.0);
  const cplx z = cplx(2.0 - h, 2.0 * std::sqrt(h));
  Pseudomode pm = shifted_rescaled_pseudomode(h, z, 3);
  CHECK(pm.x0 == doctest::Approx(1.0).epsilon(1e-12));
  MESSAGE("shifted 7.9 residual = ", pm.residual);
  CHECK(pm.residual > 2.0290e-3 / 3.0);
  CHECK(pm.residual < 2.0290e-3 * 3.0);
  // the decay scale weakens to sqrt(h): Im phi''(y0) ~ sqrt(h)
  CHECK(pm.ddphi_x0.imag() > 0.2 * std::sqrt(h));
  CHECK(pm.ddphi_x0.imag() < 5.0 * std::sqrt(h));
}

TEST_CASE("shifted theorem variant: normalization and parabola guard") {
  CHECK_THROWS_AS(shifted_pseudomode(cplx(100.0, 25.0), 0.1, 3), OutsideParabola);
  Pseudomode pm = shifted_pseudomode(cplx(100.0, 10.0), 0.1, 3);
  CHECK(pm.h == doctest::Approx(0.01));
  CHECK(pm.x0 == doctest::Approx(0.5));  // y0 = t / (2 sqrt h)
  CHECK(pm.residual < 0.05);
  CHECK(pm.residual > 0.0);
}

TEST_CASE("shifted decay trend: log residual linear in sqrt(Re z)") {
  std::vector<double> x, y;
  for (double rez : {25.0, 100.0, 400.0}) {
    Pseudomode pm = shifted_pseudomode(cplx(rez, 0.0), 0.1, 3);
    x.push_back(std::sqrt(rez));
    y.push_back(std::log(pm.residual));
  }
  LinearFit f = linear_fit(x, y);
  CHECK(f.slope < 0.0);
  CHECK(f.r_squared > 0.97);
}

TEST_CASE("conjugation identity: e^{-i phi/h}(H-z)e^{i phi/h} A = -h^{J+2} a_J''") {
  // in conjugated variables the left side is -h^2 A'' - i h (2 phi' A' + phi'' A)
  // with A = sum h^j a_j; everything is smooth, so the telescoping of the
  // transport equations is checkable at 1e-6 relative
  OperatorModel m = make_model(ModelKind::airy, {});
  const double h = 1.0 / 8.0;
  const int J = 3;
  PhaseRecord pr = phase_build([](cplx x) { return I * x; }, [](cplx) { return I; }, cplx(1.0, 0.0), 0.0,
                               -0.8, 0.8);
  auto amps = transport_amplitudes(pr, J);
  ChebSeries A = amps[0];
  double hp = 1.0;
  for (int j = 1; j <= J; ++j) {
    hp *= h;
    ChebSeries term = amps[std::size_t(j)];
    term *= hp;
    A = A + term;
  }
  ChebSeries Ap = A.derivative(), App = Ap.derivative();
  ChebSeries ddphi = pr.dphi.derivative();
  ChebSeries aJpp = amps[std::size_t(J)].derivative().derivative();
  double scale = 0.0;
  auto pts = ChebSeries::lobatto_points(48, -0.6, 0.6);
  for (double x : pts) scale = std::max(scale, std::abs(std::pow(h, J + 2) * aJpp.eval(x)));
  for (double x : pts) {
    const cplx lhs = -h * h * App.eval(x) -
                     I * h * (2.0 * pr.dphi.eval(x) * Ap.eval(x) + ddphi.eval(x) * A.eval(x));
    const cplx rhs = -std::pow(h, J + 2) * aJpp.eval(x);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * scale);
  }
}

TEST_CASE("matrix cross-check: hermite projection reproduces the residual") {
  OperatorModel m = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  const double h = 1.0 / 8.0;
  PseudomodeRequest req;
  req.z = std::exp(-I * kPi / 4.0) * cplx(0.5, 1.0);
  req.h = h;
  req.terms = 4;
  Pseudomode pm = build_pseudomode(m, req);

  // the mollifier's Gevrey corners give the Hermite tail only root-exponential
  // decay, so the basis must be generous relative to the oscillation count
  OperatorModel mh = reduced_semiclassical_model(m, h);
  DiscretizedOperator op = hermite_assemble(mh, 400);
  CVec c = project_to_hermite(pm, 400);
  const cplx z_red = pm.z;
  const double matrix_residual = (op.matrix * c - z_red * c).norm() / c.norm();
  CHECK(std::abs(matrix_residual / pm.residual - 1.0) < 0.10);
  // pseudoeigenvalue consequence: the resolvent at z exceeds 1/residual
  const double rn = resolvent_norm(op, z_red);
  CHECK(rn >= 1.0 / (1.1 * pm.residual));
}

TEST_CASE("residual scan: rotated decay is linear in 1/h") {
  OperatorModel m = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  std::vector<double> hs = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0};
  // residual-minimizing truncation per h (terms = 0)
  ResidualScan scan = residual_scan(m, [](double) { return cplx(0.5, 1.0); }, hs, 0, ScanLaw::inv_h);
  REQUIRE(scan.rows.size() == 4);
  CHECK(scan.has_fit);
  CHECK(scan.fit.slope < 0.0);
  CHECK(scan.fit.r_squared > 0.99);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) CHECK(scan.rows[i].residual < scan.rows[i - 1].residual);
  // single h: table only
  ResidualScan one = residual_scan(m, [](double) { return cplx(0.5, 1.0); }, {1.0 / 8.0}, 3, ScanLaw::inv_h);
  CHECK(one.rows.size() == 1);
  CHECK(!one.has_fit);
}
