#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pslab/discretize.hpp"
#include "pslab/errors.hpp"
#include "pslab/quadrature.hpp"
#include "pslab/resolvent.hpp"

using namespace pslab;

namespace {

OperatorModel position_only_model() {
  // a_0 = x with a vanishing-but-present derivative order so hermite_assemble
  // applies: use multiplication by x as a_0 and a_1 = 0? order >= 1 is
  // required, so express "multiplication by x" as the full model 0*d/dx + x.
  Poly a0{{cplx(0.0), cplx(1.0)}};
  Poly a1{{cplx(0.0)}};
  return make_custom_model({Coefficient::polynomial(a0), Coefficient::polynomial(a1)});
}

}  // namespace

TEST_CASE("hermite assembly: multiplication by x at N = 2") {
  DiscretizedOperator op = hermite_assemble(position_only_model(), 4);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(op.matrix(0, 1) - cplx(r, 0.0)) < 1e-15);
  CHECK(std::abs(op.matrix(1, 0) - cplx(r, 0.0)) < 1e-15);
  CHECK(std::abs(op.matrix(0, 0)) < 1e-15);
  // exact ladder image: [X]_{k,k+1} = sqrt((k+1)/2)
  CHECK(std::abs(op.matrix(2, 3) - cplx(std::sqrt(1.5), 0.0)) < 1e-15);
}

TEST_CASE("hermite assembly: oscillator diagonal 2k+1") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.0}});
  DiscretizedOperator op = hermite_assemble(ho, 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(op.matrix(k, k) - cplx(2.0 * k + 1.0, 0.0)) < 1e-13);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(op.matrix(i, j)) < 1e-13);
}

TEST_CASE("hermite assembly: shifted oscillator equals HO + 2iX - I") {
  OperatorModel sho = make_model(ModelKind::shifted_ho, {});
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.0}});
  const int N = 12;
  CMat A = hermite_assemble(sho, N).matrix;
  CMat H = hermite_assemble(ho, N).matrix;
  CMat X = hermite_assemble(position_only_model(), N).matrix;
  CMat B = H + cplx(0.0, 2.0) * X - CMat::Identity(N, N);
  CHECK((A - B).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("hermite assembly: swanson is real and matches the ladder form") {
  const double w = 2.0, al = 0.5, be = 0.25;
  OperatorModel sw = make_model(ModelKind::swanson, {{"omega", w}, {"alpha", al}, {"beta", be}});
  const int N = 30;
  CMat A = hermite_assemble(sw, N).matrix;
  CHECK(A.imag().cwiseAbs().maxCoeff() < 1e-12);
  // independent route: omega a* a + alpha a^2 + beta a*^2 + omega assembled
  // directly from a = d/dx + x and a* = -d/dx + x as padded ladder matrices
  const int Np = N + 4;
  RMat X = ladder_position(Np), D = ladder_derivative(Np);
  RMat a = X + D, c = X - D;
  RMat B = w * (c * a) + al * (a * a) + be * (c * c) + w * RMat::Identity(Np, Np);
  CHECK((A.real() - B.topLeftCorner(N, N)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("hermite assembly: bandwidth bound d + n") {
  OperatorModel cubic = make_model(ModelKind::cubic, {});
  const int N = 24;
  CMat A = hermite_assemble(cubic, N).matrix;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (std::abs(i - j) > 5) CHECK(std::abs(A(i, j)) < 1e-14);
}

TEST_CASE("commutator [d/dx, x] = I on the retained modes") {
  const int N = 40;
  CMat X = ladder_position(N).cast<cplx>();
  CMat D = ladder_derivative(N).cast<cplx>();
  CMat C = D * X - X * D;
  // the truncation corrupts only the last two modes
  CHECK((C.topLeftCorner(N - 2, N - 2) - CMat::Identity(N - 2, N - 2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("hermite assembly rejects non-polynomial coefficients") {
  OperatorModel pho = make_model(ModelKind::perturbed_ho, {{"epsilon", 0.3}});
  CHECK_THROWS_AS(hermite_assemble(pho, 16), UnsupportedCoefficients);
}

TEST_CASE("grid assembly: Dirichlet Laplacian on (0, pi)") {
  // -d^2/dx^2 with a2 = -1
  OperatorModel lap = make_custom_model({Coefficient::polynomial(Poly{{cplx(0.0)}}),
                                         Coefficient::polynomial(Poly{{cplx(0.0)}}),
                                         Coefficient::polynomial(Poly{{cplx(-1.0)}})});
  DiscretizedOperator op = grid_assemble(lap, 0.0, kPi, 200);
  CVec ev = eigenvalues_only(op);
  std::vector<double> re(ev.size());
  for (int i = 0; i < ev.size(); ++i) re[std::size_t(i)] = ev(i).real();
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(re[1] == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("grid assembly: advection-diffusion eigenvalues (pi k / L)^2 + 1/4") {
  OperatorModel ad = make_model(ModelKind::advection_diffusion, {{"L", kPi}});
  DiscretizedOperator op = grid_assemble(ad, 0.0, kPi, 400);
  CVec ev = eigenvalues_only(op);
  std::vector<double> re(ev.size());
  for (int i = 0; i < ev.size(); ++i) re[std::size_t(i)] = ev(i).real();
  std::sort(re.begin(), re.end());
  for (int k = 1; k <= 3; ++k)
    CHECK(re[std::size_t(k - 1)] == doctest::Approx(k * k + 0.25).epsilon(2e-4));
}

TEST_CASE("grid assembly: airy window translation adds i c exactly") {
  OperatorModel airy = make_model(ModelKind::airy, {});
  DiscretizedOperator a = grid_assemble(airy, -10.0, 10.0, 64);
  DiscretizedOperator b = grid_assemble(airy, -9.0, 11.0, 64);
  CHECK((b.matrix - a.matrix - cplx(0.0, 1.0) * CMat::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid assembly flags singular nodes") {
  OperatorModel pho = make_model(ModelKind::perturbed_ho, {{"epsilon", 0.5}});
  // 399 interior nodes on (-2, 2): x = +-1 are hit exactly
  CHECK_THROWS_AS(grid_assemble(pho, -2.0, 2.0, 399), SingularNode);
}

TEST_CASE("potential matrix elements: zero and x^2 consistency") {
  CMat Z = potential_matrix_elements([](double) { return cplx(0.0); }, 12);
  CHECK(Z.cwiseAbs().maxCoeff() < 1e-14);

  CMat Q = potential_matrix_elements([](double x) { return cplx(x * x, 0.0); }, 12);
  OperatorModel x2 = make_custom_model({Coefficient::polynomial(Poly{{cplx(0.0), cplx(0.0), cplx(1.0)}}),
                                        Coefficient::polynomial(Poly{{cplx(0.0)}})});
  CMat R = hermite_assemble(x2, 12).matrix;
  CHECK((Q - R).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("potential matrix elements: singular dipole pair") {
  auto W = [](double x) { return cplx(1.0 / std::sqrt(std::abs(x + 1.0)) - 1.0 / std::sqrt(std::abs(x - 1.0)), 0.0); };
  const int N = 10;
  CMat S = potential_matrix_elements(W, N, {-1.0, 1.0});
  // oracle: dense adaptive Gauss-Legendre panels between singular points,
  // u^2-substituted at the endpoints touching a singularity
  QuadRule gl = gauss_legendre(200);
  auto panel = [&](double a, double b, bool sing_left, bool sing_right) {
    RMat acc = RMat::Zero(N, N);
    // substitute away inverse-sqrt endpoints by splitting at the midpoint
    auto raw = [&](double lo, double hi) {
      QuadRule r = map_interval(gl, lo, hi);
      RMat phi = hermite_function_matrix(N - 1, r.nodes);
      RMat out = RMat::Zero(N, N);
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        out += r.weights[i] * W(r.nodes[i]).real() * (phi.col(int(i)) * phi.col(int(i)).transpose());
      return out;
    };
    auto subst = [&](double c, double half, int dir) {
      // int_c^{c+dir*half} f = int_0^{sqrt(half)} f(c + dir u^2) 2u du
      QuadRule r = map_interval(gl, 0.0, std::sqrt(half));
      std::vector<double> nodes(r.nodes.size());
      RMat out = RMat::Zero(N, N);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) nodes[i] = c + dir * r.nodes[i] * r.nodes[i];
      RMat phi = hermite_function_matrix(N - 1, nodes);
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        out += 2.0 * r.nodes[i] * r.weights[i] * W(nodes[i]).real() * (phi.col(int(i)) * phi.col(int(i)).transpose());
      return out;
    };
    const double mid = 0.5 * (a + b);
    acc += sing_left ? subst(a, mid - a, +1) : raw(a, mid);
    acc += sing_right ? subst(b, b - mid, -1) : raw(mid, b);
    return acc;
  };
  RMat oracle = RMat::Zero(N, N);
  oracle += panel(-14.0, -1.0, false, true);
  oracle += panel(-1.0, 1.0, true, true);
  oracle += panel(1.0, 14.0, true, false);
  CHECK((S.imag()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((S.real() - oracle).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("convergence check: oscillator converges, airy does not") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", kPi / 4.0}});
  ConvergenceQuantity q;
  q.kind = ConvergenceQuantity::Kind::eigenvalue;
  q.eigen_index = 0;
  ConvergenceReport rep = convergence_check(ho, q, {50, 100, 200}, 1e-10);
  CHECK(rep.converged);
  CHECK(rep.diffs.back() < 1e-10);

  OperatorModel airy = make_model(ModelKind::airy, {});
  ConvergenceReport rep2 = convergence_check(airy, q, {60, 120, 240}, 1e-10);
  CHECK(!rep2.converged);
}

TEST_CASE("matrix export round trip") {
  OperatorModel ho = make_model(ModelKind::rotated_ho, {{"theta", 0.5}});
  DiscretizedOperator op = hermite_assemble(ho, 8);
  std::stringstream ss;
  op.export_matrix(ss);
  CMat back = DiscretizedOperator::import_matrix(ss);
  CHECK((back - op.matrix).cwiseAbs().maxCoeff() == 0.0);
}
