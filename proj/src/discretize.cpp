#include "pslab/discretize.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pslab/errors.hpp"
#include "pslab/quadrature.hpp"
#include "pslab/resolvent.hpp"

namespace pslab {

bool DiscretizedOperator::is_tridiagonal() const {
  if (N <= 2) return true;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (std::abs(i - j) > 1 && matrix(i, j) != cplx(0.0)) return false;
  return true;
}

double DiscretizedOperator::norm_estimate() const {
  double m = 0.0;
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += std::abs(matrix(i, j));
    m = std::max(m, s);
  }
  return m;
}

DiscretizedOperator hermite_assemble(const OperatorModel& m, int N) {
  if (N < 4) throw Error("hermite_assemble: N >= 4 required");
  if (!m.polynomial_coefficients())
    throw UnsupportedCoefficients(
        "hermite_assemble requires polynomial coefficients; use potential_matrix_elements or grid_assemble");
  int max_deg = 0;
  for (const auto& c : m.coeffs) max_deg = std::max(max_deg, c.poly()->degree());
  const int order = m.order();
  const int pad = max_deg + order + 2;
  const int Np = N + pad;

  const CMat X = ladder_position(Np).cast<cplx>();
  const CMat D = ladder_derivative(Np).cast<cplx>();

  CMat H = CMat::Zero(Np, Np);
  CMat Dj = CMat::Identity(Np, Np);
  for (int j = 0; j <= order; ++j) {
    const Poly& p = *m.coeffs[std::size_t(j)].poly();
    // Horner in the matrix argument
    CMat M = CMat::Zero(Np, Np);
    for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
      if (it != p.c.rbegin()) M = M * X;
      M += *it * CMat::Identity(Np, Np);
    }
    H += M * Dj;
    if (j < order) Dj = D * Dj;
  }

  DiscretizedOperator op;
  op.matrix = H.topLeftCorner(N, N);
  op.basis = BasisType::hermite;
  op.N = N;
  op.model = std::make_shared<OperatorModel>(m);
  QuadRule q = gauss_hermite_modified(std::min(300, 2 * N));
  op.qnodes = q.nodes;
  op.qweights = q.weights;
  return op;
}

DiscretizedOperator grid_assemble(const OperatorModel& m, double a, double b, int N) {
  if (!(a < b)) throw Error("grid_assemble: a < b required");
  if (N < 8) throw Error("grid_assemble: N >= 8 required");
  if (m.order() > 2) throw UnsupportedCoefficients("grid_assemble supports order <= 2");
  const double dx = (b - a) / double(N + 1);
  DiscretizedOperator op;
  op.matrix = CMat::Zero(N, N);
  op.basis = BasisType::grid;
  op.N = N;
  op.a = a;
  op.b = b;
  op.model = std::make_shared<OperatorModel>(m);
  op.qnodes.resize(std::size_t(N));
  op.qweights.assign(std::size_t(N), dx);
  for (int i = 0; i < N; ++i) {
    const double x = a + dx * double(i + 1);
    op.qnodes[std::size_t(i)] = x;
    cplx a0(0.0), a1(0.0), a2(0.0);
    try {
      a0 = m.coeffs[0](cplx(x, 0.0));
      if (m.order() >= 1) a1 = m.coeffs[1](cplx(x, 0.0));
      if (m.order() >= 2) a2 = m.coeffs[2](cplx(x, 0.0));
    } catch (const std::exception& e) {
      throw SingularNode("grid_assemble: coefficient not finite at node x = " + std::to_string(x) + " (" +
                         e.what() + ")");
    }
    if (!std::isfinite(std::abs(a0)) || !std::isfinite(std::abs(a1)) || !std::isfinite(std::abs(a2)))
      throw SingularNode("grid_assemble: coefficient not finite at node x = " + std::to_string(x));
    op.matrix(i, i) = a0 - 2.0 * a2 / (dx * dx);
    if (i + 1 < N) op.matrix(i, i + 1) = a2 / (dx * dx) + a1 / (2.0 * dx);
    if (i - 1 >= 0) op.matrix(i, i - 1) = a2 / (dx * dx) - a1 / (2.0 * dx);
  }
  return op;
}

CMat potential_matrix_elements(const std::function<cplx(double)>& V, int N,
                               const std::vector<double>& singular_points) {
  std::vector<double> sing = singular_points;
  std::sort(sing.begin(), sing.end());
  for (std::size_t i = 1; i < sing.size(); ++i)
    if (sing[i] - sing[i - 1] < 1.0)
      throw QuadratureFailure("potential_matrix_elements: singular windows of half-width 0.5 overlap");

  auto accumulate = [&](CMat& A, const std::vector<double>& nodes, const std::vector<cplx>& wts) {
    RMat phi = hermite_function_matrix(N - 1, nodes);
    CVec w(int(nodes.size()));
    for (int i = 0; i < int(nodes.size()); ++i) w(i) = wts[std::size_t(i)];
    A += phi.cast<cplx>() * w.asDiagonal() * phi.transpose().cast<cplx>();
  };

  auto eval_smooth = [&](int n_nodes) -> CMat {
    QuadRule gh = gauss_hermite_modified(n_nodes);
    std::vector<cplx> wts(gh.nodes.size());
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) wts[i] = V(gh.nodes[i]) * gh.weights[i];
    CMat A = CMat::Zero(N, N);
    accumulate(A, gh.nodes, wts);
    return A;
  };

  auto eval_windows = [&](int q) -> CMat {
    // Hermite-function mass is below 1e-20 past sqrt(2N+1) + 8 for N <= 60
    const double X = std::sqrt(2.0 * N + 1.0) + 8.0;
    CMat A = CMat::Zero(N, N);
    QuadRule gl = gauss_legendre(q);

    // windows: int_0^{sqrt(1/2)} V(c +- u^2) h h 2u du absorbs the
    // inverse-sqrt singularity exactly
    for (double c : sing) {
      QuadRule u = map_interval(gl, 0.0, std::sqrt(0.5));
      std::vector<double> nodes;
      std::vector<cplx> wts;
      for (int side : {-1, 1})
        for (std::size_t i = 0; i < u.nodes.size(); ++i) {
          const double uu = u.nodes[i];
          nodes.push_back(c + side * uu * uu);
          wts.push_back(V(c + side * uu * uu) * 2.0 * uu * u.weights[i]);
        }
      accumulate(A, nodes, wts);
    }

    // complement: analytic integrand, composite panels of width <= 1
    std::vector<double> brk = {-X};
    for (double c : sing) {
      brk.push_back(c - 0.5);
      brk.push_back(c + 0.5);
    }
    brk.push_back(X);
    for (std::size_t seg = 0; seg + 1 < brk.size(); seg += 2) {
      const double lo = brk[seg], hi = brk[seg + 1];
      if (hi <= lo) continue;
      const int panels = std::max(1, int(std::ceil(hi - lo)));
      std::vector<double> nodes;
      std::vector<cplx> wts;
      for (int pnl = 0; pnl < panels; ++pnl) {
        const double pa = lo + (hi - lo) * double(pnl) / double(panels);
        const double pb = lo + (hi - lo) * double(pnl + 1) / double(panels);
        QuadRule r = map_interval(gl, pa, pb);
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
          nodes.push_back(r.nodes[i]);
          wts.push_back(V(r.nodes[i]) * r.weights[i]);
        }
      }
      accumulate(A, nodes, wts);
    }
    return A;
  };

  if (sing.empty()) {
    int n = std::max(160, 4 * N);
    CMat prev = eval_smooth(n);
    while (true) {
      const int n2 = std::min(2 * n, 320);
      if (n2 == n)
        throw QuadratureFailure("potential_matrix_elements: Gauss-Hermite budget exceeded before 1e-10");
      CMat cur = eval_smooth(n2);
      if ((cur - prev).cwiseAbs().maxCoeff() < 5e-11) return cur;
      prev = cur;
      n = n2;
    }
  }
  int q = 32;
  CMat prev = eval_windows(q);
  while (true) {
    const int q2 = 2 * q;
    if (q2 > 256)
      throw QuadratureFailure("potential_matrix_elements: panel budget exceeded before reaching 1e-10");
    CMat cur = eval_windows(q2);
    if ((cur - prev).cwiseAbs().maxCoeff() < 5e-11) return cur;
    prev = cur;
    q = q2;
  }
}

ConvergenceReport convergence_check(const OperatorModel& m, const ConvergenceQuantity& q,
                                    const std::vector<int>& N_sequence, double tol) {
  if (N_sequence.size() < 3) throw Error("convergence_check: need at least 3 sizes");
  for (std::size_t i = 1; i < N_sequence.size(); ++i)
    if (N_sequence[i] <= N_sequence[i - 1]) throw Error("convergence_check: N_sequence must increase");
  ConvergenceReport rep;
  rep.Ns = N_sequence;
  for (int N : N_sequence) {
    DiscretizedOperator op = m.polynomial_coefficients() ? hermite_assemble(m, N)
                                                         : grid_assemble(m, -40.0, 40.0, N);
    if (q.kind == ConvergenceQuantity::Kind::eigenvalue) {
      CVec ev = eigenvalues_only(op);
      std::vector<cplx> evs(ev.data(), ev.data() + ev.size());
      std::sort(evs.begin(), evs.end(), [](cplx p, cplx r) { return p.real() < r.real(); });
      rep.values.push_back(evs[std::size_t(q.eigen_index)]);
    } else {
      rep.values.push_back(cplx(resolvent_norm(op, q.z), 0.0));
    }
  }
  for (std::size_t i = 1; i < rep.values.size(); ++i)
    rep.diffs.push_back(std::abs(rep.values[i] - rep.values[i - 1]));
  rep.converged = !rep.diffs.empty() && rep.diffs.back() < tol;
  return rep;
}

DiscretizedOperator assemble_default(const OperatorModel& m) {
  if (m.polynomial_coefficients()) return hermite_assemble(m, 400);
  if (m.kind == ModelKind::advection_diffusion) {
    const double L = m.params.at("L");
    return grid_assemble(m, 0.0, L, 1500);
  }
  return grid_assemble(m, -40.0, 40.0, 1500);
}

void DiscretizedOperator::export_matrix(std::ostream& os) const {
  os << "%%MatrixMarket matrix array complex general\n";
  os << N << " " << N << "\n";
  char buf[80];
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", matrix(i, j).real(), matrix(i, j).imag());
      os << buf;
    }
}

CMat DiscretizedOperator::import_matrix(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header.find("MatrixMarket") == std::string::npos) throw Error("import_matrix: bad header");
  int rows = 0, cols = 0;
  is >> rows >> cols;
  CMat A(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      double re = 0.0, im = 0.0;
      is >> re >> im;
      A(i, j) = cplx(re, im);
    }
  return A;
}

nlohmann::json DiscretizedOperator::quadrature_json() const {
  nlohmann::json j;
  j["basis"] = basis == BasisType::hermite ? "hermite" : "grid";
  j["N"] = N;
  if (basis == BasisType::grid) {
    j["a"] = a;
    j["b"] = b;
  }
  j["nodes"] = qnodes;
  j["weights"] = qweights;
  return j;
}

}  // namespace pslab
