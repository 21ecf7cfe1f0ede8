#include "pslab/resolvent.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"

namespace pslab {

double PseudospectrumGrid::re_at(int j) const {
  return n_re == 1 ? region.re_min
                   : region.re_min + (region.re_max - region.re_min) * double(j) / double(n_re - 1);
}

double PseudospectrumGrid::im_at(int i) const {
  return n_im == 1 ? region.im_min
                   : region.im_min + (region.im_max - region.im_min) * double(i) / double(n_im - 1);
}

double PseudospectrumGrid::value_at(double re, double im) const {
  const double fx = (re - region.re_min) / (region.re_max - region.re_min) * double(n_re - 1);
  const double fy = (im - region.im_min) / (region.im_max - region.im_min) * double(n_im - 1);
  const int j0 = std::clamp(int(std::floor(fx)), 0, n_re - 2);
  const int i0 = std::clamp(int(std::floor(fy)), 0, n_im - 2);
  const double tx = std::clamp(fx - j0, 0.0, 1.0);
  const double ty = std::clamp(fy - i0, 0.0, 1.0);
  return (1 - ty) * ((1 - tx) * values(i0, j0) + tx * values(i0, j0 + 1)) +
         ty * ((1 - tx) * values(i0 + 1, j0) + tx * values(i0 + 1, j0 + 1));
}

namespace {

// LAPACK-style tridiagonal LU with partial pivoting (zgttrf/zgtts2).
struct TriLU {
  int n = 0;
  std::vector<cplx> dl, d, du, du2;
  std::vector<int> piv;

  void factor(std::vector<cplx> sub, std::vector<cplx> diag, std::vector<cplx> sup) {
    n = int(diag.size());
    dl = std::move(sub);
    d = std::move(diag);
    du = std::move(sup);
    du2.assign(std::size_t(std::max(0, n - 2)), cplx(0.0));
    piv.assign(std::size_t(n), 0);
    for (int i = 0; i < n - 1; ++i) {
      piv[std::size_t(i)] = i;
      if (std::abs(d[std::size_t(i)]) >= std::abs(dl[std::size_t(i)])) {
        if (d[std::size_t(i)] != cplx(0.0)) {
          const cplx fact = dl[std::size_t(i)] / d[std::size_t(i)];
          dl[std::size_t(i)] = fact;
          d[std::size_t(i) + 1] -= fact * du[std::size_t(i)];
        }
      } else {
        const cplx fact = d[std::size_t(i)] / dl[std::size_t(i)];
        d[std::size_t(i)] = dl[std::size_t(i)];
        dl[std::size_t(i)] = fact;
        const cplx tmp = du[std::size_t(i)];
        du[std::size_t(i)] = d[std::size_t(i) + 1];
        d[std::size_t(i) + 1] = tmp - fact * d[std::size_t(i) + 1];
        if (i < n - 2) {
          du2[std::size_t(i)] = du[std::size_t(i) + 1];
          du[std::size_t(i) + 1] = -fact * du[std::size_t(i) + 1];
        }
        piv[std::size_t(i)] = i + 1;
      }
    }
    // keep solves finite when (A - z) is numerically singular
    const double tiny = 1e-300;
    for (int i = 0; i < n; ++i)
      if (std::abs(d[std::size_t(i)]) < tiny) d[std::size_t(i)] = cplx(tiny, 0.0);
  }

  void solve(CVec& b) const {
    for (int i = 0; i < n - 1; ++i) {
      if (piv[std::size_t(i)] == i) {
        b(i + 1) -= dl[std::size_t(i)] * b(i);
      } else {
        const cplx tmp = b(i);
        b(i) = b(i + 1);
        b(i + 1) = tmp - dl[std::size_t(i)] * b(i);
      }
    }
    b(n - 1) /= d[std::size_t(n) - 1];
    if (n >= 2) b(n - 2) = (b(n - 2) - du[std::size_t(n) - 2] * b(n - 1)) / d[std::size_t(n) - 2];
    for (int i = n - 3; i >= 0; --i)
      b(i) = (b(i) - du[std::size_t(i)] * b(i + 1) - du2[std::size_t(i)] * b(i + 2)) / d[std::size_t(i)];
  }
};

struct TriDiagonals {
  std::vector<cplx> sub, diag, sup;
};

TriDiagonals extract_tridiagonals(const CMat& A) {
  const int n = int(A.rows());
  TriDiagonals t;
  t.diag.resize(std::size_t(n));
  t.sub.resize(std::size_t(n) - 1);
  t.sup.resize(std::size_t(n) - 1);
  for (int i = 0; i < n; ++i) t.diag[std::size_t(i)] = A(i, i);
  for (int i = 0; i < n - 1; ++i) {
    t.sub[std::size_t(i)] = A(i + 1, i);
    t.sup[std::size_t(i)] = A(i, i + 1);
  }
  return t;
}

// Deterministic pseudo-random unit vector; mixing a slice of it into the warm
// start keeps the iteration from stalling when the dominant singular direction
// switches branches between neighboring grid nodes.
CVec fresh_start_vector(int n) {
  CVec v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  auto next = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state >> 11) / double(1ull << 53) - 0.5;
  };
  for (int i = 0; i < n; ++i) v(i) = cplx(next(), next());
  return v / v.norm();
}

// Lanczos iteration on M = (A^H A)^{-1} given solvers for A and A^H; returns
// sigma_min = 1/sqrt(lambda_max(M)) with 1e-8 relative tolerance. Lanczos
// handles the clustered-singular-value nodes where plain power iteration
// stagnates; full reorthogonalization keeps the small Krylov basis clean.
template <class SolveA, class SolveAH>
double gram_inverse_iteration(int n, const SolveA& solve_a, const SolveAH& solve_ah, CVec* warm) {
  auto apply_M = [&](const CVec& x) {
    CVec t = x;
    solve_ah(t);
    CVec s = t;
    solve_a(s);
    return s;
  };
  CVec fresh = fresh_start_vector(n);
  CVec v0;
  if (warm && warm->size() == n && warm->allFinite() && warm->norm() > 0.0) {
    v0 = *warm / warm->norm() + 0.05 * fresh;
    v0 /= v0.norm();
  } else {
    v0 = fresh;
  }

  const int max_steps = std::min(n, 80);
  std::vector<CVec> basis;
  basis.reserve(std::size_t(max_steps));
  std::vector<double> alpha, beta;
  basis.push_back(v0);
  double lam = 0.0;
  for (int k = 0; k < max_steps; ++k) {
    CVec w = apply_M(basis[std::size_t(k)]);
    if (!w.allFinite()) return 0.0;  // effectively singular
    const double a = std::real(basis[std::size_t(k)].dot(w));
    alpha.push_back(a);
    w -= a * basis[std::size_t(k)];
    if (k > 0) w -= beta[std::size_t(k) - 1] * basis[std::size_t(k) - 1];
    for (const CVec& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();

    // top Ritz pair of the tridiagonal section; |b| * |last component| bounds
    // the eigenpair residual, which in turn bounds the eigenvalue error
    double y_last = 1.0;
    {
      const int m = int(alpha.size());
      RMat T = RMat::Zero(m, m);
      for (int i = 0; i < m; ++i) T(i, i) = alpha[std::size_t(i)];
      for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[std::size_t(i)];
      Eigen::SelfAdjointEigenSolver<RMat> es(T);
      lam = es.eigenvalues()(m - 1);
      y_last = std::abs(es.eigenvectors()(m - 1, m - 1));
    }
    if (!(lam > 0.0) || !std::isfinite(lam)) return 0.0;
    if (b * y_last <= 1e-9 * lam) break;
    if (b <= 1e-14 * std::abs(a) || k + 1 == max_steps) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }

  if (warm) {
    // Ritz vector for the top eigenvalue seeds the neighboring node
    const int m = int(alpha.size());
    RMat T = RMat::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[std::size_t(i)];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[std::size_t(i)];
    Eigen::SelfAdjointEigenSolver<RMat> es(T);
    CVec ritz = CVec::Zero(n);
    for (int i = 0; i < m; ++i) ritz += es.eigenvectors()(i, m - 1) * basis[std::size_t(i)];
    *warm = ritz;
  }
  return 1.0 / std::sqrt(lam);
}

}  // namespace

struct SigmaMinSweeper::Impl {
  enum class Path { tridiag, schur } path;
  int n = 0;
  double scale = 1.0;  // ||H|| estimate for the singularity floor
  // tridiag path
  TriDiagonals tri;
  // schur path
  CMat T;
  CVec eigs;
  CMat dense;  // original matrix kept for the dense eigen fallback

  double sigma_min(cplx z, CVec* warm) const {
    if (path == Path::tridiag) {
      TriLU lu_a, lu_ah;
      {
        TriDiagonals s = tri;
        for (auto& dd : s.diag) dd -= z;
        lu_a.factor(s.sub, s.diag, s.sup);
        TriDiagonals sh;
        sh.diag.resize(s.diag.size());
        sh.sub.resize(s.sub.size());
        sh.sup.resize(s.sup.size());
        for (std::size_t i = 0; i < s.diag.size(); ++i) sh.diag[i] = std::conj(s.diag[i]);
        for (std::size_t i = 0; i < s.sub.size(); ++i) {
          sh.sub[i] = std::conj(s.sup[i]);
          sh.sup[i] = std::conj(s.sub[i]);
        }
        lu_ah.factor(sh.sub, sh.diag, sh.sup);
      }
      return gram_inverse_iteration(
          n, [&](CVec& b) { lu_a.solve(b); }, [&](CVec& b) { lu_ah.solve(b); }, warm);
    }
    // triangular solves with T - z
    auto solve_upper = [&](CVec& b) {
      for (int i = n - 1; i >= 0; --i) {
        cplx s = b(i);
        for (int j = i + 1; j < n; ++j) s -= T(i, j) * b(j);
        cplx dii = T(i, i) - z;
        if (std::abs(dii) < 1e-300) dii = cplx(1e-300, 0.0);
        b(i) = s / dii;
      }
    };
    auto solve_lower_adj = [&](CVec& b) {
      for (int i = 0; i < n; ++i) {
        cplx s = b(i);
        for (int j = 0; j < i; ++j) s -= std::conj(T(j, i)) * b(j);
        cplx dii = std::conj(T(i, i) - z);
        if (std::abs(dii) < 1e-300) dii = cplx(1e-300, 0.0);
        b(i) = s / dii;
      }
    };
    return gram_inverse_iteration(n, solve_upper, solve_lower_adj, warm);
  }
};

SigmaMinSweeper::SigmaMinSweeper(const DiscretizedOperator& op) : impl_(new Impl) {
  impl_->n = op.N;
  impl_->scale = op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  if (op.basis == BasisType::grid && op.is_tridiagonal()) {
    impl_->path = Impl::Path::tridiag;
    impl_->tri = extract_tridiagonals(op.matrix);
    impl_->dense = op.matrix;
  } else {
    impl_->path = Impl::Path::schur;
    Eigen::ComplexSchur<CMat> schur(op.matrix, false);
    if (schur.info() != Eigen::Success) throw ConvergenceFailure("SigmaMinSweeper: Schur decomposition failed");
    impl_->T = schur.matrixT();
    impl_->eigs = impl_->T.diagonal();
  }
}

SigmaMinSweeper::~SigmaMinSweeper() = default;
SigmaMinSweeper::SigmaMinSweeper(SigmaMinSweeper&&) noexcept = default;

double SigmaMinSweeper::sigma_min(cplx z, CVec* warm) const { return impl_->sigma_min(z, warm); }

double SigmaMinSweeper::norm_scale() const { return impl_->scale; }

CVec SigmaMinSweeper::eigenvalues() const {
  if (impl_->path == Impl::Path::schur) return impl_->eigs;
  Eigen::ComplexSchur<CMat> schur(impl_->dense, false);
  return schur.matrixT().diagonal();
}

double resolvent_norm(const DiscretizedOperator& op, cplx z, double ceiling) {
  if (!op.matrix.allFinite()) throw Error("resolvent_norm: matrix has non-finite entries");
  const int n = op.N;
  const double scale = op.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  double smin = 0.0;
  if (op.basis == BasisType::grid && op.is_tridiagonal()) {
    SigmaMinSweeper sw(op);
    smin = sw.sigma_min(z, nullptr);
  } else if (n <= 600) {
    CMat A = op.matrix - z * CMat::Identity(n, n);
    Eigen::BDCSVD<CMat> svd(A);
    smin = svd.singularValues()(n - 1);
  } else {
    CMat A = op.matrix - z * CMat::Identity(n, n);
    Eigen::PartialPivLU<CMat> lu(A);
    smin = gram_inverse_iteration(
        n, [&](CVec& b) { b = lu.solve(b); }, [&](CVec& b) { b = lu.adjoint().solve(b); }, nullptr);
  }
  if (smin < 1e-16 * std::max(scale, 1.0)) return ceiling;
  return std::min(1.0 / smin, ceiling);
}

PseudospectrumGrid pseudospectrum_grid(const DiscretizedOperator& op, const Region& region, int n_re,
                                       int n_im, const GridOptions& opts) {
  if (n_re < 2 || n_im < 2) throw Error("pseudospectrum_grid: resolution must be >= 2 in each direction");
  if (!(region.re_min < region.re_max) || !(region.im_min < region.im_max))
    throw Error("pseudospectrum_grid: degenerate region");
  PseudospectrumGrid g;
  g.region = region;
  g.n_re = n_re;
  g.n_im = n_im;
  g.values.resize(n_im, n_re);
  g.ceiling_log10 = std::log10(opts.ceiling);

  SigmaMinSweeper sweeper(op);
  const double floor_sigma = 1e-16 * std::max(sweeper.norm_scale(), 1.0);
  parallel_for(n_im, opts.threads, [&](int i) {
    const double im = g.im_at(i);
    CVec warm;
    for (int j = 0; j < n_re; ++j) {
      const cplx z(g.re_at(j), im);
      const double smin = sweeper.sigma_min(z, &warm);
      double val = (smin < floor_sigma) ? opts.ceiling : std::min(1.0 / smin, opts.ceiling);
      g.values(i, j) = std::log10(val);
    }
  });
  if (opts.attach_eigenvalues) g.eigenvalues = sweeper.eigenvalues();
  return g;
}

std::vector<Polyline> contour_extract(const PseudospectrumGrid& grid, double eps_level) {
  const double level = -std::log10(eps_level);
  const int nr = grid.n_re, ni = grid.n_im;
  // segment endpoints live on grid edges; key edges uniquely
  struct Seg {
    long long e0, e1;
    cplx p0, p1;
  };
  auto hkey = [&](int i, int j) { return (static_cast<long long>(i) * nr + j) * 2; };      // edge (i,j)-(i,j+1)
  auto vkey = [&](int i, int j) { return (static_cast<long long>(i) * nr + j) * 2 + 1; };  // edge (i,j)-(i+1,j)
  auto interp = [&](double va, double vb, double xa, double xb) {
    const double t = (level - va) / (vb - va);
    return xa + t * (xb - xa);
  };
  std::vector<Seg> segs;
  for (int i = 0; i + 1 < ni; ++i) {
    for (int j = 0; j + 1 < nr; ++j) {
      const double v00 = grid.values(i, j), v01 = grid.values(i, j + 1);
      const double v10 = grid.values(i + 1, j), v11 = grid.values(i + 1, j + 1);
      const double x0 = grid.re_at(j), x1 = grid.re_at(j + 1);
      const double y0 = grid.im_at(i), y1 = grid.im_at(i + 1);
      int idx = 0;
      if (v00 >= level) idx |= 1;
      if (v01 >= level) idx |= 2;
      if (v11 >= level) idx |= 4;
      if (v10 >= level) idx |= 8;
      if (idx == 0 || idx == 15) continue;
      struct EdgePt {
        long long key;
        cplx p;
      };
      std::vector<EdgePt> pts;
      auto cross = [&](double va, double vb) { return (va >= level) != (vb >= level); };
      if (cross(v00, v01)) pts.push_back({hkey(i, j), cplx(interp(v00, v01, x0, x1), y0)});
      if (cross(v10, v11)) pts.push_back({hkey(i + 1, j), cplx(interp(v10, v11, x0, x1), y1)});
      if (cross(v00, v10)) pts.push_back({vkey(i, j), cplx(x0, interp(v00, v10, y0, y1))});
      if (cross(v01, v11)) pts.push_back({vkey(i, j + 1), cplx(x1, interp(v01, v11, y0, y1))});
      if (pts.size() == 2) {
        segs.push_back({pts[0].key, pts[1].key, pts[0].p, pts[1].p});
      } else if (pts.size() == 4) {
        // saddle: split by the cell-center value
        const double ctr = 0.25 * (v00 + v01 + v10 + v11);
        // pts order: bottom, top, left, right
        if ((v00 >= level) == (ctr >= level)) {
          segs.push_back({pts[0].key, pts[3].key, pts[0].p, pts[3].p});  // bottom-right
          segs.push_back({pts[1].key, pts[2].key, pts[1].p, pts[2].p});  // top-left
        } else {
          segs.push_back({pts[0].key, pts[2].key, pts[0].p, pts[2].p});  // bottom-left
          segs.push_back({pts[1].key, pts[3].key, pts[1].p, pts[3].p});  // top-right
        }
      }
    }
  }
  if (segs.empty()) throw EmptyLevel("contour_extract: level intersects no cell");

  std::multimap<long long, std::size_t> by_edge;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    by_edge.insert({segs[s].e0, s});
    by_edge.insert({segs[s].e1, s});
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto next_at = [&](long long edge, std::size_t self) -> std::optional<std::size_t> {
    auto [lo, hi] = by_edge.equal_range(edge);
    for (auto it = lo; it != hi; ++it)
      if (it->second != self && !used[it->second]) return it->second;
    return std::nullopt;
  };
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    // walk both directions from the seed segment
    std::vector<cplx> pts = {segs[s0].p0, segs[s0].p1};
    std::vector<long long> ends = {segs[s0].e0, segs[s0].e1};
    used[s0] = true;
    bool closed = false;
    for (int dir = 0; dir < 2; ++dir) {
      long long cur_edge = ends[std::size_t(dir == 0 ? 1 : 0)];
      std::size_t cur_seg = s0;
      while (true) {
        auto nx = next_at(cur_edge, cur_seg);
        if (!nx) break;
        const Seg& sg = segs[*nx];
        used[*nx] = true;
        const bool fwd = sg.e0 == cur_edge;
        const cplx np = fwd ? sg.p1 : sg.p0;
        const long long ne = fwd ? sg.e1 : sg.e0;
        if (dir == 0)
          pts.push_back(np);
        else
          pts.insert(pts.begin(), np);
        cur_seg = *nx;
        cur_edge = ne;
        if (ne == ends[std::size_t(dir == 0 ? 0 : 1)]) {
          closed = true;
          break;
        }
      }
      if (closed) break;
    }
    Polyline pl;
    pl.points = std::move(pts);
    pl.closed = closed;
    out.push_back(std::move(pl));
  }
  return out;
}

std::vector<std::vector<Polyline>> contour_extract(const PseudospectrumGrid& grid,
                                                   const std::vector<double>& eps_levels) {
  std::vector<std::vector<Polyline>> out;
  out.reserve(eps_levels.size());
  for (double e : eps_levels) out.push_back(contour_extract(grid, e));
  return out;
}

double NumericalRange::distance_outside(cplx z) const {
  double d = 0.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double proj = std::cos(angles[k]) * z.real() + std::sin(angles[k]) * z.imag();
    d = std::max(d, proj - support[k]);
  }
  return d;
}

NumericalRange numerical_range_boundary(const DiscretizedOperator& op, int n_angles) {
  if (n_angles < 8) throw Error("numerical_range_boundary: n_angles >= 8");
  NumericalRange nr;
  nr.angles.resize(std::size_t(n_angles));
  nr.support.resize(std::size_t(n_angles));
  nr.points.resize(std::size_t(n_angles));
  const CMat& A = op.matrix;
  for (int k = 0; k < n_angles; ++k) {
    const double phi = 2.0 * kPi * double(k) / double(n_angles);
    const cplx rot = std::exp(cplx(0.0, -phi));
    CMat K = 0.5 * (rot * A + std::conj(rot) * A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(K);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("numerical_range_boundary: eigensolve failed");
    const int top = op.N - 1;
    nr.angles[std::size_t(k)] = phi;
    nr.support[std::size_t(k)] = es.eigenvalues()(top);
    const CVec v = es.eigenvectors().col(top);
    nr.points[std::size_t(k)] = (v.adjoint() * (A * v))(0, 0);
  }
  return nr;
}

CVec eigenvalues_only(const DiscretizedOperator& op) {
  const CMat& A = op.matrix;
  const int n = op.N;
  if (op.basis == BasisType::grid && op.is_tridiagonal() && A.imag().cwiseAbs().maxCoeff() == 0.0) {
    // real tridiagonal with positive sub*sup products diagonalizes through a
    // symmetric tridiagonal similarity
    bool ok = true;
    RVec diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) diag(i) = A(i, i).real();
    for (int i = 0; i < n - 1 && ok; ++i) {
      const double p = A(i + 1, i).real() * A(i, i + 1).real();
      if (p <= 0.0) ok = false;
      else off(i) = std::sqrt(p);
    }
    if (ok) {
      Eigen::SelfAdjointEigenSolver<RMat> es;
      es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
      if (es.info() == Eigen::Success) {
        CVec out(n);
        for (int i = 0; i < n; ++i) out(i) = cplx(es.eigenvalues()(i), 0.0);
        return out;
      }
    }
  }
  Eigen::ComplexSchur<CMat> schur(A, false);
  if (schur.info() != Eigen::Success) throw ConvergenceFailure("eigenvalues_only: Schur failed");
  return schur.matrixT().diagonal();
}

EigenSystem eigen_system(const DiscretizedOperator& op) {
  const int n = op.N;
  Eigen::ComplexEigenSolver<CMat> right(op.matrix, true);
  if (right.info() != Eigen::Success) throw ConvergenceFailure("eigen_system: right eigensolve failed");
  Eigen::ComplexEigenSolver<CMat> lefts(op.matrix.adjoint(), true);
  if (lefts.info() != Eigen::Success) throw ConvergenceFailure("eigen_system: left eigensolve failed");

  std::vector<int> order(std::size_t(n), 0);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    const cplx vp = right.eigenvalues()(p), vq = right.eigenvalues()(q);
    if (vp.real() != vq.real()) return vp.real() < vq.real();
    return vp.imag() < vq.imag();
  });

  EigenSystem es;
  es.values.resize(n);
  es.right.resize(n, n);
  es.left.resize(n, n);
  es.pairing.resize(n);
  es.match_residual.resize(n);

  std::vector<bool> taken(std::size_t(n), false);
  for (int kk = 0; kk < n; ++kk) {
    const int ri = order[std::size_t(kk)];
    const cplx lam = right.eigenvalues()(ri);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int li = 0; li < n; ++li) {
      if (taken[std::size_t(li)]) continue;
      const double dd = std::abs(std::conj(lefts.eigenvalues()(li)) - lam);
      if (dd < best_d) {
        best_d = dd;
        best = li;
      }
    }
    taken[std::size_t(best)] = true;
    es.values(kk) = lam;
    es.right.col(kk) = right.eigenvectors().col(ri);
    es.left.col(kk) = lefts.eigenvectors().col(best);
    es.match_residual(kk) = best_d;
    const double pr = std::abs(es.left.col(kk).dot(es.right.col(kk))) /
                      (es.left.col(kk).norm() * es.right.col(kk).norm());
    es.pairing(kk) = pr;
    if (pr < 1e-10) es.near_defective.push_back(kk);
  }
  return es;
}

double EigenSystem::spectral_range() const {
  const int n = int(values.size());
  double lo_re = values(0).real(), hi_re = lo_re, lo_im = values(0).imag(), hi_im = lo_im;
  for (int i = 1; i < n; ++i) {
    lo_re = std::min(lo_re, values(i).real());
    hi_re = std::max(hi_re, values(i).real());
    lo_im = std::min(lo_im, values(i).imag());
    hi_im = std::max(hi_im, values(i).imag());
  }
  return std::hypot(hi_re - lo_re, hi_im - lo_im);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InsufficientData("linear_fit: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  f.stderr_slope = n > 2 ? std::sqrt(ss_res / double(n - 2) / sxx) : 0.0;
  return f;
}

GrowthFit growth_exponent_fit(const std::vector<double>& eps_levels, const std::vector<double>& crossings) {
  if (eps_levels.size() < 4 || eps_levels.size() != crossings.size())
    throw InsufficientData("growth_exponent_fit: need >= 4 levels");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double e : eps_levels) {
    lo = std::min(lo, std::log10(1.0 / e));
    hi = std::max(hi, std::log10(1.0 / e));
  }
  if (hi - lo < 3.0) throw InsufficientData("growth_exponent_fit: levels must span >= 3 decades");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps_levels.size(); ++i) {
    x.push_back(std::log(std::log(1.0 / eps_levels[i])));
    y.push_back(std::log(crossings[i]));
  }
  LinearFit f = linear_fit(x, y);
  return GrowthFit{f.slope, f.r_squared, f.stderr_slope};
}

std::vector<double> real_axis_crossings(const DiscretizedOperator& op, const std::vector<double>& eps_levels,
                                        double re_min, double re_max, int n_samples) {
  SigmaMinSweeper sweeper(op);
  const double floor_sigma = 1e-16 * std::max(sweeper.norm_scale(), 1.0);
  std::vector<double> xs(std::size_t(n_samples), 0.0), vals(std::size_t(n_samples), 0.0);
  CVec warm;
  for (int i = 0; i < n_samples; ++i) {
    const double re = re_min + (re_max - re_min) * double(i) / double(n_samples - 1);
    const double smin = sweeper.sigma_min(cplx(re, 0.0), &warm);
    xs[std::size_t(i)] = re;
    vals[std::size_t(i)] = std::log10(smin < floor_sigma ? 1e16 : std::min(1.0 / smin, 1e16));
  }
  std::vector<double> crossings;
  for (double eps : eps_levels) {
    const double level = std::log10(1.0 / eps);
    double crossing = std::numeric_limits<double>::quiet_NaN();
    for (int i = n_samples - 2; i >= 0; --i) {
      const double v0 = vals[std::size_t(i)], v1 = vals[std::size_t(i) + 1];
      if ((v0 - level) * (v1 - level) <= 0.0 && v0 != v1) {
        const double t = (level - v0) / (v1 - v0);
        crossing = xs[std::size_t(i)] + t * (xs[std::size_t(i) + 1] - xs[std::size_t(i)]);
        break;
      }
    }
    if (!std::isfinite(crossing))
      throw InsufficientData("real_axis_crossings: level 1/eps not reached on the sampled axis segment");
    crossings.push_back(crossing);
  }
  return crossings;
}

}  // namespace pslab
