#include "pslab/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pslab/discretize.hpp"
#include "pslab/errors.hpp"
#include "pslab/instability.hpp"
#include "pslab/io.hpp"
#include "pslab/model.hpp"
#include "pslab/projections.hpp"
#include "pslab/pseudomode.hpp"
#include "pslab/quadratic.hpp"
#include "pslab/resolvent.hpp"

namespace pslab {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double now_ms() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

cplx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return cplx(std::stod(s), 0.0);
  return cplx(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

struct ModelFlags {
  std::string model;
  double theta = kPi / 4.0;
  double omega = 2.0, alpha = 0.5, beta = 0.25;
  double epsilon = 0.5;
  double L = kPi;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--model", model,
                                "airy|cubic|rotated_ho|shifted_ho|swanson|advection_diffusion|perturbed_ho");
    if (required) opt->required();
    cmd->add_option("--theta", theta, "rotation angle (radians)");
    cmd->add_option("--omega", omega, "swanson omega");
    cmd->add_option("--alpha", alpha, "swanson alpha");
    cmd->add_option("--beta", beta, "swanson beta");
    cmd->add_option("--epsilon", epsilon, "perturbed oscillator coupling");
    cmd->add_option("--L", L, "advection-diffusion interval length");
  }

  OperatorModel build() const {
    const ModelKind kind = model_kind_from_string(model);
    std::map<std::string, double> p;
    switch (kind) {
      case ModelKind::rotated_ho: p["theta"] = theta; break;
      case ModelKind::swanson:
        p["omega"] = omega;
        p["alpha"] = alpha;
        p["beta"] = beta;
        break;
      case ModelKind::perturbed_ho: p["epsilon"] = epsilon; break;
      case ModelKind::advection_diffusion: p["L"] = L; break;
      default: break;
    }
    return make_model(kind, p);
  }

  json to_json() const {
    return json{{"model", model}, {"theta", theta},     {"omega", omega}, {"alpha", alpha},
                {"beta", beta},   {"epsilon", epsilon}, {"L", L}};
  }
};

struct OutputContext {
  fs::path dir;
  RunManifest manifest;
  double t0 = 0.0;

  explicit OutputContext(const std::string& command, const std::vector<std::string>& argv,
                         const std::string& outdir) {
    const char* env = std::getenv("PSLAB_OUT");
    dir = !outdir.empty() ? fs::path(outdir) : (env ? fs::path(env) : fs::path("."));
    fs::create_directories(dir);
    manifest.command = command;
    manifest.argv = argv;
    t0 = now_ms();
  }

  fs::path file(const std::string& name) {
    manifest.outputs.push_back(name);
    return dir / name;
  }

  void finish() {
    manifest.wall_ms = now_ms() - t0;
    write_manifest(dir / (manifest.command + "_manifest.json"), manifest);
  }
};

DiscretizedOperator assemble_for(const OperatorModel& m, int N, const std::string& grid_window) {
  if (!grid_window.empty()) {
    auto ab = parse_list(grid_window);
    if (ab.size() != 2) throw Error("--grid expects a,b");
    return grid_assemble(m, ab[0], ab[1], N);
  }
  if (m.polynomial_coefficients()) return hermite_assemble(m, N);
  if (m.kind == ModelKind::advection_diffusion) return grid_assemble(m, 0.0, m.params.at("L"), N);
  return grid_assemble(m, -40.0, 40.0, N);
}

std::string csv_complex_rows(const std::vector<cplx>& zs) {
  std::ostringstream os;
  os << "k,re,im\n";
  for (std::size_t k = 0; k < zs.size(); ++k)
    os << k << "," << fmt(zs[k].real()) << "," << fmt(zs[k].imag()) << "\n";
  return os.str();
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pslab: spectra, pseudospectra, and JWKB pseudomodes of non-self-adjoint 1D operators"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  int threads = 0;
  std::string outdir;
  app.add_option("--threads", threads, "worker pool size (0 = hardware)");
  app.add_option("-o,--out", outdir, "output directory (default $PSLAB_OUT or .)");

  // -------------------------------------------------------------- spectrum
  auto* sp = app.add_subcommand("spectrum", "eigenvalues of the discretized operator");
  sp->set_help_flag("--help", "print help");
  ModelFlags sp_m;
  sp_m.attach(sp);
  int sp_N = 400, sp_count = 10;
  std::string sp_grid;
  sp->add_option("--N", sp_N, "basis size / grid points");
  sp->add_option("--count", sp_count, "how many eigenvalues (by real part)");
  sp->add_option("--grid", sp_grid, "grid window a,b (forces the grid basis)");

  // -------------------------------------------------------- pseudospectrum
  auto* ps = app.add_subcommand("pseudospectrum", "log10 resolvent-norm grid with contours");
  ps->set_help_flag("--help", "print help");
  ModelFlags ps_m;
  ps_m.attach(ps);
  int ps_N = 400;
  std::string ps_region = "0,30,-15,15", ps_res = "200,200", ps_grid, ps_levels;
  ps->add_option("--N", ps_N, "basis size / grid points");
  ps->add_option("--region", ps_region, "re_min,re_max,im_min,im_max")->required();
  ps->add_option("--res", ps_res, "n_re,n_im");
  ps->add_option("--grid", ps_grid, "grid window a,b (forces the grid basis)");
  ps->add_option("--levels", ps_levels, "epsilon levels (default 1e-1..1e-8 by decades)");

  // ------------------------------------------------------------ pseudomode
  auto* pm = app.add_subcommand("pseudomode", "JWKB pseudomode with a certified residual");
  pm->set_help_flag("--help", "print help");
  ModelFlags pm_m;
  pm_m.attach(pm);
  double pm_h = 0.03125;
  int pm_terms = 7;
  std::string pm_z, pm_zpolar, pm_cutoff;
  pm->add_option("--h", pm_h, "semiclassical parameter");
  pm->add_option("--z", pm_z, "target re,im (operator coordinates; tilde coordinates for shifted_ho)");
  pm->add_option("--z-polar", pm_zpolar, "target mod,arg");
  pm->add_option("--terms", pm_terms, "series terms J+1 (0 = truncation-order rule)");
  pm->add_option("--cutoff", pm_cutoff, "p1,p2,s1,s2 (default: 1/8-ramp geometry on the working interval)");

  // --------------------------------------------------------- residual-scan
  auto* rs = app.add_subcommand("residual-scan", "certified residuals across h with a decay-law fit");
  rs->set_help_flag("--help", "print help");
  ModelFlags rs_m;
  rs_m.attach(rs);
  std::string rs_hs = "0.125,0.0625,0.03125", rs_zred, rs_law = "inv_h";
  int rs_terms = 0;
  rs->add_option("--hs", rs_hs, "decreasing h list");
  rs->add_option("--zred", rs_zred, "reduced-coordinate target re,im (shifted_ho default: 2-h+2i sqrt h)");
  rs->add_option("--terms", rs_terms, "series terms (0 = residual-minimizing truncation)");
  rs->add_option("--law", rs_law, "inv_h | inv_sqrt_h");

  // ----------------------------------------------------------- projections
  auto* pj = app.add_subcommand("projections", "spectral projection norms and growth-rate fit");
  pj->set_help_flag("--help", "print help");
  std::string pj_source = "exact";
  double pj_theta = kPi / 4.0;
  int pj_kmax = 50, pj_N = 400;
  std::string pj_law = "linear_in_k";
  ModelFlags pj_m;
  pj_m.model = "rotated_ho";
  pj->add_option("--source", pj_source, "exact | asymptotic | numeric");
  pj->add_option("--theta", pj_theta, "rotation angle for the exact/asymptotic formulas");
  pj->add_option("--kmax", pj_kmax, "largest index");
  pj->add_option("--N", pj_N, "basis size for the numeric source");
  pj->add_option("--law", pj_law, "linear_in_k | linear_in_sqrt_k");
  pj->add_option("--model", pj_m.model, "model for the numeric source");
  pj->add_option("--omega", pj_m.omega);
  pj->add_option("--alpha", pj_m.alpha);
  pj->add_option("--beta", pj_m.beta);

  // ----------------------------------------------------- quadratic-identify
  auto* qi = app.add_subcommand("quadratic-identify", "classify a quadratic symbol and identify the rotated oscillator");
  qi->set_help_flag("--help", "print help");
  std::string qi_alpha = "1,0", qi_beta = "0,0", qi_gamma = "1,0";
  bool qi_from_swanson = false;
  double qi_omega = 2.0, qi_al = 0.5, qi_be = 0.25;
  qi->add_option("--qalpha", qi_alpha, "x^2 coefficient re,im");
  qi->add_option("--qbeta", qi_beta, "cross coefficient re,im");
  qi->add_option("--qgamma", qi_gamma, "xi^2 coefficient re,im");
  qi->add_flag("--from-swanson", qi_from_swanson, "build the symbol from swanson parameters");
  qi->add_option("--omega", qi_omega);
  qi->add_option("--alpha", qi_al);
  qi->add_option("--beta", qi_be);

  // ---------------------------------------------------------- swanson-check
  auto* sc = app.add_subcommand("swanson-check", "numerical unitary reduction to the rotated oscillator");
  sc->set_help_flag("--help", "print help");
  double sc_omega = 2.0, sc_alpha = 0.5, sc_beta = 0.25;
  int sc_samples = 5, sc_grid_n = 4096;
  sc->add_option("--omega", sc_omega);
  sc->add_option("--alpha", sc_alpha);
  sc->add_option("--beta", sc_beta);
  sc->add_option("--samples", sc_samples);
  sc->add_option("--grid-n", sc_grid_n, "uniform grid size (power of two)");

  // ---------------------------------------------------------- perturb-cloud
  auto* pc = app.add_subcommand("perturb-cloud", "eigenvalues under random perturbations of norm < eps");
  pc->set_help_flag("--help", "print help");
  ModelFlags pc_m;
  pc_m.attach(pc);
  int pc_N = 400, pc_samples = 50;
  double pc_eps = 1e-3;
  std::uint64_t pc_seed = 1;
  std::string pc_grid;
  pc->add_option("--N", pc_N);
  pc->add_option("--epsilon", pc_eps)->required();
  pc->add_option("--samples", pc_samples);
  pc->add_option("--seed", pc_seed)->required();
  pc->add_option("--grid", pc_grid, "grid window a,b");

  // ----------------------------------------------------------- jordan-sweep
  auto* js = app.add_subcommand("jordan-sweep", "perturbed-oscillator eigenvalue collision sweep");
  js->set_help_flag("--help", "print help");
  double js_start = 0.2, js_stop = 3.0;
  int js_steps = 15, js_N = 40;
  js->add_option("--eps-start", js_start);
  js->add_option("--eps-stop", js_stop);
  js->add_option("--steps", js_steps);
  js->add_option("--N", js_N);

  // --------------------------------------------------------------- semigroup
  auto* sg = app.add_subcommand("semigroup", "||e^{-tH}|| for the discretized operator");
  sg->set_help_flag("--help", "print help");
  ModelFlags sg_m;
  sg_m.model = "airy";
  sg->add_option("--model", sg_m.model);
  std::string sg_window = "-40,40", sg_ts = "0.5,1,1.5,2,2.5";
  int sg_N = 900;
  sg->add_option("--window", sg_window, "grid window a,b");
  sg->add_option("--N", sg_N);
  sg->add_option("--ts", sg_ts, "time list");

  // -------------------------------------------------------- airy-diagnostics
  auto* ad = app.add_subcommand("airy-diagnostics", "translation, resolvent invariance, growth exponent");
  ad->set_help_flag("--help", "print help");
  int ad_N = 1500;
  double ad_window = 40.0, ad_shift = 1.0;
  std::string ad_probes = "6,8,10";
  ad->add_option("--N", ad_N);
  ad->add_option("--window-half", ad_window);
  ad->add_option("--shift", ad_shift);
  ad->add_option("--probes", ad_probes, "real probe points");

  std::vector<std::string> argv_copy = args;
  {
    std::vector<char*> argv_c;
    argv_c.push_back(const_cast<char*>("pslab"));
    for (auto& a : argv_copy) argv_c.push_back(a.data());
    try {
      app.parse(int(argv_c.size()), argv_c.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        // --help
        out << app.help() << "\n";
        return 0;
      }
      err << "error: " << e.what() << "\n" << app.help() << "\n";
      return 1;
    }
  }

  if (sp->parsed()) {
    OutputContext ctx("spectrum", args, outdir);
    ctx.manifest.params = sp_m.to_json();
    ctx.manifest.params["N"] = sp_N;
    ctx.manifest.params["count"] = sp_count;
    OperatorModel m = sp_m.build();
    DiscretizedOperator op = assemble_for(m, sp_N, sp_grid);
    CVec ev = eigenvalues_only(op);
    std::vector<cplx> evs(ev.data(), ev.data() + ev.size());
    std::sort(evs.begin(), evs.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    evs.resize(std::min<std::size_t>(evs.size(), std::size_t(sp_count)));
    write_text(ctx.file("spectrum.csv"), csv_complex_rows(evs));
    for (const cplx& z : evs) out << fmt(z.real()) << " " << fmt(z.imag()) << "\n";
    ctx.finish();
    return 0;
  }

  if (ps->parsed()) {
    OutputContext ctx("pseudospectrum", args, outdir);
    ctx.manifest.params = ps_m.to_json();
    ctx.manifest.params["N"] = ps_N;
    ctx.manifest.params["region"] = ps_region;
    ctx.manifest.params["res"] = ps_res;
    OperatorModel m = ps_m.build();
    DiscretizedOperator op = assemble_for(m, ps_N, ps_grid);
    auto reg = parse_list(ps_region);
    auto res = parse_list(ps_res);
    if (reg.size() != 4 || res.size() != 2) throw Error("--region needs 4 values, --res needs 2");
    GridOptions opts;
    opts.threads = threads;
    PseudospectrumGrid g =
        pseudospectrum_grid(op, Region{reg[0], reg[1], reg[2], reg[3]}, int(res[0]), int(res[1]), opts);
    std::vector<double> levels;
    if (ps_levels.empty()) {
      for (int d = 1; d <= 8; ++d) levels.push_back(std::pow(10.0, -d));
    } else {
      levels = parse_list(ps_levels);
    }
    std::vector<std::vector<Polyline>> contours;
    std::vector<double> kept;
    for (double eps : levels) {
      try {
        contours.push_back(contour_extract(g, eps));
        kept.push_back(eps);
      } catch (const EmptyLevel&) {
        // level missing from this region; skip it in the outputs
      }
    }
    write_grid_csv(ctx.file("pseudospectrum.csv"), g);
    write_grid_metadata(ctx.file("pseudospectrum_meta.json"), g, sp_m.model.empty() ? ps_m.model : ps_m.model,
                        op.basis == BasisType::hermite ? "hermite" : "grid", ps_N);
    write_contours_svg(ctx.file("pseudospectrum.svg"), g, kept, contours);
    write_contours_txt(ctx.file("contours.txt"), kept, contours);
    out << "grid " << g.n_re << "x" << g.n_im << " written; " << kept.size() << " contour levels\n";
    ctx.finish();
    return 0;
  }

  if (pm->parsed()) {
    OutputContext ctx("pseudomode", args, outdir);
    ctx.manifest.params = pm_m.to_json();
    ctx.manifest.params["h"] = pm_h;
    ctx.manifest.params["terms"] = pm_terms;
    cplx z;
    if (!pm_zpolar.empty()) {
      auto mp = parse_list(pm_zpolar);
      if (mp.size() != 2) throw Error("--z-polar expects mod,arg");
      z = std::polar(mp[0], mp[1]);
    } else if (!pm_z.empty()) {
      z = parse_complex(pm_z);
    } else {
      throw Error("pseudomode requires --z or --z-polar");
    }
    ctx.manifest.params["z"] = {z.real(), z.imag()};
    std::optional<Cutoff> cf;
    if (!pm_cutoff.empty()) {
      auto c = parse_list(pm_cutoff);
      if (c.size() != 4) throw Error("--cutoff expects p1,p2,s1,s2");
      cf = cutoff_build(c[0], c[1], c[2], c[3]);
    }
    Pseudomode result;
    OperatorModel m = pm_m.build();
    if (m.kind == ModelKind::shifted_ho) {
      result = shifted_rescaled_pseudomode(pm_h, z, pm_terms, cf);
    } else {
      PseudomodeRequest req;
      req.z = z;
      req.h = pm_h;
      req.terms = pm_terms;
      req.cutoff = cf;
      result = build_pseudomode(m, req);
    }
    write_pseudomode_csv(ctx.file("pseudomode.csv"), result);
    write_text(ctx.file("pseudomode.json"), pseudomode_summary(result).dump(2) + "\n");
    out << "residual = " << fmt(result.residual) << " (terms = " << result.terms
        << ", x0 = " << fmt(result.x0) << ")\n";
    ctx.finish();
    return 0;
  }

  if (rs->parsed()) {
    OutputContext ctx("residual-scan", args, outdir);
    ctx.manifest.params = rs_m.to_json();
    ctx.manifest.params["hs"] = rs_hs;
    ctx.manifest.params["terms"] = rs_terms;
    ctx.manifest.params["law"] = rs_law;
    OperatorModel m = rs_m.build();
    auto hs = parse_list(rs_hs);
    ScanLaw law = rs_law == "inv_sqrt_h" ? ScanLaw::inv_sqrt_h : ScanLaw::inv_h;
    std::function<cplx(double)> z_of_h;
    if (!rs_zred.empty()) {
      const cplx zr = parse_complex(rs_zred);
      z_of_h = [zr](double) { return zr; };
    } else if (m.kind == ModelKind::shifted_ho) {
      z_of_h = [](double h) { return cplx(2.0 - h, 2.0 * std::sqrt(h)); };
    } else {
      throw Error("residual-scan requires --zred for this model");
    }
    ResidualScan scan = residual_scan(m, z_of_h, hs, rs_terms, law);
    std::ostringstream os;
    os << "h,residual,terms\n";
    for (const auto& r : scan.rows) os << fmt(r.h) << "," << fmt(r.residual) << "," << r.terms << "\n";
    write_text(ctx.file("residual_scan.csv"), os.str());
    json fit;
    fit["law"] = rs_law;
    fit["has_fit"] = scan.has_fit;
    if (scan.has_fit) {
      fit["slope"] = scan.fit.slope;
      fit["intercept"] = scan.fit.intercept;
      fit["r_squared"] = scan.fit.r_squared;
    }
    write_text(ctx.file("residual_scan_fit.json"), fit.dump(2) + "\n");
    for (const auto& r : scan.rows) out << fmt(r.h) << " " << fmt(r.residual) << "\n";
    if (scan.has_fit) out << "slope " << fmt(scan.fit.slope) << " R2 " << fmt(scan.fit.r_squared) << "\n";
    ctx.finish();
    return 0;
  }

  if (pj->parsed()) {
    OutputContext ctx("projections", args, outdir);
    ctx.manifest.params["source"] = pj_source;
    ctx.manifest.params["theta"] = pj_theta;
    ctx.manifest.params["kmax"] = pj_kmax;
    ProjectionSeries series;
    if (pj_source == "exact") {
      series = exact_rotated_series(pj_theta, pj_kmax);
    } else if (pj_source == "asymptotic") {
      series.source = "asymptotic_rotated(" + std::to_string(pj_theta) + ")";
      for (int k = 1; k <= pj_kmax; ++k) series.entries.emplace_back(k, rotated_norm_asymptotic(pj_theta, k));
    } else if (pj_source == "numeric") {
      pj_m.theta = pj_theta;
      OperatorModel m = pj_m.build();
      series = numeric_projection_norms(hermite_assemble(m, pj_N), pj_kmax);
    } else {
      throw Error("--source must be exact | asymptotic | numeric");
    }
    std::ostringstream os;
    os << "k,log_norm,source\n";
    for (const auto& [k, ln] : series.entries) os << k << "," << fmt(ln) << "," << series.source << "\n";
    write_text(ctx.file("projections.csv"), os.str());
    json fit;
    fit["law"] = pj_law;
    if (int(series.entries.size()) >= 6) {
      RateFit rf = rate_fit(series, pj_law == "linear_in_sqrt_k" ? RateLaw::linear_in_sqrt_k
                                                                 : RateLaw::linear_in_k);
      fit["rate"] = rf.rate;
      fit["r_squared"] = rf.r_squared;
      out << "rate " << fmt(rf.rate) << " R2 " << fmt(rf.r_squared) << "\n";
    }
    write_text(ctx.file("projections_fit.json"), fit.dump(2) + "\n");
    ctx.finish();
    return 0;
  }

  if (qi->parsed()) {
    OutputContext ctx("quadratic-identify", args, outdir);
    QuadraticSymbol q{};
    if (qi_from_swanson) {
      q = swanson_to_weyl(qi_omega, qi_al, qi_be);
    } else {
      q = QuadraticSymbol{parse_complex(qi_alpha), parse_complex(qi_beta), parse_complex(qi_gamma)};
    }
    ctx.manifest.params["alpha"] = {q.alpha.real(), q.alpha.imag()};
    ctx.manifest.params["beta"] = {q.beta.real(), q.beta.imag()};
    ctx.manifest.params["gamma"] = {q.gamma.real(), q.gamma.imag()};
    json rep = quadratic_report(q);
    write_text(ctx.file("quadratic.json"), rep.dump(2) + "\n");
    out << rep.dump(2) << "\n";
    ctx.finish();
    return 0;
  }

  if (sc->parsed()) {
    OutputContext ctx("swanson-check", args, outdir);
    ctx.manifest.params = {{"omega", sc_omega}, {"alpha", sc_alpha}, {"beta", sc_beta},
                           {"samples", sc_samples}, {"grid_n", sc_grid_n}};
    SwansonCheck chk = swanson_unitary_check(sc_omega, sc_alpha, sc_beta, sc_samples, sc_grid_n);
    json rep;
    rep["max_rel_deviation"] = chk.max_rel_deviation;
    rep["max_unitarity_dev"] = chk.max_unitarity_dev;
    rep["per_sample"] = chk.per_sample;
    write_text(ctx.file("swanson_check.json"), rep.dump(2) + "\n");
    out << "max relative deviation " << fmt(chk.max_rel_deviation) << "\n";
    ctx.finish();
    return 0;
  }

  if (pc->parsed()) {
    OutputContext ctx("perturb-cloud", args, outdir);
    ctx.manifest.params = pc_m.to_json();
    ctx.manifest.params["N"] = pc_N;
    ctx.manifest.params["epsilon"] = pc_eps;
    ctx.manifest.params["samples"] = pc_samples;
    ctx.manifest.seed = pc_seed;
    ctx.manifest.seeded = true;
    OperatorModel m = pc_m.build();
    DiscretizedOperator op = assemble_for(m, pc_N, pc_grid);
    PerturbationExperiment ex = random_cloud(op, pc_eps, pc_samples, pc_seed, threads);
    std::ostringstream os;
    os << "re,im,sample_index\n";
    for (int s = 0; s < ex.samples; ++s)
      for (int i = 0; i < op.N; ++i) {
        const cplx z = ex.cloud[std::size_t(s) * std::size_t(op.N) + std::size_t(i)];
        os << fmt(z.real()) << "," << fmt(z.imag()) << "," << s << "\n";
      }
    write_text(ctx.file("cloud.csv"), os.str());
    out << ex.samples << " samples, " << ex.cloud.size() << " eigenvalues\n";
    ctx.finish();
    return 0;
  }

  if (js->parsed()) {
    OutputContext ctx("jordan-sweep", args, outdir);
    ctx.manifest.params = {{"eps_start", js_start}, {"eps_stop", js_stop}, {"steps", js_steps}, {"N", js_N}};
    std::vector<double> eps;
    for (int i = 0; i < js_steps; ++i)
      eps.push_back(js_start + (js_stop - js_start) * double(i) / double(std::max(1, js_steps - 1)));
    JordanSweepReport rep = jordan_sweep(eps, js_N);
    std::ostringstream os;
    os << "epsilon,k,re_lambda,im_lambda,pairing_defect\n";
    for (const auto& row : rep.rows)
      for (std::size_t k = 0; k < row.lowest.size(); ++k)
        os << fmt(row.epsilon) << "," << k << "," << fmt(row.lowest[k].real()) << ","
           << fmt(row.lowest[k].imag()) << "," << fmt(row.pairing_defect) << "\n";
    write_text(ctx.file("jordan_sweep.csv"), os.str());
    json rep_j;
    rep_j["collision_found"] = rep.collision_found;
    rep_j["eps_lo"] = rep.eps_lo;
    rep_j["eps_hi"] = rep.eps_hi;
    rep_j["defect_min_eps"] = rep.defect_min_eps;
    write_text(ctx.file("jordan_sweep.json"), rep_j.dump(2) + "\n");
    if (rep.collision_found)
      out << "collision bracket [" << fmt(rep.eps_lo) << ", " << fmt(rep.eps_hi) << "]\n";
    else
      out << "no collision in the sweep range\n";
    ctx.finish();
    return 0;
  }

  if (sg->parsed()) {
    OutputContext ctx("semigroup", args, outdir);
    ctx.manifest.params = {{"model", sg_m.model}, {"window", sg_window}, {"N", sg_N}, {"ts", sg_ts}};
    OperatorModel m = sg_m.model == "airy" ? make_model(ModelKind::airy, {})
                                           : ModelFlags{sg_m}.build();
    auto win = parse_list(sg_window);
    DiscretizedOperator op = grid_assemble(m, win.at(0), win.at(1), sg_N);
    auto ts = parse_list(sg_ts);
    SemigroupResult r = semigroup_norm(op, ts);
    std::ostringstream os;
    os << "t,norm,reference\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double ref = m.kind == ModelKind::airy ? std::exp(-std::pow(ts[i], 3) / 12.0) : 0.0;
      os << fmt(ts[i]) << "," << fmt(r.norm[i]) << "," << fmt(ref) << "\n";
      out << fmt(ts[i]) << " " << fmt(r.norm[i]) << " " << fmt(ref) << "\n";
    }
    write_text(ctx.file("semigroup.csv"), os.str());
    if (!r.accretive) err << "warning: numerical range check failed (NotAccretive)\n";
    ctx.finish();
    return 0;
  }

  if (ad->parsed()) {
    OutputContext ctx("airy-diagnostics", args, outdir);
    ctx.manifest.params = {{"N", ad_N}, {"window_half", ad_window}, {"shift", ad_shift},
                           {"probes", ad_probes}};
    AiryDiagnostics d = airy_diagnostics(ad_N, ad_window, ad_shift, parse_list(ad_probes));
    json rep;
    rep["max_shift_deviation"] = d.max_shift_deviation;
    rep["min_shift_modulus"] = d.min_shift_modulus;
    rep["resolvent_ratio"] = d.resolvent_ratio;
    rep["exponent"] = d.exponent_fit.exponent;
    rep["exponent_r_squared"] = d.exponent_fit.r_squared;
    write_text(ctx.file("airy_diagnostics.json"), rep.dump(2) + "\n");
    std::ostringstream os;
    os << "eps,crossing\n";
    for (std::size_t i = 0; i < d.eps_levels.size(); ++i)
      os << fmt(d.eps_levels[i]) << "," << fmt(d.crossings[i]) << "\n";
    write_text(ctx.file("airy_crossings.csv"), os.str());
    out << "exponent " << fmt(d.exponent_fit.exponent) << ", max shift deviation "
        << fmt(d.max_shift_deviation) << "\n";
    ctx.finish();
    return 0;
  }

  err << "error: no subcommand\n";
  return 1;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const MissingParam& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConstraintViolated& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const OrderingViolated& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pslab
