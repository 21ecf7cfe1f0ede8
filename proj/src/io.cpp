#include "pslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pslab/errors.hpp"

namespace pslab {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot open " + p.string() + " for writing");
  os << body;
}

void write_grid_csv(const std::filesystem::path& p, const PseudospectrumGrid& g) {
  std::ostringstream os;
  os << "re,im,log10_resnorm\n";
  for (int i = 0; i < g.n_im; ++i)
    for (int j = 0; j < g.n_re; ++j)
      os << fmt(g.re_at(j)) << "," << fmt(g.im_at(i)) << "," << fmt(g.values(i, j)) << "\n";
  write_text(p, os.str());
}

void write_grid_metadata(const std::filesystem::path& p, const PseudospectrumGrid& g,
                         const std::string& model_name, const std::string& basis, int N) {
  nlohmann::json j;
  j["model"] = model_name;
  j["basis"] = basis;
  j["N"] = N;
  j["region"] = {g.region.re_min, g.region.re_max, g.region.im_min, g.region.im_max};
  j["resolution"] = {g.n_re, g.n_im};
  j["ceiling_log10"] = g.ceiling_log10;
  std::vector<std::vector<double>> eigs;
  for (int i = 0; i < g.eigenvalues.size(); ++i)
    eigs.push_back({g.eigenvalues(i).real(), g.eigenvalues(i).imag()});
  j["eigenvalues"] = eigs;
  write_text(p, j.dump(2) + "\n");
}

namespace {

struct SvgMapper {
  double re0, re1, im0, im1;
  double w = 800.0, h = 600.0, pad = 40.0;
  double X(double re) const { return pad + (re - re0) / (re1 - re0) * (w - 2 * pad); }
  double Y(double im) const { return h - pad - (im - im0) / (im1 - im0) * (h - 2 * pad); }
};

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

void write_contours_svg(const std::filesystem::path& p, const PseudospectrumGrid& g,
                        const std::vector<double>& eps_levels,
                        const std::vector<std::vector<Polyline>>& contours) {
  SvgMapper m{g.region.re_min, g.region.re_max, g.region.im_min, g.region.im_max};
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.w << "\" height=\"" << m.h
     << "\" viewBox=\"0 0 " << m.w << " " << m.h << "\">\n";
  os << "<rect x=\"" << m.pad << "\" y=\"" << m.pad << "\" width=\"" << m.w - 2 * m.pad << "\" height=\""
     << m.h - 2 * m.pad << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (std::size_t lev = 0; lev < contours.size(); ++lev) {
    const char* color = kPalette[lev % 10];
    os << "<g stroke=\"" << color << "\" fill=\"none\" stroke-width=\"1.2\">\n";
    for (const Polyline& pl : contours[lev]) {
      os << "<path d=\"";
      for (std::size_t i = 0; i < pl.points.size(); ++i)
        os << (i == 0 ? "M" : "L") << fmt(m.X(pl.points[i].real())) << " " << fmt(m.Y(pl.points[i].imag()));
      if (pl.closed) os << "Z";
      os << "\"/>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << m.w - m.pad - 120 << "\" y=\"" << m.pad + 16 + 14 * double(lev) << "\" fill=\""
       << color << "\" font-size=\"11\">eps = " << eps_levels[lev] << "</text>\n";
  }
  os << "<g fill=\"#d00\">\n";
  for (int i = 0; i < g.eigenvalues.size(); ++i) {
    const cplx e = g.eigenvalues(i);
    if (e.real() < g.region.re_min || e.real() > g.region.re_max || e.imag() < g.region.im_min ||
        e.imag() > g.region.im_max)
      continue;
    os << "<circle cx=\"" << fmt(m.X(e.real())) << "\" cy=\"" << fmt(m.Y(e.imag())) << "\" r=\"2.2\"/>\n";
  }
  os << "</g>\n</svg>\n";
  write_text(p, os.str());
}

void write_contours_txt(const std::filesystem::path& p, const std::vector<double>& eps_levels,
                        const std::vector<std::vector<Polyline>>& contours) {
  std::ostringstream os;
  for (std::size_t lev = 0; lev < contours.size(); ++lev) {
    os << "# level " << fmt(eps_levels[lev]) << "\n";
    for (const Polyline& pl : contours[lev]) {
      for (const cplx& pt : pl.points) os << fmt(pt.real()) << " " << fmt(pt.imag()) << "\n";
      os << "\n";
    }
  }
  write_text(p, os.str());
}

void write_pseudomode_csv(const std::filesystem::path& p, const Pseudomode& pm, int n_samples) {
  std::ostringstream os;
  os << "x,re_u,im_u,re_image,im_image\n";
  const double a = pm.u.a(), b = pm.u.b();
  for (int i = 0; i < n_samples; ++i) {
    const double x = a + (b - a) * double(i) / double(n_samples - 1);
    const cplx u = pm.u.eval(x), img = pm.image.eval(x);
    os << fmt(x) << "," << fmt(u.real()) << "," << fmt(u.imag()) << "," << fmt(img.real()) << ","
       << fmt(img.imag()) << "\n";
  }
  write_text(p, os.str());
}

nlohmann::json pseudomode_summary(const Pseudomode& pm) {
  nlohmann::json j;
  j["h"] = pm.h;
  j["z"] = {pm.z.real(), pm.z.imag()};
  j["z_operator"] = {pm.z_operator.real(), pm.z_operator.imag()};
  j["x0"] = pm.x0;
  j["terms"] = pm.terms;
  j["residual"] = pm.residual;
  j["cutoff"] = {{"plateau", {pm.cutoff.p1, pm.cutoff.p2}}, {"support", {pm.cutoff.s1, pm.cutoff.s2}}};
  j["resolution"] = pm.resolution;
  j["interval"] = {pm.interval_a, pm.interval_b};
  j["im_ddphi_x0"] = pm.ddphi_x0.imag();
  j["min_abs_dphi"] = pm.min_abs_dphi;
  return j;
}

void write_manifest(const std::filesystem::path& p, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["params"] = m.params;
  if (m.seeded) j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["wall_ms"] = m.wall_ms;
  j["version"] = kVersion;
  write_text(p, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw Error("cannot open manifest " + p.string());
  nlohmann::json j;
  is >> j;
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.params = j.value("params", nlohmann::json::object());
  if (j.contains("seed")) {
    m.seed = j["seed"].get<std::uint64_t>();
    m.seeded = true;
  }
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.wall_ms = j.value("wall_ms", 0.0);
  return m;
}

}  // namespace pslab
