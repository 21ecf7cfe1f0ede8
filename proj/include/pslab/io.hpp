#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pslab/pseudomode.hpp"
#include "pslab/resolvent.hpp"
#include "pslab/types.hpp"

namespace pslab {

// %.17g formatting keeps outputs byte-reproducible across runs.
std::string fmt(double x);

void write_text(const std::filesystem::path& p, const std::string& body);

void write_grid_csv(const std::filesystem::path& p, const PseudospectrumGrid& g);
void write_grid_metadata(const std::filesystem::path& p, const PseudospectrumGrid& g,
                         const std::string& model_name, const std::string& basis, int N);

// SVG with one path per epsilon level plus eigenvalue markers.
void write_contours_svg(const std::filesystem::path& p, const PseudospectrumGrid& g,
                        const std::vector<double>& eps_levels,
                        const std::vector<std::vector<Polyline>>& contours);
void write_contours_txt(const std::filesystem::path& p, const std::vector<double>& eps_levels,
                        const std::vector<std::vector<Polyline>>& contours);

void write_pseudomode_csv(const std::filesystem::path& p, const Pseudomode& pm, int n_samples = 2000);
nlohmann::json pseudomode_summary(const Pseudomode& pm);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json params;
  std::uint64_t seed = 0;
  bool seeded = false;
  std::vector<std::string> outputs;
  double wall_ms = 0.0;
};

void write_manifest(const std::filesystem::path& p, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& p);

}  // namespace pslab
