#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spdelab/integrator.hpp"

namespace spdelab::cli {

struct EnsembleSettings {
  std::vector<double> eps = {0.125, 0.0625, 0.03125, 0.015625};
  int replicates = 32;
  std::uint64_t seed = 0;
};

struct RunConfig {
  SimConfig sim;
  EnsembleSettings ensemble;
  /// Verbatim config text, echoed into the sidecar and manifest.
  std::string text;
  /// Lambda mode as written (`quadrature`, `closed_form`, `zero` or a number).
  std::string lambda_spec = "quadrature";
};

/// Parses the sectioned run config ([scheme], [model], [time], [ensemble],
/// [output]). Table paths in [scheme] resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace spdelab::cli
