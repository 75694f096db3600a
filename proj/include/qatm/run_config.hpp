#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qatm/analysis.hpp"
#include "qatm/measurement.hpp"
#include "qatm/params.hpp"

namespace qatm {

// Everything a command needs to run: physics, readout statistics, the
// acquisition grid and the analysis settings. Loaded from a flat
// "key = value" file; keys not listed below fall through to PhysicalParams.
//
//   readout.rate_bright  readout.rate_dark  readout.shots  readout.groups
//   grid.dt_us           grid.tau_max_us
//   fft.window (none|hann)        fft.pad_factor
//   analysis.b_th        analysis.resolution
//   analysis.variance_variant (standard|quadratic)
//   seed                 output_dir
struct RunConfig {
  PhysicalParams params{};
  ReadoutModel readout{};
  int groups = 3;
  double dt_us = 0.05;
  double tau_max_us = 6.0;
  SpectralWindow window = SpectralWindow::hann;
  int pad_factor = 8;
  double b_th = 0.178;
  double resolution = 0.05;
  VarianceVariant variant = VarianceVariant::standard;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";

  std::vector<double> tau_grid() const;  // 0 .. tau_max, step dt
  PipelineOptions pipeline(bool noiseless) const;

  // throws std::invalid_argument on bad values, including a grid too coarse
  // for the hyperfine fringes: requires 2 * dt * (a_zz/2 + max |detune|) <= 0.9
  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// name of the environment variable holding the default config path
inline constexpr const char* config_env_var = "QATM_CONFIG";

} // namespace qatm
