#include "qatm/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "config_detail.hpp"

namespace qatm {

std::vector<double> RunConfig::tau_grid() const { return uniform_grid(0.0, tau_max_us, dt_us); }

PipelineOptions RunConfig::pipeline(bool noiseless) const {
  PipelineOptions opt;
  opt.tau_grid_us = tau_grid();
  opt.window = window;
  opt.pad_factor = pad_factor;
  opt.b_th = b_th;
  opt.resolution = resolution;
  opt.variant = variant;
  opt.noiseless = noiseless;
  opt.readout = readout;
  opt.groups = groups;
  return opt;
}

void RunConfig::validate() const {
  params.validate();
  readout.validate();
  if (groups < 2) throw std::invalid_argument("readout.groups must be >= 2");
  if (!(dt_us > 0.0) || !(tau_max_us > dt_us))
    throw std::invalid_argument("grid: need dt_us > 0 and tau_max_us > dt_us");
  // the hyperfine-split fringes must stay below Nyquist with margin
  const double f_max = 0.5 * params.a_zz + std::max(std::abs(params.detune1),
                                                    std::abs(params.detune2));
  if (2.0 * dt_us * f_max > 0.9)
    throw std::invalid_argument("grid: dt_us too coarse for the hyperfine fringes (Nyquist)");
  if (pad_factor < 1) throw std::invalid_argument("fft.pad_factor must be >= 1");
  if (!(b_th > 0.0)) throw std::invalid_argument("analysis.b_th must be positive");
  if (!(resolution >= 0.0)) throw std::invalid_argument("analysis.resolution must be >= 0");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  detail::for_each_config_entry(text, [&](const std::string& key, const std::string& value,
                                          int lineno) {
    auto number = [&] { return detail::parse_config_number(value, lineno); };
    if (key == "readout.rate_bright")
      cfg.readout.rate_bright = number();
    else if (key == "readout.rate_dark")
      cfg.readout.rate_dark = number();
    else if (key == "readout.shots")
      cfg.readout.shots = detail::parse_config_integer(value, lineno);
    else if (key == "readout.groups")
      cfg.groups = static_cast<int>(detail::parse_config_integer(value, lineno));
    else if (key == "grid.dt_us")
      cfg.dt_us = number();
    else if (key == "grid.tau_max_us")
      cfg.tau_max_us = number();
    else if (key == "fft.window") {
      if (value == "none")
        cfg.window = SpectralWindow::none;
      else if (value == "hann")
        cfg.window = SpectralWindow::hann;
      else
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": fft.window must be none or hann");
    } else if (key == "fft.pad_factor")
      cfg.pad_factor = static_cast<int>(detail::parse_config_integer(value, lineno));
    else if (key == "analysis.b_th")
      cfg.b_th = number();
    else if (key == "analysis.resolution")
      cfg.resolution = number();
    else if (key == "analysis.variance_variant") {
      if (value == "standard")
        cfg.variant = VarianceVariant::standard;
      else if (value == "quadratic")
        cfg.variant = VarianceVariant::quadratic;
      else
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": analysis.variance_variant must be standard or quadratic");
    } else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(detail::parse_config_integer(value, lineno));
    else if (key == "output_dir")
      cfg.output_dir = value;
    else {
      PhysicalParams probe = cfg.params;  // recognize the key before parsing the value
      if (!set_param_field(probe, key, 0.0))
        throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + key +
                                    "'");
      set_param_field(cfg.params, key, number());
    }
  });
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

} // namespace qatm
