#pragma once

#include <filesystem>
#include <string>

#include "qatm/types.hpp"

namespace qatm {

// Physical constants of the sensor: a single NV- electron spin hyperfine-coupled
// to one 13C nuclear spin, in a static field along the NV axis. Defaults are the
// measured values of the reference sample; all of them can be overridden from a
// config file (see parse_params).
struct PhysicalParams {
  double d_zfs = 2.87;      // zero-field splitting (GHz)
  double b_ext = 515.0;     // static field along the NV axis (Gauss)
  double gamma_e = 2.803;   // electron gyromagnetic ratio (MHz/Gauss)
  double gamma_n = 1.07;    // 13C gyromagnetic ratio (kHz/Gauss)
  double a_zz = 13.56;      // longitudinal hyperfine coupling (MHz)
  double a_perp = 2.8;      // transverse hyperfine coupling (MHz)
  double t2_star = 1.8;     // electron dephasing time (us)
  double p0 = 0.91;         // thermal-cycle nuclear polarization after laser init
  double f1 = 4320.0;       // electron transition frequency, nucleus up (MHz)
  double f2 = 4306.5;       // electron transition frequency, nucleus down (MHz)
  double f_rf = 496.0;      // nuclear transition frequency in ms=0 (kHz)
  double rf_pi = 45.0;      // nuclear pi-pulse duration (us)
  double mw_pi_f1 = 234.0;  // electron pi-pulse duration on f1 (ns)
  double mw_pi_f2 = 154.0;  // electron pi-pulse duration on f2 (ns)
  double detune1 = 1.0;     // MW1 drive offset from f1 (MHz)
  double detune2 = -1.0;    // MW2 drive offset from f2 (MHz)

  // derived quantities used throughout
  double drive_frequency(MwStep s) const {  // MHz
    return s == MwStep::MW1 ? f1 + detune1 : f2 + detune2;
  }
  double pi_duration_us(MwStep s) const {
    return 1e-3 * (s == MwStep::MW1 ? mw_pi_f1 : mw_pi_f2);
  }
  double rabi_rate(MwStep s) const { return 1.0 / (2.0 * pi_duration_us(s)); }  // MHz
  double f_rf_mhz() const { return 1e-3 * f_rf; }
  double rf_rabi_rate() const { return 1.0 / (2.0 * rf_pi); }  // MHz
  double field_up() const { return a_zz / (2.0 * gamma_e); }   // Gauss; field_down = -field_up

  // throws std::invalid_argument on out-of-range values or if f1 - f2
  // disagrees with a_zz by more than 0.1 MHz
  void validate() const;
};

// parse "key = value" lines ('#' comments, blank lines allowed) on top of defaults;
// unknown keys and malformed numbers throw std::invalid_argument with the line number
PhysicalParams parse_params(const std::string& text);
PhysicalParams load_params(const std::filesystem::path& path);

// apply one assignment; returns false if the key is not a PhysicalParams field
// (shared with the run-config loader, which owns additional keys)
bool set_param_field(PhysicalParams& p, const std::string& key, double value);

} // namespace qatm
