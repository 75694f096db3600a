// qatm: virtual ODMR spectrometer probing the magnetic-field distribution a
// single 13C nuclear spin presents to an NV electron-spin sensor.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qatm/analysis.hpp"
#include "qatm/csv.hpp"
#include "qatm/run_config.hpp"
#include "qatm/sequence_dsl.hpp"

using namespace qatm;

namespace {

// flags shared by every subcommand
struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool noiseless = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (default: $" +
                                                 std::string(config_env_var) + ")");
    cmd->add_option("--seed", seed, "random seed override");
    cmd->add_option("--out", out_dir, "output directory override");
    cmd->add_flag("--noiseless", noiseless, "skip photon shot noise");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_run_config(config_path);
    } else if (const char* env = std::getenv(config_env_var); env && *env) {
      cfg = load_run_config(env);
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();
    return cfg;
  }
};

std::string step_tag(MwStep step) { return step == MwStep::MW1 ? "mw1" : "mw2"; }

MwStep parse_step(const std::string& s) {
  if (s == "MW1" || s == "mw1") return MwStep::MW1;
  if (s == "MW2" || s == "mw2") return MwStep::MW2;
  throw CLI::ValidationError("--step", "must be MW1 or MW2");
}

// detection trace -> debiased frequency spectrum, as in the atmosphere pipeline
FrequencySpectrum counts_to_spectrum(const TimeTrace& counts, const RunConfig& cfg) {
  TimeTrace prob = normalize_counts(counts, cfg.readout);
  FrequencySpectrum spec = fft_spectrum(prob, cfg.window, cfg.pad_factor,
                                        normalized_variance(counts, cfg.readout));
  debias_spectrum(spec);
  return spec;
}

int cmd_ramsey(const GlobalArgs& g, double theta, const std::string& step_name) {
  const RunConfig cfg = g.resolve();
  const MwStep step = parse_step(step_name);
  const TimeTrace prob = run_ramsey(cfg.params, theta, step, cfg.tau_grid());
  const std::string tag = "ramsey_" + step_tag(step);

  write_file(cfg.output_dir / (tag + "_probability.csv"), trace_to_csv(prob));
  FrequencySpectrum spec;
  if (g.noiseless) {
    spec = fft_spectrum(prob, cfg.window, cfg.pad_factor);
  } else {
    const TimeTrace counts =
        sample_counts(prob, cfg.readout, derive_seed(cfg.seed, step == MwStep::MW1 ? 1 : 2));
    write_file(cfg.output_dir / (tag + "_counts.csv"), trace_to_csv(counts));
    spec = counts_to_spectrum(counts, cfg);
  }
  write_file(cfg.output_dir / (tag + "_spectrum.csv"), frequency_spectrum_to_csv(spec));
  return 0;
}

int cmd_rabi(const GlobalArgs& g, const std::string& step_name, double theta, bool resonant,
             double max_ns, double step_ns) {
  const RunConfig cfg = g.resolve();
  const MwStep step = parse_step(step_name);
  PhysicalParams p = cfg.params;
  if (resonant) (step == MwStep::MW1 ? p.detune1 : p.detune2) = 0.0;
  const TimeTrace trace = run_rabi(p, step, uniform_grid(0.0, max_ns, step_ns), theta);
  write_file(cfg.output_dir / ("rabi_" + step_tag(step) + ".csv"), trace_to_csv(trace));
  return 0;
}

int cmd_nrabi(const GlobalArgs& g, double max_us, double step_us) {
  const RunConfig cfg = g.resolve();
  const TimeTrace trace = run_nuclear_rabi(cfg.params, uniform_grid(0.0, max_us, step_us));
  write_file(cfg.output_dir / "nuclear_rabi.csv", trace_to_csv(trace));
  return 0;
}

int cmd_odmr(const GlobalArgs& g, double theta, double from_mhz, double to_mhz,
             double step_mhz) {
  const RunConfig cfg = g.resolve();
  const FrequencyScan scan =
      run_odmr(cfg.params, uniform_grid(from_mhz, to_mhz, step_mhz), theta);
  write_file(cfg.output_dir / "odmr.csv", frequency_scan_to_csv(scan));
  return 0;
}

int cmd_atmosphere(const GlobalArgs& g, double theta, std::optional<double> epsilon) {
  const RunConfig cfg = g.resolve();
  PipelineOptions opt = cfg.pipeline(g.noiseless);
  opt.artifact_epsilon = epsilon ? *epsilon : calibrate_artifact(cfg.params, opt).epsilon();
  const AtmosphereResult result = run_atmosphere(cfg.params, theta, opt, cfg.seed);
  write_file(cfg.output_dir / "atmosphere_spectrum.csv", field_spectrum_to_csv(result.spectrum));
  write_file(cfg.output_dir / "atmosphere_report.txt", report_to_text(result.report));
  return 0;
}

int cmd_phase_diagram(const GlobalArgs& g, int states, std::optional<double> epsilon) {
  const RunConfig cfg = g.resolve();
  if (states < 2) throw CLI::ValidationError("--states", "need at least 2");
  PipelineOptions opt = cfg.pipeline(g.noiseless);
  opt.artifact_epsilon = epsilon ? *epsilon : calibrate_artifact(cfg.params, opt).epsilon();
  // evenly spaced rotation angles 0 .. pi
  std::vector<double> thetas(states);
  for (int k = 0; k < states; ++k) thetas[k] = k * pi / (states - 1);

  const auto reports = phase_diagram(cfg.params, thetas, opt, cfg.seed);
  write_file(cfg.output_dir / "phase_diagram.csv", phase_diagram_to_csv(reports));
  for (size_t k = 0; k < reports.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%02zu.txt", k);
    write_file(cfg.output_dir / name, report_to_text(reports[k]));
  }
  return 0;
}

int cmd_calibrate(const GlobalArgs& g) {
  const RunConfig cfg = g.resolve();
  const PhysicalParams& p = cfg.params;
  std::ostringstream summary;

  // transition frequencies from swept-probe spectroscopy at both nuclear states
  const auto freq_grid = uniform_grid(p.f2 - 11.5, p.f1 + 10.0, 0.25);
  const FrequencyScan scan0 = run_odmr(p, freq_grid, 0.0);
  const FrequencyScan scan_pi = run_odmr(p, freq_grid, pi);
  write_file(cfg.output_dir / "odmr_theta0.csv", frequency_scan_to_csv(scan0));
  write_file(cfg.output_dir / "odmr_thetapi.csv", frequency_scan_to_csv(scan_pi));
  const auto dips = find_dips(scan0, 2, 4.0);
  summary << "f1_mhz: " << format_sig(dips[0]) << "\n";
  summary << "f2_mhz: " << format_sig(dips[1]) << "\n";

  // electron pi durations from resonant driving, each step addressed with its
  // nuclear manifold filled (rf pi before the MW2 scan)
  PhysicalParams resonant = p;
  resonant.detune1 = 0.0;
  resonant.detune2 = 0.0;
  const auto dur_grid = uniform_grid(0.0, 600.0, 2.0);
  const TimeTrace rabi1 = run_rabi(resonant, MwStep::MW1, dur_grid, 0.0);
  const TimeTrace rabi2 = run_rabi(resonant, MwStep::MW2, dur_grid, pi);
  write_file(cfg.output_dir / "rabi_mw1.csv", trace_to_csv(rabi1));
  write_file(cfg.output_dir / "rabi_mw2.csv", trace_to_csv(rabi2));
  summary << "mw_pi_f1_ns: " << format_sig(first_minimum(rabi1) * 1e3) << "\n";
  summary << "mw_pi_f2_ns: " << format_sig(first_minimum(rabi2) * 1e3) << "\n";

  // nuclear pi duration: spin-up population reaches its first minimum
  const TimeTrace nrabi = run_nuclear_rabi(p, uniform_grid(0.0, 90.0, 0.5));
  write_file(cfg.output_dir / "nuclear_rabi.csv", trace_to_csv(nrabi));
  summary << "rf_pi_us: " << format_sig(first_minimum(nrabi)) << "\n";

  // dephasing time from the noiseless fringe envelope
  const TimeTrace ramsey = run_ramsey(p, 0.0, MwStep::MW1, cfg.tau_grid());
  const auto fit = fit_ramsey_envelope(ramsey, std::abs(p.detune1));
  summary << "t2_star_us: " << format_sig(fit.t2) << "\n";

  // detection leakage at full polarization
  const ArtifactCalibration art = calibrate_artifact(p, cfg.pipeline(true));
  summary << "epsilon_up: " << format_sig(art.epsilon_up) << "\n";
  summary << "epsilon_down: " << format_sig(art.epsilon_down) << "\n";
  summary << "epsilon: " << format_sig(art.epsilon()) << "\n";

  write_file(cfg.output_dir / "calibration.txt", summary.str());
  return 0;
}

int cmd_theory(double p_value, const std::string& variant_name, std::optional<double> a0) {
  PhysicalParams params;
  VarianceVariant variant;
  if (variant_name == "standard")
    variant = VarianceVariant::standard;
  else if (variant_name == "quadratic")
    variant = VarianceVariant::quadratic;
  else
    throw CLI::ValidationError("--variant", "must be standard or quadratic");

  const Moments m = theory_moments(p_value, params, variant);
  const auto gamma = symmetry_indicator(m.delta_b, m.delta_b2);
  std::cout << "p: " << format_sig(p_value) << "\n";
  std::cout << "delta_b_gauss: " << format_sig(m.delta_b) << "\n";
  std::cout << "delta_b2_gauss2: " << format_sig(m.delta_b2) << "\n";
  std::cout << "gamma: " << (gamma ? format_sig(*gamma) : std::string("divergent")) << "\n";
  if (a0) {
    const auto c = free_energy_coefficients({params.a_zz, *a0, p_value});
    std::cout << "c1_mhz: " << format_sig(c.c1) << "\n";
    std::cout << "c2_mhz: " << format_sig(c.c2) << "\n";
  }
  return 0;
}

int cmd_parse(const std::string& path) {
  const ParseResult result = parse_sequence(read_file(path));
  if (!result.ok()) {
    std::cerr << path << ": " << result.diagnostic->message() << "\n";
    return 1;
  }
  std::cout << serialize_sequence(*result.sequence);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual ODMR spectrometer: NV sensor reading a single 13C nuclear spin"};
  app.require_subcommand(1);
  int rc = 0;

  GlobalArgs g;
  double theta = 0.0;
  std::string step_name = "MW1";
  bool resonant = false;
  double max_ns = 600.0, step_ns = 2.0;
  double max_us = 90.0, step_us = 0.5;
  double from_mhz = 4295.0, to_mhz = 4330.0, step_mhz = 0.25;
  int states = 15;
  std::optional<double> epsilon;
  double p_value = 0.0;
  std::string variant_name = "standard";
  std::optional<double> a0;
  std::string seq_path;

  auto* ramsey = app.add_subcommand("ramsey", "two-pulse interferometry on one detection step");
  ramsey->add_option("--theta", theta, "nuclear rotation angle (rad)");
  ramsey->add_option("--step", step_name, "detection step (MW1|MW2)");
  g.attach(ramsey);
  ramsey->callback([&] { rc = cmd_ramsey(g, theta, step_name); });

  auto* rabi = app.add_subcommand("rabi", "driven electron oscillation");
  rabi->add_option("--step", step_name, "detection step (MW1|MW2)");
  rabi->add_option("--theta", theta, "nuclear rotation before the drive (rad)");
  rabi->add_flag("--resonant", resonant, "zero the drive detuning");
  rabi->add_option("--max-ns", max_ns, "longest pulse (ns)");
  rabi->add_option("--step-ns", step_ns, "duration increment (ns)");
  g.attach(rabi);
  rabi->callback([&] { rc = cmd_rabi(g, step_name, theta, resonant, max_ns, step_ns); });

  auto* nrabi = app.add_subcommand("nrabi", "driven nuclear oscillation");
  nrabi->add_option("--max-us", max_us, "longest pulse (us)");
  nrabi->add_option("--step-us", step_us, "duration increment (us)");
  g.attach(nrabi);
  nrabi->callback([&] { rc = cmd_nrabi(g, max_us, step_us); });

  auto* odmr = app.add_subcommand("odmr", "swept-probe transition spectroscopy");
  odmr->add_option("--theta", theta, "nuclear rotation angle (rad)");
  odmr->add_option("--from", from_mhz, "scan start (MHz)");
  odmr->add_option("--to", to_mhz, "scan end (MHz)");
  odmr->add_option("--step-mhz", step_mhz, "scan increment (MHz)");
  g.attach(odmr);
  odmr->callback([&] { rc = cmd_odmr(g, theta, from_mhz, to_mhz, step_mhz); });

  auto* atmosphere = app.add_subcommand("atmosphere", "field distribution at one state");
  atmosphere->add_option("--theta", theta, "nuclear rotation angle (rad)");
  atmosphere->add_option("--epsilon", epsilon, "artifact fraction to subtract (default: self-calibrated)");
  g.attach(atmosphere);
  atmosphere->callback([&] { rc = cmd_atmosphere(g, theta, epsilon); });

  auto* phase = app.add_subcommand("phase-diagram", "sweep of polarized states");
  phase->add_option("--states", states, "number of evenly spaced angles 0..pi");
  phase->add_option("--epsilon", epsilon, "artifact fraction to subtract (default: self-calibrated)");
  g.attach(phase);
  phase->callback([&] { rc = cmd_phase_diagram(g, states, epsilon); });

  auto* calibrate = app.add_subcommand("calibrate", "reproduce the instrument calibrations");
  g.attach(calibrate);
  calibrate->callback([&] { rc = cmd_calibrate(g); });

  auto* theory = app.add_subcommand("theory", "closed-form moments for a polarization");
  theory->add_option("--p", p_value, "nuclear polarization")->required();
  theory->add_option("--variant", variant_name, "fluctuation formula (standard|quadratic)");
  theory->add_option("--a0", a0, "bath stiffness (MHz): also print coupling coefficients");
  g.attach(theory);
  theory->callback([&] { rc = cmd_theory(p_value, variant_name, a0); });

  auto* parse = app.add_subcommand("parse", "check a pulse-sequence file");
  parse->add_option("file", seq_path, "sequence file (.seq)")->required();
  g.attach(parse);
  parse->callback([&] { rc = cmd_parse(seq_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
