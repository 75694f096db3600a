#include "qatm/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qatm {

// ---------------------------------------------------------------------------
// sequence validation
// ---------------------------------------------------------------------------

namespace {

void require_finite_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

} // namespace

void PulseSequence::validate() const {
  for (size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (auto* laser = std::get_if<LaserInit>(&seg)) {
      if (!std::isfinite(laser->p) || std::abs(laser->p) > 1.0)
        throw std::invalid_argument("laser polarization must lie in [-1, 1]");
    } else if (auto* rf = std::get_if<RfRotation>(&seg)) {
      if (!std::isfinite(rf->theta))
        throw std::invalid_argument("rf angle must be finite");
    } else if (auto* mw = std::get_if<MwPulse>(&seg)) {
      require_finite_nonneg(mw->dur_ns, "mw duration");
      if (!std::isfinite(mw->phase)) throw std::invalid_argument("mw phase must be finite");
    } else if (auto* fr = std::get_if<FreeEvolution>(&seg)) {
      require_finite_nonneg(fr->tau_us, "free-evolution time");
    } else if (std::holds_alternative<Readout>(seg)) {
      if (i + 1 != segments.size())
        throw std::invalid_argument("readout must be the final segment");
    }
  }
}

// ---------------------------------------------------------------------------
// segment execution
// ---------------------------------------------------------------------------

Matrix4c apply_segment(const Matrix4c& rho, const PulseSegment& seg,
                       const PhysicalParams& p, SequenceContext& ctx) {
  if (auto* laser = std::get_if<LaserInit>(&seg)) {
    return initial_state(laser->p);
  }
  if (auto* rf = std::get_if<RfRotation>(&seg)) {
    if (rf->mode == RfMode::ideal) {
      Matrix4c u = nuclear_rotation(rf->theta);
      return u * rho * u.adjoint();
    }
    // resonant drive in the nuclear rotating frame; angle theta takes
    // theta/pi times the calibrated pi duration, during which any electron
    // coherence keeps dephasing
    const double dur_us = std::abs(rf->theta) / pi * p.rf_pi;
    Matrix4c h = Matrix4c::Zero();
    const double sign = rf->theta < 0.0 ? -1.0 : 1.0;
    h(0, 1) = sign * 0.5 * p.rf_rabi_rate();
    h(1, 0) = sign * 0.5 * p.rf_rabi_rate();
    Matrix4c out = propagate_unitary(rho, h, dur_us);
    return apply_dephasing(out, dur_us, p.t2_star, ctx.dephasing);
  }
  if (auto* mw = std::get_if<MwPulse>(&seg)) {
    ctx.frame = mw->step;
    if (ctx.pulse_mode == PulseMode::ideal) {
      // instantaneous selective rotation by the angle the burst would reach
      // on resonance; the unaddressed manifold is untouched
      const double angle = 2.0 * pi * p.rabi_rate(mw->step) * mw->dur_ns * 1e-3;
      Matrix4c u = selective_mw_rotation(mw->step, angle, mw->phase);
      return u * rho * u.adjoint();
    }
    Matrix4c h = build_driven_hamiltonian(p, mw->step, p.rabi_rate(mw->step), mw->phase,
                                          ctx.include_transverse);
    return propagate_unitary(rho, h, mw->dur_ns * 1e-3);
  }
  if (auto* fr = std::get_if<FreeEvolution>(&seg)) {
    Matrix4c h = build_free_hamiltonian(p, ctx.frame, ctx.include_transverse);
    Matrix4c out = propagate_unitary(rho, h, fr->tau_us);
    return apply_dephasing(out, fr->tau_us, p.t2_star, ctx.dephasing);
  }
  return rho;  // Readout: state untouched; caller records the population
}

Matrix4c apply_segment(const Matrix4c& rho, const PulseSegment& seg,
                       const PhysicalParams& p) {
  SequenceContext ctx;
  return apply_segment(rho, seg, p, ctx);
}

Matrix4c run_sequence(const PhysicalParams& p, const PulseSequence& seq,
                      SequenceContext ctx) {
  seq.validate();
  Matrix4c rho = 0.25 * Matrix4c::Identity();
  for (const auto& seg : seq.segments) rho = apply_segment(rho, seg, p, ctx);
  return rho;
}

// ---------------------------------------------------------------------------
// recorded data
// ---------------------------------------------------------------------------

void TimeTrace::validate() const {
  if (tau_us.size() != values.size())
    throw std::invalid_argument("trace: time and value arrays differ in length");
  if (tau_us.size() < 2) throw std::invalid_argument("trace: need at least two points");
  const double step = tau_us[1] - tau_us[0];
  if (!(step > 0.0)) throw std::invalid_argument("trace: times must be increasing");
  for (size_t i = 1; i < tau_us.size(); ++i) {
    const double d = tau_us[i] - tau_us[i - 1];
    if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
      throw std::invalid_argument("trace: time grid must be uniform");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("trace: values must be finite");
    if (kind == TraceKind::probability && (v < -1e-9 || v > 1.0 + 1e-9))
      throw std::invalid_argument("trace: probabilities must lie in [0, 1]");
    if (kind == TraceKind::counts && (v < 0.0 || v != std::floor(v)))
      throw std::invalid_argument("trace: counts must be nonnegative integers");
  }
}

double TimeTrace::dt() const {
  validate();
  return tau_us[1] - tau_us[0];
}

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start))
    throw std::invalid_argument("uniform_grid: need step > 0 and stop >= start");
  const int n = static_cast<int>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = start + i * step;
  return g;
}

// ---------------------------------------------------------------------------
// protocols
// ---------------------------------------------------------------------------

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

} // namespace

TimeTrace run_ramsey(const PhysicalParams& p, double theta, MwStep step,
                     const std::vector<double>& tau_grid_us, const RamseyOptions& opt) {
  p.validate();
  const double p_init = opt.polarization.value_or(p.p0);
  const double half_pi_ns = 0.5 * p.pi_duration_us(step) * 1e3;

  TimeTrace trace;
  trace.step = step;
  trace.kind = TraceKind::probability;
  trace.tau_us = tau_grid_us;
  trace.values.reserve(tau_grid_us.size());

  for (double tau : tau_grid_us) {
    PulseSequence seq;
    seq.segments = {LaserInit{p_init},
                    RfRotation{theta, opt.rf_mode},
                    MwPulse{step, half_pi_ns, 0.0},
                    FreeEvolution{tau},
                    MwPulse{step, half_pi_ns, 0.0},
                    Readout{}};
    SequenceContext ctx{step, opt.pulse_mode, opt.dephasing, opt.include_transverse};
    trace.values.push_back(clamp01(electron_ground_population(run_sequence(p, seq, ctx))));
  }
  trace.validate();
  return trace;
}

TimeTrace run_rabi(const PhysicalParams& p, MwStep step,
                   const std::vector<double>& dur_grid_ns, double theta) {
  p.validate();
  TimeTrace trace;
  trace.step = step;
  trace.kind = TraceKind::probability;
  trace.tau_us.reserve(dur_grid_ns.size());
  trace.values.reserve(dur_grid_ns.size());
  for (double dur : dur_grid_ns) {
    PulseSequence seq;
    seq.segments = {LaserInit{p.p0}, RfRotation{theta}, MwPulse{step, dur, 0.0}, Readout{}};
    SequenceContext ctx{step, PulseMode::finite, DephasingShape::exponential, false};
    trace.tau_us.push_back(dur * 1e-3);
    trace.values.push_back(clamp01(electron_ground_population(run_sequence(p, seq, ctx))));
  }
  trace.validate();
  return trace;
}

TimeTrace run_nuclear_rabi(const PhysicalParams& p, const std::vector<double>& dur_grid_us) {
  p.validate();
  TimeTrace trace;
  trace.kind = TraceKind::probability;
  trace.tau_us = dur_grid_us;
  trace.values.reserve(dur_grid_us.size());
  for (double dur : dur_grid_us) {
    // drive the nuclear transition for dur; record the spin-up population,
    // (1 + polarization)/2, which optical readout accesses via a selective pi
    Matrix4c rho = initial_state(p.p0);
    Matrix4c h = Matrix4c::Zero();
    h(0, 1) = 0.5 * p.rf_rabi_rate();
    h(1, 0) = 0.5 * p.rf_rabi_rate();
    rho = propagate_unitary(rho, h, dur);
    trace.values.push_back(clamp01(0.5 * (1.0 + nuclear_polarization(rho))));
  }
  trace.validate();
  return trace;
}

FrequencyScan run_odmr(const PhysicalParams& p, const std::vector<double>& freq_grid_mhz,
                       double theta, double probe_rabi_mhz, double probe_dur_us) {
  p.validate();
  if (!(probe_rabi_mhz > 0.0) || !(probe_dur_us > 0.0))
    throw std::invalid_argument("run_odmr: probe rate and duration must be positive");
  FrequencyScan scan;
  scan.freq_mhz = freq_grid_mhz;
  scan.values.reserve(freq_grid_mhz.size());
  for (double f : freq_grid_mhz) {
    Matrix4c rho = initial_state(p.p0);
    Matrix4c u = nuclear_rotation(theta);
    rho = u * rho * u.adjoint();
    // weak pulse at the probe frequency; fluorescence dips where it is resonant
    Matrix4c h = build_free_hamiltonian(p, f, false);
    const cx drive = 0.5 * probe_rabi_mhz;
    h(0, 2) = drive;
    h(2, 0) = drive;
    h(1, 3) = drive;
    h(3, 1) = drive;
    rho = propagate_unitary(rho, h, probe_dur_us);
    scan.values.push_back(clamp01(electron_ground_population(rho)));
  }
  return scan;
}

} // namespace qatm
