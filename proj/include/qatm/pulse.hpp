#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qatm/spin_model.hpp"

namespace qatm {

// ---------------------------------------------------------------------------
// pulse sequence representation
// ---------------------------------------------------------------------------

enum class RfMode { ideal, driven };    // instantaneous rotation vs resonant drive
enum class PulseMode { finite, ideal }; // microwave pulses: real burst vs rotation

struct LaserInit {            // optical pumping: reset to initial_state(p)
  double p = 0.91;
};
struct RfRotation {           // nuclear rotation about x by theta within ms=0
  double theta = 0.0;
  RfMode mode = RfMode::ideal;
};
struct MwPulse {              // microwave drive burst on one transition
  MwStep step = MwStep::MW1;
  double dur_ns = 0.0;
  double phase = 0.0;         // radians
};
struct FreeEvolution {        // free Hamiltonian for tau, then dephasing(tau)
  double tau_us = 0.0;
};
struct Readout {};            // record electron_ground_population

using PulseSegment = std::variant<LaserInit, RfRotation, MwPulse, FreeEvolution, Readout>;

struct PulseSequence {
  std::vector<PulseSegment> segments;
  // throws std::invalid_argument unless every duration is finite and >= 0,
  // |p| <= 1, and any Readout is the final segment
  void validate() const;
};

// rotating-frame bookkeeping while a sequence executes: free evolution uses the
// frame of the most recent microwave step (MW1 before any pulse has been seen)
struct SequenceContext {
  MwStep frame = MwStep::MW1;
  PulseMode pulse_mode = PulseMode::finite;
  DephasingShape dephasing = DephasingShape::exponential;
  bool include_transverse = false;
};

Matrix4c apply_segment(const Matrix4c& rho, const PulseSegment& seg,
                       const PhysicalParams& p, SequenceContext& ctx);
Matrix4c apply_segment(const Matrix4c& rho, const PulseSegment& seg,
                       const PhysicalParams& p);

// run a validated sequence from the maximally mixed state (a LaserInit segment
// overwrites it); returns the final density matrix
Matrix4c run_sequence(const PhysicalParams& p, const PulseSequence& seq,
                      SequenceContext ctx = {});

// ---------------------------------------------------------------------------
// recorded data
// ---------------------------------------------------------------------------

enum class TraceKind { probability, counts };

// one detection record per evolution time; values are either the noiseless
// bright-state probability or sampled photon counts
struct TimeTrace {
  MwStep step = MwStep::MW1;
  TraceKind kind = TraceKind::probability;
  long shots = 0;             // 0 for noiseless probabilities
  std::uint64_t seed = 0;
  std::vector<double> tau_us;  // strictly increasing, uniform spacing
  std::vector<double> values;

  double dt() const;           // grid spacing (validated)
  void validate() const;       // throws std::invalid_argument
};

// swept-frequency scan (continuous-wave style spectroscopy)
struct FrequencyScan {
  std::vector<double> freq_mhz;
  std::vector<double> values;  // bright-state probability after the probe pulse
};

// start, start+step, ..., last point <= stop + step/2
std::vector<double> uniform_grid(double start, double stop, double step);

// ---------------------------------------------------------------------------
// canned protocols
// ---------------------------------------------------------------------------

struct RamseyOptions {
  PulseMode pulse_mode = PulseMode::finite;
  RfMode rf_mode = RfMode::ideal;
  DephasingShape dephasing = DephasingShape::exponential;
  bool include_transverse = false;
  std::optional<double> polarization;  // override the laser-init polarization
};

// two -pi/2- pulse interferometry on one detection step:
//   laser(p0) -> rf(theta) -> mw pi/2 -> free(tau) -> mw pi/2 -> readout
// evaluated on each tau of the grid
TimeTrace run_ramsey(const PhysicalParams& p, double theta, MwStep step,
                     const std::vector<double>& tau_grid_us,
                     const RamseyOptions& opt = {});

// driven electron oscillation: laser(p0) -> rf(theta) -> mw(dur) -> readout
TimeTrace run_rabi(const PhysicalParams& p, MwStep step,
                   const std::vector<double>& dur_grid_ns, double theta = 0.0);

// driven nuclear oscillation: laser(p0) -> rf burst of varying duration;
// values are the nuclear spin-up population (1 + polarization)/2
TimeTrace run_nuclear_rabi(const PhysicalParams& p,
                           const std::vector<double>& dur_grid_us);

// pulsed spectroscopy: a weak probe pulse of fixed length swept in frequency;
// dips appear at the electron transitions weighted by nuclear populations
FrequencyScan run_odmr(const PhysicalParams& p,
                       const std::vector<double>& freq_grid_mhz,
                       double theta = 0.0, double probe_rabi_mhz = 0.2,
                       double probe_dur_us = 2.5);

} // namespace qatm
