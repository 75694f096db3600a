#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qatm/measurement.hpp"
#include "qatm/pulse.hpp"

namespace qatm {

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

enum class SpectralWindow { none, hann };

// one-sided magnitude spectrum of a (mean-subtracted, optionally windowed,
// zero-padded) time trace; freq_mhz runs 0 .. 1/(2 dt)
struct FrequencySpectrum {
  MwStep step = MwStep::MW1;
  std::vector<double> freq_mhz;
  std::vector<double> magnitude;
  // expected shot-noise power |X|^2 per bin (flat across bins); 0 for
  // noiseless input. Filled when the point variances are supplied.
  double noise_power = 0.0;
};

FrequencySpectrum fft_spectrum(const TimeTrace& trace, SpectralWindow window,
                               int pad_factor);
// same, recording the shot-noise floor sum(var_i * w_i^2) for debiasing
FrequencySpectrum fft_spectrum(const TimeTrace& trace, SpectralWindow window,
                               int pad_factor,
                               const std::vector<double>& point_variance);

// remove the mean shot-noise power from a magnitude spectrum in quadrature:
//   m -> sqrt(max(m^2 - noise_power, 0))
// a no-op when noise_power is 0, so noiseless pipelines are untouched
void debias_spectrum(FrequencySpectrum& spec);

// ---------------------------------------------------------------------------
// field axis
// ---------------------------------------------------------------------------

// weight distribution over the magnetic field felt by the electron, on a
// uniform ascending field grid (Gauss); weights are nonnegative
struct FieldSpectrum {
  std::vector<double> field_gauss;
  std::vector<double> weights;
  std::string provenance;  // "MW1", "MW2" or "MW1+MW2"

  double norm() const;       // sum of weights
  double bin_width() const;  // uniform grid spacing (validated)
  void validate() const;
};

// convert fringe frequency to field. The step's reference frequency is the
// bare electron transition (f1 or f2) shifted by -/+ a_zz/2, i.e. the
// hyperfine-free line center, so the nuclear-up line lands at +a_zz/(2 gamma_e)
// and the nuclear-down line at the mirror position:
//   MW1:  B = (f_drive - nu - (f1 - a_zz/2)) / gamma_e   (descending in nu)
//   MW2:  B = (f_drive + nu - (f2 + a_zz/2)) / gamma_e   (ascending in nu)
FieldSpectrum map_to_field(const FrequencySpectrum& spec, const PhysicalParams& p);

// merge the two detection steps into one symmetric field axis: B > 0 comes
// from MW1, B < 0 from MW2, the B = 0 bin is their average. Both inputs are
// resampled (linear interpolation) onto a common grid k * bin_width centered
// on zero; bin widths must agree to 1e-9 relative.
FieldSpectrum stitch(const FieldSpectrum& mw1, const FieldSpectrum& mw2);

// ---------------------------------------------------------------------------
// moments of the field distribution
// ---------------------------------------------------------------------------

struct Moments {
  double delta_b = 0.0;   // first moment (Gauss)
  double delta_b2 = 0.0;  // central second moment (Gauss^2)
};

// restrict to the two windows |B -/+ b_center| <= b_th, normalize the enclosed
// weight, and take mean and variance. Throws if the windows are empty.
Moments atmosphere_moments(const FieldSpectrum& spec, double b_th, double b_center);

// closed-form moments of the two-line distribution at nuclear polarization p:
// masses (1+p)/2 at +B_up, (1-p)/2 at -B_up with B_up = a_zz/(2 gamma_e).
//   delta_b  = p * B_up
//   delta_b2 = (1 - p^2) * B_up^2          (standard variance)
//            = (1 - p^2) * B_up^2 / 2      (quadratic variant: the sum of
//                                           squared line moments minus delta_b^2)
enum class VarianceVariant { standard, quadratic };
Moments theory_moments(double p, const PhysicalParams& params,
                       VarianceVariant variant = VarianceVariant::standard);

// symmetry indicator gamma = delta_b2 / delta_b^2; empty (divergent) when
// |delta_b| <= resolution
std::optional<double> symmetry_indicator(double delta_b, double delta_b2,
                                         double resolution = 0.05);

// invert delta_b = p * B_up
double natural_polarization(double delta_b, const PhysicalParams& params);

// effective low-energy description of the sensor spin coupled to the nuclear
// bath: a mean-field term linear in the polarization plus a fluctuation term
// set by the bath stiffness a0
struct TheoryParams {
  double a_zz = 13.56;  // longitudinal coupling (MHz)
  double a0 = 0.0;      // bath stiffness (MHz), > 0 when used
  double p = 0.0;       // nuclear polarization
};

struct FreeEnergyCoefficients {
  double c1 = 0.0;  // coefficient of I_z s_z: a_zz * p
  double c2 = 0.0;  // coefficient of s_z s_z: a_zz^2 / (4 a0)
};
FreeEnergyCoefficients free_energy_coefficients(const TheoryParams& tp);

// ---------------------------------------------------------------------------
// detection artifacts
// ---------------------------------------------------------------------------

// Spectral leakage of the strong line into the opposite window (finite pulse
// bandwidth plus aliased far-detuned fringes) puts a spurious fraction of the
// two-window weight on the wrong side. Calibrated from noiseless fully-
// polarized runs, where the opposite window should be empty.
struct ArtifactCalibration {
  double epsilon_up = 0.0;    // leakage fraction measured at p = +1
  double epsilon_down = 0.0;  // leakage fraction measured at p = -1
  double epsilon() const { return 0.5 * (epsilon_up + epsilon_down); }
};

// remove the leakage symmetrically: each window loses epsilon times the other
// window's weight, clamped at zero; bins outside the windows are untouched
FieldSpectrum subtract_artifact(const FieldSpectrum& spec, double epsilon,
                                double b_th, double b_center);

// ---------------------------------------------------------------------------
// model fits
// ---------------------------------------------------------------------------

// least-squares fit of offset + amp * exp(-(tau/t2)^shape_power) * cos(2 pi f tau + phase)
// at a known fringe frequency; linear in everything but t2, which is found by
// golden-section search
struct RamseyEnvelopeFit {
  double t2 = 0.0;
  double amplitude = 0.0;  // >= 0
  double phase = 0.0;
  double offset = 0.0;
};
RamseyEnvelopeFit fit_ramsey_envelope(const TimeTrace& trace, double fringe_mhz,
                                      DephasingShape shape = DephasingShape::exponential);

// index of the largest magnitude and its axis value
double spectrum_peak(const std::vector<double>& axis, const std::vector<double>& mag);

// full width at half maximum of the lineshape around its peak, by linear
// interpolation between bins
double fwhm(const std::vector<double>& axis, const std::vector<double>& mag);

// frequencies of the `count` deepest dips, each at least min_sep_mhz apart,
// sorted descending (the upper transition first)
std::vector<double> find_dips(const FrequencyScan& scan, size_t count, double min_sep_mhz);

// evolution time of the first local minimum of a trace
double first_minimum(const TimeTrace& trace);

// ---------------------------------------------------------------------------
// end-to-end pipeline
// ---------------------------------------------------------------------------

struct PipelineOptions {
  std::vector<double> tau_grid_us;  // default 0 .. 6 us, step 0.05
  // hann keeps rectangular-window sidelobes of the strong line from leaking
  // into the weak window, which would bias its mass once shot noise is debiased
  SpectralWindow window = SpectralWindow::hann;
  int pad_factor = 8;
  double b_th = 0.178;              // window half-width (Gauss)
  double resolution = 0.05;         // divergence threshold on |delta_b| (Gauss)
  VarianceVariant variant = VarianceVariant::standard;
  bool noiseless = false;
  ReadoutModel readout{};
  int groups = 3;                   // error-bar subdivisions of the shot budget
  std::optional<double> artifact_epsilon;  // subtract when set
  RamseyOptions ramsey{};

  static std::vector<double> default_tau_grid();
  void validate() const;
};

// one polarization state: moments, uncertainties and the symmetry indicator
struct AtmosphereReport {
  double theta = 0.0;
  double p_nominal = 0.0;           // p0 * cos(theta)
  double delta_b = 0.0;
  double delta_b_err = 0.0;
  double delta_b2 = 0.0;
  double delta_b2_err = 0.0;
  std::optional<double> gamma;      // empty = divergent
  long shots = 0;                   // 0 when noiseless
  std::uint64_t seed = 0;
};

struct AtmosphereResult {
  AtmosphereReport report;
  FieldSpectrum spectrum;           // stitched (artifact-subtracted if requested)
  TimeTrace trace_mw1, trace_mw2;   // pooled detection records
};

// Ramsey on both steps -> (sampling -> normalization -> debiased) spectra ->
// field mapping -> stitch -> optional artifact subtraction -> windowed moments.
// Central values come from the pooled trace; error bars are the standard error
// over `groups` independent subdivisions of the shot budget (0 when noiseless).
AtmosphereResult run_atmosphere(const PhysicalParams& p, double theta,
                                const PipelineOptions& opt, std::uint64_t seed);

// moments measured from noiseless runs at p = +1 / -1 with no subtraction
ArtifactCalibration calibrate_artifact(const PhysicalParams& p,
                                       const PipelineOptions& opt);

// the full polarization sweep, one report per theta (parallel over states;
// state k uses the independent seed derive_seed(seed, k))
std::vector<AtmosphereReport> phase_diagram(const PhysicalParams& p,
                                            const std::vector<double>& thetas,
                                            const PipelineOptions& opt,
                                            std::uint64_t seed);

// 15 evenly spaced rotation angles 0 .. pi
std::vector<double> default_theta_grid();

} // namespace qatm
