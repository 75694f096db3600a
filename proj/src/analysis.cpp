#include "qatm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace qatm {

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

namespace {

std::vector<double> window_weights(SpectralWindow window, size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == SpectralWindow::hann)
    for (size_t i = 0; i < n; ++i)
      w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * i / (n - 1)));
  return w;
}

FrequencySpectrum fft_impl(const TimeTrace& trace, SpectralWindow window, int pad_factor,
                           const std::vector<double>* point_variance) {
  trace.validate();
  if (pad_factor < 1) throw std::invalid_argument("fft_spectrum: pad_factor must be >= 1");
  if (point_variance && point_variance->size() != trace.values.size())
    throw std::invalid_argument("fft_spectrum: variance array length mismatch");

  const size_t n = trace.values.size();
  const double dt = trace.dt();
  const std::vector<double> w = window_weights(window, n);

  const double mean = std::accumulate(trace.values.begin(), trace.values.end(), 0.0) / n;
  const size_t m = n * static_cast<size_t>(pad_factor);
  std::vector<cx> x(m, cx(0.0, 0.0));
  for (size_t i = 0; i < n; ++i) x[i] = (trace.values[i] - mean) * w[i];

  std::vector<cx> big(m);
  Eigen::FFT<double> fft;
  fft.fwd(big, x);

  FrequencySpectrum spec;
  spec.step = trace.step;
  const size_t half = m / 2;
  spec.freq_mhz.resize(half + 1);
  spec.magnitude.resize(half + 1);
  for (size_t j = 0; j <= half; ++j) {
    spec.freq_mhz[j] = static_cast<double>(j) / (static_cast<double>(m) * dt);
    spec.magnitude[j] = std::abs(big[j]);
  }
  if (point_variance) {
    // flat shot-noise power per bin: E|sum_i n_i w_i e^{-i...}|^2 = sum var_i w_i^2
    double np = 0.0;
    for (size_t i = 0; i < n; ++i) np += (*point_variance)[i] * w[i] * w[i];
    spec.noise_power = np;
  }
  return spec;
}

} // namespace

FrequencySpectrum fft_spectrum(const TimeTrace& trace, SpectralWindow window, int pad_factor) {
  return fft_impl(trace, window, pad_factor, nullptr);
}

FrequencySpectrum fft_spectrum(const TimeTrace& trace, SpectralWindow window, int pad_factor,
                               const std::vector<double>& point_variance) {
  return fft_impl(trace, window, pad_factor, &point_variance);
}

void debias_spectrum(FrequencySpectrum& spec) {
  if (spec.noise_power < 0.0)
    throw std::invalid_argument("debias_spectrum: negative noise power");
  if (spec.noise_power == 0.0) return;
  for (double& mag : spec.magnitude)
    mag = std::sqrt(std::max(mag * mag - spec.noise_power, 0.0));
  spec.noise_power = 0.0;
}

// ---------------------------------------------------------------------------
// field axis
// ---------------------------------------------------------------------------

void FieldSpectrum::validate() const {
  if (field_gauss.size() != weights.size())
    throw std::invalid_argument("field spectrum: axis and weight lengths differ");
  if (field_gauss.size() < 2)
    throw std::invalid_argument("field spectrum: need at least two bins");
  const double step = field_gauss[1] - field_gauss[0];
  if (!(step > 0.0)) throw std::invalid_argument("field spectrum: axis must ascend");
  for (size_t i = 1; i < field_gauss.size(); ++i)
    if (std::abs(field_gauss[i] - field_gauss[i - 1] - step) > 1e-9 * std::max(1.0, step))
      throw std::invalid_argument("field spectrum: axis must be uniform");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("field spectrum: weights must be nonnegative");
}

double FieldSpectrum::norm() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double FieldSpectrum::bin_width() const {
  validate();
  return field_gauss[1] - field_gauss[0];
}

FieldSpectrum map_to_field(const FrequencySpectrum& spec, const PhysicalParams& p) {
  if (spec.freq_mhz.size() != spec.magnitude.size() || spec.freq_mhz.size() < 2)
    throw std::invalid_argument("map_to_field: malformed spectrum");
  const double half_split = 0.5 * p.a_zz;
  FieldSpectrum out;
  out.provenance = to_string(spec.step);
  const size_t n = spec.freq_mhz.size();
  out.field_gauss.resize(n);
  out.weights.resize(n);
  if (spec.step == MwStep::MW1) {
    // B = (f_drive - nu - (f1 - a_zz/2)) / gamma_e, descending in nu -> reverse
    for (size_t j = 0; j < n; ++j) {
      const size_t r = n - 1 - j;
      out.field_gauss[j] = (p.detune1 + half_split - spec.freq_mhz[r]) / p.gamma_e;
      out.weights[j] = spec.magnitude[r];
    }
  } else {
    // B = (f_drive + nu - (f2 + a_zz/2)) / gamma_e, ascending in nu
    for (size_t j = 0; j < n; ++j) {
      out.field_gauss[j] = (p.detune2 - half_split + spec.freq_mhz[j]) / p.gamma_e;
      out.weights[j] = spec.magnitude[j];
    }
  }
  out.validate();
  return out;
}

namespace {

// linear interpolation on a uniform ascending grid; 0 outside the range
double sample_spectrum(const FieldSpectrum& s, double b) {
  const double x0 = s.field_gauss.front();
  const double dx = s.field_gauss[1] - s.field_gauss[0];
  const double t = (b - x0) / dx;
  if (t < 0.0 || t > static_cast<double>(s.field_gauss.size() - 1)) return 0.0;
  const size_t i = std::min(static_cast<size_t>(t), s.field_gauss.size() - 2);
  const double frac = t - static_cast<double>(i);
  return s.weights[i] * (1.0 - frac) + s.weights[i + 1] * frac;
}

} // namespace

FieldSpectrum stitch(const FieldSpectrum& mw1, const FieldSpectrum& mw2) {
  mw1.validate();
  mw2.validate();
  const double db = mw1.bin_width();
  if (std::abs(mw2.bin_width() - db) > 1e-9 * db)
    throw std::invalid_argument("stitch: bin widths disagree");

  // symmetric grid k * db covering what both halves can supply
  const double reach = std::min(mw1.field_gauss.back(), -mw2.field_gauss.front());
  if (!(reach > 0.0)) throw std::invalid_argument("stitch: field ranges do not overlap zero");
  const long k_max = static_cast<long>(std::floor(reach / db + 1e-9));

  FieldSpectrum out;
  out.provenance = "MW1+MW2";
  out.field_gauss.reserve(2 * k_max + 1);
  out.weights.reserve(2 * k_max + 1);
  for (long k = -k_max; k <= k_max; ++k) {
    const double b = k * db;
    out.field_gauss.push_back(b);
    if (k > 0)
      out.weights.push_back(sample_spectrum(mw1, b));
    else if (k < 0)
      out.weights.push_back(sample_spectrum(mw2, b));
    else
      out.weights.push_back(0.5 * (sample_spectrum(mw1, 0.0) + sample_spectrum(mw2, 0.0)));
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// moments
// ---------------------------------------------------------------------------

namespace {

void check_window_args(double b_th, double b_center) {
  if (!(b_th > 0.0)) throw std::invalid_argument("window half-width must be positive");
  if (!(b_center > 0.0)) throw std::invalid_argument("window center must be positive");
}

bool in_windows(double b, double b_th, double b_center) {
  return std::abs(b - b_center) <= b_th || std::abs(b + b_center) <= b_th;
}

} // namespace

Moments atmosphere_moments(const FieldSpectrum& spec, double b_th, double b_center) {
  spec.validate();
  check_window_args(b_th, b_center);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < spec.field_gauss.size(); ++i) {
    const double b = spec.field_gauss[i];
    if (!in_windows(b, b_th, b_center)) continue;
    const double w = spec.weights[i];
    s0 += w;
    s1 += w * b;
    s2 += w * b * b;
  }
  if (!(s0 > 0.0))
    throw std::invalid_argument("atmosphere_moments: no weight inside the windows");
  const double mean = s1 / s0;
  return {mean, std::max(s2 / s0 - mean * mean, 0.0)};
}

Moments theory_moments(double p, const PhysicalParams& params, VarianceVariant variant) {
  if (!(std::abs(p) <= 1.0)) throw std::invalid_argument("theory_moments: |p| must be <= 1");
  const double b_up = params.field_up();
  const double delta_b = p * b_up;
  double delta_b2 = (1.0 - p * p) * b_up * b_up;
  if (variant == VarianceVariant::quadratic) delta_b2 *= 0.5;
  return {delta_b, delta_b2};
}

std::optional<double> symmetry_indicator(double delta_b, double delta_b2, double resolution) {
  if (!(resolution >= 0.0)) throw std::invalid_argument("resolution must be >= 0");
  if (std::abs(delta_b) <= resolution) return std::nullopt;
  return delta_b2 / (delta_b * delta_b);
}

double natural_polarization(double delta_b, const PhysicalParams& params) {
  return delta_b / params.field_up();
}

FreeEnergyCoefficients free_energy_coefficients(const TheoryParams& tp) {
  if (!(tp.a0 > 0.0)) throw std::invalid_argument("free_energy_coefficients: a0 must be > 0");
  return {tp.a_zz * tp.p, tp.a_zz * tp.a_zz / (4.0 * tp.a0)};
}

// ---------------------------------------------------------------------------
// artifact subtraction
// ---------------------------------------------------------------------------

FieldSpectrum subtract_artifact(const FieldSpectrum& spec, double epsilon, double b_th,
                                double b_center) {
  spec.validate();
  check_window_args(b_th, b_center);
  if (!(epsilon >= 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("subtract_artifact: epsilon must lie in [0, 1)");

  double m_plus = 0.0, m_minus = 0.0;
  for (size_t i = 0; i < spec.field_gauss.size(); ++i) {
    const double b = spec.field_gauss[i];
    if (std::abs(b - b_center) <= b_th) m_plus += spec.weights[i];
    if (std::abs(b + b_center) <= b_th) m_minus += spec.weights[i];
  }
  // each window loses epsilon times the opposite window's mass, floored at 0
  const double scale_plus = m_plus > 0.0 ? std::max(m_plus - epsilon * m_minus, 0.0) / m_plus : 1.0;
  const double scale_minus =
      m_minus > 0.0 ? std::max(m_minus - epsilon * m_plus, 0.0) / m_minus : 1.0;

  FieldSpectrum out = spec;
  for (size_t i = 0; i < out.field_gauss.size(); ++i) {
    const double b = out.field_gauss[i];
    if (std::abs(b - b_center) <= b_th)
      out.weights[i] *= scale_plus;
    else if (std::abs(b + b_center) <= b_th)
      out.weights[i] *= scale_minus;
  }
  return out;
}

// ---------------------------------------------------------------------------
// fits and lineshape helpers
// ---------------------------------------------------------------------------

namespace {

// sum of squared residuals of the best linear fit
// offset + e(tau) (a cos + b sin) at fixed t2
double envelope_sse(const TimeTrace& trace, double fringe_mhz, double t2, DephasingShape shape,
                    double* coeffs = nullptr) {
  const size_t n = trace.values.size();
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    const double tau = trace.tau_us[i];
    const double x = tau / t2;
    const double env = std::exp(shape == DephasingShape::exponential ? -x : -x * x);
    design(i, 0) = 1.0;
    design(i, 1) = env * std::cos(2.0 * pi * fringe_mhz * tau);
    design(i, 2) = env * std::sin(2.0 * pi * fringe_mhz * tau);
    y(i) = trace.values[i];
  }
  Eigen::Vector3d beta = (design.transpose() * design).ldlt().solve(design.transpose() * y);
  if (coeffs)
    for (int k = 0; k < 3; ++k) coeffs[k] = beta(k);
  return (design * beta - y).squaredNorm();
}

} // namespace

RamseyEnvelopeFit fit_ramsey_envelope(const TimeTrace& trace, double fringe_mhz,
                                      DephasingShape shape) {
  trace.validate();
  if (!(fringe_mhz > 0.0))
    throw std::invalid_argument("fit_ramsey_envelope: fringe frequency must be positive");

  // golden-section search for t2 on a generous bracket
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.05, hi = 50.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = envelope_sse(trace, fringe_mhz, x1, shape);
  double f2 = envelope_sse(trace, fringe_mhz, x2, shape);
  for (int it = 0; it < 200 && hi - lo > 1e-10 * hi; ++it) {
    if (f1 < f2) {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = envelope_sse(trace, fringe_mhz, x1, shape);
    } else {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = envelope_sse(trace, fringe_mhz, x2, shape);
    }
  }
  const double t2 = 0.5 * (lo + hi);
  double coeffs[3];
  envelope_sse(trace, fringe_mhz, t2, shape, coeffs);
  RamseyEnvelopeFit fit;
  fit.t2 = t2;
  fit.offset = coeffs[0];
  fit.amplitude = std::hypot(coeffs[1], coeffs[2]);
  fit.phase = std::atan2(-coeffs[2], coeffs[1]);
  return fit;
}

double spectrum_peak(const std::vector<double>& axis, const std::vector<double>& mag) {
  if (axis.size() != mag.size() || axis.empty())
    throw std::invalid_argument("spectrum_peak: malformed spectrum");
  const size_t i = std::distance(mag.begin(), std::max_element(mag.begin(), mag.end()));
  return axis[i];
}

std::vector<double> find_dips(const FrequencyScan& scan, size_t count, double min_sep_mhz) {
  if (scan.freq_mhz.size() != scan.values.size() || scan.freq_mhz.size() < count)
    throw std::invalid_argument("find_dips: malformed scan");
  std::vector<double> dips;
  while (dips.size() < count) {
    double best = 0.0;
    long best_i = -1;
    for (size_t i = 0; i < scan.values.size(); ++i) {
      const bool taken = std::any_of(dips.begin(), dips.end(), [&](double f) {
        return std::abs(scan.freq_mhz[i] - f) < min_sep_mhz;
      });
      if (taken) continue;
      if (best_i < 0 || scan.values[i] < best) {
        best = scan.values[i];
        best_i = static_cast<long>(i);
      }
    }
    if (best_i < 0) throw std::invalid_argument("find_dips: not enough separated dips");
    dips.push_back(scan.freq_mhz[best_i]);
  }
  std::sort(dips.rbegin(), dips.rend());
  return dips;
}

double first_minimum(const TimeTrace& trace) {
  trace.validate();
  const auto& v = trace.values;
  for (size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] < v[i - 1] && v[i] <= v[i + 1]) return trace.tau_us[i];
  throw std::invalid_argument("first_minimum: trace has no interior minimum");
}

double fwhm(const std::vector<double>& axis, const std::vector<double>& mag) {
  if (axis.size() != mag.size() || axis.size() < 3)
    throw std::invalid_argument("fwhm: malformed spectrum");
  const size_t ip = std::distance(mag.begin(), std::max_element(mag.begin(), mag.end()));
  const double half = 0.5 * mag[ip];

  auto cross = [&](long from, long step) -> double {
    for (long i = from; i + step >= 0 && i + step < static_cast<long>(mag.size()); i += step) {
      const long j = i + step;
      if (mag[j] <= half) {
        const double frac = (mag[i] - half) / (mag[i] - mag[j]);
        return axis[i] + frac * (axis[j] - axis[i]);
      }
    }
    throw std::invalid_argument("fwhm: lineshape does not fall to half maximum");
  };
  const double left = cross(static_cast<long>(ip), -1);
  const double right = cross(static_cast<long>(ip), +1);
  return right - left;
}

} // namespace qatm
