#include "qatm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qatm {

// ---------------------------------------------------------------------------
// readout model
// ---------------------------------------------------------------------------

double ReadoutModel::expected_counts(double p) const {
  return shots * (rate_dark + (rate_bright - rate_dark) * p);
}

void ReadoutModel::validate() const {
  if (!(rate_bright > rate_dark) || !(rate_dark > 0.0))
    throw std::invalid_argument("readout rates must satisfy rate_bright > rate_dark > 0");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
}

// ---------------------------------------------------------------------------
// deterministic rng
// ---------------------------------------------------------------------------

namespace {

// splitmix64 finalizer (Stafford mix13)
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t Rng::next() {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return (next() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

// Poisson by inversion (small mean) or Hormann's PTRS transformed rejection;
// both consume uniforms only, so results are identical on every platform
namespace {

long poisson_inversion(double mean, Rng& rng) {
  // chop the cdf walk at a generous bound to keep it finite
  const double expm = std::exp(-mean);
  long k = 0;
  double prod = rng.uniform();
  while (prod > expm && k < 1000) {
    prod *= rng.uniform();
    ++k;
  }
  return k;
}

double log_factorial(double k) { return std::lgamma(k + 1.0); }

long poisson_ptrs(double mean, Rng& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - log_factorial(k))
      return static_cast<long>(k);
  }
}

} // namespace

long poisson_sample(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_sample: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  return mean < 10.0 ? poisson_inversion(mean, rng) : poisson_ptrs(mean, rng);
}

// ---------------------------------------------------------------------------
// detection
// ---------------------------------------------------------------------------

TimeTrace sample_counts(const TimeTrace& prob, const ReadoutModel& model, std::uint64_t seed) {
  prob.validate();
  model.validate();
  if (prob.kind != TraceKind::probability)
    throw std::invalid_argument("sample_counts: input must be a probability trace");
  TimeTrace out = prob;
  out.kind = TraceKind::counts;
  out.shots = model.shots;
  out.seed = seed;
  for (size_t i = 0; i < prob.values.size(); ++i) {
    Rng rng(derive_seed(seed, i));  // independent stream per point
    out.values[i] = static_cast<double>(poisson_sample(model.expected_counts(prob.values[i]), rng));
  }
  return out;
}

TimeTrace normalize_counts(const TimeTrace& counts, const ReadoutModel& model) {
  counts.validate();
  model.validate();
  if (counts.kind != TraceKind::counts)
    throw std::invalid_argument("normalize_counts: input must be a counts trace");
  if (counts.shots < 1)
    throw std::invalid_argument("normalize_counts: trace lacks a shot count");
  TimeTrace out = counts;
  out.kind = TraceKind::probability;
  const double span = model.rate_bright - model.rate_dark;
  for (double& v : out.values) {
    double p = (v / counts.shots - model.rate_dark) / span;
    v = std::clamp(p, 0.0, 1.0);
  }
  return out;
}

std::vector<double> normalized_variance(const TimeTrace& counts, const ReadoutModel& model) {
  counts.validate();
  model.validate();
  if (counts.kind != TraceKind::counts)
    throw std::invalid_argument("normalized_variance: input must be a counts trace");
  const double denom = counts.shots * (model.rate_bright - model.rate_dark);
  std::vector<double> var(counts.values.size());
  for (size_t i = 0; i < var.size(); ++i) var[i] = counts.values[i] / (denom * denom);
  return var;
}

std::pair<double, double> group_error_bars(const std::vector<double>& groups) {
  const size_t n = groups.size();
  if (n < 2) throw std::invalid_argument("group_error_bars: need at least two groups");
  double mean = 0.0;
  for (double g : groups) mean += g;
  mean /= n;
  double ss = 0.0;
  for (double g : groups) ss += (g - mean) * (g - mean);
  const double sd = std::sqrt(ss / (n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n))};
}

} // namespace qatm
