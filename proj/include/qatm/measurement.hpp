#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qatm/pulse.hpp"

namespace qatm {

// photon statistics of optical readout: mean counts per point are
//   mu = shots * (rate_dark + (rate_bright - rate_dark) * p)
// where p is the bright-state probability
struct ReadoutModel {
  double rate_bright = 0.030;  // counts per shot, electron in ms=0
  double rate_dark = 0.021;    // counts per shot, electron in ms=-1
  long shots = 600000;

  double expected_counts(double p) const;
  void validate() const;  // throws std::invalid_argument
};

// ---------------------------------------------------------------------------
// deterministic random numbers (fixed across platforms, unlike std::poisson)
// ---------------------------------------------------------------------------

// splitmix64 stream
struct Rng {
  std::uint64_t state = 0;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
};

// counter-based seed derivation: independent stream per (seed, a, b)
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Poisson sample, exact inversion for small mean, Hormann's transformed
// rejection (PTRS) above; deterministic given the stream state
long poisson_sample(double mean, Rng& rng);

// ---------------------------------------------------------------------------
// detection and normalization
// ---------------------------------------------------------------------------

// probability trace -> photon-count trace; point i uses the independent
// stream derive_seed(seed, i), so the result does not depend on evaluation
// order. The output records model.shots and the seed.
TimeTrace sample_counts(const TimeTrace& prob, const ReadoutModel& model,
                        std::uint64_t seed);

// invert the affine count model back to an estimated probability trace,
// clamped to [0, 1]; uses the shot count recorded in the trace
TimeTrace normalize_counts(const TimeTrace& counts, const ReadoutModel& model);

// per-point variance of the normalized probability implied by Poisson counts:
//   var(p_hat_i) = counts_i / (shots * (rate_bright - rate_dark))^2
std::vector<double> normalized_variance(const TimeTrace& counts,
                                        const ReadoutModel& model);

// mean and standard error of independent group estimates (n >= 2):
//   (mean, sample_sd / sqrt(n))
std::pair<double, double> group_error_bars(const std::vector<double>& groups);

} // namespace qatm
