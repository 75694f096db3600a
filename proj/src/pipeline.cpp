#include <cmath>
#include <future>
#include <stdexcept>

#include "qatm/analysis.hpp"

namespace qatm {

std::vector<double> PipelineOptions::default_tau_grid() { return uniform_grid(0.0, 6.0, 0.05); }

void PipelineOptions::validate() const {
  if (tau_grid_us.size() < 2)
    throw std::invalid_argument("pipeline: tau grid needs at least two points");
  if (pad_factor < 1) throw std::invalid_argument("pipeline: pad_factor must be >= 1");
  if (!(b_th > 0.0)) throw std::invalid_argument("pipeline: b_th must be positive");
  if (!(resolution >= 0.0)) throw std::invalid_argument("pipeline: resolution must be >= 0");
  if (groups < 2) throw std::invalid_argument("pipeline: need at least two groups");
  readout.validate();
}

std::vector<double> default_theta_grid() {
  std::vector<double> thetas(15);
  for (int k = 0; k < 15; ++k) thetas[k] = k * pi / 14.0;
  return thetas;
}

namespace {

// counts trace -> artifact-ready field distribution
FieldSpectrum field_from_counts(const TimeTrace& counts, const PhysicalParams& p,
                                const PipelineOptions& opt, const TimeTrace& other_counts) {
  auto process = [&](const TimeTrace& c) {
    TimeTrace prob = normalize_counts(c, opt.readout);
    FrequencySpectrum spec =
        fft_spectrum(prob, opt.window, opt.pad_factor, normalized_variance(c, opt.readout));
    debias_spectrum(spec);
    return map_to_field(spec, p);
  };
  return counts.step == MwStep::MW1 ? stitch(process(counts), process(other_counts))
                                    : stitch(process(other_counts), process(counts));
}

Moments windowed_moments(const FieldSpectrum& field, const PhysicalParams& p,
                         const PipelineOptions& opt) {
  FieldSpectrum f = field;
  if (opt.artifact_epsilon)
    f = subtract_artifact(f, *opt.artifact_epsilon, opt.b_th, p.field_up());
  return atmosphere_moments(f, opt.b_th, p.field_up());
}

// elementwise sum of count records (the union of their shots)
TimeTrace merge_counts(const std::vector<TimeTrace>& parts) {
  TimeTrace out = parts.front();
  for (size_t g = 1; g < parts.size(); ++g) {
    out.shots += parts[g].shots;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += parts[g].values[i];
  }
  return out;
}

} // namespace

AtmosphereResult run_atmosphere(const PhysicalParams& p, double theta,
                                const PipelineOptions& opt, std::uint64_t seed) {
  p.validate();
  opt.validate();

  RamseyOptions ropt = opt.ramsey;
  TimeTrace prob1 = run_ramsey(p, theta, MwStep::MW1, opt.tau_grid_us, ropt);
  TimeTrace prob2 = run_ramsey(p, theta, MwStep::MW2, opt.tau_grid_us, ropt);
  const double p_state = ropt.polarization.value_or(p.p0) * std::cos(theta);

  AtmosphereResult result;
  result.report.theta = theta;
  result.report.p_nominal = p_state;
  result.report.seed = seed;

  if (opt.noiseless) {
    FieldSpectrum field = stitch(map_to_field(fft_spectrum(prob1, opt.window, opt.pad_factor), p),
                                 map_to_field(fft_spectrum(prob2, opt.window, opt.pad_factor), p));
    if (opt.artifact_epsilon)
      field = subtract_artifact(field, *opt.artifact_epsilon, opt.b_th, p.field_up());
    const Moments m = atmosphere_moments(field, opt.b_th, p.field_up());
    result.report.delta_b = m.delta_b;
    result.report.delta_b2 = m.delta_b2;
    result.report.gamma = symmetry_indicator(m.delta_b, m.delta_b2, opt.resolution);
    result.report.shots = 0;
    result.spectrum = std::move(field);
    result.trace_mw1 = std::move(prob1);
    result.trace_mw2 = std::move(prob2);
    return result;
  }

  // shot budget split into independent groups; centre values come from the
  // pooled record, error bars from the scatter between groups
  const long shots_per_group = opt.readout.shots / opt.groups;
  const long remainder = opt.readout.shots - shots_per_group * opt.groups;
  std::vector<TimeTrace> counts1, counts2;
  std::vector<double> db_groups, db2_groups;
  for (int g = 0; g < opt.groups; ++g) {
    ReadoutModel group_model = opt.readout;
    group_model.shots = shots_per_group + (g < remainder ? 1 : 0);
    counts1.push_back(sample_counts(prob1, group_model, derive_seed(seed, 1, g + 1)));
    counts2.push_back(sample_counts(prob2, group_model, derive_seed(seed, 2, g + 1)));
    FieldSpectrum field_g = field_from_counts(counts1.back(), p, opt, counts2.back());
    const Moments mg = windowed_moments(field_g, p, opt);
    db_groups.push_back(mg.delta_b);
    db2_groups.push_back(mg.delta_b2);
  }

  TimeTrace pooled1 = merge_counts(counts1);
  TimeTrace pooled2 = merge_counts(counts2);
  FieldSpectrum field = field_from_counts(pooled1, p, opt, pooled2);
  if (opt.artifact_epsilon)
    field = subtract_artifact(field, *opt.artifact_epsilon, opt.b_th, p.field_up());
  const Moments m = atmosphere_moments(field, opt.b_th, p.field_up());

  result.report.delta_b = m.delta_b;
  result.report.delta_b2 = m.delta_b2;
  result.report.delta_b_err = group_error_bars(db_groups).second;
  result.report.delta_b2_err = group_error_bars(db2_groups).second;
  result.report.gamma = symmetry_indicator(m.delta_b, m.delta_b2, opt.resolution);
  result.report.shots = pooled1.shots;
  result.spectrum = std::move(field);
  result.trace_mw1 = std::move(pooled1);
  result.trace_mw2 = std::move(pooled2);
  return result;
}

ArtifactCalibration calibrate_artifact(const PhysicalParams& p, const PipelineOptions& opt) {
  // leakage fraction at full polarization: weight that ends up in the empty
  // window divided by the total weight in both windows, noiseless, unsubtracted
  PipelineOptions cal = opt;
  cal.noiseless = true;
  cal.artifact_epsilon.reset();

  auto leakage = [&](double pol) {
    cal.ramsey.polarization = pol;
    const FieldSpectrum field = run_atmosphere(p, 0.0, cal, 0).spectrum;
    double m_plus = 0.0, m_minus = 0.0;
    const double bc = p.field_up();
    for (size_t i = 0; i < field.field_gauss.size(); ++i) {
      const double b = field.field_gauss[i];
      if (std::abs(b - bc) <= cal.b_th) m_plus += field.weights[i];
      if (std::abs(b + bc) <= cal.b_th) m_minus += field.weights[i];
    }
    return (pol > 0.0 ? m_minus : m_plus) / (m_plus + m_minus);
  };

  ArtifactCalibration out;
  out.epsilon_up = leakage(1.0);
  out.epsilon_down = leakage(-1.0);
  return out;
}

std::vector<AtmosphereReport> phase_diagram(const PhysicalParams& p,
                                            const std::vector<double>& thetas,
                                            const PipelineOptions& opt, std::uint64_t seed) {
  if (thetas.empty()) throw std::invalid_argument("phase_diagram: no states requested");
  std::vector<std::future<AtmosphereReport>> futures;
  futures.reserve(thetas.size());
  for (size_t k = 0; k < thetas.size(); ++k)
    futures.push_back(std::async(std::launch::async, [&, k] {
      return run_atmosphere(p, thetas[k], opt, derive_seed(seed, 100 + k)).report;
    }));
  std::vector<AtmosphereReport> reports;
  reports.reserve(thetas.size());
  for (auto& f : futures) reports.push_back(f.get());
  return reports;
}

} // namespace qatm
