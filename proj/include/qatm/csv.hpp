#pragma once

#include <filesystem>
#include <string>

#include "qatm/analysis.hpp"
#include "qatm/pulse.hpp"

namespace qatm {

// all numeric output uses 12 significant digits ('%.12g'); sequence text 9

std::string format_sig(double v, int digits = 12);

// TimeTrace CSV: '# step=MW1 kind=probability shots=0 seed=0' header,
// 'tau_us,value' column line, one row per point
std::string trace_to_csv(const TimeTrace& t);
TimeTrace trace_from_csv(const std::string& text);  // throws on malformed input

// FieldSpectrum CSV: '# provenance=MW1+MW2' header, then 'field_gauss,weight'
std::string field_spectrum_to_csv(const FieldSpectrum& s);
FieldSpectrum field_spectrum_from_csv(const std::string& text);

// FrequencySpectrum CSV: 'freq_mhz,magnitude'; FrequencyScan CSV: 'freq_mhz,value'
std::string frequency_spectrum_to_csv(const FrequencySpectrum& s);
std::string frequency_scan_to_csv(const FrequencyScan& s);

// AtmosphereReport as 'key: value' lines; gamma prints 'divergent' when empty
std::string report_to_text(const AtmosphereReport& r);

// combined sweep CSV: theta,p_nominal,delta_b,delta_b_err,delta_b2,delta_b2_err,gamma
std::string phase_diagram_to_csv(const std::vector<AtmosphereReport>& rows);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace qatm
