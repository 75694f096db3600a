#include "qatm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qatm {

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// time traces
// ---------------------------------------------------------------------------

std::string trace_to_csv(const TimeTrace& t) {
  t.validate();
  std::ostringstream out;
  out << "# step=" << to_string(t.step)
      << " kind=" << (t.kind == TraceKind::probability ? "probability" : "counts")
      << " shots=" << t.shots << " seed=" << t.seed << "\n";
  out << "tau_us,value\n";
  for (size_t i = 0; i < t.tau_us.size(); ++i)
    out << format_sig(t.tau_us[i]) << ',' << format_sig(t.values[i]) << "\n";
  return out.str();
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

double parse_double(const std::string& s, int lineno) {
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
}

} // namespace

TimeTrace trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  TimeTrace t;
  int lineno = 0;
  bool saw_header = false, saw_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "step") {
          if (value != "MW1" && value != "MW2")
            throw std::invalid_argument("csv: unknown step '" + value + "'");
          t.step = value == "MW1" ? MwStep::MW1 : MwStep::MW2;
        } else if (key == "kind") {
          if (value != "probability" && value != "counts")
            throw std::invalid_argument("csv: unknown kind '" + value + "'");
          t.kind = value == "probability" ? TraceKind::probability : TraceKind::counts;
        } else if (key == "shots") {
          t.shots = static_cast<long>(parse_double(value, lineno));
        } else if (key == "seed") {
          t.seed = static_cast<std::uint64_t>(std::stoull(value));
        }
      }
      saw_header = true;
      continue;
    }
    if (!saw_columns) {
      if (line != "tau_us,value")
        throw std::invalid_argument("csv: expected 'tau_us,value' column header");
      saw_columns = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 2)
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected two cells");
    t.tau_us.push_back(parse_double(cells[0], lineno));
    t.values.push_back(parse_double(cells[1], lineno));
  }
  if (!saw_header || !saw_columns)
    throw std::invalid_argument("csv: missing metadata or column header");
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

std::string field_spectrum_to_csv(const FieldSpectrum& s) {
  s.validate();
  std::ostringstream out;
  out << "# provenance=" << s.provenance << "\n";
  out << "field_gauss,weight\n";
  for (size_t i = 0; i < s.field_gauss.size(); ++i)
    out << format_sig(s.field_gauss[i]) << ',' << format_sig(s.weights[i]) << "\n";
  return out.str();
}

FieldSpectrum field_spectrum_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FieldSpectrum s;
  int lineno = 0;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find("provenance=");
      if (eq != std::string::npos) s.provenance = line.substr(eq + 11);
      continue;
    }
    if (!saw_columns) {
      if (line != "field_gauss,weight")
        throw std::invalid_argument("csv: expected 'field_gauss,weight' column header");
      saw_columns = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 2)
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected two cells");
    s.field_gauss.push_back(parse_double(cells[0], lineno));
    s.weights.push_back(parse_double(cells[1], lineno));
  }
  if (!saw_columns) throw std::invalid_argument("csv: missing column header");
  s.validate();
  return s;
}

std::string frequency_spectrum_to_csv(const FrequencySpectrum& s) {
  std::ostringstream out;
  out << "# step=" << to_string(s.step) << "\n";
  out << "freq_mhz,magnitude\n";
  for (size_t i = 0; i < s.freq_mhz.size(); ++i)
    out << format_sig(s.freq_mhz[i]) << ',' << format_sig(s.magnitude[i]) << "\n";
  return out.str();
}

std::string frequency_scan_to_csv(const FrequencyScan& s) {
  std::ostringstream out;
  out << "freq_mhz,value\n";
  for (size_t i = 0; i < s.freq_mhz.size(); ++i)
    out << format_sig(s.freq_mhz[i]) << ',' << format_sig(s.values[i]) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

std::string report_to_text(const AtmosphereReport& r) {
  std::ostringstream out;
  out << "theta: " << format_sig(r.theta) << "\n";
  out << "p_nominal: " << format_sig(r.p_nominal) << "\n";
  out << "delta_b: " << format_sig(r.delta_b) << "\n";
  out << "delta_b_err: " << format_sig(r.delta_b_err) << "\n";
  out << "delta_b2: " << format_sig(r.delta_b2) << "\n";
  out << "delta_b2_err: " << format_sig(r.delta_b2_err) << "\n";
  out << "gamma: " << (r.gamma ? format_sig(*r.gamma) : std::string("divergent")) << "\n";
  out << "shots: " << r.shots << "\n";
  out << "seed: " << r.seed << "\n";
  return out.str();
}

std::string phase_diagram_to_csv(const std::vector<AtmosphereReport>& rows) {
  std::ostringstream out;
  out << "theta,p_nominal,delta_b,delta_b_err,delta_b2,delta_b2_err,gamma\n";
  for (const auto& r : rows) {
    out << format_sig(r.theta) << ',' << format_sig(r.p_nominal) << ',' << format_sig(r.delta_b)
        << ',' << format_sig(r.delta_b_err) << ',' << format_sig(r.delta_b2) << ','
        << format_sig(r.delta_b2_err) << ','
        << (r.gamma ? format_sig(*r.gamma) : std::string("divergent")) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace qatm
