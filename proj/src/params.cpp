#include "qatm/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "config_detail.hpp"

namespace qatm {

void PhysicalParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
  };
  positive(d_zfs, "d_zfs");
  positive(b_ext, "b_ext");
  positive(gamma_e, "gamma_e");
  positive(gamma_n, "gamma_n");
  positive(a_zz, "a_zz");
  positive(t2_star, "t2_star");
  positive(f1, "f1");
  positive(f2, "f2");
  positive(f_rf, "f_rf");
  positive(rf_pi, "rf_pi");
  positive(mw_pi_f1, "mw_pi_f1");
  positive(mw_pi_f2, "mw_pi_f2");
  if (!(a_perp >= 0.0) || !std::isfinite(a_perp))
    throw std::invalid_argument("a_perp must be nonnegative and finite");
  if (!std::isfinite(detune1) || !std::isfinite(detune2))
    throw std::invalid_argument("detunings must be finite");
  if (!(std::abs(p0) <= 1.0))
    throw std::invalid_argument("p0 must lie in [-1, 1]");
  // the two electron lines are split by the longitudinal hyperfine coupling
  if (std::abs(f1 - f2 - a_zz) > 0.1)
    throw std::invalid_argument("f1 - f2 inconsistent with a_zz (|f1-f2-a_zz| > 0.1 MHz)");
}

bool set_param_field(PhysicalParams& p, const std::string& key, double value) {
  static const std::unordered_map<std::string, double PhysicalParams::*> fields = {
      {"d_zfs", &PhysicalParams::d_zfs},       {"b_ext", &PhysicalParams::b_ext},
      {"gamma_e", &PhysicalParams::gamma_e},   {"gamma_n", &PhysicalParams::gamma_n},
      {"a_zz", &PhysicalParams::a_zz},         {"a_perp", &PhysicalParams::a_perp},
      {"t2_star", &PhysicalParams::t2_star},   {"p0", &PhysicalParams::p0},
      {"f1", &PhysicalParams::f1},             {"f2", &PhysicalParams::f2},
      {"f_rf", &PhysicalParams::f_rf},         {"rf_pi", &PhysicalParams::rf_pi},
      {"mw_pi_f1", &PhysicalParams::mw_pi_f1}, {"mw_pi_f2", &PhysicalParams::mw_pi_f2},
      {"detune1", &PhysicalParams::detune1},   {"detune2", &PhysicalParams::detune2},
  };
  auto it = fields.find(key);
  if (it == fields.end()) return false;
  p.*(it->second) = value;
  return true;
}

namespace detail {

namespace {

// strip comment and surrounding whitespace
std::string clean_line(std::string line) {
  if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
  auto first = line.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  auto last = line.find_last_not_of(" \t\r\n");
  return line.substr(first, last - first + 1);
}

} // namespace

void for_each_config_entry(
    const std::string& text,
    const std::function<void(const std::string&, const std::string&, int)>& fn) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = clean_line(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = clean_line(line.substr(0, eq));
    std::string value = clean_line(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    fn(key, value, lineno);
  }
}

double parse_config_number(const std::string& value, int lineno) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(lineno) + ": '" + value +
                                "' is not a number");
  }
}

long parse_config_integer(const std::string& value, int lineno) {
  try {
    size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(lineno) + ": '" + value +
                                "' is not an integer");
  }
}

} // namespace detail

PhysicalParams parse_params(const std::string& text) {
  PhysicalParams p;
  detail::for_each_config_entry(text, [&](const std::string& key, const std::string& value,
                                          int lineno) {
    if (!set_param_field(p, key, detail::parse_config_number(value, lineno)))
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown parameter '" +
                                  key + "'");
  });
  p.validate();
  return p;
}

PhysicalParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

} // namespace qatm
