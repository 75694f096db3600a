#include "qatm/sequence_dsl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace qatm {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

// whitespace-separated tokens of one line with their start columns
std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

struct LineParser {
  int lineno;
  std::optional<ParseDiagnostic> diag;

  void fail(ParseCode code, const Token& tok, std::vector<std::string> expected = {}) {
    if (diag) return;
    diag = ParseDiagnostic{code, lineno, tok.column, tok.text, std::move(expected)};
  }

  // tokens[1..] as name=value pairs; names outside `known` are rejected
  struct Arg {
    Token name_tok;
    std::string value;
    bool used = false;
  };
  std::vector<Arg> args;

  bool collect_args(const std::vector<Token>& tokens, const std::vector<std::string>& known) {
    for (size_t i = 1; i < tokens.size(); ++i) {
      const Token& tok = tokens[i];
      auto eq = tok.text.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.text.size()) {
        fail(ParseCode::malformed_argument, tok);
        return false;
      }
      std::string name = tok.text.substr(0, eq);
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        fail(ParseCode::unknown_argument, {name, tok.column}, known);
        return false;
      }
      for (const Arg& a : args)
        if (a.name_tok.text == name) {
          fail(ParseCode::duplicate_argument, {name, tok.column});
          return false;
        }
      args.push_back({{name, tok.column}, tok.text.substr(eq + 1)});
    }
    return true;
  }

  const Arg* find(const std::string& name) {
    for (Arg& a : args)
      if (a.name_tok.text == name) {
        a.used = true;
        return &a;
      }
    return nullptr;
  }

  std::optional<double> require_number(const Token& keyword, const std::string& name) {
    const Arg* a = find(name);
    if (!a) {
      fail(ParseCode::missing_argument, keyword, {name});
      return std::nullopt;
    }
    const char* s = a->value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s + a->value.size() || !std::isfinite(v)) {
      fail(ParseCode::invalid_number, {a->value, a->name_tok.column});
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> optional_number(const std::string& name, double fallback) {
    const Arg* a = find(name);
    if (!a) return fallback;
    const char* s = a->value.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s + a->value.size() || !std::isfinite(v)) {
      fail(ParseCode::invalid_number, {a->value, a->name_tok.column});
      return std::nullopt;
    }
    return v;
  }
};

const std::vector<std::string> keywords = {"laser", "rf", "mw", "free", "readout"};

std::string sig9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

} // namespace

std::string ParseDiagnostic::message() const {
  static const char* names[] = {
      "unknown keyword",    "unknown argument",     "duplicate argument",
      "missing argument",   "malformed argument",   "invalid number",
      "invalid enum value", "negative duration",    "invalid polarization",
      "readout not last",
  };
  std::ostringstream out;
  out << "line " << line << ", col " << column << ": " << names[static_cast<int>(code)]
      << " '" << token << "'";
  if (!expected.empty()) {
    out << " (expected ";
    for (size_t i = 0; i < expected.size(); ++i) out << (i ? ", " : "") << expected[i];
    out << ")";
  }
  return out.str();
}

ParseResult parse_sequence(std::string_view text) {
  PulseSequence seq;
  int lineno = 0;
  std::optional<int> readout_line;

  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                          : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    auto tokens = tokenize(line);
    if (tokens.empty()) continue;

    LineParser lp{lineno, {}, {}};
    const Token& kw = tokens[0];

    if (readout_line) {
      // a previous readout was not the final segment
      return {std::nullopt,
              ParseDiagnostic{ParseCode::readout_not_last, *readout_line, 1, "readout", {}}};
    }

    if (kw.text == "laser") {
      if (!lp.collect_args(tokens, {"p"})) return {std::nullopt, lp.diag};
      auto p = lp.require_number(kw, "p");
      if (!p) return {std::nullopt, lp.diag};
      if (std::abs(*p) > 1.0) {
        lp.fail(ParseCode::invalid_polarization, {sig9(*p), lp.find("p")->name_tok.column});
        return {std::nullopt, lp.diag};
      }
      seq.segments.push_back(LaserInit{*p});
    } else if (kw.text == "rf") {
      if (!lp.collect_args(tokens, {"theta", "mode"})) return {std::nullopt, lp.diag};
      auto theta = lp.require_number(kw, "theta");
      if (!theta) return {std::nullopt, lp.diag};
      RfMode mode = RfMode::ideal;
      if (const auto* a = lp.find("mode")) {
        if (a->value == "ideal")
          mode = RfMode::ideal;
        else if (a->value == "driven")
          mode = RfMode::driven;
        else {
          lp.fail(ParseCode::invalid_enum, {a->value, a->name_tok.column}, {"ideal", "driven"});
          return {std::nullopt, lp.diag};
        }
      }
      seq.segments.push_back(RfRotation{*theta, mode});
    } else if (kw.text == "mw") {
      if (!lp.collect_args(tokens, {"step", "dur_ns", "phase"})) return {std::nullopt, lp.diag};
      const auto* st = lp.find("step");
      if (!st) {
        lp.fail(ParseCode::missing_argument, kw, {"step"});
        return {std::nullopt, lp.diag};
      }
      MwStep step;
      if (st->value == "MW1")
        step = MwStep::MW1;
      else if (st->value == "MW2")
        step = MwStep::MW2;
      else {
        lp.fail(ParseCode::invalid_enum, {st->value, st->name_tok.column}, {"MW1", "MW2"});
        return {std::nullopt, lp.diag};
      }
      auto dur = lp.require_number(kw, "dur_ns");
      if (!dur) return {std::nullopt, lp.diag};
      if (*dur < 0.0) {
        lp.fail(ParseCode::negative_duration, {sig9(*dur), lp.find("dur_ns")->name_tok.column});
        return {std::nullopt, lp.diag};
      }
      auto phase = lp.optional_number("phase", 0.0);
      if (!phase) return {std::nullopt, lp.diag};
      seq.segments.push_back(MwPulse{step, *dur, *phase});
    } else if (kw.text == "free") {
      if (!lp.collect_args(tokens, {"tau_us"})) return {std::nullopt, lp.diag};
      auto tau = lp.require_number(kw, "tau_us");
      if (!tau) return {std::nullopt, lp.diag};
      if (*tau < 0.0) {
        lp.fail(ParseCode::negative_duration, {sig9(*tau), lp.find("tau_us")->name_tok.column});
        return {std::nullopt, lp.diag};
      }
      seq.segments.push_back(FreeEvolution{*tau});
    } else if (kw.text == "readout") {
      if (tokens.size() > 1) {
        lp.fail(ParseCode::unknown_argument, tokens[1]);
        return {std::nullopt, lp.diag};
      }
      seq.segments.push_back(Readout{});
      readout_line = lineno;
    } else {
      lp.fail(ParseCode::unknown_keyword, kw, keywords);
      return {std::nullopt, lp.diag};
    }
  }
  return {std::move(seq), std::nullopt};
}

std::string serialize_sequence(const PulseSequence& seq) {
  std::ostringstream out;
  for (const auto& seg : seq.segments) {
    if (const auto* laser = std::get_if<LaserInit>(&seg)) {
      out << "laser p=" << sig9(laser->p) << '\n';
    } else if (const auto* rf = std::get_if<RfRotation>(&seg)) {
      out << "rf theta=" << sig9(rf->theta);
      if (rf->mode == RfMode::driven) out << " mode=driven";
      out << '\n';
    } else if (const auto* mw = std::get_if<MwPulse>(&seg)) {
      out << "mw step=" << to_string(mw->step) << " dur_ns=" << sig9(mw->dur_ns);
      if (mw->phase != 0.0) out << " phase=" << sig9(mw->phase);
      out << '\n';
    } else if (const auto* fr = std::get_if<FreeEvolution>(&seg)) {
      out << "free tau_us=" << sig9(fr->tau_us) << '\n';
    } else {
      out << "readout\n";
    }
  }
  return out.str();
}

} // namespace qatm
