#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qatm/pulse.hpp"

namespace qatm {

// Line-oriented pulse-sequence language, one segment per line:
//   laser p=<float>
//   rf theta=<float> [mode=ideal|driven]
//   mw step=<MW1|MW2> dur_ns=<float> [phase=<float>]
//   free tau_us=<float>
//   readout
// '#' starts a comment; blank lines are ignored.

enum class ParseCode {
  unknown_keyword,
  unknown_argument,
  duplicate_argument,
  missing_argument,
  malformed_argument,   // not of the form name=value
  invalid_number,
  invalid_enum,
  negative_duration,
  invalid_polarization,
  readout_not_last,
};

struct ParseDiagnostic {
  ParseCode code = ParseCode::unknown_keyword;
  int line = 0;                       // 1-based
  int column = 0;                     // 1-based
  std::string token;                  // offending text
  std::vector<std::string> expected;  // acceptable alternatives, if enumerable
  std::string message() const;        // human-readable single line
};

// exactly one of sequence/diagnostic is set; parsing never throws on
// arbitrary byte input
struct ParseResult {
  std::optional<PulseSequence> sequence;
  std::optional<ParseDiagnostic> diagnostic;
  bool ok() const { return sequence.has_value(); }
};

ParseResult parse_sequence(std::string_view text);

// canonical text form: fixed argument order, 9 significant digits, arguments
// at their default value (rf mode=ideal, mw phase=0) omitted.
// parse_sequence(serialize_sequence(s)) reproduces s exactly.
std::string serialize_sequence(const PulseSequence& seq);

} // namespace qatm
