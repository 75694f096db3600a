#pragma once

// shared internals of the key=value config format (params.cpp, run_config.cpp)

#include <functional>
#include <string>

namespace qatm::detail {

// invoke fn(key, value, line_number) per assignment; '#' comments and blank
// lines skipped; throws std::invalid_argument on lines without 'key = value'
void for_each_config_entry(
    const std::string& text,
    const std::function<void(const std::string&, const std::string&, int)>& fn);

double parse_config_number(const std::string& value, int lineno);
long parse_config_integer(const std::string& value, int lineno);

} // namespace qatm::detail
