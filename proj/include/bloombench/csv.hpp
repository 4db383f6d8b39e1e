#pragma once

// Minimal CSV reading for label and prediction files: comma separated,
// optional double-quoted fields with "" escapes, no embedded newlines.

#include <string>
#include <string_view>
#include <vector>

namespace bloombench::csv {

std::vector<std::string> split_line(std::string_view line);
std::string trim(std::string_view s);

}  // namespace bloombench::csv
