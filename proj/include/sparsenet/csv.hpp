#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sparsenet {

/// %.17g, so that every finite double survives a text round trip.
std::string format_double(double value);

/// Splits one CSV line on commas (no quoting; none of our files need it).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace sparsenet
