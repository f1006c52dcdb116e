#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tokengraph
{

// RFC 4180 style: fields may be double-quoted, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

} // namespace tokengraph
