#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emscat {

// 17 significant digits, '.' separator, independent of the C locale.
std::string format_double(double v);
// Throws Parse on malformed input.
double parse_double(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace emscat
