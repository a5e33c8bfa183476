// RFC-4180-style CSV output: header row, CRLF line endings, floating-point
// fields printed with 17 significant digits.
#pragma once

#include <string>
#include <vector>

namespace nhep::csv {

std::string format_double(double v);

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

/// Render with leading string cells per row (e.g. verdict columns).
std::string render_mixed(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

/// Throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace nhep::csv
