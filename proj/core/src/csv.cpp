#include "nhep/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nhep::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    out += "\r\n";
}

}  // namespace

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
    std::string out;
    append_line(out, header);
    std::vector<std::string> cells;
    for (const auto& row : rows) {
        cells.clear();
        for (double v : row) cells.push_back(format_double(v));
        append_line(out, cells);
    }
    return out;
}

std::string render_mixed(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    append_line(out, header);
    for (const auto& row : rows) append_line(out, row);
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace nhep::csv
