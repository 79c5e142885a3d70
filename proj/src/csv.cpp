#include "crossarea/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crossarea/error.hpp"

namespace crossarea::csv {

std::string format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
    require(!header_.empty(), ErrorCode::invalid_argument, "CSV header is empty");
}

Table& Table::row(std::vector<std::string> cells) {
    require(cells.size() == header_.size(), ErrorCode::invalid_argument,
            "CSV row width does not match the header");
    rows_.push_back(std::move(cells));
    return *this;
}

namespace {
void put_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += escape(cells[i]);
    }
    out += '\n';
}
}  // namespace

std::string Table::str() const {
    std::string out;
    put_line(out, header_);
    for (const auto& r : rows_) put_line(out, r);
    return out;
}

void Table::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
    const std::string s = str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) fail(ErrorCode::io, "write failed for " + path.string());
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}
}  // namespace

Table read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(f, line)) fail(ErrorCode::io, path.string() + " is empty");
    Table t(split_line(line));
    while (std::getline(f, line)) {
        if (!line.empty()) t.row(split_line(line));
    }
    return t;
}

}  // namespace crossarea::csv
