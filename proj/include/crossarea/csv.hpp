#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace crossarea::csv {

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format(double v);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(const std::string& field);

/// In-memory table rendered as UTF-8 CSV with LF line endings.
class Table {
  public:
    explicit Table(std::vector<std::string> header);

    Table& row(std::vector<std::string> cells);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Minimal reader for files written by Table (quoted fields supported).
Table read(const std::filesystem::path& path);

}  // namespace crossarea::csv
