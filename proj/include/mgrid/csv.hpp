#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgrid/errors.hpp"

namespace mgrid {

// Minimal strict CSV: comma separated, one header row, no quoting or embedded
// commas (none of our schemas need them). Blank lines and lines starting with
// '#' are skipped. All errors carry file:line.
class CsvTable {
  public:
    static CsvTable read_file(const std::string& path);
    static CsvTable from_string(const std::string& text, const std::string& name = "<string>");

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return cells_.size(); }

    // Column index by header name; throws DataError when `required`.
    std::optional<std::size_t> column(const std::string& name) const;
    std::size_t column_required(const std::string& name) const;

    const std::string& cell(std::size_t row, std::size_t col) const;
    // Empty cell -> nullopt. Malformed number -> DataError with file:line.
    std::optional<double> cell_number(std::size_t row, std::size_t col) const;
    double cell_number_required(std::size_t row, std::size_t col) const;
    bool cell_bool(std::size_t row, std::size_t col) const;

    // 1-based line number of a data row, for error messages.
    std::size_t line_of(std::size_t row) const { return lines_[row]; }
    std::string where(std::size_t row) const;

    const std::string& name() const { return name_; }

  private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> cells_;
    std::vector<std::size_t> lines_;
};

// Writes rows as-is; caller is responsible for not emitting commas in cells.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Canonical number formatting used by every writer so that identical inputs
// produce byte-identical files.
std::string format_number(double v);

}  // namespace mgrid
