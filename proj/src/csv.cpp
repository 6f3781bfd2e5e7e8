#include "mgrid/csv.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mgrid {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

CsvTable CsvTable::from_string(const std::string& text, const std::string& name) {
    CsvTable t;
    t.name_ = name;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto cells = split_line(line);
        if (t.header_.empty()) {
            t.header_ = cells;
            continue;
        }
        if (cells.size() != t.header_.size()) {
            throw DataError(name + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header_.size()) + " columns, got " +
                            std::to_string(cells.size()));
        }
        t.cells_.push_back(std::move(cells));
        t.lines_.push_back(lineno);
    }
    if (t.header_.empty()) throw DataError(name + ": missing header row");
    return t;
}

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    return std::nullopt;
}

std::size_t CsvTable::column_required(const std::string& name) const {
    auto c = column(name);
    if (!c) throw DataError(name_ + ": missing required column '" + name + "'");
    return *c;
}

const std::string& CsvTable::cell(std::size_t row, std::size_t col) const {
    return cells_[row][col];
}

std::optional<double> CsvTable::cell_number(std::size_t row, std::size_t col) const {
    const std::string& s = cells_[row][col];
    if (s.empty()) return std::nullopt;
    if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) {
        throw DataError(where(row) + ": malformed number '" + s + "' in column '" +
                        header_[col] + "'");
    }
    return v;
}

double CsvTable::cell_number_required(std::size_t row, std::size_t col) const {
    auto v = cell_number(row, col);
    if (!v) {
        throw DataError(where(row) + ": empty value in required column '" + header_[col] + "'");
    }
    return *v;
}

bool CsvTable::cell_bool(std::size_t row, std::size_t col) const {
    const std::string& s = cells_[row][col];
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw DataError(where(row) + ": malformed boolean '" + s + "' in column '" + header_[col] +
                    "'");
}

std::string CsvTable::where(std::size_t row) const {
    return name_ + ":" + std::to_string(lines_[row]);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw DataError(path + ": write failed");
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // Shortest representation that round-trips exactly.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace mgrid
