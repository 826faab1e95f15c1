#include "selfboost/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "selfboost/error.hpp"

namespace selfboost {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{}) {
        throw Error(ErrorCode::IoError, "cannot parse number '" + text + "' in " + context);
    }
    return value;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

bool is_missing(const std::string& cell) {
    std::string t = trim(cell);
    if (t.empty()) return true;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    return t == "nan" || t == "na" || t == "null";
}

}  // namespace

SeriesCsv read_series_csv(const std::string& path, bool interpolate_missing) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::IoError, "'" + path + "' is empty");
    }
    const auto header = split_line(line);
    int value_col = -1;
    int timestamp_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == "value") value_col = static_cast<int>(i);
        if (name == "timestamp") timestamp_col = static_cast<int>(i);
    }
    if (value_col < 0) {
        throw Error(ErrorCode::IoError, "'" + path + "' has no 'value' column");
    }

    SeriesCsv out;
    std::vector<bool> missing;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (static_cast<int>(cells.size()) <= value_col) {
            throw Error(ErrorCode::IoError,
                        path + ":" + std::to_string(line_no) + ": too few columns");
        }
        if (timestamp_col >= 0) out.timestamps.push_back(trim(cells[static_cast<std::size_t>(timestamp_col)]));
        const std::string& cell = cells[static_cast<std::size_t>(value_col)];
        if (is_missing(cell)) {
            if (!interpolate_missing) {
                throw Error(ErrorCode::MissingValue, path + ":" + std::to_string(line_no) +
                                                         ": missing value (use --interpolate-missing)");
            }
            out.values.push_back(0.0);
            missing.push_back(true);
        } else {
            out.values.push_back(parse_double(cell, path + ":" + std::to_string(line_no)));
            missing.push_back(false);
        }
    }
    if (out.values.empty()) {
        throw Error(ErrorCode::IoError, "'" + path + "' has no data rows");
    }

    if (interpolate_missing) {
        const int n = static_cast<int>(out.values.size());
        if (missing.front() || missing.back()) {
            throw Error(ErrorCode::MissingValue,
                        "'" + path + "': leading/trailing missing values cannot be interpolated");
        }
        int i = 0;
        while (i < n) {
            if (!missing[static_cast<std::size_t>(i)]) {
                ++i;
                continue;
            }
            const int gap_start = i;
            while (i < n && missing[static_cast<std::size_t>(i)]) ++i;
            const int gap_end = i;  // one past the last missing index
            const double left = out.values[static_cast<std::size_t>(gap_start - 1)];
            const double right = out.values[static_cast<std::size_t>(gap_end)];
            const int span = gap_end - gap_start + 1;
            for (int k = gap_start; k < gap_end; ++k) {
                const double t = static_cast<double>(k - gap_start + 1) / static_cast<double>(span);
                out.values[static_cast<std::size_t>(k)] = left + t * (right - left);
                ++out.interpolated_count;
            }
        }
    }
    return out;
}

TimeSeries series_from_csv(const std::string& path, const std::string& name,
                           bool interpolate_missing) {
    auto csv = read_series_csv(path, interpolate_missing);
    return TimeSeries(name, std::move(csv.values));
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<std::string>> text_rows;
    text_rows.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double v : row) cells.push_back(format_double(v));
        text_rows.push_back(std::move(cells));
    }
    write_csv_text(path, header, text_rows);
}

void write_csv_text(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::IoError, "'" + path + "' is empty");
    }
    for (auto& cell : split_line(line)) table.header.push_back(trim(cell));
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            row.push_back(parse_double(cell, path + ":" + std::to_string(line_no)));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    }
    out << content;
}

}  // namespace selfboost
