#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfboost/time_series.hpp"

namespace selfboost {

/// Shortest decimal representation that parses back to the same double
/// (std::to_chars). Used for every numeric value the library writes, so file
/// round-trips are bit-exact and output bytes are deterministic.
std::string format_double(double v);

double parse_double(const std::string& text, const std::string& context);

/// Series file read from CSV. Timestamps (when the file has a leading
/// `timestamp` column) are carried verbatim for output alignment; they take
/// no part in computation.
struct SeriesCsv {
    std::vector<double> values;
    std::vector<std::string> timestamps;  // empty when no timestamp column
    int interpolated_count = 0;
};

/// Read a UTF-8 CSV with a header row and a column named `value` (optional
/// leading `timestamp` column). Empty / NaN / NA cells are missing values:
/// rejected unless `interpolate_missing`, in which case interior gaps are
/// filled by linear interpolation (leading/trailing gaps are always errors).
SeriesCsv read_series_csv(const std::string& path, bool interpolate_missing = false);

TimeSeries series_from_csv(const std::string& path, const std::string& name,
                           bool interpolate_missing = false);

/// Write a table: header row, then rows of formatted doubles.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Generic CSV cell table (already formatted strings).
void write_csv_text(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Read back a table written by write_csv. Returns header + numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace selfboost
