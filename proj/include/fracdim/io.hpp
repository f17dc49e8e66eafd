#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fracdim {

// Rows of numbers. Blank lines and lines starting with '#' are skipped; a
// first line with no numeric field is taken as a header. Errors carry the
// 1-based file line.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

// All rows must have the same width.
std::vector<std::vector<double>> read_point_cloud(const std::string& path);
std::vector<std::vector<double>> read_distance_matrix(const std::string& path);
// (source id, target id) rows; returns assignment[source] = target. Every
// source id in [0, n_source) must appear exactly once.
std::vector<std::size_t> read_map_pairs(const std::string& path, std::size_t n_source);
std::vector<double> read_column(const std::string& path);

// Writes via a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& text);

std::string format_double(double v);  // %.17g; nan/inf spelled out
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// JSON with every float at 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace fracdim
