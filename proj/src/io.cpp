#include "fracdim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "fracdim/errors.hpp"

namespace fracdim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && ptr == e;
}

void dump(const nlohmann::json& j, std::string& out, int indent, int depth) {
  using nlohmann::json;
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += json(it.key()).dump();
        out += colon;
        dump(it.value(), out, indent, depth + 1);
      }
      out += close + '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        out += pad;
        dump(v, out, indent, depth + 1);
      }
      out += close + ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s(buf);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path, 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t);
    std::vector<double> row;
    row.reserve(fields.size());
    std::size_t numeric = 0;
    for (const auto& f : fields) {
      double v = 0.0;
      if (parse_number(f, v)) ++numeric;
      row.push_back(v);
    }
    if (!seen && numeric == 0) {
      seen = true;
      continue;  // header
    }
    seen = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_number(fields[i], v))
        throw InputError(path + ": field " + std::to_string(i + 1) + " '" + fields[i] + "' is not a number",
                         lineno);
      if (!std::isfinite(v))
        throw InputError(path + ": field " + std::to_string(i + 1) + " is not finite", lineno);
    }
    rows.push_back(std::move(row));
    if (rows.size() == 1) continue;
    if (rows.back().size() != rows.front().size())
      throw InputError(path + ": row has " + std::to_string(rows.back().size()) + " fields, expected " +
                           std::to_string(rows.front().size()),
                       lineno);
  }
  if (rows.empty()) throw InputError(path + ": no data rows", lineno);
  return rows;
}

std::vector<std::vector<double>> read_point_cloud(const std::string& path) { return read_numeric_csv(path); }

std::vector<std::vector<double>> read_distance_matrix(const std::string& path) {
  auto m = read_numeric_csv(path);
  if (m.size() != m.front().size())
    throw InputError(path + ": distance matrix has " + std::to_string(m.size()) + " rows and " +
                         std::to_string(m.front().size()) + " columns",
                     m.size());
  return m;
}

std::vector<std::size_t> read_map_pairs(const std::string& path, std::size_t n_source) {
  const auto rows = read_numeric_csv(path);
  if (rows.front().size() != 2) throw InputError(path + ": map rows need (source id, target id)", 1);
  std::vector<std::size_t> a(n_source, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double s = rows[i][0], t = rows[i][1];
    if (s < 0 || t < 0 || s != std::floor(s) || t != std::floor(t))
      throw InputError(path + ": ids must be non-negative integers", i + 1);
    const auto si = static_cast<std::size_t>(s);
    if (si >= n_source) throw InputError(path + ": source id " + std::to_string(si) + " out of range", i + 1);
    if (a[si] != static_cast<std::size_t>(-1))
      throw InputError(path + ": source id " + std::to_string(si) + " mapped twice", i + 1);
    a[si] = static_cast<std::size_t>(t);
  }
  for (std::size_t i = 0; i < n_source; ++i)
    if (a[i] == static_cast<std::size_t>(-1))
      throw InputError(path + ": source id " + std::to_string(i) + " has no image", rows.size());
  return a;
}

std::vector<double> read_column(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.front().size() != 1) throw InputError(path + ": expected one column", 1);
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[0]);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  if (!header.empty()) out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  write_file_atomic(path, csv_text(header, rows));
}

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, out, indent, 0);
  return out;
}

void write_json(const std::string& path, const nlohmann::json& j) { write_file_atomic(path, dump_json(j) + "\n"); }

}  // namespace fracdim
