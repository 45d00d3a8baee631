#include "gcrf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gcrf {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path,
                                                     bool skip_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s, const std::string& path, size_t row,
                    size_t col) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << path << ": cannot parse '" << s << "' at row " << (row + 1)
        << ", column " << (col + 1);
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix read_matrix_csv(const std::string& path, bool skip_header) {
  const auto rows = read_csv_cells(path, skip_header);
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
  const size_t cols = rows[0].size();
  Matrix m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      std::ostringstream msg;
      msg << path << ": row " << (r + 1) << " has " << rows[r].size()
          << " columns, expected " << cols;
      throw std::runtime_error(msg.str());
    }
    for (size_t c = 0; c < cols; ++c)
      m(r, c) = parse_double(rows[r][c], path, r, c);
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> read_bool_matrix_csv(
    const std::string& path, bool skip_header) {
  const Matrix m = read_matrix_csv(path, skip_header);
  return m.array() != 0.0;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  KeyValueConfig config;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": expected key=value";
      throw std::runtime_error(msg.str());
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_double(it->second, "config key " + key, 0, 0);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return static_cast<int>(std::stoll(it->second));
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return it->second == "1" || it->second == "true" || it->second == "yes";
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> values;
  std::stringstream ss(it->second);
  std::string cell;
  while (std::getline(ss, cell, ','))
    values.push_back(parse_double(trim(cell), "config key " + key, 0, 0));
  return values;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = value;
}

void KeyValueConfig::set_double(const std::string& key, double value) {
  set(key, format_double(value));
}

void KeyValueConfig::set_int(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

void KeyValueConfig::set_bool(const std::string& key, bool value) {
  set(key, value ? "true" : "false");
}

void KeyValueConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& key : order_)
    out << key << " = " << values_.at(key) << '\n';
}

}  // namespace gcrf
