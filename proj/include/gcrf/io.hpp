#pragma once

#include "gcrf/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gcrf {

// Comma-separated numeric matrix, one row per line, no header by default.
Matrix read_matrix_csv(const std::string& path, bool skip_header = false);

// Values serialized with %.17g so a write/read round trip is bit exact.
void write_matrix_csv(const std::string& path, const Matrix& m);

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> read_bool_matrix_csv(
    const std::string& path, bool skip_header = false);

// Flat key=value file; '#' starts a comment, blank lines ignored.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list of doubles; fallback when the key is absent.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  void set_bool(const std::string& key, bool value);

  // Keys serialize in insertion order.
  void save(const std::string& path) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);  // %.17g

}  // namespace gcrf
