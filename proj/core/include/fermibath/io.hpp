#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace fermibath {

// CSV with a `# key=value` metadata header block, the single persistence
// format for results. Numbers are written with "%.12g".
class CsvFile {
 public:
  explicit CsvFile(const std::string& path);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void meta(const std::string& key, std::int64_t value);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);

  static std::string num(double v);
  static std::string num(std::int64_t v);

 private:
  std::ofstream out_;
  bool columns_written_ = false;
};

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // column index by name, -1 if absent
  int col(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Matrix checkpoint: "FBMX" magic, uint64 rows, uint64 cols, then row-major
// complex doubles, little-endian.
void save_matrix(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd load_matrix(const std::string& path);

}  // namespace fermibath
