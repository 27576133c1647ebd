#include "fermibath/io.hpp"

#include <complex>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace fermibath {

CsvFile::CsvFile(const std::string& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
}

void CsvFile::meta(const std::string& key, const std::string& value) {
  if (columns_written_)
    throw std::logic_error("metadata must precede the column header");
  out_ << "# " << key << "=" << value << "\n";
}

void CsvFile::meta(const std::string& key, double value) { meta(key, num(value)); }
void CsvFile::meta(const std::string& key, std::int64_t value) {
  meta(key, num(value));
}

void CsvFile::columns(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i)
    out_ << (i ? "," : "") << names[i];
  out_ << "\n";
  columns_written_ = true;
}

void CsvFile::row(const std::vector<std::string>& cells) {
  if (!columns_written_) throw std::logic_error("rows must follow the header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

std::string CsvFile::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string CsvFile::num(std::int64_t v) { return std::to_string(v); }

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      const std::size_t eq = body.find('=');
      if (eq != std::string::npos) {
        std::string key = body.substr(0, eq);
        std::string value = body.substr(eq + 1);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        while (!key.empty() && key.back() == ' ') key.pop_back();
        table.meta[key] = value;
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      table.columns = cells;
      header_seen = true;
      continue;
    }
    std::vector<double> values(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      values[i] = std::strtod(cells[i].c_str(), nullptr);
    table.rows.push_back(std::move(values));
  }
  return table;
}

void save_matrix(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const char magic[4] = {'F', 'B', 'M', 'X'};
  out.write(magic, 4);
  const std::uint64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      const std::complex<double> z = m(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j));
      const double re = z.real(), im = z.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(re));
      out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

Eigen::MatrixXcd load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "FBMX", 4) != 0)
    throw std::runtime_error(path + " is not a matrix snapshot");
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof(re));
      in.read(reinterpret_cast<char*>(&im), sizeof(im));
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {re, im};
    }
  }
  if (!in) throw std::runtime_error("truncated matrix snapshot " + path);
  return m;
}

}  // namespace fermibath
