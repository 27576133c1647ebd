#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fermibath/io.hpp"

using namespace fermibath;

namespace {
std::string temp_file(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("csv round trip with metadata") {
  const std::string path = temp_file("fermibath_test.csv");
  {
    CsvFile csv(path);
    csv.meta("gamma", 0.5);
    csv.meta("L", static_cast<std::int64_t>(6));
    csv.meta("note", "hello");
    csv.columns({"t", "value"});
    csv.row({CsvFile::num(1.0), CsvFile::num(0.123456789012)});
    csv.row({CsvFile::num(2.0), CsvFile::num(-3e-7)});
  }
  const CsvTable table = read_csv(path);
  CHECK(table.meta.at("gamma") == "0.5");
  CHECK(table.meta.at("L") == "6");
  CHECK(table.meta.at("note") == "hello");
  REQUIRE(table.columns.size() == 2);
  CHECK(table.col("value") == 1);
  CHECK(table.col("missing") == -1);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][1] == doctest::Approx(0.123456789012).epsilon(1e-12));
  CHECK(table.rows[1][1] == doctest::Approx(-3e-7).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("matrix snapshots are bit-exact") {
  const std::string path = temp_file("fermibath_test.bin");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(7, 5);
  save_matrix(path, m);
  const Eigen::MatrixXcd back = load_matrix(path);
  REQUIRE(back.rows() == 7);
  REQUIRE(back.cols() == 5);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("loading a non-snapshot fails cleanly") {
  const std::string path = temp_file("fermibath_test.txt");
  {
    std::ofstream out(path);
    out << "not a snapshot";
  }
  CHECK_THROWS(load_matrix(path));
  std::remove(path.c_str());
}
