#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cdiso/io.hpp"

using namespace cdiso;

TEST_CASE("csv helpers round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cdiso_test_io";
  std::filesystem::create_directories(dir);
  const std::string col = (dir / "c.csv").string();
  Eigen::VectorXd v(3);
  v << 1.5, -2.25, 1e-300;
  write_column_csv(col, "x", v);
  CHECK(read_column_csv(col) == v);

  const std::string sub = (dir / "s.csv").string();
  std::ofstream(sub) << "0\n1\n1\n";
  CHECK(read_subset_csv(sub) == Subset{0, 1, 1});
  std::ofstream(sub) << "A\n0\n2\n";
  CHECK_THROWS(read_subset_csv(sub));

  CHECK(format12(0.1 + 0.2) == "0.3");
  CHECK_THROWS(read_column_csv((dir / "missing.csv").string()));
}
