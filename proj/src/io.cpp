#include "cdiso/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cdiso/coeffs.hpp"

namespace cdiso {

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Eigen::VectorXd read_column_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string cell = line.substr(0, line.find(','));
    try {
      values.push_back(std::stod(cell));
    } catch (const std::invalid_argument&) {
      if (!values.empty() || line_no > 1) throw DomainError(path + ": line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Subset read_subset_csv(const std::string& path) {
  const Eigen::VectorXd column = read_column_csv(path);
  Subset out(static_cast<std::size_t>(column.size()));
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    if (column(i) != 0.0 && column(i) != 1.0) throw DomainError(path + ": subset entries must be 0 or 1");
    out[static_cast<std::size_t>(i)] = column(i) != 0.0;
  }
  return out;
}

void write_column_csv(const std::string& path, const std::string& header, const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header << '\n';
  for (Eigen::Index i = 0; i < values.size(); ++i) out << format12(values(i)) << '\n';
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format12(row[i]);
    out << '\n';
  }
}

}  // namespace cdiso
