#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cdiso/mms.hpp"

namespace cdiso {

/// %.12g, the fixed precision of every CSV this library writes.
std::string format12(double x);

/// First column of a CSV with an optional non-numeric header line.
Eigen::VectorXd read_column_csv(const std::string& path);

/// Indicator column (0/1) as a Subset.
Subset read_subset_csv(const std::string& path);

void write_column_csv(const std::string& path, const std::string& header, const Eigen::VectorXd& values);

/// Rows of numbers under a header; numbers formatted by format12.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace cdiso
