#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pmsim {

// Fixed 12-significant-digit float rendering so identical runs emit identical
// bytes.
std::string format_number(double x);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows);

void write_lines(const std::string& path, const std::vector<std::string>& lines);

}  // namespace pmsim
