#include "pmsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pmsim {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows) {
  if (static_cast<long>(header.size()) != rows.cols())
    throw std::invalid_argument("write_csv: header width does not match the data");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (long r = 0; r < rows.rows(); ++r) {
    for (long c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << format_number(rows(r, c));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  for (const auto& l : lines) out << l << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pmsim
