#ifndef MZDMD_CSV_HPP
#define MZDMD_CSV_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "mzdmd/oscillator.hpp"

namespace mzdmd {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_real(double x);

/// Writes `t,y1,y2` rows.
void write_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Writes `t,y1,y2,var1,var2` rows.
void write_csv(const std::filesystem::path& path, const Trajectory& traj, const Trajectory& variance);

/// Generic numeric table with a header row.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& rows);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;

  Eigen::Index column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Reads a table whose first column is `t` and whose next two columns are
/// resolved coordinates.
Trajectory read_trajectory(const std::filesystem::path& path);

}  // namespace mzdmd

#endif  // MZDMD_CSV_HPP
