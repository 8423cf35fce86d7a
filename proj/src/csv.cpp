#include "mzdmd/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mzdmd/errors.hpp"

namespace mzdmd {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("I/O error while writing '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::string format_real(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw Error("format_real: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols()) {
    throw ShapeError("write_table: header has " + std::to_string(header.size()) + " names for " +
                     std::to_string(rows.cols()) + " columns");
  }
  std::ofstream out = open_for_write(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << format_real(rows(i, j));
    out << '\n';
  }
  finish(out, path);
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  if (traj.states.cols() != 2 || traj.states.rows() != traj.size()) {
    throw ShapeError("write_csv: expected a two-column resolved trajectory");
  }
  Eigen::MatrixXd rows(traj.size(), 3);
  rows << traj.times, traj.states;
  write_table(path, {"t", "y1", "y2"}, rows);
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj, const Trajectory& variance) {
  if (traj.states.cols() != 2 || variance.states.cols() != 2 || variance.states.rows() != traj.size() ||
      traj.states.rows() != traj.size()) {
    throw ShapeError("write_csv: trajectory and variance shapes differ");
  }
  Eigen::MatrixXd rows(traj.size(), 5);
  rows << traj.times, traj.states, variance.states;
  write_table(path, {"t", "y1", "y2", "var1", "var2"}, rows);
}

Eigen::Index CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<Eigen::Index>(j);
  }
  throw ShapeError("csv: no column named '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path.string() + "' is empty");
  table.header = split(line);

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                  std::to_string(table.header.size()) + " fields");
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto* end = cells[j].data() + cells[j].size();
      const auto [ptr, ec] = std::from_chars(cells[j].data(), end, row[j]);
      if (ec != std::errc() || ptr != end) {
        throw Error(path.string() + ":" + std::to_string(line_no) + ": bad number '" + cells[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.data.cols() < 3 || table.header.front() != "t") {
    throw ShapeError("read_trajectory: expected columns t, y1, y2");
  }
  return {table.data.col(0), table.data.middleCols(1, 2)};
}

}  // namespace mzdmd
