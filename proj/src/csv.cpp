#include "bandforge/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "bandforge/errors.hpp"

namespace bandforge {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t lineno) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw InputError(path + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell +
                     "'");
  if (!std::isfinite(v))
    throw InputError(path + ":" + std::to_string(lineno) + ": non-finite value '" + cell +
                     "'");
  return v;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return in;
}

void expect_header(std::ifstream& in, const std::string& want, const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw InputError(path + ": empty file, expected header '" + want + "'");
  if (strip_cr(line) != want)
    throw InputError(path + ":1: expected header '" + want + "', got '" + strip_cr(line) +
                     "'");
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset read_xy_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "x,y", path);
  Dataset data;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_cells(line);
    if (cells.size() != 2)
      throw InputError(path + ":" + std::to_string(lineno) + ": expected 2 cells, got " +
                       std::to_string(cells.size()));
    data.x.push_back(parse_cell(cells[0], path, lineno));
    data.y.push_back(parse_cell(cells[1], path, lineno));
  }
  data.validate();
  return data;
}

std::vector<double> read_x_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "x", path);
  std::vector<double> x;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> cells = split_cells(line);
    if (cells.size() != 1)
      throw InputError(path + ":" + std::to_string(lineno) + ": expected 1 cell, got " +
                       std::to_string(cells.size()));
    x.push_back(parse_cell(cells[0], path, lineno));
  }
  if (x.size() < 3) throw InputError(path + ": need at least 3 rows");
  return x;
}

namespace {

std::ofstream create_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot create output file '" + path + "'");
  return out;
}

}  // namespace

void write_band_csv(const std::string& path, const BandResult& band,
                    const std::string& center_name) {
  std::ofstream out = create_or_throw(path);
  out << "x," << center_name << ",lower,upper\n";
  for (std::size_t j = 0; j < band.grid.size(); ++j)
    out << fmt17(band.grid[j]) << ',' << fmt17(band.center[j]) << ','
        << fmt17(band.lower[j]) << ',' << fmt17(band.upper[j]) << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

void write_study_csv(const std::string& path, const std::vector<StudyRowOut>& rows) {
  std::ofstream out = create_or_throw(path);
  out << "sigma,g_index,method,factor_or_xi,covered_proportion,avg_abs_cov_error,avg_width\n";
  for (const StudyRowOut& r : rows)
    out << fmt17(r.sigma) << ',' << r.g_index << ',' << r.method << ','
        << fmt17(r.factor_or_xi) << ',' << fmt17(r.covered_proportion) << ','
        << fmt17(r.avg_abs_cov_error) << ',' << fmt17(r.avg_width) << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

void write_xy_csv(const std::string& path, const Dataset& data) {
  std::ofstream out = create_or_throw(path);
  out << "x,y\n";
  for (std::size_t i = 0; i < data.n(); ++i)
    out << fmt17(data.x[i]) << ',' << fmt17(data.y[i]) << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace bandforge
