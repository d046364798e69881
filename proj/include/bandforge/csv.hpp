#pragma once

#include <string>
#include <vector>

#include "bandforge/band.hpp"
#include "bandforge/dataset.hpp"
#include "bandforge/sim.hpp"

namespace bandforge {

// 17-significant-digit decimal rendering: round-trips every double exactly.
std::string fmt17(double v);

// Strict readers: exact lowercase header, comma separation, every cell a
// finite number. Violations throw InputError naming the line.
Dataset read_xy_csv(const std::string& path);             // header "x,y"
std::vector<double> read_x_csv(const std::string& path);  // header "x"

// Writers emit the fixed headers below with fmt17 cells.
void write_band_csv(const std::string& path, const BandResult& band,
                    const std::string& center_name);  // "x,<center>,lower,upper"

struct StudyRowOut {
  double sigma = 0.0;
  int g_index = 0;
  std::string method;
  double factor_or_xi = 0.0;
  double covered_proportion = 0.0;
  double avg_abs_cov_error = 0.0;
  double avg_width = 0.0;
};

// "sigma,g_index,method,factor_or_xi,covered_proportion,avg_abs_cov_error,avg_width"
void write_study_csv(const std::string& path, const std::vector<StudyRowOut>& rows);

void write_xy_csv(const std::string& path, const Dataset& data);

}  // namespace bandforge
