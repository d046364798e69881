#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bandforge/band.hpp"
#include "bandforge/dataset.hpp"
#include "bandforge/kernels.hpp"

namespace bandforge {

// Benchmark regression functions on [-1, 1]. sgn(0) = 0 throughout.
//   g1(x) = x + 5 phi(10 x)                      (sharp bump at the origin)
//   g2(x) = sin(3 pi x / 2) / (1 + 18 x^2 (sgn x + 1))
//   g3(x) = sin(pi x / 2) / (1 + 2 x^2 (sgn x + 1))
double truth_value(int g_index, double x);

// Second derivative of the truth: analytic for g1, Richardson-extrapolated
// central differences (base step 1e-4) for g2 and g3.
double truth_deriv2(int g_index, double x);

enum class StudyMethod { kCalibrated, kUndersmooth, kBiasCorrect, kDoubleBootstrap };

enum class BandwidthRule { kPlugIn, kFixed };

struct StudyConfig {
  int g_index = 3;
  std::size_t n = 100;
  double sigma = 1.0;
  std::size_t n_sims = 200;
  std::size_t B = 499;       // bootstrap replicates (first level)
  std::size_t B2 = 100;      // second level, double bootstrap only
  double alpha0 = 0.05;
  std::vector<double> xi_list = {0.1};
  double region_a = -0.9;
  double region_b = 0.9;
  std::size_t grid_size = 91;
  std::uint64_t seed = 1;
  std::vector<StudyMethod> methods = {StudyMethod::kCalibrated};
  std::vector<double> gamma_grid;   // undersmoothing sweep values
  std::vector<double> lambda_grid;  // bias-correction sweep values
  KernelId kernel = KernelId::kEpanechnikov;
  BandwidthRule bandwidth_rule = BandwidthRule::kPlugIn;
  double fixed_h = 0.0;
  unsigned threads = 1;

  void validate() const;  // throws ConfigError naming the offending field
};

struct MethodResult {
  StudyMethod method = StudyMethod::kCalibrated;
  std::string method_name;
  double factor_or_xi = 0.0;        // xi for calibrated methods, gamma/lambda otherwise
  std::vector<double> coverage;     // per grid point, Monte Carlo frequency
  double covered_proportion = 0.0;  // fraction of grid with coverage >= 1 - alpha0
  double avg_abs_cov_error = 0.0;   // mean |coverage - (1 - alpha0)| over the grid
  double avg_width = 0.0;           // mean band width over grid and sims
  bool best_of_sweep = false;       // marks the best covered_proportion per sweep
};

struct StudyResult {
  std::vector<double> grid;
  std::vector<MethodResult> rows;
  std::size_t n_done = 0;
  std::size_t n_failed = 0;
  std::vector<std::string> failure_notes;  // first few failure messages
};

// Study-index-keyed synthetic dataset: X ~ U(-1,1), Y = g(X) + sigma * Z.
// All n design points are drawn first, then the n errors, from the substream
// keyed by (seed, dataset domain, study_index).
Dataset generate_dataset(const StudyConfig& cfg, std::size_t study_index);

// Monte Carlo protocol: n_sims datasets, every configured method/setting row
// fitted on each, pointwise coverage of the truth recorded over the grid.
// Dataset-level estimation failures are counted and the study aborts when
// they exceed 5% of n_sims. Aggregation is sequential and independent of the
// parallel schedule.
StudyResult run_study(const StudyConfig& cfg);

// Grid points where curvature-driven bias is worst: the ceil(xi * N) largest
// |g''| values, excluding exact zeros, ties broken toward the smaller index.
// Returned indices are in ascending grid order.
std::vector<std::size_t> exceptional_set(const std::vector<double>& grid, int g_index,
                                         double xi);

// "Typical band" report: among n_candidates datasets pick the one whose
// integrated squared error of the fit takes the median value, and return the
// calibrated band for it (first xi in xi_list).
struct TypicalBandReport {
  std::size_t dataset_index = 0;
  double ise = 0.0;
  BandResult band;
  Dataset data;
};
TypicalBandReport typical_band(const StudyConfig& cfg, std::size_t n_candidates = 101);

const char* method_name(StudyMethod m);

}  // namespace bandforge
