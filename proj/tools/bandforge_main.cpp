// bandforge: bootstrap-calibrated pointwise confidence bands for
// nonparametric regression curves and probability densities, plus a Monte
// Carlo coverage-study harness. Subcommands: band, density-band, simulate.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bandforge/band.hpp"
#include "bandforge/bandwidth.hpp"
#include "bandforge/bootstrap.hpp"
#include "bandforge/csv.hpp"
#include "bandforge/curve.hpp"
#include "bandforge/density.hpp"
#include "bandforge/errors.hpp"
#include "bandforge/kde.hpp"
#include "bandforge/local_poly.hpp"
#include "bandforge/manifest.hpp"
#include "bandforge/parallel.hpp"
#include "bandforge/percentile.hpp"
#include "bandforge/sim.hpp"
#include "bandforge/variance.hpp"

using nlohmann::json;
using namespace bandforge;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point mark = start;

  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - mark).count();
    mark = now;
    return s;
  }
  double total() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::uint64_t fresh_seed() {
  std::random_device rd;
  std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::fprintf(stderr, "bandforge: no --seed given, using seed=%" PRIu64 "\n", s);
  return s;
}

// --bandwidth accepts a rule name or a literal positive number.
double parse_bandwidth_value(const std::string& spec) {
  const char* begin = spec.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v) || !(v > 0.0))
    throw ConfigError("--bandwidth must be a rule name or a positive number, got '" +
                      spec + "'");
  return v;
}

std::vector<double> default_cv_grid(const Dataset& data) {
  auto [mn, mx] = std::minmax_element(data.x.begin(), data.x.end());
  double range = *mx - *mn;
  if (!(range > 0.0)) throw ConfigError("cv bandwidth needs spread in x");
  double lo = 2.0 * range / static_cast<double>(data.n());
  double hi = 0.5 * range;
  if (!(lo < hi)) lo = hi / 10.0;
  const int m = 25;
  std::vector<double> grid(m);
  for (int i = 0; i < m; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
  return grid;
}

struct BandArgs {
  std::string input, output = "band.csv", manifest = "manifest.json";
  double alpha0 = 0.05, xi = 0.1;
  std::size_t boot = 999, boot2 = 100;
  std::string bandwidth = "plugin";
  std::string kernel = "epanechnikov";
  std::vector<double> region;  // empty = auto
  std::size_t grid_n = 91;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool hetero = false;
  bool allow_expensive = false;
  std::string method = "calibrated";
  int threads = 0;
};

int run_band(BandArgs& a) {
  Timer timer;
  RunManifest man;
  man.command = "band";
  if (!a.seed_given) a.seed = fresh_seed();

  Dataset data = read_xy_csv(a.input);
  man.stage_seconds.emplace_back("read", timer.lap());

  const Kernel kernel = Kernel::from_name(a.kernel);
  double ra, rb;
  if (a.region.empty()) {
    // Default evaluation region: the x-range pulled in 5% per side, keeping
    // the band away from the data boundary where local fits degenerate.
    auto [mn, mx] = std::minmax_element(data.x.begin(), data.x.end());
    double pad = 0.05 * (*mx - *mn);
    ra = *mn + pad;
    rb = *mx - pad;
    if (!(ra < rb)) throw InputError("design points have no usable spread");
  } else {
    ra = a.region[0];
    rb = a.region[1];
    if (!(ra < rb)) throw ConfigError("--region needs a < b");
  }
  std::vector<double> grid = make_grid(ra, rb, a.grid_n);

  double h;
  std::string h_rule = a.bandwidth;
  if (a.bandwidth == "plugin") {
    h = plug_in_bandwidth(data, kernel).h;
  } else if (a.bandwidth == "cv") {
    h = cv_bandwidth(data, kernel, default_cv_grid(data)).h;
  } else {
    h = parse_bandwidth_value(a.bandwidth);
    h_rule = "value";
  }
  man.stage_seconds.emplace_back("bandwidth", timer.lap());

  CurveEstimate est = fit_curve(data, h, kernel, grid, SigmaEstimator::kDifference);

  // Heteroscedastic path: conditional-sd curve from the squared residuals.
  std::vector<double> sigma_design, sigma_grid;
  if (a.hetero) {
    std::vector<double> ghat_design = local_linear_fit(data, h, kernel, data.x);
    Residuals resid = compute_residuals(data, ghat_design);
    sigma_design = hetero_scale(data, resid, h, kernel, data.x);
    sigma_grid = hetero_scale(data, resid, h, kernel, grid);
  }
  man.stage_seconds.emplace_back("fit", timer.lap());

  const unsigned threads = resolve_threads(a.threads);
  BandResult band;
  double alpha_used = a.alpha0;
  if (a.method == "naive") {
    band = a.hetero ? build_hetero_band(est, sigma_grid, a.alpha0)
                    : build_naive_band(est, a.alpha0);
  } else if (a.method == "calibrated") {
    BootstrapEnsemble ens =
        a.hetero ? make_hetero_bootstrap(data, est, kernel, sigma_design, sigma_grid,
                                         a.boot, a.seed, threads)
                 : make_residual_bootstrap(data, est, kernel, a.boot, a.seed,
                                           SigmaEstimator::kDifference, threads);
    man.stage_seconds.emplace_back("bootstrap", timer.lap());
    CalibrationProfile prof = calibrate(ens, a.alpha0, a.xi);
    alpha_used = prof.alpha_hat_xi;
    band = a.hetero ? build_hetero_band(est, sigma_grid, prof.alpha_hat_xi)
                    : final_band(est, prof);
    man.stage_seconds.emplace_back("calibrate", timer.lap());
  } else if (a.method == "percentile") {
    if (a.hetero)
      throw ConfigError("--hetero is not available with --method percentile");
    DoubleBootstrapResult res = double_bootstrap_calibrate(
        data, est, kernel, a.boot, a.boot2, a.alpha0, a.xi, a.seed, a.allow_expensive,
        threads);
    man.stage_seconds.emplace_back("bootstrap", timer.lap());
    alpha_used = res.profile.alpha_hat_xi;
    band.grid = res.band.grid;
    band.center = res.band.center;
    band.lower = res.band.lower;
    band.upper = res.band.upper;
    band.alpha = res.band.alpha;
  } else {
    throw ConfigError("--method must be one of calibrated, naive, percentile");
  }

  write_band_csv(a.output, band, "ghat");
  man.stage_seconds.emplace_back("write", timer.lap());

  man.seed = a.seed;
  man.config = json{{"input", a.input},
                    {"output", a.output},
                    {"alpha0", a.alpha0},
                    {"xi", a.xi},
                    {"boot", a.boot},
                    {"boot2", a.boot2},
                    {"bandwidth_rule", h_rule},
                    {"bandwidth", h},
                    {"kernel", a.kernel},
                    {"region", {ra, rb}},
                    {"grid", a.grid_n},
                    {"hetero", a.hetero},
                    {"method", a.method},
                    {"alpha_used", alpha_used},
                    {"threads", threads},
                    {"n", data.n()}};
  man.wall_seconds = timer.total();
  write_manifest(a.manifest, man);
  std::printf("band: wrote %s (grid %zu, h=%s, level alpha=%s)\n", a.output.c_str(),
              grid.size(), fmt17(h).c_str(), fmt17(alpha_used).c_str());
  return 0;
}

struct DensityArgs {
  std::string input, output = "density_band.csv", manifest = "manifest.json";
  double alpha0 = 0.05, xi = 0.1;
  std::size_t boot = 999;
  std::string bandwidth = "silverman";
  std::string kernel = "gaussian";
  std::vector<double> region;
  std::size_t grid_n = 91;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool clamp_nonneg = false;
  std::string method = "calibrated";
  int threads = 0;
};

int run_density_band(DensityArgs& a) {
  Timer timer;
  RunManifest man;
  man.command = "density-band";
  if (!a.seed_given) a.seed = fresh_seed();

  std::vector<double> xs = read_x_csv(a.input);
  man.stage_seconds.emplace_back("read", timer.lap());

  const Kernel kernel = Kernel::from_name(a.kernel);
  double ra, rb;
  if (a.region.empty()) {
    auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    ra = *mn;
    rb = *mx;
    if (!(ra < rb)) throw InputError("sample has no spread");
  } else {
    ra = a.region[0];
    rb = a.region[1];
    if (!(ra < rb)) throw ConfigError("--region needs a < b");
  }
  std::vector<double> grid = make_grid(ra, rb, a.grid_n);

  double h;
  std::string h_rule = a.bandwidth;
  if (a.bandwidth == "silverman") {
    h = silverman_bandwidth(xs, kernel);
  } else {
    h = parse_bandwidth_value(a.bandwidth);
    h_rule = "value";
  }
  man.stage_seconds.emplace_back("bandwidth", timer.lap());

  DensityEstimate est = fit_density(xs, h, kernel, grid);
  man.stage_seconds.emplace_back("fit", timer.lap());

  const unsigned threads = resolve_threads(a.threads);
  BandResult band;
  double alpha_used = a.alpha0;
  if (a.method == "naive") {
    band = density_naive_band(est, a.alpha0, a.clamp_nonneg);
  } else if (a.method == "calibrated") {
    BootstrapEnsemble ens = make_density_bootstrap(xs, est, kernel, a.boot, a.seed, threads);
    man.stage_seconds.emplace_back("bootstrap", timer.lap());
    CalibrationProfile prof = calibrate(ens, a.alpha0, a.xi);
    alpha_used = prof.alpha_hat_xi;
    band = density_final_band(est, prof, a.clamp_nonneg);
    man.stage_seconds.emplace_back("calibrate", timer.lap());
  } else {
    throw ConfigError("--method must be one of calibrated, naive");
  }

  write_band_csv(a.output, band, "fhat");
  man.stage_seconds.emplace_back("write", timer.lap());

  man.seed = a.seed;
  man.config = json{{"input", a.input},
                    {"output", a.output},
                    {"alpha0", a.alpha0},
                    {"xi", a.xi},
                    {"boot", a.boot},
                    {"bandwidth_rule", h_rule},
                    {"bandwidth", h},
                    {"kernel", a.kernel},
                    {"region", {ra, rb}},
                    {"grid", a.grid_n},
                    {"clamp_nonneg", a.clamp_nonneg},
                    {"method", a.method},
                    {"alpha_used", alpha_used},
                    {"threads", threads},
                    {"n", xs.size()}};
  man.wall_seconds = timer.total();
  write_manifest(a.manifest, man);
  std::printf("density-band: wrote %s (grid %zu, h=%s, level alpha=%s)\n",
              a.output.c_str(), grid.size(), fmt17(h).c_str(), fmt17(alpha_used).c_str());
  return 0;
}

// ---- simulate: config file parsing with strict field checking ----

void require_known_fields(const json& j, const std::set<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config field '" + it.key() + "'");
}

template <typename T>
T get_field(const json& j, const std::string& name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + name + "' has the wrong type");
  }
}

StudyMethod parse_method_name(const std::string& s) {
  if (s == "calibrated") return StudyMethod::kCalibrated;
  if (s == "undersmooth") return StudyMethod::kUndersmooth;
  if (s == "biascorrect") return StudyMethod::kBiasCorrect;
  if (s == "double_bootstrap") return StudyMethod::kDoubleBootstrap;
  throw ConfigError("config field 'methods' has unknown entry '" + s + "'");
}

StudyConfig parse_study_config(const json& j) {
  require_known_fields(
      j, {"g_index", "n", "sigma", "n_sims", "B", "B2", "alpha0", "xi_list", "region",
          "grid_size", "seed", "methods", "gamma_grid", "lambda_grid", "kernel",
          "bandwidth"});
  StudyConfig cfg;
  cfg.g_index = get_field<int>(j, "g_index", cfg.g_index);
  cfg.n = get_field<std::size_t>(j, "n", cfg.n);
  cfg.sigma = get_field<double>(j, "sigma", cfg.sigma);
  cfg.n_sims = get_field<std::size_t>(j, "n_sims", cfg.n_sims);
  cfg.B = get_field<std::size_t>(j, "B", cfg.B);
  cfg.B2 = get_field<std::size_t>(j, "B2", cfg.B2);
  cfg.alpha0 = get_field<double>(j, "alpha0", cfg.alpha0);
  cfg.xi_list = get_field<std::vector<double>>(j, "xi_list", cfg.xi_list);
  std::vector<double> region = get_field<std::vector<double>>(
      j, "region", {cfg.region_a, cfg.region_b});
  if (region.size() != 2) throw ConfigError("config field 'region' must be [a, b]");
  cfg.region_a = region[0];
  cfg.region_b = region[1];
  cfg.grid_size = get_field<std::size_t>(j, "grid_size", cfg.grid_size);
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  if (j.contains("methods")) {
    std::vector<std::string> names =
        get_field<std::vector<std::string>>(j, "methods", {});
    cfg.methods.clear();
    for (const std::string& s : names) cfg.methods.push_back(parse_method_name(s));
  }
  cfg.gamma_grid = get_field<std::vector<double>>(j, "gamma_grid", cfg.gamma_grid);
  cfg.lambda_grid = get_field<std::vector<double>>(j, "lambda_grid", cfg.lambda_grid);
  cfg.kernel = Kernel::from_name(get_field<std::string>(j, "kernel", "epanechnikov")).id;
  if (j.contains("bandwidth")) {
    const json& b = j.at("bandwidth");
    if (b.is_string() && b.get<std::string>() == "plugin") {
      cfg.bandwidth_rule = BandwidthRule::kPlugIn;
    } else if (b.is_number()) {
      cfg.bandwidth_rule = BandwidthRule::kFixed;
      cfg.fixed_h = b.get<double>();
    } else {
      throw ConfigError("config field 'bandwidth' must be \"plugin\" or a number");
    }
  }
  return cfg;
}

struct SimArgs {
  std::string config;
  std::string output = "results.csv";
  std::string results_json = "results.json";
  std::string manifest = "manifest.json";
  std::string typical;  // optional typical-band CSV path
  bool allow_full_scale = false;
  int threads = 0;
};

int run_simulate(SimArgs& a) {
  Timer timer;
  std::ifstream in(a.config);
  if (!in) throw ConfigError("cannot open config file '" + a.config + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  StudyConfig cfg = parse_study_config(j);
  cfg.threads = static_cast<unsigned>(resolve_threads(a.threads));
  cfg.validate();
  if (cfg.n_sims > 500 && !a.allow_full_scale)
    throw ConfigError("n_sims > 500 is a full-scale run; pass --allow-full-scale");
  if (cfg.n_sims > 500)
    std::fprintf(stderr,
                 "bandforge: full-scale run (%zu sims); expect a long wait\n",
                 cfg.n_sims);
  RunManifest man;
  man.command = "simulate";
  man.seed = cfg.seed;
  man.config = j;
  man.stage_seconds.emplace_back("config", timer.lap());

  StudyResult res = run_study(cfg);
  man.stage_seconds.emplace_back("study", timer.lap());

  std::vector<StudyRowOut> rows;
  for (const MethodResult& mr : res.rows)
    rows.push_back({cfg.sigma, cfg.g_index, mr.method_name, mr.factor_or_xi,
                    mr.covered_proportion, mr.avg_abs_cov_error, mr.avg_width});
  write_study_csv(a.output, rows);

  json jrows = json::array();
  for (const MethodResult& mr : res.rows)
    jrows.push_back(json{{"method", mr.method_name},
                         {"factor_or_xi", mr.factor_or_xi},
                         {"covered_proportion", mr.covered_proportion},
                         {"avg_abs_cov_error", mr.avg_abs_cov_error},
                         {"avg_width", mr.avg_width},
                         {"best_of_sweep", mr.best_of_sweep},
                         {"coverage", mr.coverage}});
  json jout{{"schema_version", kManifestSchemaVersion},
            {"sigma", cfg.sigma},
            {"g_index", cfg.g_index},
            {"grid", res.grid},
            {"n_done", res.n_done},
            {"n_failed", res.n_failed},
            {"failure_notes", res.failure_notes},
            {"rows", jrows}};
  std::ofstream jf(a.results_json);
  if (!jf) throw InputError("cannot create results file '" + a.results_json + "'");
  jf << jout.dump(2) << '\n';

  if (!a.typical.empty()) {
    TypicalBandReport rep = typical_band(cfg);
    BandResult tb = rep.band;
    write_band_csv(a.typical, tb, "ghat");
    man.stage_seconds.emplace_back("typical", timer.lap());
  }
  man.stage_seconds.emplace_back("write", timer.lap());
  man.wall_seconds = timer.total();
  write_manifest(a.manifest, man);
  std::printf("simulate: %zu rows over %zu sims (%zu failed) -> %s\n", res.rows.size(),
              res.n_done + res.n_failed, res.n_failed, a.output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bootstrap-calibrated pointwise confidence bands"};
  app.require_subcommand(1);

  BandArgs ba;
  CLI::App* band = app.add_subcommand(
      "band", "confidence band for a regression mean from an x,y CSV");
  band->add_option("--input", ba.input, "input CSV with header x,y")->required();
  band->add_option("--output", ba.output, "band CSV path (x,ghat,lower,upper)");
  band->add_option("--manifest", ba.manifest, "manifest JSON path");
  band->add_option("--alpha0", ba.alpha0, "target miscoverage level");
  band->add_option("--xi", ba.xi, "exceptional fraction for the calibrated level");
  band->add_option("--boot", ba.boot, "bootstrap replicates");
  band->add_option("--boot2", ba.boot2,
                   "second-level replicates (percentile method only)");
  band->add_option("--bandwidth", ba.bandwidth, "plugin, cv, or a positive number");
  band->add_option("--kernel", ba.kernel, "epanechnikov, gaussian, or biweight");
  band->add_option("--region", ba.region, "evaluation interval a b")->expected(2);
  band->add_option("--grid", ba.grid_n, "number of evaluation points");
  band->add_option("--seed", ba.seed, "RNG seed (random and printed if omitted)")
      ->each([&](const std::string&) { ba.seed_given = true; });
  band->add_flag("--hetero", ba.hetero, "heteroscedastic noise treatment");
  band->add_flag("--allow-expensive", ba.allow_expensive,
                 "lift the B1*B2 cost guard for the percentile method");
  band->add_option("--method", ba.method, "calibrated, naive, or percentile");
  band->add_option("--threads", ba.threads,
                   "worker threads (0 = BANDFORGE_THREADS or 1)");

  DensityArgs da;
  CLI::App* dens = app.add_subcommand(
      "density-band", "confidence band for a probability density from an x CSV");
  dens->add_option("--input", da.input, "input CSV with header x")->required();
  dens->add_option("--output", da.output, "band CSV path (x,fhat,lower,upper)");
  dens->add_option("--manifest", da.manifest, "manifest JSON path");
  dens->add_option("--alpha0", da.alpha0, "target miscoverage level");
  dens->add_option("--xi", da.xi, "exceptional fraction for the calibrated level");
  dens->add_option("--boot", da.boot, "bootstrap replicates");
  dens->add_option("--bandwidth", da.bandwidth, "silverman or a positive number");
  dens->add_option("--kernel", da.kernel,
                   "gaussian or epanechnikov (samplable kernels)");
  dens->add_option("--region", da.region, "evaluation interval a b")->expected(2);
  dens->add_option("--grid", da.grid_n, "number of evaluation points");
  dens->add_option("--seed", da.seed, "RNG seed (random and printed if omitted)")
      ->each([&](const std::string&) { da.seed_given = true; });
  dens->add_flag("--clamp-nonneg", da.clamp_nonneg, "truncate the lower envelope at 0");
  dens->add_option("--method", da.method, "calibrated or naive");
  dens->add_option("--threads", da.threads,
                   "worker threads (0 = BANDFORGE_THREADS or 1)");

  SimArgs sa;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo coverage study");
  sim->add_option("--config", sa.config, "study config JSON")->required();
  sim->add_option("--output", sa.output, "results CSV path");
  sim->add_option("--json", sa.results_json, "results JSON path");
  sim->add_option("--manifest", sa.manifest, "manifest JSON path");
  sim->add_option("--typical", sa.typical,
                  "also write the median-ISE candidate's band to this CSV");
  sim->add_flag("--allow-full-scale", sa.allow_full_scale,
                "permit n_sims > 500 (long run)");
  sim->add_option("--threads", sa.threads,
                  "worker threads (0 = BANDFORGE_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "bandforge: config error: %s\n", e.what());
    return 4;
  }

  try {
    if (band->parsed()) return run_band(ba);
    if (dens->parsed()) return run_density_band(da);
    if (sim->parsed()) return run_simulate(sa);
    std::fprintf(stderr, "bandforge: config error: no subcommand\n");
    return 4;
  } catch (const InputError& e) {
    std::fprintf(stderr, "bandforge: input error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "bandforge: config error: %s\n", e.what());
    return 4;
  } catch (const EstimationError& e) {
    std::fprintf(stderr, "bandforge: estimation error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bandforge: internal error: %s\n", e.what());
    return 1;
  }
}
