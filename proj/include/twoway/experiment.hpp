#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twoway/sources.hpp"

namespace twoway {

enum class Mode { BOUNDS, PROTOCOL, MC, FIGURE };
enum class FigureId { NUMERIC1, NUMERIC2, NUMERIC3, NUMERIC4 };
enum class OutputFormat { CSV, JSONL };
enum class SourceKind { SINGLE, DUAL };
/// AVERAGE: the energy grid is the expected energy per sample, and the
/// first-round energy is solved for. FIRST_ROUND: the grid is E_D1.
enum class EnergyAxis { AVERAGE, FIRST_ROUND };

struct ExperimentConfig {
  Mode mode = Mode::BOUNDS;
  std::optional<FigureId> figure_id;
  std::vector<double> energy_db;
  bool energy_linear = false;
  std::vector<int> B{4};
  std::vector<double> rho{0.99};
  double alpha = 0.0;
  std::vector<double> lambda;
  double mu = 1.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::CSV;
  SourceKind source = SourceKind::SINGLE;
  Distribution distribution = Distribution::UNIFORM;
  std::optional<double> theta;
  EnergyAxis energy_axis = EnergyAxis::AVERAGE;
  int threads = 0;

  ExperimentConfig();
  /// Throws ConfigError.
  void validate() const;
};

/// 99 points 0.01, 0.02, ..., 0.99.
std::vector<double> default_lambda_grid();

/// Reads flat `key = value` lines; `#` starts a comment. Lists are comma
/// separated or `start:stop:step` ranges. Throws ConfigError with the line
/// number and key. Keys found are appended to `keys`. Figure presets are not
/// applied here.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {},
                              std::vector<std::string>* keys = nullptr);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {},
                             std::vector<std::string>* keys = nullptr);

/// Fills in the parameterization of a figure; keys listed in
/// `explicit_keys` keep their current values.
void apply_figure_preset(ExperimentConfig& cfg, const std::vector<std::string>& explicit_keys = {});

/// Canonical key=value echo of the configuration, one entry per line.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

struct ResultRow {
  std::string mode;
  int B = 0;
  std::optional<double> rho;
  double alpha = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double e_over_n0_db = 0.0;
  std::optional<double> bound_lower;
  std::optional<double> bound_upper_1round;
  std::optional<double> bound_upper_2round;
  std::optional<double> mc_mse;
  std::optional<double> mc_stderr;
  std::optional<double> avg_energy;
  std::optional<double> retx_rate;
};

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<ResultRow> rows;
};

const std::vector<std::string>& result_columns();

/// Sweeps the grid and returns rows sorted by (mode, B, rho, e_over_n0_db).
/// Figure presets must already be applied.
/// Throws ConfigError for invalid configurations and NonConvergenceError
/// when a root or quadrature fails.
ResultTable run_experiment(const ExperimentConfig& cfg);

void write_table(const ResultTable& table, OutputFormat format, std::ostream& out);

/// Exhaustive grid minimisation; ties keep the first grid point.
std::pair<double, double> optimize_lambda(const std::function<double(double)>& objective,
                                          const std::vector<double>& grid);

/// Two-round single-source AWGN distortion bound at a fixed average
/// energy, as a function of lambda.
double two_round_bound_at_energy(int B, double avg_energy, double mu, double lambda, double n0 = 1.0);

/// Root ed1 of avg_of(ed1) = avg on (0, avg], for avg_of(ed1) >= ed1.
double solve_for_average(const std::function<double(double)>& avg_of, double avg);

/// First-round energy whose two-round schedule has the requested average
/// energy (AWGN when alpha = 0, Rician otherwise).
double solve_first_round_energy(int B, double avg_energy, double mu, double lambda, double alpha,
                                double n0 = 1.0);

/// Smallest energy on [lo, hi] (linear, per N0) at which f drops to target;
/// f must be decreasing. Throws NonConvergenceError when not bracketed.
double energy_for_distortion(const std::function<double(double)>& f, double target, double lo, double hi);

const char* to_string(Mode m);
const char* to_string(FigureId f);

}  // namespace twoway
