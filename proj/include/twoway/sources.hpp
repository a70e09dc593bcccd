#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "twoway/rng.hpp"

namespace twoway {

enum class SourceModel { MODEL_I, MODEL_II };
enum class Distribution { UNIFORM, GAUSSIAN };

/// Correlated pair generator. Base marginals have zero mean and unit
/// variance: uniform on (-sqrt(3), sqrt(3)) or standard normal.
struct SourceConfig {
  SourceModel model = SourceModel::MODEL_I;
  Distribution distribution = Distribution::UNIFORM;
  double rho = 0.0;
  int K = 1;

  void validate() const;
};

struct CorrelatedPair {
  std::vector<double> u1;
  std::vector<double> u2;
};

/// One draw of K coordinate pairs. Model I: u2 = rho u1 + sqrt(1-rho^2) u2'.
/// Model II: both are rho u + sqrt(1-rho^2) u_j' around a common u.
CorrelatedPair sample_pair(const SourceConfig& cfg, std::uint64_t seed, std::uint64_t trial = 0);

/// Scalar pair drawn from an existing stream (K = 1 fast path).
std::pair<double, double> draw_pair(const SourceConfig& cfg, CounterRng& rng);

double draw_base(Distribution d, CounterRng& rng);

/// Bivariate standard normal density with correlation rho.
double pair_density_gaussian(double u1, double u2, double rho);

}  // namespace twoway
