#include "twoway/sources.hpp"

#include <cmath>
#include <numbers>

#include "twoway/errors.hpp"

namespace twoway {

void SourceConfig::validate() const {
  if (!(std::abs(rho) <= 1.0)) throw DomainError("source correlation must satisfy |rho| <= 1");
  if (K < 1) throw DomainError("source dimension K must be >= 1");
}

double draw_base(Distribution d, CounterRng& rng) {
  if (d == Distribution::UNIFORM) return std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
  return rng.normal();
}

std::pair<double, double> draw_pair(const SourceConfig& cfg, CounterRng& rng) {
  const double c = std::sqrt(1.0 - cfg.rho * cfg.rho);
  if (cfg.model == SourceModel::MODEL_I) {
    const double u1 = draw_base(cfg.distribution, rng);
    const double w = draw_base(cfg.distribution, rng);
    return {u1, cfg.rho * u1 + c * w};
  }
  const double u = draw_base(cfg.distribution, rng);
  const double w1 = draw_base(cfg.distribution, rng);
  const double w2 = draw_base(cfg.distribution, rng);
  return {cfg.rho * u + c * w1, cfg.rho * u + c * w2};
}

CorrelatedPair sample_pair(const SourceConfig& cfg, std::uint64_t seed, std::uint64_t trial) {
  cfg.validate();
  CounterRng rng(seed, trial);
  CorrelatedPair out;
  out.u1.resize(cfg.K);
  out.u2.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const auto [a, b] = draw_pair(cfg, rng);
    out.u1[k] = a;
    out.u2[k] = b;
  }
  return out;
}

double pair_density_gaussian(double u1, double u2, double rho) {
  if (!(std::abs(rho) < 1.0)) throw DomainError("bivariate density needs |rho| < 1");
  const double s = 1.0 - rho * rho;
  const double q = (u1 * u1 - 2.0 * rho * u1 * u2 + u2 * u2) / (2.0 * s);
  return std::exp(-q) / (2.0 * std::numbers::pi * std::sqrt(s));
}

}  // namespace twoway
