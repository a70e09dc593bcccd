#pragma once

#include <cstdint>
#include <optional>

#include "twoway/sources.hpp"

namespace twoway {

enum class ChannelModel { SUM, PARALLEL };
enum class Regime { HIGH, LOW, PRODUCT, TIGHT, SINGLE };

const char* to_string(Regime r);

/// Parameters of an information-theoretic lower bound. Energies are per
/// source sample; N unset means the N -> infinity limit.
struct BoundQuery {
  Distribution distribution = Distribution::UNIFORM;
  ChannelModel channel = ChannelModel::SUM;
  SourceModel model = SourceModel::MODEL_I;
  double rho = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double n0 = 1.0;
  int K = 1;
  std::optional<std::int64_t> N;

  void validate() const;
};

struct BoundResult {
  double value = 0.0;
  Regime regime = Regime::SINGLE;
  double constant = 0.0;
};

double goblick_bound(double e, double n0);

/// Point-to-point bound C_d (1 + K E/(N N0))^(-2N/K), C_d = 6/(pi e) for
/// the uniform source and 1 for the Gaussian source. Uses q.e1.
BoundResult single_split_bound(const BoundQuery& q);

/// Two-source bound on the distortion of `source` (1 or 2) in the given regime.
BoundResult dual_bound(const BoundQuery& q, int source, Regime regime);

/// Two-term parallel-channel bound. Uniform sources support source 2 only.
BoundResult parallel_tight_bound(const BoundQuery& q, int source);

/// Case analysis picking HIGH, LOW or PRODUCT / d_other for `source`, where
/// d_other is the distortion of the other source. Ties resolve to HIGH.
BoundResult regime_select(const BoundQuery& q, int source, double d_other);

/// Constants of the individual regimes.
double constant_single(Distribution d);
double constant_low(Distribution d, int source, double rho);
double constant_product(Distribution d, double rho);

}  // namespace twoway
