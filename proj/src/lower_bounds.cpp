#include "twoway/lower_bounds.hpp"

#include <cmath>
#include <numbers>

#include "twoway/errors.hpp"

namespace twoway {

namespace {

const double kPiE = std::numbers::pi * std::numbers::e;

void check_source(int source) {
  if (source != 1 && source != 2) throw DomainError("source index must be 1 or 2");
}

// (1 + K e/(N n0))^(-2N/K), or exp(-2e/n0) in the limit.
double decay(const BoundQuery& q, double e) {
  if (!q.N) return std::exp(-2.0 * e / q.n0);
  const double n = static_cast<double>(*q.N);
  return std::exp(-(2.0 * n / q.K) * std::log1p(q.K * e / (n * q.n0)));
}

double own_energy(const BoundQuery& q, int source) { return source == 1 ? q.e1 : q.e2; }
double other_energy(const BoundQuery& q, int source) { return source == 1 ? q.e2 : q.e1; }

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::HIGH: return "HIGH";
    case Regime::LOW: return "LOW";
    case Regime::PRODUCT: return "PRODUCT";
    case Regime::TIGHT: return "TIGHT";
    case Regime::SINGLE: return "SINGLE";
  }
  return "?";
}

void BoundQuery::validate() const {
  if (model == SourceModel::MODEL_II)
    throw UnsupportedError("lower bounds are available for source model I only");
  if (!(e1 >= 0.0) || !(e2 >= 0.0)) throw DomainError("energies must be non-negative");
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  if (K < 1) throw DomainError("K must be >= 1");
  if (N && *N < 1) throw DomainError("N must be >= 1");
  if (!(std::abs(rho) <= 1.0)) throw DomainError("|rho| must be <= 1");
}

double constant_single(Distribution d) { return d == Distribution::UNIFORM ? 6.0 / kPiE : 1.0; }

double constant_low(Distribution d, int source, double rho) {
  check_source(source);
  const double s = 1.0 - rho * rho;
  if (d == Distribution::GAUSSIAN) return s;
  return source == 1 ? 36.0 * s / (kPiE * kPiE) : 6.0 * s / kPiE;
}

double constant_product(Distribution d, double rho) {
  const double s = 1.0 - rho * rho;
  return d == Distribution::UNIFORM ? 36.0 * s / (kPiE * kPiE) : s;
}

double goblick_bound(double e, double n0) {
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  if (!(e >= 0.0)) throw DomainError("energy must be non-negative");
  return std::exp(-2.0 * e / n0);
}

BoundResult single_split_bound(const BoundQuery& q) {
  q.validate();
  const double c = constant_single(q.distribution);
  return {c * decay(q, q.e1), Regime::SINGLE, c};
}

BoundResult dual_bound(const BoundQuery& q, int source, Regime regime) {
  q.validate();
  check_source(source);
  const double em = own_energy(q, source);
  const double eo = other_energy(q, source);
  const bool sum = q.channel == ChannelModel::SUM;
  switch (regime) {
    case Regime::HIGH: {
      const double c = constant_single(q.distribution);
      const double f = sum ? decay(q, em + eo) : decay(q, em) * decay(q, eo);
      return {c * f, Regime::HIGH, c};
    }
    case Regime::LOW: {
      const double c = constant_low(q.distribution, source, q.rho);
      return {c * decay(q, em), Regime::LOW, c};
    }
    case Regime::PRODUCT: {
      const double c = constant_product(q.distribution, q.rho);
      const double f = sum ? decay(q, em + eo) : decay(q, em) * decay(q, eo);
      return {c * f, Regime::PRODUCT, c};
    }
    default:
      throw UnsupportedError("dual_bound accepts HIGH, LOW or PRODUCT");
  }
}

BoundResult parallel_tight_bound(const BoundQuery& q, int source) {
  q.validate();
  check_source(source);
  const double r2 = q.rho * q.rho;
  const double f1 = decay(q, q.e1);
  const double f2 = decay(q, q.e2);
  if (source == 2) {
    const double a = q.distribution == Distribution::UNIFORM ? 6.0 / kPiE : 1.0;
    return {a * ((1.0 - r2) * f2 + r2 * f1 * f2), Regime::TIGHT, a};
  }
  if (q.distribution == Distribution::UNIFORM)
    throw UnsupportedError("no two-term parallel bound for the uniform first source");
  if (q.rho == 0.0) throw DomainError("two-term bound for source 1 needs rho != 0");
  return {(1.0 - r2) / r2 * f1 + f1 * f2 / r2, Regime::TIGHT, 1.0 / r2};
}

BoundResult regime_select(const BoundQuery& q, int source, double d_other) {
  q.validate();
  check_source(source);
  if (!(d_other >= 0.0)) throw DomainError("distortion of the other source must be non-negative");
  const double s = 1.0 - q.rho * q.rho;
  const double g = std::exp(-2.0 * other_energy(q, source) / q.n0);

  bool high = false;
  bool low = false;
  if (q.distribution == Distribution::GAUSSIAN) {
    high = s <= std::min(d_other, g);
    low = d_other >= g && s >= g;
  } else if (source == 1) {
    const double c = 6.0 * s / kPiE;
    high = c <= std::min(d_other, g);
    low = d_other >= g && c >= g;
  } else {
    high = s <= std::min(kPiE * d_other / 6.0, g);
    low = d_other >= 6.0 / kPiE * g && s >= g;
  }
  if (high) return dual_bound(q, source, Regime::HIGH);
  if (low) return dual_bound(q, source, Regime::LOW);
  if (!(d_other > 0.0)) throw DomainError("product branch needs a positive distortion for the other source");
  BoundResult p = dual_bound(q, source, Regime::PRODUCT);
  p.value /= d_other;
  return p;
}

}  // namespace twoway
