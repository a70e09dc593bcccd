#pragma once

#include <utility>

#include "twoway/sources.hpp"

namespace twoway {

enum class CorrelationRegime { HIGH, LOW };

/// Energies and parameters of the two-source protocol. ed2 and the control
/// energies of round 1 are totals over both sources unless noted.
struct DualSchedule {
  double ed11 = 0.0;
  double ed12 = 0.0;
  double ed2 = 0.0;
  double ec11 = 0.0;
  double ec12 = 0.0;
  double lambda = 0.25;
  double n0 = 1.0;
  int B = 4;
  double rho = 1.0;
  double theta = 1.0;

  void validate() const;
  double ed1() const { return ed11 + ed12; }
  double ec1() const { return ec11 + ec12; }

  /// Equal split of every round and phase between the two sources.
  static DualSchedule symmetric(double ed1, double ed2, double ec1, double lambda, double n0, int B,
                                double rho, double theta);
};

/// ed2 = (2 - mu) ed1; ec1 = ed2/(1-sqrt(lambda))^2 (HIGH) or
/// ed2/(2 (1-sqrt(lambda))^2) (LOW); equal split between sources.
DualSchedule allocate_dual(double ed1, double mu, double lambda, CorrelationRegime regime, int B,
                           double rho, double theta, double n0 = 1.0);

/// Default compatibility radius 2 sqrt(B ln 2 / (1 - rho^2)) for Gaussian
/// sources, capped where every bin pair is already compatible.
double default_theta_gaussian(int B, double rho);

/// Joint first-round outcome probabilities: exactly one source wrong
/// (source 1 / source 2) and both wrong.
struct DualFirstRound {
  double p10 = 0.0;
  double p01 = 0.0;
  double p11 = 0.0;
};

/// Union bounds on the first-round outcome probabilities, built from the
/// same pairwise terms as the error bounds (one-source errors split evenly
/// between the two sources) and scaled to a total of at most one.
DualFirstRound dual_first_round_bound(const DualSchedule& s, Distribution d);

struct DualEnergy {
  double exact = 0.0;
  double bound = 0.0;
};

/// Expected energy for given first-round outcome probabilities; the
/// uncorrectable and false-alarm probabilities come from the schedule.
DualEnergy dual_avg_energy(const DualSchedule& s, const DualFirstRound& probs);

struct DualErrorProbs {
  double p_e1 = 0.0;  // one source in error at the end
  double p_e2 = 0.0;  // both sources in error at the end
};

DualErrorProbs dual_pe_uniform(const DualSchedule& s);
DualErrorProbs dual_pe_gaussian(const DualSchedule& s);

/// First-round-only counterparts (no feedback): the uncorrectable-error
/// factor is one and no second round follows.
DualErrorProbs dual_pe_uniform_one_round(const DualSchedule& s);

/// Pr(E_e->c) P_e,1,1 + Pr(E_e->c)^2 P_e,2,1 + Pr(E_2), clamped to [0, 1].
double appendix_total_pe(double p_uncorrectable, double p_one_first, double p_both_first,
                         double p_second);

/// True when sqrt(1 - rho^2) < theta 2^-B.
bool dual_high_correlation(const DualSchedule& s);

/// True when theta exceeds 2 sqrt(B ln 2 / (1 - rho^2)).
CorrelationRegime gaussian_regime(const DualSchedule& s);

/// 96 + (3/rho^2) e^(-x/2) over 14 + (e^(-x/2)/2 + 2 rho^2)^2, to the 2/3, x = E_D1/N0.
double beta_factor(double ed1_over_n0, double rho);

/// (4 sqrt(x/pi) + 16 x)^(-2/3), x = E_D1/N0.
double alpha_factor(double ed1_over_n0);

/// Pr(|U2'| > theta sqrt(1 - rho^2)) for a standard normal U2': exact tail
/// or the exponential bound exp(-theta^2 (1 - rho^2)/2).
double gaussian_incompatibility(double theta, double rho, bool exact);

/// Non-asymptotic: D_q + D_e1 P_e1 + D_e2 P_e2. Asymptotic:
/// exp(-E_D1 (1 - mu/3)/N0) beta(E_D1, rho) with mu = 2 - ed2/ed1.
double dual_distortion_uniform(const DualSchedule& s, bool asymptotic = false);

/// Same composition without feedback.
double dual_distortion_uniform_one_round(const DualSchedule& s);

/// Non-asymptotic: D_q + D_ec1 P_e1 + D_e2 P_e2 + P_inc (D_eic1 + D_e2 P_e2)
/// with the exponential bound on P_inc. Asymptotic HIGH:
/// exp(-E_D1 (1 - mu/3)/N0) alpha(E_D1); LOW: the three exponentials with
/// exponents (1-mu/4)/2, (1-mu/3)/2 and (3-mu)/4 times E_D1/N0 and unit weights.
double dual_distortion_gaussian(const DualSchedule& s, CorrelationRegime regime, bool asymptotic = false);

}  // namespace twoway
