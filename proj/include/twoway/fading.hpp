#pragma once

#include "twoway/protocol_single.hpp"

namespace twoway {

/// Rician block fading with a fresh coefficient per transmission: the
/// channel gain is sqrt(1 - alpha) e^(j phi) + sqrt(alpha) h, h ~ CN(0, 1).
struct RicianSpec {
  double alpha = 0.0;
  double n0 = 1.0;
  void validate() const;
};

/// Probability that the control signal of energy ec is missed by the
/// threshold detector lambda ec under fading.
double rician_uncorrectable(double ec, double lambda, const RicianSpec& spec);

/// 2^-2B + 2 P_M(1, gamma_1), clamped at 2^-2B + 2.
double rician_distortion_one(int B, double ed1, const RicianSpec& spec);

/// 2^-2B + 2 [P_M(1, gamma_1) Pr(E_e->c,1) + P_M(2)] for a two-round
/// schedule. P_M(2) combines two independently faded rounds at the mean
/// per-round SNR: noncentrality 2 g (1 - alpha)/(1 + alpha g), g = gamma_12/2.
double rician_distortion_two(int B, const EnergySchedule& s, const RicianSpec& spec);

/// Expected energy of the two-round schedule under fading.
double rician_avg_energy(int B, const EnergySchedule& s, const RicianSpec& spec);

}  // namespace twoway
