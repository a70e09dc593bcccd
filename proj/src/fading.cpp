#include "twoway/fading.hpp"

#include <algorithm>
#include <cmath>

#include "twoway/errors.hpp"
#include "twoway/special_functions.hpp"

namespace twoway {

namespace {

// Error after L rounds with independent fading per round, at the mean
// per-round SNR (exact when the rounds carry equal energy).
double pm_rounds(std::uint64_t M, int L, double gamma_cum, double alpha) {
  const double g = gamma_cum / L;
  const double scale = 1.0 + alpha * g;
  return noncoherent_pm(M, L, L * g * (1.0 - alpha) / scale, scale);
}

void require_two_rounds(const EnergySchedule& s) {
  s.validate();
  if (s.n_rounds != 2) throw UnsupportedError("fading analysis covers two-round schedules only");
}

}  // namespace

void RicianSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
}

double rician_uncorrectable(double ec, double lambda, const RicianSpec& spec) {
  spec.validate();
  if (!(ec >= 0.0)) throw DomainError("control energy must be non-negative");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  const double den = spec.alpha * ec + spec.n0;
  const double a = std::sqrt(2.0 * (1.0 - spec.alpha) * ec / den);
  const double b = std::sqrt(2.0 * lambda * ec / den);
  return marcum_q1_complement(a, b);
}

double rician_distortion_one(int B, double ed1, const RicianSpec& spec) {
  spec.validate();
  const std::uint64_t M = std::uint64_t{1} << B;
  const double pm = rician_pm(M, 1, ed1 / spec.n0, spec.alpha);
  return std::ldexp(1.0, -2 * B) + 2.0 * std::min(1.0, pm);
}

double rician_distortion_two(int B, const EnergySchedule& s, const RicianSpec& spec) {
  require_two_rounds(s);
  spec.validate();
  const std::uint64_t M = std::uint64_t{1} << B;
  const double p1 = rician_pm(M, 1, s.cumulative_gamma(1), spec.alpha);
  const double p12 = pm_rounds(M, 2, s.cumulative_gamma(2), spec.alpha);
  const double miss = rician_uncorrectable(s.ec[0], s.lambda, spec);
  return std::ldexp(1.0, -2 * B) + 2.0 * std::min(1.0, p1 * miss + p12);
}

double rician_avg_energy(int B, const EnergySchedule& s, const RicianSpec& spec) {
  require_two_rounds(s);
  spec.validate();
  const std::uint64_t M = std::uint64_t{1} << B;
  const double p1 = std::min(1.0, rician_pm(M, 1, s.cumulative_gamma(1), spec.alpha));
  const double miss = rician_uncorrectable(s.ec[0], s.lambda, spec);
  const double fa = pr_misdetect(s.ec[0], s.n0, s.lambda);
  return s.ed[0] + p1 * s.ec[0] + s.ed[1] * (p1 * (1.0 - miss) + (1.0 - p1) * fa);
}

}  // namespace twoway
