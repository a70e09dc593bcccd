#include "twoway/protocol_single.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twoway/errors.hpp"
#include "twoway/special_functions.hpp"

namespace twoway {

namespace {

void check_bits(int B) {
  if (B < 1) throw DomainError("B must be >= 1");
  if (B > 30) throw DomainError("B must be <= 30");
}

double round_error(int B, double gamma, int L, RoundErrorModel model) {
  return model == RoundErrorModel::EXACT ? pr_round_error_exact(B, gamma, L)
                                         : pr_round_error(B, gamma, L);
}

}  // namespace

void EnergySchedule::validate() const {
  if (n_rounds < 1) throw DomainError("schedule needs at least one round");
  if (static_cast<int>(ed.size()) < n_rounds) throw DomainError("schedule is missing data energies");
  if (static_cast<int>(ec.size()) < n_rounds - 1) throw DomainError("schedule is missing control energies");
  for (double e : ed)
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("data energies must be finite and non-negative");
  for (double e : ec)
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("control energies must be finite and non-negative");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
}

double EnergySchedule::cumulative_gamma(int L) const {
  double sum = 0.0;
  for (int i = 0; i < L; ++i) sum += ed[i];
  return sum / n0;
}

double pr_uncorrectable(double ec, double n0, double lambda, bool exact) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  if (!(ec >= 0.0)) throw DomainError("control energy must be non-negative");
  if (!exact) return uncorrectable_bound(lambda, ec / n0);
  return marcum_q1_complement(std::sqrt(2.0 * ec / n0), std::sqrt(2.0 * lambda * ec / n0));
}

double pr_misdetect(double ec, double n0, double lambda) {
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  return std::exp(-lambda * ec / n0);
}

double pr_round_error(int B, double cumulative_gamma, int L) {
  check_bits(B);
  return std::min(1.0, std::ldexp(p2_pairwise(L, cumulative_gamma), B));
}

double pr_round_error_exact(int B, double cumulative_gamma, int L) {
  check_bits(B);
  return rician_pm(std::uint64_t{1} << B, L, cumulative_gamma, 0.0);
}

double total_error(int B, const EnergySchedule& s) {
  s.validate();
  const int n = s.n_rounds;
  double p = 0.0;
  for (int i = 1; i < n; ++i)
    p += pr_round_error(B, s.cumulative_gamma(i), i) * uncorrectable_bound(s.lambda, s.ec[i - 1] / s.n0);
  p += pr_round_error(B, s.cumulative_gamma(n), n);
  return std::min(1.0, p);
}

double avg_energy(int B, const EnergySchedule& s, RoundErrorModel model) {
  s.validate();
  const int n = s.n_rounds;
  double e = s.ed[0];
  for (int i = 1; i < n; ++i) {
    const double pe = round_error(B, s.cumulative_gamma(i), i, model);
    const double ec = s.ec[i - 1];
    const double miss = pr_uncorrectable(ec, s.n0, s.lambda, true);
    const double false_alarm = pr_misdetect(ec, s.n0, s.lambda);
    e += pe * ec;
    e += s.ed[i] * (pe * (1.0 - miss) + (1.0 - pe) * false_alarm);
  }
  return e;
}

double retransmission_probability(int B, const EnergySchedule& s, RoundErrorModel model) {
  s.validate();
  if (s.n_rounds < 2) return 0.0;
  const double pe = round_error(B, s.cumulative_gamma(1), 1, model);
  const double ec = s.ec[0];
  return pe * (1.0 - pr_uncorrectable(ec, s.n0, s.lambda, true)) +
         (1.0 - pe) * pr_misdetect(ec, s.n0, s.lambda);
}

EnergySchedule allocate_energies(int n_rounds, double ed1, double mu, double lambda, double n0) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(ed1 > 0.0) || !std::isfinite(ed1)) throw DomainError("first-round energy must be positive");
  const double gap = (1.0 - std::sqrt(lambda)) * (1.0 - std::sqrt(lambda));
  EnergySchedule s;
  s.n_rounds = n_rounds;
  s.lambda = lambda;
  s.n0 = n0;
  if (n_rounds == 2) {
    if (!(mu > 0.0 && mu < 2.0)) throw DomainError("two-round slack mu must lie in (0, 2)");
    const double ed2 = (2.0 - mu) * ed1;
    s.ed = {ed1, ed2};
    s.ec = {ed2 / (2.0 * gap)};
  } else if (n_rounds == 3) {
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("three-round slack mu must lie in (0, 1)");
    const double ed2 = (1.0 - mu) * ed1;
    const double ec2 = ed2 / (2.0 * gap);
    s.ed = {ed1, ed2, ed2};
    s.ec = {2.0 * ec2, ec2};
  } else {
    throw DomainError("energy allocation rules exist for 2 or 3 rounds");
  }
  s.validate();
  return s;
}

ProtocolBound distortion_upper(int B, const EnergySchedule& s, bool asymptotic) {
  check_bits(B);
  s.validate();
  ProtocolBound out;
  out.avg_energy = avg_energy(B, s);
  if (!asymptotic) {
    out.p_e = total_error(B, s);
    out.distortion = std::ldexp(1.0, -2 * B) + 2.0 * out.p_e;
    out.bits = B;
    return out;
  }
  // With x = 2^B the bound is x^-2 + 2 a x, minimised at x = a^(-1/3).
  const int n = s.n_rounds;
  double a = 0.0;
  for (int i = 1; i < n; ++i)
    a += p2_pairwise(i, s.cumulative_gamma(i)) * uncorrectable_bound(s.lambda, s.ec[i - 1] / s.n0);
  a += p2_pairwise(n, s.cumulative_gamma(n));
  const double slope = 2.0 * a;
  double x = std::cbrt(2.0 / slope);
  if (!(x >= 2.0)) x = 2.0;
  out.bits = std::log2(x);
  out.p_e = x * a;
  out.distortion = 1.0 / (x * x) + slope * x;
  return out;
}

double asymptotic_exponent(const EnergySchedule& s) {
  s.validate();
  if (!(s.ed[0] > 0.0)) throw DomainError("asymptotic exponent needs a positive first-round energy");
  const double gap = (1.0 - std::sqrt(s.lambda)) * (1.0 - std::sqrt(s.lambda));
  double slowest = std::numeric_limits<double>::infinity();
  double data = 0.0;
  for (int i = 0; i < s.n_rounds; ++i) {
    data += s.ed[i];
    const double control = i + 1 < s.n_rounds ? gap * s.ec[i] : 0.0;
    slowest = std::min(slowest, 0.5 * data + control);
  }
  return (2.0 / 3.0) * slowest / s.ed[0];
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace twoway
