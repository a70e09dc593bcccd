#pragma once

#include <vector>

namespace twoway {

/// Per-round energies of the single-source protocol. Round i transmits data
/// with energy ed[i]; if the data decision is wrong the encoder spends ec[i]
/// on the control signal, which the receiver compares against lambda ec[i].
struct EnergySchedule {
  int n_rounds = 1;
  std::vector<double> ed;
  std::vector<double> ec;
  double lambda = 0.25;
  double n0 = 1.0;

  void validate() const;
  /// Sum of data energies of rounds 1..L, divided by N0.
  double cumulative_gamma(int L) const;
};

struct ProtocolBound {
  double p_e = 0.0;
  double avg_energy = 0.0;
  double distortion = 0.0;
  /// Bits used for the quantization term (real-valued in asymptotic mode).
  double bits = 0.0;
};

/// How Pr(E_i), the round-i data error probability, enters energy accounting.
enum class RoundErrorModel { UNION_BOUND, EXACT };

/// Probability that a wrong decision is acknowledged as correct.
double pr_uncorrectable(double ec, double n0, double lambda, bool exact);

/// Probability that a correct decision is flagged as wrong, exp(-lambda ec/N0).
double pr_misdetect(double ec, double n0, double lambda);

/// Union bound min(1, 2^B P2(L, gamma_cum)) on the error after L rounds.
double pr_round_error(int B, double cumulative_gamma, int L);

/// Exact AWGN error probability after L rounds of square-law combining.
double pr_round_error_exact(int B, double cumulative_gamma, int L);

/// Upper bound sum_{i<N} Pr(E_i) Pr(E_e->c,i) + Pr(E_N), clamped to 1.
double total_error(int B, const EnergySchedule& s);

/// Expected transmitted energy: data of round 1, control energy after each
/// wrong decision, and data of every further round that is triggered.
double avg_energy(int B, const EnergySchedule& s, RoundErrorModel model = RoundErrorModel::EXACT);

/// Probability that round 2 takes place.
double retransmission_probability(int B, const EnergySchedule& s,
                                  RoundErrorModel model = RoundErrorModel::EXACT);

/// Two rounds: ed2 = (2 - mu) ed1, ec1 = ed2 / (2 (1 - sqrt(lambda))^2).
/// Three rounds: ed2 = ed3 = (1 - mu) ed1, ec2 = ed2 / (2 (1 - sqrt(lambda))^2),
/// ec1 = 2 ec2.
EnergySchedule allocate_energies(int n_rounds, double ed1, double mu, double lambda, double n0 = 1.0);

/// Non-asymptotic: 2^-2B + 2 total_error. Asymptotic: the same union-bound
/// terms with B treated as a free real parameter and minimised, which
/// balances the quantization term against the channel-error terms.
ProtocolBound distortion_upper(int B, const EnergySchedule& s, bool asymptotic = false);

/// Asymptotic exponent of the minimised bound, -d ln D / d(E_D1/N0), implied
/// by the schedule's energy ratios: (2/3) (sum of data energies)/(2 E_D1).
double asymptotic_exponent(const EnergySchedule& s);

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twoway
