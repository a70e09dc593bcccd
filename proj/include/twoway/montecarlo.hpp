#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "twoway/protocol_dual.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/quantization.hpp"
#include "twoway/sources.hpp"

namespace twoway {

enum class ChannelKind { AWGN_NONCOHERENT, RICIAN };

struct ChannelSpec {
  ChannelKind kind = ChannelKind::AWGN_NONCOHERENT;
  double alpha = 0.0;
  double n0 = 1.0;
  void validate() const;
};

/// One simulation run. A single-source run draws one base sample per trial
/// and uses an EnergySchedule; a dual run draws a correlated pair and uses a
/// DualSchedule. In a dual run, round-2 data energy is split equally among
/// the sources that retransmit.
struct TrialConfig {
  SourceConfig source;
  QuantizerSpec quantizer;
  std::variant<EnergySchedule, DualSchedule> schedule;
  ChannelSpec channel;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  bool keep_trial_energies = false;
  /// Dual runs: radius of the compatible-pair test |rho u1 - u2| < radius
  /// used by the detector. Zero selects the natural default: the support
  /// radius sqrt(3 (1 - rho^2)) for uniform sources, schedule theta otherwise.
  double compat_radius = 0.0;
  void validate() const;
};

enum EventIndex { EV_FIRST_ERROR = 0, EV_UNCORRECTABLE = 1, EV_FALSE_NACK = 2, EV_SECOND_ERROR = 3 };

struct SimStats {
  std::uint64_t trials = 0;
  double mse = 0.0;
  double mse_stderr = 0.0;
  /// Per-source mean squared error (one entry for single-source runs).
  std::vector<double> source_mse;
  std::vector<double> source_mse_stderr;
  /// Per-source average energy (one entry for single-source runs).
  std::vector<double> source_energy;
  double avg_energy = 0.0;
  double energy_stderr = 0.0;
  /// Errors at round i among trials that reached round i.
  std::vector<double> per_round_error_rate;
  std::vector<std::uint64_t> rounds_reached;
  /// Fraction of trials with at least two rounds.
  double retransmission_rate = 0.0;
  /// Counts of first-round error, uncorrectable error, false NACK and
  /// second-round error (per trial: any source for dual runs).
  std::array<std::uint64_t, 4> counts{};
  /// Dual runs: first-round outcome frequencies.
  DualFirstRound first_round;
  std::vector<double> trial_energies;
};

SimStats run_single(const TrialConfig& cfg);
SimStats run_dual(const TrialConfig& cfg);

/// Adds |y_k|^2 to the running decision statistics.
void accumulate_statistics(std::span<const std::complex<double>> y, std::span<double> stats);

/// Index of the largest statistic; ties go to the lowest index.
int argmax_statistic(std::span<const double> stats);

}  // namespace twoway
