#include "twoway/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "twoway/errors.hpp"
#include "twoway/rng.hpp"

namespace twoway {

namespace {

constexpr std::uint64_t kChunk = 4096;

struct Accum {
  double err = 0.0;
  double err_sq = 0.0;
  double energy = 0.0;
  double energy_sq = 0.0;
  std::vector<double> src_err;
  std::vector<double> src_err_sq;
  std::vector<double> src_energy;
  std::vector<std::uint64_t> round_errors;
  std::vector<std::uint64_t> rounds_reached;
  std::uint64_t retx = 0;
  std::array<std::uint64_t, 4> counts{};
  std::array<std::uint64_t, 3> first{};  // p10, p01, p11

  Accum(int sources, int rounds)
      : src_err(sources), src_err_sq(sources), src_energy(sources), round_errors(rounds), rounds_reached(rounds) {}

  void merge(const Accum& o) {
    err += o.err;
    err_sq += o.err_sq;
    energy += o.energy;
    energy_sq += o.energy_sq;
    for (std::size_t j = 0; j < src_err.size(); ++j) {
      src_err[j] += o.src_err[j];
      src_err_sq[j] += o.src_err_sq[j];
      src_energy[j] += o.src_energy[j];
    }
    for (std::size_t i = 0; i < round_errors.size(); ++i) {
      round_errors[i] += o.round_errors[i];
      rounds_reached[i] += o.rounds_reached[i];
    }
    retx += o.retx;
    for (int i = 0; i < 4; ++i) counts[i] += o.counts[i];
    for (int i = 0; i < 3; ++i) first[i] += o.first[i];
  }
};

double stderr_of(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

std::complex<double> channel_gain(const ChannelSpec& ch, CounterRng& rng) {
  const std::complex<double> los = std::polar(1.0, rng.phase());
  if (ch.kind == ChannelKind::AWGN_NONCOHERENT) return los;
  return std::sqrt(1.0 - ch.alpha) * los + std::sqrt(ch.alpha) * rng.complex_normal(1.0);
}

/// Transmits index `m` with energy `e` over M orthogonal dimensions and adds
/// the received energies to `stats`.
void transmit(int m, double e, const ChannelSpec& ch, CounterRng& rng, std::vector<std::complex<double>>& y,
              std::vector<double>& stats) {
  const std::complex<double> gain = channel_gain(ch, rng);
  for (auto& v : y) v = rng.complex_normal(ch.n0);
  y[m] += std::sqrt(e) * gain;
  accumulate_statistics(y, stats);
}

/// Control phase: returns true when the receiver declares a NACK.
bool control_phase(bool wrong, double ec, double lambda, const ChannelSpec& ch, CounterRng& rng) {
  std::complex<double> yc = rng.complex_normal(ch.n0);
  if (wrong) yc += std::sqrt(ec) * channel_gain(ch, rng);
  return std::norm(yc) > lambda * ec;
}

SimStats finish(const Accum& a, std::uint64_t n, std::vector<double> energies) {
  SimStats s;
  const double dn = static_cast<double>(n);
  s.trials = n;
  s.mse = a.err / dn;
  s.mse_stderr = stderr_of(a.err, a.err_sq, n);
  for (std::size_t j = 0; j < a.src_err.size(); ++j) {
    s.source_mse.push_back(a.src_err[j] / dn);
    s.source_mse_stderr.push_back(stderr_of(a.src_err[j], a.src_err_sq[j], n));
    s.source_energy.push_back(a.src_energy[j] / dn);
  }
  s.avg_energy = a.energy / dn;
  s.energy_stderr = stderr_of(a.energy, a.energy_sq, n);
  s.rounds_reached = a.rounds_reached;
  for (std::size_t i = 0; i < a.round_errors.size(); ++i)
    s.per_round_error_rate.push_back(a.rounds_reached[i] ? static_cast<double>(a.round_errors[i]) /
                                                               static_cast<double>(a.rounds_reached[i])
                                                         : 0.0);
  s.retransmission_rate = static_cast<double>(a.retx) / dn;
  s.counts = a.counts;
  s.first_round.p10 = static_cast<double>(a.first[0]) / dn;
  s.first_round.p01 = static_cast<double>(a.first[1]) / dn;
  s.first_round.p11 = static_cast<double>(a.first[2]) / dn;
  s.trial_energies = std::move(energies);
  return s;
}

using ChunkFn = std::function<void(std::uint64_t begin, std::uint64_t end, Accum& acc, double* energies)>;

/// Runs fixed-size chunks on a worker pool and reduces them in chunk order,
/// so the result does not depend on the number of workers.
SimStats run_chunks(const TrialConfig& cfg, int sources, int rounds, const ChunkFn& fn) {
  const std::uint64_t n = cfg.trials;
  const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<Accum> parts(n_chunks, Accum(sources, rounds));
  std::vector<double> energies;
  if (cfg.keep_trial_energies) energies.assign(n, 0.0);
  double* ep = cfg.keep_trial_energies ? energies.data() : nullptr;

  int workers = cfg.workers;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), n_chunks));

  std::atomic<std::uint64_t> next{0};
  auto work = [&]() {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      const std::uint64_t b = c * kChunk;
      fn(b, std::min(n, b + kChunk), parts[c], ep);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  Accum total(sources, rounds);
  for (const auto& p : parts) total.merge(p);
  return finish(total, n, std::move(energies));
}

/// Range-maximum over a statistic vector; ties resolve to the lowest index.
class RangeArgmax {
 public:
  void build(const std::vector<double>& v) {
    v_ = &v;
    const int n = static_cast<int>(v.size());
    int levels = 1;
    while ((1 << levels) <= n) ++levels;
    table_.assign(levels, std::vector<int>(n));
    for (int i = 0; i < n; ++i) table_[0][i] = i;
    for (int k = 1; k < levels; ++k)
      for (int i = 0; i + (1 << k) <= n; ++i) table_[k][i] = better(table_[k - 1][i], table_[k - 1][i + (1 << (k - 1))]);
  }
  int query(int lo, int hi) const {
    int k = 0;
    while ((2 << k) <= hi - lo + 1) ++k;
    return better(table_[k][lo], table_[k][hi - (1 << k) + 1]);
  }

 private:
  int better(int a, int b) const {
    const double va = (*v_)[a], vb = (*v_)[b];
    if (va > vb) return a;
    if (vb > va) return b;
    return std::min(a, b);
  }
  const std::vector<double>* v_ = nullptr;
  std::vector<std::vector<int>> table_;
};

}  // namespace

void ChannelSpec::validate() const {
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  if (kind == ChannelKind::RICIAN && !(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
}

void TrialConfig::validate() const {
  source.validate();
  channel.validate();
  if (trials < 1) throw DomainError("at least one trial is required");
  if (quantizer.B < 2 || quantizer.B > 16 || quantizer.bins() != (1 << quantizer.B))
    throw DomainError("quantizer is not initialised");
  if (!(compat_radius >= 0.0)) throw DomainError("compatibility radius must be non-negative");
  std::visit([](const auto& s) { s.validate(); }, schedule);
  if (const auto* d = std::get_if<DualSchedule>(&schedule); d && d->B != quantizer.B)
    throw DomainError("dual schedule and quantizer disagree on B");
}

void accumulate_statistics(std::span<const std::complex<double>> y, std::span<double> stats) {
  if (y.size() != stats.size()) throw DomainError("statistic and observation sizes differ");
  for (std::size_t k = 0; k < y.size(); ++k) stats[k] += std::norm(y[k]);
}

int argmax_statistic(std::span<const double> stats) {
  int best = 0;
  for (std::size_t k = 1; k < stats.size(); ++k)
    if (stats[k] > stats[best]) best = static_cast<int>(k);
  return best;
}

SimStats run_single(const TrialConfig& cfg) {
  cfg.validate();
  const auto* sp = std::get_if<EnergySchedule>(&cfg.schedule);
  if (!sp) throw DomainError("single-source run needs an EnergySchedule");
  const EnergySchedule s = *sp;
  const QuantizerSpec& q = cfg.quantizer;
  const ChannelSpec ch = cfg.channel;
  const int M = q.bins();
  const int R = s.n_rounds;

  auto fn = [&](std::uint64_t begin, std::uint64_t end, Accum& acc, double* energies) {
    std::vector<double> U(M);
    std::vector<std::complex<double>> y(M);
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(cfg.seed, t);
      const double u = draw_base(cfg.source.distribution, rng);
      const int m = quantize(q, u);
      std::fill(U.begin(), U.end(), 0.0);
      double energy = 0.0;
      int mhat = 0;
      for (int i = 0; i < R; ++i) {
        acc.rounds_reached[i]++;
        if (i == 1) acc.retx++;
        energy += s.ed[i];
        transmit(m, s.ed[i], ch, rng, y, U);
        mhat = argmax_statistic(U);
        const bool wrong = mhat != m;
        if (wrong) acc.round_errors[i]++;
        if (wrong && i == 0) acc.counts[EV_FIRST_ERROR]++;
        if (wrong && i == 1) acc.counts[EV_SECOND_ERROR]++;
        if (i == R - 1) break;
        const double ec = s.ec[i];
        if (wrong) energy += ec;
        const bool nack = control_phase(wrong, ec, s.lambda, ch, rng);
        if (i == 0 && wrong && !nack) acc.counts[EV_UNCORRECTABLE]++;
        if (i == 0 && !wrong && nack) acc.counts[EV_FALSE_NACK]++;
        if (!nack) break;
      }
      const double d = u - reconstruct(q, mhat);
      const double e2 = d * d;
      acc.err += e2;
      acc.err_sq += e2 * e2;
      acc.src_err[0] += e2;
      acc.src_err_sq[0] += e2 * e2;
      acc.src_energy[0] += energy;
      acc.energy += energy;
      acc.energy_sq += energy * energy;
      if (energies) energies[t] = energy;
    }
  };
  return run_chunks(cfg, 1, R, fn);
}

SimStats run_dual(const TrialConfig& cfg) {
  cfg.validate();
  const auto* sp = std::get_if<DualSchedule>(&cfg.schedule);
  if (!sp) throw DomainError("dual-source run needs a DualSchedule");
  if (cfg.source.K != 1) throw UnsupportedError("dual simulation supports K = 1 only");
  if (cfg.source.model != SourceModel::MODEL_I) throw UnsupportedError("dual simulation supports source model I only");
  const DualSchedule s = *sp;
  const QuantizerSpec& q = cfg.quantizer;
  const ChannelSpec ch = cfg.channel;
  const int M = q.bins();
  const double rho = cfg.source.rho;

  double radius = cfg.compat_radius;
  if (radius == 0.0) {
    if (cfg.source.distribution == Distribution::UNIFORM)
      radius = std::sqrt(3.0 * std::max(0.0, 1.0 - rho * rho)) + 1e-12;
    else
      radius = s.theta;
  }
  std::vector<int> lo(M), hi(M);
  for (int k = 0; k < M; ++k) {
    const auto set = compatible_set(q, k, radius, rho);
    if (set.empty()) {
      lo[k] = 1;
      hi[k] = 0;
    } else {
      lo[k] = *std::min_element(set.begin(), set.end());
      hi[k] = *std::max_element(set.begin(), set.end());
    }
  }
  auto compatible = [&](int k, int l) { return lo[k] <= l && l <= hi[k]; };

  auto fn = [&](std::uint64_t begin, std::uint64_t end, Accum& acc, double* energies) {
    std::vector<double> U1(M), U2(M);
    std::vector<std::complex<double>> y(M);
    RangeArgmax rmq;

    auto joint = [&](int& k_out, int& l_out) {
      rmq.build(U2);
      double best = -1.0;
      k_out = 0;
      l_out = 0;
      for (int k = 0; k < M; ++k) {
        if (lo[k] > hi[k]) continue;
        const int l = rmq.query(lo[k], hi[k]);
        const double v = U1[k] + U2[l];
        if (v > best) {
          best = v;
          k_out = k;
          l_out = l;
        }
      }
    };
    auto given_second = [&](int l) {
      int best = -1;
      for (int k = 0; k < M; ++k)
        if (compatible(k, l) && (best < 0 || U1[k] > U1[best])) best = k;
      return best < 0 ? argmax_statistic(U1) : best;
    };
    auto given_first = [&](int k) {
      if (lo[k] > hi[k]) return argmax_statistic(U2);
      int best = lo[k];
      for (int l = lo[k] + 1; l <= hi[k]; ++l)
        if (U2[l] > U2[best]) best = l;
      return best;
    };

    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(cfg.seed, t);
      const auto [u1, u2] = draw_pair(cfg.source, rng);
      const int m1 = quantize(q, u1);
      const int m2 = quantize(q, u2);
      std::fill(U1.begin(), U1.end(), 0.0);
      std::fill(U2.begin(), U2.end(), 0.0);
      double e1 = s.ed11, e2 = s.ed12;

      acc.rounds_reached[0]++;
      transmit(m1, s.ed11, ch, rng, y, U1);
      transmit(m2, s.ed12, ch, rng, y, U2);
      int k = 0, l = 0;
      joint(k, l);
      const bool w1 = k != m1, w2 = l != m2;
      if (w1 || w2) {
        acc.round_errors[0]++;
        acc.counts[EV_FIRST_ERROR]++;
      }
      if (w1 && w2) acc.first[2]++;
      else if (w1) acc.first[0]++;
      else if (w2) acc.first[1]++;

      if (w1) e1 += s.ec11;
      if (w2) e2 += s.ec12;
      const bool n1 = control_phase(w1, s.ec11, s.lambda, ch, rng);
      const bool n2 = control_phase(w2, s.ec12, s.lambda, ch, rng);
      if ((w1 && !n1) || (w2 && !n2)) acc.counts[EV_UNCORRECTABLE]++;
      if ((!w1 && n1) || (!w2 && n2)) acc.counts[EV_FALSE_NACK]++;

      if (n1 || n2) {
        acc.rounds_reached[1]++;
        acc.retx++;
        const double share = s.ed2 / ((n1 ? 1 : 0) + (n2 ? 1 : 0));
        if (n1) {
          transmit(m1, share, ch, rng, y, U1);
          e1 += share;
        }
        if (n2) {
          transmit(m2, share, ch, rng, y, U2);
          e2 += share;
        }
        if (n1 && n2) joint(k, l);
        else if (n1) k = given_second(l);
        else l = given_first(k);
        if (k != m1 || l != m2) {
          acc.round_errors[1]++;
          acc.counts[EV_SECOND_ERROR]++;
        }
      }

      const double d1 = u1 - reconstruct(q, k);
      const double d2 = u2 - reconstruct(q, l);
      const double s1 = d1 * d1, s2 = d2 * d2, sum = s1 + s2;
      acc.err += sum;
      acc.err_sq += sum * sum;
      acc.src_err[0] += s1;
      acc.src_err_sq[0] += s1 * s1;
      acc.src_err[1] += s2;
      acc.src_err_sq[1] += s2 * s2;
      acc.src_energy[0] += e1;
      acc.src_energy[1] += e2;
      const double energy = e1 + e2;
      acc.energy += energy;
      acc.energy_sq += energy * energy;
      if (energies) energies[t] = energy;
    }
  };
  return run_chunks(cfg, 2, 2, fn);
}

}  // namespace twoway
