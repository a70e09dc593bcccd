#pragma once

#include <complex>
#include <cstdint>

namespace twoway {

/// Counter-based generator keyed by (seed, stream id); the k-th draw of a
/// stream depends only on k.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0();
  double normal();
  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance);
  /// Uniform phase on [0, 2pi).
  double phase();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace twoway
