#pragma once

#include <optional>
#include <vector>

namespace twoway {

enum class QuantizerKind { UNIFORM_TAILS, GAUSSIAN_GRID, SCALAR_UNIFORM };

/// Scalar quantizer with 2^B half-open bins [edges[n], edges[n+1]).
/// UNIFORM_TAILS and GAUSSIAN_GRID have 2^B - 2 equal interior bins plus one
/// bin per tail; SCALAR_UNIFORM splits (-sqrt(3), sqrt(3)) into 2^B equal
/// bins (outer edges at infinity) for the single-source protocol.
struct QuantizerSpec {
  QuantizerKind kind = QuantizerKind::UNIFORM_TAILS;
  int B = 0;
  double rho = 1.0;
  double delta = 0.0;  // GAUSSIAN_GRID: 2 sqrt(B ln 2)
  std::vector<double> edges;
  std::vector<double> levels;

  int bins() const { return static_cast<int>(levels.size()); }
  double interior_width() const { return edges[2] - edges[1]; }
};

/// Closed-form distortion bounds. d_ec1 and d_eic1 exist for the Gaussian
/// construction only; there d_e1 mirrors d_ec1.
struct DistortionTerms {
  double d_q = 0.0;
  double d_e1 = 0.0;
  double d_e2 = 0.0;
  std::optional<double> d_ec1;
  std::optional<double> d_eic1;
};

/// UNIFORM_TAILS: interior bins on (-sqrt(3)|rho|, sqrt(3)|rho|), tail levels
/// at +-sqrt(3)(|rho| + sqrt(1-rho^2)/2). GAUSSIAN_GRID: interior bins on
/// [-delta, delta], tail levels at +-delta. SCALAR_UNIFORM ignores rho.
/// Throws UnsupportedError for B < 2.
QuantizerSpec build_quantizer(QuantizerKind kind, int B, double rho = 1.0);

int quantize(const QuantizerSpec& q, double u);

double reconstruct(const QuantizerSpec& q, int bin);

/// Bins n such that some u1 in bin m and u2 in bin n satisfy |rho u1 - u2| < theta.
std::vector<int> compatible_set(const QuantizerSpec& q, int m, double theta, double rho);

DistortionTerms distortion_terms_uniform(int B, double rho);

DistortionTerms distortion_terms_gaussian(int B, double rho, double theta);

}  // namespace twoway
