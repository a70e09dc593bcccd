#include "twoway/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "twoway/errors.hpp"

namespace twoway {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_bits(int B) {
  if (B < 2) throw UnsupportedError("quantizer needs B >= 2 (at least two interior bins)");
  if (B > 16) throw UnsupportedError("quantizer supports B <= 16");
}

// Interior edges spanning [-half, half] in (2^B - 2) equal steps.
void fill_grid(QuantizerSpec& q, double half, double tail_level) {
  const int n = 1 << q.B;
  const int interior = n - 2;
  q.edges.assign(n + 1, 0.0);
  q.levels.assign(n, 0.0);
  q.edges[0] = -kInf;
  q.edges[n] = kInf;
  for (int k = 0; k <= interior; ++k)
    q.edges[k + 1] = half * static_cast<double>(2 * k - interior) / interior;
  for (int b = 1; b < n - 1; ++b) q.levels[b] = 0.5 * (q.edges[b] + q.edges[b + 1]);
  q.levels[0] = -tail_level;
  q.levels[n - 1] = tail_level;
}

}  // namespace

QuantizerSpec build_quantizer(QuantizerKind kind, int B, double rho) {
  check_bits(B);
  QuantizerSpec q;
  q.kind = kind;
  q.B = B;
  q.rho = rho;
  if (kind == QuantizerKind::SCALAR_UNIFORM) {
    const int n = 1 << B;
    q.edges.assign(n + 1, 0.0);
    q.levels.assign(n, 0.0);
    for (int k = 0; k <= n; ++k) q.edges[k] = std::numbers::sqrt3 * static_cast<double>(2 * k - n) / n;
    for (int b = 0; b < n; ++b) q.levels[b] = 0.5 * (q.edges[b] + q.edges[b + 1]);
    q.edges[0] = -kInf;
    q.edges[n] = kInf;
  } else if (kind == QuantizerKind::GAUSSIAN_GRID) {
    q.delta = 2.0 * std::sqrt(B * std::numbers::ln2);
    fill_grid(q, q.delta, q.delta);
  } else {
    const double r = std::abs(rho);
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("uniform-tails quantizer needs 0 < |rho| <= 1");
    const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    fill_grid(q, std::numbers::sqrt3 * r, std::numbers::sqrt3 * (r + 0.5 * c));
  }
  return q;
}

int quantize(const QuantizerSpec& q, double u) {
  const auto it = std::upper_bound(q.edges.begin(), q.edges.end(), u);
  const int n = static_cast<int>(it - q.edges.begin()) - 1;
  return std::clamp(n, 0, q.bins() - 1);
}

double reconstruct(const QuantizerSpec& q, int bin) { return q.levels.at(bin); }

std::vector<int> compatible_set(const QuantizerSpec& q, int m, double theta, double rho) {
  if (!(theta > 0.0)) throw DomainError("compatibility radius theta must be positive");
  if (m < 0 || m >= q.bins()) throw DomainError("bin index out of range");
  const double a = q.edges[m];
  const double b = q.edges[m + 1];
  double lo = 0.0;
  double hi = 0.0;
  if (rho != 0.0) {
    lo = std::min(rho * a, rho * b);
    hi = std::max(rho * a, rho * b);
  }
  std::vector<int> out;
  for (int n = 0; n < q.bins(); ++n) {
    const double c = q.edges[n];
    const double d = q.edges[n + 1];
    if (c < hi + theta && lo - theta < d) out.push_back(n);
  }
  return out;
}

DistortionTerms distortion_terms_uniform(int B, double rho) {
  check_bits(B);
  const double r = std::abs(rho);
  if (!(r <= 1.0)) throw DomainError("|rho| must be <= 1");
  if (r == 0.0) throw DomainError("uniform distortion terms are undefined at rho = 0");
  const double s = 1.0 - r * r;
  const double c = std::sqrt(s);
  const double m = std::ldexp(1.0, B) - 2.0;
  DistortionTerms t;
  t.d_q = (12.0 + s / (r * r) - 4.0 * std::sqrt(3.0 * s) / r) / (m * m) +
          std::pow(3.0 * s, 1.5) / (8.0 * r * r * r);
  t.d_e1 = 6.0 * (std::ldexp(1.0, -2 * B + 2) + 5.0 * s + std::ldexp(1.0, -B + 3) * c);
  t.d_e2 = 14.0 + 12.0 * r * r + 3.0 * s / 4.0 + 6.0 * r * c;
  return t;
}

DistortionTerms distortion_terms_gaussian(int B, double rho, double theta) {
  check_bits(B);
  if (!(std::abs(rho) <= 1.0)) throw DomainError("|rho| must be <= 1");
  if (!(theta > 0.0)) throw DomainError("compatibility radius theta must be positive");
  const double bl = B * std::numbers::ln2;
  const double delta = 2.0 * std::sqrt(bl);
  const double m = std::ldexp(1.0, B) - 2.0;
  const double tail = std::exp(-0.5 * delta * delta) *
                      (delta / std::sqrt(2.0 * std::numbers::pi) + 0.5 * (1.0 + delta * delta));
  const double grid = delta * delta / (m * m);
  const double s = 1.0 - rho * rho;
  const double root = std::sqrt(2.0 * bl / std::numbers::pi);
  DistortionTerms t;
  t.d_q = 4.0 * tail + 2.0 * grid;
  t.d_e2 = 32.0 * bl + 4.0 * root + 4.0 * std::exp(-2.0 * bl) * (1.0 - 4.0 * bl + 2.0 * root);
  t.d_ec1 = 2.0 * tail + grid + 4.0 * theta * theta * s;
  t.d_eic1 = 2.0 * tail + grid + 3.0 * theta * theta * s + s;
  t.d_e1 = *t.d_ec1;
  return t;
}

}  // namespace twoway
