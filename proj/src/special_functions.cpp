#include "twoway/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "twoway/errors.hpp"

namespace twoway {

namespace {

constexpr int kMaxRounds = 16;

void require_finite_nonneg(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
  if (v < 0.0) throw DomainError(std::string(what) + " must be non-negative");
}

double bessel_scaled_asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double bessel_scaled_series(int n, double x) {
  const double half = 0.5 * x;
  const double q = half * half;
  const double kpeak_real = 0.5 * (-n + std::sqrt(static_cast<double>(n) * n + x * x));
  const long kpeak = static_cast<long>(std::floor(kpeak_real));
  const double log_peak = (2.0 * kpeak + n) * std::log(half) - std::lgamma(kpeak + 1.0) -
                          std::lgamma(kpeak + n + 1.0) - x;
  double sum = 1.0;
  double term = 1.0;
  for (long k = kpeak; k > 0; --k) {
    term *= static_cast<double>(k) * static_cast<double>(k + n) / q;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  term = 1.0;
  for (long k = kpeak;; ++k) {
    term *= q / (static_cast<double>(k + 1) * static_cast<double>(k + n + 1));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return std::exp(log_peak) * sum;
}

// e^-w sum_{k<L} w^k / k!
double poisson_upper_tail(int L, double w) {
  if (w == 0.0) return 1.0;
  const double lw = std::log(w);
  double sum = 0.0;
  for (int k = 0; k < L; ++k) sum += std::exp(k * lw - w - std::lgamma(k + 1.0));
  return std::min(1.0, sum);
}

double marcum_density(double a, double x) {
  if (x <= 0.0) return 0.0;
  const double d = x - a;
  return x * std::exp(-0.5 * d * d) * bessel_i_scaled(0, a * x);
}

Quadrature marcum_quad() {
  Quadrature q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-15;
  return q;
}

// Integral of the Rice density over [lo, hi], split at the mode.
double marcum_integral(double a, double lo, double hi) {
  auto f = [a](double x) { return marcum_density(a, x); };
  const Quadrature q = marcum_quad();
  if (a > lo && a < hi) return integrate(f, lo, a, q) + integrate(f, a, hi, q);
  return integrate(f, lo, hi, q);
}

void check_rounds(int L) {
  if (L < 1) throw DomainError("number of rounds L must be at least 1");
  if (L > kMaxRounds) throw OverflowError("binomial coefficients for L > 16 are out of range");
}

double p2_sum(int L, double x) {
  double sum = 0.0;
  double xn = 1.0;
  double nfact = 1.0;
  for (int n = 0; n < L; ++n) {
    std::uint64_t c = 0;
    for (int k = 0; k <= L - 1 - n; ++k) c += binomial(2 * L - 1, k);
    sum += static_cast<double>(c) / nfact * xn;
    xn *= x;
    nfact *= n + 1;
  }
  return sum;
}

}  // namespace

double bessel_i_scaled(int n, double x) {
  if (n < 0) throw DomainError("Bessel order must be non-negative");
  require_finite_nonneg(x, "Bessel argument");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x > 700.0 && x > static_cast<double>(n) * n) return bessel_scaled_asymptotic(n, x);
  return bessel_scaled_series(n, x);
}

double bessel_i(int n, double x) {
  const double s = bessel_i_scaled(n, x);
  return s == 0.0 ? 0.0 : s * std::exp(x);
}

double marcum_q1(double a, double b) {
  require_finite_nonneg(a, "Marcum Q argument a");
  require_finite_nonneg(b, "Marcum Q argument b");
  if (b == 0.0) return 1.0;
  if (a == 0.0) return std::exp(-0.5 * b * b);
  double q;
  if (b < a)
    q = 1.0 - marcum_integral(a, 0.0, b);
  else
    q = marcum_integral(a, b, b + 40.0);
  return std::clamp(q, 0.0, 1.0);
}

double marcum_q1_complement(double a, double b) {
  require_finite_nonneg(a, "Marcum Q argument a");
  require_finite_nonneg(b, "Marcum Q argument b");
  if (b == 0.0) return 0.0;
  if (a == 0.0) return -std::expm1(-0.5 * b * b);
  double c;
  if (b < a)
    c = marcum_integral(a, 0.0, b);
  else
    c = 1.0 - marcum_integral(a, b, b + 40.0);
  return std::clamp(c, 0.0, 1.0);
}

double uncorrectable_bound(double lambda, double ec_over_n0) {
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  require_finite_nonneg(ec_over_n0, "control SNR");
  const double d = std::sqrt(lambda) - 1.0;
  return 0.5 * std::exp(-d * d * ec_over_n0);
}

std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n > 62) throw OverflowError("binomial supports n <= 62");
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(r) * static_cast<unsigned>(n - k + i);
    r = static_cast<std::uint64_t>(wide / static_cast<unsigned>(i));
  }
  return r;
}

double p2_pairwise(int L, double gamma) {
  check_rounds(L);
  require_finite_nonneg(gamma, "SNR");
  const double x = 0.5 * gamma;
  return std::ldexp(std::exp(-x) * p2_sum(L, x), -(2 * L - 1));
}

double p2_gaussian_variant(int L, double gamma) {
  check_rounds(L);
  require_finite_nonneg(gamma, "SNR");
  return std::ldexp(std::exp(-gamma) * p2_sum(L, gamma), -(2 * L - 1));
}

double noncoherent_pm(std::uint64_t M, int L, double lam, double scale, const Quadrature& quad) {
  if (M < 2 || (M & (M - 1)) != 0) throw DomainError("alphabet size M must be a power of two >= 2");
  if (L < 1) throw DomainError("number of rounds L must be at least 1");
  require_finite_nonneg(lam, "noncentrality");
  if (!(scale >= 1.0) || !std::isfinite(scale)) throw DomainError("scale must be finite and >= 1");
  quad.validate();

  const double others = static_cast<double>(M - 1);
  const int order = L - 1;
  const double log_lam = lam > 0.0 ? std::log(lam) : 0.0;
  const double log_fact = std::lgamma(static_cast<double>(L));
  const double sqrt_lam = std::sqrt(lam);

  auto integrand = [&](double v) {
    double g;
    if (v <= 0.0) {
      g = order == 0 ? std::exp(-lam) : 0.0;
    } else if (lam == 0.0) {
      g = std::exp(order * std::log(v) - v - log_fact);
    } else {
      const double d = std::sqrt(v) - sqrt_lam;
      const double x = 2.0 * std::sqrt(v * lam);
      const double i_scaled = bessel_i_scaled(order, x);
      if (i_scaled == 0.0) return 0.0;
      g = std::exp(0.5 * order * (std::log(v) - log_lam) - d * d) * i_scaled;
    }
    if (g == 0.0) return 0.0;
    const double t = poisson_upper_tail(L, v * scale);
    const double miss = t >= 1.0 ? 1.0 : -std::expm1(others * std::log1p(-t));
    return miss * g;
  };

  double vmax = 50.0 + 10.0 * scale;
  vmax = std::max(vmax, (sqrt_lam + 12.0) * (sqrt_lam + 12.0) + 20.0 * L);
  if (quad.truncation) vmax = *quad.truncation;

  // The miss term decays like exp(-v scale); split there and at the
  // noncentrality so narrow peaks are not stepped over.
  std::vector<double> cuts{0.0, vmax};
  for (double c : {lam, 1.0 / scale, 8.0 / scale, 64.0 / scale})
    if (c > 0.0 && c < vmax) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double p = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] > cuts[i - 1]) p += integrate(integrand, cuts[i - 1], cuts[i], quad);
  return std::clamp(p, 0.0, 1.0);
}

double rician_pm(std::uint64_t M, int L, double gamma, double alpha, const Quadrature& quad) {
  require_finite_nonneg(gamma, "SNR");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  const double scale = 1.0 + alpha * gamma;
  return noncoherent_pm(M, L, gamma * (1.0 - alpha) / scale, scale, quad);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace twoway
