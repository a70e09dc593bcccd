#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twoway/errors.hpp"
#include "twoway/rng.hpp"
#include "twoway/special_functions.hpp"

using namespace twoway;

namespace {

// Composite Simpson rule for the Rice density on [b, b + 40].
double marcum_simpson(double a, double b) {
  const int n = 200000;
  const double hi = b + 40.0;
  const double h = (hi - b) / n;
  auto f = [&](double x) { return x * std::exp(-(x * x + a * a) / 2.0) * std::cyl_bessel_i(0.0, a * x); };
  double s = f(b) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(b + i * h);
  return s * h / 3.0;
}

// Binary non-coherent error after L rounds from the textbook coefficients.
double p2_direct(int L, double g) {
  double sum = 0.0;
  for (int n = 0; n < L; ++n) {
    double c = 0.0;
    for (int k = 0; k <= L - 1 - n; ++k) c += std::tgamma(2.0 * L) / (std::tgamma(k + 1.0) * std::tgamma(2.0 * L - k));
    sum += c / std::tgamma(n + 1.0) * std::pow(g / 2.0, n);
  }
  return std::pow(2.0, -(2 * L - 1)) * std::exp(-g / 2.0) * sum;
}

// Alternating closed form for M-ary orthogonal non-coherent detection.
double pm_alternating(int M, double g) {
  double p = 0.0;
  for (int n = 1; n < M; ++n)
    p += (n % 2 ? 1.0 : -1.0) * static_cast<double>(binomial(M - 1, n)) / (n + 1.0) * std::exp(-n * g / (n + 1.0));
  return p;
}

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("bessel_i agrees with the standard library") {
    for (int n : {0, 1, 2, 5})
      for (double x : {0.0, 0.1, 1.0, 5.0, 20.0, 100.0, 500.0}) {
        const double ref = std::cyl_bessel_i(static_cast<double>(n), x);
        CHECK(bessel_i(n, x) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(bessel_i_scaled(n, x) == doctest::Approx(ref * std::exp(-x)).epsilon(1e-12));
      }
  }

  TEST_CASE("bessel_i matches the ascending series") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(3, 0.0) == 0.0);
    double series = 0.0, term = 1.0;  // (x/2)^(2k+1) / (k! (k+1)!) at x = 2
    for (int k = 0; k < 50; ++k) {
      if (k > 0) term /= static_cast<double>(k) * (k + 1);
      series += term;
    }
    CHECK(bessel_i(1, 2.0) == doctest::Approx(series).epsilon(1e-12));
  }

  TEST_CASE("scaled bessel_i at large argument follows the asymptotic series") {
    const double x = 2000.0;
    const double ref = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / std::sqrt(2.0 * std::numbers::pi * x);
    CHECK(bessel_i_scaled(0, x) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(std::isinf(bessel_i(0, 800.0)));
  }

  TEST_CASE("marcum_q1 identities") {
    for (double a : {0.0, 0.5, 3.0, 10.0}) CHECK(marcum_q1(a, 0.0) == 1.0);
    for (double b : {0.1, 1.0, 2.5, 6.0}) CHECK(marcum_q1(0.0, b) == doctest::Approx(std::exp(-b * b / 2)).epsilon(1e-12));
  }

  TEST_CASE("marcum_q1 matches Simpson integration of the Rice density") {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.5, 3.0}, {5.0, 4.0}, {3.0, 6.0}}) {
      const double ref = marcum_simpson(a, b);
      CHECK(marcum_q1(a, b) == doctest::Approx(ref).epsilon(1e-9));
      CHECK(marcum_q1(a, b) + marcum_q1_complement(a, b) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  TEST_CASE("marcum_q1 at a reference point") {
    CHECK(marcum_q1(1.5, 1.0) == doctest::Approx(marcum_simpson(1.5, 1.0)).epsilon(1e-8));
    CHECK(uncorrectable_bound(0.0, 0.0) == 0.5);
    CHECK(uncorrectable_bound(0.25, 4.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(uncorrectable_bound(0.25, 4.0) >= 1.0 - marcum_q1(std::sqrt(8.0), std::sqrt(2.0)));
  }

  TEST_CASE("marcum_q1 monotonicity") {
    double prev = 1.0;
    for (double b = 0.25; b < 8.0; b += 0.25) {
      const double q = marcum_q1(2.0, b);
      CHECK(q <= prev);
      prev = q;
    }
    prev = 0.0;
    for (double a = 0.0; a < 8.0; a += 0.25) {
      const double q = marcum_q1(a, 3.0);
      CHECK(q >= prev);
      prev = q;
    }
  }

  TEST_CASE("uncorrectable_bound dominates the exact probability") {
    for (double lam : {0.1, 0.5, 0.9})
      for (double ec : {1.0, 5.0, 20.0}) {
        const double exact = marcum_q1_complement(std::sqrt(2 * ec), std::sqrt(2 * lam * ec));
        CHECK(exact <= uncorrectable_bound(lam, ec));
      }
    CHECK(uncorrectable_bound(0.25, 0.0) == 0.5);
  }

  TEST_CASE("binomial is exact") {
    CHECK(binomial(5, 2) == 10u);
    CHECK(binomial(62, 31) == 465428353255261088ull);
    CHECK(binomial(10, 0) == 1u);
    CHECK(binomial(10, 11) == 0u);
  }

  TEST_CASE("p2_pairwise closed forms") {
    for (double g : {0.0, 1.0, 8.0, 30.0}) {
      CHECK(p2_pairwise(1, g) == doctest::Approx(0.5 * std::exp(-g / 2)).epsilon(1e-14));
      CHECK(p2_pairwise(2, g) == doctest::Approx(0.5 * std::exp(-g / 2) * (1 + g / 8)).epsilon(1e-14));
      for (int L : {3, 5, 9}) CHECK(p2_pairwise(L, g) == doctest::Approx(p2_direct(L, g)).epsilon(1e-12));
      CHECK(p2_gaussian_variant(1, g) == doctest::Approx(0.5 * std::exp(-g)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(p2_pairwise(0, 1.0), DomainError);
    CHECK_THROWS_AS(p2_pairwise(17, 1.0), OverflowError);
  }

  TEST_CASE("p2_pairwise matches a two-round binary simulation") {
    const double g = 2.0;
    const int n = 1000000;
    int errors = 0;
    CounterRng rng(11, 0);
    for (int t = 0; t < n; ++t) {
      double u0 = 0.0, u1 = 0.0;
      for (int r = 0; r < 2; ++r) {
        const std::complex<double> s = std::polar(std::sqrt(g / 2), rng.phase());
        u0 += std::norm(s + rng.complex_normal(1.0));
        u1 += std::norm(rng.complex_normal(1.0));
      }
      if (u1 > u0) ++errors;
    }
    const double p = p2_pairwise(2, g);
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(errors) / n - p) < 3 * sigma);
  }

  TEST_CASE("rician_pm reduces to known forms") {
    for (double g = 0.0; g <= 20.0; g += 2.0) CHECK(rician_pm(2, 1, g, 0.0) == doctest::Approx(0.5 * std::exp(-g / 2)).epsilon(1e-8));
    for (int M : {4, 8})
      for (double g : {1.0, 6.0, 12.0}) CHECK(rician_pm(M, 1, g, 0.0) == doctest::Approx(pm_alternating(M, g)).epsilon(1e-7));
    for (int L : {2, 3})
      for (double g : {2.0, 10.0}) CHECK(rician_pm(2, L, g, 0.0) == doctest::Approx(p2_pairwise(L, g)).epsilon(1e-7));
    for (double g : {0.0, 3.0, 50.0}) CHECK(rician_pm(2, 1, g, 1.0) == doctest::Approx(1.0 / (2.0 + g)).epsilon(1e-8));
  }

  TEST_CASE("rician_pm at zero SNR is uniform guessing") {
    for (std::uint64_t M : {2u, 4u, 16u})
      for (int L : {1, 2})
        for (double a : {0.0, 0.5}) CHECK(rician_pm(M, L, 0.0, a) == doctest::Approx(1.0 - 1.0 / M).epsilon(1e-8));
  }

  TEST_CASE("rician_pm matches a Rician decision-variable simulation") {
    const double g = 10.0, a = 0.5;
    const int n = 1000000;
    int errors = 0;
    CounterRng rng(12, 0);
    for (int t = 0; t < n; ++t) {
      const std::complex<double> gain = std::sqrt(1 - a) * std::polar(1.0, rng.phase()) + std::sqrt(a) * rng.complex_normal(1.0);
      const double u = std::norm(std::sqrt(g) * gain + rng.complex_normal(1.0));
      bool wrong = false;
      for (int k = 0; k < 3; ++k) wrong |= std::norm(rng.complex_normal(1.0)) > u;
      errors += wrong;
    }
    const double p = rician_pm(4, 1, g, a);
    CHECK(std::abs(static_cast<double>(errors) / n - p) < 3 * std::sqrt(p * (1 - p) / n));
  }

  TEST_CASE("exponent conventions of the two pairwise forms") {
    CHECK(p2_gaussian_variant(1, 0.0) == 0.5);
    CHECK(p2_gaussian_variant(1, 1.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(p2_gaussian_variant(2, 2.0) == doctest::Approx(p2_pairwise(2, 4.0)).epsilon(1e-14));
    CHECK(p2_pairwise(2, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("rician_pm is bounded by the union bound on AWGN") {
    for (int B : {2, 4, 6})
      for (double g : {4.0, 8.0, 16.0}) {
        const double pm = rician_pm(std::uint64_t{1} << B, 1, g, 0.0);
        CHECK(pm <= std::ldexp(p2_pairwise(1, g), B) * (1 + 1e-9));
        CHECK(pm >= p2_pairwise(1, g));
      }
  }

  TEST_CASE("rician_pm argument checks") {
    CHECK_THROWS_AS(rician_pm(3, 1, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rician_pm(4, 0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rician_pm(4, 1, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rician_pm(4, 1, 1.0, 1.5), DomainError);
  }

  TEST_CASE("gaussian_q") {
    CHECK(gaussian_q(0.0) == 0.5);
    CHECK(gaussian_q(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  }
}
