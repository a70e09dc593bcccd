#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twoway/errors.hpp"
#include "twoway/protocol_dual.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/quantization.hpp"

using namespace twoway;

namespace {

// Pairwise terms written out for L = 1, 2, 4.
double p2(int L, double g) {
  const double e = std::exp(-g / 2);
  const double h = g / 2;
  if (L == 1) return 0.5 * e;
  if (L == 2) return 0.5 * e * (1 + g / 8);
  return e / 128.0 * (64 + 29 * h + 4 * h * h + h * h * h / 6);
}

double p2v(int L, double g) {
  const double e = std::exp(-g);
  if (L == 1) return 0.5 * e;
  if (L == 2) return e / 8.0 * (4 + g);
  return e / 128.0 * (64 + 29 * g + 4 * g * g + g * g * g / 6);
}

}  // namespace

TEST_SUITE("protocol_dual") {
  TEST_CASE("symmetric schedule and allocation") {
    const auto s = DualSchedule::symmetric(10, 8, 6, 0.25, 1, 4, 0.99, 1);
    CHECK(s.ed11 == 5);
    CHECK(s.ec12 == 3);
    CHECK(s.ed1() == 10);
    const auto h = allocate_dual(10, 1.0, 0.25, CorrelationRegime::HIGH, 4, 0.99, 1);
    CHECK(h.ed2 == doctest::Approx(10));
    CHECK(h.ec1() == doctest::Approx(40));
    const auto l = allocate_dual(10, 0.5, 0.25, CorrelationRegime::LOW, 4, 0.99, 1);
    CHECK(l.ed2 == doctest::Approx(15));
    CHECK(l.ec1() == doctest::Approx(30));
    CHECK_THROWS_AS(allocate_dual(10, 2.0, 0.25, CorrelationRegime::LOW, 4, 0.99, 1), DomainError);
    CHECK_THROWS_AS(DualSchedule::symmetric(10, 8, 6, 0.25, 1, 1, 0.99, 1), DomainError);
    CHECK_THROWS_AS(DualSchedule::symmetric(10, 8, 6, 0.25, 1, 4, 0.99, 0.0), DomainError);
  }

  TEST_CASE("average energy") {
    const auto s = DualSchedule::symmetric(10, 8, 6, 0.25, 1, 4, 0.99, 1);
    const auto quiet = dual_avg_energy(s, {});
    const double fa = std::exp(-0.25 * 3);
    CHECK(quiet.exact == doctest::Approx(10 + 8 * 2 * fa).epsilon(1e-14));
    auto big = s;
    big.ec11 = big.ec12 = 1e4;
    CHECK(dual_avg_energy(big, {}).exact == doctest::Approx(10).epsilon(1e-12));
    const double p = 0.01, q = 0.002;
    const auto e = dual_avg_energy(s, {p, p, q});
    const double miss = pr_uncorrectable(3, 1, 0.25, true);
    const double p00 = 1 - 2 * p - q;
    CHECK(e.exact == doctest::Approx(10 + 3 * 2 * p + 6 * q + 8 * (2 * p * (1 - miss) + q * (1 - miss * miss) + p00 * 2 * fa)).epsilon(1e-14));
    CHECK(e.bound == doctest::Approx(10 + 6 * (p + q) + 8 * (2 * p + q + p00 * 2 * fa)).epsilon(1e-14));
    for (double x : {0.0, 0.05, 0.2}) {
      const auto v = dual_avg_energy(s, {x, x, x / 2});
      CHECK(v.bound >= v.exact);
    }
  }

  TEST_CASE("uniform error probabilities recomposed") {
    const auto s = DualSchedule::symmetric(10, 10, 20, 0.25, 1, 4, 0.99, 1);
    const double c = std::ceil(16 * std::sqrt(1 - 0.99 * 0.99));
    CHECK(c == 3);
    const double pec = 0.5 * std::exp(-0.25 * 10);
    const auto p = dual_pe_uniform(s);
    CHECK(p.p_e1 == doctest::Approx(c * pec * p2(1, 5) + c * p2(2, 10)).epsilon(1e-13));
    CHECK(p.p_e2 == doctest::Approx(c * 16 * pec * pec * p2(2, 10) + c * 16 * p2(4, 20)).epsilon(1e-13));
    const auto z = dual_pe_uniform(DualSchedule::symmetric(0, 0, 0, 0.25, 1, 4, 0.99, 1));
    CHECK(z.p_e1 == 1.0);
    CHECK(z.p_e2 == 1.0);
    const auto one = dual_pe_uniform_one_round(s);
    CHECK(one.p_e1 == doctest::Approx(c * p2(1, 5)).epsilon(1e-13));
    CHECK(one.p_e2 == doctest::Approx(c * 16 * p2(2, 10)).epsilon(1e-13));
  }

  TEST_CASE("full correlation zeroes the cardinality factors") {
    const auto s = DualSchedule::symmetric(5, 5, 5, 0.25, 1, 4, 1.0, 1);
    CHECK(dual_pe_uniform(s).p_e1 == 0.0);
    CHECK(dual_pe_uniform(s).p_e2 == 0.0);
    CHECK(dual_distortion_uniform(s) == doctest::Approx(distortion_terms_uniform(4, 1.0).d_q));
  }

  TEST_CASE("appendix composition") {
    CHECK(appendix_total_pe(0, 0, 0, 0) == 0.0);
    CHECK(appendix_total_pe(1, 0.1, 0.2, 0.3) == doctest::Approx(0.6));
    CHECK(appendix_total_pe(1, 0.5, 0.5, 0.5) == 1.0);
    const auto s = DualSchedule::symmetric(14, 14, 28, 0.25, 1, 4, 0.99, 1);
    const double c = 3, m = 16;
    const double pec = 0.5 * std::exp(-0.25 * 14);
    const double second = c * p2(2, 14) + c * m * p2(4, 28);
    const auto p = dual_pe_uniform(s);
    CHECK(appendix_total_pe(pec, c * p2(1, 7), c * m * p2(2, 14), second) ==
          doctest::Approx(p.p_e1 + p.p_e2).epsilon(1e-13));
  }

  TEST_CASE("gaussian error probabilities recomposed") {
    const auto s = DualSchedule::symmetric(10, 10, 20, 0.25, 1, 3, 0.0, 2.0);
    const double ct = 16;
    const double pec = 0.5 * std::exp(-0.25 * 10);
    const auto p = dual_pe_gaussian(s);
    CHECK(p.p_e1 == doctest::Approx(std::min(1.0, ct * pec * p2v(1, 5) + ct * p2v(2, 10))).epsilon(1e-13));
    CHECK(p.p_e2 == doctest::Approx(std::min(1.0, ct * 8 * pec * pec * p2v(2, 10) + ct * 8 * p2v(4, 20))).epsilon(1e-13));
    const auto tiny = DualSchedule::symmetric(30, 30, 60, 0.25, 1, 3, 0.5, 1e-9);
    CHECK(dual_pe_gaussian(tiny).p_e1 == doctest::Approx(0.5 * std::exp(-7.5) * p2v(1, 15) + p2v(2, 30)).epsilon(1e-12));
    double prev = 2.0;
    for (double e = 2; e <= 40; e += 2) {
      const auto g = dual_pe_gaussian(allocate_dual(e, 1.0, 0.25, CorrelationRegime::HIGH, 4, 0.9, 1.0));
      CHECK(g.p_e1 + g.p_e2 <= prev);
      prev = g.p_e1 + g.p_e2;
    }
  }

  TEST_CASE("first-round outcome bound") {
    for (double e : {0.0, 4.0, 12.0, 30.0}) {
      const auto s = DualSchedule::symmetric(e, e, 2 * e, 0.25, 1, 4, 0.99, 1);
      for (auto d : {Distribution::UNIFORM, Distribution::GAUSSIAN}) {
        const auto f = dual_first_round_bound(s, d);
        CHECK(f.p10 == f.p01);
        CHECK(f.p10 + f.p01 + f.p11 <= 1.0 + 1e-15);
        CHECK(f.p11 >= 0.0);
      }
    }
    const auto s = DualSchedule::symmetric(20, 20, 40, 0.25, 1, 4, 0.99, 1);
    const auto f = dual_first_round_bound(s, Distribution::UNIFORM);
    CHECK(f.p10 == doctest::Approx(0.5 * 3 * p2(1, 10)).epsilon(1e-13));
    CHECK(f.p11 == doctest::Approx(3 * 16 * p2(2, 20)).epsilon(1e-13));
  }

  TEST_CASE("regime predicates") {
    CHECK(dual_high_correlation(DualSchedule::symmetric(1, 1, 1, 0.25, 1, 4, 0.9999, 1)));
    CHECK_FALSE(dual_high_correlation(DualSchedule::symmetric(1, 1, 1, 0.25, 1, 4, 0.99, 1)));
    const double r = 0.9;
    const double edge = 2 * std::sqrt(4 * std::numbers::ln2 / (1 - r * r));
    CHECK(gaussian_regime(DualSchedule::symmetric(1, 1, 1, 0.25, 1, 4, r, edge * 1.01)) == CorrelationRegime::LOW);
    CHECK(gaussian_regime(DualSchedule::symmetric(1, 1, 1, 0.25, 1, 4, r, edge * 0.99)) == CorrelationRegime::HIGH);
    CHECK(default_theta_gaussian(4, r) == doctest::Approx(edge).epsilon(1e-14));
    CHECK(default_theta_gaussian(4, 0.0) == doctest::Approx(2 * std::sqrt(4 * std::numbers::ln2)).epsilon(1e-14));
    CHECK(default_theta_gaussian(4, 1.0) == doctest::Approx(8 * std::sqrt(4 * std::numbers::ln2)).epsilon(1e-14));
  }

  TEST_CASE("incompatibility probability") {
    for (double th : {0.0, 0.5, 1.0, 3.0})
      for (double r : {0.0, 0.5, 0.9}) {
        const double x = th * std::sqrt(1 - r * r);
        CHECK(gaussian_incompatibility(th, r, true) == doctest::Approx(std::erfc(x / std::numbers::sqrt2)).epsilon(1e-12));
        CHECK(gaussian_incompatibility(th, r, true) <= gaussian_incompatibility(th, r, false) + 1e-15);
      }
  }

  TEST_CASE("printed factors") {
    CHECK(beta_factor(200.0, 1.0) == doctest::Approx(std::pow(96.0 / 18.0, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(beta_factor(200.0, 1.0) == doctest::Approx(3.054).epsilon(1e-3));
    CHECK(alpha_factor(1.0) == doctest::Approx(std::pow(4 / std::sqrt(std::numbers::pi) + 16, -2.0 / 3.0)).epsilon(1e-14));
    CHECK(alpha_factor(1.0) == doctest::Approx(0.14424).epsilon(1e-4));
    CHECK_THROWS_AS(beta_factor(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(alpha_factor(0.0), DomainError);
  }

  TEST_CASE("distortion bounds stay above the quantization term") {
    for (int B : {2, 4, 6})
      for (double r : {0.9, 0.99, 0.999})
        for (double e : {0.0, 5.0, 20.0, 60.0}) {
          const auto s = allocate_dual(std::max(e, 1e-6), 1.0, 0.25, CorrelationRegime::HIGH, B, r, 1.0);
          CHECK(dual_distortion_uniform(s) >= distortion_terms_uniform(B, r).d_q);
          CHECK(dual_distortion_uniform_one_round(s) >= distortion_terms_uniform(B, r).d_q);
          auto g = s;
          g.theta = default_theta_gaussian(B, r);
          CHECK(dual_distortion_gaussian(g, gaussian_regime(g)) >= distortion_terms_gaussian(B, r, g.theta).d_q);
        }
    const auto clean = allocate_dual(400, 1.0, 0.25, CorrelationRegime::HIGH, 4, 0.99, 1.0);
    CHECK(dual_distortion_uniform(clean) == doctest::Approx(distortion_terms_uniform(4, 0.99).d_q).epsilon(1e-12));
  }

  TEST_CASE("asymptotic slopes") {
    for (double mu : {0.5, 1.0}) {
      std::vector<double> x, yu, yg;
      for (double e = 30; e <= 60; e += 2) {
        const auto s = allocate_dual(e, mu, 0.25, CorrelationRegime::HIGH, 6, 0.999, 1.0);
        x.push_back(e);
        yu.push_back(std::log(dual_distortion_uniform(s, true)));
        yg.push_back(std::log(dual_distortion_gaussian(s, CorrelationRegime::HIGH, true)));
      }
      CHECK(-fitted_slope(x, yu) == doctest::Approx(1 - mu / 3).epsilon(0.05));
      CHECK(-fitted_slope(x, yg) == doctest::Approx(1 - mu / 3).epsilon(0.05));
      CHECK(-fitted_slope(x, yu) == doctest::Approx(asymptotic_exponent(allocate_energies(2, 30, mu, 0.25))).epsilon(0.05));
    }
    const auto l = allocate_dual(40, 1.0, 0.25, CorrelationRegime::LOW, 4, 0.5, 1.0);
    CHECK(dual_distortion_gaussian(l, CorrelationRegime::LOW, true) ==
          doctest::Approx(std::exp(-40 * 0.75 / 2) + std::exp(-40 * (2.0 / 3) / 2) + std::exp(-40 * 0.5)).epsilon(1e-13));
  }
}
