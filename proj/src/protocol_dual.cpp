#include "twoway/protocol_dual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twoway/errors.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/quantization.hpp"
#include "twoway/special_functions.hpp"

namespace twoway {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double ceil_card(int B, double scale, double rho) {
  const double s = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  return std::ceil(std::ldexp(scale * s, B));
}

double uncorrectable_first(const DualSchedule& s) {
  const double worst = std::min(s.ec11, s.ec12);
  return uncorrectable_bound(s.lambda, worst / s.n0);
}

double mu_of(const DualSchedule& s) {
  if (!(s.ed1() > 0.0)) throw DomainError("asymptotic form needs a positive first-round energy");
  return 2.0 - s.ed2 / s.ed1();
}

}  // namespace

void DualSchedule::validate() const {
  for (double e : {ed11, ed12, ed2, ec11, ec12})
    if (!(e >= 0.0) || !std::isfinite(e)) throw DomainError("dual energies must be finite and non-negative");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  if (!(n0 > 0.0)) throw DomainError("noise level N0 must be positive");
  if (B < 2 || B > 16) throw DomainError("dual protocol needs 2 <= B <= 16");
  if (!(std::abs(rho) <= 1.0)) throw DomainError("|rho| must be <= 1");
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
}

DualSchedule DualSchedule::symmetric(double ed1, double ed2, double ec1, double lambda, double n0, int B,
                                     double rho, double theta) {
  DualSchedule s;
  s.ed11 = s.ed12 = 0.5 * ed1;
  s.ed2 = ed2;
  s.ec11 = s.ec12 = 0.5 * ec1;
  s.lambda = lambda;
  s.n0 = n0;
  s.B = B;
  s.rho = rho;
  s.theta = theta;
  s.validate();
  return s;
}

DualSchedule allocate_dual(double ed1, double mu, double lambda, CorrelationRegime regime, int B,
                           double rho, double theta, double n0) {
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("slack mu must lie in (0, 2)");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in [0, 1)");
  const double gap = (1.0 - std::sqrt(lambda)) * (1.0 - std::sqrt(lambda));
  const double ed2 = (2.0 - mu) * ed1;
  const double ec1 = regime == CorrelationRegime::HIGH ? ed2 / gap : ed2 / (2.0 * gap);
  return DualSchedule::symmetric(ed1, ed2, ec1, lambda, n0, B, rho, theta);
}

double default_theta_gaussian(int B, double rho) {
  const double delta = 2.0 * std::sqrt(B * std::numbers::ln2);
  const double cap = 4.0 * delta;
  const double s = 1.0 - rho * rho;
  if (!(s > 0.0)) return cap;
  return std::min(cap, 2.0 * std::sqrt(B * std::numbers::ln2 / s));
}

DualEnergy dual_avg_energy(const DualSchedule& s, const DualFirstRound& probs) {
  s.validate();
  const double p00 = std::max(0.0, 1.0 - probs.p10 - probs.p01 - probs.p11);
  const double miss1 = pr_uncorrectable(s.ec11, s.n0, s.lambda, true);
  const double miss2 = pr_uncorrectable(s.ec12, s.n0, s.lambda, true);
  const double fa1 = pr_misdetect(s.ec11, s.n0, s.lambda);
  const double fa2 = pr_misdetect(s.ec12, s.n0, s.lambda);
  DualEnergy out;
  out.exact = s.ed11 + s.ed12 + s.ec11 * probs.p10 + s.ec12 * probs.p01 + s.ec1() * probs.p11 +
              s.ed2 * (probs.p10 * (1.0 - miss1) + probs.p01 * (1.0 - miss2) +
                       probs.p11 * (1.0 - miss1 * miss2) + p00 * (fa1 + fa2));
  out.bound = s.ed1() + 0.5 * s.ec1() * (probs.p10 + probs.p01) + s.ec1() * probs.p11 +
              s.ed2 * (probs.p10 + probs.p01 + probs.p11 + p00 * (fa1 + fa2));
  return out;
}

DualErrorProbs dual_pe_uniform(const DualSchedule& s) {
  s.validate();
  const double c1 = ceil_card(s.B, 1.0, s.rho);
  const double ct = ceil_card(s.B, s.theta, s.rho);
  const double m = std::ldexp(1.0, s.B);
  const double pec = uncorrectable_first(s);
  const double half2 = 0.5 * s.ed2;
  const double g_one = std::min(s.ed11, s.ed12) / s.n0;
  const double g_one_two = std::min(s.ed11, s.ed12) / s.n0 + half2 / s.n0;
  const double g_both = s.ed1() / s.n0;
  const double g_both_two = (s.ed1() + s.ed2) / s.n0;
  DualErrorProbs out;
  out.p_e1 = clamp01(c1 * pec * p2_pairwise(1, g_one) + ct * p2_pairwise(2, g_one_two));
  out.p_e2 = clamp01(c1 * m * pec * pec * p2_pairwise(2, g_both) + ct * m * p2_pairwise(4, g_both_two));
  return out;
}

DualErrorProbs dual_pe_uniform_one_round(const DualSchedule& s) {
  s.validate();
  const double c1 = ceil_card(s.B, 1.0, s.rho);
  const double m = std::ldexp(1.0, s.B);
  DualErrorProbs out;
  out.p_e1 = clamp01(c1 * p2_pairwise(1, std::min(s.ed11, s.ed12) / s.n0));
  out.p_e2 = clamp01(c1 * m * p2_pairwise(2, s.ed1() / s.n0));
  return out;
}

DualErrorProbs dual_pe_gaussian(const DualSchedule& s) {
  s.validate();
  const double ct = ceil_card(s.B, s.theta, s.rho);
  const double m = std::ldexp(1.0, s.B);
  const double pec = uncorrectable_first(s);
  const double e1 = s.ed1() / s.n0;
  const double e12 = (s.ed1() + s.ed2) / s.n0;
  DualErrorProbs out;
  out.p_e1 = clamp01(ct * pec * p2_gaussian_variant(1, 0.5 * e1) + ct * p2_gaussian_variant(2, 0.5 * e12));
  out.p_e2 = clamp01(ct * m * pec * pec * p2_gaussian_variant(2, e1) + ct * m * p2_gaussian_variant(4, e12));
  return out;
}

DualFirstRound dual_first_round_bound(const DualSchedule& s, Distribution d) {
  s.validate();
  const double m = std::ldexp(1.0, s.B);
  double one = 0.0;
  double both = 0.0;
  if (d == Distribution::UNIFORM) {
    const double c1 = ceil_card(s.B, 1.0, s.rho);
    one = c1 * p2_pairwise(1, std::min(s.ed11, s.ed12) / s.n0);
    both = c1 * m * p2_pairwise(2, s.ed1() / s.n0);
  } else {
    const double ct = ceil_card(s.B, s.theta, s.rho);
    one = ct * p2_gaussian_variant(1, 0.5 * s.ed1() / s.n0);
    both = ct * m * p2_gaussian_variant(2, s.ed1() / s.n0);
  }
  one = clamp01(one);
  both = clamp01(both);
  const double total = one + both;
  if (total > 1.0) {
    one /= total;
    both /= total;
  }
  return {0.5 * one, 0.5 * one, both};
}

double appendix_total_pe(double p_uncorrectable, double p_one_first, double p_both_first, double p_second) {
  return clamp01(p_uncorrectable * p_one_first + p_uncorrectable * p_uncorrectable * p_both_first + p_second);
}

bool dual_high_correlation(const DualSchedule& s) {
  return std::sqrt(std::max(0.0, 1.0 - s.rho * s.rho)) < s.theta * std::ldexp(1.0, -s.B);
}

CorrelationRegime gaussian_regime(const DualSchedule& s) {
  const double sr = 1.0 - s.rho * s.rho;
  if (!(sr > 0.0)) return CorrelationRegime::HIGH;
  return s.theta > 2.0 * std::sqrt(s.B * std::numbers::ln2 / sr) ? CorrelationRegime::LOW
                                                                 : CorrelationRegime::HIGH;
}

double beta_factor(double ed1_over_n0, double rho) {
  if (rho == 0.0) throw DomainError("beta factor is undefined at rho = 0");
  const double e = std::exp(-0.5 * ed1_over_n0);
  const double den = 0.5 * e + 2.0 * rho * rho;
  return std::pow((96.0 + 3.0 / (rho * rho) * e) / (14.0 + den * den), 2.0 / 3.0);
}

double alpha_factor(double ed1_over_n0) {
  if (!(ed1_over_n0 > 0.0)) throw DomainError("alpha factor needs a positive energy");
  return std::pow(4.0 * std::sqrt(ed1_over_n0 / std::numbers::pi) + 16.0 * ed1_over_n0, -2.0 / 3.0);
}

double gaussian_incompatibility(double theta, double rho, bool exact) {
  const double x = theta * std::sqrt(std::max(0.0, 1.0 - rho * rho));
  return exact ? 2.0 * gaussian_q(x) : std::exp(-0.5 * x * x);
}

double dual_distortion_uniform(const DualSchedule& s, bool asymptotic) {
  s.validate();
  if (asymptotic) {
    const double mu = mu_of(s);
    const double x = s.ed1() / s.n0;
    return std::exp(-x * (1.0 - mu / 3.0)) * beta_factor(x, s.rho);
  }
  const DistortionTerms t = distortion_terms_uniform(s.B, s.rho);
  const DualErrorProbs p = dual_pe_uniform(s);
  return t.d_q + t.d_e1 * p.p_e1 + t.d_e2 * p.p_e2;
}

double dual_distortion_uniform_one_round(const DualSchedule& s) {
  const DistortionTerms t = distortion_terms_uniform(s.B, s.rho);
  const DualErrorProbs p = dual_pe_uniform_one_round(s);
  return t.d_q + t.d_e1 * p.p_e1 + t.d_e2 * p.p_e2;
}

double dual_distortion_gaussian(const DualSchedule& s, CorrelationRegime regime, bool asymptotic) {
  s.validate();
  if (asymptotic) {
    const double mu = mu_of(s);
    const double x = s.ed1() / s.n0;
    if (regime == CorrelationRegime::HIGH) return std::exp(-x * (1.0 - mu / 3.0)) * alpha_factor(x);
    return std::exp(-x * (1.0 - mu / 4.0) / 2.0) + std::exp(-x * (1.0 - mu / 3.0) / 2.0) +
           std::exp(-x * (3.0 - mu) / 4.0);
  }
  const DistortionTerms t = distortion_terms_gaussian(s.B, s.rho, s.theta);
  const DualErrorProbs p = dual_pe_gaussian(s);
  const double inc = gaussian_incompatibility(s.theta, s.rho, false);
  return t.d_q + *t.d_ec1 * p.p_e1 + t.d_e2 * p.p_e2 + inc * (*t.d_eic1 + t.d_e2 * p.p_e2);
}

}  // namespace twoway
