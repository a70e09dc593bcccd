#pragma once

#include <cstdint>

#include "twoway/quadrature.hpp"

namespace twoway {

/// Modified Bessel function of the first kind, I_n(x). Overflows to +inf
/// for x above ~713; use bessel_i_scaled there.
double bessel_i(int n, double x);

/// Exponentially scaled form I_n(x) * exp(-x).
double bessel_i_scaled(int n, double x);

/// First-order Marcum Q function Q_1(a, b).
double marcum_q1(double a, double b);

/// 1 - Q_1(a, b), evaluated directly so small values keep relative accuracy.
double marcum_q1_complement(double a, double b);

/// Closed-form upper bound on the uncorrectable-error probability,
/// 0.5 * exp(-(sqrt(lambda) - 1)^2 * ec_over_n0).
double uncorrectable_bound(double lambda, double ec_over_n0);

/// Binomial coefficient C(n, k) in exact integer arithmetic (n <= 62).
std::uint64_t binomial(int n, int k);

/// Pairwise error probability of two L-round non-coherent decision variables,
/// 2^-(2L-1) e^(-gamma/2) sum_n c_n (gamma/2)^n. Throws OverflowError for L > 16.
double p2_pairwise(int L, double gamma);

/// Same sum with the e^-gamma, gamma^n exponent convention.
double p2_gaussian_variant(int L, double gamma);

/// Symbol error probability of M-ary orthogonal non-coherent detection with
/// square-law combining over L rounds on a Rician channel with NLOS fraction
/// alpha, at SNR gamma. Exact numerical integral; alpha = 0 is AWGN.
double rician_pm(std::uint64_t M, int L, double gamma, double alpha, const Quadrature& quad = {});

/// The same integral parameterized directly: the correct statistic is
/// noncentral chi-square with 2L degrees of freedom and noncentrality `lam`,
/// each wrong statistic is Gamma(L) shrunk by `scale`.
double noncoherent_pm(std::uint64_t M, int L, double lam, double scale, const Quadrature& quad = {});

/// Gaussian tail probability Q(x).
double gaussian_q(double x);

}  // namespace twoway
