#pragma once

#include <Eigen/Dense>

namespace dpk::specfun {

/// Gaussian transition density of standard Brownian motion,
/// p(t, x | x') = (2 pi t)^{-1/2} exp(-(x - x')^2 / 2t).
double heat_kernel(double t, double x, double xprime);

/// Orthonormal Hermite function phi_n(zeta) = h_n^{-1/2} e^{-zeta^2/2} H_n(zeta).
///
/// Evaluated by the normalized three-term recurrence with the Gaussian weight carried
/// as a separate exponent, so results stay finite (and correctly tiny) for n up to 10^5.
double hermite_phi(int n, double zeta);

/// phi_0(zeta), ..., phi_{count-1}(zeta) in one recurrence pass.
Eigen::VectorXd hermite_phi_table(int count, double zeta);

/// Space-time dressed Hermite functions, invariant under the heat semigroup:
///   phi_tx(n, t, x)    = 2^{-1/2} t^{-(n+1)/2} e^{-x^2/4t} phi_n(x / sqrt(2t))
///   hatphi_tx(n, t, x) = t^{n/2} e^{x^2/4t} phi_n(x / sqrt(2t))
/// Both throw RangeError instead of returning inf when the result overflows.
double phi_tx(int n, double t, double x);
double hatphi_tx(int n, double t, double x);

/// Partial sum of the Hermite (Mehler) expansion of heat_kernel(t - tprime, x, xprime).
/// Requires 0 < tprime < t.
double mehler_sum(double t, double tprime, double x, double xprime, int terms);

struct AiryValue {
  double ai;
  double ai_prime;
};

/// Branch layout for the Airy evaluator. Maclaurin series (extended precision) on
/// [negative_switch, positive_switch], asymptotic expansions outside.
struct AiryConfig {
  double negative_switch = -8.0;
  double positive_switch = 8.0;
  int max_asymptotic_terms = 60;
};
inline constexpr AiryConfig kAiryConfig{};

AiryValue airy(double x);
double airy_ai(double x);
double airy_ai_prime(double x);

namespace detail {
AiryValue airy_maclaurin(double x);
AiryValue airy_asymptotic(double x);
}  // namespace detail

/// Bessel function of the first kind J_nu(x), nu > -1, x >= 0.
double bessel_j(double nu, double x);
/// dJ_nu/dx.
double bessel_j_prime(double nu, double x);
/// Modified Bessel function I_nu(x), nu > -1, x >= 0.
double bessel_i(double nu, double x);
/// e^{-x} I_nu(x); finite for arbitrarily large x.
double bessel_i_scaled(double nu, double x);

}  // namespace dpk::specfun
