#pragma once

#include <string>
#include <variant>

namespace dpk::kernels {

struct HermiteFinite {
  int n = 1;
};
struct Sine {};
struct Airy {};
struct Bessel {
  double nu = 0.0;
};

using KernelKind = std::variant<HermiteFinite, Sine, Airy, Bessel>;

/// Throws ArgumentError for N < 1 or nu <= -1.
void validate(const KernelKind& kind);
bool is_limit_kernel(const KernelKind& kind);
std::string kind_name(const KernelKind& kind);

struct SpaceTimePoint {
  double time = 0.0;
  double position = 0.0;
};

/// Extended matrix-kernel K(t_a, x_a; t_b, x_b) in the determinant-invariant gauge.
double kernel_eval(const KernelKind& kind, const SpaceTimePoint& a, const SpaceTimePoint& b);

/// Spectral-projection heat kernels of the limit families, for any real tau:
///   g_plus(tau, x, y) = <y| e^{tau H} P |x>, g_bar(tau, x, y) = -<y| e^{-tau H} (1 - P) |x>.
/// kernel_eval(t, x; s, y) is g_plus(s - t, x, y) for t <= s and g_bar(t - s, x, y) otherwise.
/// g_bar requires tau > 0.
double g_plus(const KernelKind& kind, double tau, double x, double y);
double g_bar(const KernelKind& kind, double tau, double x, double y);

/// Equal-time Hermite kernel via Christoffel-Darboux, diagonal branch at x == y.
double hermite_equal_time(int n, double t, double x, double y);
/// The same kernel as a direct sum over k < N.
double hermite_equal_time_sum(int n, double t, double x, double y);

/// One-point density rho_N(t, x); tiny negative rounding is clamped to 0 with a warning.
double density_rho_n(int n, double t, double x);

/// Semicircle asymptote of rho_N(t, x).
double semicircle(int n, double t, double x);

/// a_N(s) = 2 N^{2/3} + 2 N^{1/3} s - s^2.
double edge_shift(int n, double s);

/// Hermite kernel at times N + 2s and positions x (N even).
double bulk_scaled_kernel(int n, double sa, double xa, double sb, double xb);
/// Hermite kernel at times N^{1/3} + 2s and positions a_N(s) + x, with (t_b/t_a)^{(N-1)/2} removed.
double edge_scaled_kernel(int n, double sa, double xa, double sb, double xb);

/// Closed-form heat kernel delta_t(x, y) of the effective Hamiltonian of each family.
/// For HermiteFinite the N-independent Mehler form is returned.
double delta_t(const KernelKind& kind, double t, double x, double y);

/// Fourth moment int (x - y)^4 delta_t(x, y) dy over the state space, t in (0, 1].
double bound1_diagnostic(const KernelKind& kind, double t, double x);

/// Equal-time density K(x, x) of a limit kernel.
double spectral_rho(const KernelKind& kind, double x);

/// Palm kernel K^z(x, y) = [K(x, y) K(z, z) - K(x, z) K(z, y)] / K(z, z) at equal times
/// (time 1 for HermiteFinite).
double palm_kernel(const KernelKind& kind, double z, double x, double y);

}  // namespace dpk::kernels
