#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "rmtlab/types.hpp"

namespace rmtlab {

/// Solution of -1/m = w + m - |z|^2 / (w + m) with Im w Im m > 0, plus derived quantities.
struct DysonPoint {
    Complex z{};
    Complex w{};
    Complex m{};
    Complex u{};          // m / (w + m)
    Complex beta{};       // 1 - m^2 - u^2 |z|^2
    Complex beta_star{};  // 1 - |m|^2 - |u|^2 |z|^2
    Complex m_prime{};    // dm/dw = (1 - beta) / beta
    /// |1/m + w + m - |z|^2/(w+m)| evaluated in extended precision at the solver's root.
    double residual = 0.0;
    /// |1 + m (w + m) - |z|^2 u|, i.e. the residual multiplied by |m|, in double precision
    /// on the stored fields.
    double scaled_residual = 0.0;

    /// d m / d eta along w = E + i eta.
    Complex dm_deta() const { return kI * m_prime; }
    /// M^z(w) = [[m, -z u], [-conj(z) u, m]].
    BlockScalar M() const { return {m, -z * u, -std::conj(z) * u, m}; }
};

/// All three roots of the cubic m^3 + 2w m^2 + (w^2 + 1 - |z|^2) m + w = 0,
/// polished in extended precision.
std::array<Complex, 3> dyson_cubic_roots(Complex z, Complex w);

/// Root selection by exact cubic enumeration; damped fixed-point fallback.
/// Throws InvalidParameter for Im w == 0, ConvergenceError when no admissible root exists.
DysonPoint solve_m(Complex z, Complex w);

/// Limit w -> E + i0+ on the real axis, from exact cubic roots at real w.
/// Inside the support the root with Im m > 0 is taken; outside it the real root
/// continuing the upper half-plane branch.
DysonPoint solve_m_real(Complex z, double E);

/// Independent solver: damped iteration m <- -1 / (w + m - |z|^2/(w + m)).
/// Returns the iterate after convergence; throws ConvergenceError otherwise.
Complex solve_m_fixed_point(Complex z, Complex w, double damping = 0.5, int max_iter = 200000,
                            double tol = 1e-14);

/// Discriminant of the cubic at real w = E; negative exactly inside the support.
double dyson_discriminant(Complex z, double E);

/// rho^z(E) = Im m^z(E + i0) / pi; zero outside the support.
double density_at(Complex z, double E);

/// Self-consistent density at fixed z with cached support and quantiles.
class DensityProfile {
public:
    explicit DensityProfile(Complex z);

    Complex z() const { return z_; }
    double operator()(double E) const { return density_at(z_, E); }

    /// Support intersected with [0, inf), as disjoint closed intervals.
    const std::vector<std::pair<double, double>>& positive_support() const { return support_; }

    /// int_0^x rho (x >= 0); absolute tolerance 1e-10.
    double cumulative(double x) const;
    /// int_0^inf rho, equal to 1/2 up to quadrature error.
    double positive_mass() const { return positive_mass_; }

    /// gamma_i solving int_0^{gamma_i} rho = i/n, gamma_{-i} = -gamma_i.
    /// Throws InvalidParameter for i == 0 and OutOfMassError when |i|/n exceeds the positive mass.
    double quantile(std::size_t n, long i) const;

private:
    Complex z_;
    std::vector<std::pair<double, double>> support_;
    double positive_mass_ = 0.0;
    mutable std::map<std::pair<std::size_t, long>, double> cache_;
};

double quantile(Complex z, std::size_t n, long i);

/// The two non-trivial eigenvalues of the two-body stability operator 1 - M1 S[.] M2
/// and the inverse norm of its 4 x 4 block-scalar reduction.
struct TwoBodyStability {
    Complex z1{}, z2{};
    Complex w1{}, w2{};
    Complex beta_hat{};
    Complex beta_hat_star{};
    double inv_norm_bound = 0.0;
    /// Reduction in the basis (x11, x22, x12, x21) of block scalars.
    Eigen::Matrix4cd reduction;
};

/// The action X -> M1 S[X] M2 on block scalars, with S[[A, B], [C, D]] = diag(<D>, <A>).
BlockScalar stability_map(const BlockScalar& m1, const BlockScalar& m2, const BlockScalar& x);

/// 4 x 4 matrix of 1 - M1 S[.] M2 in the basis (x11, x22, x12, x21).
Eigen::Matrix4cd stability_reduction(const DysonPoint& p1, const DysonPoint& p2);

TwoBodyStability two_body_stability(Complex z1, Complex z2, Complex w1, Complex w2);

/// M_B = (1 - M1 S[.] M2)^{-1} [M1 B M2]. Throws StabilityError when |beta_hat| or
/// |beta_hat_star| is below 1e-10.
BlockScalar two_resolvent_approx(Complex z1, Complex z2, Complex w1, Complex w2, const BlockScalar& b);

} // namespace rmtlab
