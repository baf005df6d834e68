#pragma once

#include <cstddef>
#include <vector>

#include "rmtlab/dyson.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/test_functions.hpp"
#include "rmtlab/types.hpp"

namespace rmtlab {

/// A(eta1, eta2) = 1 + (u1 u2 |z1||z2|)^2 - m1^2 m2^2 - 2 u1 u2 Re(z1 conj(z2)),
/// with m_i, u_i at w = i eta_i. V = (1/2) d_eta1 d_eta2 log A.
Complex v_log_argument(const DysonPoint& p1, const DysonPoint& p2);
Complex v_log_argument(Complex z1, Complex z2, double eta1, double eta2);

/// Explicit rational form of V. Throws SingularityError when |A| <= 1e-12.
Complex v_kernel(const DysonPoint& p1, const DysonPoint& p2);
Complex v_kernel(Complex z1, Complex z2, double eta1, double eta2);

/// V from the chain rule applied to log A, with analytic eta-derivatives of m and u.
Complex v_kernel_chain_rule(const DysonPoint& p1, const DysonPoint& p2);

/// U = (i / sqrt 2) d_eta (m^2) at w = i eta.
Complex u_kernel(Complex z, double eta);
Complex u_kernel(const DysonPoint& p);

/// int_0^inf U d eta = -(i / sqrt 2) m(i0+)^2 = (i / sqrt 2) max(1 - |z|^2, 0).
Complex u_kernel_integral(Complex z);

/// -int int V d eta1 d eta2 in closed form. Throws SingularityError for z1 = z2 in the
/// closed disk and for z1 conj(z2) = 1.
double theta_closed(Complex z1, Complex z2);

/// Fourier coefficients of f on the unit circle, k = -K..K.
struct BoundarySpectrum {
    int K = 0;
    std::vector<Complex> coeffs;  // index k + K

    Complex at(int k) const;
};

/// Uniform-grid transform with M points; M must be a power of two with M >= 4K + 4.
BoundarySpectrum boundary_fourier(const TestFunction& f, int K, int M);

/// sum_{|k| <= K} |k| fhat(k) conj(ghat(k)).
Complex h_half_inner(const BoundarySpectrum& g, const BoundarySpectrum& f);

/// Resolution of the disk and boundary quadratures. With `check_convergence`, each
/// evaluation is repeated at doubled resolution (up to `max_doublings` times) until
/// every reported quantity drifts by less than `tolerance` relative.
struct QuadSpec {
    std::size_t n_r = 256;
    std::size_t n_theta = 512;
    int fourier_K = 64;
    int fourier_M = 512;
    bool check_convergence = true;
    double tolerance = 1e-4;
    int max_doublings = 2;

    QuadSpec doubled() const;
};

struct CovarianceBreakdown {
    Complex gradient_term{};
    Complex h_half_term{};
    Complex kappa4_term{};
    Complex total{};
    /// Disk mean minus boundary mean of conj(g) and of f.
    Complex kappa4_coefficient_g{};
    Complex kappa4_coefficient_f{};
    double drift = 0.0;
    QuadSpec used;
};

/// C(g, f) = (1/4 pi) int_D <grad g, grad f> + (1/2) <g, f>_{H^1/2}
///           + kappa4 (mean_D conj g - mean_dD conj g)(mean_D f - mean_dD f).
CovarianceBreakdown covariance_functional(const TestFunction& g, const TestFunction& f, double kappa4,
                                          const QuadSpec& quad = {});

struct ExpectationPrediction {
    Complex leading{};     // (n / pi) int_D f
    Complex correction{};  // -(kappa4 / pi) int_D f (2|z|^2 - 1)
    double drift = 0.0;
};

ExpectationPrediction expectation_correction(const TestFunction& f, double kappa4, std::size_t n,
                                             const QuadSpec& quad = {});

/// (1/pi) int_D f and (1/2 pi) int_0^{2 pi} f(e^{i theta}).
Complex disk_mean(const TestFunction& f, const QuadSpec& quad = {});
Complex boundary_mean(const TestFunction& f, const QuadSpec& quad = {});

/// (1/8 pi) int_D |grad f|^2 + (1/2) ||f||^2_{H^1/2}: the positivity lower bound for Re C(f, f).
double variance_lower_bound(const TestFunction& f, const QuadSpec& quad = {});

} // namespace rmtlab
