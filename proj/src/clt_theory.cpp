#include "rmtlab/clt_theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <tuple>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

constexpr double kLogGuard = 1e-12;

struct Pair {
    Complex m1, u1, m2, u2;
    double n1, n2;  // |z_i|
    double re, im;  // Re, Im of z1 conj(z2)
};

Pair pack(const DysonPoint& p1, const DysonPoint& p2) {
    const Complex zz = p1.z * std::conj(p2.z);
    return {p1.m, p1.u, p2.m, p2.u, std::abs(p1.z), std::abs(p2.z), zz.real(), zz.imag()};
}

Complex log_arg(const Pair& q) {
    const Complex uu = q.u1 * q.u2;
    const Complex a = uu * q.n1 * q.n2;
    return 1.0 + a * a - q.m1 * q.m1 * q.m2 * q.m2 - 2.0 * uu * q.re;
}

void guard(Complex a) {
    if (std::abs(a) <= kLogGuard) {
        std::ostringstream msg;
        msg << "V kernel: log argument |A| = " << std::abs(a) << " below guard";
        throw SingularityError(msg.str());
    }
}

// d u / d eta along w = i eta.
Complex du_deta(const DysonPoint& p) {
    const Complex wm = p.w + p.m;
    return (p.w * p.dm_deta() - kI * p.m) / (wm * wm);
}

} // namespace

Complex v_log_argument(const DysonPoint& p1, const DysonPoint& p2) { return log_arg(pack(p1, p2)); }

Complex v_log_argument(Complex z1, Complex z2, double eta1, double eta2) {
    return v_log_argument(solve_m(z1, {0.0, eta1}), solve_m(z2, {0.0, eta2}));
}

Complex v_kernel(const DysonPoint& p1, const DysonPoint& p2) {
    const Pair q = pack(p1, p2);
    const Complex a = log_arg(q);
    guard(a);
    const Complex z1sq = q.n1 * q.n1, z2sq = q.n2 * q.n2;
    const Complex t1 = 1.0 - q.m1 * q.m1 - q.u1 * q.u1 * z1sq;
    const Complex t2 = 1.0 - q.m2 * q.m2 - q.u2 * q.u2 * z2sq;
    const Complex s1 = q.m1 * q.m1 - q.u1 * q.u1 * z1sq;
    const Complex s2 = q.m2 * q.m2 - q.u2 * q.u2 * z2sq;
    const Complex uu = q.u1 * q.u2;
    const Complex p = uu * q.n1 * q.n2;
    const Complex mm = q.m1 * q.m2;
    const Complex denom = t1 * t2 * a * a;
    const Complex first = 2.0 * mm * (2.0 * uu * q.re + p * p * (s1 * s2 - 4.0));
    const Complex second = 2.0 * mm * (q.m1 * q.m1 + q.u1 * q.u1 * z1sq) * (q.m2 * q.m2 + q.u2 * q.u2 * z2sq);
    return (first + second) / denom;
}

Complex v_kernel(Complex z1, Complex z2, double eta1, double eta2) {
    if (!(eta1 > 0.0 && eta2 > 0.0)) throw InvalidParameter("v_kernel: eta must be positive");
    return v_kernel(solve_m(z1, {0.0, eta1}), solve_m(z2, {0.0, eta2}));
}

Complex v_kernel_chain_rule(const DysonPoint& p1, const DysonPoint& p2) {
    const Pair q = pack(p1, p2);
    const Complex a = log_arg(q);
    guard(a);
    const double pp = q.n1 * q.n1 * q.n2 * q.n2;
    const Complex u1d = du_deta(p1), u2d = du_deta(p2);
    const Complex m1d = p1.dm_deta(), m2d = p2.dm_deta();
    // A = 1 + u1^2 u2^2 P - m1^2 m2^2 - 2 u1 u2 R
    const Complex a1 = (2.0 * q.u1 * q.u2 * q.u2 * pp - 2.0 * q.u2 * q.re) * u1d - 2.0 * q.m1 * q.m2 * q.m2 * m1d;
    const Complex a2 = (2.0 * q.u2 * q.u1 * q.u1 * pp - 2.0 * q.u1 * q.re) * u2d - 2.0 * q.m2 * q.m1 * q.m1 * m2d;
    const Complex a12 = (4.0 * q.u1 * q.u2 * pp - 2.0 * q.re) * u1d * u2d - 4.0 * q.m1 * q.m2 * m1d * m2d;
    return 0.5 * (a12 / a - a1 * a2 / (a * a));
}

Complex u_kernel(const DysonPoint& p) { return (kI / std::sqrt(2.0)) * 2.0 * p.m * p.dm_deta(); }

Complex u_kernel(Complex z, double eta) {
    if (!(eta > 0.0)) throw InvalidParameter("u_kernel: eta must be positive");
    return u_kernel(solve_m(z, {0.0, eta}));
}

Complex u_kernel_integral(Complex z) { return (kI / std::sqrt(2.0)) * std::max(1.0 - std::norm(z), 0.0); }

double theta_closed(Complex z1, Complex z2) {
    const double r1 = std::abs(z1), r2 = std::abs(z2);
    const bool in1 = r1 <= 1.0, in2 = r2 <= 1.0;
    const double d = std::abs(z1 - z2);
    if (in1 && in2) {
        if (d == 0.0) throw SingularityError("theta_closed: coincident points in the closed disk");
        return -std::log(d);
    }
    if (in1 != in2) return std::log(in1 ? r2 : r1) - std::log(d);
    const double e = std::abs(1.0 - z1 * std::conj(z2));
    if (e == 0.0) throw SingularityError("theta_closed: z1 conj(z2) = 1");
    return std::log(r1 * r2) - std::log(e);
}

Complex BoundarySpectrum::at(int k) const {
    if (k < -K || k > K) return 0.0;
    return coeffs[static_cast<std::size_t>(k + K)];
}

BoundarySpectrum boundary_fourier(const TestFunction& f, int K, int M) {
    if (K < 0) throw InvalidParameter("boundary_fourier: K must be nonnegative");
    if (M < 4 * K + 4 || (M & (M - 1)) != 0)
        throw InvalidParameter("boundary_fourier: M must be a power of two with M >= 4K + 4");
    std::vector<Complex> values(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) values[static_cast<std::size_t>(j)] = f.value(std::polar(1.0, 2.0 * kPi * j / M));
    BoundarySpectrum out;
    out.K = K;
    out.coeffs.resize(static_cast<std::size_t>(2 * K + 1));
    std::vector<Complex> terms(static_cast<std::size_t>(M));
    for (int k = -K; k <= K; ++k) {
        for (int j = 0; j < M; ++j) {
            // Reduce the phase index exactly before forming the angle.
            const long idx = ((static_cast<long>(k) * j) % M + M) % M;
            terms[static_cast<std::size_t>(j)] =
                values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * static_cast<double>(idx) / M);
        }
        out.coeffs[static_cast<std::size_t>(k + K)] = quad::pairwise_sum(terms.data(), terms.size()) / double(M);
    }
    return out;
}

Complex h_half_inner(const BoundarySpectrum& g, const BoundarySpectrum& f) {
    if (g.K != f.K) throw InvalidParameter("h_half_inner: spectra have different cutoffs");
    std::vector<Complex> terms;
    terms.reserve(static_cast<std::size_t>(2 * f.K + 1));
    for (int k = -f.K; k <= f.K; ++k) terms.push_back(double(std::abs(k)) * f.at(k) * std::conj(g.at(k)));
    return quad::pairwise_sum(terms.data(), terms.size());
}

QuadSpec QuadSpec::doubled() const {
    QuadSpec q = *this;
    q.n_r *= 2;
    q.n_theta *= 2;
    q.fourier_K *= 2;
    q.fourier_M *= 2;
    return q;
}

namespace {

struct RawCovariance {
    Complex grad, half, coef_g, coef_f;
};

Complex disk_mean_at(const TestFunction& f, const QuadSpec& q) {
    const auto nodes = quad::build_grid({q.n_r, q.n_theta, 1.0});
    return quad::integrate(nodes, [&](Complex z) { return f.value(z); }) / kPi;
}

Complex boundary_mean_at(const TestFunction& f, const QuadSpec& q) {
    return boundary_fourier(f, 0, std::max(4, q.fourier_M)).at(0);
}

RawCovariance raw_covariance(const TestFunction& g, const TestFunction& f, const QuadSpec& q) {
    const auto nodes = quad::build_grid({q.n_r, q.n_theta, 1.0});
    std::vector<Complex> grad_terms(nodes.z.size()), gv(nodes.z.size()), fv(nodes.z.size());
    for (std::size_t k = 0; k < nodes.z.size(); ++k) {
        const Jet jg = g.jet(nodes.z[k]);
        const Jet jf = f.jet(nodes.z[k]);
        grad_terms[k] = nodes.w[k] * (std::conj(jg.dx) * jf.dx + std::conj(jg.dy) * jf.dy);
        gv[k] = nodes.w[k] * std::conj(jg.value);
        fv[k] = nodes.w[k] * jf.value;
    }
    const BoundarySpectrum gh = boundary_fourier(g, q.fourier_K, q.fourier_M);
    const BoundarySpectrum fh = boundary_fourier(f, q.fourier_K, q.fourier_M);
    RawCovariance r;
    r.grad = quad::pairwise_sum(grad_terms.data(), grad_terms.size()) / (4.0 * kPi);
    r.half = 0.5 * h_half_inner(gh, fh);
    r.coef_g = quad::pairwise_sum(gv.data(), gv.size()) / kPi - std::conj(gh.at(0));
    r.coef_f = quad::pairwise_sum(fv.data(), fv.size()) / kPi - fh.at(0);
    return r;
}

double rel_drift(const std::vector<Complex>& a, const std::vector<Complex>& b, double scale) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double den = std::max({std::abs(b[i]), scale, 1e-12});
        worst = std::max(worst, std::abs(a[i] - b[i]) / den);
    }
    return worst;
}

template <class T>
struct Evaluated {
    T first;
    std::vector<Complex> second;
    double third;
};

template <class Eval>
auto converge(const QuadSpec& quad, Eval eval, const char* who) {
    auto current = eval(quad);
    if (!quad.check_convergence) return std::make_tuple(current.first, 0.0, quad);
    QuadSpec q = quad;
    double drift = 0.0;
    for (int d = 0; d <= quad.max_doublings; ++d) {
        const QuadSpec next = q.doubled();
        auto refined = eval(next);
        drift = rel_drift(current.second, refined.second, current.third);
        if (drift < quad.tolerance) return std::make_tuple(current.first, drift, q);
        current = refined;
        q = next;
    }
    std::ostringstream msg;
    msg << who << ": quadrature did not converge, relative drift " << drift << " at " << q.n_r << "x" << q.n_theta;
    throw AccuracyError(msg.str());
}

} // namespace

CovarianceBreakdown covariance_functional(const TestFunction& g, const TestFunction& f, double kappa4,
                                          const QuadSpec& quad) {
    auto eval = [&](const QuadSpec& q) {
        const RawCovariance r = raw_covariance(g, f, q);
        CovarianceBreakdown c;
        c.gradient_term = r.grad;
        c.h_half_term = r.half;
        c.kappa4_coefficient_g = r.coef_g;
        c.kappa4_coefficient_f = r.coef_f;
        c.kappa4_term = kappa4 * r.coef_g * r.coef_f;
        c.total = c.gradient_term + c.h_half_term + c.kappa4_term;
        c.used = q;
        const double scale = std::abs(c.gradient_term) + std::abs(c.h_half_term) + std::abs(r.coef_g * r.coef_f);
        return Evaluated<CovarianceBreakdown>{c, {r.grad, r.half, r.coef_g * r.coef_f, c.total}, scale};
    };
    auto [c, drift, used] = converge(quad, eval, "covariance_functional");
    c.drift = drift;
    c.used = used;
    return c;
}

ExpectationPrediction expectation_correction(const TestFunction& f, double kappa4, std::size_t n,
                                             const QuadSpec& quad) {
    auto eval = [&](const QuadSpec& q) {
        const auto nodes = quad::build_grid({q.n_r, q.n_theta, 1.0});
        const Complex integral = quad::integrate(nodes, [&](Complex z) { return f.value(z); });
        const Complex weighted =
            quad::integrate(nodes, [&](Complex z) { return f.value(z) * (2.0 * std::norm(z) - 1.0); });
        ExpectationPrediction e;
        e.leading = static_cast<double>(n) / kPi * integral;
        e.correction = -kappa4 / kPi * weighted;
        return Evaluated<ExpectationPrediction>{e, {integral, weighted}, std::abs(integral)};
    };
    auto [e, drift, used] = converge(quad, eval, "expectation_correction");
    (void)used;
    e.drift = drift;
    return e;
}

Complex disk_mean(const TestFunction& f, const QuadSpec& quad) { return disk_mean_at(f, quad); }
Complex boundary_mean(const TestFunction& f, const QuadSpec& quad) { return boundary_mean_at(f, quad); }

double variance_lower_bound(const TestFunction& f, const QuadSpec& quad) {
    const RawCovariance r = raw_covariance(f, f, quad);
    return 0.5 * r.grad.real() + r.half.real();
}

} // namespace rmtlab
