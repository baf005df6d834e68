#include "rmtlab/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

namespace {

using LReal = long double;
using LComplex = std::complex<long double>;

LComplex to_l(Complex c) { return {static_cast<LReal>(c.real()), static_cast<LReal>(c.imag())}; }
Complex to_d(LComplex c) { return {static_cast<double>(c.real()), static_cast<double>(c.imag())}; }

struct Cubic {
    LComplex b, c, d;  // monic: m^3 + b m^2 + c m + d
    LComplex eval(LComplex m) const { return ((m + b) * m + c) * m + d; }
    LComplex deriv(LComplex m) const { return (LReal(3) * m + LReal(2) * b) * m + c; }
};

Cubic make_cubic(Complex z, LComplex w) {
    const LReal z2 = static_cast<LReal>(std::norm(z));
    return {LReal(2) * w, w * w + LReal(1) - z2, w};
}

LComplex polish(const Cubic& p, LComplex m) {
    LReal best = std::abs(p.eval(m));
    for (int it = 0; it < 12; ++it) {
        const LComplex d = p.deriv(m);
        if (std::abs(d) == LReal(0)) break;
        const LComplex next = m - p.eval(m) / d;
        const LReal r = std::abs(p.eval(next));
        if (!(r < best)) break;
        best = r;
        m = next;
    }
    return m;
}

LComplex unscaled_residual(Complex z, LComplex w, LComplex m) {
    const LReal z2 = static_cast<LReal>(std::norm(z));
    return LReal(1) / m + w + m - z2 / (w + m);
}

DysonPoint finish(Complex z, Complex w, LComplex wl, LComplex ml) {
    DysonPoint p;
    p.z = z;
    p.w = w;
    p.m = to_d(ml);
    const LComplex ul = ml / (wl + ml);
    p.u = to_d(ul);
    const LReal z2 = static_cast<LReal>(std::norm(z));
    p.beta = to_d(LReal(1) - ml * ml - ul * ul * z2);
    p.beta_star = to_d(LReal(1) - std::norm(ml) - std::norm(ul) * z2);
    p.m_prime = (1.0 - p.beta) / p.beta;
    p.residual = static_cast<double>(std::abs(unscaled_residual(z, wl, ml)));
    p.scaled_residual = std::abs(1.0 + p.m * (w + p.m) - std::norm(z) * p.u);
    return p;
}

std::array<LComplex, 3> roots_l(Complex z, LComplex w) {
    const Cubic p = make_cubic(z, w);
    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(0, 0) = -to_d(p.b);
    companion(0, 1) = -to_d(p.c);
    companion(0, 2) = -to_d(p.d);
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, false);
    std::array<LComplex, 3> out;
    for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)] = polish(p, to_l(es.eigenvalues()(k)));
    return out;
}

/// Real root of a real monic cubic, by Cardano in extended precision plus polishing.
/// Only called when the discriminant is negative (one real root).
LReal real_root(LReal b, LReal c, LReal d) {
    const LReal p = c - b * b / 3;
    const LReal q = 2 * b * b * b / 27 - b * c / 3 + d;
    const LReal disc = q * q / 4 + p * p * p / 27;
    const LReal s = std::sqrt(std::max(disc, LReal(0)));
    LReal t = std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s);
    LReal m = t - b / 3;
    for (int it = 0; it < 8; ++it) {
        const LReal f = ((m + b) * m + c) * m + d;
        const LReal df = (3 * m + 2 * b) * m + c;
        if (df == 0) break;
        const LReal next = m - f / df;
        if (std::abs(((next + b) * next + c) * next + d) >= std::abs(f)) break;
        m = next;
    }
    return m;
}

/// Root with positive imaginary part at real w = E, or nullopt-like NaN when all roots are real.
bool upper_root_real_w(Complex z, double E, LComplex& out) {
    if (!(dyson_discriminant(z, E) < 0.0)) return false;
    const LReal el = E;
    const LReal b = 2 * el;
    const LReal c = el * el + 1 - static_cast<LReal>(std::norm(z));
    const LReal d = el;
    const LReal r = real_root(b, c, d);
    // Deflate: m^2 + (b + r) m + (c + r (b + r)).
    const LReal b1 = b + r;
    const LReal c0 = c + r * b1;
    const LReal disc = 4 * c0 - b1 * b1;
    if (!(disc > 0)) return false;
    out = LComplex(-b1 / 2, std::sqrt(disc) / 2);
    out = polish(make_cubic(z, LComplex(el, 0)), out);
    if (out.imag() < 0) out = std::conj(out);
    return true;
}

} // namespace

std::array<Complex, 3> dyson_cubic_roots(Complex z, Complex w) {
    const auto r = roots_l(z, to_l(w));
    return {to_d(r[0]), to_d(r[1]), to_d(r[2])};
}

Complex solve_m_fixed_point(Complex z, Complex w, double damping, int max_iter, double tol) {
    if (w.imag() == 0.0) throw InvalidParameter("solve_m_fixed_point: Im w must be nonzero");
    const double z2 = std::norm(z);
    Complex m = w.imag() > 0 ? kI : -kI;
    for (int it = 0; it < max_iter; ++it) {
        const Complex next = -1.0 / (w + m - z2 / (w + m));
        const Complex upd = (1.0 - damping) * m + damping * next;
        if (std::abs(upd - m) <= tol * std::max(1.0, std::abs(m))) return upd;
        m = upd;
    }
    throw ConvergenceError("solve_m_fixed_point: no convergence after " + std::to_string(max_iter) + " iterations");
}

DysonPoint solve_m(Complex z, Complex w) {
    if (w.imag() == 0.0) throw InvalidParameter("solve_m: Im w must be nonzero (use solve_m_real on the axis)");
    const LComplex wl = to_l(w);
    const auto roots = roots_l(z, wl);
    const double sgn = w.imag() > 0 ? 1.0 : -1.0;
    const LReal z2 = static_cast<LReal>(std::norm(z));

    int best = -1;
    int best_rank = 3;
    LReal best_res = std::numeric_limits<LReal>::infinity();
    for (int k = 0; k < 3; ++k) {
        const LComplex m = roots[static_cast<std::size_t>(k)];
        if (!(sgn * static_cast<double>(m.imag()) > 0.0)) continue;
        const LComplex u = m / (wl + m);
        const bool bounded = std::norm(m) + std::norm(u) * z2 < LReal(1);
        const int rank = bounded ? 0 : 1;
        const LReal res = std::abs(m) * std::abs(unscaled_residual(z, wl, m));
        if (rank < best_rank || (rank == best_rank && res < best_res)) {
            best = k;
            best_rank = rank;
            best_res = res;
        }
    }
    if (best >= 0) return finish(z, w, wl, roots[static_cast<std::size_t>(best)]);

    // Fallback: fixed-point iterate, then polish on the cubic.
    try {
        const Complex m0 = solve_m_fixed_point(z, w);
        const LComplex m = polish(make_cubic(z, wl), to_l(m0));
        if (sgn * static_cast<double>(m.imag()) > 0.0) return finish(z, w, wl, m);
    } catch (const ConvergenceError&) {
    }
    std::ostringstream msg;
    msg << "solve_m: no root with Im w Im m > 0 at z=" << z << ", w=" << w << "; roots/residuals:";
    for (const auto& m : roots) msg << " " << to_d(m) << "/" << static_cast<double>(std::abs(unscaled_residual(z, wl, m)));
    throw ConvergenceError(msg.str());
}

double dyson_discriminant(Complex z, double E) {
    const LReal el = E;
    const LReal a = 1;
    const LReal b = 2 * el;
    const LReal c = el * el + 1 - static_cast<LReal>(std::norm(z));
    const LReal d = el;
    const LReal disc = 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d;
    return static_cast<double>(disc);
}

double density_at(Complex z, double E) {
    LComplex m;
    if (!upper_root_real_w(z, E, m)) return 0.0;
    return static_cast<double>(m.imag()) / kPi;
}

DysonPoint solve_m_real(Complex z, double E) {
    const LComplex wl(E, 0);
    LComplex m;
    if (upper_root_real_w(z, E, m)) return finish(z, Complex(E, 0.0), wl, m);

    // Outside the support all roots are real; follow the upper half-plane branch down.
    const Complex guess = solve_m(z, Complex(E, 1e-9)).m;
    const auto roots = roots_l(z, wl);
    LComplex pick = roots[0];
    for (const auto& r : roots)
        if (std::abs(to_d(r) - guess) < std::abs(to_d(pick) - guess)) pick = r;
    pick = LComplex(pick.real(), 0);
    if (E == 0.0 && std::abs(pick) < 1e-300L) {
        // m -> 0 inside the gap at E = 0; u -> 1/|z|^2.
        DysonPoint p;
        p.z = z;
        p.w = 0.0;
        p.m = 0.0;
        p.u = 1.0 / std::norm(z);
        p.beta = 1.0 - p.u * p.u * std::norm(z);
        p.beta_star = p.beta;
        p.m_prime = (1.0 - p.beta) / p.beta;
        p.residual = 0.0;
        p.scaled_residual = std::abs(1.0 - std::norm(z) * p.u);
        return p;
    }
    return finish(z, Complex(E, 0.0), wl, pick);
}

DensityProfile::DensityProfile(Complex z) : z_(z) {
    const double hi = 3.0 + std::abs(z);
    const int grid = 4000;
    auto inside = [&](double e) { return dyson_discriminant(z, e) < 0.0; };
    auto bisect = [&](double a, double b) {
        // inside(a) != inside(b)
        const bool ia = inside(a);
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
            const double c = 0.5 * (a + b);
            if (inside(c) == ia) a = c; else b = c;
        }
        return 0.5 * (a + b);
    };
    bool prev = inside(0.0) || inside(1e-12);
    double start = 0.0;
    double prev_e = 0.0;
    for (int k = 1; k <= grid; ++k) {
        const double e = hi * static_cast<double>(k) / grid;
        const bool now = inside(e);
        if (now != prev) {
            const double edge = bisect(prev_e, e);
            if (now) start = edge;
            else support_.emplace_back(start, edge);
            prev = now;
        }
        prev_e = e;
    }
    if (prev) support_.emplace_back(start, hi);
    positive_mass_ = cumulative(std::numeric_limits<double>::infinity());
}

double DensityProfile::cumulative(double x) const {
    if (x < 0.0) throw InvalidParameter("cumulative: x must be nonnegative");
    double total = 0.0;
    for (const auto& [a, b] : support_) {
        if (x <= a) break;
        const double top = std::min(x, b);
        const double len = b - a;
        // E = a + len (1 - cos(pi t)) / 2 flattens square-root edges.
        const double t_top = top >= b ? 1.0 : std::acos(std::clamp(1.0 - 2.0 * (top - a) / len, -1.0, 1.0)) / kPi;
        if (t_top <= 0.0) continue;
        auto integrand = [&](double t) {
            const double e = a + 0.5 * len * (1.0 - std::cos(kPi * t));
            return density_at(z_, e) * 0.5 * len * kPi * std::sin(kPi * t);
        };
        total += quad::adaptive(integrand, 0.0, t_top, 1e-13, 1e-12, 25);
    }
    return total;
}

double DensityProfile::quantile(std::size_t n, long i) const {
    if (i == 0) throw InvalidParameter("quantile: index 0 is not used");
    if (n == 0) throw InvalidParameter("quantile: n must be positive");
    const auto key = std::make_pair(n, std::labs(i));
    if (auto it = cache_.find(key); it != cache_.end()) return i > 0 ? it->second : -it->second;

    const double target = static_cast<double>(std::labs(i)) / static_cast<double>(n);
    if (target > positive_mass_ + 1e-9) {
        std::ostringstream msg;
        msg << "quantile: i/n = " << target << " exceeds the mass " << positive_mass_ << " on (0, inf) at z=" << z_;
        throw OutOfMassError(msg.str());
    }
    if (target >= positive_mass_ - 1e-12) {
        cache_[key] = support_.back().second;
        return i > 0 ? support_.back().second : -support_.back().second;
    }
    // Locate the support interval holding the target.
    double lo = 0.0, hi = 0.0;
    for (const auto& [a, b] : support_) {
        const double upto = cumulative(b);
        if (upto >= target) {
            lo = a;
            hi = b;
            break;
        }
    }
    auto f = [&](double x) { return cumulative(x) - target; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto [r0, r1] = boost::math::tools::toms748_solve(f, lo, hi, f(lo), f(hi), tol, iters);
    const double gamma = 0.5 * (r0 + r1);
    cache_[key] = gamma;
    return i > 0 ? gamma : -gamma;
}

double quantile(Complex z, std::size_t n, long i) { return DensityProfile(z).quantile(n, i); }

BlockScalar stability_map(const BlockScalar& m1, const BlockScalar& m2, const BlockScalar& x) {
    const BlockScalar s{x.b22, 0.0, 0.0, x.b11};
    return m1 * s * m2;
}

namespace {

Eigen::Vector4cd to_vec(const BlockScalar& x) { return {x.b11, x.b22, x.b12, x.b21}; }
BlockScalar from_vec(const Eigen::Vector4cd& v) { return {v(0), v(2), v(3), v(1)}; }

} // namespace

Eigen::Matrix4cd stability_reduction(const DysonPoint& p1, const DysonPoint& p2) {
    const BlockScalar m1 = p1.M();
    const BlockScalar m2 = p2.M();
    Eigen::Matrix4cd out;
    for (int k = 0; k < 4; ++k) {
        Eigen::Vector4cd e = Eigen::Vector4cd::Zero();
        e(k) = 1.0;
        const BlockScalar x = from_vec(e);
        out.col(k) = e - to_vec(stability_map(m1, m2, x));
    }
    return out;
}

TwoBodyStability two_body_stability(Complex z1, Complex z2, Complex w1, Complex w2) {
    const DysonPoint p1 = solve_m(z1, w1);
    const DysonPoint p2 = solve_m(z2, w2);
    TwoBodyStability s;
    s.z1 = z1;
    s.z2 = z2;
    s.w1 = w1;
    s.w2 = w2;
    const Complex zz = z1 * std::conj(z2);
    const Complex uu = p1.u * p2.u;
    const Complex mm = p1.m * p2.m;
    Complex root = std::sqrt(mm * mm - uu * uu * zz.imag() * zz.imag());
    // Branch continuous with m1 m2; coincident arguments give (beta, beta_star).
    if ((root * std::conj(mm)).real() < 0.0) root = -root;
    s.beta_hat = 1.0 - uu * zz.real() - root;
    s.beta_hat_star = 1.0 - uu * zz.real() + root;
    s.reduction = stability_reduction(p1, p2);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(s.reduction);
    const double smin = svd.singularValues()(3);
    s.inv_norm_bound = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
    return s;
}

BlockScalar two_resolvent_approx(Complex z1, Complex z2, Complex w1, Complex w2, const BlockScalar& b) {
    const TwoBodyStability s = two_body_stability(z1, z2, w1, w2);
    if (std::abs(s.beta_hat) < 1e-10 || std::abs(s.beta_hat_star) < 1e-10) {
        std::ostringstream msg;
        msg << "two_resolvent_approx: stability operator nearly singular (|beta_hat|=" << std::abs(s.beta_hat)
            << ", |beta_hat_star|=" << std::abs(s.beta_hat_star) << ")";
        throw StabilityError(msg.str());
    }
    const BlockScalar m1 = solve_m(z1, w1).M();
    const BlockScalar m2 = solve_m(z2, w2).M();
    const Eigen::Vector4cd rhs = to_vec(m1 * b * m2);
    const Eigen::Vector4cd x = s.reduction.partialPivLu().solve(rhs);
    return from_vec(x);
}

} // namespace rmtlab
