#include "rmtlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmtlab/errors.hpp"

namespace rmtlab::quad {

Rule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw InvalidParameter("gauss_legendre: need at least one node");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) rule.nodes[m - 1] = mid;
    return rule;
}

GridNodes build_grid(const PolarGrid& g) {
    if (g.n_r == 0 || g.n_theta == 0 || !(g.radius > 0.0)) throw InvalidParameter("polar grid: empty or bad radius");
    std::vector<double> edges{0.0};
    for (double b : g.breaks)
        if (b > edges.back() && b < g.radius) edges.push_back(b);
    edges.push_back(g.radius);
    Rule radial;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const auto count = std::max<std::size_t>(8, g.n_r / (edges.size() - 1));
        const Rule piece = gauss_legendre(count, edges[p], edges[p + 1]);
        radial.nodes.insert(radial.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        radial.weights.insert(radial.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    GridNodes out;
    out.z.reserve(g.n_r * g.n_theta);
    out.w.reserve(g.n_r * g.n_theta);
    const double dtheta = 2.0 * kPi / static_cast<double>(g.n_theta);
    for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
        const double r = radial.nodes[a];
        for (std::size_t b = 0; b < g.n_theta; ++b) {
            const double th = dtheta * static_cast<double>(b);
            out.z.push_back(std::polar(r, th));
            out.w.push_back(radial.weights[a] * r * dtheta);
        }
    }
    return out;
}

namespace {

template <class T>
T pairwise(const T* v, std::size_t count) {
    if (count == 0) return T{};
    if (count <= 16) {
        T s{};
        for (std::size_t i = 0; i < count; ++i) s += v[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise(v, half) + pairwise(v + half, count - half);
}

} // namespace

double pairwise_sum(const double* values, std::size_t count) { return pairwise(values, count); }
Complex pairwise_sum(const Complex* values, std::size_t count) { return pairwise(values, count); }

Complex integrate(const GridNodes& nodes, const std::function<Complex(Complex)>& f) {
    std::vector<Complex> terms(nodes.z.size());
    for (std::size_t k = 0; k < nodes.z.size(); ++k) terms[k] = nodes.w[k] * f(nodes.z[k]);
    return pairwise_sum(terms.data(), terms.size());
}

double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                unsigned max_depth) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double value = gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err);
    if (!std::isfinite(value) || err > std::max(abs_tol, 100.0 * rel_tol * std::abs(value))) {
        throw AccuracyError("adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] reached error estimate " + std::to_string(err));
    }
    return value;
}

Complex adaptive_complex(const std::function<Complex(double)>& f, double a, double b, double abs_tol, double rel_tol,
                         unsigned max_depth) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const Complex value = gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err);
    if (!std::isfinite(std::abs(value)) || err > std::max(abs_tol, 100.0 * rel_tol * std::abs(value))) {
        throw AccuracyError("adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] reached error estimate " + std::to_string(err));
    }
    return value;
}

} // namespace rmtlab::quad
