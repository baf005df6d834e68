#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmtlab/clt_theory.hpp"
#include "rmtlab/dyson.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/test_functions.hpp"

using namespace rmtlab;

namespace {

// Log-spaced Gauss-Legendre rule on [lo, hi] in eta, returned as (eta, weight) nodes.
std::vector<std::pair<double, double>> log_rule(double lo, double hi, int panels, int per_panel) {
    std::vector<std::pair<double, double>> out;
    const double a = std::log(lo), b = std::log(hi);
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const quad::Rule r = quad::gauss_legendre(static_cast<std::size_t>(per_panel), a + p * step, a + (p + 1) * step);
        for (std::size_t k = 0; k < r.nodes.size(); ++k) {
            const double eta = std::exp(r.nodes[k]);
            out.emplace_back(eta, r.weights[k] * eta);
        }
    }
    return out;
}

double numeric_theta(Complex z1, Complex z2) {
    const auto rule = log_rule(1e-9, 1e4, 40, 16);
    std::vector<DysonPoint> p1, p2;
    for (const auto& [eta, w] : rule) {
        p1.push_back(solve_m(z1, Complex(0, eta)));
        p2.push_back(solve_m(z2, Complex(0, eta)));
    }
    Complex total{};
    for (std::size_t a = 0; a < rule.size(); ++a) {
        Complex row{};
        for (std::size_t b = 0; b < rule.size(); ++b) row += rule[b].second * v_kernel(p1[a], p2[b]);
        total += rule[a].second * row;
    }
    CHECK(std::abs(total.imag()) < 1e-6);
    return -total.real();
}

Complex u_integral_numeric(Complex z) {
    // eta = t^3 on [0, 1], eta = 1/s on [1, inf).
    const Complex low = quad::adaptive_complex(
        [&](double t) { return 3.0 * t * t * u_kernel(z, t * t * t); }, 0.0, 1.0, 1e-12, 1e-11, 30);
    const Complex high = quad::adaptive_complex(
        [&](double s) { return u_kernel(z, 1.0 / s) / (s * s); }, 0.0, 1.0, 1e-12, 1e-11, 30);
    return low + high;
}

QuadSpec cheap_quad() {
    QuadSpec q;
    q.n_r = 96;
    q.n_theta = 192;
    q.check_convergence = false;
    return q;
}

} // namespace

TEST_CASE("V kernel reference value and finite differences") {
    const Complex v = v_kernel(0.0, 0.5, 0.3, 0.7);
    CHECK(v.real() == doctest::Approx(-0.27198775460).epsilon(1e-9));
    CHECK(std::abs(v.imag()) < 1e-12);

    const double h = 1e-5;
    for (const auto& [z1, z2, e1, e2] : std::vector<std::tuple<Complex, Complex, double, double>>{
             {0.0, 0.5, 0.3, 0.7}, {Complex(0.2, 0.3), Complex(-0.4, 0.1), 0.05, 1.2}, {1.5, Complex(0, 0.7), 0.4, 0.4}}) {
        auto la = [&](double a, double b) { return std::log(v_log_argument(z1, z2, a, b)); };
        const Complex fd = 0.5 * (la(e1 + h, e2 + h) - la(e1 + h, e2 - h) - la(e1 - h, e2 + h) + la(e1 - h, e2 - h)) /
                           (4 * h * h);
        const Complex exact = v_kernel(z1, z2, e1, e2);
        CHECK(std::abs(fd - exact) <= 1e-4 * std::abs(exact));
        const Complex chain = v_kernel_chain_rule(solve_m(z1, Complex(0, e1)), solve_m(z2, Complex(0, e2)));
        CHECK(std::abs(chain - exact) <= 1e-10 * std::abs(exact));
        CHECK(std::abs(v_kernel(z2, z1, e2, e1) - exact) <= 1e-12 * std::abs(exact));
    }
    CHECK_THROWS_AS(v_kernel(0.0, 0.5, 0.0, 1.0), InvalidParameter);
}

TEST_CASE("V kernel near-singularity guard") {
    CHECK_THROWS_AS(v_kernel(0.4, 0.4, 1e-13, 1e-13), SingularityError);
}

TEST_CASE("double eta integral of V reproduces theta") {
    CHECK(theta_closed(0.0, 0.5) == doctest::Approx(0.6931471806).epsilon(1e-10));
    CHECK(theta_closed(0.5, 2.0) == doctest::Approx(0.2876820724).epsilon(1e-9));
    CHECK(theta_closed(2.0, 2.0) == doctest::Approx(0.2876820724).epsilon(1e-9));
    CHECK(theta_closed(2.0, 0.5) == doctest::Approx(theta_closed(0.5, 2.0)));
    for (const auto& [z1, z2] : std::vector<std::pair<Complex, Complex>>{
             {0.0, 0.5}, {0.5, 2.0}, {2.0, 2.0}, {Complex(0.3, -0.2), Complex(-0.5, 0.6)}}) {
        CAPTURE(z1);
        CAPTURE(z2);
        CHECK(std::abs(numeric_theta(z1, z2) - theta_closed(z1, z2)) < 1e-4);
    }
    CHECK_THROWS_AS(theta_closed(0.3, 0.3), SingularityError);
    CHECK_THROWS_AS(theta_closed(1.0, 1.0), SingularityError);
}

TEST_CASE("U kernel and its eta integral") {
    CHECK(std::abs(u_kernel_integral(0.0) - Complex(0, 1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(u_kernel_integral(1.0)) == 0.0);
    CHECK(std::abs(u_kernel_integral(0.6) - Complex(0, 0.4525483400)) < 1e-10);
    for (const Complex z : {Complex(0.0), Complex(0.6), Complex(0.3, 0.5), Complex(1.0), Complex(1.7)}) {
        CAPTURE(z);
        CHECK(std::abs(u_integral_numeric(z) - u_kernel_integral(z)) < 1e-6);
    }
    const DysonPoint p = solve_m(0.3, Complex(0, 0.4));
    CHECK(std::abs(u_kernel(p) - Complex(0, 1.0 / std::sqrt(2.0)) * 2.0 * p.m * p.dm_deta()) < 1e-15);
    CHECK_THROWS_AS(u_kernel(0.3, 0.0), InvalidParameter);
}

TEST_CASE("boundary Fourier coefficients") {
    const BoundarySpectrum z = boundary_fourier(monomial_function(1, 0), 8, 64);
    for (int k = -8; k <= 8; ++k) CHECK(std::abs(z.at(k) - (k == 1 ? 1.0 : 0.0)) < 1e-12);
    const BoundarySpectrum c3 = boundary_fourier(fourier_mode(3, "cos"), 8, 64);
    CHECK(std::abs(c3.at(3) - 0.5) < 1e-12);
    CHECK(std::abs(c3.at(-3) - 0.5) < 1e-12);
    const BoundarySpectrum s2 = boundary_fourier(fourier_mode(2, "sin"), 8, 64);
    CHECK(std::abs(s2.at(2) - Complex(0, -0.5)) < 1e-12);
    const BoundarySpectrum one = boundary_fourier(fourier_mode(0), 8, 64);
    CHECK(std::abs(one.at(0) - 1.0) < 1e-12);
    const BoundarySpectrum g = boundary_fourier(gaussian_bump(0.5, Complex(0.2, 0.1)), 16, 128);
    for (int k = 1; k <= 16; ++k) CHECK(std::abs(g.at(-k) - std::conj(g.at(k))) < 1e-12);
    CHECK_THROWS_AS(boundary_fourier(fourier_mode(0), 8, 32), InvalidParameter);
    CHECK_THROWS_AS(boundary_fourier(fourier_mode(0), 8, 48), InvalidParameter);

    CHECK(h_half_inner(c3, c3).real() == doctest::Approx(1.5));
    CHECK(h_half_inner(z, z).real() == doctest::Approx(1.0));
    CHECK(std::abs(h_half_inner(one, one)) < 1e-12);
    CHECK_THROWS_AS(h_half_inner(z, g), InvalidParameter);
}

TEST_CASE("covariance functional examples") {
    const CovarianceBreakdown cz = covariance_functional(monomial_function(1, 0), monomial_function(1, 0), 1.3);
    CHECK(cz.gradient_term.real() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(cz.h_half_term.real() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(cz.kappa4_term) < 1e-10);
    CHECK(cz.total.real() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(cz.total - (cz.gradient_term + cz.h_half_term + cz.kappa4_term)) < 1e-15);

    const CovarianceBreakdown cz2 = covariance_functional(monomial_function(2, 0), monomial_function(2, 0), -1.0);
    CHECK(cz2.total.real() == doctest::Approx(2.0).epsilon(1e-8));

    const TestFunction r2 = monomial_function(1, 1);
    const CovarianceBreakdown cr = covariance_functional(r2, r2, 0.8);
    CHECK(cr.kappa4_coefficient_f.real() == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(cr.kappa4_term.real() == doctest::Approx(0.8 / 4).epsilon(1e-8));
    CHECK(std::abs(cr.h_half_term) < 1e-10);
    // (1/4 pi) int_D |grad |z|^2|^2 = (1/4 pi) int_D 4 |z|^2 = 1/2.
    CHECK(cr.gradient_term.real() == doctest::Approx(0.5).epsilon(1e-8));

    const TestFunction bump = gaussian_bump(0.4, Complex(0.1, -0.2));
    const CovarianceBreakdown a = covariance_functional(conjugate(bump), bump, 0.0);
    const CovarianceBreakdown b = covariance_functional(bump, bump, 0.0);
    CHECK(std::abs(a.total - b.total) < 1e-10);  // real f
    const TestFunction zc = monomial_function(1, 0);
    const CovarianceBreakdown second = covariance_functional(conjugate(zc), zc, 0.0);
    CHECK(std::abs(second.total) < 1e-10);  // E L(z)^2 = 0
}

TEST_CASE("covariance quadrature converges under doubling") {
    const TestFunction f = gaussian_bump(0.3, Complex(0.5, 0.3));
    const CovarianceBreakdown c = covariance_functional(f, f, 1.0);
    CHECK(c.drift < 1e-4);
    QuadSpec fine = c.used.doubled();
    fine.check_convergence = false;
    const CovarianceBreakdown d = covariance_functional(f, f, 1.0, fine);
    CHECK(std::abs(d.total - c.total) <= 1e-4 * std::abs(c.total));
}

TEST_CASE("positivity lower bound over random bumps") {
    CounterRng rng(derive_seed(21, 0));
    const QuadSpec q = cheap_quad();
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto [a, b] = rng.uniform_pair(2 * k);
        const auto [c, d] = rng.uniform_pair(2 * k + 1);
        const TestFunction f = gaussian_bump(0.2 + 0.5 * a, std::polar(0.8 * b, 2 * kPi * c), 0.5 + d);
        const double lower = variance_lower_bound(f, q);
        for (double kappa4 : {-1.0, 0.0, 2.0}) CHECK(covariance_functional(f, f, kappa4, q).total.real() >= lower - 1e-8);
    }
}

TEST_CASE("analytic functions have equal disk and boundary means") {
    for (int k = 0; k <= 4; ++k) {
        const TestFunction f = monomial_function(k, 0);
        CHECK(std::abs(disk_mean(f) - boundary_mean(f)) <= 1e-8);
    }
    const TestFunction fz3 = fourier_mode(3);
    CHECK(std::abs(disk_mean(fz3) - boundary_mean(fz3)) <= 1e-8);
}

TEST_CASE("expectation prediction") {
    const ExpectationPrediction r2 = expectation_correction(monomial_function(1, 1), 1.5, 100);
    CHECK(r2.leading.real() == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(r2.correction.real() == doctest::Approx(-1.5 / 6.0).epsilon(1e-8));
    const ExpectationPrediction z2 = expectation_correction(monomial_function(2, 0), -0.7, 64);
    CHECK(std::abs(z2.leading) < 1e-9);
    CHECK(std::abs(z2.correction) < 1e-10);
    const ExpectationPrediction one = expectation_correction(fourier_mode(0), 2.0, 64);
    CHECK(one.leading.real() == doctest::Approx(64.0).epsilon(1e-9));
    CHECK(std::abs(one.correction) < 1e-10);
    CHECK(expectation_correction(gaussian_bump(0.3), 0.0, 64).correction == Complex(0.0));
}

TEST_CASE("test function derivatives against finite differences") {
    const std::vector<TestFunction> fs{monomial_function(2, 1), gaussian_bump(0.35, Complex(0.3, -0.1), 2.0),
                                       fourier_mode(-2), fourier_mode(3, "sin"), monomial_function(0, 0)};
    const std::vector<Complex> pts{Complex(0.2, 0.1), Complex(-0.6, 0.5), Complex(1.08, 0.02), Complex(0.0, -1.12),
                                   Complex(0.75, 0.75)};
    for (const TestFunction& f : fs)
        for (const Complex z : pts) {
            CAPTURE(f.label());
            CAPTURE(z);
            const double h = 1e-5;
            const auto [gx, gy] = f.gradient(z);
            const Complex fx = (f.value(z + h) - f.value(z - h)) / (2 * h);
            const Complex fy = (f.value(z + Complex(0, h)) - f.value(z - Complex(0, h))) / (2 * h);
            const double scale = std::max({std::abs(gx), std::abs(gy), 1.0});
            CHECK(std::abs(fx - gx) <= 1e-4 * scale);
            CHECK(std::abs(fy - gy) <= 1e-4 * scale);
            const double hl = 1e-4;
            const Complex lap = (f.value(z + hl) + f.value(z - hl) + f.value(z + Complex(0, hl)) +
                                 f.value(z - Complex(0, hl)) - 4.0 * f.value(z)) /
                                (hl * hl);
            CHECK(std::abs(lap - f.laplacian(z)) <= 1e-4 * std::max(std::abs(f.laplacian(z)), 1.0));
        }
    for (const TestFunction& f : fs) CHECK(f.value(Complex(0.0, 1.16)) == Complex(0.0));
    CHECK(make_test_function({"monomial", {{"k", 1}, {"l", 1}}, "exp"}).label() == monomial_function(1, 1).label());
    CHECK_THROWS_AS(make_test_function({"nope", {}, "exp"}), InvalidParameter);
    CHECK_THROWS_AS(make_test_function({"monomial", {{"k", 1.5}}, "exp"}), InvalidParameter);
}
