#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/spectral.hpp"

using namespace rmtlab;

namespace {

CMatrix hermitisation(const CMatrix& x, Complex z) {
    const auto n = x.rows();
    CMatrix y = x;
    y.diagonal().array() -= z;
    CMatrix h = CMatrix::Zero(2 * n, 2 * n);
    h.topRightCorner(n, n) = y;
    h.bottomLeftCorner(n, n) = y.adjoint();
    return h;
}

CVector lifted(const HermitizedSpectrum& s, std::size_t i, int sign) {
    const auto n = static_cast<Eigen::Index>(s.n);
    CVector w(2 * n);
    w.head(n) = s.left_vectors->col(static_cast<Eigen::Index>(i));
    w.tail(n) = double(sign) * s.right_vectors->col(static_cast<Eigen::Index>(i));
    return w / std::sqrt(2.0);
}

HermitizedSpectrum spec_from_lambdas(std::vector<double> l) {
    HermitizedSpectrum s;
    s.n = l.size();
    s.lambdas = std::move(l);
    return s;
}

} // namespace

TEST_CASE("scalar decompositions") {
    CMatrix x(1, 1);
    x(0, 0) = 2.0;
    const HermitizedSpectrum s = hermitized_spectrum(x, 0.0, true);
    REQUIRE(s.lambdas.size() == 1);
    CHECK(s.lambdas[0] == doctest::Approx(2.0));
    CHECK(std::abs((*s.left_vectors)(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs((*s.left_vectors)(0, 0) - (*s.right_vectors)(0, 0)) < 1e-15);
    CHECK(hermitized_spectrum(x, 2.0, false).lambdas[0] == 0.0);
    CHECK_FALSE(hermitized_spectrum(x, 2.0, false).has_vectors());
}

TEST_CASE("frames diagonalise the explicit 16 x 16 hermitisation") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 8, 5);
    const Complex z{0.3, 0.1};
    const HermitizedSpectrum s = hermitized_spectrum(x, z, true);
    const CMatrix h = hermitisation(x.entries, z);
    for (std::size_t i = 1; i < s.n; ++i) CHECK(s.lambdas[i - 1] <= s.lambdas[i]);
    for (std::size_t i = 0; i < s.n; ++i)
        for (int sign : {1, -1}) {
            const CVector w = lifted(s, i, sign);
            CHECK((h * w - sign * s.lambdas[i] * w).norm() < 1e-10);
            CHECK(w.head(8).squaredNorm() == doctest::Approx(0.5).epsilon(1e-12));
        }
    const CMatrix& u = *s.left_vectors;
    const CMatrix& v = *s.right_vectors;
    CHECK((u.adjoint() * u - CMatrix::Identity(8, 8)).norm() < 1e-10);
    CHECK((v.adjoint() * v - CMatrix::Identity(8, 8)).norm() < 1e-10);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const auto signed_list = s.signed_eigenvalues();
    for (Eigen::Index k = 0; k < 16; ++k) CHECK(std::abs(es.eigenvalues()(k) - signed_list[static_cast<std::size_t>(k)]) < 1e-10);
}

TEST_CASE("svd residual bound for a larger sample") {
    const MatrixSample x = sample_matrix(EntryDistribution::four_phase(), 200, 9);
    const Complex z{-0.4, 0.7};
    const HermitizedSpectrum s = hermitized_spectrum(x, z, true);
    CMatrix y = x.entries;
    y.diagonal().array() -= z;
    const double norm = s.lambdas.back();
    for (std::size_t i = 0; i < s.n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        CHECK((y * s.right_vectors->col(ii) - s.lambdas[i] * s.left_vectors->col(ii)).norm() <= 1e-10 * norm);
    }
}

TEST_CASE("non-Hermitian eigenvalues") {
    CMatrix t(3, 3);
    t << 1.0, 2.0, 3.0, 0.0, Complex(0, 2), 4.0, 0.0, 0.0, -1.5;
    auto sig = nonhermitian_eigenvalues(t).sigmas;
    std::vector<Complex> want{1.0, Complex(0, 2), -1.5};
    for (const auto& w : want) {
        double best = 1e9;
        for (const auto& s : sig) best = std::min(best, std::abs(s - w));
        CHECK(best < 1e-12);
    }
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = kI;
    sig = nonhermitian_eigenvalues(d).sigmas;
    CHECK(std::min(std::abs(sig[0] - 1.0), std::abs(sig[1] - 1.0)) < 1e-14);
    CHECK(std::min(std::abs(sig[0] - kI), std::abs(sig[1] - kI)) < 1e-14);

    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 128, 2);
    const auto ns = nonhermitian_eigenvalues(x);
    Complex sum{};
    for (const auto& s : ns.sigmas) sum += s;
    const double xnorm = x.entries.norm();
    CHECK(std::abs(sum - x.entries.trace()) <= 1e-8 * 128 * xnorm);
}

TEST_CASE("resolvent trace") {
    CHECK(std::abs(resolvent_trace(spec_from_lambdas({1.0}), 1.0) - Complex(0, 0.5)) < 1e-15);
    const Complex v = resolvent_trace(spec_from_lambdas({1.0, 3.0}), 2.0);
    CHECK(v.real() == 0.0);
    CHECK(v.imag() == doctest::Approx(0.2 + 1.0 / 13.0));
    CHECK_THROWS_AS(resolvent_trace(spec_from_lambdas({1.0}), 0.0), InvalidParameter);

    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 32, 1);
    const HermitizedSpectrum s = hermitized_spectrum(x, 0.2, false);
    const double big = 1e6;
    CHECK(resolvent_trace(s, big).imag() * big == doctest::Approx(1.0).epsilon(1e-9));
    double prev = resolvent_trace(s, s.lambdas.back()).imag();
    for (double eta = s.lambdas.back() * 1.1; eta < 100.0; eta *= 1.3) {
        const double cur = resolvent_trace(s, eta).imag();
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("closed-form eta integral") {
    CHECK(eta_integral_closed_form(spec_from_lambdas({1.0}), 0.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(eta_integral_closed_form(spec_from_lambdas({1.0}), 0.0, 1e-300) < 1e-300);
    CHECK_THROWS_AS(eta_integral_closed_form(spec_from_lambdas({1.0}), -1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(eta_integral_closed_form(spec_from_lambdas({1.0}), 1.0, 1.0), InvalidParameter);

    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 16, 4);
    const HermitizedSpectrum s = hermitized_spectrum(x, Complex(0.1, -0.3), false);
    const double n2 = 2.0 * static_cast<double>(s.n);
    const double numeric = quad::adaptive([&](double eta) { return n2 * resolvent_trace(s, eta).imag(); }, 0.05, 3.0,
                                          1e-13, 1e-13);
    CHECK(std::abs(numeric - eta_integral_closed_form(s, 0.05, 3.0)) < 1e-8);
}

TEST_CASE("trace of Im G products against a dense oracle") {
    CMatrix one(1, 1);
    one(0, 0) = 1.0;
    const HermitizedSpectrum s1 = hermitized_spectrum(one, 0.0, true);
    CHECK(trace_im_product(s1, s1, 1.0, 1.0) == doctest::Approx(0.5));

    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 6, 21);
    const Complex za{0.1, 0.2}, zb{-0.5, 0.3};
    const double e1 = 0.3, e2 = 0.7;
    const HermitizedSpectrum a = hermitized_spectrum(x, za, true);
    const HermitizedSpectrum b = hermitized_spectrum(x, zb, true);
    auto im_g = [](const CMatrix& h, double eta) {
        const CMatrix g = (h - Complex(0, eta) * CMatrix::Identity(h.rows(), h.cols())).inverse();
        return CMatrix((g - g.adjoint()) / Complex(0, 2));
    };
    const CMatrix ia = im_g(hermitisation(x.entries, za), e1);
    const CMatrix ib = im_g(hermitisation(x.entries, zb), e2);
    const double dense = (ia * ib).trace().real();
    CHECK(trace_im_product(a, b, e1, e2) == doctest::Approx(dense).epsilon(1e-10));
    CHECK(trace_im_product(a, b, e1, e2) == doctest::Approx(trace_im_product(b, a, e2, e1)).epsilon(1e-12));
    CHECK(trace_im_product(a, b, 1e5, 2e5) * 1e5 * 2e5 == doctest::Approx(12.0).epsilon(1e-6));
    CHECK_THROWS_AS(trace_im_product(hermitized_spectrum(x, za, false), b, e1, e2), PreconditionError);
}

TEST_CASE("eigenvector overlap kernel") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 12, 31);
    const HermitizedSpectrum a = hermitized_spectrum(x, 0.0, true);
    const HermitizedSpectrum b = hermitized_spectrum(x, 0.8, true);
    for (std::size_t i = 1; i <= 12; ++i) {
        CHECK(eigenvector_overlap(a, a, i, i) == doctest::Approx(1.0).epsilon(1e-12));
        if (i > 1) CHECK(std::abs(eigenvector_overlap(a, a, i, i - 1)) < 1e-12);
    }
    CHECK_THROWS_AS(eigenvector_overlap(a, b, 0, 1), InvalidParameter);
    CHECK_THROWS_AS(eigenvector_overlap(a, b, 1, 13), InvalidParameter);
    const Eigen::MatrixXd full = overlap_matrix(a, b, 12);
    for (std::size_t i = 1; i <= 12; ++i)
        for (std::size_t j = 1; j <= 12; ++j) {
            const double v = eigenvector_overlap(a, b, i, j);
            CHECK(std::abs(v) <= 1.0 + 1e-12);
            CHECK(v == doctest::Approx(full(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1))));
        }

    // Rotating each singular pair (u_i, v_i) by a common phase leaves the kernel unchanged.
    HermitizedSpectrum rotated = b;
    for (Eigen::Index i = 0; i < 12; ++i) {
        const Complex ph = std::polar(1.0, 0.7 * double(i) + 0.3);
        rotated.left_vectors->col(i) *= ph;
        rotated.right_vectors->col(i) *= ph;
    }
    CHECK((overlap_matrix(a, rotated, 12) - full).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-resolvent trace against a dense oracle") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 5, 77);
    const Complex z1{0.2, -0.1}, z2{0.6, 0.4};
    const Complex w1{0.1, 0.4}, w2{-0.2, -0.3};
    const BlockScalar b{Complex(1, 0.5), Complex(-0.3, 0), Complex(0.2, 0.1), Complex(0.7, -0.2)};
    const CMatrix h1 = hermitisation(x.entries, z1), h2 = hermitisation(x.entries, z2);
    const CMatrix id = CMatrix::Identity(10, 10);
    const CMatrix g1 = (h1 - w1 * id).inverse(), g2 = (h2 - w2 * id).inverse();
    CMatrix bm = CMatrix::Zero(10, 10);
    bm.topLeftCorner(5, 5) = b.b11 * CMatrix::Identity(5, 5);
    bm.topRightCorner(5, 5) = b.b12 * CMatrix::Identity(5, 5);
    bm.bottomLeftCorner(5, 5) = b.b21 * CMatrix::Identity(5, 5);
    bm.bottomRightCorner(5, 5) = b.b22 * CMatrix::Identity(5, 5);
    const Complex dense = (g1 * bm * g2).trace() / 10.0;
    const Complex fast = two_resolvent_trace(hermitized_spectrum(x, z1, true), hermitized_spectrum(x, z2, true), w1, w2, b);
    CHECK(std::abs(fast - dense) < 1e-11 * std::abs(dense));
}
