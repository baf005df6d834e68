#include <doctest.h>

#include <cmath>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/girko.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/test_functions.hpp"

using namespace rmtlab;

TEST_CASE("reconstruction of a Gaussian bump statistic at n = 64") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 64, 3);
    const TestFunction f = gaussian_bump(0.4, Complex(0.2, -0.1));
    const GirkoReport r = girko_reconstruct(x, f);
    CHECK(r.relative_error() <= 1e-3);
    CHECK(r.eta0 < r.etac);
    CHECK(r.etac < r.T);
    CHECK(r.eta0 == doctest::Approx(std::pow(64.0, -1.1)));
    CHECK(std::abs(r.reconstructed - r.regimes.sum()) <= 1e-12 * std::abs(r.reconstructed));
    CHECK(std::abs(r.direct - eigenvalue_sum(nonhermitian_eigenvalues(x).sigmas, f)) < 1e-12);
}

TEST_CASE("zero and harmonic test functions") {
    const MatrixSample x = sample_matrix(EntryDistribution::four_phase(), 32, 8);
    const GirkoReport zero = girko_reconstruct(x, zero_function());
    CHECK(zero.reconstructed == Complex(0.0));
    CHECK(zero.direct == Complex(0.0));

    // Delta z vanishes inside the cutoff radius, so only the annulus contributes.
    const GirkoReport lin = girko_reconstruct(x, monomial_function(1, 0, {1.3, 1.5}));
    CHECK(std::abs(lin.reconstructed - lin.direct) <= 1e-3 * std::max(1.0, std::abs(lin.direct)));
}

TEST_CASE("regime split is additive and T-stable") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 32, 19);
    const TestFunction f = gaussian_bump(0.5);
    GirkoConfig cfg;
    cfg.zgrid = {64, 128, 0.0, {}};
    const RegimeContributions reg = regime_decomposition(x, f, cfg);
    const GirkoReport rep = girko_reconstruct(x, f, cfg);
    CHECK(std::abs(reg.sum() - rep.reconstructed) <= 1e-12 * std::abs(rep.reconstructed));
    GirkoConfig doubled = cfg;
    doubled.T *= 2.0;
    const GirkoReport rep2 = girko_reconstruct(x, f, doubled);
    CHECK(std::abs(rep2.reconstructed - rep.reconstructed) <= 1e-6 * std::abs(rep.reconstructed));

    GirkoConfig bad = cfg;
    bad.delta1 = -0.2;
    CHECK_THROWS_AS(girko_reconstruct(x, f, bad), InvalidParameter);
}
