#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "rmtlab/dbm.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

using namespace rmtlab;

namespace {

std::vector<double> rk4_step(const std::vector<double>& y, std::size_t n, double h) {
    auto add = [](const std::vector<double>& a, const std::vector<double>& b, double s) {
        std::vector<double> out(a);
        for (std::size_t i = 0; i < a.size(); ++i) out[i] += s * b[i];
        return out;
    };
    const auto k1 = dbm_drift(y, n);
    const auto k2 = dbm_drift(add(y, k1, h / 2), n);
    const auto k3 = dbm_drift(add(y, k2, h / 2), n);
    const auto k4 = dbm_drift(add(y, k3, h), n);
    std::vector<double> out(y);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i] / n;
        mb += b[i] / n;
    }
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("drift examples") {
    CHECK(dbm_drift({0.5}, 1)[0] == doctest::Approx(0.5));
    CHECK(dbm_drift({1.0, 2.0}, 2)[0] == doctest::Approx(-1.0 / 24.0));
    CHECK(dbm_drift({1.0, 2.0}, 2)[1] == doctest::Approx(0.25 * (1.0 + 1.0 / 3.0 + 0.25)));
    CHECK_THROWS_AS(dbm_drift({1.0, 1.0}, 2), CollisionError);
    CHECK_THROWS_AS(dbm_drift({-0.1, 1.0}, 2), CollisionError);
    CHECK_THROWS_AS(dbm_drift({2.0, 1.0}, 2), CollisionError);

    // Signed form evaluated literally over all 2n points, including the mirror -l_i.
    CounterRng rng(derive_seed(5, 5));
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + rep;
        std::vector<double> pts(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += 0.05 + rng.uniform(rep * 100 + i);
            pts[i] = acc;
        }
        const auto d = dbm_drift(pts, n);
        const auto dp = dbm_drift_pairwise(pts, n);
        for (std::size_t i = 0; i < n; ++i) {
            double signed_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) signed_sum += 1.0 / (pts[i] - pts[j]);
                signed_sum += 1.0 / (pts[i] + pts[j]);
            }
            CHECK(std::abs(d[i] - signed_sum / (2.0 * n)) <= 1e-12 * (1.0 + std::abs(d[i])));
            CHECK(std::abs(d[i] - dp[i]) <= 1e-12 * (1.0 + std::abs(d[i])));
        }
    }
    // n = 1: the Bessel-type term 1/(4 n l).
    CHECK(dbm_drift({0.3}, 1)[0] == doctest::Approx(1.0 / (4.0 * 0.3)).epsilon(1e-14));
}

TEST_CASE("zero-noise step against an RK4 reference") {
    const DbmState s{0.0, {1.0, 2.0}, 2};
    const BridgeSource bridge{CounterRng(1), 0};
    const double dt = 1e-3;
    const DbmState e = dbm_step(s, {0.0, 0.0}, dt, bridge);
    std::vector<double> ref = s.points;
    for (int k = 0; k < 100; ++k) ref = rk4_step(ref, 2, dt / 100);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(e.points[i] - ref[i]) < 1e-6);

    const DbmState h1 = dbm_step(s, {0.0, 0.0}, dt / 2, bridge);
    const DbmState h2 = dbm_step(h1, {0.0, 0.0}, dt / 2, bridge);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(h2.points[i] - e.points[i]) < 10 * dt * dt);
    CHECK_THROWS_AS(dbm_step(s, {0.0}, dt, bridge), PreconditionError);
    CHECK_THROWS_AS(dbm_step(s, {0.0, 0.0}, 0.0, bridge), InvalidParameter);
}

TEST_CASE("noisy steps halve to preserve ordering") {
    const DbmState s{0.0, {0.01, 0.011}, 2};
    const BridgeSource bridge{CounterRng(2), 0};
    const DbmState out = dbm_step(s, {0.03, -0.03}, 1e-3, bridge);
    CHECK(out.points[0] > 0.0);
    CHECK(out.points[0] < out.points[1]);
    StepOptions tight;
    tight.substep_cap = 1;
    CHECK_THROWS_AS(dbm_step(s, {0.03, -0.03}, 1e-3, bridge, tight), StepFailure);
}

TEST_CASE("ordering over 1e5 steps at n = 64") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 64, 40);
    DbmConfig cfg;
    cfg.n = 64;
    cfg.dt = 1e-6;
    cfg.t_final = 0.1;
    cfg.record_every = 10000;
    const Trajectories tr = run_coupled(cfg, {}, {DriverMode::independent, 0, 17}, MatrixFlowSetup{x.entries, {0.0}});
    CHECK(tr.steps == 100000);
    for (const auto& rec : tr.records) {
        const auto& p = rec[0];
        CHECK(p.front() > 0.0);
        for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i - 1] < p[i]);
    }
}

TEST_CASE("matrix flow increments") {
    const std::size_t n = 1000;
    const double dt = 1e-3;
    const CMatrix x = CMatrix::Zero(n, n);
    const CounterRng rng(99);
    const CMatrix d = matrix_flow_step(x, dt, rng, 0) - x;
    const double var = d.squaredNorm() / double(n * n);
    double fourth = 0.0;
    for (Eigen::Index a = 0; a < d.size(); ++a) fourth += std::pow(std::norm(d.data()[a]), 2);
    const double se = std::sqrt((fourth / double(n * n) - var * var) / double(n * n));
    CHECK(std::abs(var - dt / n) <= 5 * se);
    CHECK(matrix_flow_step(x, 0.0, rng, 0) == x);
    CHECK_THROWS_AS(matrix_flow_step(x, -1.0, rng, 0), InvalidParameter);

    // Two half steps: sum of two independent increments of variance dt/2 has variance dt,
    // and successive increments are uncorrelated.
    const std::size_t m = 400;
    const CMatrix a = matrix_increment(m, dt / 2, rng, 1), b = matrix_increment(m, dt / 2, rng, 2);
    const double cnt = double(m * m);
    const double v = (a + b).squaredNorm() / cnt;
    CHECK(std::abs(v - dt) <= 5 * dt * std::sqrt(1.0 / cnt));
    const Complex cov = (a.array() * b.array().conjugate()).sum() / cnt;
    CHECK(std::abs(cov) <= 5 * (dt / 2) * std::sqrt(2.0 / cnt));
}

TEST_CASE("driver increments reproduce the overlap covariance") {
    const std::size_t n = 12;
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), n, 61);
    const std::vector<HermitizedSpectrum> specs{hermitized_spectrum(x, 0.0, true), hermitized_spectrum(x, 0.3, true)};
    const Eigen::MatrixXd theta01 = overlap_matrix(specs[0], specs[1], n);
    const double dt = 0.01;
    const std::size_t reps = 6000;
    const CounterRng rng(123);
    Eigen::MatrixXd c00 = Eigen::MatrixXd::Zero(n, n), c01 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd m00 = Eigen::MatrixXd::Zero(n, n), m01 = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto inc = extract_driver_increments(matrix_increment(n, dt, rng, r), specs);
        const Eigen::Map<const Eigen::VectorXd> b0(inc[0].data(), Eigen::Index(n)), b1(inc[1].data(), Eigen::Index(n));
        c00 += b0 * b0.transpose();
        c01 += b0 * b1.transpose();
        m00 += (b0 * b0.transpose()).cwiseAbs2();
        m01 += (b0 * b1.transpose()).cwiseAbs2();
    }
    c00 /= double(reps);
    c01 /= double(reps);
    m00 /= double(reps);
    m01 /= double(reps);
    for (Eigen::Index i = 0; i < Eigen::Index(n); ++i)
        for (Eigen::Index j = 0; j < Eigen::Index(n); ++j) {
            const double se00 = std::sqrt((m00(i, j) - c00(i, j) * c00(i, j)) / double(reps));
            const double se01 = std::sqrt((m01(i, j) - c01(i, j) * c01(i, j)) / double(reps));
            CHECK(std::abs(c00(i, j) - (i == j ? dt : 0.0)) <= 5 * se00);
            CHECK(std::abs(c01(i, j) - theta01(i, j) * dt) <= 5 * se01);
        }
    CHECK_THROWS_AS(extract_driver_increments(matrix_increment(n, dt, rng, 0), {hermitized_spectrum(x, 0.0, false)}),
                    PreconditionError);
}

TEST_CASE("point process follows the matrix flow") {
    const std::size_t n = 32;
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), n, 7);
    DbmConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-5;
    cfg.t_final = 0.01;
    cfg.record_every = 100;
    const Trajectories tr = run_coupled(cfg, {}, {DriverMode::matrix_flow, 0, 3}, MatrixFlowSetup{x.entries, {0.0, 0.4}});
    REQUIRE(tr.truth.size() == tr.records.size());
    CHECK(tr.times.back() == doctest::Approx(0.01));
    double worst = 0.0;
    for (std::size_t r = 0; r < tr.records.size(); ++r)
        for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t i = 0; i < 8; ++i)
                worst = std::max(worst, std::abs(tr.records[r][p][i] - tr.truth[r][p][i]));
    CHECK(worst <= 1e-3);
}

TEST_CASE("coupled and independent drivers") {
    const std::size_t n = 16;
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), n, 70);
    const std::vector<double> init = hermitized_spectrum(x, 0.0, false).lambdas;
    DbmConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-5;
    cfg.t_final = 10 * cfg.dt;
    const Trajectories tr = run_coupled(cfg, {{0.0, init, n}, {0.0, init, n}}, {DriverMode::coupled_below_K, 4, 1});
    const auto& a = tr.final_states[0].points;
    const auto& b = tr.final_states[1].points;
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6);
    bool differs = false;
    for (std::size_t i = 4; i < n; ++i) differs = differs || std::abs(a[i] - b[i]) > 1e-5;
    CHECK(differs);
    CHECK_THROWS_AS(run_coupled(cfg, {{0.0, init, n}}, {DriverMode::coupled_below_K, n + 1, 1}), InvalidParameter);
    CHECK_THROWS_AS(run_coupled(cfg, {{0.0, init, n}}, {DriverMode::matrix_flow, 0, 1}), PreconditionError);

    DbmConfig ind = cfg;
    ind.dt = 1e-4;
    ind.t_final = std::pow(double(n), -0.5);
    ind.record_every = 1000000;
    ind.substep_cap = std::size_t{1} << 20;
    std::vector<double> l1, l2;
    for (std::uint64_t rep = 0; rep < 500; ++rep) {
        const Trajectories t = run_coupled(ind, {{0.0, init, n}, {0.0, init, n}}, {DriverMode::independent, 0, 1000 + rep});
        l1.push_back(t.final_states[0].points[0]);
        l2.push_back(t.final_states[1].points[0]);
    }
    CHECK(std::abs(sample_correlation(l1, l2)) <= 0.1);
}

TEST_CASE("overlap-correlated driver matches overlaps at equal shifts") {
    const std::size_t n = 8;
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), n, 71);
    DbmConfig cfg;
    cfg.n = n;
    cfg.dt = 1e-5;
    cfg.t_final = 20 * cfg.dt;
    const Trajectories tr = run_coupled(cfg, {}, {DriverMode::overlap_correlated, 0, 9}, MatrixFlowSetup{x.entries, {0.2, 0.2}});
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(tr.final_states[0].points[i] - tr.final_states[1].points[i]) < 1e-9);
}

TEST_CASE("independence statistic") {
    const MatrixSample x = sample_matrix(EntryDistribution::ginibre(), 64, 12);
    const HermitizedSpectrum s = hermitized_spectrum(x, 0.3, false);
    const double eta = 1.0 / 64;
    CHECK(independence_statistic(s, eta, 1.0) == doctest::Approx((-2.0 * kI * resolvent_trace(s, eta)).real()).epsilon(1e-13));
    double prev = 0.0;
    for (double w = 0.0; w <= 1.0; w += 0.05) {
        const double v = independence_statistic(s, eta, w);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(independence_statistic(s, eta, 1.1), InvalidParameter);
    CHECK_THROWS_AS(independence_statistic(s, 0.0, 0.5), InvalidParameter);
    CHECK(eta_in_mesoscopic_window(512, 1.0 / 512));
    CHECK_FALSE(eta_in_mesoscopic_window(512, 0.5));
}

TEST_CASE("driver mode names") {
    for (auto m : {DriverMode::independent, DriverMode::coupled_below_K, DriverMode::overlap_correlated, DriverMode::matrix_flow})
        CHECK(driver_mode_from_name(driver_mode_name(m)) == m);
    CHECK_THROWS_AS(driver_mode_from_name("bogus"), InvalidParameter);
}
