#include "rmtlab/dbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"

namespace rmtlab {

namespace {

// Smallest of lambda_1 and the consecutive gaps; nonpositive means invalid.
double min_gap(const std::vector<double>& p) {
    if (p.empty()) return std::numeric_limits<double>::infinity();
    double g = p[0];
    for (std::size_t i = 1; i < p.size(); ++i) g = std::min(g, p[i] - p[i - 1]);
    return g;
}

void check_points(const std::vector<double>& p) {
    if (!(min_gap(p) > 0.0)) {
        std::ostringstream msg;
        msg << "dbm: points are not strictly increasing and positive (min gap " << min_gap(p) << ")";
        throw CollisionError(msg.str());
    }
}

} // namespace

std::vector<double> dbm_drift(const std::vector<double>& points, std::size_t n) {
    check_points(points);
    const std::size_t k = points.size();
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double li = points[i];
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            s += 1.0 / (li - points[j]) + 1.0 / (li + points[j]);
        }
        s += 1.0 / (2.0 * li);
        d[i] = s / (2.0 * static_cast<double>(n));
    }
    return d;
}

std::vector<double> dbm_drift_pairwise(const std::vector<double>& points, std::size_t n) {
    check_points(points);
    const std::size_t k = points.size();
    const double nn = static_cast<double>(n);
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double li = points[i];
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            s += 2.0 * li / ((li - points[j]) * (li + points[j]));
        }
        d[i] = s / (2.0 * nn) + 1.0 / (4.0 * nn * li);
    }
    return d;
}

namespace {

struct Stepper {
    std::size_t n;
    const BridgeSource& bridge;
    CounterRng rng;
    std::size_t max_depth;

    std::vector<double> advance(const std::vector<double>& p, const std::vector<double>& dw, double h,
                                std::size_t depth, std::uint64_t node) const {
        const std::vector<double> drift = dbm_drift(p, n);
        const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
        std::vector<double> next(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) next[i] = p[i] + dw[i] * scale + drift[i] * h;
        if (min_gap(next) > 0.0) return next;
        if (depth >= max_depth) {
            std::ostringstream msg;
            msg << "dbm_step: sub-step cap exhausted at step " << bridge.step << " (offending gap " << min_gap(next)
                << ", sub-step " << h << ")";
            throw StepFailure(msg.str());
        }
        // Brownian bridge: W(h/2) | W(h) = dw  ~  N(dw / 2, h / 4).
        std::vector<double> first(p.size()), second(p.size());
        const double sd = std::sqrt(h / 4.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double xi = rng.normal_pair(node * n + i)[0];
            first[i] = 0.5 * dw[i] + sd * xi;
            second[i] = dw[i] - first[i];
        }
        const std::vector<double> mid = advance(p, first, 0.5 * h, depth + 1, 2 * node);
        return advance(mid, second, 0.5 * h, depth + 1, 2 * node + 1);
    }
};

} // namespace

DbmState dbm_step(const DbmState& state, const std::vector<double>& increments, double dt,
                  const BridgeSource& bridge, const StepOptions& opts) {
    if (!(dt > 0.0)) throw InvalidParameter("dbm_step: dt must be positive");
    if (increments.size() != state.points.size()) throw PreconditionError("dbm_step: increment count mismatch");
    std::size_t depth = 0;
    while ((std::size_t{1} << (depth + 1)) <= opts.substep_cap && depth < 60) ++depth;
    const Stepper stepper{state.n, bridge, bridge.rng.substream(bridge.step), depth};
    DbmState out;
    out.n = state.n;
    out.time = state.time + dt;
    out.points = stepper.advance(state.points, increments, dt, 0, 1);
    return out;
}

CMatrix matrix_increment(std::size_t n, double dt, const CounterRng& rng, std::uint64_t step) {
    const CounterRng s = rng.substream(step);
    const auto nn = static_cast<Eigen::Index>(n);
    CMatrix db(nn, nn);
    const double sd = std::sqrt(dt);
    for (Eigen::Index a = 0; a < nn; ++a)
        for (Eigen::Index b = 0; b < nn; ++b)
            db(a, b) = sd * s.complex_normal(static_cast<std::uint64_t>(a) * n + static_cast<std::uint64_t>(b));
    return db;
}

CMatrix matrix_flow_step(const CMatrix& x, const CMatrix& db) {
    return x + db / std::sqrt(static_cast<double>(x.rows()));
}

CMatrix matrix_flow_step(const CMatrix& x, double dt, const CounterRng& rng, std::uint64_t step) {
    if (dt == 0.0) return x;
    if (dt < 0.0) throw InvalidParameter("matrix_flow_step: dt must be nonnegative");
    return matrix_flow_step(x, matrix_increment(static_cast<std::size_t>(x.rows()), dt, rng, step));
}

std::vector<std::vector<double>> extract_driver_increments(const CMatrix& db,
                                                           const std::vector<HermitizedSpectrum>& specs) {
    std::vector<std::vector<double>> out;
    out.reserve(specs.size());
    for (const auto& s : specs) {
        if (!s.has_vectors()) throw PreconditionError("extract_driver_increments: spectrum has no singular vectors");
        const CMatrix& u = *s.left_vectors;
        const CMatrix& v = *s.right_vectors;
        const CMatrix dbv = db * v;
        std::vector<double> inc(s.n);
        for (std::size_t i = 0; i < s.n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            // B_ii = (1/2) uhat_i^* dB vhat_i; sqrt 2 (B_ii + conj B_ii) = sqrt 2 Re(uhat^* dB vhat)
            const Complex full = u.col(ii).dot(dbv.col(ii));
            inc[i] = std::sqrt(2.0) * full.real();
        }
        out.push_back(std::move(inc));
    }
    return out;
}

DriverMode driver_mode_from_name(const std::string& name) {
    if (name == "independent") return DriverMode::independent;
    if (name == "coupled_below_K" || name == "coupled") return DriverMode::coupled_below_K;
    if (name == "overlap_correlated" || name == "overlap") return DriverMode::overlap_correlated;
    if (name == "matrix_flow") return DriverMode::matrix_flow;
    throw InvalidParameter("unknown driver mode '" + name + "'");
}

std::string driver_mode_name(DriverMode mode) {
    switch (mode) {
    case DriverMode::independent: return "independent";
    case DriverMode::coupled_below_K: return "coupled_below_K";
    case DriverMode::overlap_correlated: return "overlap_correlated";
    case DriverMode::matrix_flow: return "matrix_flow";
    }
    return "unknown";
}

Trajectories run_coupled(const DbmConfig& cfg, const std::vector<DbmState>& initial, const DriverSpec& driver,
                         const std::optional<MatrixFlowSetup>& setup) {
    if (!(cfg.dt > 0.0) || !(cfg.t_final >= cfg.dt)) throw InvalidParameter("run_coupled: need dt > 0 and t_final >= dt");
    if (cfg.record_every == 0) throw InvalidParameter("run_coupled: record_every must be positive");
    const bool needs_matrix =
        driver.mode == DriverMode::matrix_flow || driver.mode == DriverMode::overlap_correlated;
    if (needs_matrix && !setup) throw PreconditionError("run_coupled: mode requires a matrix setup");

    std::vector<DbmState> states = initial;
    if (states.empty()) {
        if (!setup) throw PreconditionError("run_coupled: no initial states");
        for (Complex z : setup->zs) {
            const HermitizedSpectrum s = hermitized_spectrum(setup->x0, z, false);
            states.push_back({0.0, s.lambdas, s.n});
        }
    }
    const std::size_t procs = states.size();
    const std::size_t n = cfg.n != 0 ? cfg.n : states.front().n;
    for (const auto& s : states)
        if (s.points.size() != n || s.n != n) throw PreconditionError("run_coupled: inconsistent dimensions");
    if (setup && setup->zs.size() != procs) throw PreconditionError("run_coupled: one shift per process required");
    if (driver.mode == DriverMode::coupled_below_K && driver.K > n)
        throw InvalidParameter("run_coupled: K exceeds n");

    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
    const double sd = std::sqrt(cfg.dt);
    const CounterRng shared(driver.seed, 0);
    std::vector<CounterRng> own;
    std::vector<BridgeSource> bridges;
    for (std::size_t p = 0; p < procs; ++p) {
        own.emplace_back(driver.seed, 1 + p);
        bridges.push_back({CounterRng(driver.seed, 1000003 + p), 0});
    }

    // Frozen Gaussian coupling from initial overlaps.
    Eigen::MatrixXd factor;
    if (driver.mode == DriverMode::overlap_correlated) {
        std::vector<HermitizedSpectrum> specs;
        for (Complex z : setup->zs) specs.push_back(hermitized_spectrum(setup->x0, z, true));
        const auto dim = static_cast<Eigen::Index>(procs * n);
        Eigen::MatrixXd cov(dim, dim);
        for (std::size_t l = 0; l < procs; ++l)
            for (std::size_t m = 0; m < procs; ++m)
                cov.block(static_cast<Eigen::Index>(l * n), static_cast<Eigen::Index>(m * n),
                          static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
                    overlap_matrix(specs[l], specs[m], n);
        cov = 0.5 * (cov + cov.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        factor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    Trajectories tr;
    CMatrix x;
    if (driver.mode == DriverMode::matrix_flow) x = setup->x0;
    auto record = [&](double t) {
        tr.times.push_back(t);
        std::vector<std::vector<double>> snap;
        for (const auto& s : states) snap.push_back(s.points);
        tr.records.push_back(std::move(snap));
        if (driver.mode == DriverMode::matrix_flow) {
            std::vector<std::vector<double>> truth;
            for (Complex z : setup->zs) truth.push_back(hermitized_spectrum(x, z, false).lambdas);
            tr.truth.push_back(std::move(truth));
        }
    };
    record(0.0);

    const CounterRng flow_rng(driver.seed, 0x7f10ULL);
    for (std::size_t step = 0; step < steps; ++step) {
        std::vector<std::vector<double>> inc(procs, std::vector<double>(n));
        switch (driver.mode) {
        case DriverMode::independent:
        case DriverMode::coupled_below_K: {
            const std::size_t k = driver.mode == DriverMode::coupled_below_K ? driver.K : 0;
            for (std::size_t p = 0; p < procs; ++p)
                for (std::size_t i = 0; i < n; ++i) {
                    const CounterRng& src = i < k ? shared : own[p];
                    inc[p][i] = sd * src.normal_pair(static_cast<std::uint64_t>(step) * n + i)[0];
                }
            break;
        }
        case DriverMode::overlap_correlated: {
            const auto dim = static_cast<Eigen::Index>(procs * n);
            Eigen::VectorXd xi(dim);
            for (Eigen::Index a = 0; a < dim; ++a)
                xi(a) = shared.normal_pair(static_cast<std::uint64_t>(step) * procs * n + static_cast<std::uint64_t>(a))[0];
            const Eigen::VectorXd g = factor * xi;
            for (std::size_t p = 0; p < procs; ++p)
                for (std::size_t i = 0; i < n; ++i) inc[p][i] = sd * g(static_cast<Eigen::Index>(p * n + i));
            break;
        }
        case DriverMode::matrix_flow: {
            std::vector<HermitizedSpectrum> specs;
            for (Complex z : setup->zs) specs.push_back(hermitized_spectrum(x, z, true));
            const CMatrix db = matrix_increment(n, cfg.dt, flow_rng, step);
            inc = extract_driver_increments(db, specs);
            x = matrix_flow_step(x, db);
            break;
        }
        }
        for (std::size_t p = 0; p < procs; ++p) {
            bridges[p].step = step;
            states[p] = dbm_step(states[p], inc[p], cfg.dt, bridges[p], {cfg.substep_cap});
            states[p].time = static_cast<double>(step + 1) * cfg.dt;
        }
        if ((step + 1) % cfg.record_every == 0 || step + 1 == steps) record(states.front().time);
    }
    tr.final_states = states;
    tr.steps = steps;
    return tr;
}

double independence_statistic(const HermitizedSpectrum& spec, double eta, double omega_hat) {
    if (!(eta > 0.0)) throw InvalidParameter("independence_statistic: eta must be positive");
    const double n = static_cast<double>(spec.n);
    const double cutoff = std::floor(std::pow(n, omega_hat) * (1.0 + 1e-12));
    if (cutoff > n) throw InvalidParameter("independence_statistic: cutoff n^omega_hat exceeds n");
    const auto k = static_cast<std::size_t>(std::max(cutoff, 0.0));
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double l = spec.lambdas[i];
        s += eta / (l * l + eta * eta);
    }
    return 2.0 * s / n;
}

bool eta_in_mesoscopic_window(std::size_t n, double eta, double delta0, double delta1) {
    const double nn = static_cast<double>(n);
    return eta >= std::pow(nn, -1.0 - delta0) && eta <= std::pow(nn, -1.0 + delta1);
}

} // namespace rmtlab
