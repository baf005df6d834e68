#include "rmtlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rmtlab/dbm.hpp"
#include "rmtlab/dyson.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/girko.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"

#ifndef RMTLAB_VERSION
#define RMTLAB_VERSION "0.0.0"
#endif

namespace rmtlab {

std::string code_version() { return RMTLAB_VERSION; }

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

Json RunManifest::to_json() const {
    return {{"experiment", experiment},
            {"config_hash", config_hash},
            {"config", config},
            {"base_seed", base_seed},
            {"seeds", seeds},
            {"code_version", code_version},
            {"wall_clock_seconds", wall_clock_seconds},
            {"threads", threads},
            {"flagged_replicas", flagged_replicas},
            {"failed_replicas", failed_replicas}};
}

RunManifest RunManifest::from_json(const Json& j) {
    RunManifest m;
    m.experiment = j.at("experiment").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config");
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.code_version = j.at("code_version").get<std::string>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    m.threads = j.at("threads").get<std::size_t>();
    m.flagged_replicas = j.at("flagged_replicas").get<std::vector<std::size_t>>();
    m.failed_replicas = j.at("failed_replicas").get<std::vector<std::size_t>>();
    return m;
}

RunManifest make_manifest(const ExperimentConfig& cfg) {
    RunManifest m;
    m.experiment = cfg.experiment;
    m.config = cfg.source;
    m.config_hash = config_hash(cfg.source);
    m.base_seed = cfg.base_seed;
    m.code_version = code_version();
    m.threads = thread_count();
    return m;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double z_score(double observed, double predicted, double se) {
    const double d = observed - predicted;
    if (se > 0.0) return d / se;
    return d == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d);
}

std::uint64_t size_seed(std::uint64_t base, std::size_t n) { return derive_seed(base, 0x6e000000ULL + n); }

} // namespace

CltRun run_clt_experiment(const ExperimentConfig& cfg) {
    const auto t0 = Clock::now();
    CltRun run;
    run.n = cfg.ns.front();
    run.distribution = cfg.distribution;
    run.manifest = make_manifest(cfg);

    std::vector<FunctionSpec> specs = cfg.functions;
    if (specs.empty()) specs.push_back({"monomial", {{"k", 1.0}, {"l", 0.0}}, "exp"});
    std::vector<TestFunction> fs;
    double inner = std::numeric_limits<double>::infinity();
    for (const auto& s : specs) {
        fs.push_back(make_test_function(s));
        run.labels.push_back(fs.back().label());
        auto it = s.params.find("inner");
        inner = std::min(inner, it == s.params.end() ? 1.05 : it->second);
    }

    const std::size_t reps = cfg.replicas;
    std::vector<std::vector<Complex>> sums(reps, std::vector<Complex>(fs.size()));
    std::vector<double> radius(reps, 0.0);
    std::vector<char> failed(reps, 0);
    run.manifest.seeds.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) run.manifest.seeds[r] = derive_seed(cfg.base_seed, r);

    parallel_for(reps, [&](std::size_t r) {
        const MatrixSample x = sample_matrix(cfg.distribution, run.n, run.manifest.seeds[r]);
        std::vector<Complex> sigmas;
        try {
            sigmas = nonhermitian_eigenvalues(x).sigmas;
        } catch (const NumericalBackendError&) {
            failed[r] = 1;
            return;
        }
        double rad = 0.0;
        for (const auto& s : sigmas) rad = std::max(rad, std::abs(s));
        radius[r] = rad;
        for (std::size_t k = 0; k < fs.size(); ++k) sums[r][k] = eigenvalue_sum(sigmas, fs[k]);
    });

    run.sums.assign(fs.size(), {});
    for (std::size_t r = 0; r < reps; ++r) {
        if (failed[r]) {
            run.manifest.failed_replicas.push_back(r);
            continue;
        }
        if (radius[r] > inner) run.manifest.flagged_replicas.push_back(r);
        run.spectral_radius.push_back(radius[r]);
        for (std::size_t k = 0; k < fs.size(); ++k) run.sums[k].push_back(sums[r][k]);
    }
    if (run.manifest.failed_replicas.size() * 100 > reps)
        throw NumericalBackendError("clt experiment: " + std::to_string(run.manifest.failed_replicas.size()) +
                                    " of " + std::to_string(reps) + " replicas failed");
    for (const auto& v : run.sums) run.stats.push_back(summarize_replicas(v));
    run.manifest.wall_clock_seconds = seconds_since(t0);
    return run;
}

TheoryPrediction predict(const TestFunction& f, double kappa4, std::size_t n, const QuadSpec& quad) {
    TheoryPrediction p;
    p.label = f.label();
    p.kappa4 = kappa4;
    p.variance = covariance_functional(f, f, kappa4, quad);
    p.second = covariance_functional(conjugate(f), f, kappa4, quad);
    p.expectation = expectation_correction(f, kappa4, n, quad);
    return p;
}

double ComparisonReport::max_abs_z() const {
    double m = 0.0;
    for (double z : {z_mean_re, z_mean_im, z_variance, z_second_re, z_second_im, z_kurtosis_re, z_kurtosis_im})
        m = std::max(m, std::abs(z));
    return m;
}

Json ComparisonReport::to_json() const {
    return {{"label", label},
            {"z_mean_re", z_mean_re},
            {"z_mean_im", z_mean_im},
            {"z_variance", z_variance},
            {"z_second_re", z_second_re},
            {"z_second_im", z_second_im},
            {"z_kurtosis_re", z_kurtosis_re},
            {"z_kurtosis_im", z_kurtosis_im},
            {"mean_observed", complex_to_json(mean_observed)},
            {"mean_predicted", complex_to_json(mean_predicted)},
            {"variance_observed", variance_observed},
            {"variance_predicted", variance_predicted},
            {"second_observed", complex_to_json(second_observed)},
            {"second_predicted", complex_to_json(second_predicted)},
            {"reliable", reliable}};
}

ComparisonReport compare_to_theory(const SummaryStats& s, const TheoryPrediction& p) {
    ComparisonReport r;
    r.label = p.label;
    r.reliable = s.reliable;
    r.mean_observed = s.mean.value;
    r.mean_predicted = p.expectation.leading + p.expectation.correction;
    r.z_mean_re = z_score(s.mean.value.real(), r.mean_predicted.real(), s.mean.se_re);
    r.z_mean_im = z_score(s.mean.value.imag(), r.mean_predicted.imag(), s.mean.se_im);
    r.variance_observed = s.variance.value;
    r.variance_predicted = p.variance.total.real();
    r.z_variance = z_score(s.variance.value, r.variance_predicted, s.variance.se);
    r.second_observed = s.second.value;
    r.second_predicted = p.second.total;
    r.z_second_re = z_score(s.second.value.real(), p.second.total.real(), s.second.se_re);
    r.z_second_im = z_score(s.second.value.imag(), p.second.total.imag(), s.second.se_im);
    r.z_kurtosis_re = z_score(s.kurtosis_re.value, 0.0, s.kurtosis_re.se);
    r.z_kurtosis_im = z_score(s.kurtosis_im.value, 0.0, s.kurtosis_im.se);
    return r;
}

LocalLawResult local_law_scan(const std::vector<std::size_t>& ns, const std::vector<double>& eta_exponents,
                              Complex z, std::size_t replicas, std::uint64_t base_seed,
                              const EntryDistribution& dist) {
    const auto t0 = Clock::now();
    if (ns.empty() || eta_exponents.empty() || replicas == 0) throw InvalidParameter("local_law_scan: empty grid");
    std::size_t nmax = 0;
    for (auto n : ns) nmax = std::max(nmax, n);
    LocalLawResult res;
    res.z = z;
    for (std::size_t n : ns) {
        std::vector<double> etas;
        for (double a : eta_exponents) {
            const double eta = std::pow(static_cast<double>(n), -a);
            if (eta < 1.0 / static_cast<double>(nmax)) throw InvalidParameter("local_law_scan: eta below 1/max(n)");
            etas.push_back(eta);
        }
        std::vector<Complex> ms;
        for (double eta : etas) ms.push_back(solve_m(z, {0.0, eta}).m);
        std::vector<std::vector<double>> err(replicas, std::vector<double>(etas.size()));
        const std::uint64_t seed_n = size_seed(base_seed, n);
        parallel_for(replicas, [&](std::size_t r) {
            const std::uint64_t seed = derive_seed(seed_n, r);
            const MatrixSample x = sample_matrix(dist, n, seed);
            const HermitizedSpectrum spec = hermitized_spectrum(x, z, false);
            for (std::size_t e = 0; e < etas.size(); ++e) err[r][e] = std::abs(resolvent_trace(spec, etas[e]) - ms[e]);
        });
        for (std::size_t r = 0; r < replicas; ++r) res.manifest.seeds.push_back(derive_seed(seed_n, r));
        for (std::size_t e = 0; e < etas.size(); ++e) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t r = 0; r < replicas; ++r) {
                s += err[r][e];
                s2 += err[r][e] * err[r][e];
            }
            const double mean = s / double(replicas);
            const double var = replicas > 1 ? (s2 / double(replicas) - mean * mean) * double(replicas) / double(replicas - 1) : 0.0;
            res.rows.push_back({n, etas[e], mean, std::sqrt(std::max(var, 0.0) / double(replicas))});
        }
    }
    std::vector<double> x, y;
    for (const auto& row : res.rows) {
        x.push_back(std::log(static_cast<double>(row.n) * row.eta));
        y.push_back(std::log(row.mean_error));
    }
    res.fit = fit_line(x, y);
    res.manifest.experiment = "locallaw";
    res.manifest.base_seed = base_seed;
    res.manifest.code_version = code_version();
    res.manifest.threads = thread_count();
    res.manifest.wall_clock_seconds = seconds_since(t0);
    return res;
}

std::vector<LocalLawRow> two_resolvent_scan(const std::vector<std::size_t>& ns, double eta, Complex z1, Complex z2,
                                            const BlockScalar& b, std::size_t replicas, std::uint64_t base_seed,
                                            const EntryDistribution& dist) {
    if (!(eta > 0.0) || replicas == 0) throw InvalidParameter("two_resolvent_scan: need eta > 0 and replicas");
    const Complex w{0.0, eta};
    const Complex target = two_resolvent_approx(z1, z2, w, w, b).normalized_trace();
    std::vector<LocalLawRow> rows;
    for (std::size_t n : ns) {
        std::vector<double> err(replicas);
        const std::uint64_t seed_n = size_seed(base_seed ^ 0x2b2bULL, n);
        parallel_for(replicas, [&](std::size_t r) {
            const MatrixSample x = sample_matrix(dist, n, derive_seed(seed_n, r));
            const HermitizedSpectrum s1 = hermitized_spectrum(x, z1, true);
            const HermitizedSpectrum s2 = hermitized_spectrum(x, z2, true);
            err[r] = std::abs(two_resolvent_trace(s1, s2, w, w, b) - target);
        });
        double s = 0.0, s2 = 0.0;
        for (double e : err) {
            s += e;
            s2 += e * e;
        }
        const double mean = s / double(replicas);
        const double var = replicas > 1 ? (s2 / double(replicas) - mean * mean) * double(replicas) / double(replicas - 1) : 0.0;
        rows.push_back({n, eta, mean, std::sqrt(std::max(var, 0.0) / double(replicas))});
    }
    return rows;
}

OverlapResult overlap_experiment(std::size_t n, Complex z1, Complex z2, std::size_t k, std::size_t seeds,
                                 std::uint64_t base_seed, const EntryDistribution& dist) {
    if (k == 0 || k > n || seeds == 0) throw InvalidParameter("overlap_experiment: need 1 <= k <= n and seeds > 0");
    const auto kk = static_cast<Eigen::Index>(k);
    std::vector<Eigen::MatrixXd> abs_theta(seeds);
    std::vector<double> self_dev(seeds);
    parallel_for(seeds, [&](std::size_t r) {
        const MatrixSample x = sample_matrix(dist, n, derive_seed(base_seed, r));
        const HermitizedSpectrum s1 = hermitized_spectrum(x, z1, true);
        const HermitizedSpectrum s2 = hermitized_spectrum(x, z2, true);
        abs_theta[r] = overlap_matrix(s1, s2, k).cwiseAbs();
        self_dev[r] = (overlap_matrix(s1, s1, k) - Eigen::MatrixXd::Identity(kk, kk)).cwiseAbs().maxCoeff();
    });
    OverlapResult res;
    res.n = n;
    res.seeds = seeds;
    res.mean_abs = Eigen::MatrixXd::Zero(kk, kk);
    for (std::size_t r = 0; r < seeds; ++r) {
        res.mean_abs += abs_theta[r];
        res.self_max_deviation = std::max(res.self_max_deviation, self_dev[r]);
    }
    res.mean_abs /= static_cast<double>(seeds);
    res.max_mean_abs = res.mean_abs.maxCoeff();
    return res;
}

IndependenceResult independence_experiment(std::size_t n, double eta, double omega_hat, Complex z1, Complex z2,
                                           std::size_t replicas, std::uint64_t base_seed,
                                           const EntryDistribution& dist) {
    if (replicas < 3) throw InvalidParameter("independence_experiment: need at least three replicas");
    if (eta <= 0.0) eta = 1.0 / static_cast<double>(n);
    IndependenceResult res;
    res.n = n;
    res.replicas = replicas;
    res.eta = eta;
    res.omega_hat = omega_hat;
    res.values_z1.resize(replicas);
    res.values_z2.resize(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        const MatrixSample x = sample_matrix(dist, n, derive_seed(base_seed, r));
        res.values_z1[r] = independence_statistic(hermitized_spectrum(x, z1, false), eta, omega_hat);
        res.values_z2[r] = independence_statistic(hermitized_spectrum(x, z2, false), eta, omega_hat);
    });
    res.cross_correlation = correlation(res.values_z1, res.values_z2);
    res.self_correlation = correlation(res.values_z1, res.values_z1);
    return res;
}

Json summary_to_json(const SummaryStats& s) {
    auto est = [](const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; };
    auto cest = [](const ComplexEstimate& e) {
        return Json{{"value", complex_to_json(e.value)}, {"se_re", e.se_re}, {"se_im", e.se_im}};
    };
    return {{"count", s.count},
            {"reliable", s.reliable},
            {"mean", cest(s.mean)},
            {"variance", est(s.variance)},
            {"second", cest(s.second)},
            {"third_re", est(s.third_re)},
            {"third_im", est(s.third_im)},
            {"fourth_re", est(s.fourth_re)},
            {"fourth_im", est(s.fourth_im)},
            {"kurtosis_re", est(s.kurtosis_re)},
            {"kurtosis_im", est(s.kurtosis_im)}};
}

Json clt_run_to_json(const CltRun& run) {
    Json fns = Json::array();
    for (std::size_t k = 0; k < run.labels.size(); ++k)
        fns.push_back({{"label", run.labels[k]}, {"stats", summary_to_json(run.stats[k])}});
    Json cross = Json::array();
    for (std::size_t a = 0; a < run.sums.size(); ++a)
        for (std::size_t b = a + 1; b < run.sums.size(); ++b) {
            const ComplexEstimate c = cross_covariance(run.sums[a], run.sums[b]);
            cross.push_back({{"f", run.labels[a]},
                             {"g", run.labels[b]},
                             {"cov_f_conj_g", complex_to_json(c.value)},
                             {"se_re", c.se_re},
                             {"se_im", c.se_im}});
        }
    return {{"n", run.n},
            {"distribution", distribution_to_json(run.distribution)},
            {"functions", fns},
            {"cross_covariances", cross},
            {"manifest", run.manifest.to_json()}};
}

void write_json(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    if (!out) throw IoError("write failed for '" + path + "'");
    write_json(path + ".manifest.json", manifest.to_json());
}

} // namespace rmtlab
