#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rmtlab/clt_theory.hpp"
#include "rmtlab/config.hpp"
#include "rmtlab/ensembles.hpp"
#include "rmtlab/stats.hpp"

namespace rmtlab {

std::string code_version();

/// Everything needed to rerun an experiment bit-exactly.
struct RunManifest {
    std::string experiment;
    std::string config_hash;
    Json config;
    std::uint64_t base_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::string code_version;
    double wall_clock_seconds = 0.0;
    std::size_t threads = 1;
    std::vector<std::size_t> flagged_replicas;  // some |sigma_i| in the cutoff annulus
    std::vector<std::size_t> failed_replicas;

    Json to_json() const;
    static RunManifest from_json(const Json& j);
};

RunManifest make_manifest(const ExperimentConfig& cfg);

struct CltRun {
    std::size_t n = 0;
    EntryDistribution distribution = EntryDistribution::ginibre();
    std::vector<std::string> labels;
    /// sums[f][r] = sum_i f(sigma_i) for replica r (failed replicas removed)
    std::vector<std::vector<Complex>> sums;
    std::vector<SummaryStats> stats;
    std::vector<double> spectral_radius;
    RunManifest manifest;
};

/// Replica r uses seed derive_seed(base_seed, r). All functions are evaluated on the
/// same replicas. Throws NumericalBackendError when more than 1% of replicas fail.
CltRun run_clt_experiment(const ExperimentConfig& cfg);

struct TheoryPrediction {
    std::string label;
    double kappa4 = 0.0;
    CovarianceBreakdown variance;  // C(f, f) = E|L|^2
    CovarianceBreakdown second;    // C(conj f, f) = E L^2
    ExpectationPrediction expectation;
};

TheoryPrediction predict(const TestFunction& f, double kappa4, std::size_t n, const QuadSpec& quad = {});

struct ComparisonReport {
    std::string label;
    double z_mean_re = 0.0, z_mean_im = 0.0;
    double z_variance = 0.0;
    double z_second_re = 0.0, z_second_im = 0.0;
    double z_kurtosis_re = 0.0, z_kurtosis_im = 0.0;
    Complex mean_observed{}, mean_predicted{};
    double variance_observed = 0.0, variance_predicted = 0.0;
    Complex second_observed{}, second_predicted{};
    bool reliable = false;

    double max_abs_z() const;
    Json to_json() const;
};

ComparisonReport compare_to_theory(const SummaryStats& stats, const TheoryPrediction& prediction);

struct LocalLawRow {
    std::size_t n = 0;
    double eta = 0.0;
    double mean_error = 0.0;
    double se = 0.0;
};

struct LocalLawResult {
    Complex z{};
    std::vector<LocalLawRow> rows;
    LinearFit fit;  // log(mean error) against log(n eta)
    RunManifest manifest;
};

/// Mean over replicas of |<G^z(i eta)> - m^z(i eta)| on the (n, eta = n^{-a}) grid, and the
/// least-squares slope in log(n eta).
LocalLawResult local_law_scan(const std::vector<std::size_t>& ns, const std::vector<double>& eta_exponents,
                              Complex z, std::size_t replicas, std::uint64_t base_seed,
                              const EntryDistribution& dist = EntryDistribution::ginibre());

/// Mean over replicas of |<G^{z1}(i eta) B G^{z2}(i eta)> - <M_B>| for each n.
std::vector<LocalLawRow> two_resolvent_scan(const std::vector<std::size_t>& ns, double eta, Complex z1, Complex z2,
                                            const BlockScalar& b, std::size_t replicas, std::uint64_t base_seed,
                                            const EntryDistribution& dist = EntryDistribution::ginibre());

struct OverlapResult {
    std::size_t n = 0;
    std::size_t seeds = 0;
    Eigen::MatrixXd mean_abs;      // seed average of |Theta_ij^{z1,z2}|, i, j <= k
    double max_mean_abs = 0.0;
    double self_max_deviation = 0.0;  // max |Theta^{z1,z1} - delta_ij|
};

OverlapResult overlap_experiment(std::size_t n, Complex z1, Complex z2, std::size_t k, std::size_t seeds,
                                 std::uint64_t base_seed, const EntryDistribution& dist = EntryDistribution::ginibre());

struct IndependenceResult {
    std::size_t n = 0;
    std::size_t replicas = 0;
    double eta = 0.0;
    double omega_hat = 0.0;
    std::vector<double> values_z1, values_z2;
    Estimate cross_correlation;
    Estimate self_correlation;
};

IndependenceResult independence_experiment(std::size_t n, double eta, double omega_hat, Complex z1, Complex z2,
                                           std::size_t replicas, std::uint64_t base_seed,
                                           const EntryDistribution& dist = EntryDistribution::ginibre());

Json summary_to_json(const SummaryStats& s);
Json clt_run_to_json(const CltRun& run);

/// CSV with a header row; writes `<path>.manifest.json` beside it.
/// Throws IoError naming the path on failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const RunManifest& manifest);
void write_json(const std::string& path, const Json& doc);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

} // namespace rmtlab
