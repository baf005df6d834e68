#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/types.hpp"

namespace rmtlab {

/// Positive half lambda_1 < ... < lambda_n of a symmetric point configuration.
struct DbmState {
    double time = 0.0;
    std::vector<double> points;
    std::size_t n = 0;
};

/// drift_i = (1/2n) [sum_{j != i} (1/(l_i - l_j) + 1/(l_i + l_j)) + 1/(2 l_i)].
/// Throws CollisionError unless the points are strictly increasing and positive.
std::vector<double> dbm_drift(const std::vector<double>& points, std::size_t n);

/// Same drift written as (1/2n) sum_{j != i} 2 l_i / (l_i^2 - l_j^2) + 1/(4 n l_i).
std::vector<double> dbm_drift_pairwise(const std::vector<double>& points, std::size_t n);

struct StepOptions {
    /// Maximum number of leaf sub-steps a single step may be split into.
    std::size_t substep_cap = 1024;
};

/// Source of the Brownian-bridge midpoints used when a step is refined.
struct BridgeSource {
    CounterRng rng{0};
    std::uint64_t step = 0;
};

/// One Euler-Maruyama step l_i <- l_i + dW_i / sqrt(2n) + drift_i dt. When the
/// update would break ordering or positivity, the step is halved recursively with
/// midpoints drawn from the Brownian bridge. Throws StepFailure once the cap is hit.
DbmState dbm_step(const DbmState& state, const std::vector<double>& increments, double dt,
                  const BridgeSource& bridge, const StepOptions& opts = {});

/// Matrix increment dB with i.i.d. complex Gaussian entries, E|dB_ab|^2 = dt.
CMatrix matrix_increment(std::size_t n, double dt, const CounterRng& rng, std::uint64_t step);

/// X + dB / sqrt(n).
CMatrix matrix_flow_step(const CMatrix& x, const CMatrix& db);
CMatrix matrix_flow_step(const CMatrix& x, double dt, const CounterRng& rng, std::uint64_t step);

/// db_i = sqrt 2 (B_ii + conj B_ii) with B = u^* dB v in half-normalised frames, one
/// vector per spectrum. Throws PreconditionError when a spectrum has no vectors.
std::vector<std::vector<double>> extract_driver_increments(const CMatrix& db,
                                                           const std::vector<HermitizedSpectrum>& specs);

enum class DriverMode { independent, coupled_below_K, overlap_correlated, matrix_flow };

DriverMode driver_mode_from_name(const std::string& name);
std::string driver_mode_name(DriverMode mode);

struct DriverSpec {
    DriverMode mode = DriverMode::independent;
    std::size_t K = 0;  // coupled_below_K: indices 1..K share increments
    std::uint64_t seed = 0;
};

struct DbmConfig {
    std::size_t n = 0;
    double dt = 1e-5;
    double t_final = 1e-2;
    std::size_t substep_cap = 1024;
    std::size_t record_every = 1;
};

/// Matrix data for the overlap_correlated and matrix_flow modes: one process per shift.
struct MatrixFlowSetup {
    CMatrix x0;
    std::vector<Complex> zs;
};

struct Trajectories {
    std::vector<double> times;
    /// records[r][p] = points of process p at times[r]
    std::vector<std::vector<std::vector<double>>> records;
    /// matrix_flow only: true singular values of X_t - z_p at the record times
    std::vector<std::vector<std::vector<double>>> truth;
    std::vector<DbmState> final_states;
    std::size_t steps = 0;
};

/// Evolves all processes under the driver coupling. With `setup` and empty `initial`,
/// process p starts at the singular values of x0 - z_p.
Trajectories run_coupled(const DbmConfig& cfg, const std::vector<DbmState>& initial, const DriverSpec& driver,
                         const std::optional<MatrixFlowSetup>& setup = std::nullopt);

/// (1/n) sum_{signed |i| <= K} eta / (lambda_i^2 + eta^2) with K = floor(n^omega_hat).
/// Throws InvalidParameter when K exceeds n (omega_hat > 1) or eta <= 0.
double independence_statistic(const HermitizedSpectrum& spec, double eta, double omega_hat);

/// Whether eta lies in the recommended window [n^{-1-delta0}, n^{-1+delta1}].
bool eta_in_mesoscopic_window(std::size_t n, double eta, double delta0 = 0.1, double delta1 = 0.1);

} // namespace rmtlab
