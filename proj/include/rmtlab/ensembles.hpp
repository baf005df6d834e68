#pragma once

#include <cstdint>
#include <string>

#include "rmtlab/rng.hpp"
#include "rmtlab/types.hpp"

namespace rmtlab {

enum class EntryKind { ginibre, four_phase, sparse_phase, mixture };

/// Exact low moments of a single-entry law chi.
struct Moments {
    Complex mean;          // E chi
    Complex mean_square;   // E chi^2
    double second_abs;     // E |chi|^2
    double fourth_abs;     // E |chi|^4
    double kappa4;         // E |chi|^4 - 2
};

/// Entry law chi with E chi = E chi^2 = 0 and E|chi|^2 = 1.
///
/// - ginibre: standard complex Gaussian, kappa4 = 0.
/// - four_phase: uniform on {1, i, -1, -i}, kappa4 = -1.
/// - sparse_phase(p): 0 with probability 1-p, otherwise p^{-1/2} e^{i phi} with
///   uniform phase; kappa4 = 1/p - 2.
/// - mixture(w): four_phase with probability w, ginibre otherwise; kappa4 = -w.
class EntryDistribution {
public:
    static EntryDistribution ginibre();
    static EntryDistribution four_phase();
    static EntryDistribution sparse_phase(double p);
    static EntryDistribution mixture(double weight);

    /// Parse from a kind name ("ginibre", "four_phase", "sparse_phase", "mixture")
    /// and its single parameter (ignored for parameter-free kinds).
    static EntryDistribution from_name(const std::string& kind, double param = 0.0);

    EntryKind kind() const { return kind_; }
    double parameter() const { return param_; }
    std::string name() const;

    Moments moments() const;
    double kappa4() const { return moments().kappa4; }

    /// Draw chi for entry `index`; depends only on (rng, index).
    Complex draw(const CounterRng& rng, std::uint64_t index) const;

    bool operator==(const EntryDistribution&) const = default;

private:
    EntryDistribution(EntryKind k, double p) : kind_(k), param_(p) {}
    EntryKind kind_;
    double param_;
};

Moments moments_of(const EntryDistribution& dist);

/// n x n matrix with i.i.d. entries n^{-1/2} chi.
struct MatrixSample {
    std::size_t n = 0;
    CMatrix entries;
    std::uint64_t seed = 0;
    EntryDistribution distribution = EntryDistribution::ginibre();
};

/// Entry (a, b) is produced from counter index a * n + b, so the result does not
/// depend on fill order or thread count.
MatrixSample sample_matrix(const EntryDistribution& dist, std::size_t n, std::uint64_t seed);

} // namespace rmtlab
