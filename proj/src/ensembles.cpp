#include "rmtlab/ensembles.hpp"

#include <cmath>

#include "rmtlab/errors.hpp"

namespace rmtlab {

EntryDistribution EntryDistribution::ginibre() { return {EntryKind::ginibre, 0.0}; }

EntryDistribution EntryDistribution::four_phase() { return {EntryKind::four_phase, 0.0}; }

EntryDistribution EntryDistribution::sparse_phase(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw InvalidParameter("sparse_phase: probability must lie in (0, 1], got " + std::to_string(p));
    return {EntryKind::sparse_phase, p};
}

EntryDistribution EntryDistribution::mixture(double weight) {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw InvalidParameter("mixture: weight must lie in [0, 1], got " + std::to_string(weight));
    return {EntryKind::mixture, weight};
}

EntryDistribution EntryDistribution::from_name(const std::string& kind, double param) {
    if (kind == "ginibre") return ginibre();
    if (kind == "four_phase") return four_phase();
    if (kind == "sparse_phase") return sparse_phase(param);
    if (kind == "mixture") return mixture(param);
    throw InvalidParameter("unknown distribution kind '" + kind + "'");
}

std::string EntryDistribution::name() const {
    switch (kind_) {
    case EntryKind::ginibre: return "ginibre";
    case EntryKind::four_phase: return "four_phase";
    case EntryKind::sparse_phase: return "sparse_phase(" + std::to_string(param_) + ")";
    case EntryKind::mixture: return "mixture(" + std::to_string(param_) + ")";
    }
    return "unknown";
}

Moments EntryDistribution::moments() const {
    double fourth = 2.0;
    switch (kind_) {
    case EntryKind::ginibre: fourth = 2.0; break;
    case EntryKind::four_phase: fourth = 1.0; break;
    case EntryKind::sparse_phase: fourth = 1.0 / param_; break;
    case EntryKind::mixture: fourth = param_ * 1.0 + (1.0 - param_) * 2.0; break;
    }
    return {Complex{}, Complex{}, 1.0, fourth, fourth - 2.0};
}

Moments moments_of(const EntryDistribution& dist) { return dist.moments(); }

namespace {

Complex four_phase_atom(double u) {
    static constexpr Complex atoms[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    const int k = std::min(3, static_cast<int>(u * 4.0));
    return atoms[k];
}

} // namespace

Complex EntryDistribution::draw(const CounterRng& rng, std::uint64_t index) const {
    switch (kind_) {
    case EntryKind::ginibre:
        return rng.complex_normal(index, 0);
    case EntryKind::four_phase:
        return four_phase_atom(rng.uniform(index, 0));
    case EntryKind::sparse_phase: {
        const auto [u, v] = rng.uniform_pair(index, 0);
        if (u >= param_) return {};
        return std::polar(1.0 / std::sqrt(param_), 2.0 * kPi * v);
    }
    case EntryKind::mixture: {
        const auto [u, v] = rng.uniform_pair(index, 0);
        if (u < param_) return four_phase_atom(v);
        return rng.complex_normal(index, 1);
    }
    }
    return {};
}

MatrixSample sample_matrix(const EntryDistribution& dist, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidParameter("sample_matrix: n must be positive");
    MatrixSample s;
    s.n = n;
    s.seed = seed;
    s.distribution = dist;
    s.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const CounterRng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            s.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                scale * dist.draw(rng, static_cast<std::uint64_t>(a) * n + b);
    return s;
}

} // namespace rmtlab
