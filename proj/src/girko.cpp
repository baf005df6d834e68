#include "rmtlab/girko.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rmtlab/errors.hpp"
#include "rmtlab/parallel.hpp"
#include "rmtlab/spectral.hpp"

namespace rmtlab {

double GirkoConfig::eta0(std::size_t n) const { return std::pow(static_cast<double>(n), -1.0 - delta0); }
double GirkoConfig::etac(std::size_t n) const { return std::pow(static_cast<double>(n), -1.0 + delta1); }

double GirkoReport::relative_error() const {
    const double den = std::abs(direct);
    return den > 0.0 ? std::abs(reconstructed - direct) / den : std::abs(reconstructed - direct);
}

Complex eigenvalue_sum(const std::vector<Complex>& sigmas, const TestFunction& f) {
    std::vector<Complex> v(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) v[i] = f.value(sigmas[i]);
    return quad::pairwise_sum(v.data(), v.size());
}

GirkoReport girko_reconstruct(const MatrixSample& x, const TestFunction& f, const GirkoConfig& cfg) {
    const std::size_t n = x.n;
    const double eta0 = cfg.eta0(n);
    const double etac = cfg.etac(n);
    if (!(eta0 < etac && etac < cfg.T)) throw InvalidParameter("girko: need eta0 < etac < T");

    const std::vector<Complex> sigmas = nonhermitian_eigenvalues(x).sigmas;
    GirkoReport rep;
    rep.direct = eigenvalue_sum(sigmas, f);
    rep.eta0 = eta0;
    rep.etac = etac;
    rep.T = cfg.T;

    quad::PolarGrid grid = cfg.zgrid;
    if (grid.radius <= 0.0) grid.radius = f.support_radius();
    if (grid.breaks.empty()) grid.breaks = f.radial_breaks();
    quad::GridNodes nodes = quad::build_grid(grid);
    const double spacing = grid.radius / static_cast<double>(grid.n_r);
    for (auto& z : nodes.z) {
        for (const auto& s : sigmas) {
            if (std::abs(z - s) < 1e-10) {
                z += 1e-6 * spacing;
                ++rep.jittered_nodes;
                break;
            }
        }
    }

    const std::size_t count = nodes.z.size();
    // Per node: weight * Delta f / (4 pi) times the four eta-pieces.
    std::vector<std::array<Complex, 4>> parts(count);
    const double logT2 = 2.0 * std::log(cfg.T);
    const double T2 = cfg.T * cfg.T;
    const double e02 = eta0 * eta0;
    const double ec2 = etac * etac;
    parallel_for(count, [&](std::size_t k) {
        const Complex lap = f.laplacian(nodes.z[k]);
        if (lap == Complex{}) {
            parts[k] = {};
            return;
        }
        const HermitizedSpectrum spec = hermitized_spectrum(x.entries, nodes.z[k], false);
        double jt = 0.0, i0 = 0.0, i1 = 0.0, i2 = 0.0;
        for (double l : spec.lambdas) {
            const double l2 = l * l;
            const double tail = std::log1p(l2 / T2);
            jt += logT2 + tail;                          // log(l^2 + T^2)
            i0 -= std::log1p(e02 / l2);                  // -log((l^2 + eta0^2) / l^2)
            i1 -= std::log1p((ec2 - e02) / (l2 + e02));  // -log((l^2 + etac^2) / (l^2 + eta0^2))
            i2 -= logT2 + tail - std::log(l2 + ec2);     // -log((l^2 + T^2) / (l^2 + etac^2))
        }
        const Complex c = nodes.w[k] * lap / (4.0 * kPi);
        parts[k] = {c * jt, c * i0, c * i1, c * i2};
    });

    std::array<Complex, 4> totals{};
    std::vector<Complex> column(count);
    for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t k = 0; k < count; ++k) column[k] = parts[k][p];
        totals[p] = quad::pairwise_sum(column.data(), count);
    }
    rep.regimes = {totals[0], totals[1], totals[2], totals[3]};
    rep.reconstructed = rep.regimes.sum();
    if (!std::isfinite(std::abs(rep.reconstructed)))
        throw AccuracyError("girko: non-finite reconstruction (a z-node hit a singular value of zero)");
    return rep;
}

RegimeContributions regime_decomposition(const MatrixSample& x, const TestFunction& f, const GirkoConfig& cfg) {
    return girko_reconstruct(x, f, cfg).regimes;
}

} // namespace rmtlab
