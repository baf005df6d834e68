#pragma once

#include <cstddef>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/test_functions.hpp"
#include "rmtlab/types.hpp"

namespace rmtlab {

struct GirkoConfig {
    double T = 1e6;
    /// Radius 0 means "use the support radius of f".
    quad::PolarGrid zgrid{64, 128, 0.0, {}};
    double delta0 = 0.1;
    double delta1 = 0.1;

    double eta0(std::size_t n) const;
    double etac(std::size_t n) const;
};

/// Pathwise pieces of the split
///   sum f(sigma_i) = J_T + I_0^{eta0} + I_{eta0}^{etac} + I_{etac}^T,
/// where (with the z-integrals against (1/4 pi) Delta f)
///   J_T        collects log|det(H^z - iT)|,
///   I_a^b      collects -int_a^b Im Tr G^z(i eta) d eta.
struct RegimeContributions {
    Complex J_T{};
    Complex I_0_eta0{};
    Complex I_eta0_etac{};
    Complex I_etac_T{};

    Complex sum() const { return J_T + I_0_eta0 + I_eta0_etac + I_etac_T; }
};

struct GirkoReport {
    Complex reconstructed{};
    Complex direct{};
    RegimeContributions regimes;
    double eta0 = 0.0;
    double etac = 0.0;
    double T = 0.0;
    std::size_t jittered_nodes = 0;

    double relative_error() const;
};

GirkoReport girko_reconstruct(const MatrixSample& x, const TestFunction& f, const GirkoConfig& cfg = {});
RegimeContributions regime_decomposition(const MatrixSample& x, const TestFunction& f, const GirkoConfig& cfg = {});

/// Sum of f over the eigenvalues of X in fixed pairwise order.
Complex eigenvalue_sum(const std::vector<Complex>& sigmas, const TestFunction& f);

} // namespace rmtlab
