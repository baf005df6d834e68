#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/types.hpp"

namespace rmtlab {

/// Spectrum of the Hermitisation H^z = [[0, X - z], [(X - z)^*, 0]].
///
/// Only the positive half is stored: `lambdas` are the singular values
/// s_1 <= ... <= s_n of X - z and the eigenvalues of H^z are +-s_i. When present,
/// the frames are unit-norm: (X - z) v_i = s_i u_i. The corresponding eigenvectors
/// of H^z are (u_i, +-v_i) / sqrt(2) and are never formed explicitly.
struct HermitizedSpectrum {
    Complex z{};
    std::size_t n = 0;
    std::vector<double> lambdas;
    std::optional<CMatrix> left_vectors;
    std::optional<CMatrix> right_vectors;

    bool has_vectors() const { return left_vectors.has_value() && right_vectors.has_value(); }
    /// All 2n eigenvalues of H^z in ascending order.
    std::vector<double> signed_eigenvalues() const;
};

struct NonHermitianSpectrum {
    std::size_t n = 0;
    std::vector<Complex> sigmas;
};

HermitizedSpectrum hermitized_spectrum(const CMatrix& x, Complex z, bool with_vectors);
inline HermitizedSpectrum hermitized_spectrum(const MatrixSample& x, Complex z, bool with_vectors) {
    return hermitized_spectrum(x.entries, z, with_vectors);
}

NonHermitianSpectrum nonhermitian_eigenvalues(const CMatrix& x);
inline NonHermitianSpectrum nonhermitian_eigenvalues(const MatrixSample& x) {
    return nonhermitian_eigenvalues(x.entries);
}

/// <G^z(i eta)> = (i / 2n) sum_{signed i} eta / (lambda_i^2 + eta^2).
Complex resolvent_trace(const HermitizedSpectrum& spec, double eta);

/// Closed form of int_a^b Im Tr G^z(i eta) d eta
///   = sum_{signed i} (1/2) log((lambda_i^2 + b^2) / (lambda_i^2 + a^2)).
double eta_integral_closed_form(const HermitizedSpectrum& spec, double a, double b);

/// log|det(H^z - i T)| = sum_{i>0} log(lambda_i^2 + T^2).
double log_abs_det_shifted(const HermitizedSpectrum& spec, double T);

/// eta1 eta2 Tr Im G^{z1}(i eta1) Im G^{z2}(i eta2) / (eta1 eta2), i.e.
/// sum over signed i, j of [eta1/(l_i^2+eta1^2)] [eta2/(m_j^2+eta2^2)] |<w_i, w_j>|^2.
double trace_im_product(const HermitizedSpectrum& spec1, const HermitizedSpectrum& spec2, double eta1,
                        double eta2);

/// Correlation of the DBM driving motions b_i^{z_l} and b_j^{z_m}:
///   4 Re[<u_i^{z_l}, u_j^{z_m}> <v_j^{z_m}, v_i^{z_l}>]
/// with half-normalised vectors. Indices are 1-based, 1 <= i, j <= n.
double eigenvector_overlap(const HermitizedSpectrum& spec_l, const HermitizedSpectrum& spec_m, std::size_t i,
                           std::size_t j);

/// Same kernel for all 1 <= i, j <= k at once (0-based entries).
Eigen::MatrixXd overlap_matrix(const HermitizedSpectrum& spec_l, const HermitizedSpectrum& spec_m, std::size_t k);

/// <G^{z1}(w1) B G^{z2}(w2)> for block-constant B, from the singular frames.
Complex two_resolvent_trace(const HermitizedSpectrum& spec1, const HermitizedSpectrum& spec2, Complex w1,
                            Complex w2, const BlockScalar& b);

} // namespace rmtlab
