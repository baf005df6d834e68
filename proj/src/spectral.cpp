#include "rmtlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"

namespace rmtlab {

std::vector<double> HermitizedSpectrum::signed_eigenvalues() const {
    std::vector<double> out;
    out.reserve(2 * lambdas.size());
    for (auto it = lambdas.rbegin(); it != lambdas.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), lambdas.begin(), lambdas.end());
    return out;
}

HermitizedSpectrum hermitized_spectrum(const CMatrix& x, Complex z, bool with_vectors) {
    if (x.rows() != x.cols()) throw PreconditionError("hermitized_spectrum: matrix must be square");
    CMatrix shifted = x;
    shifted.diagonal().array() -= z;
    linalg::Svd svd;
    try {
        svd = linalg::svd(shifted, with_vectors);
    } catch (const NumericalBackendError& e) {
        throw NumericalBackendError(std::string(e.what()) + " (hermitisation at z=" + std::to_string(z.real()) +
                                    (z.imag() < 0 ? "" : "+") + std::to_string(z.imag()) + "i)");
    }
    HermitizedSpectrum spec;
    spec.z = z;
    spec.n = static_cast<std::size_t>(x.rows());
    spec.lambdas = std::move(svd.values);
    if (with_vectors) {
        spec.left_vectors = std::move(svd.left);
        spec.right_vectors = std::move(svd.right);
    }
    return spec;
}

NonHermitianSpectrum nonhermitian_eigenvalues(const CMatrix& x) {
    if (x.rows() != x.cols()) throw PreconditionError("nonhermitian_eigenvalues: matrix must be square");
    return {static_cast<std::size_t>(x.rows()), linalg::eigenvalues(x)};
}

Complex resolvent_trace(const HermitizedSpectrum& spec, double eta) {
    if (!(eta > 0.0)) throw InvalidParameter("resolvent_trace: eta must be positive");
    double sum = 0.0;
    for (double l : spec.lambdas) sum += eta / (l * l + eta * eta);
    // Each positive lambda appears twice in the signed spectrum.
    return kI * (2.0 * sum / (2.0 * static_cast<double>(spec.n)));
}

double eta_integral_closed_form(const HermitizedSpectrum& spec, double a, double b) {
    if (a < 0.0 || !(b > a)) throw InvalidParameter("eta_integral_closed_form: need 0 <= a < b");
    double sum = 0.0;
    for (double l : spec.lambdas) {
        const double l2 = l * l;
        // log((l2 + b^2) / (l2 + a^2)); two signed copies times 1/2.
        sum += std::log1p((b * b - a * a) / (l2 + a * a));
    }
    return sum;
}

double log_abs_det_shifted(const HermitizedSpectrum& spec, double T) {
    double sum = 0.0;
    for (double l : spec.lambdas) sum += std::log(l * l + T * T);
    return sum;
}

namespace {

void require_vectors(const HermitizedSpectrum& s, const char* who) {
    if (!s.has_vectors()) throw PreconditionError(std::string(who) + ": spectrum carries no singular vectors");
}

void require_same_n(const HermitizedSpectrum& a, const HermitizedSpectrum& b, const char* who) {
    if (a.n != b.n) throw PreconditionError(std::string(who) + ": spectra have different dimensions");
}

} // namespace

double trace_im_product(const HermitizedSpectrum& spec1, const HermitizedSpectrum& spec2, double eta1,
                        double eta2) {
    require_vectors(spec1, "trace_im_product");
    require_vectors(spec2, "trace_im_product");
    require_same_n(spec1, spec2, "trace_im_product");
    if (!(eta1 > 0.0 && eta2 > 0.0)) throw InvalidParameter("trace_im_product: eta must be positive");
    // Summing the four sign combinations of <(u_i, s v_i), (u'_j, t v'_j)> leaves
    // |<u_i,u'_j>|^2 + |<v_i,v'_j>|^2 for unit frames.
    const Eigen::MatrixXd uu = (spec1.left_vectors->adjoint() * *spec2.left_vectors).cwiseAbs2();
    const Eigen::MatrixXd vv = (spec1.right_vectors->adjoint() * *spec2.right_vectors).cwiseAbs2();
    const auto n = static_cast<Eigen::Index>(spec1.n);
    Eigen::VectorXd a(n), b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double l = spec1.lambdas[static_cast<std::size_t>(i)];
        const double m = spec2.lambdas[static_cast<std::size_t>(i)];
        a(i) = eta1 / (l * l + eta1 * eta1);
        b(i) = eta2 / (m * m + eta2 * eta2);
    }
    return a.dot((uu + vv) * b);
}

double eigenvector_overlap(const HermitizedSpectrum& spec_l, const HermitizedSpectrum& spec_m, std::size_t i,
                           std::size_t j) {
    require_vectors(spec_l, "eigenvector_overlap");
    require_vectors(spec_m, "eigenvector_overlap");
    require_same_n(spec_l, spec_m, "eigenvector_overlap");
    if (i < 1 || j < 1 || i > spec_l.n || j > spec_l.n)
        throw InvalidParameter("eigenvector_overlap: index out of range");
    const auto ii = static_cast<Eigen::Index>(i - 1);
    const auto jj = static_cast<Eigen::Index>(j - 1);
    const Complex uu = spec_l.left_vectors->col(ii).dot(spec_m.left_vectors->col(jj));
    const Complex vv = spec_m.right_vectors->col(jj).dot(spec_l.right_vectors->col(ii));
    // 4 Re[(uu/2)(vv/2)] with unit frames.
    return (uu * vv).real();
}

Eigen::MatrixXd overlap_matrix(const HermitizedSpectrum& spec_l, const HermitizedSpectrum& spec_m, std::size_t k) {
    require_vectors(spec_l, "overlap_matrix");
    require_vectors(spec_m, "overlap_matrix");
    require_same_n(spec_l, spec_m, "overlap_matrix");
    if (k > spec_l.n) throw InvalidParameter("overlap_matrix: k exceeds n");
    const auto kk = static_cast<Eigen::Index>(k);
    const CMatrix uu = spec_l.left_vectors->leftCols(kk).adjoint() * spec_m.left_vectors->leftCols(kk);
    const CMatrix vv = spec_l.right_vectors->leftCols(kk).adjoint() * spec_m.right_vectors->leftCols(kk);
    // <v_j^m, v_i^l> = conj(<v_i^l, v_j^m>)
    return (uu.array() * vv.array().conjugate()).real().matrix();
}

Complex two_resolvent_trace(const HermitizedSpectrum& spec1, const HermitizedSpectrum& spec2, Complex w1,
                            Complex w2, const BlockScalar& b) {
    require_vectors(spec1, "two_resolvent_trace");
    require_vectors(spec2, "two_resolvent_trace");
    require_same_n(spec1, spec2, "two_resolvent_trace");
    const CMatrix& u1 = *spec1.left_vectors;
    const CMatrix& v1 = *spec1.right_vectors;
    const CMatrix& u2 = *spec2.left_vectors;
    const CMatrix& v2 = *spec2.right_vectors;
    // Half-normalised inner products.
    const CMatrix puu = 0.5 * (u1.adjoint() * u2);
    const CMatrix puv = 0.5 * (u1.adjoint() * v2);
    const CMatrix pvu = 0.5 * (v1.adjoint() * u2);
    const CMatrix pvv = 0.5 * (v1.adjoint() * v2);
    const auto n = static_cast<Eigen::Index>(spec1.n);
    Complex total{};
    for (Eigen::Index j = 0; j < n; ++j) {
        const double mu = spec2.lambdas[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < n; ++i) {
            const double la = spec1.lambdas[static_cast<std::size_t>(i)];
            for (int s : {1, -1}) {
                for (int t : {1, -1}) {
                    const double st = s * t;
                    const Complex wbw = b.b11 * puu(i, j) + b.b12 * double(t) * puv(i, j) +
                                        b.b21 * double(s) * pvu(i, j) + b.b22 * st * pvv(i, j);
                    const Complex ww = std::conj(puu(i, j)) + st * std::conj(pvv(i, j));
                    total += wbw * ww / ((double(s) * la - w1) * (double(t) * mu - w2));
                }
            }
        }
    }
    return total / (2.0 * static_cast<double>(n));
}

} // namespace rmtlab
