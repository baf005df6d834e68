#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace rmtlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// A 2n x 2n matrix whose four n x n blocks are scalar multiples of the identity.
struct BlockScalar {
    Complex b11{};
    Complex b12{};
    Complex b21{};
    Complex b22{};

    static BlockScalar identity() { return {1.0, 0.0, 0.0, 1.0}; }

    BlockScalar operator*(const BlockScalar& o) const {
        return {b11 * o.b11 + b12 * o.b21, b11 * o.b12 + b12 * o.b22,
                b21 * o.b11 + b22 * o.b21, b21 * o.b12 + b22 * o.b22};
    }
    BlockScalar operator+(const BlockScalar& o) const {
        return {b11 + o.b11, b12 + o.b12, b21 + o.b21, b22 + o.b22};
    }
    BlockScalar operator-(const BlockScalar& o) const {
        return {b11 - o.b11, b12 - o.b12, b21 - o.b21, b22 - o.b22};
    }
    /// Normalised trace (1/2n) Tr.
    Complex normalized_trace() const { return 0.5 * (b11 + b22); }
    double max_abs() const;
};

inline double BlockScalar::max_abs() const {
    double m = std::abs(b11);
    for (Complex c : {b12, b21, b22}) m = std::max(m, std::abs(c));
    return m;
}

} // namespace rmtlab
