#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rmtlab/types.hpp"

namespace rmtlab::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Polar product grid on the disk of radius `radius`: Gauss-Legendre in r,
/// uniform trapezoid in theta. Weights include the Jacobian r.
struct PolarGrid {
    std::size_t n_r = 256;
    std::size_t n_theta = 512;
    double radius = 1.0;
    /// Interior radii splitting the radial rule into Gauss-Legendre panels; the n_r radial
    /// nodes are shared equally between panels, at least 8 per panel.
    std::vector<double> breaks;
};

struct GridNodes {
    std::vector<Complex> z;
    std::vector<double> w;
};

GridNodes build_grid(const PolarGrid& g);

/// Integral of f over the disk of the grid.
Complex integrate(const GridNodes& nodes, const std::function<Complex(Complex)>& f);

/// Sum of values in fixed pairwise order; the result does not depend on how
/// the values were produced.
double pairwise_sum(const double* values, std::size_t count);
Complex pairwise_sum(const Complex* values, std::size_t count);

/// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
/// Throws AccuracyError when the error estimate exceeds max(abs_tol, rel_tol |I|).
double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                double rel_tol = 1e-10, unsigned max_depth = 30);
Complex adaptive_complex(const std::function<Complex(double)>& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-10, unsigned max_depth = 30);

} // namespace rmtlab::quad
