#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rmtlab/types.hpp"

namespace rmtlab {

/// Estimate with a jackknife standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct ComplexEstimate {
    Complex value{};
    double se_re = 0.0;
    double se_im = 0.0;
};

/// Delete-one jackknife for statistics that are smooth functions of sample means.
/// `features` holds one row per replica; `stat` maps a vector of column means to the estimate.
Estimate jackknife(const Eigen::MatrixXd& features, const std::function<double(const Eigen::VectorXd&)>& stat);

/// Replicas below this count give standard errors that are reported but flagged unreliable.
inline constexpr std::size_t kReliableReplicas = 30;

/// Moments of the empirically centred values L_r = S_r - mean(S) of one statistic.
struct SummaryStats {
    std::size_t count = 0;
    bool reliable = false;
    ComplexEstimate mean;        // of S
    Estimate variance;           // E|L|^2
    ComplexEstimate second;      // E L^2
    Estimate third_re, third_im;     // third cumulants of Re L and Im L
    Estimate fourth_re, fourth_im;   // fourth cumulants
    Estimate kurtosis_re, kurtosis_im;  // excess kurtosis
};

SummaryStats summarize_replicas(const std::vector<Complex>& values);

/// E[(a - mean a) conj(b - mean b)] with jackknife errors on real and imaginary parts.
ComplexEstimate cross_covariance(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// Pearson correlation of paired real samples with a jackknife error.
Estimate correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Difference of two independent estimates with combined error.
inline Estimate difference(const Estimate& a, const Estimate& b) {
    return {a.value - b.value, std::sqrt(a.se * a.se + b.se * b.se)};
}

/// Least-squares slope and intercept of y against x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace rmtlab
