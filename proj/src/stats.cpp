#include "rmtlab/stats.hpp"

#include <cmath>

#include "rmtlab/errors.hpp"

namespace rmtlab {

Estimate jackknife(const Eigen::MatrixXd& features, const std::function<double(const Eigen::VectorXd&)>& stat) {
    const Eigen::Index n = features.rows();
    if (n < 2) throw InvalidParameter("jackknife: need at least two replicas");
    const Eigen::VectorXd sums = features.colwise().sum().transpose();
    const double full = stat(sums / static_cast<double>(n));
    std::vector<double> loo(static_cast<std::size_t>(n));
    double loo_mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd means = (sums - features.row(i).transpose()) / static_cast<double>(n - 1);
        loo[static_cast<std::size_t>(i)] = stat(means);
        loo_mean += loo[static_cast<std::size_t>(i)];
    }
    loo_mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    const double se = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
    return {full, se};
}

namespace {

// Rows: x, y, x^2, y^2, xy, x^3, y^3, x^4, y^4 of the data shifted by its mean.
Eigen::MatrixXd moment_features(const std::vector<Complex>& values, Complex shift) {
    const auto n = static_cast<Eigen::Index>(values.size());
    Eigen::MatrixXd f(n, 9);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex v = values[static_cast<std::size_t>(i)] - shift;
        const double x = v.real(), y = v.imag();
        f.row(i) << x, y, x * x, y * y, x * y, x * x * x, y * y * y, x * x * x * x, y * y * y * y;
    }
    return f;
}

struct Central {
    double m2x, m2y, mxy, m3x, m3y, m4x, m4y;
};

Central central(const Eigen::VectorXd& e) {
    const double mx = e(0), my = e(1);
    Central c;
    c.m2x = e(2) - mx * mx;
    c.m2y = e(3) - my * my;
    c.mxy = e(4) - mx * my;
    c.m3x = e(5) - 3 * mx * e(2) + 2 * mx * mx * mx;
    c.m3y = e(6) - 3 * my * e(3) + 2 * my * my * my;
    c.m4x = e(7) - 4 * mx * e(5) + 6 * mx * mx * e(2) - 3 * mx * mx * mx * mx;
    c.m4y = e(8) - 4 * my * e(6) + 6 * my * my * e(3) - 3 * my * my * my * my;
    return c;
}

double safe_kurtosis(double m4, double m2) { return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0; }

} // namespace

SummaryStats summarize_replicas(const std::vector<Complex>& values) {
    if (values.size() < 2) throw InvalidParameter("summarize_replicas: need at least two replicas");
    Complex shift{};
    for (const auto& v : values) shift += v;
    shift /= static_cast<double>(values.size());
    const Eigen::MatrixXd f = moment_features(values, shift);
    SummaryStats s;
    s.count = values.size();
    s.reliable = values.size() >= kReliableReplicas;
    const double bessel = static_cast<double>(s.count) / static_cast<double>(s.count - 1);

    const Estimate mre = jackknife(f, [](const Eigen::VectorXd& e) { return e(0); });
    const Estimate mim = jackknife(f, [](const Eigen::VectorXd& e) { return e(1); });
    s.mean = {shift + Complex(mre.value, mim.value), mre.se, mim.se};
    s.variance = jackknife(f, [&](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return bessel * (c.m2x + c.m2y);
    });
    const Estimate l2re = jackknife(f, [&](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return bessel * (c.m2x - c.m2y);
    });
    const Estimate l2im = jackknife(f, [&](const Eigen::VectorXd& e) { return bessel * 2.0 * central(e).mxy; });
    s.second = {{l2re.value, l2im.value}, l2re.se, l2im.se};
    s.third_re = jackknife(f, [](const Eigen::VectorXd& e) { return central(e).m3x; });
    s.third_im = jackknife(f, [](const Eigen::VectorXd& e) { return central(e).m3y; });
    s.fourth_re = jackknife(f, [](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return c.m4x - 3.0 * c.m2x * c.m2x;
    });
    s.fourth_im = jackknife(f, [](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return c.m4y - 3.0 * c.m2y * c.m2y;
    });
    s.kurtosis_re = jackknife(f, [](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return safe_kurtosis(c.m4x, c.m2x);
    });
    s.kurtosis_im = jackknife(f, [](const Eigen::VectorXd& e) {
        const Central c = central(e);
        return safe_kurtosis(c.m4y, c.m2y);
    });
    return s;
}

ComplexEstimate cross_covariance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidParameter("cross_covariance: need paired samples");
    const auto n = static_cast<Eigen::Index>(a.size());
    Complex ca{}, cb{};
    for (Eigen::Index i = 0; i < n; ++i) {
        ca += a[static_cast<std::size_t>(i)];
        cb += b[static_cast<std::size_t>(i)];
    }
    ca /= double(n);
    cb /= double(n);
    // a conj(b) = (ax + i ay)(bx - i by)
    Eigen::MatrixXd f(n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex x = a[static_cast<std::size_t>(i)] - ca, y = b[static_cast<std::size_t>(i)] - cb;
        f.row(i) << x.real(), x.imag(), y.real(), y.imag(), x.real() * y.real() + x.imag() * y.imag(),
            x.imag() * y.real() - x.real() * y.imag();
    }
    const double bessel = double(n) / double(n - 1);
    const Estimate re = jackknife(f, [&](const Eigen::VectorXd& e) {
        return bessel * (e(4) - (e(0) * e(2) + e(1) * e(3)));
    });
    const Estimate im = jackknife(f, [&](const Eigen::VectorXd& e) {
        return bessel * (e(5) - (e(1) * e(2) - e(0) * e(3)));
    });
    return {{re.value, im.value}, re.se, im.se};
}

Estimate correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 3) throw InvalidParameter("correlation: need paired samples");
    const auto n = static_cast<Eigen::Index>(a.size());
    double ma = 0, mb = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        ma += a[static_cast<std::size_t>(i)];
        mb += b[static_cast<std::size_t>(i)];
    }
    ma /= double(n);
    mb /= double(n);
    Eigen::MatrixXd f(n, 5);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = a[static_cast<std::size_t>(i)] - ma, y = b[static_cast<std::size_t>(i)] - mb;
        f.row(i) << x, y, x * x, y * y, x * y;
    }
    return jackknife(f, [](const Eigen::VectorXd& e) {
        const double vx = e(2) - e(0) * e(0), vy = e(3) - e(1) * e(1);
        if (!(vx > 0.0 && vy > 0.0)) return 0.0;
        return (e(4) - e(0) * e(1)) / std::sqrt(vx * vy);
    });
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidParameter("fit_line: x values are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

} // namespace rmtlab
