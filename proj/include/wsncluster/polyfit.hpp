#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

// Dense least-squares polynomial fitting, used for degree-distribution
// slopes and head-count trend curves.  Householder QR on the Vandermonde
// system in extended precision: the plain normal equations are too
// ill-conditioned once x reaches the hundreds at degree four.
namespace wsncluster::harness {

struct PolyFit {
    int degree = 0;
    std::vector<double> coefficients;  // ascending powers
    double r_squared = 0.0;

    double evaluate(double x) const {
        double acc = 0.0;
        for (std::size_t i = coefficients.size(); i > 0; --i) acc = acc * x + coefficients[i - 1];
        return acc;
    }
};

inline PolyFit fit_polynomial(const std::vector<std::pair<double, double>>& points, int degree) {
    if (degree < 0) throw std::invalid_argument("fit_polynomial: degree must be >= 0");
    const std::size_t m = points.size();
    const std::size_t n = static_cast<std::size_t>(degree) + 1;
    if (m < n) throw std::invalid_argument("fit_polynomial: need at least degree+1 points");

    std::vector<long double> a(m * n);
    std::vector<long double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        long double power = 1.0L;
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = power;
            power *= static_cast<long double>(points[i].first);
        }
        rhs[i] = static_cast<long double>(points[i].second);
    }

    // Householder QR, reflecting column by column
    std::vector<long double> diag(n);
    long double scale = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        long double norm2 = 0.0L;
        for (std::size_t i = k; i < m; ++i) norm2 += a[i * n + k] * a[i * n + k];
        const long double norm = std::sqrt(norm2);
        scale = std::max(scale, norm);
        if (!(norm > scale * 1e-15L))
            throw std::runtime_error("fit_polynomial: points do not determine the fit (rank deficient)");
        const long double alpha = a[k * n + k] > 0.0L ? -norm : norm;
        const long double vk = a[k * n + k] - alpha;
        long double vnorm2 = vk * vk;
        for (std::size_t i = k + 1; i < m; ++i) vnorm2 += a[i * n + k] * a[i * n + k];
        diag[k] = alpha;
        if (vnorm2 > 0.0L) {
            // apply I - 2 v v^T / (v^T v) to the trailing columns and the rhs
            for (std::size_t j = k + 1; j < n; ++j) {
                long double dot = vk * a[k * n + j];
                for (std::size_t i = k + 1; i < m; ++i) dot += a[i * n + k] * a[i * n + j];
                const long double f = 2.0L * dot / vnorm2;
                a[k * n + j] -= f * vk;
                for (std::size_t i = k + 1; i < m; ++i) a[i * n + j] -= f * a[i * n + k];
            }
            long double dot = vk * rhs[k];
            for (std::size_t i = k + 1; i < m; ++i) dot += a[i * n + k] * rhs[i];
            const long double f = 2.0L * dot / vnorm2;
            rhs[k] -= f * vk;
            for (std::size_t i = k + 1; i < m; ++i) rhs[i] -= f * a[i * n + k];
        }
    }

    std::vector<long double> coef(n);
    for (std::size_t k = n; k > 0; --k) {
        long double acc = rhs[k - 1];
        for (std::size_t j = k; j < n; ++j) acc -= a[(k - 1) * n + j] * coef[j];
        coef[k - 1] = acc / diag[k - 1];
    }

    PolyFit fit;
    fit.degree = degree;
    fit.coefficients.assign(coef.begin(), coef.end());

    long double mean = 0.0L;
    for (const auto& [x, y] : points) mean += static_cast<long double>(y);
    mean /= static_cast<long double>(m);
    long double ss_res = 0.0L;
    long double ss_tot = 0.0L;
    for (const auto& [x, y] : points) {
        const long double r = static_cast<long double>(y) - static_cast<long double>(fit.evaluate(x));
        ss_res += r * r;
        const long double d = static_cast<long double>(y) - mean;
        ss_tot += d * d;
    }
    if (ss_tot > 0.0L)
        fit.r_squared = static_cast<double>(1.0L - ss_res / ss_tot);
    else
        fit.r_squared = ss_res <= 1e-20L ? 1.0 : 0.0;
    return fit;
}

}  // namespace wsncluster::harness
