#include "lensopt/analysis/shapiro_wilk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

namespace lensopt::analysis {

namespace {

constexpr std::array<double, 6> kC1{0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 4> kC3{0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6{-0.4803, -0.082676, 0.0030302};
constexpr std::array<double, 2> kGamma{-2.273, 0.459};
constexpr double kSmall = 1e-19;

template <std::size_t N>
double poly(const std::array<double, N>& c, double x) {
    double r = 0.0;
    for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
    return r;
}

// Half of the antisymmetric coefficient vector: a[i] pairs x_(n-1-i) with x_(i).
std::vector<double> coefficients(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }
    const boost::math::normal_distribution<double> normal;
    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = boost::math::quantile(normal, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

    std::size_t first_scaled = 1;
    double fac = 0.0;
    if (n > 5) {
        first_scaled = 2;
        const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
    } else {
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
    return a;
}

}  // namespace

ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3) throw ShapiroWilkError(fmt::format("sample_too_small: n = {} (need at least 3)", n));
    if (n > 5000) throw ShapiroWilkError(fmt::format("sample_too_large: n = {} (at most 5000)", n));

    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range >= kSmall)) throw ShapiroWilkError("zero-range sample: W is undefined");

    // Work on range-scaled values for conditioning; W is scale invariant.
    double mean = 0.0;
    for (auto& v : x) {
        v /= range;
        mean += v;
    }
    mean /= static_cast<double>(n);
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);

    const auto a = coefficients(n);
    double numerator = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) numerator += a[i] * (x[n - 1 - i] - x[i]);
    const double w = std::min(1.0, numerator * numerator / ssq);

    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        return {w, std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr))};
    }

    const double an = static_cast<double>(n);
    double y = std::log1p(-w);
    double mu = 0.0;
    double sd = 0.0;
    if (n <= 11) {
        const double gamma = poly(kGamma, an);
        if (y >= gamma) return {w, kSmall};
        y = -std::log(gamma - y);
        mu = poly(kC3, an);
        sd = std::exp(poly(kC4, an));
    } else {
        const double ln = std::log(an);
        mu = poly(kC5, ln);
        sd = std::exp(poly(kC6, ln));
    }
    const boost::math::normal_distribution<double> normal;
    return {w, boost::math::cdf(boost::math::complement(normal, (y - mu) / sd))};
}

}  // namespace lensopt::analysis
