#include "gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace bm {

GmmFit fit_gmm_two_component(std::span<const double> values, int max_iterations,
                             double tolerance) {
    if (values.empty()) throw std::invalid_argument("empty window");
    const std::size_t n = values.size();

    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn_it, hi = *mx_it;
    if (hi - lo < 1.0) throw decode_error("unimodal window: no threshold separable");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double mean1 = sorted[(n - 1) / 10];
    double mean2 = sorted[(n - 1) * 9 / 10];
    if (!(mean1 < mean2)) {
        mean1 = lo;
        mean2 = hi;
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double var_floor = 1e-6 * (hi - lo) * (hi - lo);
    var = std::max(var, var_floor);

    double var1 = var, var2 = var;
    double w1 = 0.5;
    double prev_ll = -std::numeric_limits<double>::infinity();
    int iter = 0;
    bool converged = false;
    constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

    while (iter < max_iterations) {
        ++iter;
        const double lw1 = std::log(w1);
        const double lw2 = std::log(1.0 - w1);
        const double c1 = -0.5 * std::log(kTwoPi * var1);
        const double c2 = -0.5 * std::log(kTwoPi * var2);
        const double inv1 = 0.5 / var1;
        const double inv2 = 0.5 / var2;

        double ll = 0.0;
        double n1 = 0.0, s1 = 0.0, q1 = 0.0;
        double s2 = 0.0, q2 = 0.0;
        for (double x : values) {
            const double d1 = x - mean1;
            const double d2 = x - mean2;
            const double l1 = lw1 + c1 - d1 * d1 * inv1;
            const double l2 = lw2 + c2 - d2 * d2 * inv2;
            const double m = std::max(l1, l2);
            const double e1 = std::exp(l1 - m);
            const double e2 = std::exp(l2 - m);
            const double sum = e1 + e2;
            ll += m + std::log(sum);
            const double r1 = e1 / sum;
            n1 += r1;
            s1 += r1 * x;
            q1 += r1 * x * x;
            s2 += (1.0 - r1) * x;
            q2 += (1.0 - r1) * x * x;
        }
        const double n2 = static_cast<double>(n) - n1;
        if (n1 > 1e-12 && n2 > 1e-12) {
            mean1 = s1 / n1;
            mean2 = s2 / n2;
            var1 = std::max(q1 / n1 - mean1 * mean1, var_floor);
            var2 = std::max(q2 / n2 - mean2 * mean2, var_floor);
            w1 = std::clamp(n1 / static_cast<double>(n), 1e-9, 1.0 - 1e-9);
        }
        ll /= static_cast<double>(n);
        if (std::abs(ll - prev_ll) < tolerance) {
            converged = true;
            break;
        }
        prev_ll = ll;
    }

    GmmFit fit;
    fit.iterations = iter;
    fit.converged = converged;
    if (mean1 <= mean2) {
        fit.mean_lo_ma = mean1;
        fit.mean_hi_ma = mean2;
        fit.var_lo = var1;
        fit.var_hi = var2;
        fit.weight_lo = w1;
    } else {
        fit.mean_lo_ma = mean2;
        fit.mean_hi_ma = mean1;
        fit.var_lo = var2;
        fit.var_hi = var1;
        fit.weight_lo = 1.0 - w1;
    }
    return fit;
}

}  // namespace bm
