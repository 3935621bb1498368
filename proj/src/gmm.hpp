#pragma once

#include <span>

namespace bm {

// Two-component 1-D Gaussian mixture, components ordered by mean.
struct GmmFit {
    double mean_lo_ma = 0.0;
    double mean_hi_ma = 0.0;
    double var_lo = 0.0;
    double var_hi = 0.0;
    double weight_lo = 0.0;  // weight_hi = 1 - weight_lo
    int iterations = 0;
    bool converged = false;
};

// Expectation-maximization with deterministic initialization: means at the
// 10th/90th percentiles, equal weights, both variances at the sample
// variance. Converged when the per-sample mean log-likelihood moves less
// than `tolerance` between iterations, capped at `max_iterations`. Variance
// floors scale with the data range, so the fit commutes with rescaling the
// input. Throws on an empty window and on windows whose value range is
// under 1 mA (nothing to separate).
GmmFit fit_gmm_two_component(std::span<const double> values, int max_iterations = 200,
                             double tolerance = 1e-6);

}  // namespace bm
