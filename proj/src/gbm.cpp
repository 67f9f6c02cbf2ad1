#include "banditfolio/gbm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace banditfolio {

void validate_params(const GbmParams& p) {
    const int k = p.num_assets();
    if (k < 1) throw std::invalid_argument("gbm params: need at least one asset");
    if (static_cast<int>(p.vols.size()) != k || static_cast<int>(p.initial_prices.size()) != k ||
        p.corr.size() != k) {
        throw std::invalid_argument("gbm params: dimension mismatch");
    }
    for (double v : p.vols) {
        if (!(v > 0.0)) throw std::invalid_argument("gbm params: volatilities must be positive");
    }
    for (double s : p.initial_prices) {
        if (!(s > 0.0)) throw std::invalid_argument("gbm params: initial prices must be positive");
    }
    if (!(p.dt > 0.0)) throw std::invalid_argument("gbm params: dt must be positive");
    if (p.steps < 1) throw std::invalid_argument("gbm params: steps must be positive");
}

Matrix assemble_theta(const std::vector<double>& vols, const CorrelationMatrix& corr) {
    const int k = static_cast<int>(vols.size());
    if (corr.size() != k) throw std::invalid_argument("assemble_theta: dimension mismatch");
    Matrix theta(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) theta(i, j) = vols[i] * vols[j] * corr.values(i, j);
    }
    return theta;
}

CovarianceFactor make_covariance_factor(const std::vector<double>& vols,
                                        const CorrelationMatrix& corr) {
    CovarianceFactor f;
    f.theta = assemble_theta(vols, corr);
    f.a = cholesky_factor(f.theta); // rejects non-positive-definite input
    if (max_abs_diff(mul_aat(f.a), f.theta) >= 1e-10) {
        throw std::runtime_error("make_covariance_factor: factor round-trip exceeds 1e-10");
    }
    return f;
}

PriceSeries simulate_paths(const GbmParams& params, Rng& rng) {
    validate_params(params);
    const int k = params.num_assets();
    const CovarianceFactor f = make_covariance_factor(params.vols, params.corr);
    const double sqrt_dt = std::sqrt(params.dt);

    PriceSeries out;
    out.asset_ids.reserve(k);
    int width = 1;
    for (int v = k; v >= 10; v /= 10) ++width;
    char buf[32];
    for (int i = 0; i < k; ++i) {
        std::snprintf(buf, sizeof(buf), "A%0*d", width, i + 1);
        out.asset_ids.emplace_back(buf);
    }

    out.prices = Matrix(k, params.steps + 1);
    for (int i = 0; i < k; ++i) out.prices(i, 0) = params.initial_prices[i];

    std::vector<double> z(k);
    for (int s = 0; s < params.steps; ++s) {
        for (int m = 0; m < k; ++m) z[m] = rng.gaussian();
        for (int i = 0; i < k; ++i) {
            double shock = 0.0;
            for (int m = 0; m <= i; ++m) shock += f.a(i, m) * z[m]; // A is lower-triangular
            const double expo =
                (params.drifts[i] - 0.5 * params.vols[i] * params.vols[i]) * params.dt +
                sqrt_dt * shock;
            out.prices(i, s + 1) = out.prices(i, s) * std::exp(expo);
        }
    }
    validate_prices(out);
    return out;
}

CorrelationMatrix uniform_correlation(int n, double rho) {
    if (n < 1) throw std::invalid_argument("uniform_correlation: n must be positive");
    if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("uniform_correlation: rho outside [-1,1]");
    CorrelationMatrix c;
    c.values = Matrix(n, n, rho);
    for (int i = 0; i < n; ++i) c.values(i, i) = 1.0;
    return c;
}

} // namespace banditfolio
