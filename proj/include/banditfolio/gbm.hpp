#pragma once

#include <vector>

#include "banditfolio/ingest.hpp"
#include "banditfolio/linalg.hpp"
#include "banditfolio/market_graph.hpp"
#include "banditfolio/rng.hpp"

namespace banditfolio {

/// Correlated geometric-Brownian-motion parameters. Drifts are per unit
/// time, volatilities per sqrt(time); the time grid is uniform with
/// spacing dt.
struct GbmParams {
    std::vector<double> drifts;
    std::vector<double> vols;
    CorrelationMatrix corr;
    std::vector<double> initial_prices;
    double dt = 1.0;
    int steps = 0;

    int num_assets() const { return static_cast<int>(drifts.size()); }
};

void validate_params(const GbmParams& p);

/// Instantaneous covariance: theta[i][j] = vol_i * vol_j * rho_ij.
Matrix assemble_theta(const std::vector<double>& vols, const CorrelationMatrix& corr);

/// Theta together with its lower-triangular Cholesky factor A
/// (A A^T = theta, verified to 1e-10 on construction).
struct CovarianceFactor {
    Matrix theta;
    Matrix a;
};

CovarianceFactor make_covariance_factor(const std::vector<double>& vols,
                                        const CorrelationMatrix& corr);

/// Exact recursion: P_i(t_{s+1}) = P_i(t_s) * exp((drift_i - vol_i^2/2) dt
/// + sqrt(dt) * sum_m A_im Z_m), one fresh standard-Gaussian K-vector per
/// step. Asset ids are A1..AK (zero-padded).
PriceSeries simulate_paths(const GbmParams& params, Rng& rng);

/// Uniform pairwise correlation matrix (off-diagonal rho everywhere).
CorrelationMatrix uniform_correlation(int n, double rho);

} // namespace banditfolio
