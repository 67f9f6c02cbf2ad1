#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "banditfolio/gbm.hpp"

using namespace banditfolio;

namespace {

GbmParams base_params() {
    GbmParams p;
    p.drifts = {0.05, 0.03};
    p.vols = {0.2, 0.3};
    p.corr = uniform_correlation(2, 0.4);
    p.initial_prices = {100.0, 50.0};
    p.dt = 0.01;
    p.steps = 100;
    return p;
}

} // namespace

TEST_CASE("theta assembly: identity correlation and a hand case") {
    const auto diag = assemble_theta({0.2, 0.3}, uniform_correlation(2, 0.0));
    CHECK(diag(0, 0) == doctest::Approx(0.04));
    CHECK(diag(1, 1) == doctest::Approx(0.09));
    CHECK(diag(0, 1) == 0.0);

    const auto t = assemble_theta({1.0, 1.0}, uniform_correlation(2, 0.5));
    CHECK(t(0, 0) == 1.0);
    CHECK(t(0, 1) == 0.5);
    CHECK(t(1, 0) == 0.5);
    CHECK(t(1, 1) == 1.0);
}

TEST_CASE("theta is symmetric for random valid inputs") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 2 + rng.uniform_int(5);
        std::vector<double> vols(k);
        for (auto& v : vols) v = rng.uniform(0.05, 0.5);
        const auto theta = assemble_theta(vols, uniform_correlation(k, rng.uniform(-0.2, 0.9)));
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) CHECK(theta(i, j) == theta(j, i));
        }
    }
}

TEST_CASE("covariance factor round-trips and rejects non-PD correlation") {
    const auto f = make_covariance_factor({0.2, 0.3}, uniform_correlation(2, 0.4));
    CHECK(max_abs_diff(mul_aat(f.a), f.theta) < 1e-10);

    CorrelationMatrix bad;
    bad.values = Matrix(2, 2, 1.0); // perfectly correlated: singular
    CHECK_THROWS_AS(make_covariance_factor({0.2, 0.3}, bad), std::runtime_error);
}

TEST_CASE("near-zero volatility collapses to the deterministic drift path") {
    GbmParams p = base_params();
    p.vols = {1e-8, 1e-8};
    p.corr = uniform_correlation(2, 0.0);
    p.steps = 50;
    Rng rng(7);
    const PriceSeries s = simulate_paths(p, rng);
    for (int i = 0; i < 2; ++i) {
        const double t_end = p.dt * p.steps;
        const double expect = p.initial_prices[i] * std::exp(p.drifts[i] * t_end);
        CHECK(std::fabs(s.prices(i, p.steps) / expect - 1.0) < 1e-4);
    }
}

TEST_CASE("drift alpha = vol^2/2 makes log increments mean-zero") {
    GbmParams p;
    p.drifts = {0.02};
    p.vols = {0.2};
    p.drifts[0] = 0.5 * p.vols[0] * p.vols[0];
    p.corr = uniform_correlation(1, 0.0);
    p.initial_prices = {1.0};
    p.dt = 0.01;
    p.steps = 100000;
    Rng rng(11);
    const PriceSeries s = simulate_paths(p, rng);
    double sum = 0.0;
    for (int t = 0; t < p.steps; ++t) sum += std::log(s.prices(0, t + 1) / s.prices(0, t));
    const double mean = sum / p.steps;
    const double se = p.vols[0] * std::sqrt(p.dt) / std::sqrt(static_cast<double>(p.steps));
    CHECK(std::fabs(mean) < 4.0 * se);
}

TEST_CASE("log-increment covariance reproduces theta * dt") {
    GbmParams p;
    p.drifts = {0.05, 0.02, 0.04};
    p.vols = {0.2, 0.25, 0.15};
    p.corr = uniform_correlation(3, 0.5);
    p.initial_prices = {1.0, 1.0, 1.0};
    p.dt = 0.02;
    p.steps = 100000;
    Rng rng(13);
    const PriceSeries s = simulate_paths(p, rng);

    const int k = 3;
    Matrix inc(k, p.steps);
    for (int i = 0; i < k; ++i) {
        for (int t = 0; t < p.steps; ++t) inc(i, t) = std::log(s.prices(i, t + 1) / s.prices(i, t));
    }
    std::vector<double> mean(k, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int t = 0; t < p.steps; ++t) mean[i] += inc(i, t);
        mean[i] /= p.steps;
    }
    const Matrix theta = assemble_theta(p.vols, p.corr);
    for (int i = 0; i < k; ++i) {
        for (int j = i; j < k; ++j) {
            double cov = 0.0;
            for (int t = 0; t < p.steps; ++t) cov += (inc(i, t) - mean[i]) * (inc(j, t) - mean[j]);
            cov /= (p.steps - 1);
            const double expect = theta(i, j) * p.dt;
            // Gaussian covariance standard error.
            const double se = std::sqrt((theta(i, i) * theta(j, j) + theta(i, j) * theta(i, j)) *
                                        p.dt * p.dt / p.steps);
            CHECK(std::fabs(cov - expect) < 5.0 * se);
        }
    }
}

TEST_CASE("paths are strictly positive and bit-identical under one seed") {
    GbmParams p = base_params();
    Rng a(101), b(101);
    const PriceSeries s1 = simulate_paths(p, a);
    const PriceSeries s2 = simulate_paths(p, b);
    for (std::size_t i = 0; i < s1.prices.data.size(); ++i) {
        CHECK(s1.prices.data[i] > 0.0);
        CHECK(s1.prices.data[i] == s2.prices.data[i]);
    }
    Rng c(102);
    const PriceSeries s3 = simulate_paths(p, c);
    CHECK(s3.prices(0, p.steps) != s1.prices(0, p.steps));
}

TEST_CASE("simulated prices feed the CSV round trip") {
    GbmParams p = base_params();
    p.steps = 20;
    Rng rng(15);
    const PriceSeries s = simulate_paths(p, rng);
    CHECK(s.asset_ids[0] == "A1");
    const auto path = "/tmp/gbm_roundtrip.csv";
    write_prices_csv(s, path);
    const PriceSeries back = load_prices(path);
    for (std::size_t i = 0; i < s.prices.data.size(); ++i) {
        CHECK(back.prices.data[i] == s.prices.data[i]);
    }
}

TEST_CASE("parameter validation rejects bad inputs") {
    GbmParams p = base_params();
    p.vols[0] = 0.0;
    CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
    p = base_params();
    p.dt = 0.0;
    CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
    p = base_params();
    p.initial_prices = {1.0};
    CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
    p = base_params();
    p.steps = 0;
    CHECK_THROWS_AS(validate_params(p), std::invalid_argument);
}
