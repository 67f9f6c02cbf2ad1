#pragma once

#include <vector>

#include "banditfolio/rng.hpp"

namespace banditfolio {

/// Affine map from raw log returns onto [0, 1], clamping outside
/// [lower, upper]. Clamp events are counted by the caller.
struct RewardScaler {
    double lower = -0.1;
    double upper = 0.1;
};

/// Maps r onto [0, 1]; increments *clamp_count when r falls outside the
/// scaler bounds (pass nullptr to skip counting).
double scale_reward(const RewardScaler& s, double r, long* clamp_count = nullptr);

/// Per-asset play counts and empirical means of scaled rewards, plus the
/// 1-based index of the current trial. Updated functionally.
struct UcbState {
    std::vector<long> plays;
    std::vector<double> mean_rewards;
    long trial = 1;

    explicit UcbState(int k) : plays(k, 0), mean_rewards(k, 0.0) {}
    int num_assets() const { return static_cast<int>(plays.size()); }
};

/// UCB1 selection (0-based asset index): plays asset t-1 while t <= K,
/// then the argmax of mean + sqrt(2 ln t / plays), ties to lowest index.
int ucb1_select(const UcbState& state);

/// epsilon-greedy selection (0-based): warm-up like UCB1 for t <= K, then
/// a uniformly random asset with probability epsilon, otherwise the
/// empirical-mean argmax with ties to lowest index.
int epsilon_greedy_select(const UcbState& state, double epsilon, Rng& rng);

/// Returns the state advanced by one observation of `scaled_reward` on
/// `asset` (incremental mean; trial incremented).
UcbState update_state(UcbState state, int asset, double scaled_reward);

/// Selection history plus the true per-asset means (simulation context).
struct RegretLedger {
    std::vector<double> true_means;
    std::vector<int> selections; // 0-based chosen asset per trial
};

/// Gap-weighted play counts over the first n trials:
/// sum over suboptimal i of (mu* - mu_i) * T_i(n).
double pseudo_regret(const RegretLedger& ledger, int n);

/// Auer et al. finite-time bound for UCB1 with means in [0, 1]:
/// 8 sum_{i: mu_i < mu*} (ln n / (mu* - mu_i)) + (1 + pi^2/3) sum_i (mu* - mu_i).
double ucb1_regret_bound(const std::vector<double>& mu, double n);

} // namespace banditfolio
