#include "banditfolio/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace banditfolio {

double scale_reward(const RewardScaler& s, double r, long* clamp_count) {
    if (!(s.lower < s.upper)) throw std::invalid_argument("scale_reward: lower must be < upper");
    if (r < s.lower || r > s.upper) {
        if (clamp_count) ++(*clamp_count);
        r = std::clamp(r, s.lower, s.upper);
    }
    return (r - s.lower) / (s.upper - s.lower);
}

namespace {

int greedy_argmax(const std::vector<double>& values) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

} // namespace

int ucb1_select(const UcbState& state) {
    const int k = state.num_assets();
    const long t = state.trial;
    if (t <= k) return static_cast<int>(t - 1);

    std::vector<double> index(k);
    const double log_t = std::log(static_cast<double>(t));
    for (int i = 0; i < k; ++i) {
        if (state.plays[i] == 0) {
            throw std::runtime_error("ucb1_select: asset " + std::to_string(i) +
                                     " unplayed after warm-up (trial " + std::to_string(t) + ")");
        }
        index[i] = state.mean_rewards[i] + std::sqrt(2.0 * log_t / state.plays[i]);
    }
    return greedy_argmax(index);
}

int epsilon_greedy_select(const UcbState& state, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::invalid_argument("epsilon_greedy_select: epsilon outside [0,1]");
    }
    const int k = state.num_assets();
    const long t = state.trial;
    if (t <= k) return static_cast<int>(t - 1);
    for (int i = 0; i < k; ++i) {
        if (state.plays[i] == 0) {
            throw std::runtime_error("epsilon_greedy_select: asset " + std::to_string(i) +
                                     " unplayed after warm-up (trial " + std::to_string(t) + ")");
        }
    }
    if (epsilon > 0.0 && rng.uniform01() < epsilon) return rng.uniform_int(k);
    return greedy_argmax(state.mean_rewards);
}

UcbState update_state(UcbState state, int asset, double scaled_reward) {
    if (asset < 0 || asset >= state.num_assets()) {
        throw std::invalid_argument("update_state: asset index out of range");
    }
    if (scaled_reward < 0.0 || scaled_reward > 1.0) {
        throw std::invalid_argument("update_state: reward outside [0,1]");
    }
    const long n = ++state.plays[asset];
    state.mean_rewards[asset] += (scaled_reward - state.mean_rewards[asset]) / n;
    ++state.trial;
    return state;
}

double pseudo_regret(const RegretLedger& ledger, int n) {
    if (ledger.true_means.empty()) {
        throw std::invalid_argument("pseudo_regret: true means are required");
    }
    if (n < 0 || n > static_cast<int>(ledger.selections.size())) {
        throw std::invalid_argument("pseudo_regret: n exceeds recorded trials");
    }
    double mu_star = ledger.true_means[0];
    for (double m : ledger.true_means) mu_star = std::max(mu_star, m);

    std::vector<long> plays(ledger.true_means.size(), 0);
    for (int t = 0; t < n; ++t) ++plays[ledger.selections[t]];

    double regret = 0.0;
    for (std::size_t i = 0; i < plays.size(); ++i) {
        const double gap = mu_star - ledger.true_means[i];
        if (gap > 0.0) regret += gap * plays[i];
    }
    return regret;
}

double ucb1_regret_bound(const std::vector<double>& mu, double n) {
    if (mu.empty()) throw std::invalid_argument("ucb1_regret_bound: empty means");
    if (!(n >= 1.0)) throw std::invalid_argument("ucb1_regret_bound: n must be >= 1");
    double mu_star = mu[0];
    for (double m : mu) mu_star = std::max(mu_star, m);

    const double log_n = std::log(n);
    double log_term = 0.0;
    double gap_sum = 0.0;
    for (double m : mu) {
        const double gap = mu_star - m;
        if (gap > 0.0) log_term += log_n / gap;
        gap_sum += gap;
    }
    return 8.0 * log_term + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * gap_sum;
}

} // namespace banditfolio
