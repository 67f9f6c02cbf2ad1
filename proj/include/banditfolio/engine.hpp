#pragma once

#include <array>
#include <string>
#include <vector>

#include "banditfolio/bandit.hpp"
#include "banditfolio/cvar.hpp"
#include "banditfolio/ingest.hpp"

namespace banditfolio {

/// Long-only, self-financed allocation: non-negative entries summing to 1.
struct PortfolioWeights {
    std::vector<double> w;

    static PortfolioWeights one_hot(int k, int asset);
    static PortfolioWeights uniform(int k);
    int size() const { return static_cast<int>(w.size()); }
};

/// Throws unless the weights lie on the simplex within 1e-9.
void validate_simplex(const PortfolioWeights& p);

/// omega* = lambda * m + (1 - lambda) * c.
PortfolioWeights combine(const PortfolioWeights& m, const PortfolioWeights& c, double lambda);

/// Policy identifiers, in ledger emission order.
enum class Policy { Combined = 0, Ucb1, Cvar, EpsilonGreedy, EquallyWeighted };
inline constexpr std::array<Policy, 5> kAllPolicies = {
    Policy::Combined, Policy::Ucb1, Policy::Cvar, Policy::EpsilonGreedy,
    Policy::EquallyWeighted};

const std::string& policy_name(Policy p);

struct EngineConfig {
    int k = 5;
    int n = 200;
    int delta = 50;
    double lambda = 0.9;
    double gamma = 0.95;
    double epsilon = 0.1;
    RewardScaler scaler;
    std::vector<Policy> policies{kAllPolicies.begin(), kAllPolicies.end()};
    std::uint64_t seed = 0; // drives the epsilon-greedy draw stream
};

void validate_config(const EngineConfig& c);

struct PolicyTrial {
    PortfolioWeights weights;
    double reward = 0.0;
    double cum_reward = 0.0;
};

/// One ledger entry: per-policy allocations and rewards for trial t,
/// plus the bandit arm chosen that trial.
struct TrialRecord {
    int trial = 0;            // 1-based
    int ucb_choice = -1;      // 0-based asset selected by the bandit rule
    int egreedy_choice = -1;  // -1 when the policy is disabled
    std::vector<PolicyTrial> policies; // parallel to EngineConfig::policies
};

/// Sequential state machine for one run. Trial t computes the bandit
/// one-hot and the CVaR-minimizing allocation, blends them, realizes
/// rewards for every enabled policy against the same return vector, then
/// folds the observation into the bandit state and the scenario buffer.
class Engine {
public:
    Engine(EngineConfig config, ReturnMatrix history);

    TrialRecord step(const std::vector<double>& returns);
    const EngineConfig& config() const { return config_; }
    long clamp_count() const { return clamp_count_; }
    const std::vector<int>& ucb_selections() const { return ucb_selections_; }

private:
    EngineConfig config_;
    ReturnMatrix history_;
    ReturnMatrix observed_;
    int trial_ = 1;
    UcbState ucb_state_;
    UcbState egreedy_state_;
    Rng egreedy_rng_;
    long clamp_count_ = 0;
    std::vector<double> cum_rewards_;
    std::vector<int> ucb_selections_;

    bool enabled(Policy p) const;
};

/// Runs the full investment window: future must have exactly config.n
/// columns and history exactly config.delta.
std::vector<TrialRecord> run_engine(const EngineConfig& config, const ReturnMatrix& history,
                                    const ReturnMatrix& future, long* clamp_count = nullptr,
                                    std::vector<int>* ucb_selections = nullptr);

/// wealth_t = exp(cumulative reward through t), wealth_0 = 1 omitted.
std::vector<double> wealth_curve(const std::vector<TrialRecord>& records, Policy policy,
                                 const std::vector<Policy>& layout);

} // namespace banditfolio
