#include "banditfolio/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace banditfolio {

PortfolioWeights PortfolioWeights::one_hot(int k, int asset) {
    if (asset < 0 || asset >= k) throw std::invalid_argument("one_hot: asset index out of range");
    PortfolioWeights p;
    p.w.assign(k, 0.0);
    p.w[asset] = 1.0;
    return p;
}

PortfolioWeights PortfolioWeights::uniform(int k) {
    if (k < 1) throw std::invalid_argument("uniform: k must be positive");
    PortfolioWeights p;
    p.w.assign(k, 1.0 / k);
    return p;
}

void validate_simplex(const PortfolioWeights& p) {
    double sum = 0.0;
    for (double v : p.w) {
        if (v < 0.0) throw std::runtime_error("weights: negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::runtime_error("weights: sum differs from 1");
}

PortfolioWeights combine(const PortfolioWeights& m, const PortfolioWeights& c, double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("combine: lambda outside [0,1]");
    if (m.size() != c.size()) throw std::invalid_argument("combine: dimension mismatch");
    validate_simplex(m);
    validate_simplex(c);
    PortfolioWeights out;
    out.w.resize(m.size());
    for (int i = 0; i < m.size(); ++i) out.w[i] = lambda * m.w[i] + (1.0 - lambda) * c.w[i];
    return out;
}

const std::string& policy_name(Policy p) {
    static const std::string names[] = {"combined", "ucb1", "cvar", "egreedy", "equal"};
    return names[static_cast<int>(p)];
}

void validate_config(const EngineConfig& c) {
    if (c.k < 1) throw std::invalid_argument("engine config: k must be positive");
    if (c.n < 1) throw std::invalid_argument("engine config: n must be positive");
    if (c.delta < 1) throw std::invalid_argument("engine config: delta must be positive");
    if (c.lambda < 0.0 || c.lambda > 1.0) {
        throw std::invalid_argument("engine config: lambda outside [0,1]");
    }
    if (c.gamma <= 0.0 || c.gamma >= 1.0) {
        throw std::invalid_argument("engine config: gamma outside (0,1)");
    }
    if (c.epsilon < 0.0 || c.epsilon > 1.0) {
        throw std::invalid_argument("engine config: epsilon outside [0,1]");
    }
    if (!(c.scaler.lower < c.scaler.upper)) {
        throw std::invalid_argument("engine config: scaler bounds inverted");
    }
    if (c.policies.empty()) throw std::invalid_argument("engine config: empty policy set");
}

Engine::Engine(EngineConfig config, ReturnMatrix history)
    : config_(std::move(config)),
      history_(std::move(history)),
      ucb_state_(config_.k),
      egreedy_state_(config_.k),
      egreedy_rng_(splitmix64(config_.seed ^ 0x45475245454459ULL)) {
    validate_config(config_);
    if (history_.num_assets() != config_.k) {
        throw std::invalid_argument("engine: history asset count differs from k");
    }
    if (history_.num_trials() != config_.delta) {
        throw std::invalid_argument("engine: history column count differs from delta");
    }
    observed_.asset_ids = history_.asset_ids;
    observed_.returns = Matrix(config_.k, config_.n);
    cum_rewards_.assign(config_.policies.size(), 0.0);
}

bool Engine::enabled(Policy p) const {
    return std::find(config_.policies.begin(), config_.policies.end(), p) !=
           config_.policies.end();
}

TrialRecord Engine::step(const std::vector<double>& returns) {
    const int k = config_.k;
    if (static_cast<int>(returns.size()) != k) {
        throw std::invalid_argument("engine step: return vector length mismatch");
    }
    if (trial_ > config_.n) throw std::runtime_error("engine step: past the investment window");
    const int t = trial_;

    const int ucb_choice = ucb1_select(ucb_state_);
    const PortfolioWeights bandit_arm = PortfolioWeights::one_hot(k, ucb_choice);

    PortfolioWeights risk_aware;
    const bool need_cvar = enabled(Policy::Combined) || enabled(Policy::Cvar);
    CvarSolution cvar_sol;
    if (need_cvar) {
        // One solve serves both the combined and the benchmark policy:
        // they optimize over the identical scenario set.
        ReturnMatrix observed_view;
        observed_view.asset_ids = observed_.asset_ids;
        observed_view.returns = Matrix(k, t - 1);
        for (int i = 0; i < k; ++i) {
            for (int s = 0; s < t - 1; ++s) observed_view.returns(i, s) = observed_.returns(i, s);
        }
        cvar_sol = minimize_cvar(history_, observed_view, config_.gamma, t);
        risk_aware.w = cvar_sol.weights;
        for (double& w : risk_aware.w) {
            if (w < 0.0 && w > -1e-12) w = 0.0;
        }
        validate_simplex(risk_aware);
    }

    int egreedy_choice = -1;
    if (enabled(Policy::EpsilonGreedy)) {
        egreedy_choice = epsilon_greedy_select(egreedy_state_, config_.epsilon, egreedy_rng_);
    }

    TrialRecord rec;
    rec.trial = t;
    rec.ucb_choice = ucb_choice;
    rec.egreedy_choice = egreedy_choice;
    rec.policies.resize(config_.policies.size());
    for (std::size_t pi = 0; pi < config_.policies.size(); ++pi) {
        PortfolioWeights w;
        switch (config_.policies[pi]) {
            case Policy::Combined:
                w = combine(bandit_arm, risk_aware, config_.lambda);
                break;
            case Policy::Ucb1:
                w = bandit_arm;
                break;
            case Policy::Cvar:
                w = risk_aware;
                break;
            case Policy::EpsilonGreedy:
                w = PortfolioWeights::one_hot(k, egreedy_choice);
                break;
            case Policy::EquallyWeighted:
                w = PortfolioWeights::uniform(k);
                break;
        }
        validate_simplex(w);
        double reward = 0.0;
        for (int i = 0; i < k; ++i) reward += w.w[i] * returns[i];
        cum_rewards_[pi] += reward;
        rec.policies[pi] = {std::move(w), reward, cum_rewards_[pi]};
    }

    // Classic bandit feedback: only the selected asset's realized return
    // reaches the bandit state, scaled onto [0,1].
    ucb_state_ = update_state(ucb_state_, ucb_choice,
                              scale_reward(config_.scaler, returns[ucb_choice], &clamp_count_));
    ucb_selections_.push_back(ucb_choice);
    if (egreedy_choice >= 0) {
        egreedy_state_ =
            update_state(egreedy_state_, egreedy_choice,
                         scale_reward(config_.scaler, returns[egreedy_choice], &clamp_count_));
    }
    for (int i = 0; i < k; ++i) observed_.returns(i, t - 1) = returns[i];
    ++trial_;
    return rec;
}

std::vector<TrialRecord> run_engine(const EngineConfig& config, const ReturnMatrix& history,
                                    const ReturnMatrix& future, long* clamp_count,
                                    std::vector<int>* ucb_selections) {
    if (future.num_assets() != config.k) {
        throw std::invalid_argument("run_engine: future asset count differs from k");
    }
    if (future.num_trials() != config.n) {
        throw std::invalid_argument("run_engine: future column count differs from n");
    }
    Engine engine(config, history);
    std::vector<TrialRecord> records;
    records.reserve(config.n);
    std::vector<double> r(config.k);
    for (int t = 0; t < config.n; ++t) {
        for (int i = 0; i < config.k; ++i) r[i] = future.returns(i, t);
        records.push_back(engine.step(r));
    }
    if (clamp_count) *clamp_count = engine.clamp_count();
    if (ucb_selections) *ucb_selections = engine.ucb_selections();
    return records;
}

std::vector<double> wealth_curve(const std::vector<TrialRecord>& records, Policy policy,
                                 const std::vector<Policy>& layout) {
    const auto it = std::find(layout.begin(), layout.end(), policy);
    if (it == layout.end()) {
        throw std::invalid_argument("wealth_curve: policy '" + policy_name(policy) +
                                    "' not in the run's policy set");
    }
    const std::size_t idx = static_cast<std::size_t>(it - layout.begin());
    std::vector<double> wealth;
    wealth.reserve(records.size());
    for (const auto& rec : records) wealth.push_back(std::exp(rec.policies[idx].cum_reward));
    return wealth;
}

} // namespace banditfolio
