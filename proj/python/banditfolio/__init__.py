"""Sequential portfolio selection: MST peripherality filtering, a UCB1/CVaR
blended policy, and correlated GBM market simulation."""

from ._core import (
    UcbState,
    combine_portfolios,
    correlation,
    covariance_eigenvalues,
    empirical_cvar,
    empirical_var,
    load_prices,
    log_returns,
    mantegna_distance,
    merge_config,
    min_cvar_portfolio,
    peripheral_assets,
    preset_config,
    run_experiment,
    scale_reward,
    simulate_gbm,
    spanning_tree,
    ucb1_regret_bound,
    ucb1_select,
    update_state,
    write_prices,
)

__all__ = [
    "UcbState",
    "combine_portfolios",
    "correlation",
    "covariance_eigenvalues",
    "empirical_cvar",
    "empirical_var",
    "load_prices",
    "log_returns",
    "mantegna_distance",
    "merge_config",
    "min_cvar_portfolio",
    "peripheral_assets",
    "preset_config",
    "run_experiment",
    "scale_reward",
    "simulate_gbm",
    "spanning_tree",
    "ucb1_regret_bound",
    "ucb1_select",
    "update_state",
    "write_prices",
]
