"""Sequential martingale-hypothesis tests for price paths.

A price path is embedded into a coin-tossing game on a multiplicative
grid; prudent betting strategies (beta-binomial and first-order Markov)
turn the game into an anytime-valid sequential test, with diagnostics and
proportional transaction-cost analysis on top.
"""

from .costs import (
    CostParams,
    CostRunResult,
    CriticalCost,
    cost_step,
    critical_cost,
    optimal_beta,
    run_markov_with_costs,
)
from .diagnostics import (
    EmpiricalStats,
    PathStats,
    empirical_probs,
    holder_from_prob,
    path_stats,
)
from .embedding import Embedding, Grid, counts, embed, grid_from_eta
from .errors import (
    CapacityError,
    ConfigError,
    GridBetError,
    InsufficientDataError,
    OrderingError,
    ParseError,
    PrudenceError,
)
from .paths import (
    FbmParams,
    GbmParams,
    PricePath,
    generate_fbm_exp,
    generate_gbm,
    load_price_csv,
)
from .sequential import TestConfig, TestOutcome, bonferroni, run_max_test, run_stopping_test
from .strategies import (
    BetaBinomialParams,
    CapitalProcess,
    asymptotic_log_capital,
    bb_bet,
    bb_capital_closed,
    coupled_hyperparams,
    kl_divergence,
    markov_bet,
    markov_capital_closed,
    markov_growth_rate,
    run_bb,
    run_markov,
)

__version__ = "0.1.0"

__all__ = [
    "BetaBinomialParams", "CapacityError", "CapitalProcess", "ConfigError",
    "CostParams", "CostRunResult", "CriticalCost", "Embedding", "EmpiricalStats",
    "FbmParams", "GbmParams", "Grid", "GridBetError", "InsufficientDataError",
    "OrderingError", "ParseError", "PathStats", "PricePath", "PrudenceError",
    "TestConfig", "TestOutcome", "asymptotic_log_capital", "bb_bet",
    "bb_capital_closed", "bonferroni", "cost_step", "counts", "coupled_hyperparams",
    "critical_cost", "embed", "empirical_probs", "generate_fbm_exp", "generate_gbm",
    "grid_from_eta", "holder_from_prob", "kl_divergence", "load_price_csv",
    "markov_bet", "markov_capital_closed", "markov_growth_rate", "optimal_beta",
    "path_stats", "run_bb", "run_markov", "run_markov_with_costs", "run_max_test",
    "run_stopping_test",
]
