"""Markov strategy under proportional transaction costs.

Each round the trader pays c per unit of traded monetary amount.  With
grid returns d+ = delta (up) and d- = -delta/(1+delta) (down), the
capital update is

    K_n = K_{n-1} (1 + mu_{n-1} ds_n + beta_n (ds_n - c sgn beta_n)),

where mu is the fraction of capital held in the asset and beta the traded
fraction.  The trade size maximizes the conditional expected log growth;
because the outcome is two-point, the first-order condition is linear in
beta and the buy/sell roots are closed-form, with a hold region where
both one-sided derivatives say "don't trade".  The carried exposure is
the post-move asset fraction, which makes the c = 0 case reduce exactly
to the frictionless Markov strategy.

Costs are charged on any nonzero trade, including an opening trade at
round 1; in practice round 1 holds because the round-1 predictive equals
the fair probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import Embedding
from .errors import ConfigError, PrudenceError
from .strategies import BetaBinomialParams, markov_predictive_series


@dataclass(frozen=True)
class CostParams:
    """Unit cost c (fraction of traded monetary amount) plus the
    hyperparameters of the conditional predictive."""

    c: float
    params: BetaBinomialParams

    def __post_init__(self):
        if self.c < 0:
            raise ConfigError("unit cost must be >= 0")


@dataclass(frozen=True)
class CostRunResult:
    """Capital path of a costed run.

    When costs make every position insolvent for some outcome (an
    over-leveraged carry that cannot be unwound), the run is ruined: the
    capital is 0 (log capital -inf) from ``ruin_round`` on and no further
    trades happen.
    """

    log_capital: np.ndarray     # length n+1, entry 0 = 0
    exposures: np.ndarray       # asset fraction mu after each round, length n+1
    trades: np.ndarray          # beta per round, length n
    hold_rounds: int
    final_log_capital: float
    ruined: bool = False
    ruin_round: int | None = None

    @property
    def final_capital(self) -> float:
        try:
            return math.exp(self.final_log_capital)
        except OverflowError:
            return math.inf


@dataclass(frozen=True)
class CriticalCost:
    """Smallest unit cost (scanned in steps of 0.01 delta) that pushes the
    final capital below 1.  flag is "ok", "degenerate" (already below 1
    without costs) or "not_found" (no crossing below delta)."""

    c_star: float
    c_star_in_delta: float
    flag: str


def growth_factor(mu: float, beta: float, ds: float, c: float) -> float:
    """One-round multiplicative factor 1 + mu ds + beta (ds - c sgn beta)."""
    sgn = 0.0 if beta == 0.0 else math.copysign(1.0, beta)
    return 1.0 + mu * ds + beta * (ds - c * sgn)


def cost_step(prev_capital: float, mu_prev: float, beta: float,
              ds: float, c: float) -> float:
    """Apply one cost-aware capital update; raises on a non-positive factor."""
    factor = growth_factor(mu_prev, beta, ds, c)
    if factor <= 0.0:
        raise PrudenceError(
            f"growth factor {factor} <= 0 for mu={mu_prev}, beta={beta}, ds={ds}, c={c}")
    return prev_capital * factor


def log_growth_derivative(beta: float, p: float, mu: float,
                          delta: float, c: float, side: int) -> float:
    """d/d beta of expected log growth, with sgn beta taken as ``side``
    (+1 or -1).  Used as the root-finding target; the production path uses
    the closed-form roots below."""
    d_up = delta
    d_dn = -delta / (1.0 + delta)
    cs = c * side
    return (
        p * (d_up - cs) / (1.0 + mu * d_up + beta * (d_up - cs))
        + (1.0 - p) * (d_dn - cs) / (1.0 + mu * d_dn + beta * (d_dn - cs))
    )


def optimal_beta(p: float, mu_prev: float, delta: float, c: float):
    """Log-growth-optimal trade for a two-point outcome with costs.

    Returns (beta, decision) with decision in {"buy", "sell", "hold"}.
    Buys when the right derivative at 0 is positive, sells when the left
    derivative is negative, otherwise holds; the traded root solves the
    linear first-order condition exactly.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly in (0,1)")
    d_up = delta
    d_dn = -delta / (1.0 + delta)
    up_hold = 1.0 + mu_prev * d_up
    dn_hold = 1.0 + mu_prev * d_dn

    def _root(a_c, b_c):
        return -(p * a_c * dn_hold + (1.0 - p) * b_c * up_hold) / (a_c * b_c)

    # A carried exposure so extreme that holding is imprudent for one of
    # the two outcomes forces a trade back toward solvency; the FOC root
    # on the forced branch is the interior optimum of the concave growth.
    if up_hold <= 0.0:
        if dn_hold <= 0.0:
            raise PrudenceError(f"no prudent position from mu={mu_prev}")
        return _root(d_up - c, d_dn - c), "buy"
    if dn_hold <= 0.0:
        if d_dn + c >= 0.0:
            raise PrudenceError(
                f"cost c={c} too large to unwind exposure mu={mu_prev}")
        return _root(d_up + c, d_dn + c), "sell"

    g_right = p * (d_up - c) / up_hold + (1.0 - p) * (d_dn - c) / dn_hold
    g_left = p * (d_up + c) / up_hold + (1.0 - p) * (d_dn + c) / dn_hold
    if g_right > 0.0:
        return _root(d_up - c, d_dn - c), "buy"
    if g_left < 0.0:
        return _root(d_up + c, d_dn + c), "sell"
    return 0.0, "hold"


def run_markov_with_costs(embedding: Embedding, params: BetaBinomialParams,
                          c: float) -> CostRunResult:
    """Run the Markov strategy with per-trade proportional cost c.

    The conditional predictive is the same one the frictionless Markov
    strategy uses; at c = 0 the final log capital coincides with
    run_markov exactly (up to float roundoff).
    """
    grid = embedding.grid
    if c < 0:
        raise ConfigError("unit cost must be >= 0")
    if c >= grid.delta:
        raise ConfigError(
            f"unit cost c={c} >= delta={grid.delta}: every trade would lose")
    x = embedding.directions
    n = x.size
    p_seq = markov_predictive_series(x, params, grid.rho)
    d_up = grid.delta
    d_dn = -grid.delta / (1.0 + grid.delta)

    log_k = np.zeros(n + 1)
    mus = np.zeros(n + 1)
    betas = np.zeros(n)
    mu = 0.0
    hold_rounds = 0
    ruin_round = None
    for i in range(n):
        ruined_here = False
        try:
            beta, decision = optimal_beta(p_seq[i], mu, grid.delta, c)
        except PrudenceError:
            ruined_here = True
        if not ruined_here:
            # a forced trade out of an over-leveraged carry can have no
            # solvent solution; then some outcome wipes the capital out
            f_up = growth_factor(mu, beta, d_up, c)
            f_dn = growth_factor(mu, beta, d_dn, c)
            ruined_here = f_up <= 0.0 or f_dn <= 0.0
        if ruined_here:
            ruin_round = i + 1
            log_k[i + 1:] = -math.inf
            mus[i + 1:] = math.nan
            betas[i:] = math.nan
            break
        if decision == "hold":
            hold_rounds += 1
        ds = d_up if x[i] == 1 else d_dn
        factor = f_up if x[i] == 1 else f_dn
        log_k[i + 1] = log_k[i] + math.log(factor)
        mu = (mu + beta) * (1.0 + ds) / factor
        mus[i + 1] = mu
        betas[i] = beta
    return CostRunResult(
        log_capital=log_k,
        exposures=mus,
        trades=betas,
        hold_rounds=hold_rounds,
        final_log_capital=float(log_k[-1]),
        ruined=ruin_round is not None,
        ruin_round=ruin_round,
    )


def critical_cost(embedding: Embedding, params: BetaBinomialParams,
                  resolution: float = 0.01) -> CriticalCost:
    """Scan c = 0, r*delta, 2r*delta, ... for the first cost at which the
    final capital drops below 1.

    The scan is a forward grid walk (monotonicity of final capital in c is
    not assumed) at the given resolution in units of delta.
    """
    delta = embedding.grid.delta
    frictionless = run_markov_with_costs(embedding, params, 0.0)
    if frictionless.final_log_capital <= 0.0:
        return CriticalCost(0.0, 0.0, "degenerate")
    steps = int(math.floor(1.0 / resolution))
    for j in range(1, steps):
        c = j * resolution * delta
        if c >= delta:
            break
        result = run_markov_with_costs(embedding, params, c)
        if result.final_log_capital < 0.0:
            return CriticalCost(c, j * resolution, "ok")
    return CriticalCost(math.nan, math.nan, "not_found")
