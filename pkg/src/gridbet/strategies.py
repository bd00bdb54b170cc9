"""Betting strategies for the grid coin-tossing game and their capital.

Both strategies bet a fraction derived from a Bayesian predictive
probability against the fair up-probability rho.  The plain
beta-binomial strategy uses the overall head count; the first-order
Markov variant runs a separate beta-binomial predictive conditional on
the previous direction (and places no bet on round 1).

Capital is accumulated in the log domain throughout; the per-round
multiplicative factor is p_hat/rho on an up and (1-p_hat)/(1-rho) on a
down, both strictly positive for any a, b > 0, so the strategies can
never go bankrupt.  Closed forms via log-gamma are provided for both
strategies and are required to agree with the round-by-round recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .embedding import Embedding, pair_count_series


@dataclass(frozen=True)
class BetaBinomialParams:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("hyperparameters a, b must be > 0")


def coupled_hyperparams(eta: float) -> BetaBinomialParams:
    """Default hyperparameters tied to the grid: a = b = 0.01/eta.

    For eta = 2^-k this is a = b = 0.01 * 2^k, which keeps the prior
    weight proportional to the hit frequency of the finer grid.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    return BetaBinomialParams(0.01 / eta, 0.01 / eta)


@dataclass(frozen=True)
class CapitalProcess:
    """Wealth sequence of a strategy, in log domain.

    log_capital has length n+1 with log_capital[0] = 0 (initial capital 1);
    bets[i] is the stake fraction announced for round i+1.
    """

    log_capital: np.ndarray
    bets: np.ndarray
    strategy: str

    def __post_init__(self):
        lk = np.asarray(self.log_capital, dtype=float)
        if lk.size < 1 or lk[0] != 0.0:
            raise ValueError("log_capital must start at 0 (unit initial capital)")
        if not np.all(np.isfinite(lk)):
            raise ValueError("capital must stay finite and positive")
        object.__setattr__(self, "log_capital", lk)
        object.__setattr__(self, "bets", np.asarray(self.bets, dtype=float))

    @property
    def n_rounds(self) -> int:
        return self.log_capital.size - 1

    @property
    def final_log_capital(self) -> float:
        return float(self.log_capital[-1])


def kl_divergence(p: float, q: float) -> float:
    """D(p||q) in nats for Bernoulli rates, with 0 log 0 = 0.

    q must lie strictly inside (0,1); p may touch the boundary.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must be in (0,1), got {q}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0,1], got {p}")
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def asymptotic_log_capital(n: int, h: int, rho: float) -> float:
    """Large-n approximation of the beta-binomial log capital:
    n * D(h/n || rho) - log(n)/2."""
    if n < 1 or not 0 <= h <= n:
        raise ValueError("need n >= 1 and 0 <= h <= n")
    return n * kl_divergence(h / n, rho) - 0.5 * math.log(n)


def markov_growth_rate(hurst: float) -> float:
    """Per-hit log-capital growth of the Markov strategy on a path with
    Hoelder exponent ``hurst``: D(2^(1 - 1/hurst) || 1/2)."""
    if not 0.0 < hurst < 1.0:
        raise ValueError("hurst must lie in (0,1)")
    p_cont = 2.0 ** (1.0 - 1.0 / hurst)
    return kl_divergence(p_cont, 0.5)


def bb_bet(h_prev: int, n: int, params: BetaBinomialParams, rho: float) -> float:
    """Stake fraction nu_n of the beta-binomial strategy at round n, given
    h_prev heads among the first n-1 outcomes."""
    if n < 1 or not 0 <= h_prev <= n - 1:
        raise ValueError("need n >= 1 and 0 <= h_prev <= n-1")
    p_hat = (params.a + h_prev) / (params.a + params.b + n - 1)
    return (p_hat - rho) / (rho * (1.0 - rho))


def bb_capital_closed(h: int, t: int, params: BetaBinomialParams, rho: float) -> float:
    """Closed-form log capital of the beta-binomial strategy after h ups
    and t downs (order-independent)."""
    if h < 0 or t < 0:
        raise ValueError("counts must be >= 0")
    a, b = params.a, params.b
    return (
        gammaln(a + h) - gammaln(a)
        + gammaln(b + t) - gammaln(b)
        + gammaln(a + b) - gammaln(a + b + h + t)
        - h * math.log(rho) - t * math.log1p(-rho)
    )


def bb_log_capital_series(x, params: BetaBinomialParams, rho: float):
    """Round-by-round recursion: returns (log_capital[0..n], bets[1..n])."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        return np.zeros(1), np.zeros(0)
    h_prev = np.concatenate(([0.0], np.cumsum(x)[:-1]))
    rounds = np.arange(1, n + 1, dtype=float)
    p_hat = (params.a + h_prev) / (params.a + params.b + rounds - 1.0)
    log_factor = np.where(
        x == 1.0,
        np.log(p_hat) - math.log(rho),
        np.log1p(-p_hat) - math.log1p(-rho),
    )
    nu = (p_hat - rho) / (rho * (1.0 - rho))
    return np.concatenate(([0.0], np.cumsum(log_factor))), nu


def run_bb(embedding: Embedding, params: BetaBinomialParams | None = None,
           rho: float | None = None) -> CapitalProcess:
    """Run the beta-binomial strategy over an embedding's directions."""
    if params is None:
        params = coupled_hyperparams(embedding.grid.eta)
    if rho is None:
        rho = embedding.grid.rho
    log_capital, nu = bb_log_capital_series(embedding.directions, params, rho)
    return CapitalProcess(log_capital, nu, strategy="bb")


def markov_bet(last_x, pair_counts, params: BetaBinomialParams, rho: float) -> float:
    """Stake fraction of the first-order Markov strategy.

    ``last_x`` is the previous direction (1/0) or None on round 1, where
    no bet is placed.  ``pair_counts`` is (q11, q10, q01, q00) over the
    pairs seen so far.
    """
    if last_x is None:
        return 0.0
    q11, q10, q01, q00 = pair_counts
    if last_x == 1:
        p_hat = (q11 + params.a) / (q11 + q10 + params.a + params.b)
    else:
        p_hat = (q01 + params.a) / (q01 + q00 + params.a + params.b)
    return (p_hat - rho) / (rho * (1.0 - rho))


def markov_capital_closed(q11: int, q10: int, q01: int, q00: int,
                          params: BetaBinomialParams, rho: float) -> float:
    """Closed-form log capital of the Markov strategy from pair counts.

    The pair counts cover (x_{i-1}, x_i) for i = 2..n; round 1 carries no
    bet, so the rho-exponents follow the pair counts rather than the raw
    head/tail counts.
    """
    if min(q11, q10, q01, q00) < 0:
        raise ValueError("counts must be >= 0")
    a, b = params.a, params.b
    return (
        2.0 * (gammaln(a + b) - gammaln(a) - gammaln(b))
        + gammaln(q11 + a) + gammaln(q10 + b)
        + gammaln(q01 + a) + gammaln(q00 + b)
        - gammaln(q11 + q10 + a + b) - gammaln(q01 + q00 + a + b)
        - (q11 + q01) * math.log(rho) - (q10 + q00) * math.log1p(-rho)
    )


def markov_predictive_series(x, params: BetaBinomialParams, rho: float) -> np.ndarray:
    """Per-round predictive up-probability of the Markov strategy.

    Entry i (0-based) is the probability used at round i+1; round 1 uses
    rho itself (no bet).
    """
    x = np.asarray(x)
    n = x.size
    p = np.full(n, rho, dtype=float)
    if n < 2:
        return p
    c11, c10, c01, c00 = pair_count_series(x)
    i = np.arange(2, n + 1)
    last = x[i - 2]
    avail = i - 2  # pairs observed before round i
    a, b = params.a, params.b
    p_up = (c11[avail] + a) / (c11[avail] + c10[avail] + a + b)
    p_dn = (c01[avail] + a) / (c01[avail] + c00[avail] + a + b)
    p[1:] = np.where(last == 1, p_up, p_dn)
    return p


def markov_log_capital_series(x, params: BetaBinomialParams, rho: float):
    """Round-by-round Markov recursion (nu_1 = 0): (log_capital, bets)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        return np.zeros(1), np.zeros(0)
    p_hat = markov_predictive_series(x, params, rho)
    log_factor = np.where(
        x == 1.0,
        np.log(p_hat) - math.log(rho),
        np.log1p(-p_hat) - math.log1p(-rho),
    )
    log_factor[0] = 0.0  # no bet on round 1
    nu = (p_hat - rho) / (rho * (1.0 - rho))
    nu[0] = 0.0
    return np.concatenate(([0.0], np.cumsum(log_factor))), nu


def run_markov(embedding: Embedding, params: BetaBinomialParams | None = None,
               rho: float | None = None) -> CapitalProcess:
    """Run the first-order Markov strategy over an embedding's directions."""
    if params is None:
        params = coupled_hyperparams(embedding.grid.eta)
    if rho is None:
        rho = embedding.grid.rho
    log_capital, nu = markov_log_capital_series(embedding.directions, params, rho)
    return CapitalProcess(log_capital, nu, strategy="markov")
