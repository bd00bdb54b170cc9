"""Running empirical probabilities, roughness estimates, and path summaries.

Conditional continuation frequencies of the direction sequence translate
into running Hoelder-exponent estimates via the exact inversion
H = log 2 / log(1 + 1/p) of the relation 1/(2^(1/H) - 1) = p.  Entries
whose conditioning event has not occurred yet are emitted as NaN so that
downstream consumers can tell "no data" from "zero frequency"; they are
never zero-filled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import Embedding, pair_count_series


@dataclass(frozen=True)
class EmpiricalStats:
    """Per-round empirical probability and Hoelder series (NaN = undefined).

    Index i holds the value after round i+1.  p11/p00 condition on the
    previous direction; their denominators count pair-predecessors, so
    they are proper conditional frequencies matching the Markov
    predictive.
    """

    p1: np.ndarray
    p11: np.ndarray
    p00: np.ndarray
    h1: np.ndarray
    h0: np.ndarray


@dataclass(frozen=True)
class PathStats:
    """Grid-level path summary: total variation at grid resolution
    (tv = n* eta), net log change at the last hit (l), and their ratio
    zeta in [-1, 1].  defined is False when there were no hits."""

    tv: float
    l: float
    zeta: float
    defined: bool = True


def holder_from_prob(p: float) -> float:
    """Hoelder exponent implied by continuation probability p in (0, 1]:
    the exact inverse of p = 1/(2^(1/H) - 1)."""
    if p <= 0:
        raise ValueError(f"continuation probability must be > 0, got {p}")
    if p > 1:
        raise ValueError(f"continuation probability must be <= 1, got {p}")
    return math.log(2.0) / math.log1p(1.0 / p)


def _holder_array(p: np.ndarray) -> np.ndarray:
    out = np.full_like(p, np.nan)
    ok = np.isfinite(p) & (p > 0)
    out[ok] = math.log(2.0) / np.log1p(1.0 / p[ok])
    return out


def empirical_probs(embedding: Embedding) -> EmpiricalStats:
    """Running empirical probabilities of the direction sequence.

    p1[n] = h_n / n; p11[n] = q11_n / (#up predecessors), p00[n] =
    q00_n / (#down predecessors), NaN while the conditioning count is 0.
    """
    x = np.asarray(embedding.directions, dtype=float)
    n = x.size
    if n == 0:
        empty = np.zeros(0)
        return EmpiricalStats(empty, empty, empty, empty, empty)
    rounds = np.arange(1, n + 1, dtype=float)
    h = np.cumsum(x)
    p1 = h / rounds
    c11, c10, c01, c00 = pair_count_series(x)
    # pair-predecessor counts after round n: ups/downs among x_1..x_{n-1}
    up_pred = np.concatenate(([0.0], h[:-1]))
    dn_pred = np.concatenate(([0.0], rounds[:-1] - h[:-1]))
    n_pairs = rounds - 1.0
    q11 = c11[n_pairs.astype(int)]
    q00 = c00[n_pairs.astype(int)]
    with np.errstate(invalid="ignore", divide="ignore"):
        p11 = np.where(up_pred > 0, q11 / np.where(up_pred > 0, up_pred, 1.0), np.nan)
        p00 = np.where(dn_pred > 0, q00 / np.where(dn_pred > 0, dn_pred, 1.0), np.nan)
    return EmpiricalStats(p1, p11, p00, _holder_array(p11), _holder_array(p00))


def path_stats(embedding: Embedding) -> PathStats:
    """Total grid variation, net log change, and their ratio zeta."""
    n_star = embedding.n_star
    if n_star == 0:
        return PathStats(tv=0.0, l=math.nan, zeta=math.nan, defined=False)
    h = int(np.count_nonzero(embedding.directions))
    t = n_star - h
    eta = embedding.grid.eta
    return PathStats(
        tv=n_star * eta,
        l=eta * (h - t),
        zeta=(h - t) / n_star,
    )
