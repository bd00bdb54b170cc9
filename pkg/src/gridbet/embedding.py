"""Reduction of a price path to a coin-tossing game on a multiplicative grid.

The grid has log-spacing ``eta`` and is anchored at the first observed
price.  Each time the log-price first reaches the level one step above or
below the current anchor, a hit is recorded (direction 1 = up, 0 = down)
and the anchor moves to the hit level, so successive hit prices differ by
the exact multiplicative factor (1+delta)^{+-1}.

Between samples the log-price is treated as linear, so a single
observation that jumps across m >= 2 levels emits m same-direction hits
with log-linearly interpolated times.  A sample landing exactly on a
level counts as a hit.  An alternative "single" mode advances the anchor
at most one level per sample, for sensitivity analysis of the
interpolation rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import InsufficientDataError
from .paths import PricePath

# slack (in units of eta) for deciding that a sample sits on a grid level;
# covers float error in logs, far below any real price move
_LEVEL_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """Multiplicative price grid with log-spacing eta.

    delta = e^eta - 1 is the up-step as a simple return; rho = 1/(2+delta)
    = 1/(1+e^eta) is the up-probability that makes one grid step a fair
    bet.
    """

    eta: float
    delta: float
    rho: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be > 0")


def grid_from_eta(eta: float) -> Grid:
    """Build a Grid from the log-spacing eta > 0."""
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    delta = math.expm1(eta)
    return Grid(eta=eta, delta=delta, rho=1.0 / (2.0 + delta))


@dataclass(frozen=True)
class Embedding:
    """Hit sequence extracted from a price path on a given grid."""

    grid: Grid
    directions: np.ndarray        # int8, 1 = up, 0 = down
    waiting_times: np.ndarray     # time between successive hits (source units)
    hit_indices: np.ndarray       # index of the source sample whose interval produced the hit
    hit_times: np.ndarray         # interpolated hit times
    hit_prices: np.ndarray        # price at each hit (exactly on the grid)
    start_time: float
    start_price: float
    label: str = ""
    time_units: str = "seconds"

    @property
    def n_star(self) -> int:
        return int(self.directions.size)

    def prefix(self, n: int) -> "Embedding":
        """The embedding truncated to its first n hits."""
        if not 0 <= n <= self.n_star:
            raise ValueError(f"n={n} out of range 0..{self.n_star}")
        return Embedding(
            grid=self.grid,
            directions=self.directions[:n],
            waiting_times=self.waiting_times[:n],
            hit_indices=self.hit_indices[:n],
            hit_times=self.hit_times[:n],
            hit_prices=self.hit_prices[:n],
            start_time=self.start_time,
            start_price=self.start_price,
            label=self.label,
            time_units=self.time_units,
        )


@njit(cache=True)
def _hit_scan(z, t, tol, single):  # pragma: no cover - exercised via embed()
    """Scan scaled log-prices z = (log S - log S_0)/eta for level hits.

    Returns (directions, hit_times, hit_indices, levels).  Within one
    sample interval the path is linear in z, so multiple crossings are all
    in one direction; crossing times are interpolated on the segment.
    """
    n = z.shape[0]
    # pass 1: count hits
    k = 0
    count = 0
    for j in range(1, n):
        zj = z[j]
        if single:
            if zj >= k + 1 - tol:
                k += 1
                count += 1
            elif zj <= k - 1 + tol:
                k -= 1
                count += 1
        else:
            while zj >= k + 1 - tol:
                k += 1
                count += 1
            while zj <= k - 1 + tol:
                k -= 1
                count += 1

    dirs = np.empty(count, np.int8)
    times = np.empty(count, np.float64)
    idx = np.empty(count, np.int64)
    levels = np.empty(count, np.int64)

    # pass 2: fill
    k = 0
    m = 0
    for j in range(1, n):
        zj = z[j]
        z_prev = z[j - 1]
        dz = zj - z_prev
        dt = t[j] - t[j - 1]
        if single:
            hit = 0
            if zj >= k + 1 - tol:
                k += 1
                hit = 1
            elif zj <= k - 1 + tol:
                k -= 1
                hit = -1
            if hit != 0:
                dirs[m] = 1 if hit > 0 else 0
                times[m] = t[j]
                idx[m] = j
                levels[m] = k
                m += 1
        else:
            while zj >= k + 1 - tol:
                k += 1
                frac = (k - z_prev) / dz if dz != 0.0 else 1.0
                if frac < 0.0:
                    frac = 0.0
                elif frac > 1.0:
                    frac = 1.0
                dirs[m] = 1
                times[m] = t[j - 1] + frac * dt
                idx[m] = j
                levels[m] = k
                m += 1
            while zj <= k - 1 + tol:
                k -= 1
                frac = (k - z_prev) / dz if dz != 0.0 else 1.0
                if frac < 0.0:
                    frac = 0.0
                elif frac > 1.0:
                    frac = 1.0
                dirs[m] = 0
                times[m] = t[j - 1] + frac * dt
                idx[m] = j
                levels[m] = k
                m += 1
    return dirs, times, idx, levels


def embed(path: PricePath, grid: Grid, horizon: float | None = None,
          mode: str = "interp") -> Embedding:
    """Extract the hit sequence of ``path`` on ``grid``.

    ``horizon`` (absolute time in the path's units) keeps only hits
    strictly before it.  ``mode`` is "interp" (default: one hit per level
    crossed, interpolated times) or "single" (at most one hit per sample).
    """
    if len(path) < 2:
        raise InsufficientDataError("embedding needs at least 2 samples")
    if mode not in ("interp", "single"):
        raise ValueError(f"unknown mode {mode!r}")
    y = path.log_prices
    z = (y - y[0]) / grid.eta
    dirs, times, idx, levels = _hit_scan(
        np.ascontiguousarray(z), np.ascontiguousarray(path.timestamps),
        _LEVEL_TOL, mode == "single",
    )
    if horizon is not None:
        keep = times < horizon
        dirs, times, idx, levels = dirs[keep], times[keep], idx[keep], levels[keep]
    hit_prices = np.exp(y[0] + levels * grid.eta)
    waits = np.diff(times, prepend=path.timestamps[0])
    units = "samples" if float(path.timestamps[0]) == 0.0 and np.array_equal(
        path.timestamps, np.arange(len(path), dtype=float)) else "source units"
    return Embedding(
        grid=grid,
        directions=dirs,
        waiting_times=waits,
        hit_indices=idx,
        hit_times=times,
        hit_prices=hit_prices,
        start_time=float(path.timestamps[0]),
        start_price=float(path.prices[0]),
        label=path.label,
        time_units=units,
    )


def counts(embedding_or_directions, n: int):
    """Head/tail and adjacent-pair counts of the first n directions.

    Returns (h, t, q11, q10, q01, q00) with h + t = n and the four pair
    counts summing to n-1 (pairs (x_{i-1}, x_i), i = 2..n).
    """
    x = getattr(embedding_or_directions, "directions", embedding_or_directions)
    x = np.asarray(x)
    if not 0 <= n <= x.size:
        raise ValueError(f"n={n} out of range 0..{x.size}")
    x = x[:n]
    h = int(np.count_nonzero(x))
    t = n - h
    if n < 2:
        return h, t, 0, 0, 0, 0
    prev, cur = x[:-1], x[1:]
    q11 = int(np.count_nonzero((prev == 1) & (cur == 1)))
    q10 = int(np.count_nonzero((prev == 1) & (cur == 0)))
    q01 = int(np.count_nonzero((prev == 0) & (cur == 1)))
    q00 = int(np.count_nonzero((prev == 0) & (cur == 0)))
    return h, t, q11, q10, q01, q00


def pair_count_series(directions: np.ndarray):
    """Cumulative pair counts: arrays C[m] = count among the first m pairs.

    Returns (c11, c10, c01, c00), each of length len(directions) (entry 0
    is 0; entry m covers pairs (x_1,x_2)..(x_m,x_{m+1})).
    """
    x = np.asarray(directions)
    n = x.size
    if n == 0:
        z = np.zeros(0)
        return z, z, z, z
    prev, cur = x[:-1], x[1:]
    out = []
    for p, c in ((1, 1), (1, 0), (0, 1), (0, 0)):
        flags = ((prev == p) & (cur == c)).astype(float)
        out.append(np.concatenate(([0.0], np.cumsum(flags))))
    return tuple(out)
