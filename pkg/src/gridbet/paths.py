"""Price series ingestion and synthetic path generation.

A :class:`PricePath` is a strictly positive price series on strictly
increasing timestamps.  Recorded data is loaded from CSV; synthetic paths
come from a geometric Brownian motion generator and an exponentiated
fractional Brownian motion generator (exact Davies-Harte circulant
embedding).

Recorded series spanning several trading days are concatenated as if
continuous: overnight gaps receive no special treatment, since the tests
downstream depend only on grid hitting order, not on wall-clock spacing.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CapacityError, InsufficientDataError, OrderingError, ParseError


@dataclass(frozen=True)
class PricePath:
    """A timestamped positive price series.

    timestamps are in seconds (or plain sample indices when the source has
    no time column, in which case the unit is "samples").
    """

    timestamps: np.ndarray
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        px = np.asarray(self.prices, dtype=float)
        if ts.shape != px.shape or ts.ndim != 1:
            raise ValueError("timestamps and prices must be 1-d and equal length")
        if ts.size < 2:
            raise InsufficientDataError("a price path needs at least 2 samples")
        if not np.all(px > 0):
            raise ValueError("all prices must be strictly positive")
        if not np.all(np.diff(ts) > 0):
            raise OrderingError("timestamps must strictly increase")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "prices", px)

    def __len__(self) -> int:
        return self.prices.size

    @property
    def log_prices(self) -> np.ndarray:
        return np.log(self.prices)


@dataclass(frozen=True)
class GbmParams:
    """Geometric Brownian motion: drift mu per unit time, volatility sigma
    per sqrt unit time, sampled every dt up to horizon."""

    mu: float
    sigma: float
    s0: float
    dt: float
    horizon: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.s0 <= 0:
            raise ValueError("s0 must be > 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.horizon < self.dt:
            raise ValueError("horizon must be >= dt")


@dataclass(frozen=True)
class FbmParams:
    """Exponentiated fractional Brownian motion with Hurst index in (0,1)."""

    hurst: float
    sigma: float
    s0: float
    n: int
    dt: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError("hurst must lie in (0,1)")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.s0 <= 0:
            raise ValueError("s0 must be > 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")


def _coerce_column(spec, header: list[str] | None, line: int):
    """Resolve a column given by name or index to an integer index."""
    if isinstance(spec, int):
        return spec
    if header is None:
        raise ParseError(line, f"column name {spec!r} given but file has no header")
    try:
        return header.index(spec)
    except ValueError:
        raise ParseError(line, f"column {spec!r} not found in header {header}") from None


def load_price_csv(source, price_col=1, time_col=0, label: str = "") -> PricePath:
    """Load a PricePath from CSV text.

    ``source`` may be a path, bytes, or a text/binary stream.  ``price_col``
    and ``time_col`` are column names (requires a header row) or 0-based
    indices.  ``time_col=None`` assigns sample indices 0,1,2,... as
    timestamps.  A non-numeric first row is treated as a header.

    Rows with non-numeric or non-positive prices raise :class:`ParseError`
    naming the offending line; non-monotone timestamps raise
    :class:`OrderingError`; fewer than two valid rows raise
    :class:`InsufficientDataError`.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError(f"unsupported source type {type(source)!r}")

    rows = list(csv.reader(io.StringIO(text)))
    # drop blank lines, keeping original line numbers for error messages
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(f.strip() for f in r)]
    if not numbered:
        raise InsufficientDataError("empty input")

    header = None
    first_line, first = numbered[0]
    names_given = isinstance(price_col, str) or isinstance(time_col, str)
    if names_given:
        header = [f.strip() for f in first]
        numbered = numbered[1:]
    else:
        # auto-detect a header: first row not numeric in the price column
        try:
            float(first[price_col if isinstance(price_col, int) else 0])
        except (ValueError, IndexError):
            header = [f.strip() for f in first]
            numbered = numbered[1:]

    pc = _coerce_column(price_col, header, first_line)
    tc = None if time_col is None else _coerce_column(time_col, header, first_line)

    times, prices = [], []
    for line, row in numbered:
        try:
            price = float(row[pc])
        except (ValueError, IndexError):
            raise ParseError(line, f"cannot parse price from {row!r}") from None
        if not math.isfinite(price) or price <= 0:
            raise ParseError(line, f"non-positive price {row[pc]!r}")
        if tc is None:
            t = float(len(times))
        else:
            try:
                t = float(row[tc])
            except (ValueError, IndexError):
                raise ParseError(line, f"cannot parse timestamp from {row!r}") from None
        times.append(t)
        prices.append(price)

    if len(prices) < 2:
        raise InsufficientDataError(f"only {len(prices)} valid rows")
    ts = np.array(times)
    if not np.all(np.diff(ts) > 0):
        raise OrderingError("timestamps must strictly increase")
    return PricePath(ts, np.array(prices), label=label)


def generate_gbm(params: GbmParams) -> PricePath:
    """Sample a GBM path on an equi-spaced grid.

    Log-increments are i.i.d. Normal((mu - sigma^2/2) dt, sigma^2 dt).
    The price itself is a (discrete-time) martingale exactly when mu = 0.
    Deterministic for a fixed seed.
    """
    n = int(round(params.horizon / params.dt))
    rng = np.random.default_rng(params.seed)
    drift = (params.mu - 0.5 * params.sigma**2) * params.dt
    scale = params.sigma * math.sqrt(params.dt)
    increments = drift + scale * rng.standard_normal(n)
    log_moves = np.concatenate(([0.0], np.cumsum(increments)))
    times = np.arange(n + 1) * params.dt
    label = f"gbm(mu={params.mu},sigma={params.sigma},seed={params.seed})"
    return PricePath(times, params.s0 * np.exp(log_moves), label=label)


def fractional_gaussian_noise(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Exact stationary fGn sample of length n, unit variance per step.

    Davies-Harte circulant embedding: the autocovariance sequence is
    embedded in a circulant matrix whose eigenvalues (computed by FFT)
    must be non-negative; if any is negative the exact method fails and a
    :class:`CapacityError` is raised.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n, dtype=float)
    autocov = 0.5 * (
        np.abs(k + 1) ** (2 * hurst) + np.abs(k - 1) ** (2 * hurst) - 2 * k ** (2 * hurst)
    )
    circ = np.concatenate([autocov, [0.0], autocov[-1:0:-1]])
    del autocov
    # real input, symmetric circulant: the half-spectrum rfft carries all
    # 2n eigenvalues, which keeps peak memory at O(n) doubles
    eigs = np.fft.rfft(circ).real
    del circ
    if np.any(eigs < -1e-10 * max(1.0, eigs.max())):
        raise CapacityError(
            f"circulant embedding not non-negative definite for n={n}, hurst={hurst}"
        )
    np.clip(eigs, 0.0, None, out=eigs)
    w = np.empty(n + 1, dtype=complex)
    w[0] = rng.standard_normal() * math.sqrt(2)
    w[n] = rng.standard_normal() * math.sqrt(2)
    v = rng.standard_normal((n - 1, 2))
    w[1:n] = v[:, 0] + 1j * v[:, 1]
    del v
    w *= np.sqrt(eigs)
    del eigs
    noise = np.fft.irfft(w, 2 * n) * math.sqrt(n)
    return noise[:n]


def generate_fbm_exp(params: FbmParams) -> PricePath:
    """Prices s0 * exp(sigma * B_H(t_k)) on t_k = k dt, k = 0..n.

    B_H is fractional Brownian motion with Hurst index ``hurst`` built from
    exact fGn (so B_H(t) has variance t^{2H}).  Deterministic for a fixed
    seed.
    """
    rng = np.random.default_rng(params.seed)
    fgn = fractional_gaussian_noise(params.n, params.hurst, rng)
    # unit-variance steps scaled to the dt grid: Var B_H(dt) = dt^{2H}
    bh = np.concatenate(([0.0], np.cumsum(fgn))) * params.dt**params.hurst
    prices = params.s0 * np.exp(params.sigma * bh)
    times = np.arange(params.n + 1) * params.dt
    label = f"fbm(hurst={params.hurst},sigma={params.sigma},seed={params.seed})"
    return PricePath(times, prices, label=label)
