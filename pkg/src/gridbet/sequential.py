"""Sequential tests built on capital processes.

A prudent strategy's capital is a nonnegative martingale under the null,
so by Ville's inequality the running maximum exceeds 1/alpha with
probability at most alpha.  Rejection therefore means the capital reached
1/alpha; the reciprocal of the running maximum is an anytime-valid
p-value, and the final-round reciprocal is reported alongside for
transparency.  Sweeps over several grid sizes are combined by Bonferroni.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .strategies import CapitalProcess


@dataclass(frozen=True)
class TestConfig:
    alpha: float
    horizon_rounds: Optional[int] = None
    num_tests: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0,1)")
        if self.num_tests < 1:
            raise ValueError("num_tests must be >= 1")

    @property
    def log_threshold(self) -> float:
        return math.log(1.0 / self.alpha)


@dataclass(frozen=True)
class TestOutcome:
    """Verdict of a capital-process test.

    max_log_capital is the supremum of log capital over the scanned
    rounds; p_value = min(1, 1/exp(max_log_capital)).  final_p is the
    reciprocal of the last scanned capital, reported for transparency.
    """

    rejected: bool
    first_crossing_round: Optional[int]
    first_crossing_time: Optional[float]
    max_log_capital: float
    p_value: float
    adjusted_p: float
    final_p: float
    strategy: str = ""

    @property
    def max_capital(self) -> float:
        try:
            return math.exp(self.max_log_capital)
        except OverflowError:
            return math.inf


def _p_from_log(log_capital: float) -> float:
    return min(1.0, math.exp(-log_capital)) if log_capital > -math.inf else 1.0


def run_stopping_test(capital: CapitalProcess, config: TestConfig,
                      hit_times: Optional[np.ndarray] = None) -> TestOutcome:
    """Stop-at-threshold test: reject as soon as capital reaches 1/alpha.

    Scans rounds in order and stops scanning at the first crossing
    (betting stops at the hitting time).  ``hit_times`` gives the time of
    each hit, used to report the crossing time in source units.
    """
    log_k = capital.log_capital
    if config.horizon_rounds is not None:
        if config.horizon_rounds > log_k.size - 1:
            raise ValueError(
                f"horizon_rounds={config.horizon_rounds} exceeds "
                f"{log_k.size - 1} available rounds")
        log_k = log_k[: config.horizon_rounds + 1]
    crossed = np.nonzero(log_k >= config.log_threshold)[0]
    if crossed.size:
        fn = int(crossed[0])
        scanned = log_k[: fn + 1]
        ft = float(hit_times[fn - 1]) if hit_times is not None and fn >= 1 else None
        rejected = True
    else:
        fn, ft = None, None
        scanned = log_k
        rejected = False
    max_log = float(np.max(scanned))
    p = _p_from_log(max_log)
    return TestOutcome(
        rejected=rejected,
        first_crossing_round=fn,
        first_crossing_time=ft,
        max_log_capital=max_log,
        p_value=p,
        adjusted_p=min(1.0, config.num_tests * p),
        final_p=_p_from_log(float(scanned[-1])),
        strategy=capital.strategy,
    )


def run_max_test(capital: CapitalProcess, config: TestConfig,
                 hit_times: Optional[np.ndarray] = None) -> TestOutcome:
    """Fixed-horizon test: reject iff max capital over rounds 0..N reaches
    1/alpha.  Requires config.horizon_rounds."""
    if config.horizon_rounds is None:
        raise ValueError("run_max_test requires horizon_rounds")
    n = config.horizon_rounds
    log_k = capital.log_capital
    if n > log_k.size - 1:
        raise ValueError(f"horizon_rounds={n} exceeds {log_k.size - 1} available rounds")
    window = log_k[: n + 1]
    max_log = float(np.max(window))
    rejected = max_log >= config.log_threshold
    fn = ft = None
    if rejected:
        fn = int(np.nonzero(window >= config.log_threshold)[0][0])
        if hit_times is not None and fn >= 1:
            ft = float(hit_times[fn - 1])
    p = _p_from_log(max_log)
    return TestOutcome(
        rejected=rejected,
        first_crossing_round=fn,
        first_crossing_time=ft,
        max_log_capital=max_log,
        p_value=p,
        adjusted_p=min(1.0, config.num_tests * p),
        final_p=_p_from_log(float(window[-1])),
        strategy=capital.strategy,
    )


def bonferroni(outcomes: Sequence[TestOutcome], alpha: float) -> TestOutcome:
    """Combine outcomes of m parallel tests: p = min(1, m * min p_value).

    The crossing round/time of the best outcome is carried over; the
    combined test rejects iff the adjusted p-value is at most alpha.
    """
    if not outcomes:
        raise ValueError("need at least one outcome")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    m = len(outcomes)
    best = min(outcomes, key=lambda o: o.p_value)
    combined = min(1.0, m * best.p_value)
    return TestOutcome(
        rejected=combined <= alpha,
        first_crossing_round=best.first_crossing_round,
        first_crossing_time=best.first_crossing_time,
        max_log_capital=best.max_log_capital,
        p_value=best.p_value,
        adjusted_p=combined,
        final_p=best.final_p,
        strategy=best.strategy,
    )
