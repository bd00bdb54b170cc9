"""Columnar text output for embeddings, capital series, and diagnostics.

Every file starts with ``# key=value`` metadata lines followed by a
header row naming the columns.  Undefined entries are written as empty
fields, never as zeros.  ``read_series`` reads the same format back.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .costs import CostRunResult
from .diagnostics import EmpiricalStats
from .embedding import Embedding
from .strategies import CapitalProcess


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isnan(v):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path, meta: dict, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        for key, value in meta.items():
            fh.write(f"# {key}={_fmt(value)}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_embedding_csv(emb: Embedding, path) -> None:
    meta = {
        "eta": emb.grid.eta,
        "delta": emb.grid.delta,
        "rho": emb.grid.rho,
        "n_star": emb.n_star,
        "label": emb.label,
        "time_units": emb.time_units,
        "start_time": emb.start_time,
        "start_price": emb.start_price,
    }
    rows = zip(
        emb.hit_indices.tolist(),
        emb.hit_times.tolist(),
        emb.hit_prices.tolist(),
        emb.directions.tolist(),
        emb.waiting_times.tolist(),
    )
    _write(path, meta, ["hit_index", "time", "price", "direction", "waiting_time"], rows)


def write_capital_csv(cp: CapitalProcess, path, meta: dict | None = None) -> None:
    full = {"strategy": cp.strategy, "n_rounds": cp.n_rounds}
    full.update(meta or {})
    bets = np.concatenate(([math.nan], cp.bets))  # no bet precedes round 0
    rows = zip(range(cp.log_capital.size), cp.log_capital.tolist(), bets.tolist())
    _write(path, full, ["round", "log_capital", "nu"], rows)


def write_diagnostics_csv(stats: EmpiricalStats, path, meta: dict | None = None) -> None:
    n = stats.p1.size
    rows = zip(
        range(1, n + 1),
        stats.p1.tolist(), stats.p11.tolist(), stats.p00.tolist(),
        stats.h1.tolist(), stats.h0.tolist(),
    )
    _write(path, dict(meta or {}), ["round", "p1", "p11", "p00", "h1", "h0"], rows)


def write_cost_csv(result: CostRunResult, path, meta: dict | None = None) -> None:
    full = {"hold_rounds": result.hold_rounds,
            "final_log_capital": result.final_log_capital}
    full.update(meta or {})
    trades = np.concatenate(([math.nan], result.trades))
    rows = zip(
        range(result.log_capital.size),
        result.log_capital.tolist(),
        result.exposures.tolist(),
        trades.tolist(),
    )
    _write(path, full, ["round", "log_capital", "mu", "beta"], rows)


def write_summary_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def read_summary_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_series(path):
    """Read a metadata+CSV file back: returns (meta, columns).

    Numeric metadata values are converted where possible; empty fields
    become NaN.
    """
    meta: dict = {}
    header: list[str] | None = None
    columns: list[list[float]] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                try:
                    meta[key] = float(value)
                except ValueError:
                    meta[key] = value
                continue
            fields = next(csv.reader([line]))
            if header is None:
                header = fields
                columns = [[] for _ in header]
                continue
            for col, field in zip(columns, fields):
                col.append(float(field) if field != "" else math.nan)
    if header is None:
        raise ValueError(f"no header row in {path}")
    return meta, {name: np.array(col) for name, col in zip(header, columns)}
