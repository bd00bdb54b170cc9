"""Merge run records into table-shaped summaries and render figures.

Tables are plain CSV built from a run directory's ``summary.json``.
Figures are rendered from the columnar series files emitted by the run
commands (price/hit series, log capital with its rejection threshold,
empirical probabilities, Hoelder estimates, and cost comparisons) and
written as PNG next to the tables.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .serialize import read_series, read_summary_json  # noqa: E402


def _write_table(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def build_tables(run_dir, out_dir) -> list[Path]:
    """Build table_tests / table_costs / table_critical CSVs from
    summary.json; only tables with data are written."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    summary = read_summary_json(run_dir / "summary.json")
    written: list[Path] = []

    outcomes = summary.get("outcomes", [])
    if outcomes:
        header = ["label", "eta", "strategy", "a", "b", "n_star", "fn", "ft",
                  "max_capital", "p_value", "adjusted_p", "rejected",
                  "p1", "p11", "p00", "h1", "h0"]
        rows = [[o.get(k) for k in header] for o in outcomes]
        path = out_dir / "table_tests.csv"
        _write_table(path, header, rows)
        written.append(path)

    combined = summary.get("combined", [])
    if combined:
        header = ["label", "strategy", "num_tests", "best_eta", "p_value",
                  "adjusted_p", "rejected"]
        rows = [[o.get(k) for k in header] for o in combined]
        path = out_dir / "table_combined.csv"
        _write_table(path, header, rows)
        written.append(path)

    cost_runs = summary.get("cost_runs", [])
    if cost_runs:
        header = ["label", "eta", "c_over_delta", "fn",
                  "capital_at_fn", "log_capital_at_fn", "hold_rounds"]
        rows = [[o.get(k) for k in header] for o in cost_runs]
        path = out_dir / "table_costs.csv"
        _write_table(path, header, rows)
        written.append(path)

    critical = summary.get("critical_costs", [])
    if critical:
        header = ["label", "eta", "final_capital_at_cstar", "hold_rounds",
                  "c_star_over_delta", "flag"]
        rows = [[o.get(k) for k in header] for o in critical]
        path = out_dir / "table_critical.csv"
        _write_table(path, header, rows)
        written.append(path)

    return written


def _save(fig, path: Path, written: list[Path]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)


def render_figures(run_dir, out_dir) -> list[Path]:
    """Render PNG figures for every series file found in the run directory."""
    run_dir, out_dir = Path(run_dir), Path(out_dir)
    written: list[Path] = []

    for emb_path in sorted(run_dir.glob("embedding_*.csv")):
        meta, cols = read_series(emb_path)
        if cols["time"].size == 0:
            continue
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(cols["time"], cols["price"], lw=0.7)
        ax.set_xlabel(f"time ({meta.get('time_units', '')})")
        ax.set_ylabel("price at grid hits")
        ax.set_title(f"{meta.get('label', '')} hits, eta={meta.get('eta'):g}")
        _save(fig, out_dir / f"fig_{emb_path.stem}.png", written)

    for cap_path in sorted(run_dir.glob("capital_*.csv")):
        meta, cols = read_series(cap_path)
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(cols["round"], cols["log_capital"], lw=0.8)
        threshold = meta.get("log_threshold")
        if isinstance(threshold, float):
            ax.axhline(threshold, color="red", ls="--", lw=0.8,
                       label=f"rejection threshold ({threshold:.2f})")
            ax.legend()
        ax.set_xlabel("round")
        ax.set_ylabel("log capital")
        ax.set_title(f"{meta.get('strategy', '')} eta={meta.get('eta'):g}"
                     if "eta" in meta else str(meta.get("strategy", "")))
        _save(fig, out_dir / f"fig_{cap_path.stem}.png", written)

    for diag_path in sorted(run_dir.glob("diagnostics_*.csv")):
        meta, cols = read_series(diag_path)
        fig, ax = plt.subplots(figsize=(7, 4))
        for name in ("p1", "p11", "p00"):
            ax.plot(cols["round"], cols[name], lw=0.8, label=name)
        ax.set_xlabel("round")
        ax.set_ylabel("empirical probability")
        ax.legend()
        _save(fig, out_dir / f"fig_{diag_path.stem}_probs.png", written)

        fig, ax = plt.subplots(figsize=(7, 4))
        for name in ("h1", "h0"):
            ax.plot(cols["round"], cols[name], lw=0.8, label=name)
        ax.axhline(0.5, color="gray", ls=":", lw=0.8)
        ax.set_xlabel("round")
        ax.set_ylabel("Hoelder estimate")
        ax.legend()
        _save(fig, out_dir / f"fig_{diag_path.stem}_holder.png", written)

    cost_paths = sorted(run_dir.glob("cost_*.csv"))
    if cost_paths:
        by_eta: dict[str, list] = {}
        for path in cost_paths:
            meta, cols = read_series(path)
            by_eta.setdefault(f"{meta.get('eta')}", []).append((meta, cols))
        for eta, group in by_eta.items():
            fig, ax = plt.subplots(figsize=(7, 4))
            for meta, cols in group:
                ax.plot(cols["round"], cols["log_capital"], lw=0.8,
                        label=f"c = {meta.get('c_over_delta')}*delta")
            ax.axhline(0.0, color="gray", ls=":", lw=0.8)
            ax.set_xlabel("round")
            ax.set_ylabel("log capital")
            ax.set_title(f"costed capital, eta={float(eta):g}")
            ax.legend()
            _save(fig, out_dir / f"fig_costs_eta{float(eta):g}.png", written)

    return written
