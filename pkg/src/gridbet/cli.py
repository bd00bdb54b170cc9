"""Command-line front end.

Subcommands: simulate (generator passthrough), embed, test, sweep, costs,
report.  Every command is deterministic given its flags and seed; outputs
are self-describing columnar CSV plus one summary.json per run directory.

A flat key=value config file can be supplied with --config; command-line
flags override config values, which override built-in defaults.

Exit status: 0 completed, 2 configuration error, 3 input error.  Test
verdicts live in the output records, never in the exit status.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import click

from . import costs as costs_mod
from . import diagnostics, report, serialize
from .embedding import embed as embed_path
from .embedding import grid_from_eta
from .errors import ConfigError, GridBetError, InsufficientDataError, OrderingError, ParseError
from .paths import FbmParams, GbmParams, PricePath, generate_fbm_exp, generate_gbm, load_price_csv
from .sequential import TestConfig, bonferroni, run_stopping_test
from .strategies import BetaBinomialParams, coupled_hyperparams, run_bb, run_markov


def _parse_config_file(path: str) -> dict:
    cfg = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line not key=value: {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "input":  # flag --input maps to parameter input_file
            key = "input_file"
        cfg[key] = value
    return cfg


def _parse_gen_spec(spec: str) -> PricePath:
    """Generator spec: 'gbm:mu=0,sigma=0.2,s0=100,dt=1,horizon=1000,seed=1'
    or 'fbm:hurst=0.4,sigma=0.01,s0=100,n=65536,dt=1,seed=1'."""
    kind, _, rest = spec.partition(":")
    kwargs = {}
    for item in filter(None, rest.split(",")):
        if "=" not in item:
            raise ConfigError(f"bad generator parameter {item!r} in {spec!r}")
        key, value = item.split("=", 1)
        kwargs[key.strip()] = value.strip()
    try:
        if kind == "gbm":
            params = GbmParams(
                mu=float(kwargs.get("mu", 0.0)),
                sigma=float(kwargs.get("sigma", 0.2)),
                s0=float(kwargs.get("s0", 100.0)),
                dt=float(kwargs.get("dt", 1.0)),
                horizon=float(kwargs.get("horizon", 1000.0)),
                seed=int(kwargs.get("seed", 0)),
            )
            return generate_gbm(params)
        if kind == "fbm":
            params = FbmParams(
                hurst=float(kwargs.get("hurst", 0.5)),
                sigma=float(kwargs.get("sigma", 1.0)),
                s0=float(kwargs.get("s0", 100.0)),
                n=int(kwargs.get("n", 65536)),
                dt=float(kwargs.get("dt", 1.0)),
                seed=int(kwargs.get("seed", 0)),
            )
            return generate_fbm_exp(params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown generator {kind!r} (expected gbm or fbm)")


def _coerce_col(value):
    if value is None:
        return None
    if isinstance(value, str):
        if value.lower() == "none":
            return None
        try:
            return int(value)
        except ValueError:
            return value
    return value


def _load_path(input_file, gen, time_col, price_col, label) -> PricePath:
    if (input_file is None) == (gen is None):
        raise ConfigError("exactly one of --input and --gen is required")
    if gen is not None:
        return _parse_gen_spec(gen)
    path = load_price_csv(
        input_file,
        price_col=_coerce_col(price_col) if price_col is not None else 1,
        time_col=_coerce_col(time_col),
        label=label or Path(input_file).stem,
    )
    return path


def _resolve_etas(etas, ks) -> list[float]:
    out = list(etas or ())
    out.extend(2.0 ** (-k) for k in (ks or ()))
    if not out:
        raise ConfigError("at least one --eta or --k is required")
    if any(e <= 0 for e in out):
        raise ConfigError("all etas must be > 0")
    return out


def _hyper(eta: float, a, b) -> BetaBinomialParams:
    default = coupled_hyperparams(eta)
    return BetaBinomialParams(a if a is not None else default.a,
                              b if b is not None else default.b)


_input_options = [
    click.option("--input", "input_file", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="CSV price file."),
    click.option("--gen", default=None,
                 help="Generator spec, e.g. gbm:mu=0,sigma=0.2,dt=0.01,horizon=100,seed=1"),
    click.option("--time-col", default="0",
                 help="Timestamp column name/index, or 'none' for sample indices."),
    click.option("--price-col", default="1", help="Price column name or index."),
    click.option("--label", default=None, help="Series label used in records."),
]

_grid_options = [
    click.option("--eta", "etas", type=float, multiple=True, help="Grid log-spacing."),
    click.option("--k", "ks", type=int, multiple=True, help="Shorthand for eta = 2^-k."),
    click.option("--horizon", type=float, default=None,
                 help="Keep only hits strictly before this time."),
    click.option("--hit-mode", type=click.Choice(["interp", "single"]), default="interp",
                 help="Multi-level jumps: interpolate one hit per level, or one per sample."),
]


def _add(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return deco


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Flat key=value config file (flags override it).")
@click.pass_context
def cli(ctx, config_path):
    """Martingale-hypothesis testing via grid-embedded betting strategies."""
    if config_path:
        cfg = _parse_config_file(config_path)
        ctx.default_map = {name: dict(cfg) for name in cli.commands}


@cli.command()
@click.option("--gen", required=True, help="Generator spec (see embed --help).")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
def simulate(gen, out_file):
    """Generate a synthetic path and write it as a time,price CSV."""
    path = _parse_gen_spec(gen)
    out = Path(out_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        fh.write("time,price\n")
        for t, p in zip(path.timestamps, path.prices):
            fh.write(f"{float(t)!r},{float(p)!r}\n")
    click.echo(f"wrote {len(path)} samples to {out}")


def _embed_all(path, etas, horizon, hit_mode, out_dir):
    out_dir = Path(out_dir)
    records = []
    embeddings = {}
    for eta in etas:
        grid = grid_from_eta(eta)
        emb = embed_path(path, grid, horizon=horizon, mode=hit_mode)
        serialize.write_embedding_csv(emb, out_dir / f"embedding_eta{eta:g}.csv")
        records.append({"label": emb.label, "eta": eta, "delta": grid.delta,
                        "rho": grid.rho, "n_star": emb.n_star,
                        "hit_mode": hit_mode})
        embeddings[eta] = emb
        click.echo(f"eta={eta:g} n_star={emb.n_star}")
    return records, embeddings


@cli.command("embed")
@_add(_input_options)
@_add(_grid_options)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def cmd_embed(input_file, gen, time_col, price_col, label, etas, ks, horizon,
              hit_mode, out_dir):
    """Extract grid hit sequences and write one embedding file per eta."""
    path = _load_path(input_file, gen, time_col, price_col, label)
    records, _ = _embed_all(path, _resolve_etas(etas, ks), horizon, hit_mode, out_dir)
    serialize.write_summary_json(Path(out_dir) / "summary.json",
                                 {"command": "embed", "embeddings": records})


def _strategy_runs(emb, strategy, a, b):
    params = _hyper(emb.grid.eta, a, b)
    runs = []
    if strategy in ("bb", "both"):
        runs.append(("bb", run_bb(emb, params)))
    if strategy in ("markov", "both"):
        runs.append(("markov", run_markov(emb, params)))
    return params, runs


def _outcome_record(emb, name, params, outcome, stats):
    fn = outcome.first_crossing_round
    at = (fn if fn is not None else emb.n_star) - 1  # diagnostics index
    def _at(arr):
        if at < 0 or arr.size == 0:
            return None
        v = float(arr[at])
        return None if math.isnan(v) else v
    return {
        "label": emb.label,
        "eta": emb.grid.eta,
        "strategy": name,
        "a": params.a,
        "b": params.b,
        "n_star": emb.n_star,
        "fn": fn,
        "ft": outcome.first_crossing_time,
        "max_log_capital": outcome.max_log_capital,
        "max_capital": None if not math.isfinite(outcome.max_capital) else outcome.max_capital,
        "p_value": outcome.p_value,
        "adjusted_p": outcome.adjusted_p,
        "final_p": outcome.final_p,
        "rejected": outcome.rejected,
        "p1": _at(stats.p1),
        "p11": _at(stats.p11),
        "p00": _at(stats.p00),
        "h1": _at(stats.h1),
        "h0": _at(stats.h0),
    }


def _run_tests(path, etas, horizon, hit_mode, strategy, a, b, alpha, out_dir,
               num_tests=1):
    out_dir = Path(out_dir)
    emb_records, embeddings = _embed_all(path, etas, horizon, hit_mode, out_dir)
    config = TestConfig(alpha=alpha, num_tests=num_tests)
    outcome_records = []
    outcomes_by_strategy: dict[str, list] = {}
    for eta, emb in embeddings.items():
        stats = diagnostics.empirical_probs(emb)
        serialize.write_diagnostics_csv(
            stats, out_dir / f"diagnostics_eta{eta:g}.csv",
            meta={"label": emb.label, "eta": eta})
        params, runs = _strategy_runs(emb, strategy, a, b)
        for name, cp in runs:
            serialize.write_capital_csv(
                cp, out_dir / f"capital_{name}_eta{eta:g}.csv",
                meta={"label": emb.label, "eta": eta, "a": params.a, "b": params.b,
                      "rho": emb.grid.rho, "alpha": alpha,
                      "log_threshold": config.log_threshold})
            outcome = run_stopping_test(cp, config, hit_times=emb.hit_times)
            outcome_records.append(_outcome_record(emb, name, params, outcome, stats))
            outcomes_by_strategy.setdefault(name, []).append((eta, outcome))
            verdict = "REJECTED" if outcome.rejected else "not rejected"
            click.echo(f"eta={eta:g} strategy={name}: {verdict} "
                       f"(p={outcome.p_value:.4g}, fn={outcome.first_crossing_round})")
    return emb_records, outcome_records, outcomes_by_strategy


_test_options = [
    click.option("--strategy", type=click.Choice(["bb", "markov", "both"]),
                 default="markov"),
    click.option("--a", type=float, default=None,
                 help="Hyperparameter a (default 0.01/eta)."),
    click.option("--b", type=float, default=None,
                 help="Hyperparameter b (default 0.01/eta)."),
    click.option("--alpha", type=float, default=0.001, help="Significance level."),
    click.option("--out-dir", type=click.Path(file_okay=False), required=True),
]


@cli.command("test")
@_add(_input_options)
@_add(_grid_options)
@_add(_test_options)
def cmd_test(input_file, gen, time_col, price_col, label, etas, ks, horizon,
             hit_mode, strategy, a, b, alpha, out_dir):
    """Embed, run strategies, and emit outcome records plus series files."""
    path = _load_path(input_file, gen, time_col, price_col, label)
    emb_records, outcome_records, _ = _run_tests(
        path, _resolve_etas(etas, ks), horizon, hit_mode, strategy, a, b, alpha,
        out_dir)
    serialize.write_summary_json(Path(out_dir) / "summary.json", {
        "command": "test", "alpha": alpha,
        "embeddings": emb_records, "outcomes": outcome_records,
    })


@cli.command("sweep")
@_add(_input_options)
@_add(_grid_options)
@_add(_test_options)
def cmd_sweep(input_file, gen, time_col, price_col, label, etas, ks, horizon,
              hit_mode, strategy, a, b, alpha, out_dir):
    """Like test, plus a Bonferroni-combined verdict across grid sizes."""
    path = _load_path(input_file, gen, time_col, price_col, label)
    etas = _resolve_etas(etas, ks)
    emb_records, outcome_records, by_strategy = _run_tests(
        path, etas, horizon, hit_mode, strategy, a, b, alpha, out_dir,
        num_tests=len(etas))
    combined_records = []
    for name, pairs in by_strategy.items():
        combined = bonferroni([o for _, o in pairs], alpha)
        best_eta = min(pairs, key=lambda p: p[1].p_value)[0]
        combined_records.append({
            "label": path.label, "strategy": name, "num_tests": len(pairs),
            "best_eta": best_eta, "p_value": combined.p_value,
            "adjusted_p": combined.adjusted_p, "rejected": combined.rejected,
        })
        verdict = "REJECTED" if combined.rejected else "not rejected"
        click.echo(f"combined ({name}, m={len(pairs)}): {verdict} "
                   f"(adjusted p={combined.adjusted_p:.4g})")
    serialize.write_summary_json(Path(out_dir) / "summary.json", {
        "command": "sweep", "alpha": alpha,
        "embeddings": emb_records, "outcomes": outcome_records,
        "combined": combined_records,
    })


@cli.command("costs")
@_add(_input_options)
@_add(_grid_options)
@click.option("--cost", "cost_list", type=float, multiple=True,
              help="Unit costs in units of delta (e.g. 0.01 0.03 0.05).")
@click.option("--a", type=float, default=None)
@click.option("--b", type=float, default=None)
@click.option("--alpha", type=float, default=0.001,
              help="Level defining the frictionless stopping round fn.")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def cmd_costs(input_file, gen, time_col, price_col, label, etas, ks, horizon,
              hit_mode, cost_list, a, b, alpha, out_dir):
    """Run the Markov strategy under proportional costs; find critical costs."""
    path = _load_path(input_file, gen, time_col, price_col, label)
    out_dir = Path(out_dir)
    etas = _resolve_etas(etas, ks)
    emb_records, embeddings = _embed_all(path, etas, horizon, hit_mode, out_dir)
    config = TestConfig(alpha=alpha)
    cost_records, critical_records = [], []
    for eta, emb in embeddings.items():
        params = _hyper(eta, a, b)
        frictionless = run_markov(emb, params)
        outcome = run_stopping_test(frictionless, config, hit_times=emb.hit_times)
        fn = outcome.first_crossing_round or emb.n_star
        for c_over_delta in cost_list:
            c = c_over_delta * emb.grid.delta
            result = costs_mod.run_markov_with_costs(emb, params, c)
            serialize.write_cost_csv(
                result, out_dir / f"cost_eta{eta:g}_c{c_over_delta:g}.csv",
                meta={"label": emb.label, "eta": eta, "c_over_delta": c_over_delta,
                      "a": params.a, "b": params.b})
            log_at_fn = float(result.log_capital[fn])
            cost_records.append({
                "label": emb.label, "eta": eta, "c_over_delta": c_over_delta,
                "fn": fn, "capital_at_fn": math.exp(log_at_fn)
                if log_at_fn < 700 else None,
                "log_capital_at_fn": log_at_fn,
                "hold_rounds": result.hold_rounds,
            })
            click.echo(f"eta={eta:g} c={c_over_delta:g}*delta: "
                       f"log K(fn)={log_at_fn:.3f} holds={result.hold_rounds}")
        crit = costs_mod.critical_cost(emb.prefix(fn), params)
        if crit.flag == "ok":
            at_crit = costs_mod.run_markov_with_costs(emb.prefix(fn), params, crit.c_star)
            final_cap = at_crit.final_capital
            holds = at_crit.hold_rounds
        else:
            final_cap, holds = None, None
        critical_records.append({
            "label": emb.label, "eta": eta,
            "c_star_over_delta": None if math.isnan(crit.c_star_in_delta)
            else crit.c_star_in_delta,
            "final_capital_at_cstar": final_cap, "hold_rounds": holds,
            "flag": crit.flag,
        })
        click.echo(f"eta={eta:g} critical cost: "
                   f"{crit.c_star_in_delta:g}*delta ({crit.flag})"
                   if crit.flag == "ok" else f"eta={eta:g} critical cost: {crit.flag}")
    serialize.write_summary_json(out_dir / "summary.json", {
        "command": "costs", "alpha": alpha, "embeddings": emb_records,
        "cost_runs": cost_records, "critical_costs": critical_records,
    })


@cli.command("report")
@click.option("--run-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Defaults to the run directory.")
@click.option("--figures/--no-figures", default=True,
              help="Also render PNG figures from the series files.")
def cmd_report(run_dir, out_dir, figures):
    """Merge a run's records into table CSVs and render figures."""
    out = Path(out_dir) if out_dir else Path(run_dir)
    written = report.build_tables(run_dir, out)
    if figures:
        written += report.render_figures(run_dir, out)
    for path in written:
        click.echo(f"wrote {path}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 2
    except (ParseError, OrderingError, InsufficientDataError, FileNotFoundError,
            OSError) as exc:
        click.echo(f"input error: {exc}", err=True)
        return 3
    except (ConfigError, click.UsageError, click.ClickException) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        return 2
    except GridBetError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
