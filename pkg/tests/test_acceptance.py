"""Quantitative acceptance checks for the whole pipeline.

Each test prints one PASS/FAIL line naming its criterion; stochastic
checks run on frozen seeds with tolerances fixed in advance, so the suite
is deterministic.
"""

import itertools
import math

import numpy as np
from scipy.optimize import brentq

from gridbet import (
    FbmParams,
    GbmParams,
    generate_fbm_exp,
    generate_gbm,
    grid_from_eta,
    holder_from_prob,
    kl_divergence,
    run_bb,
    run_markov,
    run_markov_with_costs,
)
from gridbet.costs import log_growth_derivative, optimal_beta
from gridbet.embedding import Embedding, counts, embed
from gridbet.strategies import (
    BetaBinomialParams,
    bb_capital_closed,
    bb_log_capital_series,
    coupled_hyperparams,
    markov_capital_closed,
    markov_log_capital_series,
)

ETA = 2.0**-6
GRID = grid_from_eta(ETA)
PARAMS = coupled_hyperparams(ETA)


def check(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def embedding_from_directions(directions, eta=2.0**-4):
    directions = np.asarray(directions, dtype=np.int8)
    n = directions.size
    grid = grid_from_eta(eta)
    levels = np.cumsum(np.where(directions == 1, 1, -1))
    return Embedding(
        grid=grid,
        directions=directions,
        waiting_times=np.ones(n),
        hit_indices=np.arange(1, n + 1),
        hit_times=np.arange(1, n + 1, dtype=float),
        hit_prices=np.exp(levels * eta),
        start_time=0.0,
        start_price=1.0,
    )


def test_martingale_oracle():
    """E[K_n] = 1 exactly under the fair coin, both strategies, all
    sequences enumerated for n up to 12."""
    rho_fine = 1.0 / (2.0 + math.expm1(2.0**-8))
    worst = 0.0
    for a_b in ((1.0, 1.0), (0.01 * 2**8, 0.01 * 2**8)):
        params = BetaBinomialParams(*a_b)
        for rho in (1.0 / 3.0, rho_fine):
            log_rho, log_1mrho = math.log(rho), math.log1p(-rho)
            for n in (1, 2, 3, 7, 12):
                exp_bb = 0.0
                exp_mk = 0.0
                for bits in itertools.product((0, 1), repeat=n):
                    x = np.array(bits, dtype=np.int8)
                    h = int(x.sum())
                    log_prob = h * log_rho + (n - h) * log_1mrho
                    exp_bb += math.exp(
                        log_prob + bb_capital_closed(h, n - h, params, rho))
                    _, _, q11, q10, q01, q00 = counts(x, n)
                    exp_mk += math.exp(
                        log_prob
                        + markov_capital_closed(q11, q10, q01, q00, params, rho))
                worst = max(worst, abs(exp_bb - 1.0), abs(exp_mk - 1.0))
    check("martingale-oracle", worst < 1e-10,
          f"max |E[K_n] - 1| = {worst:.2e} over exhaustive enumeration "
          "(n in {1,2,3,7,12}, two priors, two rhos, both strategies; tol 1e-10)")


def test_closed_form_equivalence():
    """Recursive and closed-form log capitals agree on 1000 random
    sequences with lengths up to 10^4."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 10_001))
        x = (rng.random(n) < rng.uniform(0.1, 0.9)).astype(np.int8)
        params = BetaBinomialParams(rng.uniform(0.05, 5.0), rng.uniform(0.05, 5.0))
        rho = rng.uniform(0.1, 0.9)
        h = int(x.sum())
        log_bb, _ = bb_log_capital_series(x, params, rho)
        worst = max(worst, abs(
            bb_capital_closed(h, n - h, params, rho) - float(log_bb[-1])))
        log_mk, _ = markov_log_capital_series(x, params, rho)
        _, _, q11, q10, q01, q00 = counts(x, n)
        worst = max(worst, abs(
            markov_capital_closed(q11, q10, q01, q00, params, rho)
            - float(log_mk[-1])))
    check("closed-form-equivalence", worst < 1e-9,
          f"max |recursion - closed form| = {worst:.2e} "
          "over 1000 random sequences, n up to 10^4 (tol 1e-9)")


def test_size_control():
    """Rejection rate at alpha = 0.05 on 1000 martingale GBM paths stays
    below the nominal level plus 3 binomial standard errors."""
    sigma = 0.2
    dt = (0.05 * ETA / sigma) ** 2  # per-sample log step = eta/20
    threshold = math.log(1.0 / 0.05)
    rejections = 0
    for seed in range(1000):
        gp = GbmParams(mu=0.0, sigma=sigma, s0=100.0, dt=dt,
                       horizon=100_000 * dt, seed=10_000 + seed)
        emb = embed(generate_gbm(gp), GRID)
        if emb.n_star == 0:
            continue
        if float(np.max(run_bb(emb).log_capital)) >= threshold:
            rejections += 1
    rate = rejections / 1000.0
    bound = 0.05 + 3.0 * math.sqrt(0.05 * 0.95 / 1000.0)
    check("size-control", rate <= bound,
          f"rejection rate {rate:.3f} <= {bound:.3f} "
          "(1000 martingale GBM paths, 10^5 samples, eta=2^-6, alpha=0.05)")


def test_drift_growth_limit():
    """Under drifted GBM the long-run per-time log capital approaches
    mu^2 / (2 sigma^2)."""
    mu, sigma, horizon = 0.2, 0.3, 500.0
    target = mu**2 / (2.0 * sigma**2)
    rates = []
    for seed in range(20):
        gp = GbmParams(mu=mu, sigma=sigma, s0=100.0, dt=6.25e-5,
                       horizon=horizon, seed=seed)
        emb = embed(generate_gbm(gp), GRID)
        h = int(np.count_nonzero(emb.directions))
        rates.append(
            bb_capital_closed(h, emb.n_star - h, PARAMS, GRID.rho) / horizon)
    mean = float(np.mean(rates))
    ok = abs(mean - target) <= 0.25 * target
    check("drift-growth-limit", ok,
          f"mean log K(T)/T = {mean:.4f}, target {target:.4f} +-25% "
          "(GBM mu=0.2 sigma=0.3 T=500, 20 seeds)")


def _markov_rate_on_fbm(hurst, sigma, n, seeds):
    """Aggregate per-hit Markov log-capital growth over several fixed
    seeds (total log capital over total hits)."""
    total_logk, total_hits = 0.0, 0
    for seed in seeds:
        path = generate_fbm_exp(
            FbmParams(hurst=hurst, sigma=sigma, s0=1.0, n=n, dt=1.0, seed=seed))
        emb = embed(path, GRID)
        if emb.n_star < 2:
            continue
        _, _, q11, q10, q01, q00 = counts(emb, emb.n_star)
        total_logk += markov_capital_closed(q11, q10, q01, q00, PARAMS, GRID.rho)
        total_hits += emb.n_star
    return total_logk / total_hits, total_hits


def test_markov_growth_on_rough_path():
    """Per-hit Markov growth on exponentiated fBm matches the
    roughness-determined rate D(2^{1-1/H} || 1/2)."""
    # H = 0.4: rate within 25% of the theoretical 0.04353 nats over >= 3e4
    # aggregate hits; per-sample step 0.02 eta keeps the sampling
    # distortion of the continuation probability small
    target = kl_divergence(2.0**-1.5, 0.5)
    rate, hits = _markov_rate_on_fbm(0.4, 0.02 * ETA, 2**24, range(20))
    ok_rough = hits >= 30_000 and abs(rate - target) <= 0.25 * target

    # H = 0.5 (true martingale roughness): rate within 0.003 of zero
    rate_half, hits_half = _markov_rate_on_fbm(0.5, 0.05 * ETA, 2**23, range(3))
    ok_half = abs(rate_half) <= 0.003

    check("markov-growth-rough-path", ok_rough and ok_half,
          f"H=0.4 rate {rate:.4f} vs {target:.4f} +-25% over {hits} hits; "
          f"H=0.5 rate {rate_half:.5f} within +-0.003 over {hits_half} hits")


def test_martingale_direction_stats():
    """On martingale GBM the hit directions behave like a fair grid coin:
    up-frequency at the grid probability, no lag-1 autocorrelation."""
    sigma = 0.2
    dt = (0.03 * ETA / sigma) ** 2
    n = 2 * 10**7
    gp = GbmParams(mu=0.0, sigma=sigma, s0=100.0, dt=dt, horizon=n * dt, seed=42)
    emb = embed(generate_gbm(gp), GRID)
    x = emb.directions.astype(float)
    m = x.size
    freq = float(x.mean())
    se_freq = math.sqrt(GRID.rho * (1.0 - GRID.rho) / m)
    dev_freq = abs(freq - GRID.rho) / se_freq
    ac = float(np.corrcoef(x[:-1], x[1:])[0, 1])
    dev_ac = abs(ac) * math.sqrt(m)
    ok = m >= 10_000 and dev_freq <= 4.0 and dev_ac <= 4.0
    check("martingale-direction-stats", ok,
          f"{m} hits: up-frequency {freq:.5f} vs {GRID.rho:.5f} "
          f"({dev_freq:.2f} SE), lag-1 autocorr {ac:.5f} ({dev_ac:.2f} SE); "
          "both within 4 SE")


def _test_embeddings():
    rng = np.random.default_rng(77)
    embs = []
    for seed in range(4):
        gp = GbmParams(mu=0.0, sigma=0.2, s0=100.0, dt=1e-4,
                       horizon=5.0, seed=seed)
        embs.append(embed(generate_gbm(gp), GRID))
    fp = FbmParams(hurst=0.4, sigma=0.001, s0=1.0, n=2**17, seed=1)
    embs.append(embed(generate_fbm_exp(fp), grid_from_eta(2.0**-5)))
    embs.append(embedding_from_directions((rng.random(800) < 0.6).astype(np.int8)))
    return embs


def test_zero_cost_equivalence():
    """With c = 0 the costed Markov run reproduces the frictionless
    capital on every test embedding."""
    worst = 0.0
    count = 0
    for emb in _test_embeddings():
        if emb.n_star == 0:
            continue
        params = coupled_hyperparams(emb.grid.eta)
        costed = run_markov_with_costs(emb, params, 0.0)
        free = run_markov(emb, params)
        worst = max(worst, abs(costed.final_log_capital - free.final_log_capital))
        count += 1
    check("zero-cost-equivalence", worst < 1e-9,
          f"max |costed(c=0) - frictionless| = {worst:.2e} "
          f"over {count} embeddings (tol 1e-9)")


def test_cost_optimizer_correctness():
    """The closed-form trade zeroes the growth derivative (or the hold
    conditions verify), cross-checked against a numeric root-finder."""
    rng = np.random.default_rng(99)
    worst_foc = 0.0
    worst_gap = 0.0
    holds = 0
    for _ in range(1000):
        p = rng.uniform(0.05, 0.95)
        mu = rng.uniform(-1.0, 2.0)
        delta = rng.uniform(0.003, 0.4)
        c = rng.uniform(0.0, 0.8) * delta
        beta, decision = optimal_beta(p, mu, delta, c)
        if decision == "hold":
            holds += 1
            right = log_growth_derivative(0.0, p, mu, delta, c, +1)
            left = log_growth_derivative(0.0, p, mu, delta, c, -1)
            assert right <= 1e-12 and left >= -1e-12
            continue
        side = 1 if decision == "buy" else -1
        worst_foc = max(worst_foc, abs(
            log_growth_derivative(beta, p, mu, delta, c, side)))
        # bracket the root inside the solvency region, whose edge is where
        # the adverse-outcome growth factor hits zero
        d_dn = -delta / (1.0 + delta)
        if side == 1:
            lo = 1e-13
            hi = (1.0 + mu * d_dn) / (-(d_dn - c)) * (1.0 - 1e-12)
        else:
            lo = -(1.0 + mu * delta) / (delta + c) * (1.0 - 1e-12)
            hi = -1e-13
        oracle = brentq(
            lambda b: log_growth_derivative(b, p, mu, delta, c, side),
            lo, hi, xtol=1e-14)
        worst_gap = max(worst_gap, abs(beta - oracle))
    check("cost-optimizer", worst_foc < 1e-10,
          f"max |g'(beta)| = {worst_foc:.2e} (tol 1e-10), max gap to "
          f"root-finder {worst_gap:.2e}, {holds} holds verified, "
          "1000 random instances")


def test_holder_roundtrip():
    """Continuation probability and Hoelder exponent invert exactly."""
    worst = 0.0
    for hurst in np.linspace(0.05, 0.99, 95):
        p = 1.0 / (2.0 ** (1.0 / hurst) - 1.0)
        worst = max(worst, abs(holder_from_prob(p) - hurst))
    anchor = holder_from_prob(1.0 / 3.0)
    ok = worst < 1e-12 and abs(anchor - 0.5) < 1e-15
    check("holder-roundtrip", ok,
          f"max roundtrip error {worst:.2e} (tol 1e-12); "
          f"p=1/3 maps to H={anchor!r}")
