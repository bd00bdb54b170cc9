"""Empirical probabilities, Hoelder inversion, and path summaries."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridbet import empirical_probs, grid_from_eta, holder_from_prob, path_stats
from gridbet.embedding import Embedding


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


class TestHolderInversion:
    def test_one_third_maps_to_half(self):
        assert holder_from_prob(1.0 / 3.0) == pytest.approx(0.5, abs=1e-15)

    def test_roundtrip_exact(self):
        # inverse of the defining relation p = 1/(2^(1/H) - 1)
        for hurst in np.linspace(0.05, 0.95, 19):
            p = 1.0 / (2.0 ** (1.0 / hurst) - 1.0)
            assert holder_from_prob(p) == pytest.approx(float(hurst), abs=1e-12)

    def test_monotone_in_p(self):
        ps = np.linspace(0.01, 1.0, 50)
        hs = [holder_from_prob(float(p)) for p in ps]
        assert all(b > a for a, b in zip(hs, hs[1:]))

    def test_p_one_maps_to_one(self):
        assert holder_from_prob(1.0) == pytest.approx(1.0, abs=1e-15)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            holder_from_prob(0.0)
        with pytest.raises(ValueError):
            holder_from_prob(1.5)


class TestEmpiricalProbs:
    def test_hand_sequence(self):
        # x = 1,1,0,1,0: after round 5, h=3 so p1=0.6;
        # pairs (1,1),(1,0),(0,1),(1,0): q11=1 over 3 up-predecessors,
        # q00=0 over 1 down-predecessor
        stats = empirical_probs(embedding_from_directions([1, 1, 0, 1, 0]))
        assert stats.p1[-1] == pytest.approx(0.6)
        assert stats.p11[-1] == pytest.approx(1.0 / 3.0)
        assert stats.p00[-1] == pytest.approx(0.0)
        assert stats.h1[-1] == pytest.approx(0.5)  # p11 = 1/3 inverts to H = 1/2

    def test_undefined_entries_are_nan_not_zero(self):
        # all-up sequence: the "previous was down" event never occurs
        stats = empirical_probs(embedding_from_directions([1, 1, 1, 1]))
        assert np.all(np.isnan(stats.p00))
        assert np.all(np.isnan(stats.h0))
        assert stats.p11[-1] == pytest.approx(1.0)

    def test_first_round_conditionals_undefined(self):
        stats = empirical_probs(embedding_from_directions([1, 0, 1]))
        assert math.isnan(stats.p11[0])
        assert math.isnan(stats.p00[0])
        assert stats.p1[0] == 1.0

    def test_zero_frequency_with_data_is_zero(self):
        # after 1,0 the up-predecessor count is 1 and q11 = 0: defined zero
        stats = empirical_probs(embedding_from_directions([1, 0]))
        assert stats.p11[-1] == 0.0
        assert math.isnan(stats.h1[-1])  # H undefined at p = 0

    def test_empty_embedding(self):
        stats = empirical_probs(embedding_from_directions([]))
        assert stats.p1.size == 0


@settings(max_examples=50, deadline=None)
@given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=80))
def test_probs_bounded_and_consistent(bits):
    stats = empirical_probs(embedding_from_directions(bits))
    for arr in (stats.p1, stats.p11, stats.p00):
        ok = ~np.isnan(arr)
        assert np.all((arr[ok] >= 0.0) & (arr[ok] <= 1.0))
    # final p11 recomputed by brute force
    x = np.array(bits)
    ups = int(x[:-1].sum())
    if ups > 0:
        q11 = int(((x[:-1] == 1) & (x[1:] == 1)).sum())
        assert stats.p11[-1] == pytest.approx(q11 / ups)
    else:
        assert math.isnan(stats.p11[-1])


class TestPathStats:
    def test_hand_values(self):
        eta = 2.0**-4
        ps = path_stats(embedding_from_directions([1, 1, 0, 1], eta=eta))
        assert ps.defined
        assert ps.tv == pytest.approx(4 * eta)
        assert ps.l == pytest.approx(2 * eta)
        assert ps.zeta == pytest.approx(0.5)

    def test_zeta_bounds(self):
        ps = path_stats(embedding_from_directions([1, 1, 1]))
        assert ps.zeta == 1.0
        ps = path_stats(embedding_from_directions([0, 0]))
        assert ps.zeta == -1.0

    def test_no_hits_undefined(self):
        ps = path_stats(embedding_from_directions([]))
        assert not ps.defined
        assert ps.tv == 0.0
        assert math.isnan(ps.zeta)
