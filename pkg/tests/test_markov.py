import numpy as np
import pytest

from fatiguebench import (DataError, DomainError, LevelGrid, MarkovModel, RainflowMatrix, SNCurve,
                          TurningPoints, build_rfm, count_cycles, discretize,
                          extract_turning_points, intensity, mc_damage, miner_damage,
                          rfm_to_markov, simulate)
from fatiguebench.markov import stationary, transition_frequencies
from fatiguebench.signal import DiscreteTPSeries
from fatiguebench.synth import bandpassed_noise


def rfm_of(counts, lo=0.0, hi=None):
    counts = np.asarray(counts, dtype=float)
    n = counts.shape[0]
    return RainflowMatrix(counts, LevelGrid(n, lo, float(n) if hi is None else hi))


@pytest.fixture(scope="module")
def fixture_rfm():
    s = bandpassed_noise(1.0, 0.8, 20.0, 600.0, seed=3)
    tp = extract_turning_points(s)
    grid = LevelGrid.covering(tp.v, 10)
    d = discretize(tp, grid)
    return build_rfm(count_cycles(TurningPoints(d.idx, d.values(), len(s))), grid), d


class TestConversion:
    def test_two_level_deterministic(self):
        m = rfm_to_markov(rfm_of([[0, 5], [0, 0]]))
        # min0 -> max1 -> min0; the other two states are unreachable
        assert m.P[0, 3] == 1.0 and m.P[3, 0] == 1.0
        assert m.P[1, 1] == 1.0 and m.P[2, 2] == 1.0

    def test_row_normalization(self):
        m = rfm_of([[0, 1, 3], [0, 0, 0], [0, 0, 0]])
        P = rfm_to_markov(m).P
        assert P[0, 3 + 1] == 0.25 and P[0, 3 + 2] == 0.75

    def test_all_zero(self):
        with pytest.raises(DataError):
            rfm_to_markov(rfm_of(np.zeros((3, 3))))

    def test_invariants(self, fixture_rfm):
        rfm, _ = fixture_rfm
        m = rfm_to_markov(rfm)
        n = m.n_levels
        assert np.all(np.abs(m.P.sum(axis=1) - 1) <= 1e-12)
        live = ~m.absorbing
        for a in np.flatnonzero(live):
            for b in np.flatnonzero(m.P[a]):
                if a < n:
                    assert b >= n and b - n > a
                else:
                    assert b < n and b < a - n

    def test_json_round_trip(self, fixture_rfm):
        m = rfm_to_markov(fixture_rfm[0])
        again = MarkovModel.from_json(m.to_json())
        np.testing.assert_array_equal(again.P, m.P)
        assert again.grid == m.grid


class TestIntensity:
    def test_identity(self):
        m = MarkovModel(np.eye(2), LevelGrid(1, 0, 1))
        assert not intensity(m, 1.0).Q.any()

    def test_swap(self):
        P = np.array([[0, 1], [1, 0]], dtype=float)
        np.testing.assert_array_equal(intensity(P, 2.0).Q, [[-2, 2], [2, -2]])

    def test_row_sums(self, fixture_rfm):
        Q = intensity(rfm_to_markov(fixture_rfm[0]), 3.7).Q
        assert np.all(np.abs(Q.sum(axis=1)) <= 1e-12)
        off = Q - np.diag(np.diag(Q))
        assert np.all(off >= 0)

    def test_rate_positive(self):
        with pytest.raises(DomainError):
            intensity(np.eye(2), 0.0)


class TestSimulate:
    def test_deterministic_alternation(self):
        m = rfm_to_markov(rfm_of([[0, 5], [0, 0]]))
        sim = simulate(m, 8, seed=1)
        np.testing.assert_array_equal(sim.bins, [0, 1] * 4 if sim.bins[0] == 0 else [1, 0] * 4)

    def test_reproducible(self, fixture_rfm):
        m = rfm_to_markov(fixture_rfm[0])
        a, b = simulate(m, 500, 7), simulate(m, 500, 7)
        np.testing.assert_array_equal(a.bins, b.bins)
        assert not np.array_equal(a.bins, simulate(m, 500, 8).bins)

    def test_alternates(self, fixture_rfm):
        sim = simulate(rfm_to_markov(fixture_rfm[0]), 1000, 0)
        d = np.diff(sim.bins)
        assert np.all(d != 0) and np.all(d[1:] * d[:-1] < 0)

    def test_frequencies_match_model(self, fixture_rfm):
        rfm, d = fixture_rfm
        m = rfm_to_markov(rfm)
        n_steps = len(d)
        model_freq = stationary(m)[:, None] * m.P
        for seed in range(5):
            _, states = simulate(m, n_steps, seed, return_states=True)
            emp = transition_frequencies(states, len(m.P))
            assert np.all(np.abs(emp - model_freq) <= 3 / np.sqrt(n_steps))

    def test_stationary_is_fixed_point(self, fixture_rfm):
        m = rfm_to_markov(fixture_rfm[0])
        pi = stationary(m)
        np.testing.assert_allclose(pi @ m.P, pi, atol=1e-9)

    def test_absorbing_trap_truncates(self, caplog):
        P = np.zeros((4, 4))
        P[0, 3] = 1.0
        P[3, 1] = 1.0  # leads into an absorbing minimum
        P[1, 1] = P[2, 2] = 1.0
        m = MarkovModel(P, LevelGrid(2, 0, 2))
        sim = simulate(m, 10, 0)
        assert len(sim) < 10
        assert "absorbing" in caplog.text

    def test_n_steps(self):
        with pytest.raises(DomainError):
            simulate(rfm_to_markov(rfm_of([[0, 1], [0, 0]])), 1, 0)


class TestMCDamage:
    def test_constant_amplitude(self):
        m = rfm_to_markov(rfm_of([[0, 5], [0, 0]], lo=0.0, hi=4.0))
        a, b = m.levels
        n = 6
        sim = DiscreteTPSeries([0, 1] * n + [0], np.arange(2 * n + 1), m.grid)
        sn = SNCurve(3, 2.0)
        ds = mc_damage(sim, m, sn)
        assert ds.final == pytest.approx(n * ((b - a) / 2) ** 3 / 2.0, rel=1e-14)

    def test_degenerate_single_state(self):
        m = rfm_to_markov(rfm_of([[0, 5], [0, 0]]))
        assert mc_damage(DiscreteTPSeries([1], [0], m.grid), m, SNCurve(3, 1.0)).final == 0.0

    def test_duration_axis(self):
        m = rfm_to_markov(rfm_of([[0, 5], [0, 0]]))
        ds = mc_damage(simulate(m, 5, 0), m, SNCurve(3, 1.0), duration=8.0)
        np.testing.assert_allclose(ds.t, [0, 2, 4, 6, 8])

    def test_ensemble_matches_regenerated_series(self, fixture_rfm):
        rfm, d = fixture_rfm
        m = rfm_to_markov(rfm)
        sn = SNCurve(4, 1.0)
        src = miner_damage(count_cycles(d.values()), sn)
        finals = np.array([mc_damage(simulate(m, len(d), seed), m, sn).final
                           for seed in range(100)])
        assert abs(finals.mean() - src) / src <= 0.10
        assert finals.std() > 0
