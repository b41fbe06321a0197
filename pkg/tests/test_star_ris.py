import itertools
import math

import numpy as np
import pytest

from star_uvaa.config import with_overrides
from star_uvaa.data_model import (
    AnnealSchedule,
    CandidateSet,
    ChannelRealization,
    SaConfig,
    StarRisState,
)
from star_uvaa.main import oracle_trials
from star_uvaa.rng import RngStream
from star_uvaa.star_ris import (
    StarRisAgent,
    _offsets,
    atso_optimize,
    candidate_metric,
    candidate_metrics,
    candidate_sets,
    coefficient_matrices,
    exhaustive_oracle,
    joint_metric,
    oracle_grid,
    scale_metrics,
    select_candidate,
)

from .conftest import tiny_config


def random_channel(n_elements: int, seed: int = 0) -> ChannelRealization:
    """Channel with unit-scale complex Gaussian coefficients."""
    gen = np.random.default_rng(seed)

    def draw(size=None):
        return gen.standard_normal(size) + 1j * gen.standard_normal(size)

    return ChannelRealization(
        h_ms=draw(n_elements),
        h_sk=draw(n_elements),
        h_sj=draw(n_elements),
        h_mk=complex(draw()),
        h_mj=complex(draw()),
    )


# ============================================================================
# Test coefficients and candidates
# ============================================================================


class TestCoefficients:
    """Tests for the energy-splitting state and candidate grids."""

    def test_energy_conservation(self):
        """Test that reflected and transmitted power always sum to one."""
        state = StarRisState(
            amplitude_r=[0.0, 0.25, 1.0], phase_r=[0.1, 2.0, 6.0], phase_t=[1.0, -1.0, 7.0]
        )
        theta_r, theta_t = coefficient_matrices(state)
        np.testing.assert_allclose(np.abs(theta_r) ** 2 + np.abs(theta_t) ** 2, 1.0)

    def test_phases_wrapped(self):
        """Test that phases are stored in [0, 2π)."""
        state = StarRisState(amplitude_r=[0.5], phase_r=[-0.5], phase_t=[7.0])
        assert state.phase_r[0] == pytest.approx(2 * math.pi - 0.5)
        assert state.phase_t[0] == pytest.approx(7.0 - 2 * math.pi)

    def test_amplitude_range(self):
        """Test that amplitudes outside [0, 1] are rejected."""
        with pytest.raises(ValueError):
            StarRisState(amplitude_r=[1.2], phase_r=[0.0], phase_t=[0.0])

    def test_schedule_validation(self):
        """Test the annealing schedule invariants."""
        with pytest.raises(ValueError):
            AnnealSchedule(t_init=0.05, t_min=0.1)
        with pytest.raises(ValueError):
            AnnealSchedule(cooling=1.0)

    def test_offsets(self):
        """Test the symmetric step pattern."""
        assert _offsets(4).tolist() == [0.0, 1.0, -1.0, 2.0]
        assert _offsets(1).tolist() == [0.0]

    def test_candidates_start_at_current(self):
        """Test that the current values head every candidate list."""
        sa = SaConfig()
        candidates = candidate_sets((0.5, 1.0, 2.0), sa.t_init, sa)

        assert candidates.amplitudes == [0.5, 0.75, 0.25]
        assert candidates.phases_r[0] == pytest.approx(1.0)
        assert candidates.phases_t[1] == pytest.approx(2.0 + math.pi / 4)
        assert candidates.size == 3 * 4 * 4

    def test_candidates_shrink_with_temperature(self):
        """Test that steps scale with T / T_init."""
        sa = SaConfig()
        candidates = candidate_sets((0.5, 1.0, 2.0), sa.t_init / 2, sa)
        assert candidates.amplitudes[1] == pytest.approx(0.5 + 0.125)

    def test_candidates_clipped(self):
        """Test that amplitude candidates stay in [0, 1]."""
        candidates = candidate_sets((0.95, 0.0, 0.0), 1.0, SaConfig())
        assert max(candidates.amplitudes) == 1.0

    def test_combinations_in_product_order(self):
        """Test the flattened candidate order."""
        grid = CandidateSet(amplitudes=[0.0, 1.0], phases_r=[0.0], phases_t=[0.0, 1.0])
        amplitudes, _, phases_t = grid.combinations()

        assert amplitudes.tolist() == [0.0, 0.0, 1.0, 1.0]
        assert phases_t.tolist() == [0.0, 1.0, 0.0, 1.0]


# ============================================================================
# Test metrics and selection
# ============================================================================


class TestMetricsAndSelection:
    """Tests for candidate metrics and the annealing acceptance rule."""

    def test_candidate_metric_matches_full_metric(self):
        """Test that single-element substitution agrees with a full recomputation."""
        chan = random_channel(3)
        state = StarRisState.initial(3)
        candidate = (0.2, 1.3, 4.0)

        changed = state.copy()
        changed.amplitude_r[1], changed.phase_r[1], changed.phase_t[1] = candidate

        assert candidate_metric(chan, state, 1, candidate) == pytest.approx(
            joint_metric(chan, changed)
        )

    def test_vectorized_metrics(self):
        """Test that the vectorized metrics match one-by-one evaluation."""
        chan = random_channel(3, seed=1)
        state = StarRisState.initial(3)
        amplitudes, phases_r, phases_t = oracle_grid().combinations()

        batch = candidate_metrics(chan, state, 2, amplitudes, phases_r, phases_t)
        single = [
            candidate_metric(chan, state, 2, (a, r, t))
            for a, r, t in zip(amplitudes, phases_r, phases_t)
        ]
        np.testing.assert_allclose(batch, single)

    def test_greedy_first_argmax(self, rng):
        """Test that at T_min the first maximum wins."""
        assert select_candidate([1.0, 3.0, 3.0], 0.1, 0.1, rng) == 1

    def test_invalid_metrics(self, rng):
        """Test that undefined metrics are rejected."""
        with pytest.raises(ValueError):
            select_candidate([-np.inf, -np.inf], 1.0, 0.1, rng)
        with pytest.raises(ValueError):
            select_candidate([0.0, np.nan], 1.0, 0.1, rng)
        with pytest.raises(ValueError):
            select_candidate([], 1.0, 0.1, rng)

    def test_hot_selection_explores(self):
        """Test that a high temperature sometimes accepts the worse candidate."""
        rng = RngStream(0)
        picks = [select_candidate([0.0, 1.0], 100.0, 0.1, rng) for _ in range(500)]
        assert 0.3 < picks.count(0) / len(picks) < 0.7

    def test_selection_reproducible(self):
        """Test that sampling depends only on the annealing stream."""
        a = [select_candidate([0.2, 0.5, 0.3], 1.0, 0.1, RngStream(4)) for _ in range(5)]
        b = [select_candidate([0.2, 0.5, 0.3], 1.0, 0.1, RngStream(4)) for _ in range(5)]
        assert a == b

    def test_minmax_scaling(self):
        """Test min-max scaling and its constant-input case."""
        np.testing.assert_allclose(scale_metrics(np.array([2.0, 4.0, 3.0]), "minmax"), [0, 1, 0.5])
        np.testing.assert_array_equal(scale_metrics(np.array([5.0, 5.0]), "minmax"), [0.0, 0.0])
        np.testing.assert_array_equal(scale_metrics(np.array([2.0, 4.0]), "none"), [2.0, 4.0])


# ============================================================================
# Test atso_optimize and the oracle
# ============================================================================


class TestAtso:
    """Tests for the annealing sweep and the exhaustive oracle."""

    def test_greedy_sweep_never_worse(self):
        """Test that a cold sweep cannot lower the joint metric."""
        sa = SaConfig(t_init=0.1, t_min=0.1)
        for seed in range(5):
            chan = random_channel(6, seed=seed)
            state = StarRisState.initial(6)

            result = atso_optimize(chan, state, sa.schedule(), sa, RngStream(seed))

            assert joint_metric(chan, result) >= joint_metric(chan, state) - 1e-12

    def test_input_not_modified(self, rng):
        """Test that the starting state is left untouched."""
        sa = SaConfig()
        state = StarRisState.initial(4)

        atso_optimize(random_channel(4), state, sa.schedule(), sa, rng)

        np.testing.assert_array_equal(state.amplitude_r, np.full(4, 0.5))

    def test_element_mismatch(self, rng):
        """Test that a state for another surface is refused."""
        sa = SaConfig()
        with pytest.raises(ValueError):
            atso_optimize(random_channel(4), StarRisState.initial(5), sa.schedule(), sa, rng)

    def test_oracle_matches_brute_force(self):
        """Test the broadcast enumeration against an explicit loop."""
        chan = random_channel(2, seed=7)
        grid = oracle_grid(2, 3)
        columns = list(zip(*grid.combinations()))

        best = max(
            joint_metric(
                chan,
                StarRisState(
                    amplitude_r=[a[0], b[0]], phase_r=[a[1], b[1]], phase_t=[a[2], b[2]]
                ),
            )
            for a, b in itertools.product(columns, repeat=2)
        )
        state, metric = exhaustive_oracle(chan, grid)

        assert metric == pytest.approx(best)
        assert joint_metric(chan, state) == pytest.approx(best)

    def test_oracle_bounds_greedy(self):
        """Test that greedy descent on the oracle grid never beats the oracle."""
        sa = SaConfig(t_init=0.1, t_min=0.1)
        grid = oracle_grid()
        for seed in range(5):
            chan = random_channel(2, seed=seed)
            greedy = atso_optimize(
                chan, StarRisState.initial(2), sa.schedule(), sa, RngStream(seed), grid=grid
            )
            _, best = exhaustive_oracle(chan, grid)
            assert joint_metric(chan, greedy) <= best + 1e-9

    def test_oracle_size_limit(self):
        """Test that large surfaces are refused."""
        with pytest.raises(ValueError, match="at most"):
            exhaustive_oracle(random_channel(4), oracle_grid())

    def test_agent_uses_annealing_stream_only(self):
        """Test the controller hook's randomness."""
        agent = StarRisAgent(SaConfig())
        a, b = RngStream(1), RngStream(1)

        agent(random_channel(4), StarRisState.initial(4), a)

        assert a.fading.random() == b.fading.random()
        assert a.policy.random() == b.policy.random()


class TestAcceptanceLaw:
    """Empirical acceptance frequencies of the annealing rule."""

    def test_frequencies_match_softmax(self):
        """Test sampled frequencies against softmax(metrics / T)."""
        metrics = np.array([0.2, 1.0, 0.6])
        temperature = 0.5
        expected = np.exp(metrics / temperature)
        expected /= expected.sum()
        rng = RngStream(0)

        picks = np.array([select_candidate(metrics, temperature, 0.1, rng) for _ in range(100_000)])
        observed = np.bincount(picks, minlength=3) / picks.size

        np.testing.assert_allclose(observed, expected, atol=0.02)


# ============================================================================
# Test annealing against exhaustive search on simulator instances
# ============================================================================


class TestAnnealingVersusOracle:
    """Annealing quality on 2-element surfaces drawn from the simulator."""

    def test_close_to_oracle(self):
        """Test that annealing reaches 99% of the optimum mostly and 90% always."""
        cfg = with_overrides(tiny_config(seed=0), {"ris.rows": 1, "ris.cols": 2})
        ratios = np.array([row["ratio"] for row in oracle_trials(cfg, 100)])

        assert ratios.size == 100
        assert np.mean(ratios >= 0.99) >= 0.8
        assert np.all(ratios >= 0.9)
