"""STAR-RIS energy-splitting coefficients and the annealing coordinate-descent controller."""

import math
from typing import Optional

import numpy as np
from loguru import logger

from .data_model import (
    AnnealSchedule,
    CandidateSet,
    ChannelRealization,
    SaConfig,
    StarRisState,
    wrap_phase,
)
from .rng import RngStream

MAX_ORACLE_ELEMENTS = 3
MAX_ORACLE_COMBINATIONS = 1_000_000


def coefficient_matrices(state: StarRisState) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of the reflection and transmission matrices."""
    theta_r = np.sqrt(state.amplitude_r) * np.exp(1j * state.phase_r)
    theta_t = np.sqrt(state.amplitude_t) * np.exp(1j * state.phase_t)
    return theta_r, theta_t


def _offsets(count: int) -> np.ndarray:
    """0, +1, -1, +2, -2, ... truncated to ``count`` entries."""
    steps = [0]
    k = 1
    while len(steps) < count:
        steps.append(k)
        if len(steps) < count:
            steps.append(-k)
        k += 1
    return np.array(steps[:count], dtype=float)


def candidate_sets(
    current: tuple[float, float, float],
    temperature: float,
    sa: SaConfig,
    schedule: Optional[AnnealSchedule] = None,
) -> CandidateSet:
    """
    Temperature-scaled perturbation grid around one element's coefficients.

    Args:
        current: (reflection amplitude, reflection phase, transmission phase)
        temperature: current annealing temperature
        sa: grid sizes and base step widths
        schedule: supplies T_init for the step scaling; taken from ``sa`` when omitted

    Returns:
        Candidates whose first entries are the current values
    """
    schedule = schedule or sa.schedule()
    scale = temperature / schedule.t_init
    amplitude, phase_r, phase_t = current
    amp_steps = _offsets(sa.n_amp) * sa.delta_amp * scale
    phase_steps = _offsets(sa.n_phase) * sa.delta_phase * scale
    return CandidateSet(
        amplitudes=np.clip(amplitude + amp_steps, 0.0, 1.0).tolist(),
        phases_r=wrap_phase(phase_r + phase_steps).tolist(),
        phases_t=wrap_phase(phase_t + phase_steps).tolist(),
    )


def signal_contributions(
    chan: ChannelRealization, state: StarRisState
) -> tuple[complex, complex]:
    """Composite amplitudes (S_k, S_j) of both sides under ``state``."""
    theta_r, theta_t = coefficient_matrices(state)
    s_k = complex(np.sum(chan.h_ms * theta_r * chan.h_sk) + chan.h_mk)
    s_j = complex(np.sum(chan.h_ms * theta_t * chan.h_sj) + chan.h_mj)
    return s_k, s_j


def joint_metric(chan: ChannelRealization, state: StarRisState) -> float:
    s_k, s_j = signal_contributions(chan, state)
    return abs(s_k + s_j) ** 2


def candidate_metrics(
    chan: ChannelRealization,
    state: StarRisState,
    element: int,
    amplitudes: np.ndarray,
    phases_r: np.ndarray,
    phases_t: np.ndarray,
) -> np.ndarray:
    """|S_k + S_j|² for every candidate substituted at ``element`` only."""
    theta_r, theta_t = coefficient_matrices(state)
    cascade_k = chan.h_ms * chan.h_sk
    cascade_j = chan.h_ms * chan.h_sj
    rest_k = np.sum(cascade_k * theta_r) - cascade_k[element] * theta_r[element] + chan.h_mk
    rest_j = np.sum(cascade_j * theta_t) - cascade_j[element] * theta_t[element] + chan.h_mj

    amplitudes = np.asarray(amplitudes, dtype=float)
    cand_r = np.sqrt(amplitudes) * np.exp(1j * np.asarray(phases_r))
    cand_t = np.sqrt(1.0 - amplitudes) * np.exp(1j * np.asarray(phases_t))
    s_k = rest_k + cascade_k[element] * cand_r
    s_j = rest_j + cascade_j[element] * cand_t
    return np.abs(s_k + s_j) ** 2


def candidate_metric(
    chan: ChannelRealization,
    state: StarRisState,
    element: int,
    candidate: tuple[float, float, float],
) -> float:
    amplitude, phase_r, phase_t = candidate
    metrics = candidate_metrics(
        chan, state, element, np.array([amplitude]), np.array([phase_r]), np.array([phase_t])
    )
    return float(metrics[0])


def select_candidate(
    metrics, temperature: float, t_min: float, rng: RngStream
) -> int:
    """Softmax(metrics / T) sampling above T_min, first-index argmax at or below it."""
    metrics = np.asarray(metrics, dtype=float)
    if metrics.size == 0:
        raise ValueError("no candidates to select from")
    if np.all(np.isneginf(metrics)):
        raise ValueError("all candidate metrics are -inf")
    if np.any(np.isnan(metrics)) or np.any(np.isposinf(metrics)):
        raise ValueError("candidate metrics must be finite")
    if temperature <= t_min:
        return int(np.argmax(metrics))
    logits = metrics / temperature
    logits = logits - logits.max()
    probabilities = np.exp(logits)
    probabilities /= probabilities.sum()
    return int(rng.annealing.choice(metrics.size, p=probabilities))


def scale_metrics(metrics: np.ndarray, mode: str) -> np.ndarray:
    """Min-max scaling to [0, 1]; constant inputs map to zeros."""
    if mode == "none":
        return metrics
    low, high = float(metrics.min()), float(metrics.max())
    if high - low <= 0.0:
        return np.zeros_like(metrics)
    return (metrics - low) / (high - low)


def atso_optimize(
    chan: ChannelRealization,
    state: StarRisState,
    schedule: AnnealSchedule,
    sa: SaConfig,
    rng: RngStream,
    grid: Optional[CandidateSet] = None,
) -> StarRisState:
    """
    One annealing sweep over all elements.

    The temperature starts at T_init on every call and is cooled once per
    element. The input state is not modified.

    Args:
        chan: channel realization of the current slot
        state: coefficients to start from
        schedule: temperature schedule
        sa: candidate grid parameters and metric scaling
        rng: random streams; only ``annealing`` is consumed
        grid: fixed candidate set used for every element instead of the
            adaptive perturbation grid

    Returns:
        Updated coefficients
    """
    if state.n_elements != chan.n_elements:
        raise ValueError(
            f"state has {state.n_elements} elements but the channel has {chan.n_elements}"
        )
    result = state.copy()
    temperature = schedule.t_init
    fixed = grid.combinations() if grid is not None else None

    for element in range(result.n_elements):
        if fixed is None:
            candidates = candidate_sets(
                (
                    result.amplitude_r[element],
                    result.phase_r[element],
                    result.phase_t[element],
                ),
                temperature,
                sa,
                schedule,
            )
            amplitudes, phases_r, phases_t = candidates.combinations()
        else:
            amplitudes, phases_r, phases_t = fixed

        metrics = candidate_metrics(chan, result, element, amplitudes, phases_r, phases_t)
        index = select_candidate(
            scale_metrics(metrics, sa.metric_scaling), temperature, schedule.t_min, rng
        )
        result.amplitude_r[element] = amplitudes[index]
        result.phase_r[element] = phases_r[index]
        result.phase_t[element] = phases_t[index]
        temperature = max(schedule.cooling * temperature, schedule.t_min)

    return result


def exhaustive_oracle(
    chan: ChannelRealization, grid: CandidateSet
) -> tuple[StarRisState, float]:
    """Exact maximizer of |S_k + S_j|² over the full per-element grid."""
    n_elements = chan.n_elements
    if n_elements > MAX_ORACLE_ELEMENTS:
        raise ValueError(
            f"oracle supports at most {MAX_ORACLE_ELEMENTS} elements, got {n_elements}"
        )
    total = grid.size**n_elements
    if total > MAX_ORACLE_COMBINATIONS:
        raise ValueError(
            f"oracle instance has {total} combinations (limit {MAX_ORACLE_COMBINATIONS})"
        )
    logger.debug(f"Enumerating {total} STAR-RIS configurations")

    amplitudes, phases_r, phases_t = grid.combinations()
    cand_r = np.sqrt(amplitudes) * np.exp(1j * phases_r)
    cand_t = np.sqrt(1.0 - amplitudes) * np.exp(1j * phases_t)

    s_k = np.full((grid.size,) * n_elements, chan.h_mk, dtype=complex)
    s_j = np.full((grid.size,) * n_elements, chan.h_mj, dtype=complex)
    for element in range(n_elements):
        shape = [1] * n_elements
        shape[element] = grid.size
        s_k = s_k + (chan.h_ms[element] * chan.h_sk[element] * cand_r).reshape(shape)
        s_j = s_j + (chan.h_ms[element] * chan.h_sj[element] * cand_t).reshape(shape)

    metrics = np.abs(s_k + s_j) ** 2
    best = np.unravel_index(int(np.argmax(metrics)), metrics.shape)
    indices = np.array(best, dtype=int)
    state = StarRisState(
        amplitude_r=amplitudes[indices],
        phase_r=phases_r[indices],
        phase_t=phases_t[indices],
    )
    return state, float(metrics[best])


def oracle_grid(n_amp: int = 3, n_phase: int = 4) -> CandidateSet:
    """Uniform grid: amplitudes evenly in [0, 1], phases evenly in [0, 2π)."""
    return CandidateSet(
        amplitudes=np.linspace(0.0, 1.0, n_amp).tolist(),
        phases_r=(np.arange(n_phase) * 2.0 * math.pi / n_phase).tolist(),
        phases_t=(np.arange(n_phase) * 2.0 * math.pi / n_phase).tolist(),
    )


class StarRisAgent:
    """Per-slot annealing controller, usable as the environment's STAR-RIS hook."""

    def __init__(self, sa: SaConfig, grid: Optional[CandidateSet] = None):
        self.sa = sa
        self.schedule = sa.schedule()
        self.grid = grid

    def __call__(
        self, chan: ChannelRealization, state: StarRisState, rng: RngStream
    ) -> StarRisState:
        return atso_optimize(chan, state, self.schedule, self.sa, rng, grid=self.grid)
