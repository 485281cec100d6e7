"""Conductance-weighted random walks: escape probabilities, exact and simulated."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve

from .energy_space import effective_resistance
from .graph_core import Network, NetworkError, Vertex, degree

STEP_CAP = 10**7
_BATCH = 4096


@dataclass(frozen=True)
class WalkResult:
    probability: float
    method: str
    trials: int | None = None
    standard_error: float | None = None
    seed: int | None = None
    censored: int = 0


def transition_probability(network: Network, x: Vertex, y: Vertex) -> float:
    """``p(x, y) = c_xy / c(x)``."""
    cx = degree(network, x)
    if cx <= 0:
        raise NetworkError(f"vertex {x!r} is isolated")
    return network.conductance(x, y) / cx


def transition_matrix(network: Network) -> np.ndarray:
    w = network.weight_matrix
    deg = w.sum(axis=1)
    if np.any(deg <= 0):
        isolated = [network.vertices[k] for k in np.flatnonzero(deg <= 0)]
        raise NetworkError(f"isolated vertices {isolated}")
    return w / deg[:, None]


def escape_probability_exact(network: Network, x: Vertex, o: Vertex) -> WalkResult:
    """``P_x(tau_o < tau_x^+)`` by first-step analysis.

    ``q(z)`` is the chance of reaching ``o`` before ``x`` from ``z``, harmonic
    for the walk off ``{x, o}`` with ``q(o) = 1``, ``q(x) = 0``.
    """
    if x == o:
        raise NetworkError("escape probability needs x != o")
    network.require_valid()
    p = transition_matrix(network)
    ix, io = network._vertex_index(x), network._vertex_index(o)
    rest = np.array([k for k in range(len(network.vertices)) if k not in (ix, io)], dtype=int)
    q = np.zeros(len(network.vertices))
    q[io] = 1.0
    if rest.size:
        a = np.eye(rest.size) - p[np.ix_(rest, rest)]
        q[rest] = solve(a, p[rest, io])
    return WalkResult(float(p[ix] @ q), "exact")


_GAMMA = np.uint64(0x9E3779B97F4A7C15)


def _mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output function."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def trial_streams(seed: int, trials: np.ndarray) -> np.ndarray:
    """Starting SplitMix64 states, one per trial index, derived from ``(seed, trial)``."""
    with np.errstate(over="ignore"):
        base = _mix64(np.uint64(seed % 2**64) + _GAMMA)
        return _mix64(base ^ (trials.astype(np.uint64) * _GAMMA + np.uint64(1)))


def _uniforms(states: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Step ``k`` of each trial's SplitMix64 sequence, as doubles in ``[0, 1)``."""
    with np.errstate(over="ignore"):
        out = _mix64(states + (steps.astype(np.uint64) + np.uint64(1)) * _GAMMA)
    return (out >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


def escape_probability_mc(
    network: Network, x: Vertex, o: Vertex, trials: int, seed: int, step_cap: int = STEP_CAP
) -> WalkResult:
    """Fraction of simulated walks from ``x`` that reach ``o`` before returning to ``x``.

    Every trial draws from its own counter-based stream, so the estimate
    depends only on ``(seed, trials)``.  Trials that exceed ``step_cap`` are
    counted as failures and reported in ``censored``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if x == o:
        raise NetworkError("escape probability needs x != o")
    network.require_valid()
    cum = np.cumsum(transition_matrix(network), axis=1)
    cum[:, -1] = 1.0
    ix, io = network._vertex_index(x), network._vertex_index(o)

    hits = 0
    censored = 0
    for start in range(0, trials, _BATCH):
        ids = np.arange(start, min(start + _BATCH, trials))
        states = trial_streams(seed, ids)
        pos = np.full(ids.size, ix)
        steps = np.zeros(ids.size, dtype=np.int64)
        active = np.ones(ids.size, dtype=bool)
        while active.any():
            k = np.flatnonzero(active)
            r = _uniforms(states[k], steps[k])
            rows = cum[pos[k]]
            nxt = (r[:, None] < rows).argmax(axis=1)
            pos[k] = nxt
            steps[k] += 1
            hit = nxt == io
            back = nxt == ix
            capped = ~hit & ~back & (steps[k] >= step_cap)
            hits += int(hit.sum())
            censored += int(capped.sum())
            active[k[hit | back | capped]] = False

    p_hat = hits / trials
    se = float(np.sqrt(p_hat * (1.0 - p_hat) / trials))
    return WalkResult(p_hat, "monte_carlo", trials, se, seed, censored)


class Reciprocity(NamedTuple):
    lhs: float
    rhs: float
    gap: float


def reciprocity_report(network: Network, x: Vertex, o: Vertex) -> Reciprocity:
    """Escape probability against ``1 / (c(x) R(x, o))``."""
    lhs = escape_probability_exact(network, x, o).probability
    rhs = 1.0 / (degree(network, x) * effective_resistance(network, x, o))
    return Reciprocity(lhs, rhs, abs(lhs - rhs))
