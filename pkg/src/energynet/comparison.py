"""Comparison of two conductance functions ``b <= c`` on one vertex set.

The identity on functions is a contraction ``I: H_Ec -> H_Eb``.  Its adjoint
``I*`` is realized by the grounded solve ``L_c w = L_b u``, which is the
unique ``w`` with ``<w, v>_Ec = <u, v>_Eb`` for all ``v``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.linalg import eigh

from .energy_space import energy_kernel, harmonic_subspace
from .graph_core import (
    ATOL,
    Network,
    NetworkError,
    Vertex,
    VertexFunction,
    apply_laplacian,
    components,
    energy_form,
    energy_norm,
    laplacian_values,
    validate,
)


@dataclass(frozen=True, eq=False)
class ConductancePair:
    """Networks ``(G, b)`` and ``(G, c)`` on identical vertices and origin."""

    b: Network
    c: Network

    @classmethod
    def from_edges(cls, vertices, origin, b_edges, c_edges) -> "ConductancePair":
        vertices = list(vertices)
        return cls(Network(vertices, b_edges, origin), Network(vertices, c_edges, origin))

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return self.c.vertices

    @property
    def origin(self) -> Vertex:
        return self.c.origin

    def require_valid(self) -> None:
        problems = validate_pair(self)
        if problems:
            raise NetworkError("invalid pair: " + "; ".join(problems))


def validate_pair(pair: ConductancePair) -> list[str]:
    """Violations of ``b <= c`` and of connectivity of each network separately."""
    if not pair.b.same_vertices(pair.c):
        return ["vertex sets or origins of b and c differ"]
    problems = [f"(G,b): {p}" for p in validate(pair.b) if not p.startswith("not connected")]
    problems += [f"(G,c): {p}" for p in validate(pair.c) if not p.startswith("not connected")]
    if problems:
        return problems
    for label, net in (("b", pair.b), ("c", pair.c)):
        if len(components(net)) > 1:
            problems.append(f"(G,{label}) not connected")
    for (x, y), bxy in pair.b.conductances.items():
        cxy = pair.c.conductance(x, y)
        if bxy > cxy:
            problems.append(f"b ≰ c at ({x},{y})")
    return problems


def _checked(pair: ConductancePair) -> ConductancePair:
    pair.require_valid()
    return pair


def adjoint_inclusion(pair: ConductancePair, u: VertexFunction) -> VertexFunction:
    """``I* u`` on the c-network: the grounded solution of ``L_c w = L_b u``."""
    _checked(pair)
    rhs = laplacian_values(pair.b, u.on(pair.b).values)
    return VertexFunction(pair.c, pair.c.grounded_solve(rhs))


def adjoint_matrix(pair: ConductancePair) -> np.ndarray:
    """``I*`` in grounded (non-origin) coordinates: ``Lc_rr^{-1} Lb_rr``."""
    _checked(pair)
    f = pair.c.free_indices
    full = np.zeros((len(pair.vertices), f.size))
    full[f] = pair.b.laplacian[np.ix_(f, f)]
    full[pair.c.origin_index] = pair.b.laplacian[pair.c.origin_index, f]
    return pair.c.grounded_solve(full)[f]


def edge_ratio_transfer(pair: ConductancePair, u: VertexFunction) -> tuple[VertexFunction, float]:
    """Integrate the edge differences ``(b_xy / c_xy)(u(x) - u(y))`` over the c-edges.

    Returns the least-squares potential for the prescribed differences and
    the largest discrepancy around a fundamental cycle (0 on trees).
    """
    net = _checked(pair).c
    vals = u.on(net).values
    i, j, c = net.edge_arrays
    ratio = pair.b.weight_matrix[i, j] / c
    target = ratio * (vals[i] - vals[j])

    # integrate along a BFS spanning tree from the origin
    adj: dict[int, list[tuple[int, int, float]]] = {k: [] for k in range(len(net.vertices))}
    for e, (a, b) in enumerate(zip(i, j)):
        adj[a].append((b, e, target[e]))
        adj[b].append((a, e, -target[e]))
    pot = np.full(len(net.vertices), np.nan)
    pot[net.origin_index] = 0.0
    on_tree = np.zeros(i.size, dtype=bool)
    queue = deque([net.origin_index])
    while queue:
        a = queue.popleft()
        for b, e, d in adj[a]:
            if np.isnan(pot[b]):
                # d is the prescribed w(a) - w(b)
                pot[b] = pot[a] - d
                on_tree[e] = True
                queue.append(b)
    cycle_gap = np.abs((pot[i] - pot[j]) - target)[~on_tree]
    residual = float(cycle_gap.max(initial=0.0))
    if not (~on_tree).any():
        return VertexFunction(net, pot), 0.0

    incidence = np.zeros((i.size, len(net.vertices)))
    incidence[np.arange(i.size), i] = 1.0
    incidence[np.arange(i.size), j] = -1.0
    f = net.free_indices
    sol, *_ = np.linalg.lstsq(incidence[:, f], target, rcond=None)
    return VertexFunction.from_reduced(net, sol), residual


def _largest_ratio(lap_num: np.ndarray, lap_den: np.ndarray, free: np.ndarray) -> float:
    """Largest generalized eigenvalue of the grounded pencil ``(lap_num, lap_den)``."""
    if free.size == 0:
        return 0.0
    a = lap_num[np.ix_(free, free)]
    m = lap_den[np.ix_(free, free)]
    return float(eigh(a, m, eigvals_only=True)[-1])


def embedding_norm(pair: ConductancePair) -> float:
    """``||I|| = max_u sqrt(E_b(u) / E_c(u))`` over grounded ``u``."""
    _checked(pair)
    top = _largest_ratio(pair.b.laplacian, pair.c.laplacian, pair.c.free_indices)
    return float(np.sqrt(max(top, 0.0)))


def conjugation_identity_residual(pair: ConductancePair) -> float:
    """Largest entrywise gap between ``Lap_b v_x^(b)`` and ``I Lap_c I* v_x^(b)`` over ``x``."""
    _checked(pair)
    kernel_b = energy_kernel(pair.b)
    worst = 0.0
    for x in pair.vertices:
        if x == pair.origin:
            continue
        vb = kernel_b[x]
        direct = apply_laplacian(pair.b, vb)
        routed = apply_laplacian(pair.c, adjoint_inclusion(pair, vb)).on(pair.b)
        worst = max(worst, direct.max_abs_diff(routed))
    return worst


def cross_adjoint(pair: ConductancePair) -> np.ndarray:
    """Matrix of ``Lap^(b,c) = Lap_c^{-1} Lap_b Lap_c`` in grounded coordinates.

    ``<M u, v>_Ec = <u, Lap_b v>_Ec`` for grounded ``u, v``; act with
    :func:`apply_cross_adjoint` or multiply ``u.reduced``.
    """
    _checked(pair)
    f = pair.c.free_indices
    prod = pair.b.laplacian @ pair.c.laplacian
    full = np.zeros((len(pair.vertices), f.size))
    full[f] = prod[np.ix_(f, f)]
    full[pair.c.origin_index] = prod[pair.c.origin_index, f]
    return pair.c.grounded_solve(full)[f]


def apply_cross_adjoint(pair: ConductancePair, u: VertexFunction, matrix: np.ndarray | None = None) -> VertexFunction:
    m = cross_adjoint(pair) if matrix is None else matrix
    return VertexFunction.from_reduced(pair.c, m @ u.on(pair.c).reduced)


def cross_adjoint_residual(pair: ConductancePair, u: VertexFunction, v: VertexFunction, matrix=None) -> float:
    """``|<M u, v>_Ec - <u, Lap_b v>_Ec|``."""
    mu = apply_cross_adjoint(pair, u, matrix)
    lbv = apply_laplacian(pair.b, v.on(pair.b)).on(pair.c)
    return abs(energy_form(pair.c, mu, v.on(pair.c)) - energy_form(pair.c, u.on(pair.c), lbv))


class BoundCriterion(NamedTuple):
    epsilon: float
    bound: float
    measured_norm: float


def lower_bound_criterion(network_c: Network) -> BoundCriterion:
    """Smallest edge conductance ``eps``, the bound ``1/sqrt(eps)`` and the measured norm.

    ``measured_norm`` is the norm of the identity from ``H_Ec`` into the space
    with unit conductance on the same edges.
    """
    network_c.require_valid()
    _, _, c = network_c.edge_arrays
    if c.size == 0:
        raise NetworkError("network has no edges")
    eps = float(c.min())
    unit = Network(network_c.vertices, [(u, v, 1.0) for (u, v) in network_c.conductances], network_c.origin)
    top = _largest_ratio(unit.laplacian, network_c.laplacian, network_c.free_indices)
    return BoundCriterion(eps, 1.0 / np.sqrt(eps), float(np.sqrt(max(top, 0.0))))


class InvariantReport(NamedTuple):
    K: float
    alignment: float


def harmonic_transfer_invariant(pair: ConductancePair, interior: Iterable[Vertex]) -> InvariantReport:
    """Scaling factor of ``I*`` on one-dimensional harmonic subspaces.

    ``K = ||I* h_b||_Ec / ||h_b||_Eb``; ``alignment`` is the cosine between
    ``I* h_b`` and the c-harmonic direction.
    """
    _checked(pair)
    interior = list(interior)
    hb = harmonic_subspace(pair.b, interior)
    hc = harmonic_subspace(pair.c, interior)
    if len(hb) != 1 or len(hc) != 1:
        raise NetworkError(
            f"harmonic subspaces must be one-dimensional, got dim_b={len(hb)}, dim_c={len(hc)}"
        )
    h_b, h_c = hb[0], hc[0]
    image = adjoint_inclusion(pair, h_b)
    image_norm = energy_norm(pair.c, image)
    k = image_norm / energy_norm(pair.b, h_b)
    if image_norm == 0.0:
        return InvariantReport(k, 0.0)
    cos = abs(energy_form(pair.c, image, h_c)) / (image_norm * energy_norm(pair.c, h_c))
    return InvariantReport(float(k), float(cos))


def random_pair(
    rng: np.random.Generator,
    n: int,
    *,
    extra_edge_prob: float = 0.4,
    drop_prob: float = 0.2,
) -> ConductancePair:
    """Random ``c`` and ``b = r * c`` with ``r`` in ``[0, 1]``; ``b`` keeps a spanning tree."""
    from .graph_core import random_connected_network

    c_net = random_connected_network(rng, n, extra_edge_prob=extra_edge_prob)
    # spanning tree edges are listed first by construction
    tree = set(list(c_net.conductances)[: n - 1])
    b_edges = []
    for (x, y), cxy in c_net.conductances.items():
        if (x, y) not in tree and rng.random() < drop_prob:
            continue
        b_edges.append((x, y, cxy * float(rng.uniform(0.05, 1.0))))
    return ConductancePair(Network(c_net.vertices, b_edges, c_net.origin), c_net)


__all__ = [
    "ATOL",
    "BoundCriterion",
    "ConductancePair",
    "InvariantReport",
    "adjoint_inclusion",
    "adjoint_matrix",
    "apply_cross_adjoint",
    "conjugation_identity_residual",
    "cross_adjoint",
    "cross_adjoint_residual",
    "edge_ratio_transfer",
    "embedding_norm",
    "harmonic_transfer_invariant",
    "lower_bound_criterion",
    "random_pair",
    "validate_pair",
]
