"""Dipoles, the energy kernel, effective resistance, Kron reduction and Royden projection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import eigh

from .graph_core import (
    Network,
    NetworkError,
    StarMeshElimination,
    Vertex,
    VertexFunction,
    energy_form,
    energy_gram,
)

PINV_RTOL = 1e-12


def dipole(network: Network, x: Vertex, y: Vertex) -> VertexFunction:
    """Grounded ``v`` with ``Lap v = delta_x - delta_y`` (unit current from x to y)."""
    i, j = network._vertex_index(x), network._vertex_index(y)
    rhs = np.zeros(len(network.vertices))
    if i == j:
        return VertexFunction(network, rhs)
    rhs[i] += 1.0
    rhs[j] -= 1.0
    return VertexFunction(network, network.grounded_solve(rhs))


@dataclass(frozen=True, eq=False)
class EnergyKernel:
    """The reproducing kernel ``{v_x}`` with ``<v_x, u>_E = u(x) - u(o)``."""

    network: Network
    dipoles: dict[Vertex, VertexFunction]

    def __getitem__(self, x: Vertex) -> VertexFunction:
        return self.dipoles[x]

    @property
    def matrix(self) -> np.ndarray:
        """Column ``k`` holds ``v_x`` for the ``k``-th vertex."""
        return np.column_stack([self.dipoles[x].values for x in self.network.vertices])

    def reproduce(self, u: VertexFunction) -> np.ndarray:
        """``<v_x, u>_E`` for every vertex ``x``, in vertex order."""
        return np.array([energy_form(self.network, self.dipoles[x], u) for x in self.network.vertices])


def energy_kernel(network: Network) -> EnergyKernel:
    n = len(network.vertices)
    rhs = np.eye(n)
    rhs[network.origin_index, :] -= 1.0
    cols = network.grounded_solve(rhs)
    dipoles = {x: VertexFunction(network, cols[:, k]) for k, x in enumerate(network.vertices)}
    return EnergyKernel(network, dipoles)


def resistance_matrix(network: Network) -> np.ndarray:
    """All-pairs free effective resistance from the Laplacian pseudo-inverse."""
    lap = network.laplacian
    w, vecs = np.linalg.eigh(lap)
    keep = w > PINV_RTOL * max(w.max(initial=0.0), 1.0)
    pinv = (vecs[:, keep] / w[keep]) @ vecs[:, keep].T
    d = np.diag(pinv)
    return d[:, None] + d[None, :] - 2.0 * pinv


def effective_resistance(network: Network, x: Vertex, y: Vertex) -> float:
    """``R(x, y) = E(v_x - v_y)``."""
    v = dipole(network, x, y)
    return energy_form(network, v, v)


def schur_reduce(network: Network, keep: Iterable[Vertex], origin: Vertex | None = None) -> Network:
    """Kron reduction of ``network`` onto ``keep``.

    The reduced Laplacian is the Schur complement ``L_KK - L_KR L_RR^{-1} L_RK``,
    computed by star-mesh elimination so the new conductances come out as
    sums of positive terms.  Kept vertices retain their original order.  The
    origin carries over when kept, otherwise ``origin`` must name a kept
    vertex.
    """
    keep_set = set(keep)
    unknown = keep_set - set(network.vertices)
    if unknown:
        raise NetworkError(f"keep set has unknown vertices {sorted(unknown)}")
    if not keep_set:
        raise NetworkError("keep set is empty")
    if origin is None:
        if network.origin not in keep_set:
            raise NetworkError("origin is eliminated; pass a kept vertex as the new origin")
        origin = network.origin
    elif origin not in keep_set:
        raise NetworkError(f"new origin {origin!r} is not kept")

    network.require_valid()
    kept = [x for x in network.vertices if x in keep_set]
    k_idx = np.array([network.index[x] for x in kept], dtype=int)
    r_idx = np.array([i for i, x in enumerate(network.vertices) if x not in keep_set], dtype=int)
    reduced = StarMeshElimination(network.weight_matrix, r_idx, network.vertices).reduced
    reduced = reduced[np.ix_(k_idx, k_idx)]
    edges = [
        (kept[a], kept[b], float(reduced[a, b]))
        for a in range(len(kept))
        for b in range(a + 1, len(kept))
        if reduced[a, b] > 0
    ]
    return Network(kept, edges, origin)


def _energy_orthonormalize(network: Network, columns: np.ndarray) -> list[VertexFunction]:
    """Energy-orthonormal basis of the grounded span of ``columns``."""
    if columns.shape[1] == 0:
        return []
    grounded = columns - columns[network.origin_index]
    gram = energy_gram(network, grounded)
    gram = 0.5 * (gram + gram.T)
    w, vecs = eigh(gram)
    keep = w > PINV_RTOL * max(w.max(), 0.0)
    if not keep.any() or w.max() <= 0:
        return []
    basis = grounded @ (vecs[:, keep] / np.sqrt(w[keep]))
    return [VertexFunction(network, _fix_sign(col)) for col in basis.T]


def _fix_sign(col: np.ndarray) -> np.ndarray:
    scale = np.abs(col).max(initial=0.0)
    nz = np.flatnonzero(np.abs(col) > 1e-9 * scale)
    if nz.size and col[nz[0]] < 0:
        return -col
    return col


def harmonic_subspace(network: Network, interior: Iterable[Vertex]) -> list[VertexFunction]:
    """Energy-orthonormal basis of grounded functions harmonic at every interior vertex.

    Such functions are fixed by their boundary values (harmonic extension),
    so the span has dimension ``|boundary| - 1`` modulo constants.
    """
    interior_set = set(interior)
    unknown = interior_set - set(network.vertices)
    if unknown:
        raise NetworkError(f"interior has unknown vertices {sorted(unknown)}")
    n = len(network.vertices)
    i_idx = np.array([k for k, x in enumerate(network.vertices) if x in interior_set], dtype=int)
    b_idx = np.array([k for k, x in enumerate(network.vertices) if x not in interior_set], dtype=int)
    if b_idx.size <= 1:
        return []
    network.require_valid()
    w = network.weight_matrix
    ext = np.zeros((n, b_idx.size))
    ext[b_idx, np.arange(b_idx.size)] = 1.0
    if i_idx.size:
        # unit potential at one boundary vertex drives current w_xb into interior x
        drive = np.zeros((n, b_idx.size))
        drive[i_idx] = w[np.ix_(i_idx, b_idx)]
        ext[i_idx] = StarMeshElimination(w, i_idx, network.vertices).solve(drive)[i_idx]
    # differences of boundary indicators span the space without the constant,
    # which the extension reproduces only up to roundoff
    return _energy_orthonormalize(network, ext[:, 1:] - ext[:, :1])


def royden_project(
    network: Network, u: VertexFunction, interior: Iterable[Vertex]
) -> tuple[VertexFunction, VertexFunction]:
    """Split ``u`` into ``(fin, harm)`` with ``harm`` the projection onto the harmonic subspace."""
    harm = VertexFunction.zero(network)
    for h in harmonic_subspace(network, interior):
        harm = harm + energy_form(network, h, u) * h
    return u.on(network) - harm, harm
