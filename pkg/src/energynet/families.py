"""Deterministic generators for named networks and their closed-form functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph_core import Network, NetworkError, Vertex, VertexFunction

KINDS = (
    "path",
    "cycle",
    "complete",
    "binary_tree",
    "horizontally_connected_tree",
    "geometric_integers",
)


@dataclass(frozen=True)
class FamilySpec:
    """Parameters of a named family.

    ``size`` is the vertex count for ``cycle``/``complete``, the number of
    edges for ``path`` (vertices ``0..size``), the depth for the trees and the
    truncation radius ``N`` for ``geometric_integers``.  ``level_weights``
    lists ``c_1..c_depth`` for the horizontally connected tree; a single
    value is broadcast to every level.
    """

    kind: str
    size: int
    base: float | None = None
    level_weights: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise NetworkError(f"unknown family {self.kind!r}; expected one of {', '.join(KINDS)}")
        if int(self.size) != self.size or self.size < 1:
            raise NetworkError(f"size must be a positive integer, got {self.size!r}")
        if self.kind == "geometric_integers":
            if self.base is None or not self.base > 1:
                raise NetworkError(f"geometric_integers needs base > 1, got {self.base!r}")
        if self.kind == "horizontally_connected_tree":
            weights = tuple(float(w) for w in self.level_weights) or (1.0,)
            if len(weights) == 1:
                weights = weights * self.size
            if len(weights) != self.size:
                raise NetworkError(
                    f"need {self.size} level weights (levels 1..{self.size}), got {len(weights)}"
                )
            if any(not w > 0 for w in weights):
                raise NetworkError("level weights must be positive")
            object.__setattr__(self, "level_weights", weights)
        if self.kind in ("cycle",) and self.size < 3:
            raise NetworkError("cycle needs at least 3 vertices")


def generate(spec: FamilySpec) -> Network:
    builder = {
        "path": _path,
        "cycle": _cycle,
        "complete": _complete,
        "binary_tree": lambda s: _binary_tree(s.size, None),
        "horizontally_connected_tree": lambda s: _binary_tree(s.size, s.level_weights),
        "geometric_integers": lambda s: geometric_integers(s.size, s.base),
    }[spec.kind]
    return builder(spec)


def path(n: int) -> Network:
    return generate(FamilySpec("path", n))


def cycle(n: int) -> Network:
    return generate(FamilySpec("cycle", n))


def complete(n: int) -> Network:
    return generate(FamilySpec("complete", n))


def binary_tree(depth: int) -> Network:
    return generate(FamilySpec("binary_tree", depth))


def horizontally_connected_tree(depth: int, level_weights: Sequence[float] | float = 1.0) -> Network:
    if np.isscalar(level_weights):
        level_weights = (float(level_weights),)
    return generate(FamilySpec("horizontally_connected_tree", depth, level_weights=tuple(level_weights)))


def _path(spec: FamilySpec) -> Network:
    names = [str(k) for k in range(spec.size + 1)]
    return Network(names, [(names[k], names[k + 1], 1.0) for k in range(spec.size)], names[0])


def _cycle(spec: FamilySpec) -> Network:
    n = spec.size
    names = [str(k) for k in range(n)]
    return Network(names, [(names[k], names[(k + 1) % n], 1.0) for k in range(n)], names[0])


def _complete(spec: FamilySpec) -> Network:
    n = spec.size
    names = [str(k) for k in range(n)]
    edges = [(names[a], names[b], 1.0) for a in range(n) for b in range(a + 1, n)]
    return Network(names, edges, names[0])


def tree_levels(depth: int) -> list[list[Vertex]]:
    """Vertex names of a binary tree grouped by level, in heap order."""
    return [[str(i) for i in range(2**k - 1, 2 ** (k + 1) - 1)] for k in range(depth + 1)]


def _binary_tree(depth: int, level_weights: Sequence[float] | None) -> Network:
    levels = tree_levels(depth)
    names = [x for level in levels for x in level]
    edges = [(str((i - 1) // 2), str(i), 1.0) for i in range(1, len(names))]
    if level_weights is not None:
        for k, ck in enumerate(level_weights, start=1):
            level = levels[k]
            m = len(level)
            # ring when the level can close one; a single edge for two vertices
            for a in range(m if m >= 3 else m - 1):
                edges.append((level[a], level[(a + 1) % m], float(ck)))
    return Network(names, edges, "0")


def geometric_name(n: int) -> Vertex:
    return str(n)


def geometric_integers(N: int, base: float) -> Network:
    """Integers ``-N..N`` with ``c_{n-1,n} = base**max(|n|, |n-1|)``, origin 0."""
    if not base > 1:
        raise NetworkError(f"base must exceed 1, got {base!r}")
    names = [geometric_name(k) for k in range(-N, N + 1)]
    edges = [
        (geometric_name(k - 1), geometric_name(k), float(base) ** max(abs(k), abs(k - 1)))
        for k in range(-N + 1, N + 1)
    ]
    return Network(names, edges, geometric_name(0))


def natural_interior(spec: FamilySpec) -> list[Vertex]:
    """Vertices away from the truncation boundary of a family.

    Path and geometric integers drop their two endpoints, trees drop the
    deepest level; the closed families (cycle, complete) keep everything.
    """
    if spec.kind == "path":
        return [str(k) for k in range(1, spec.size)]
    if spec.kind == "geometric_integers":
        return [geometric_name(k) for k in range(-spec.size + 1, spec.size)]
    if spec.kind in ("binary_tree", "horizontally_connected_tree"):
        return [x for level in tree_levels(spec.size)[:-1] for x in level]
    return list(generate(spec).vertices)


def closed_form_harmonic(base: float, N: int) -> VertexFunction:
    """``h(n) = sgn(n) / (2 sqrt(base-1)) * (1 - base**-|n|)`` on ``-N..N``."""
    if not base > 1:
        raise NetworkError(f"base must exceed 1, got {base!r}")
    net = geometric_integers(N, base)
    ks = np.arange(-N, N + 1)
    vals = np.sign(ks) / (2.0 * math.sqrt(base - 1.0)) * (1.0 - float(base) ** (-np.abs(ks)))
    return VertexFunction(net, vals)


def closed_form_dipole(base: float, N: int, n: int) -> VertexFunction:
    """Dipole ``v_n`` of the infinite geometric integers, restricted to ``-N..N``.

    For ``n > 0``: ``v_n(k) = sum_{j=1}^{min(k, n)} base**-j`` when ``k > 0``
    and 0 otherwise; negative ``n`` is the mirror image.
    """
    if not base > 1:
        raise NetworkError(f"base must exceed 1, got {base!r}")
    if n == 0 or abs(n) > N:
        raise NetworkError(f"dipole index must satisfy 0 < |n| <= {N}, got {n}")
    net = geometric_integers(N, base)
    ks = np.arange(-N, N + 1)
    side = np.sign(n)
    steps = np.clip(side * ks, 0, abs(n))
    # partial geometric sum sum_{j=1}^{m} base^-j
    vals = (1.0 - float(base) ** (-steps)) / (base - 1.0)
    return VertexFunction(net, vals)
