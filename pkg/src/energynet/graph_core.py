"""Weighted resistance networks, grounded vertex functions and the energy form.

A :class:`Network` is a finite vertex set with symmetric nonnegative edge
conductances and a distinguished origin.  Functions on the vertices are kept
as grounded representatives (value 0 at the origin), which identifies the
energy space with plain arrays of length ``|V|`` and makes equality of
classes modulo constants an entrywise comparison.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

ATOL = 1e-9

Vertex = str
EdgeInput = tuple[Vertex, Vertex, float]


class NetworkError(ValueError):
    """Raised when a network is malformed or an operation is ill-posed on it."""


@dataclass(frozen=True, eq=False)
class Network:
    """Conductance network on an ordered vertex list.

    ``edges`` holds the entries exactly as supplied (one per ordered pair);
    the symmetric conductance store is derived from it.  Construction never
    raises on invariant violations so that :func:`validate` can report them;
    every numerical operation calls :meth:`require_valid` first.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[EdgeInput, ...]
    origin: Vertex

    def __init__(
        self,
        vertices: Iterable[Vertex],
        edges: Iterable[EdgeInput] | Mapping[tuple[Vertex, Vertex], float],
        origin: Vertex,
    ):
        if isinstance(edges, Mapping):
            edges = [(u, v, c) for (u, v), c in edges.items()]
        object.__setattr__(self, "vertices", tuple(str(x) for x in vertices))
        object.__setattr__(
            self, "edges", tuple((str(u), str(v), float(c)) for u, v, c in edges)
        )
        object.__setattr__(self, "origin", str(origin))

    def __repr__(self) -> str:
        return (
            f"Network(|V|={len(self.vertices)}, |E|={len(self.conductances)}, "
            f"origin={self.origin!r})"
        )

    # -- structure -----------------------------------------------------------

    @cached_property
    def index(self) -> dict[Vertex, int]:
        return {x: i for i, x in enumerate(self.vertices)}

    @cached_property
    def conductances(self) -> dict[tuple[Vertex, Vertex], float]:
        """Symmetric store keyed by the unordered pair in vertex order.

        Zero-weight entries are dropped (no edge).  Invalid input is resolved
        arbitrarily here; :func:`validate` is what reports it.
        """
        store: dict[tuple[Vertex, Vertex], float] = {}
        for u, v, c in self.edges:
            if u == v or u not in self.index or v not in self.index:
                continue
            key = (u, v) if self.index[u] < self.index[v] else (v, u)
            store.setdefault(key, c)
        return {k: c for k, c in store.items() if c != 0.0}

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index arrays ``(i, j, c)`` with one entry per undirected edge."""
        if not self.conductances:
            empty = np.zeros(0, dtype=int)
            return empty, empty.copy(), np.zeros(0)
        pairs = list(self.conductances)
        i = np.array([self.index[u] for u, _ in pairs])
        j = np.array([self.index[v] for _, v in pairs])
        c = np.array([self.conductances[p] for p in pairs])
        return i, j, c

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        n = len(self.vertices)
        w = np.zeros((n, n))
        i, j, c = self.edge_arrays
        w[i, j] = c
        w[j, i] = c
        return w

    @cached_property
    def laplacian(self) -> np.ndarray:
        """Dense Laplacian ``L = diag(c(x)) - W`` (acts on ungrounded arrays)."""
        self.require_valid()
        w = self.weight_matrix
        lap = -w.copy()
        lap[np.diag_indices_from(lap)] = w.sum(axis=1)
        return lap

    @property
    def origin_index(self) -> int:
        return self.index[self.origin]

    @cached_property
    def free_indices(self) -> np.ndarray:
        """Indices of the non-origin vertices, in vertex order."""
        return np.array([i for i in range(len(self.vertices)) if i != self.origin_index], dtype=int)

    @cached_property
    def reduced_laplacian(self) -> np.ndarray:
        """Laplacian with the origin row and column deleted (SPD when connected)."""
        f = self.free_indices
        return self.laplacian[np.ix_(f, f)]

    @cached_property
    def _reduced_factor(self) -> "StarMeshElimination":
        self.require_valid()
        return StarMeshElimination(self.weight_matrix, self.free_indices, self.vertices)

    def grounded_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``L w = rhs`` for grounded ``w`` (``w[o] = 0``).

        ``rhs`` has shape ``(n,)`` or ``(n, k)`` and each column must sum to
        zero; only the non-origin equations are used.
        """
        return self._reduced_factor.solve(np.asarray(rhs, dtype=float))

    def neighbors(self, x: Vertex) -> dict[Vertex, float]:
        i = self._vertex_index(x)
        row = self.weight_matrix[i]
        return {self.vertices[j]: float(row[j]) for j in np.flatnonzero(row)}

    def conductance(self, x: Vertex, y: Vertex) -> float:
        return float(self.weight_matrix[self._vertex_index(x), self._vertex_index(y)])

    def same_vertices(self, other: "Network") -> bool:
        return self.vertices == other.vertices and self.origin == other.origin

    @cached_property
    def problems(self) -> tuple[str, ...]:
        return tuple(validate(self))

    def require_valid(self) -> None:
        problems = self.problems
        if problems:
            raise NetworkError("invalid network: " + "; ".join(problems))

    def _vertex_index(self, x: Vertex) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise NetworkError(f"unknown vertex {x!r}") from None

    def scaled(self, alpha: float) -> "Network":
        return Network(self.vertices, [(u, v, alpha * c) for (u, v), c in self.conductances.items()], self.origin)


class StarMeshElimination:
    """Gaussian elimination of a weighted Laplacian in star-mesh form.

    Eliminating vertex ``k`` joins every pair of its remaining neighbours by
    ``w_ik w_kj / d_k`` with pivot ``d_k = sum_m w_km`` over the vertices not
    yet eliminated.  Pivots are sums of positive weights and never formed by
    subtraction, so the factorization keeps full relative accuracy even when
    conductances span many orders of magnitude.  Vertices that are not
    eliminated act as Dirichlet nodes held at potential 0, and
    :attr:`reduced` holds the Kron-reduced weights among them.
    """

    def __init__(self, weights: np.ndarray, eliminate: Sequence[int], names: Sequence[Vertex] | None = None):
        w = np.array(weights, dtype=float)
        np.fill_diagonal(w, 0.0)
        n = w.shape[0]
        pending = list(np.asarray(eliminate, dtype=int))
        self.order = np.empty(len(pending), dtype=int)
        self.pivots = np.empty(len(pending))
        self.rows = np.zeros((len(pending), n))
        alive = np.ones(n, dtype=bool)
        for t in range(len(pending)):
            # minimum degree first: on trees this peels leaves, so branches
            # carrying no current back-substitute to exact copies
            fill = [np.count_nonzero(w[k]) for k in pending]
            k = pending.pop(int(np.argmin(fill)))
            self.order[t] = k
            alive[k] = False
            row = np.where(alive, w[k], 0.0)
            d = row.sum()
            if not d > 0:
                label = names[k] if names is not None else k
                raise NetworkError(f"vertex {label!r} is cut off from the kept vertices; network is not connected")
            nz = np.flatnonzero(row)
            w[np.ix_(nz, nz)] += np.outer(row[nz], row[nz]) / d
            w[nz, nz] = 0.0
            w[k, :] = 0.0
            w[:, k] = 0.0
            self.rows[t] = row
            self.pivots[t] = d
        self.reduced = w

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Potentials on the eliminated vertices for injected currents ``rhs``.

        Kept vertices are held at 0 and their entries of the result are 0.
        """
        f = np.array(rhs, dtype=float)
        col = (slice(None),) + (None,) * (f.ndim - 1)
        for t, k in enumerate(self.order):
            f += self.rows[t][col] * (f[k] / self.pivots[t])
        x = np.zeros_like(f)
        for t in range(self.order.size - 1, -1, -1):
            k = self.order[t]
            x[k] = (f[k] + self.rows[t] @ x) / self.pivots[t]
        return x


def components(network: Network) -> list[list[Vertex]]:
    """Connected components over positive-conductance edges, in vertex order."""
    adj: dict[Vertex, list[Vertex]] = {x: [] for x in network.vertices}
    for (u, v), c in network.conductances.items():
        if c > 0:
            adj[u].append(v)
            adj[v].append(u)
    seen: set[Vertex] = set()
    comps = []
    for start in network.vertices:
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        comps.append(sorted(comp, key=network.index.__getitem__))
    return comps


def validate(network: Network) -> list[str]:
    """Return one message per violated network invariant (empty when valid)."""
    problems: list[str] = []
    index = network.index
    if len(index) != len(network.vertices):
        dupes = sorted({x for x in network.vertices if network.vertices.count(x) > 1})
        problems.append("duplicate vertices " + ", ".join(dupes))
    if network.origin not in index:
        problems.append(f"origin {network.origin!r} not in vertex set")

    given: dict[tuple[Vertex, Vertex], float] = {}
    for u, v, c in network.edges:
        bad = [x for x in (u, v) if x not in index]
        if bad:
            problems.append(f"edge ({u},{v}) references unknown vertex " + ", ".join(bad))
            continue
        if u == v:
            problems.append(f"loop at {u}")
            continue
        if not np.isfinite(c) or c < 0:
            problems.append(f"invalid conductance {c!r} on ({u},{v})")
        if (u, v) in given:
            problems.append(f"duplicate edge ({u},{v})")
            continue
        given[(u, v)] = c
        if (v, u) in given and given[(v, u)] != c:
            problems.append(f"asymmetric conductance ({v},{u})")

    if not problems and network.vertices:
        comps = components(network)
        if len(comps) > 1:
            problems.append(
                "not connected: "
                + " | ".join("{" + ", ".join(comp) + "}" for comp in comps)
            )
    return problems


def degree(network: Network, x: Vertex) -> float:
    """Total conductance ``c(x)`` at ``x``."""
    return float(network.weight_matrix[network._vertex_index(x)].sum())


@dataclass(frozen=True, eq=False)
class VertexFunction:
    """Grounded real function on the vertices of ``network``.

    The stored values are always shifted so the origin carries 0; pass any
    representative of the class modulo constants.
    """

    network: Network
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.shape[0] != len(self.network.vertices):
            raise NetworkError(
                f"function has {vals.shape[0]} values, network has {len(self.network.vertices)} vertices"
            )
        vals = vals - vals[self.network.origin_index]
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, network: Network, values: Mapping[Vertex, float]) -> "VertexFunction":
        missing = set(network.vertices) - set(values)
        extra = set(values) - set(network.vertices)
        if missing or extra:
            raise NetworkError(f"vertex mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        return cls(network, [values[x] for x in network.vertices])

    @classmethod
    def from_reduced(cls, network: Network, reduced: np.ndarray) -> "VertexFunction":
        full = np.zeros(len(network.vertices))
        full[network.free_indices] = reduced
        return cls(network, full)

    @classmethod
    def zero(cls, network: Network) -> "VertexFunction":
        return cls(network, np.zeros(len(network.vertices)))

    @property
    def reduced(self) -> np.ndarray:
        """Values on the non-origin vertices (grounded coordinates)."""
        return self.values[self.network.free_indices]

    def on(self, network: Network) -> "VertexFunction":
        """Same values viewed on another network over the same vertex set."""
        _check_same(self.network, network)
        return VertexFunction(network, self.values)

    def __getitem__(self, x: Vertex) -> float:
        return float(self.values[self.network._vertex_index(x)])

    def as_dict(self) -> dict[Vertex, float]:
        return dict(zip(self.network.vertices, self.values.tolist()))

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, VertexFunction):
            _check_same(self.network, other.network)
            return other.values
        return NotImplemented

    def __add__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return vals
        return VertexFunction(self.network, self.values + vals)

    def __sub__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return vals
        return VertexFunction(self.network, self.values - vals)

    def __neg__(self):
        return VertexFunction(self.network, -self.values)

    def __mul__(self, scalar: float):
        if isinstance(scalar, VertexFunction):
            return NotImplemented
        return VertexFunction(self.network, float(scalar) * self.values)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return VertexFunction(self.network, self.values / float(scalar))

    def allclose(self, other: "VertexFunction", atol: float = ATOL) -> bool:
        return bool(np.allclose(self.values, self._coerce(other), rtol=0.0, atol=atol))

    def max_abs_diff(self, other: "VertexFunction") -> float:
        return float(np.max(np.abs(self.values - self._coerce(other)), initial=0.0))


def _check_same(a: Network, b: Network) -> None:
    if a is not b and not a.same_vertices(b):
        raise NetworkError("functions live on networks with different vertex sets")


def delta(network: Network, x: Vertex) -> VertexFunction:
    """Grounded Dirac mass at ``x``."""
    vals = np.zeros(len(network.vertices))
    vals[network._vertex_index(x)] = 1.0
    return VertexFunction(network, vals)


def laplacian_values(network: Network, values: np.ndarray) -> np.ndarray:
    """Pointwise ``(Lu)(x) = sum_y c_xy (u(x) - u(y))`` without re-grounding.

    Summed edge by edge from the differences, never as ``c(x) u(x) - sum c_xy u(y)``.
    """
    network.require_valid()
    u = np.asarray(values, dtype=float)
    i, j, c = network.edge_arrays
    flux = c.reshape((-1,) + (1,) * (u.ndim - 1)) * (u[i] - u[j])
    out = np.zeros_like(u)
    np.add.at(out, i, flux)
    np.add.at(out, j, -flux)
    return out


def energy_gram(network: Network, columns: np.ndarray) -> np.ndarray:
    """Matrix of energy products between the columns of ``columns``."""
    network.require_valid()
    i, j, c = network.edge_arrays
    d = columns[i] - columns[j]
    return d.T @ (c[:, None] * d)


def apply_laplacian(network: Network, u: VertexFunction) -> VertexFunction:
    """Laplacian of ``u``, re-grounded at the origin."""
    _check_same(network, u.network)
    return VertexFunction(network, laplacian_values(network, u.values))


def energy_form(network: Network, u: VertexFunction, v: VertexFunction) -> float:
    """Dirichlet form ``1/2 sum_{x,y} c_xy (u(x)-u(y)) (v(x)-v(y))``."""
    _check_same(network, u.network)
    _check_same(network, v.network)
    network.require_valid()
    i, j, c = network.edge_arrays
    du = u.values[i] - u.values[j]
    dv = v.values[i] - v.values[j]
    return float(np.sum(c * (du * dv)))


def energy_norm(network: Network, u: VertexFunction) -> float:
    return float(np.sqrt(max(energy_form(network, u, u), 0.0)))


def sup_seminorm(u: VertexFunction) -> float:
    """``max u - min u``; invariant under adding constants."""
    if u.values.size == 0:
        return 0.0
    return float(u.values.max() - u.values.min())


def random_connected_network(
    rng: np.random.Generator,
    n: int,
    *,
    extra_edge_prob: float = 0.3,
    low: float = 0.1,
    high: float = 10.0,
) -> Network:
    """Random spanning tree plus independent extra edges, weights uniform in ``[low, high]``."""
    vertices = [str(k) for k in range(n)]
    edges: dict[tuple[int, int], float] = {}
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(k)])
        edges[(min(a, b), max(a, b))] = float(rng.uniform(low, high))
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) not in edges and rng.random() < extra_edge_prob:
                edges[(a, b)] = float(rng.uniform(low, high))
    return Network(vertices, [(str(a), str(b), c) for (a, b), c in edges.items()], vertices[0])


def network_from_matrix(
    weights: np.ndarray, vertices: Sequence[Vertex] | None = None, origin: Vertex | None = None
) -> Network:
    """Network from a symmetric weight matrix (upper triangle is read)."""
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    names = [str(k) for k in range(n)] if vertices is None else list(vertices)
    i, j = np.triu_indices(n, k=1)
    keep = w[i, j] != 0.0
    edges = [(names[a], names[b], float(w[a, b])) for a, b in zip(i[keep], j[keep])]
    return Network(names, edges, names[0] if origin is None else origin)
