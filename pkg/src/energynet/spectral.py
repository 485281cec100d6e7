"""Spectral calculus of the Laplacian on the energy space.

On a finite connected network the Laplacian is self-adjoint for the energy
product, with eigenvalues those of the matrix ``L`` minus the zero mode.
An ``l^2``-normalized eigenvector ``phi`` has energy ``lambda``, so
``psi = phi / sqrt(lambda)`` is energy-normalized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .comparison import ConductancePair, adjoint_inclusion
from .graph_core import Network, NetworkError, VertexFunction, apply_laplacian, energy_form, laplacian_values
from .energy_space import PINV_RTOL, _fix_sign


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    network: Network
    eigenvalues: np.ndarray
    # columns are grounded, energy-orthonormal eigenfunctions
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.size

    def function(self, k: int) -> VertexFunction:
        return VertexFunction(self.network, self.eigenvectors[:, k])

    @property
    def functions(self) -> list[VertexFunction]:
        return [self.function(k) for k in range(len(self))]


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms ``(lambda_i, w_i)``; ``w_i >= 0``."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.eigenvalues.tolist(), self.weights.tolist()))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.sum(f(self.eigenvalues) * self.weights))

    def moment(self, k: int) -> float:
        return float(np.sum(self.eigenvalues**k * self.weights))


def eigensystem(network: Network) -> SpectralDecomposition:
    """Nonzero spectrum of the Laplacian with energy-orthonormal eigenfunctions, ascending."""
    lap = network.laplacian
    w, phi = np.linalg.eigh(lap)
    if w.size <= 1:
        return SpectralDecomposition(network, np.zeros(0), np.zeros((w.size, 0)))
    cutoff = PINV_RTOL * w.max()
    null = int(np.count_nonzero(w <= cutoff))
    if null != 1:
        raise NetworkError(f"Laplacian has {null} null directions; network must be connected")
    lam = w[1:]
    psi = phi[:, 1:] / np.sqrt(lam)
    psi = psi - psi[network.origin_index]
    psi = np.column_stack([_fix_sign(col) for col in psi.T])
    return SpectralDecomposition(network, lam, psi)


def spectral_measure(network: Network, u: VertexFunction, decomposition: SpectralDecomposition | None = None) -> DiscreteMeasure:
    """Atoms ``(lambda_i, <u, psi_i>_E^2)``."""
    dec = eigensystem(network) if decomposition is None else decomposition
    vals = u.on(network).values
    coeffs = dec.eigenvectors.T @ (laplacian_values(network, vals))
    return DiscreteMeasure(dec.eigenvalues.copy(), coeffs**2)


def moment(network: Network, u: VertexFunction, k: int) -> float:
    """``<u, Lap^k u>_E`` by ``k`` pointwise Laplacian applications."""
    if k < 0:
        raise ValueError(f"moment order must be nonnegative, got {k}")
    u = u.on(network)
    w = u
    for _ in range(k):
        w = apply_laplacian(network, w)
    return energy_form(network, u, w)


def operator_norm(network: Network) -> float:
    """Largest Laplacian eigenvalue, the norm of ``Lap`` on ``H_E``."""
    lap = network.laplacian
    if lap.shape[0] <= 1:
        return 0.0
    return float(np.linalg.eigvalsh(lap)[-1])


class MomentGaps(NamedTuple):
    m1_gap: float
    m2_gap: float


def monotonicity_check(pair: ConductancePair, u: VertexFunction) -> MomentGaps:
    """``m_k^(c)(I* u) - m_k^(b)(u)`` for ``k = 1, 2``.

    The first gap vanishes and the second is nonnegative.
    """
    ub = u.on(pair.b)
    image = adjoint_inclusion(pair, ub)
    return MomentGaps(
        moment(pair.c, image, 1) - moment(pair.b, ub, 1),
        moment(pair.c, image, 2) - moment(pair.b, ub, 2),
    )


@dataclass(frozen=True)
class HeatQuadrature:
    """Log-spaced trapezoid rule for ``int_0^inf f(t) dt``.

    Nodes run from ``lower / lambda_max`` to ``upper / lambda_min``; the rule
    is applied in ``s = log t`` where the integrand ``t e^{-lambda t}`` is
    smooth and decays doubly exponentially on the right.
    """

    nodes: int = 200
    lower: float = 1e-6
    upper: float = 50.0
    warn_rtol: float = 1e-3

    def rule(self, lam_min: float, lam_max: float) -> tuple[np.ndarray, np.ndarray]:
        s = np.linspace(np.log(self.lower / lam_max), np.log(self.upper / lam_min), self.nodes)
        h = s[1] - s[0]
        t = np.exp(s)
        weights = h * t
        weights[[0, -1]] *= 0.5
        return t, weights


def heat_semigroup(dec: SpectralDecomposition, u: VertexFunction, t: float) -> VertexFunction:
    """``exp(-t Lap) u`` through the eigensystem."""
    net = dec.network
    coeffs = dec.eigenvectors.T @ (laplacian_values(net, u.on(net).values))
    return VertexFunction(net, dec.eigenvectors @ (np.exp(-t * dec.eigenvalues) * coeffs))


def inverse_via_heat(
    network: Network, u: VertexFunction, quadrature: HeatQuadrature = HeatQuadrature()
) -> VertexFunction:
    """``Lap^{-1} u`` as the quadrature of ``int_0^inf exp(-t Lap) u dt``.

    Compared against the direct grounded solve; a ``RuntimeWarning`` reports
    the measured relative error when it exceeds ``quadrature.warn_rtol``.
    """
    dec = eigensystem(network)
    u = u.on(network)
    if len(dec) == 0:
        return VertexFunction.zero(network)
    t, weights = quadrature.rule(dec.eigenvalues[0], dec.eigenvalues[-1])
    coeffs = dec.eigenvectors.T @ (laplacian_values(network, u.values))
    # scalar transfer function sum_j w_j exp(-t_j lambda) approximates 1/lambda
    transfer = np.exp(-np.outer(dec.eigenvalues, t)) @ weights
    result = VertexFunction(network, dec.eigenvectors @ (transfer * coeffs))
    return _report(result, direct_inverse(network, u), quadrature.warn_rtol)


def direct_inverse(network: Network, u: VertexFunction) -> VertexFunction:
    """Grounded ``w`` with ``Lap w = u`` modulo constants."""
    vals = u.on(network).values
    return VertexFunction(network, network.grounded_solve(vals - vals.mean()))


def _report(result: VertexFunction, direct: VertexFunction, rtol: float) -> VertexFunction:
    scale = np.linalg.norm(direct.values)
    err = np.linalg.norm(result.values - direct.values) / scale if scale > 0 else np.linalg.norm(result.values)
    if err > rtol:
        warnings.warn(f"heat-kernel inverse relative error {err:.3e} exceeds {rtol:.1e}", RuntimeWarning, stacklevel=3)
    return result
