"""Ambient quaternionic space form model on Euclidean 4m-space.

The quaternionic structure is realized by left multiplication with the
quaternion units i, j, k acting on m consecutive blocks of 4 coordinates
(a + b i + c j + d k). The curvature tensor is the constant-quaternionic-
sectional-curvature tensor, evaluated as a 4-linear form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# left multiplication by i, j, k on (a, b, c, d)
_UNIT_I = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
_UNIT_J = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
_UNIT_K = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])

DEFAULT_SLANT_TOL = 1e-6


class SlantSearchError(RuntimeError):
    """Raised when no slant subspace with the requested angle was found."""


@dataclass(frozen=True)
class QuaternionicStructure:
    m: int
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray

    @property
    def dim(self) -> int:
        return 4 * self.m

    @property
    def J(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.J1, self.J2, self.J3)


@dataclass(frozen=True)
class AmbientPoint:
    c: float
    structure: QuaternionicStructure


def standard_structure(m: int) -> QuaternionicStructure:
    """Canonical structure on R^{4m}; all entries are in {-1, 0, 1}."""
    if int(m) != m or m < 1:
        raise ValueError(f"quaternionic dimension must be a positive integer, got {m!r}")
    m = int(m)
    eye = np.eye(m, dtype=int)
    mats = [np.kron(eye, unit) for unit in (_UNIT_I, _UNIT_J, _UNIT_K)]
    return QuaternionicStructure(m, *mats)


def ambient_curvature(pt: AmbientPoint, X, Y, Z, W) -> float:
    """Evaluate R(X, Y, Z, W) = <R(X, Y) Z, W> for the space form of constant c."""
    dim = pt.structure.dim
    X, Y, Z, W = (np.asarray(v, dtype=float) for v in (X, Y, Z, W))
    for v in (X, Y, Z, W):
        if v.shape != (dim,):
            raise ValueError(f"expected vectors of dimension {dim}, got shape {v.shape}")

    total = (Z @ Y) * (X @ W) - (X @ Z) * (Y @ W)
    for J in pt.structure.J:
        JX, JY, JZ = J @ X, J @ Y, J @ Z
        total += (Z @ JY) * (JX @ W) - (Z @ JX) * (JY @ W) + 2.0 * (X @ JY) * (JZ @ W)
    return pt.c / 4.0 * float(total)


def _orthonormalize(basis) -> np.ndarray:
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    if B.shape[0] == 0:
        raise ValueError("empty basis")
    # columns = basis vectors
    Q, R = np.linalg.qr(B.T)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * max(1.0, diag.max()):
        raise ValueError("degenerate basis: vectors are linearly dependent")
    return Q


def _slant_angles(structure: QuaternionicStructure, Q: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Angles between J_a X and span(Q) for unit columns X; shape (3, samples)."""
    angles = []
    for J in structure.J:
        JX = J @ X
        proj = Q.T @ JX
        ratio = np.linalg.norm(proj, axis=0) / np.linalg.norm(JX, axis=0)
        angles.append(np.arccos(np.clip(ratio, 0.0, 1.0)))
    return np.array(angles)


def measure_slant_angle(
    structure: QuaternionicStructure, basis, samples: int = 256, seed: int = 0
) -> tuple[float, float]:
    """Estimate the slant angle of span(basis).

    Draws ``samples`` random unit vectors X in the span and measures the angle
    between J_a X and the span for a = 1, 2, 3. Returns the mean angle and the
    maximum absolute deviation from it.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    Q = _orthonormalize(basis)
    if Q.shape[0] != structure.dim:
        raise ValueError(f"basis vectors must have dimension {structure.dim}")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((Q.shape[1], samples))
    coeffs /= np.linalg.norm(coeffs, axis=0)
    angles = _slant_angles(structure, Q, Q @ coeffs)
    mean = float(angles.mean())
    return mean, float(np.abs(angles - mean).max())


def _slant_objective(structure, E, target):
    """sum_a ||T_a^T T_a - target I||_F^2 with T_a = E^T J_a E, and its gradient in E."""
    n = E.shape[1]
    value = 0.0
    grad = np.zeros_like(E)
    for J in structure.J:
        JE = J @ E
        T = E.T @ JE
        S = T.T @ T - target * np.eye(n)
        value += float(np.sum(S * S))
        G = T @ S
        grad += 4.0 * (JE @ G.T + J.T @ E @ G)
    return value, grad


def _stiefel_project(E, G):
    sym = E.T @ G
    return G - E @ (0.5 * (sym + sym.T))


def _retract(E):
    Q, R = np.linalg.qr(E)
    return Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))


def _coordinate_slant_plane(structure: QuaternionicStructure, theta: float, n: int):
    dim = structure.dim
    if theta == 0.0:
        if n % 4:
            raise SlantSearchError("quaternionic subspaces have dimension divisible by 4")
        return list(np.eye(dim)[:n])
    # totally real: pick the first coordinate of each quaternionic block
    if n > structure.m:
        return None
    return [np.eye(dim)[4 * b] for b in range(n)]


def find_slant_plane(
    structure: QuaternionicStructure,
    theta: float,
    n: int,
    seed: int = 0,
    *,
    restarts: int = 16,
    max_iter: int = 10_000,
    tol: float = DEFAULT_SLANT_TOL,
) -> list[np.ndarray]:
    """Search for an n-dimensional theta-slant subspace of R^{4m}.

    Runs multi-restart Riemannian gradient descent on the Stiefel manifold,
    driving every compressed operator E^T J_a E to satisfy
    T^T T = cos^2(theta) Id. Raises :class:`SlantSearchError` if no restart
    reaches a measured deviation below ``tol``.
    """
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    if n < 1 or n > structure.dim:
        raise ValueError(f"n must lie in [1, {structure.dim}], got {n}")
    proper = 0.0 < theta < np.pi / 2
    if proper and n % 2:
        raise ValueError("proper slant subspaces have even dimension")

    if not proper:
        basis = _coordinate_slant_plane(structure, theta, n)
        if basis is not None:
            return basis

    target = np.cos(theta) ** 2
    # J_a X (a = 1, 2, 3) are orthonormal and orthogonal to X, so their
    # projections onto X^perp inside the subspace carry at most n - 1 in total
    if 3.0 * target > n - 1 + 1e-12:
        raise SlantSearchError(
            f"no {n}-dimensional subspace can have slant angle {theta:.6g}: "
            f"3 cos^2(theta) = {3 * target:.6g} exceeds n - 1 = {n - 1}"
        )

    rng = np.random.default_rng(seed)
    dim = structure.dim
    best = (np.inf, None)
    for _ in range(restarts):
        E = _retract(rng.standard_normal((dim, n)))
        value, grad = _slant_objective(structure, E, target)
        step = 0.1
        for _ in range(max_iter):
            rgrad = _stiefel_project(E, grad)
            gnorm2 = float(np.sum(rgrad * rgrad))
            if value < 1e-26 or gnorm2 < 1e-30:
                break
            while True:
                E_new = _retract(E - step * rgrad)
                value_new, grad_new = _slant_objective(structure, E_new, target)
                if value_new <= value - 1e-4 * step * gnorm2 or step < 1e-16:
                    break
                step *= 0.5
            E, value, grad = E_new, value_new, grad_new
            step *= 2.0
        mean, spread = measure_slant_angle(structure, E.T, samples=64, seed=seed)
        # a restart may settle on a slant subspace with the wrong angle
        dev = max(spread, abs(mean - theta))
        if dev < best[0]:
            best = (dev, E)
        if dev < tol:
            break

    dev, E = best
    if E is None or dev >= tol:
        raise SlantSearchError(
            f"slant search failed after {restarts} restarts (best deviation {dev:.3g} rad)"
        )
    return list(E.T)
