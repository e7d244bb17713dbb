"""Intrinsic and extrinsic curvature invariants at a point.

Curvature convention: R(X, Y, Z, W) = <R(X, Y) Z, W> and the sectional
curvature of an orthonormal pair is K(X ^ Y) = R(X, Y, Y, X). With this
convention the tangential tensor is

    R(X, Y, Z, W) = Rbar(X, Y, Z, W) + <h(X, W), h(Y, Z)> - <h(X, Z), h(Y, W)>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .slant_model import SecondFundamentalForm, SlantInstance

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Hyperplane:
    """Tangent hyperplane u^perp, stored by its unit normal u."""

    normal: np.ndarray

    def __post_init__(self):
        u = np.array(self.normal, dtype=float)
        if u.ndim != 1:
            raise ValueError("hyperplane normal must be a vector")
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise ValueError(f"hyperplane normal must be a unit vector (norm {np.linalg.norm(u)!r})")
        u.setflags(write=False)
        object.__setattr__(self, "normal", u)

    @classmethod
    def from_vector(cls, v) -> "Hyperplane":
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    @classmethod
    def coordinate(cls, n: int, i: int) -> "Hyperplane":
        """e_i^perp for a zero-based index i."""
        return cls(np.eye(n)[i])


@dataclass(frozen=True)
class InvariantReport:
    tau: float
    rho: float
    mean_sq: float
    casorati: float
    h_norm_sq: float


def _ambient_tangent_tensor(inst: SlantInstance) -> np.ndarray:
    """Rbar restricted to the tangent space in the adapted frame, shape (n,)*4."""
    n = inst.n
    g = np.eye(n)
    R = np.einsum("zy,xw->xyzw", g, g) - np.einsum("xz,yw->xyzw", g, g)
    for P in inst.frame.P:
        # B[i, j] = <e_i, P e_j>
        B = P
        R += (
            np.einsum("zy,wx->xyzw", B, B)
            - np.einsum("zx,wy->xyzw", B, B)
            + 2.0 * np.einsum("xy,wz->xyzw", B, B)
        )
    return inst.c / 4.0 * R


def curvature_tensor(inst: SlantInstance) -> np.ndarray:
    """Intrinsic curvature R(e_x, e_y, e_z, e_w) via the Gauss equation."""
    h = inst.sff.matrices
    hh = np.einsum("axw,ayz->xyzw", h, h) - np.einsum("axz,ayw->xyzw", h, h)
    return _ambient_tangent_tensor(inst) + hh


def sectional_curvature(inst: SlantInstance, i: int, j: int) -> float:
    """K(e_i ^ e_j) for zero-based frame indices."""
    n = inst.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"frame indices must lie in [0, {n}), got ({i}, {j})")
    if i == j:
        raise ValueError("sectional curvature needs two distinct frame vectors")
    h = inst.sff.matrices
    ambient = inst.c / 4.0 * (1.0 + 3.0 * sum(P[i, j] ** 2 for P in inst.frame.P))
    extrinsic = float(np.sum(h[:, i, i] * h[:, j, j] - h[:, i, j] ** 2))
    return ambient + extrinsic


def scalar_curvature(inst: SlantInstance) -> float:
    n = inst.n
    return float(sum(sectional_curvature(inst, i, j) for i in range(n) for j in range(i + 1, n)))


def mean_curvature_sq(sff: SecondFundamentalForm) -> float:
    traces = np.trace(sff.matrices, axis1=1, axis2=2)
    return float(np.sum(traces**2)) / sff.n**2


def h_norm_sq(sff: SecondFundamentalForm) -> float:
    return float(np.sum(sff.matrices**2))


def casorati(sff: SecondFundamentalForm) -> float:
    return h_norm_sq(sff) / sff.n


def scalar_from_identity(inst: SlantInstance) -> float:
    """tau from 2 tau = n^2 |H|^2 - n C + (c/4)[n(n-1) + 9 n cos^2(theta)]."""
    n = inst.n
    cos2 = 0.0 if inst.theta == np.pi / 2 else np.cos(inst.theta) ** 2
    two_tau = (
        n**2 * mean_curvature_sq(inst.sff)
        - n * casorati(inst.sff)
        + inst.c / 4.0 * (n * (n - 1) + 9 * n * cos2)
    )
    return two_tau / 2.0


def hyperplane_basis(normal) -> np.ndarray:
    """Orthonormal basis of u^perp as the columns of an (n, n-1) array.

    Uses the Householder reflection that sends e_n to u; the image of
    e_1, ..., e_{n-1} spans the hyperplane.
    """
    u = np.asarray(normal, dtype=float)
    n = u.size
    v = np.eye(n)[-1] - u
    vv = v @ v
    if vv < 1e-30:
        return np.eye(n)[:, :-1]
    H = np.eye(n) - 2.0 * np.outer(v, v) / vv
    return H[:, :-1]


def casorati_of_hyperplane(sff: SecondFundamentalForm, L: Hyperplane, basis=None) -> float:
    """C(L) = (1/(n-1)) sum_a ||B^T A_a B||_F^2 for an orthonormal basis B of L."""
    n = sff.n
    if n < 3:
        raise ValueError("hyperplane Casorati curvature needs n >= 3")
    if L.normal.shape != (n,):
        raise ValueError(f"hyperplane normal must have dimension {n}")
    B = hyperplane_basis(L.normal) if basis is None else np.asarray(basis, dtype=float)
    compressed = np.einsum("ip,aij,jq->apq", B, sff.matrices, B)
    return float(np.sum(compressed**2)) / (n - 1)


def _check_orthonormal(basis: np.ndarray, tol: float = 1e-10) -> None:
    gram = basis @ basis.T
    if np.max(np.abs(gram - np.eye(basis.shape[0]))) > tol:
        raise ValueError("basis vectors are not orthonormal")


def scalar_curvature_of_subspace(inst: SlantInstance, basis) -> float:
    """tau(L) = sum_{a<b} K(f_a ^ f_b) for an orthonormal basis f of L."""
    F = np.atleast_2d(np.asarray(basis, dtype=float))
    if F.shape[0] < 2:
        raise ValueError("subspace scalar curvature needs dimension >= 2")
    if F.shape[1] != inst.n:
        raise ValueError(f"basis vectors must have dimension {inst.n}")
    _check_orthonormal(F)
    R = curvature_tensor(inst)
    # K(f_a ^ f_b) = R(f_a, f_b, f_b, f_a)
    K = np.einsum("xyzw,ax,by,bz,aw->ab", R, F, F, F, F)
    return float(np.sum(np.triu(K, 1)))


def invariant_report(inst: SlantInstance) -> InvariantReport:
    n = inst.n
    tau = scalar_curvature(inst)
    return InvariantReport(
        tau=tau,
        rho=2.0 * tau / (n * (n - 1)),
        mean_sq=mean_curvature_sq(inst.sff),
        casorati=casorati(inst.sff),
        h_norm_sq=h_norm_sq(inst.sff),
    )
