"""Normalized and generalized normalized delta-Casorati curvatures.

The infimum and supremum of C(L) over tangent hyperplanes L = u^perp are
found by maximizing or minimizing

    f(u) = 1/(n-1) sum_a ||(I - u u^T) A_a (I - u u^T)||_F^2

over the unit sphere. :func:`extremize_hyperplane` uses multi-restart
projected gradient descent switched to Riemannian Newton
steps near minima; :func:`oracle_extremum` is
a gradient-free grid search kept independent of it for validation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .invariants import Hyperplane, casorati, casorati_of_hyperplane, hyperplane_basis
from .slant_model import SecondFundamentalForm, SlantInstance

log = logging.getLogger(__name__)

KINDS = ("inf", "sup")
CONVENTIONS = ("paper", "literature")
MAX_ORACLE_POINTS = 10_000_000


@dataclass(frozen=True)
class ExtremizeConfig:
    restarts: int = 32
    grad_tol: float = 1e-10
    max_iter: int = 5000
    oracle: bool = False
    oracle_resolution: int | None = None


@dataclass(frozen=True)
class HyperplaneExtremum:
    value: float
    hyperplane: Hyperplane
    kind: str
    certificate: float | None = None
    converged: bool = True
    grad_norm: float = 0.0


@dataclass(frozen=True)
class DeltaReport:
    r: float
    delta_small: float
    delta_small_hat: float
    delta_gen: float | None
    delta_gen_hat: float | None
    coefficient_convention: str = "paper"
    inf_casorati: float = field(default=0.0)
    sup_casorati: float = field(default=0.0)


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


# -- objective on the sphere -------------------------------------------------


def sphere_objective(mats: np.ndarray, U: np.ndarray) -> np.ndarray:
    """f(u) for each row of U (rows assumed unit)."""
    n = mats.shape[-1]
    AU = np.einsum("aij,rj->ari", mats, U)
    quad = np.einsum("ari,ri->ar", AU, U)
    total = np.sum(mats**2) - 2.0 * np.sum(AU**2, axis=(0, 2)) + np.sum(quad**2, axis=0)
    return total / (n - 1)


def sphere_gradient(mats: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Riemannian gradient of f at each unit row of U (projected onto u^perp)."""
    n = mats.shape[-1]
    AU = np.einsum("aij,rj->ari", mats, U)
    A2U = np.einsum("aij,arj->ari", mats, AU)
    quad = np.einsum("ari,ri->ar", AU, U)
    egrad = (-4.0 * A2U.sum(axis=0) + 4.0 * np.einsum("ar,ari->ri", quad, AU)) / (n - 1)
    return egrad - np.sum(egrad * U, axis=1, keepdims=True) * U


def _euclidean_parts(mats: np.ndarray, U: np.ndarray):
    """Euclidean gradient and Hessian of the quartic extension of f, per row of U."""
    n = mats.shape[-1]
    AU = np.einsum("aij,rj->ari", mats, U)
    quad = np.einsum("ari,ri->ar", AU, U)
    A2 = np.einsum("aij,ajk->ik", mats, mats)
    grad = (-4.0 * U @ A2 + 4.0 * np.einsum("ar,ari->ri", quad, AU)) / (n - 1)
    hess = (
        -4.0 * A2[None]
        + 8.0 * np.einsum("ari,arj->rij", AU, AU)
        + 4.0 * np.einsum("ar,aij->rij", quad, mats)
    ) / (n - 1)
    return grad, hess


def _search_directions(mats, U, G, sign, scale):
    """Riemannian Newton directions where the Hessian is positive definite, else -G.

    The tangent Hessian is inverted on u^perp by adding u u^T, which leaves
    the tangent block untouched and makes the normal direction invertible.
    """
    n = U.shape[1]
    egrad, ehess = _euclidean_parts(mats, U)
    proj = np.eye(n)[None] - np.einsum("ri,rj->rij", U, U)
    radial = np.sum(U * egrad, axis=1)
    H = sign * (proj @ (ehess - radial[:, None, None] * np.eye(n)[None]) @ proj)
    H += np.einsum("ri,rj->rij", U, U)
    w, V = np.linalg.eigh(H)
    newton_ok = w[:, 0] > 1e-8 * scale
    coef = np.einsum("rji,rj->ri", V, -G) / np.where(newton_ok[:, None], w, 1.0)
    D = np.einsum("rij,rj->ri", V, coef)
    D -= np.sum(D * U, axis=1, keepdims=True) * U
    return np.where(newton_ok[:, None], D, -G), newton_ok


def _canonical(u: np.ndarray) -> np.ndarray:
    # entries at rounding level are snapped so axis optima come out exact
    u = np.where(np.abs(u) > 1e-12, u, 0.0)
    nz = np.flatnonzero(u)
    return -u if nz.size and u[nz[0]] < 0 else u


def extremize_hyperplane(
    sff: SecondFundamentalForm,
    kind: str = "inf",
    seed: int = 0,
    config: ExtremizeConfig | None = None,
) -> HyperplaneExtremum:
    """Infimum or supremum of C(L) over tangent hyperplanes L.

    Restarts are the n coordinate axes plus ``config.restarts`` uniform points
    on the sphere, all iterated together. Each iteration moves along the
    projected gradient, or along the Riemannian Newton direction where the
    Hessian is positive definite, with Armijo backtracking and renormalization.
    Ties are broken towards the lexicographically smallest canonical normal.
    """
    _check_kind(kind)
    config = config or ExtremizeConfig()
    n = sff.n
    if n < 3:
        raise ValueError("hyperplane Casorati curvature needs n >= 3")
    mats = np.asarray(sff.matrices)
    sign = 1.0 if kind == "inf" else -1.0
    scale = max(1.0, float(np.sum(mats**2)))

    rng = np.random.default_rng(seed)
    starts = rng.standard_normal((config.restarts, n))
    starts /= np.linalg.norm(starts, axis=1, keepdims=True)
    U = np.vstack([np.eye(n), starts])

    values = sign * sphere_objective(mats, U)
    grad_steps = np.full(U.shape[0], 0.1 / scale)
    active = np.ones(U.shape[0], dtype=bool)
    for _ in range(config.max_iter):
        G = sign * sphere_gradient(mats, U)
        active &= np.linalg.norm(G, axis=1) >= config.grad_tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        D, newton = _search_directions(mats, U[idx], G[idx], sign, scale)
        # on a flat optimum set a gradient step's gain sinks below the value resolution
        floor = np.finfo(float).eps * np.maximum(1.0, np.abs(values[idx])) * scale
        active[idx[~newton & (np.sum(G[idx] ** 2, axis=1) < floor)]] = False
        t = np.where(newton, 1.0, grad_steps[idx])
        slope = np.sum(G[idx] * D, axis=1)
        pending = np.ones(idx.size, dtype=bool)
        while pending.any():
            p = np.flatnonzero(pending)
            cand = U[idx[p]] + t[p, None] * D[p]
            cand /= np.linalg.norm(cand, axis=1, keepdims=True)
            cand_values = sign * sphere_objective(mats, cand)
            current = values[idx[p]]
            ok = cand_values <= current + 1e-4 * t[p] * slope[p]
            # below the rounding floor a Newton step cannot be judged by value
            noise = 8.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(current))
            ok |= newton[p] & (t[p] == 1.0) & (cand_values <= current + noise)
            accept = p[ok]
            U[idx[accept]] = cand[ok]
            values[idx[accept]] = cand_values[ok]
            pending[accept] = False
            active[idx[accept[t[accept] < 1e-14]]] = False
            t[p[~ok]] *= 0.5
            # no representable decrease left: the restart has stalled
            stalled = p[~ok][t[p[~ok]] < 1e-14]
            active[idx[stalled]] = False
            pending[stalled] = False
        grad_steps[idx[~newton]] = 2.0 * t[~newton]

    U = np.array([_canonical(u) for u in U])
    best = values.min()
    ties = np.flatnonzero(values <= best + 1e-14 * max(1.0, abs(best)))
    winner = min(ties, key=lambda i: tuple(U[i]))
    u = U[winner] / np.linalg.norm(U[winner])

    grad_norm = float(np.linalg.norm(sphere_gradient(mats, u[None])[0]))
    converged = grad_norm < max(config.grad_tol, 1e-7 * scale)
    if not converged:
        log.warning("hyperplane %s search stopped with gradient norm %.3g", kind, grad_norm)
    L = Hyperplane(u)
    value = casorati_of_hyperplane(sff, L)

    certificate = None
    if config.oracle:
        oracle = oracle_extremum(sff, kind, config.oracle_resolution)
        certificate = value - oracle
    return HyperplaneExtremum(value, L, kind, certificate, converged, grad_norm)


# -- brute-force oracle ------------------------------------------------------


def _default_resolution(n: int) -> int:
    return {3: 301, 4: 41, 5: 17}.get(n, 9)


def _grid_values(mats: np.ndarray, U: np.ndarray, chunk: int = 20_000) -> np.ndarray:
    """f(u) by explicit compression (I - uu^T) A (I - uu^T), chunked."""
    n = mats.shape[-1]
    out = np.empty(U.shape[0])
    for start in range(0, U.shape[0], chunk):
        V = U[start : start + chunk]
        Pr = np.eye(n)[None] - np.einsum("ri,rj->rij", V, V)
        total = np.zeros(V.shape[0])
        for A in mats:
            C = Pr @ A @ Pr
            total += np.sum(C * C, axis=(1, 2))
        out[start : start + chunk] = total / (n - 1)
    return out


def _sphere_grid(n: int, resolution: int) -> np.ndarray:
    """Normalized points of the cube faces x_i = +1 (one per antipodal pair) plus the axes."""
    ticks = np.linspace(-1.0, 1.0, resolution)
    mesh = np.stack(np.meshgrid(*([ticks] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    faces = [np.insert(mesh, i, 1.0, axis=1) for i in range(n)]
    pts = np.vstack([np.eye(n), *faces])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _refine(mats, center, sign, radius, rounds=400):
    n = center.size
    ticks = np.linspace(-1.0, 1.0, 5)
    offsets = np.stack(np.meshgrid(*([ticks] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
    value = sign * _grid_values(mats, center[None])[0]
    for _ in range(rounds):
        if radius < 1e-10:
            break
        Q = hyperplane_basis(center)
        pts = center + radius * offsets @ Q.T
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        vals = sign * _grid_values(mats, pts)
        i = int(np.argmin(vals))
        if vals[i] < value:
            center, value = pts[i], vals[i]
        else:
            radius *= 0.5
    return value


def oracle_extremum(
    sff: SecondFundamentalForm,
    kind: str = "inf",
    grid_resolution: int | None = None,
    *,
    candidates: int = 8,
) -> float:
    """Gradient-free extremum of C(u^perp): dense grid, then local grid zooming.

    The coarse grid covers the sphere up to antipodes; the best few
    well-separated grid points are refined by shrinking local grids.
    """
    _check_kind(kind)
    n = sff.n
    if n not in (3, 4, 5):
        raise ValueError(f"oracle supports n in {{3, 4, 5}}, got n={n}")
    resolution = grid_resolution or _default_resolution(n)
    if n * resolution ** (n - 1) + n > MAX_ORACLE_POINTS:
        raise ValueError(f"grid resolution {resolution} exceeds {MAX_ORACLE_POINTS} points")
    mats = np.asarray(sff.matrices)
    sign = 1.0 if kind == "inf" else -1.0

    pts = _sphere_grid(n, resolution)
    vals = sign * _grid_values(mats, pts)
    order = np.argsort(vals, kind="stable")
    spacing = 2.0 / (resolution - 1)
    chosen: list[np.ndarray] = []
    for i in order:
        p = pts[i]
        if all(abs(p @ q) < np.cos(2.0 * spacing) for q in chosen):
            chosen.append(p)
        if len(chosen) == candidates:
            break
    best = min(_refine(mats, p, sign, spacing) for p in chosen)
    return float(sign * best)


# -- delta curvatures --------------------------------------------------------


def _check_r(n: int, r: float) -> None:
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if r == n * (n - 1):
        raise ValueError(f"r = n(n-1) = {n * (n - 1)} is excluded by definition")


def hyperplane_extrema(
    sff: SecondFundamentalForm, seed: int = 0, config: ExtremizeConfig | None = None
) -> dict[str, HyperplaneExtremum]:
    return {kind: extremize_hyperplane(sff, kind, seed, config) for kind in KINDS}


def delta_small(C: float, inf_CL: float, n: int, convention: str = "paper") -> float:
    if convention == "paper":
        coeff = (n + 1) / (2 * n)
    elif convention == "literature":
        coeff = (n + 1) / (2 * n * (n - 1))
    else:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return 0.5 * C + coeff * inf_CL


def delta_small_hat(C: float, sup_CL: float, n: int) -> float:
    return 2.0 * C - (2 * n - 1) / (2 * n) * sup_CL


def delta_gen(C: float, inf_CL: float, n: int, r: float) -> float:
    """delta_C(r; n-1), defined for 0 < r < n(n-1)."""
    return r * C + (n - 1) * (n + r) * (n * n - n - r) / (r * n) * inf_CL


def delta_gen_hat(C: float, sup_CL: float, n: int, r: float) -> float:
    """hat delta_C(r; n-1), defined for r > n(n-1)."""
    return r * C - (n - 1) * (n + r) * (r - n * n + n) / (r * n) * sup_CL


def delta_casorati(
    inst: SlantInstance,
    r: float,
    convention: str = "paper",
    seed: int = 0,
    *,
    extrema: dict[str, HyperplaneExtremum] | None = None,
    config: ExtremizeConfig | None = None,
) -> DeltaReport:
    n = inst.n
    if n < 3:
        raise ValueError("delta-Casorati curvatures need n >= 3")
    _check_r(n, r)
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    extrema = extrema or hyperplane_extrema(inst.sff, seed, config)
    C = casorati(inst.sff)
    inf_CL = extrema["inf"].value
    sup_CL = extrema["sup"].value
    below = r < n * (n - 1)
    return DeltaReport(
        r=float(r),
        delta_small=delta_small(C, inf_CL, n, convention),
        delta_small_hat=delta_small_hat(C, sup_CL, n),
        delta_gen=delta_gen(C, inf_CL, n, r) if below else None,
        delta_gen_hat=None if below else delta_gen_hat(C, sup_CL, n, r),
        coefficient_convention=convention,
        inf_casorati=inf_CL,
        sup_casorati=sup_CL,
    )


def check_scaling_relations(
    inst: SlantInstance,
    seed: int = 0,
    *,
    extrema: dict[str, HyperplaneExtremum] | None = None,
) -> tuple[float, float]:
    """Absolute gaps of delta_C(n(n-1)/2) = n(n-1) delta_c and hat delta_C(2n(n-1)) = n(n-1) hat delta_c."""
    n = inst.n
    N = n * (n - 1)
    extrema = extrema or hyperplane_extrema(inst.sff, seed)
    low = delta_casorati(inst, N / 2, seed=seed, extrema=extrema)
    high = delta_casorati(inst, 2 * N, seed=seed, extrema=extrema)
    gap50 = abs(low.delta_gen - N * low.delta_small)
    gap51 = abs(high.delta_gen_hat - N * high.delta_small_hat)
    return gap50, gap51
