"""Checks of the sharp delta-Casorati inequalities and of the proof machinery.

For a theta-slant submanifold of a quaternionic space form of constant c the
normalized scalar curvature satisfies

    rho <= delta_C(r; n-1) / (n(n-1)) + (c/4)(1 + 9 cos^2(theta) / (n-1))

for 0 < r < n(n-1), and the same with hat delta_C for r > n(n-1). The proof
rests on a quadratic polynomial P in the components of h which is
nonnegative with a one-parameter family of zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .casorati_delta import (
    ExtremizeConfig,
    HyperplaneExtremum,
    delta_casorati,
    hyperplane_extrema,
)
from .invariants import (
    Hyperplane,
    casorati,
    casorati_of_hyperplane,
    scalar_curvature,
    scalar_from_identity,
)
from .slant_model import SecondFundamentalForm, SlantInstance, make_instance, random_instance

EQUALITY_TOL = 1e-9
TWO_ROUTE_TOL = 1e-10
BOUND_KINDS = ("generalized_inf", "generalized_sup", "normalized_inf", "normalized_sup")


class InvariantCheckError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


@dataclass(frozen=True)
class QuasiUmbilicalPattern:
    """Shape operators a_i * diag(a, ..., a, b) in a rotated frame.

    ``normal`` is the unit normal (in normal-frame coordinates) carrying the
    only nonzero shape operator; ``tangent`` is the distinguished eigendirection.
    """

    a: float
    b: float
    normal: np.ndarray
    tangent: np.ndarray

    @property
    def normal_index(self) -> int:
        return int(np.argmax(np.abs(self.normal)))

    @property
    def tangent_index(self) -> int:
        return int(np.argmax(np.abs(self.tangent)))


@dataclass(frozen=True)
class VerificationReport:
    r: float
    lhs: float
    rhs: float
    slack: float
    bound_kind: str
    equality_detected: bool
    quasi_umbilical: bool
    pattern: QuasiUmbilicalPattern | None
    proper: bool = True


@dataclass(frozen=True)
class ProofCheckReport:
    n: int
    r: float
    p_value: float
    hessian_eigs: list[float]
    expected_eigs: list[float]
    critical_residual: float
    p_at_critical: float

    @property
    def max_eig_error(self) -> float:
        return float(np.max(np.abs(np.subtract(self.hessian_eigs, self.expected_eigs))))


@dataclass(frozen=True)
class CriticalSystem:
    sff: SecondFundamentalForm
    residual: float
    determinant: float


def _ambient_term(n: int, c: float, theta: float) -> float:
    cos2 = 0.0 if theta == np.pi / 2 else np.cos(theta) ** 2
    return c / 4.0 * (1.0 + 9.0 * cos2 / (n - 1))


def _check_generalized_r(n: int, r: float) -> None:
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if r == n * (n - 1):
        raise ValueError(f"r = n(n-1) = {n * (n - 1)} is excluded by definition")


def _check_p_range(n: int, r: float) -> None:
    if n < 3:
        raise ValueError("needs n >= 3")
    if not 0 < r < n * (n - 1):
        raise ValueError(f"r must lie in (0, n(n-1)) = (0, {n * (n - 1)}), got {r}")


def checked_scalar_curvature(inst: SlantInstance) -> float:
    """tau via the Gauss equation, cross-checked against the closed identity."""
    tau = scalar_curvature(inst)
    tau_identity = scalar_from_identity(inst)
    if abs(tau - tau_identity) > TWO_ROUTE_TOL * (1.0 + abs(tau)):
        raise InvariantCheckError(
            f"scalar curvature routes disagree: Gauss {tau!r} vs identity {tau_identity!r}"
        )
    return tau


def classify_quasi_umbilical(
    sff: SecondFundamentalForm, tol: float = EQUALITY_TOL
) -> tuple[bool, QuasiUmbilicalPattern | None]:
    """Detect the equality-case shape: one nonzero shape operator diag(a, ..., a, b).

    After rotating the normal frame, a single nonzero shape operator exists
    iff the Gram matrix tr(A_a A_b) has rank <= 1; its eigenvalues must then
    show multiplicity n - 1.
    """
    n, mats = sff.n, np.asarray(sff.matrices)
    if sff.k == 0 or not np.any(mats):
        return True, QuasiUmbilicalPattern(0.0, 0.0, np.eye(max(sff.k, 1))[0], np.eye(n)[-1])

    gram = np.einsum("aij,bij->ab", mats, mats)
    w, V = np.linalg.eigh(gram)
    top = np.sqrt(max(w[-1], 0.0))
    if sff.k > 1 and np.sqrt(max(w[-2], 0.0)) > tol * (1.0 + top):
        return False, None
    xi = V[:, -1]
    A = np.einsum("a,aij->ij", xi, mats)
    if np.trace(A) < 0:
        xi, A = -xi, -A

    ev, vecs = np.linalg.eigh(A)
    spread_tol = tol * (1.0 + np.max(np.abs(ev)))
    if np.ptp(ev[:-1]) <= spread_tol:
        a, b, tangent = float(np.mean(ev[:-1])), float(ev[-1]), vecs[:, -1]
    elif np.ptp(ev[1:]) <= spread_tol:
        a, b, tangent = float(np.mean(ev[1:])), float(ev[0]), vecs[:, 0]
    else:
        return False, None
    return True, QuasiUmbilicalPattern(a, b, xi, tangent)


def is_invariantly_quasi_umbilical(sff: SecondFundamentalForm, tol: float = EQUALITY_TOL) -> bool:
    """Every A_a has an eigenvalue of multiplicity >= n-1 with a common distinguished direction.

    The shape A = lambda I + mu v v^T is preserved under linear combinations
    with a fixed v, so checking the given normal frame suffices.
    """
    direction = None
    for A in sff.matrices:
        ev, vecs = np.linalg.eigh(A)
        spread_tol = tol * (1.0 + np.max(np.abs(ev)))
        if np.ptp(ev) <= spread_tol:
            continue
        if np.ptp(ev[:-1]) <= spread_tol:
            v = vecs[:, -1]
        elif np.ptp(ev[1:]) <= spread_tol:
            v = vecs[:, 0]
        else:
            return False
        if direction is None:
            direction = v
        elif abs(abs(direction @ v) - 1.0) > np.sqrt(tol):
            return False
    return True


def check_inequality(
    inst: SlantInstance,
    r: float | None = None,
    seed: int = 0,
    *,
    bound_kind: str | None = None,
    convention: str = "paper",
    tol: float = EQUALITY_TOL,
    extrema: dict[str, HyperplaneExtremum] | None = None,
    config: ExtremizeConfig | None = None,
) -> VerificationReport:
    """Evaluate one inequality: rho <= bound, with slack = bound - rho.

    Without ``bound_kind`` the generalized inequality is chosen by the side of
    n(n-1) that ``r`` falls on. The normalized kinds ignore ``r`` and use the
    equivalent parameter n(n-1)/2 or 2n(n-1).
    """
    n = inst.n
    if n < 3:
        raise ValueError("the inequalities need n >= 3")
    N = n * (n - 1)
    if bound_kind is None:
        if r is None:
            raise ValueError("r is required for the generalized inequalities")
        _check_generalized_r(n, r)
        bound_kind = "generalized_inf" if r < N else "generalized_sup"
    elif bound_kind not in BOUND_KINDS:
        raise ValueError(f"bound_kind must be one of {BOUND_KINDS}, got {bound_kind!r}")
    elif bound_kind == "normalized_inf":
        r = N / 2
    elif bound_kind == "normalized_sup":
        r = 2 * N
    elif r is None:
        raise ValueError("r is required for the generalized inequalities")
    else:
        _check_generalized_r(n, r)
        if (bound_kind == "generalized_inf") != (r < N):
            raise ValueError(f"{bound_kind} is not defined for r = {r} (n(n-1) = {N})")

    tau = checked_scalar_curvature(inst)
    lhs = 2.0 * tau / N
    extrema = extrema or hyperplane_extrema(inst.sff, seed, config)
    deltas = delta_casorati(inst, r, convention, seed, extrema=extrema)
    extra = _ambient_term(n, inst.c, inst.theta)
    if bound_kind == "generalized_inf":
        rhs = deltas.delta_gen / N + extra
    elif bound_kind == "generalized_sup":
        rhs = deltas.delta_gen_hat / N + extra
    elif bound_kind == "normalized_inf":
        rhs = deltas.delta_small + extra
    else:
        rhs = deltas.delta_small_hat + extra

    slack = rhs - lhs
    equality = abs(slack) <= tol * (1.0 + abs(rhs))
    quasi, pattern = classify_quasi_umbilical(inst.sff, tol)
    return VerificationReport(
        r=float(r),
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        bound_kind=bound_kind,
        equality_detected=bool(equality),
        quasi_umbilical=quasi,
        pattern=pattern,
        proper=inst.proper,
    )


def build_equality_case(n: int, m: int, r: float, a: float) -> SecondFundamentalForm:
    """A_{n+1} = diag(a, ..., a, n(n-1) a / r); every other shape operator vanishes."""
    if not n < 4 * m:
        raise ValueError(f"need a normal direction: n < 4m = {4 * m}, got n={n}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    _check_generalized_r(n, r)
    mats = np.zeros((4 * m - n, n, n))
    diag = np.full(n, float(a))
    diag[-1] = n * (n - 1) * a / r
    mats[0] = np.diag(diag)
    return SecondFundamentalForm.from_matrices(mats)


def equality_instance(
    n: int, m: int, r: float, a: float, c: float = 0.0, theta: float = np.pi / 4
) -> SlantInstance:
    return make_instance(n, m, c, theta, build_equality_case(n, m, r, a))


def p_coefficient(n: int, r: float) -> float:
    """Coefficient of C(L) in P and in delta_C(r; n-1)."""
    return (n - 1) * (n + r) * (n * n - n - r) / (r * n)


def evaluate_p(inst: SlantInstance, r: float, L: Hyperplane) -> float:
    """P = r C + coeff C(L) - 2 tau + (c/4)[n(n-1) + 9 n cos^2(theta)]."""
    n = inst.n
    _check_p_range(n, r)
    cos2 = 0.0 if inst.theta == np.pi / 2 else np.cos(inst.theta) ** 2
    return float(
        r * casorati(inst.sff)
        + p_coefficient(n, r) * casorati_of_hyperplane(inst.sff, L)
        - 2.0 * scalar_curvature(inst)
        + inst.c / 4.0 * (n * (n - 1) + 9 * n * cos2)
    )


def _first_block(n: int, r: float) -> np.ndarray:
    """Coefficient matrix of the diagonal equations of the critical-point system."""
    H1 = np.full((n, n), -2.0)
    H1[np.diag_indices(n - 1)] = 2.0 * (n + r) * (n - 1) / r - 2.0
    H1[-1, -1] = 2.0 * r / n
    return H1


def critical_residual(sff: SecondFundamentalForm, r: float) -> float:
    """Max absolute residual of dP/dh = 0 over all components and normal directions."""
    n = sff.n
    worst = 0.0
    for A in sff.matrices:
        d = np.diag(A)
        trace = d.sum()
        res = [2.0 * (n + r) * (n - 1) / r * d[:-1] - 2.0 * trace]
        res.append([2.0 * r / n * d[-1] - 2.0 * (trace - d[-1])])
        iu = np.triu_indices(n - 1, 1)
        res.append(4.0 * (n + r) * (n - 1) / r * A[:-1, :-1][iu])
        res.append(4.0 * (n + r) / n * A[:-1, -1])
        worst = max(worst, max(np.max(np.abs(np.asarray(x, dtype=float)), initial=0.0) for x in res))
    return float(worst)


def solve_critical_system(n: int, r: float, k: int = 1, t=1.0) -> CriticalSystem:
    """Critical points h_11 = ... = h_{n-1,n-1} = t, h_nn = n(n-1) t / r, off-diagonal zero.

    ``t`` may be a scalar or one value per normal direction.
    """
    _check_p_range(n, r)
    ts = np.broadcast_to(np.asarray(t, dtype=float), (k,))
    mats = np.zeros((k, n, n))
    for a, ta in enumerate(ts):
        diag = np.full(n, ta)
        diag[-1] = n * (n - 1) * ta / r
        mats[a] = np.diag(diag)
    sff = SecondFundamentalForm.from_matrices(mats)
    H1 = _first_block(n, r)
    det = float(np.prod(np.linalg.eigvalsh(H1)))
    return CriticalSystem(sff, critical_residual(sff, r), det)


def expected_hessian_eigs(n: int, r: float) -> list[float]:
    lam22 = 2.0 * (n**3 - n**2 + r**2) / (r * n)
    lam33 = 2.0 * (n + r) * (n - 1) / r
    lam_ij = 4.0 * (n + r) * (n - 1) / r
    lam_in = 4.0 * (n + r) / n
    eigs = [0.0, lam22] + [lam33] * (n - 2) + [lam_ij] * ((n - 1) * (n - 2) // 2) + [lam_in] * (n - 1)
    return sorted(eigs)


def _component_index(n: int) -> list[tuple[int, int]]:
    diag = [(i, i) for i in range(n)]
    inner = list(combinations(range(n - 1), 2))
    last = [(i, n - 1) for i in range(n - 1)]
    return diag + inner + last


def hessian_spectrum(n: int, r: float, seed: int = 0) -> ProofCheckReport:
    """Hessian of P in the components of one normal direction, against the closed forms.

    The Hessian is recovered exactly (P is quadratic) by polarization of the
    geometric evaluation of P with L = e_n^perp.
    """
    _check_p_range(n, r)
    m = n // 4 + 1
    k = 4 * m - n
    c, theta = 4.0, np.pi / 4
    index = _component_index(n)
    L = Hyperplane.coordinate(n, n - 1)

    def P(x):
        mats = np.zeros((k, n, n))
        for (i, j), v in zip(index, x):
            mats[0, i, j] = mats[0, j, i] = v
        return evaluate_p(make_instance(n, m, c, theta, SecondFundamentalForm.from_matrices(mats)), r, L)

    dim = len(index)
    eye = np.eye(dim)
    p0 = P(np.zeros(dim))
    single = np.array([P(eye[a]) for a in range(dim)])
    H = np.empty((dim, dim))
    for a in range(dim):
        for b in range(a, dim):
            # P(x) = x^T H x / 2 + const: P(e_a + e_b) - P(e_a) - P(e_b) + P(0) = H_ab
            if a == b:
                H[a, a] = 2.0 * (single[a] - p0)
            else:
                H[a, b] = H[b, a] = P(eye[a] + eye[b]) - single[a] - single[b] + p0

    crit = solve_critical_system(n, r, k=k, t=1.0)
    p_crit = evaluate_p(make_instance(n, m, c, theta, crit.sff), r, L)
    rng = np.random.default_rng(seed)
    p_random = P(rng.uniform(-1.0, 1.0, dim))
    return ProofCheckReport(
        n=n,
        r=float(r),
        p_value=float(p_random),
        hessian_eigs=sorted(float(x) for x in np.linalg.eigvalsh(H)),
        expected_eigs=expected_hessian_eigs(n, r),
        critical_residual=crit.residual,
        p_at_critical=float(p_crit),
    )


def perturbation_slacks(
    n: int, m: int, r: float, a: float, entry: tuple[int, int], epsilons, *, c: float = 0.0,
    theta: float = np.pi / 4, seed: int = 0,
) -> list[float]:
    """Slack after adding eps to one off-diagonal entry of an equality case, per eps."""
    base = build_equality_case(n, m, r, a)
    i, j = entry
    if i == j:
        raise ValueError("entry must be off-diagonal")
    out = []
    for eps in epsilons:
        sff = base.with_component(0, i, j, base.component(0, i, j) + eps)
        out.append(check_inequality(make_instance(n, m, c, theta, sff), r, seed).slack)
    return out


@dataclass(frozen=True)
class SweepRecord:
    index: int
    seed: int
    c: float
    theta: float
    r: float
    proper: bool
    status: str
    report: VerificationReport | None = None
    message: str = ""


def inequality_sweep(
    n: int,
    m: int,
    c_list,
    theta_grid,
    r_grid,
    count: int,
    seed: int = 0,
    *,
    amplitude: float = 1.0,
    convention: str = "paper",
    tol: float = EQUALITY_TOL,
    workers: int = 1,
) -> list[SweepRecord]:
    """Check the generalized inequality on ``count`` random instances for every r.

    Instance i uses c = c_list[i mod |c|] and theta = theta_grid[(i div |c|) mod |theta|];
    per-instance seeds are spawned from ``seed``. Records come back in input order.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    c_list, theta_grid, r_grid = list(c_list), list(theta_grid), list(r_grid)
    if not (c_list and theta_grid and r_grid):
        raise ValueError("c, theta and r grids must be non-empty")
    seeds = [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]

    def run(i: int) -> list[SweepRecord]:
        c = float(c_list[i % len(c_list)])
        theta = float(theta_grid[(i // len(c_list)) % len(theta_grid)])
        try:
            inst = random_instance(n, m, c, theta, amplitude, seeds[i])
            extrema = hyperplane_extrema(inst.sff, seeds[i])
        except (ValueError, RuntimeError) as exc:
            proper = 0.0 < theta < np.pi / 2
            return [SweepRecord(i, seeds[i], c, theta, float(r), proper, "error", None, str(exc)) for r in r_grid]
        rows = []
        for r in r_grid:
            try:
                rep = check_inequality(
                    inst, r, seeds[i], convention=convention, tol=tol, extrema=extrema
                )
            except (ValueError, RuntimeError) as exc:
                rows.append(SweepRecord(i, seeds[i], c, theta, float(r), inst.proper, "error", None, str(exc)))
                continue
            status = "ok" if rep.slack >= -tol * (1.0 + abs(rep.rhs)) else "violation"
            rows.append(SweepRecord(i, seeds[i], c, theta, float(r), inst.proper, status, rep))
        return rows

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(run, range(count)))
    else:
        chunks = [run(i) for i in range(count)]
    return [rec for chunk in chunks for rec in chunk]
