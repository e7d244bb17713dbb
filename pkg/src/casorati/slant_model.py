"""Pointwise data of a slant submanifold in an adapted slant frame."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def _is_proper(theta: float) -> bool:
    return 0.0 < theta < np.pi / 2


@dataclass(frozen=True)
class SecondFundamentalForm:
    """Components h[a][i][j], stored as packed upper triangles.

    ``packed`` has shape (k, n(n+1)/2), rows ordered like ``np.triu_indices(n)``.
    Symmetry is structural: :attr:`matrices` mirrors the packed entries.
    """

    n: int
    packed: np.ndarray = field(repr=False)

    def __post_init__(self):
        packed = np.array(self.packed, dtype=float, ndmin=2)
        if packed.shape[1] != self.n * (self.n + 1) // 2:
            raise ValueError(
                f"packed components need {self.n * (self.n + 1) // 2} columns, got {packed.shape[1]}"
            )
        packed.setflags(write=False)
        object.__setattr__(self, "packed", packed)

    @property
    def k(self) -> int:
        return self.packed.shape[0]

    @cached_property
    def matrices(self) -> np.ndarray:
        """Shape operators as a (k, n, n) array."""
        iu = np.triu_indices(self.n)
        out = np.zeros((self.k, self.n, self.n))
        out[:, iu[0], iu[1]] = self.packed
        out[:, iu[1], iu[0]] = self.packed
        out.setflags(write=False)
        return out

    @classmethod
    def from_matrices(cls, mats, *, use: str = "upper") -> "SecondFundamentalForm":
        """Pack the chosen triangle of each matrix (``use`` is 'upper' or 'lower')."""
        mats = np.asarray(mats, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError(f"expected a (k, n, n) array, got shape {mats.shape}")
        n = mats.shape[1]
        iu = np.triu_indices(n)
        if use == "upper":
            packed = mats[:, iu[0], iu[1]]
        elif use == "lower":
            packed = mats[:, iu[1], iu[0]]
        else:
            raise ValueError(f"use must be 'upper' or 'lower', got {use!r}")
        return cls(n, packed)

    @classmethod
    def zeros(cls, n: int, k: int) -> "SecondFundamentalForm":
        return cls(n, np.zeros((k, n * (n + 1) // 2)))

    def component(self, a: int, i: int, j: int) -> float:
        """h^a_ij with zero-based indices."""
        return float(self.matrices[a, i, j])

    def with_component(self, a: int, i: int, j: int, value: float) -> "SecondFundamentalForm":
        mats = self.matrices.copy()
        mats[a, i, j] = mats[a, j, i] = value
        return SecondFundamentalForm.from_matrices(mats)


@dataclass(frozen=True)
class AdaptedFrameOps:
    """Tangential parts P_1, P_2, P_3 of J_a in an adapted slant frame.

    ``P[a][j, i] = <P_a e_i, e_j>``, so P_a acts on coordinate columns.
    """

    theta: float
    n: int
    P1: np.ndarray = field(repr=False)
    P2: np.ndarray = field(repr=False)
    P3: np.ndarray = field(repr=False)

    @property
    def P(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.P1, self.P2, self.P3)


@dataclass(frozen=True)
class SlantInstance:
    n: int
    m: int
    c: float
    theta: float
    frame: AdaptedFrameOps
    sff: SecondFundamentalForm

    def __post_init__(self):
        validate_dimensions(self.n, self.m)
        if self.sff.n != self.n or self.sff.k != 4 * self.m - self.n:
            raise ValueError(
                f"second fundamental form must have n={self.n} and k={4 * self.m - self.n}, "
                f"got n={self.sff.n}, k={self.sff.k}"
            )
        if self.frame.n != self.n or self.frame.theta != self.theta:
            raise ValueError("frame does not match the instance's n and theta")

    @property
    def proper(self) -> bool:
        return _is_proper(self.theta)

    @property
    def k(self) -> int:
        return 4 * self.m - self.n


def validate_dimensions(n: int, m: int) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 2 <= n <= 4 * m:
        raise ValueError(f"need 2 <= n <= 4m = {4 * m}, got n={n}")


def build_adapted_frame(n: int, theta: float) -> AdaptedFrameOps:
    """Block-diagonal P_a with blocks [[0, -cos], [cos, 0]], identical for a = 1, 2, 3."""
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n % 2 and theta != np.pi / 2:
        raise ValueError(f"n must be even unless theta = pi/2, got n={n}")
    P = np.zeros((n, n))
    if n % 2 == 0:
        cos = np.cos(theta) if theta != np.pi / 2 else 0.0
        idx = np.arange(0, n, 2)
        P[idx + 1, idx] = cos
        P[idx, idx + 1] = -cos
    P.setflags(write=False)
    return AdaptedFrameOps(theta, n, P, P, P)


def pp_sum(frame: AdaptedFrameOps) -> float:
    """sum_b sum_{i,j} <P_b e_i, e_j>^2."""
    return float(sum(np.sum(P * P) for P in frame.P))


def make_instance(n: int, m: int, c: float, theta: float, sff: SecondFundamentalForm) -> SlantInstance:
    return SlantInstance(n, m, float(c), float(theta), build_adapted_frame(n, theta), sff)


def random_instance(
    n: int, m: int, c: float, theta: float, amplitude: float = 1.0, seed: int = 0
) -> SlantInstance:
    """Instance with h components i.i.d. uniform in [-amplitude, amplitude]."""
    validate_dimensions(n, m)
    if amplitude < 0:
        raise ValueError(f"amplitude must be non-negative, got {amplitude}")
    rng = np.random.default_rng(seed)
    k = 4 * m - n
    packed = rng.uniform(-amplitude, amplitude, size=(k, n * (n + 1) // 2))
    return make_instance(n, m, c, theta, SecondFundamentalForm(n, packed))


def shape_operators(sff: SecondFundamentalForm) -> list[np.ndarray]:
    return [A.copy() for A in sff.matrices]
