import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casorati.ambient import AmbientPoint, ambient_curvature, standard_structure
from casorati.invariants import (
    Hyperplane,
    casorati,
    casorati_of_hyperplane,
    curvature_tensor,
    h_norm_sq,
    hyperplane_basis,
    invariant_report,
    mean_curvature_sq,
    scalar_curvature,
    scalar_curvature_of_subspace,
    scalar_from_identity,
    sectional_curvature,
)
from casorati.slant_model import AdaptedFrameOps, SecondFundamentalForm, SlantInstance, make_instance, random_instance


def single_normal(n, m, diag, c=0.0, theta=np.pi / 4):
    mats = np.zeros((4 * m - n, n, n))
    mats[0] = np.diag(diag)
    return make_instance(n, m, c, theta, SecondFundamentalForm.from_matrices(mats))


def test_hyperplane_requires_unit_normal():
    with pytest.raises(ValueError):
        Hyperplane(np.array([1.0, 1.0, 0.0]))
    L = Hyperplane.from_vector([3.0, 4.0, 0.0])
    assert np.allclose(L.normal, [0.6, 0.8, 0.0])


def test_sectional_totally_real_flat_sff(zero_instance):
    inst = zero_instance(c=4.0, theta=np.pi / 2)
    assert sectional_curvature(inst, 0, 1) == pytest.approx(1.0, abs=1e-15)


def test_sectional_quaternionic_pair(zero_instance):
    inst = zero_instance(c=4.0, theta=0.0)
    # all three P_a carry the same +-cos block, so K(e_1, e_2) = c/4 (1 + 9 cos^2)
    assert sectional_curvature(inst, 0, 1) == pytest.approx(10.0, abs=1e-15)
    assert sectional_curvature(inst, 0, 2) == pytest.approx(1.0, abs=1e-15)


def test_sectional_equality_case(eq_instance):
    assert sectional_curvature(eq_instance, 0, 3) == 2.0
    assert sectional_curvature(eq_instance, 0, 1) == 1.0


def test_sectional_index_errors(eq_instance):
    with pytest.raises(IndexError):
        sectional_curvature(eq_instance, 0, 4)
    with pytest.raises(ValueError):
        sectional_curvature(eq_instance, 1, 1)


def test_scalar_curvature_values(eq_instance, zero_instance):
    # three pairs of 1*1 plus three pairs of 1*2
    assert scalar_curvature(eq_instance) == 9.0
    assert scalar_from_identity(eq_instance) == pytest.approx(9.0, abs=1e-14)
    assert scalar_curvature(zero_instance(c=4.0, theta=np.pi / 2)) == pytest.approx(6.0)
    # theta = 0: two block pairs give 10 each, the other four pairs 1 each
    assert scalar_curvature(zero_instance(c=4.0, theta=0.0)) == pytest.approx(24.0)
    assert scalar_from_identity(zero_instance(c=4.0, theta=0.0)) == pytest.approx(24.0)


def test_extrinsic_values(eq_instance):
    assert mean_curvature_sq(eq_instance.sff) == 1.5625
    assert h_norm_sq(eq_instance.sff) == 7.0
    assert casorati(eq_instance.sff) == 1.75
    assert casorati(single_normal(4, 2, [1, 1, 1, 1]).sff) == 1.0


def test_hyperplane_casorati_values(eq_instance):
    assert casorati_of_hyperplane(eq_instance.sff, Hyperplane.coordinate(4, 3)) == pytest.approx(1.0, abs=1e-15)
    assert casorati_of_hyperplane(eq_instance.sff, Hyperplane.coordinate(4, 0)) == pytest.approx(2.0, abs=1e-15)


def test_hyperplane_casorati_needs_n3(zero_instance):
    inst = zero_instance(n=2, m=1, theta=np.pi / 3)
    with pytest.raises(ValueError):
        casorati_of_hyperplane(inst.sff, Hyperplane.coordinate(2, 0))


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 7))
@settings(max_examples=40, deadline=None)
def test_hyperplane_basis_orthonormal(seed, n):
    u = np.random.default_rng(seed).standard_normal(n)
    u /= np.linalg.norm(u)
    B = hyperplane_basis(u)
    assert np.allclose(B.T @ B, np.eye(n - 1), atol=1e-13)
    assert np.allclose(u @ B, 0.0, atol=1e-13)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_hyperplane_casorati_basis_independent(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(5, 2, 0.0, np.pi / 2, seed=seed)
    L = Hyperplane.from_vector(rng.standard_normal(5))
    # a rotated orthonormal basis of the same hyperplane
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    B = hyperplane_basis(L.normal) @ Q
    a = casorati_of_hyperplane(inst.sff, L)
    b = casorati_of_hyperplane(inst.sff, L, basis=B)
    assert abs(a - b) < 1e-12 * (1 + a)


def test_subspace_scalar_curvature(eq_instance, zero_instance):
    assert scalar_curvature_of_subspace(eq_instance, np.eye(4)) == pytest.approx(9.0, abs=1e-13)
    inst = zero_instance(c=4.0, theta=np.pi / 2)
    assert scalar_curvature_of_subspace(inst, np.eye(4)[:2]) == pytest.approx(1.0)
    assert scalar_curvature_of_subspace(zero_instance(c=0.0), np.eye(4)[:3]) == 0.0
    with pytest.raises(ValueError):
        scalar_curvature_of_subspace(eq_instance, [[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])


@given(seed=st.integers(0, 2**32 - 1), c=st.sampled_from([-4.0, 0.0, 4.0]),
       theta=st.sampled_from([0.0, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2]))
@settings(max_examples=60, deadline=None)
def test_two_route_scalar_curvature(seed, c, theta):
    inst = random_instance(4, 2, c, theta, seed=seed)
    tau = scalar_curvature(inst)
    assert abs(tau - scalar_from_identity(inst)) <= 1e-10 * (1 + abs(tau))


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_curvature_tensor_symmetries(seed):
    R = curvature_tensor(random_instance(4, 2, 4.0, np.pi / 3, seed=seed))
    assert np.allclose(R, -R.transpose(1, 0, 2, 3), atol=1e-12)
    assert np.allclose(R, -R.transpose(0, 1, 3, 2), atol=1e-12)
    assert np.allclose(R, R.transpose(2, 3, 0, 1), atol=1e-12)
    # first Bianchi identity
    bianchi = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
    assert np.allclose(bianchi, 0.0, atol=1e-12)


@given(seed=st.integers(0, 2**32 - 1), c=st.floats(-5, 5))
@settings(max_examples=30, deadline=None)
def test_tangent_tensor_matches_ambient_restriction(seed, c):
    # restrict the ambient tensor to an arbitrary orthonormal 3-frame in R^8
    rng = np.random.default_rng(seed)
    s = standard_structure(2)
    E, _ = np.linalg.qr(rng.standard_normal((8, 3)))
    P = [E.T @ J @ E for J in s.J]
    frame = AdaptedFrameOps(np.pi / 2, 3, *P)
    inst = SlantInstance(3, 2, c, np.pi / 2, frame, SecondFundamentalForm.zeros(3, 5))
    R = curvature_tensor(inst)
    pt = AmbientPoint(c, s)
    for idx in [(0, 1, 1, 0), (0, 1, 2, 0), (0, 2, 1, 2), (1, 2, 0, 1)]:
        expected = ambient_curvature(pt, *(E[:, i] for i in idx))
        assert abs(R[idx] - expected) < 1e-12


def test_invariant_report(eq_instance):
    rep = invariant_report(eq_instance)
    assert rep.tau == 9.0
    assert rep.rho == 1.5
    assert rep.casorati == 1.75
    assert rep.mean_sq == 1.5625
    assert rep.h_norm_sq == 7.0
