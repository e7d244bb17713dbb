import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casorati.invariants import Hyperplane
from casorati.slant_model import SecondFundamentalForm, make_instance, random_instance
from casorati.verifier import (
    build_equality_case,
    check_inequality,
    classify_quasi_umbilical,
    critical_residual,
    equality_instance,
    evaluate_p,
    expected_hessian_eigs,
    hessian_spectrum,
    inequality_sweep,
    is_invariantly_quasi_umbilical,
    p_coefficient,
    perturbation_slacks,
    solve_critical_system,
)


def test_equality_case_shape():
    sff = build_equality_case(4, 2, 6.0, 1.0)
    assert sff.k == 4
    assert np.array_equal(np.diag(sff.matrices[0]), [1.0, 1.0, 1.0, 2.0])
    assert not np.any(sff.matrices[1:])


def test_equality_case_rejects():
    with pytest.raises(ValueError):
        build_equality_case(4, 1, 6.0, 1.0)
    with pytest.raises(ValueError):
        build_equality_case(4, 2, 12.0, 1.0)


def test_check_equality_instance(eq_instance):
    rep = check_inequality(eq_instance, 6.0)
    assert rep.bound_kind == "generalized_inf"
    assert rep.lhs == pytest.approx(1.5, abs=1e-14)
    assert rep.rhs == pytest.approx(1.5, abs=1e-12)
    assert abs(rep.slack) <= 1e-9 and rep.equality_detected
    assert rep.quasi_umbilical
    assert rep.pattern.a == pytest.approx(1.0) and rep.pattern.b == pytest.approx(2.0)
    assert rep.pattern.tangent_index == 3 and rep.pattern.normal_index == 0


def test_check_sup_side():
    inst = equality_instance(4, 2, 24.0, 2.0, c=-4.0, theta=np.pi / 6)
    rep = check_inequality(inst, 24.0)
    assert rep.bound_kind == "generalized_sup"
    assert abs(rep.slack) <= 1e-9
    assert rep.pattern.b / rep.pattern.a == pytest.approx(0.5, abs=1e-10)


def test_normalized_bounds():
    inst = equality_instance(4, 2, 6.0, 1.0)
    rep = check_inequality(inst, bound_kind="normalized_inf")
    assert rep.r == 6.0 and abs(rep.slack) <= 1e-9
    inst = equality_instance(4, 2, 24.0, 1.0)
    rep = check_inequality(inst, bound_kind="normalized_sup")
    assert rep.r == 24.0 and abs(rep.slack) <= 1e-9


def test_check_argument_errors(eq_instance):
    with pytest.raises(ValueError):
        check_inequality(eq_instance)
    with pytest.raises(ValueError):
        check_inequality(eq_instance, 12.0)
    with pytest.raises(ValueError):
        check_inequality(eq_instance, 18.0, bound_kind="generalized_inf")
    with pytest.raises(ValueError):
        check_inequality(eq_instance, 6.0, bound_kind="bogus")


@given(seed=st.integers(0, 2**32 - 1), r=st.sampled_from([2.0, 6.0, 11.0, 18.0, 30.0]),
       c=st.sampled_from([-4.0, 0.0, 4.0]))
@settings(max_examples=25, deadline=None)
def test_inequality_holds_on_random_instances(seed, r, c):
    inst = random_instance(4, 2, c, np.pi / 3, seed=seed)
    assert check_inequality(inst, r, seed).slack >= -1e-9


def test_classifier_rotated_normal_frame():
    # the quasi-umbilical operator spread over two normals by a rotation
    base = np.diag([3.0, 3.0, 3.0, 1.0])
    mats = np.zeros((4, 4, 4))
    mats[0], mats[1] = 0.6 * base, 0.8 * base
    ok, pat = classify_quasi_umbilical(SecondFundamentalForm.from_matrices(mats))
    assert ok
    assert pat.a == pytest.approx(3.0) and pat.b == pytest.approx(1.0)
    assert np.allclose(np.abs(pat.normal), [0.6, 0.8, 0.0, 0.0])


def test_classifier_rejects():
    mats = np.zeros((4, 4, 4))
    mats[0] = np.diag([1.0, 2.0, 3.0, 4.0])
    assert not classify_quasi_umbilical(SecondFundamentalForm.from_matrices(mats))[0]
    mats[0] = np.diag([1.0, 1.0, 1.0, 2.0])
    mats[1] = np.diag([1.0, 1.0, 2.0, 1.0])
    assert not classify_quasi_umbilical(SecondFundamentalForm.from_matrices(mats))[0]


def test_classifier_zero_form():
    ok, pat = classify_quasi_umbilical(SecondFundamentalForm.zeros(4, 4))
    assert ok and pat.a == 0.0 and pat.b == 0.0


def test_invariantly_quasi_umbilical():
    mats = np.zeros((4, 4, 4))
    mats[0] = np.diag([1.0, 1.0, 1.0, 2.0])
    mats[1] = np.diag([5.0, 5.0, 5.0, -1.0])
    mats[2] = 3.0 * np.eye(4)
    assert is_invariantly_quasi_umbilical(SecondFundamentalForm.from_matrices(mats))
    mats[1] = np.diag([5.0, 5.0, -1.0, 5.0])
    assert not is_invariantly_quasi_umbilical(SecondFundamentalForm.from_matrices(mats))


def test_p_values(eq_instance):
    assert p_coefficient(4, 6.0) == pytest.approx(7.5)
    assert evaluate_p(eq_instance, 6.0, Hyperplane.coordinate(4, 3)) == pytest.approx(0.0, abs=1e-12)
    assert evaluate_p(eq_instance, 6.0, Hyperplane.coordinate(4, 0)) == pytest.approx(7.5, abs=1e-12)
    with pytest.raises(ValueError):
        evaluate_p(eq_instance, 12.0, Hyperplane.coordinate(4, 3))


def test_critical_system():
    crit = solve_critical_system(6, 10.0, t=2.0)
    assert crit.sff.component(0, 5, 5) == pytest.approx(6.0)
    assert crit.sff.component(0, 0, 0) == 2.0
    assert crit.residual == 0.0
    # the diagonal block is singular: P vanishes along the critical ray
    assert abs(crit.determinant) < 1e-8
    assert critical_residual(build_equality_case(6, 2, 10.0, 1.0).with_component(0, 0, 1, 0.1), 10.0) > 0


def test_expected_eigs_anchor():
    assert expected_hessian_eigs(4, 6.0) == [0, 7, 10, 10, 10, 10, 10, 20, 20, 20]


@pytest.mark.parametrize("n, r", [(4, 2.0), (4, 6.0), (4, 11.0), (6, 10.0), (6, 25.0)])
def test_hessian_spectrum(n, r):
    rep = hessian_spectrum(n, r)
    assert rep.max_eig_error <= 1e-9
    assert abs(rep.p_at_critical) <= 1e-10
    assert rep.critical_residual <= 1e-12


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_p_is_nonnegative_at_best_hyperplane(seed):
    # with L a minimizer of C(L), P >= 0 is the inequality itself
    inst = random_instance(4, 2, 4.0, np.pi / 4, seed=seed)
    rep = check_inequality(inst, 6.0, seed)
    assert rep.slack >= -1e-9


def test_perturbation_quadratic():
    # tau drops by eps^2, C rises by eps^2/2 and inf C(L) by 2 eps^2/3: slack = 5 eps^2 / 6
    eps = [10.0**-k for k in range(1, 4)]
    slacks = perturbation_slacks(4, 2, 6.0, 1.0, (0, 1), eps)
    for e, s in zip(eps, slacks):
        assert s > 0
        assert s / e**2 == pytest.approx(5 / 6, rel=1e-3)
    with pytest.raises(ValueError):
        perturbation_slacks(4, 2, 6.0, 1.0, (1, 1), eps)


def test_sweep_small():
    recs = inequality_sweep(4, 2, [-4.0, 4.0], [np.pi / 6, np.pi / 3], [6.0, 18.0], count=6, seed=3)
    assert len(recs) == 12
    assert [r.index for r in recs] == [0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5]
    assert [r.c for r in recs[::2]] == [-4.0, 4.0, -4.0, 4.0, -4.0, 4.0]
    assert [r.theta for r in recs[::2]] == [np.pi / 6] * 2 + [np.pi / 3] * 2 + [np.pi / 6] * 2
    assert all(r.status == "ok" for r in recs)
    threaded = inequality_sweep(4, 2, [-4.0, 4.0], [np.pi / 6, np.pi / 3], [6.0, 18.0], count=6, seed=3, workers=3)
    assert [r.report.slack for r in threaded] == [r.report.slack for r in recs]


def test_sweep_n3_records_errors():
    # odd n only admits theta = pi/2, so other angles turn into error records
    recs = inequality_sweep(3, 1, [0.0], [np.pi / 4], [2.0], count=1)
    assert recs[0].status == "error"
