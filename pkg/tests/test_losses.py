"""Loss family unit tests: frozen examples, invariants, batch consistency."""

import numpy as np
import pytest

from fwsvm import (
    LossFamily,
    LossSpec,
    beta_argmax,
    default_rho,
    loss_eval,
    margin_vector,
    subgradient,
)
from fwsvm.losses import beta_matrix, loss_and_beta_matrix, loss_vector, margin_matrix

from conftest import make_all_specs


def test_margin_vector_examples():
    np.testing.assert_array_equal(margin_vector([0, 3, 2], 0).c, [0, 4, 3])
    np.testing.assert_array_equal(margin_vector([0, 0, 0], 1).c, [1, 0, 1])
    np.testing.assert_array_equal(margin_vector([5, 5], 0).c, [0, 1])


def test_margin_vector_true_entry_exactly_zero(rng):
    for _ in range(50):
        s = rng.standard_normal(7) * 10
        y = int(rng.integers(0, 7))
        assert margin_vector(s, y).c[y] == 0.0


def test_margin_vector_errors():
    with pytest.raises(ValueError):
        margin_vector([0.0, 1.0], 2)
    with pytest.raises(ValueError):
        margin_vector([0.0, np.inf], 0)
    with pytest.raises(ValueError):
        margin_vector(np.zeros((2, 2)), 0)


def test_loss_eval_examples():
    mh = LossSpec(LossFamily.MAX_HINGE, m=3)
    assert loss_eval(mh, [0, 3, 2], 0) == 4.0
    utk = LossSpec(LossFamily.TOP_K, m=3, k=3)
    uu = LossSpec(LossFamily.USUNIER, m=3, k=3)
    assert loss_eval(utk, [0, 3, -2], 0) == pytest.approx(1.0, abs=1e-15)
    assert loss_eval(uu, [0, 3, -2], 0) == pytest.approx(4.0 / 3.0, abs=1e-15)
    wu = LossSpec(LossFamily.WEIGHTED_USUNIER, m=3, rho=[2 / 3, 1 / 3, 0])
    assert loss_eval(wu, [0, 3, 2], 0) == pytest.approx(11.0 / 3.0, abs=1e-15)


def test_constant_scores_give_unit_max_hinge(rng):
    mh = LossSpec(LossFamily.MAX_HINGE, m=5)
    for t in (-3.0, 0.0, 7.5):
        assert loss_eval(mh, np.full(5, t), 2) == 1.0


def test_dimension_mismatch_rejected():
    mh = LossSpec(LossFamily.MAX_HINGE, m=3)
    with pytest.raises(ValueError):
        loss_eval(mh, [0.0, 1.0], 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        LossSpec(LossFamily.TOP_K, m=3)  # missing k
    with pytest.raises(ValueError):
        LossSpec(LossFamily.TOP_K, m=3, k=4)  # k > m
    with pytest.raises(ValueError):
        LossSpec(LossFamily.WEIGHTED_TOP_K, m=3)  # missing rho
    with pytest.raises(ValueError):
        LossSpec(LossFamily.WEIGHTED_TOP_K, m=3, rho=[0.1, 0.5, 0.0])  # increasing
    with pytest.raises(ValueError):
        LossSpec(LossFamily.WEIGHTED_TOP_K, m=3, rho=[0.5, 0.1, 0.1])  # last != 0
    with pytest.raises(ValueError):
        LossSpec(LossFamily.MAX_HINGE, m=3, k=2)


def test_default_rho():
    rho = default_rho(10)
    np.testing.assert_allclose(rho[:6], np.array([5, 4, 3, 2, 1, 0]) / 15.0)
    assert np.all(rho[5:] == 0.0)
    assert rho.sum() == pytest.approx(1.0, abs=1e-12)


def test_levels():
    spec = LossSpec(LossFamily.WEIGHTED_TOP_K, m=4, rho=[0.5, 0.25, 0.25, 0.0])
    assert spec.levels == ((1, 0.5), (3, 0.25))
    uniform = LossSpec(
        LossFamily.WEIGHTED_TOP_K, m=4, rho=[1 / 3, 1 / 3, 1 / 3, 0.0])
    assert uniform.levels == ((3, 1 / 3),)
    assert LossSpec(LossFamily.MAX_HINGE, m=4).levels == ()


def test_beta_argmax_examples():
    mh = LossSpec(LossFamily.MAX_HINGE, m=3)
    bv = beta_argmax(mh, margin_vector([0, 3, 2], 0))
    np.testing.assert_array_equal(bv.beta, [0, 1, 0])
    assert bv.mass == 1.0

    utk = LossSpec(LossFamily.TOP_K, m=3, k=2)
    bv = beta_argmax(utk, margin_vector([0, 3, 2], 0))
    np.testing.assert_array_equal(bv.beta, [0, 0.5, 0.5])
    assert bv.beta @ margin_vector([0, 3, 2], 0).c == pytest.approx(3.5)

    for spec in make_all_specs(3, k=2).values():
        bv = beta_argmax(spec, margin_vector([2, 0.5, 0.5], 0))  # c = [0,-.5,-.5]
        np.testing.assert_array_equal(bv.beta, np.zeros(3))


def test_max_hinge_tie_goes_to_smaller_index():
    mh = LossSpec(LossFamily.MAX_HINGE, m=3)
    bv = beta_argmax(mh, margin_vector([0.0, 2.0, 2.0], 0))
    np.testing.assert_array_equal(bv.beta, [0, 1, 0])


def test_subgradient_examples():
    mh = LossSpec(LossFamily.MAX_HINGE, m=3)
    np.testing.assert_array_equal(subgradient(mh, [0, 3, 2], 0), [-1, 1, 0])
    utk = LossSpec(LossFamily.TOP_K, m=3, k=2)
    np.testing.assert_array_equal(subgradient(utk, [0, 3, 2], 0), [-1, 0.5, 0.5])
    np.testing.assert_array_equal(subgradient(mh, [2, 0, 0], 0), [0, 0, 0])


def test_translation_invariance(rng):
    for spec in make_all_specs(6).values():
        for _ in range(40):
            s = rng.standard_normal(6) * 3
            y = int(rng.integers(0, 6))
            t = float(rng.standard_normal()) * 10
            assert loss_eval(spec, s + t, y) == pytest.approx(
                loss_eval(spec, s, y), abs=1e-10)


def test_nonnegative_and_zero_under_strict_margins(rng):
    for spec in make_all_specs(6).values():
        for _ in range(40):
            s = rng.standard_normal(6) * 3
            y = int(rng.integers(0, 6))
            assert loss_eval(spec, s, y) >= 0.0
            s_sep = s.copy()
            s_sep[y] = s.max() + 1.0 + float(rng.uniform(0, 2))
            assert loss_eval(spec, s_sep, y) == 0.0


def test_maxdot_matches_loss(rng):
    for spec in make_all_specs(6).values():
        for _ in range(200):
            s = rng.standard_normal(6) * 4
            y = int(rng.integers(0, 6))
            mv = margin_vector(s, y)
            bv = beta_argmax(spec, mv)
            assert bv.beta @ mv.c == pytest.approx(loss_eval(spec, s, y), abs=1e-12)
            assert np.all(bv.beta >= 0.0)
            assert bv.mass == pytest.approx(bv.beta.sum(), abs=1e-12)


def test_beta_feasibility_unweighted(rng):
    """Membership in the defining inequalities of the unweighted sets."""
    specs = make_all_specs(6)
    for _ in range(100):
        s = rng.standard_normal(6) * 4
        y = int(rng.integers(0, 6))
        mv = margin_vector(s, y)
        b = beta_argmax(specs["mh"], mv).beta
        assert b.sum() <= 1.0 + 1e-12
        b = beta_argmax(specs["utk"], mv).beta
        assert b.sum() <= 1.0 + 1e-12
        assert np.all(b <= b.sum() / 3 + 1e-12)
        b = beta_argmax(specs["uu"], mv).beta
        assert b.sum() <= 1.0 + 1e-12
        assert np.all(b <= 1.0 / 3 + 1e-12)


def test_subgradient_inequality(rng):
    for spec in make_all_specs(5).values():
        for _ in range(300):
            s = rng.standard_normal(5) * 3
            s2 = rng.standard_normal(5) * 3
            y = int(rng.integers(0, 5))
            g = subgradient(spec, s, y)
            lhs = loss_eval(spec, s2, y)
            rhs = loss_eval(spec, s, y) + g @ (s2 - s)
            assert lhs >= rhs - 1e-9


def test_convexity(rng):
    for spec in make_all_specs(5).values():
        for _ in range(200):
            s = rng.standard_normal(5) * 3
            s2 = rng.standard_normal(5) * 3
            y = int(rng.integers(0, 5))
            theta = float(rng.uniform())
            mix = loss_eval(spec, theta * s + (1 - theta) * s2, y)
            bound = theta * loss_eval(spec, s, y) + (1 - theta) * loss_eval(spec, s2, y)
            assert mix <= bound + 1e-9


def test_reduction_identities(rng):
    m = 6
    e1 = np.zeros(m)
    e1[0] = 1.0
    mh = LossSpec(LossFamily.MAX_HINGE, m=m)
    wtk_e1 = LossSpec(LossFamily.WEIGHTED_TOP_K, m=m, rho=e1)
    wu_e1 = LossSpec(LossFamily.WEIGHTED_USUNIER, m=m, rho=e1)
    k = 3
    uniform = np.where(np.arange(m) < k, 1.0 / k, 0.0)
    utk = LossSpec(LossFamily.TOP_K, m=m, k=k)
    uu = LossSpec(LossFamily.USUNIER, m=m, k=k)
    wtk_u = LossSpec(LossFamily.WEIGHTED_TOP_K, m=m, rho=uniform)
    wu_u = LossSpec(LossFamily.WEIGHTED_USUNIER, m=m, rho=uniform)
    for _ in range(200):
        s = rng.standard_normal(m) * 4
        y = int(rng.integers(0, m))
        assert loss_eval(wtk_e1, s, y) == pytest.approx(
            loss_eval(mh, s, y), abs=1e-12)
        assert loss_eval(wu_e1, s, y) == pytest.approx(
            loss_eval(mh, s, y), abs=1e-12)
        assert loss_eval(wtk_u, s, y) == pytest.approx(
            loss_eval(utk, s, y), abs=1e-12)
        assert loss_eval(wu_u, s, y) == pytest.approx(
            loss_eval(uu, s, y), abs=1e-12)


def test_batch_matches_scalar(rng):
    n, m = 40, 6
    S = rng.standard_normal((n, m)) * 3
    y = rng.integers(0, m, size=n)
    C = margin_matrix(S, y)
    for spec in make_all_specs(m).values():
        losses, B, mass = loss_and_beta_matrix(spec, C)
        np.testing.assert_array_equal(losses, loss_vector(spec, C))
        B2, mass2 = beta_matrix(spec, C)
        np.testing.assert_array_equal(B, B2)
        np.testing.assert_array_equal(mass, mass2)
        for i in range(n):
            mv = margin_vector(S[i], int(y[i]))
            np.testing.assert_array_equal(C[i], mv.c)
            assert losses[i] == pytest.approx(
                loss_eval(spec, S[i], int(y[i])), abs=1e-12)
            bv = beta_argmax(spec, mv)
            np.testing.assert_array_equal(B[i], bv.beta)
