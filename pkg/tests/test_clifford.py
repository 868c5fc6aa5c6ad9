import numpy as np
import pytest

from spin2d.clifford import (Signature, SpinConstraintError, SpinElement, basis_compose, basis_decompose,
                             covering_map, dirac_condition_residual, gamma_set, so_eta_residual,
                             spinor_connection_commutator_form, spinor_connection_epsilon_form)

SIGS = [Signature.euclidean(), Signature.lorentzian()]


def random_spin(rng, gs):
    t = complex(rng.normal(), 0.3 * rng.normal())
    if gs.eta == 1:
        return SpinElement(np.cos(t), np.sin(t), gs)
    return SpinElement(np.cosh(t), np.sinh(t), gs)


def test_signature_data():
    for sig in SIGS:
        assert np.linalg.det(sig.eta_ab) == sig.eta
        assert sig.epsilon_ab[0, 1] == 1 and sig.epsilon_ab[1, 0] == -1
    assert Signature.euclidean().k == 1j and Signature.lorentzian().k == 1
    with pytest.raises(ValueError):
        Signature(0)


def test_explicit_gammas():
    assert np.array_equal(gamma_set(SIGS[0]).gamma_up[1], np.array([[0, -1j], [1j, 0]]))
    assert np.array_equal(gamma_set(SIGS[1]).gamma_up[1], np.array([[0, -1], [1, 0]]))


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_dirac_condition_exact(sig):
    gs = gamma_set(sig)
    assert dirac_condition_residual(gs) == 0.0
    assert np.array_equal(gs.gamma_up[0] @ gs.gamma_up[0], gs.I)
    assert np.array_equal(gs.gamma_up[1] @ gs.gamma_up[1], sig.eta * gs.I)


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_chirality(sig):
    gs = gamma_set(sig)
    g = gs.gamma_chir
    for a in range(2):
        assert np.array_equal(g @ gs.gamma_up[a], -gs.gamma_up[a] @ g)
    assert np.array_equal(g @ g, -sig.eta * gs.I)
    assert np.array_equal(gs.gamma_down[0] @ gs.gamma_down[1], -gs.gamma_down[1] @ gs.gamma_down[0])


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_basis_decompose(sig):
    gs = gamma_set(sig)
    assert basis_decompose(gs.I, gs) == (1, (0, 0), 0)
    assert basis_decompose(gs.gamma_chir, gs) == (0, (0, 0), 1)
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(1000):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        s, v, p = basis_decompose(M, gs)
        worst = max(worst, np.max(np.abs(basis_compose(s, v, p, gs) - M)))
    assert worst < 1e-13


def test_covering_identity():
    for sig in SIGS:
        gs = gamma_set(sig)
        assert np.array_equal(covering_map(SpinElement(1, 0, gs)), np.eye(2))


def test_euclidean_rotation_by_double_angle():
    gs = gamma_set(SIGS[0])
    for t in np.linspace(-2, 2, 9):
        l = covering_map(SpinElement(np.cos(t), np.sin(t), gs))
        c, s = np.cos(2 * t), np.sin(2 * t)
        assert np.allclose(l, [[c, s], [-s, c]], atol=1e-14)


def test_lorentzian_boost_by_double_rapidity():
    gs = gamma_set(SIGS[1])
    for s in np.linspace(-1.5, 1.5, 7):
        l = covering_map(SpinElement(np.cosh(s), np.sinh(s), gs))
        ch, sh = np.cosh(2 * s), np.sinh(2 * s)
        assert np.allclose(l, [[ch, -sh], [-sh, ch]], atol=1e-13)


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_covering_is_homomorphism_into_so(sig):
    gs = gamma_set(sig)
    rng = np.random.default_rng(11)
    for _ in range(100):
        S1, S2 = random_spin(rng, gs), random_spin(rng, gs)
        l1, l2 = covering_map(S1), covering_map(S2)
        scale = max(1.0, np.max(np.abs(l1)) * np.max(np.abs(l2)))
        assert np.max(np.abs(covering_map(S1 @ S2) - l1 @ l2)) < 1e-12 * scale
        assert so_eta_residual(l1, sig) < 1e-12 * max(1.0, np.max(np.abs(l1)) ** 2)


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_covering_transforms_gammas(sig):
    # S gamma_b S^-1 = gamma_a l^a_b, an oracle independent of the closed-form matrix
    gs = gamma_set(sig)
    rng = np.random.default_rng(12)
    for _ in range(50):
        S = random_spin(rng, gs)
        l = covering_map(S)
        Sm, Si = S.matrix, np.linalg.inv(S.matrix)
        for b in range(2):
            lhs = Sm @ gs.gamma_down[b] @ Si
            rhs = sum(gs.gamma_down[a] * l[a, b] for a in range(2))
            assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(l)))
        assert np.allclose(S.inverse.matrix @ Sm, gs.I)


def test_constraint_violation():
    gs = gamma_set(SIGS[0])
    with pytest.raises(SpinConstraintError):
        SpinElement(1, 0.5, gs)


@pytest.mark.parametrize("sig", SIGS, ids=["euclidean", "lorentzian"])
def test_connection_forms_agree(sig):
    gs = gamma_set(sig)
    rng = np.random.default_rng(13)
    for _ in range(100):
        w = complex(rng.normal(), rng.normal())
        Gam = np.array([[0, w], [-w, 0]])
        diff = spinor_connection_commutator_form(Gam, gs) - spinor_connection_epsilon_form(Gam, gs)
        assert np.max(np.abs(diff)) < 1e-13
