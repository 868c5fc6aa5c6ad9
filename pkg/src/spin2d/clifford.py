"""Clifford algebra of a 2D quadratic form of either signature, as 2x2 matrices.

``eta = +1`` is Euclidean (2, 0), ``eta = -1`` is Lorentzian (1, 1).  The
orientation is fixed by ``epsilon_12 = +1`` (lower indices) and the chirality
element is ``gamma = gamma_1 gamma_2`` with lowered frame indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

I2 = np.eye(2, dtype=complex)
TOL = 1e-12


class SpinConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    eta: int

    def __post_init__(self):
        if self.eta not in (1, -1):
            raise ValueError(f"signature sign must be +1 or -1, got {self.eta}")

    @classmethod
    def euclidean(cls) -> "Signature":
        return cls(1)

    @classmethod
    def lorentzian(cls) -> "Signature":
        return cls(-1)

    @classmethod
    def parse(cls, name: str) -> "Signature":
        name = name.strip().lower()
        if name in ("euclidean", "riemannian", "+1", "1"):
            return cls(1)
        if name in ("lorentzian", "minkowski", "-1"):
            return cls(-1)
        raise ValueError(f"unknown signature {name!r}")

    @property
    def name(self) -> str:
        return "euclidean" if self.eta == 1 else "lorentzian"

    @property
    def eta_ab(self) -> np.ndarray:
        return np.diag([1.0, float(self.eta)])

    @property
    def eta_up(self) -> np.ndarray:
        # diagonal with entries +-1, so it is its own inverse
        return self.eta_ab

    @property
    def epsilon_ab(self) -> np.ndarray:
        return np.array([[0.0, 1.0], [-1.0, 0.0]])

    @property
    def epsilon_up(self) -> np.ndarray:
        """epsilon^{ab}, both indices raised with eta."""
        return self.eta_up @ self.epsilon_ab @ self.eta_up

    @property
    def epsilon_mixed(self) -> np.ndarray:
        """epsilon^a_b, first index raised with eta."""
        return self.eta_up @ self.epsilon_ab

    @property
    def k(self) -> complex:
        return 1j if self.eta == 1 else 1.0 + 0j


@dataclass(frozen=True)
class GammaSet:
    signature: Signature
    I: np.ndarray
    gamma_up: tuple[np.ndarray, np.ndarray]
    gamma_chir: np.ndarray
    gamma_down: tuple[np.ndarray, np.ndarray] = field(repr=False)

    @property
    def eta(self) -> int:
        return self.signature.eta


def gamma_set(sig: Signature) -> GammaSet:
    """gamma^1 = diag(1, -1), gamma^2 = [[0, -k], [k, 0]]."""
    k = sig.k
    g1 = np.array([[1, 0], [0, -1]], dtype=complex)
    g2 = np.array([[0, -k], [k, 0]], dtype=complex)
    up = (g1, g2)
    eta = sig.eta_ab
    down = (eta[0, 0] * g1, eta[1, 1] * g2)
    chir = down[0] @ down[1]
    gs = GammaSet(sig, I2.copy(), up, chir, down)
    if dirac_condition_residual(gs) != 0.0:
        raise AssertionError("gamma matrices violate the Dirac condition")
    return gs


def dirac_condition_residual(gs: GammaSet) -> float:
    eta_up = gs.signature.eta_up
    worst = 0.0
    for a in range(2):
        for b in range(2):
            ga, gb = gs.gamma_up[a], gs.gamma_up[b]
            r = ga @ gb + gb @ ga - 2 * eta_up[a, b] * gs.I
            worst = max(worst, float(np.max(np.abs(r))))
    return worst


def basis(gs: GammaSet) -> list[np.ndarray]:
    return [gs.I, gs.gamma_up[0], gs.gamma_up[1], gs.gamma_chir]


def basis_decompose(M, gs: GammaSet) -> tuple[complex, tuple[complex, complex], complex]:
    """Coefficients (s, (v_1, v_2), p) with M = s I + v_a gamma^a + p gamma."""
    B = np.stack([b.reshape(4) for b in basis(gs)], axis=1)
    coef = np.linalg.solve(B, np.asarray(M, dtype=complex).reshape(4))
    return complex(coef[0]), (complex(coef[1]), complex(coef[2])), complex(coef[3])


def basis_compose(s: complex, v, p: complex, gs: GammaSet) -> np.ndarray:
    return s * gs.I + v[0] * gs.gamma_up[0] + v[1] * gs.gamma_up[1] + p * gs.gamma_chir


@dataclass(frozen=True)
class SpinElement:
    """S = a I + b gamma with a^2 + eta b^2 = 1."""

    a: complex
    b: complex
    gammas: GammaSet

    def __post_init__(self):
        r = self.constraint_residual()
        if r > 1e-10:
            raise SpinConstraintError(f"a^2 + eta b^2 - 1 = {r:.3g}")

    def constraint_residual(self) -> float:
        return abs(self.a**2 + self.gammas.eta * self.b**2 - 1)

    @property
    def matrix(self) -> np.ndarray:
        return self.a * self.gammas.I + self.b * self.gammas.gamma_chir

    @property
    def inverse(self) -> "SpinElement":
        return SpinElement(self.a, -self.b, self.gammas)

    def __matmul__(self, other: "SpinElement") -> "SpinElement":
        # gamma^2 = -eta I closes the product on span{I, gamma}
        eta = self.gammas.eta
        a = self.a * other.a - eta * self.b * other.b
        b = self.a * other.b + self.b * other.a
        return SpinElement(a, b, self.gammas)


def covering_matrix(a, b, eta: int):
    """Entries of l(S) for S = a I + b gamma; works on scalars or jets.

    Returned as nested lists ``l[row][col]`` so jets can be used as entries.
    The convention is ``S gamma_b S^-1 = gamma_a l^a_b``.
    """
    p = a * a - eta * (b * b)
    return [[p, 2 * eta * (a * b)], [-2 * (a * b), p]]


def covering_map(S: SpinElement) -> np.ndarray:
    if S.constraint_residual() > 1e-10:
        raise SpinConstraintError("spin element violates a^2 + eta b^2 = 1")
    return np.array(covering_matrix(S.a, S.b, S.gammas.eta), dtype=complex)


def so_eta_residual(l: np.ndarray, sig: Signature) -> float:
    eta = sig.eta_ab
    return float(np.max(np.abs(l.T @ eta @ l - eta)))


def spinor_connection_commutator_form(Gamma_ab: np.ndarray, gs: GammaSet) -> np.ndarray:
    """(1/8) Gamma^{ab} [gamma_a, gamma_b]."""
    out = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            ga, gb = gs.gamma_down[a], gs.gamma_down[b]
            out += Gamma_ab[a, b] * (ga @ gb - gb @ ga) / 8
    return out


def spinor_connection_epsilon_form(Gamma_ab: np.ndarray, gs: GammaSet) -> np.ndarray:
    """(1/4) Gamma^{ab} epsilon_ab gamma."""
    eps = gs.signature.epsilon_ab
    return 0.25 * np.sum(Gamma_ab * eps) * gs.gamma_chir
