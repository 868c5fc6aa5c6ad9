"""Spin geometry of a 2D frame field, evaluated as jets at a point.

Covariant derivatives are computed with coordinate indices (Christoffel
corrected) and projected onto the frame at the end.

Conventions:

* ``e[mu][a]`` is the frame ``e^mu_a``; ``einv[a][mu]`` its inverse ``e^a_mu``.
* Riemann: ``R^a_{b mu nu} = d_mu Gamma^a_{b nu} - d_nu Gamma^a_{b mu}
  + Gamma^a_{s mu} Gamma^s_{b nu} - Gamma^a_{s nu} Gamma^s_{b mu}``;
  ``R = g^{nu b} R^mu_{b mu nu}`` (the unit sphere has ``R = 2``).
* Spin connection ``Gamma^{ab}_mu = e^a_alpha (Gamma^alpha_{beta mu} e^beta_c
  + d_mu e^alpha_c) eta^{cb}`` and spinor connection
  ``Gamma_mu = 1/4 Gamma^{ab}_mu epsilon_ab gamma``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from .clifford import GammaSet, Signature, SpinConstraintError, covering_matrix, gamma_set
from .jets import Jet, JetError

AXES = ("x", "y")
DET_TOL = 1e-10
REAL_TOL = 1e-12


class GeometryError(ValueError):
    """Degenerate frame, non-real frame or similar at an evaluation point."""


# --------------------------------------------------------------------------
# spinor-valued jets


class Spinor:
    """Two-component spinor whose components are jets of a common order."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0: Jet, c1: Jet):
        if c0.order != c1.order:
            n = min(c0.order, c1.order)
            c0, c1 = c0.truncate(n), c1.truncate(n)
        self.c0 = c0
        self.c1 = c1

    @classmethod
    def zero(cls, order: int) -> "Spinor":
        return cls(Jet.zero(order), Jet.zero(order))

    @property
    def order(self) -> int:
        return self.c0.order

    @property
    def components(self) -> tuple[Jet, Jet]:
        return (self.c0, self.c1)

    @property
    def value(self) -> np.ndarray:
        return np.array([self.c0.value, self.c1.value])

    def __add__(self, other: "Spinor") -> "Spinor":
        return Spinor(self.c0 + other.c0, self.c1 + other.c1)

    def __sub__(self, other: "Spinor") -> "Spinor":
        return Spinor(self.c0 - other.c0, self.c1 - other.c1)

    def __neg__(self) -> "Spinor":
        return Spinor(-self.c0, -self.c1)

    def __mul__(self, s) -> "Spinor":
        return Spinor(self.c0 * s, self.c1 * s)

    __rmul__ = __mul__

    def apply(self, M: np.ndarray) -> "Spinor":
        """Multiply by a constant 2x2 matrix."""
        return Spinor(
            self.c0 * M[0, 0] + self.c1 * M[0, 1],
            self.c0 * M[1, 0] + self.c1 * M[1, 1],
        )

    def apply_jets(self, M) -> "Spinor":
        """Multiply by a 2x2 nested list of jets (or numbers)."""
        return Spinor(
            M[0][0] * self.c0 + M[0][1] * self.c1,
            M[1][0] * self.c0 + M[1][1] * self.c1,
        )

    def partial(self, axis: str) -> "Spinor":
        return Spinor(self.c0.partial(axis), self.c1.partial(axis))

    def truncate(self, order: int) -> "Spinor":
        return Spinor(self.c0.truncate(order), self.c1.truncate(order))

    def max_abs(self) -> float:
        return max(self.c0.max_abs(), self.c1.max_abs())

    def value_norm(self) -> float:
        return float(np.max(np.abs(self.value)))


def spinor_sum(terms: Sequence[Spinor]) -> Spinor:
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def random_spinor(rng: np.random.Generator, point, order: int = 4) -> Spinor:
    """Random jets with coefficients uniform in the complex unit square."""
    comps = []
    for _ in range(2):
        c = rng.uniform(0, 1, (order + 1, order + 1)) + 1j * rng.uniform(0, 1, (order + 1, order + 1))
        comps.append(Jet(c, order))
    return Spinor(*comps)


# --------------------------------------------------------------------------
# frames and geometry


@dataclass(frozen=True)
class FrameField:
    """Frame ``e^mu_a`` given by expressions; ``e[mu][a]``, rows are coordinates."""

    signature: Signature
    e: tuple[tuple[ex.Expr, ex.Expr], tuple[ex.Expr, ex.Expr]]
    allow_complex: bool = False

    @classmethod
    def from_strings(cls, signature: Signature, ex1: str, ex2: str, ey1: str, ey2: str,
                     allow_complex: bool = False, aliases=None) -> "FrameField":
        """Components ``e^x_1, e^x_2, e^y_1, e^y_2``."""
        p = lambda s: ex.compile_expr(s, aliases)
        return cls(signature, ((p(ex1), p(ex2)), (p(ey1), p(ey2))), allow_complex)

    @classmethod
    def cartesian(cls, signature: Signature) -> "FrameField":
        return cls.from_strings(signature, "1", "0", "0", "1")

    def jets(self, point, order: int) -> list[list[Jet]]:
        out = [[ex.eval_jet(self.e[m][a], point, order) for a in range(2)] for m in range(2)]
        if not self.allow_complex:
            for m, a in itertools.product(range(2), range(2)):
                if abs(out[m][a].value.imag) > REAL_TOL:
                    raise GeometryError(f"frame component e^{AXES[m]}_{a + 1} is not real at {point}")
        return out


@dataclass
class GeometryJet:
    point: tuple[complex, complex]
    order: int
    signature: Signature
    gammas: GammaSet
    e: list[list[Jet]]
    einv: list[list[Jet]]
    g: list[list[Jet]]
    ginv: list[list[Jet]]
    christoffel: list[list[list[Jet]]]  # [alpha][beta][mu]
    spin_connection: list[list[list[Jet]]]  # [a][b][mu]
    spinor_connection: list[Jet]  # Gamma_mu = spinor_connection[mu] * gamma
    riemann: list[list[list[list[Jet]]]]  # [alpha][beta][mu][nu]
    R: Jet

    @property
    def eta(self) -> int:
        return self.signature.eta

    def to_frame_vector(self, v: Sequence[Jet]) -> list[Jet]:
        """Coordinate components v^mu -> frame components v^a."""
        return [self.einv[a][0] * v[0] + self.einv[a][1] * v[1] for a in range(2)]

    def to_coord_vector(self, v: Sequence) -> list[Jet]:
        return [self.e[m][0] * v[0] + self.e[m][1] * v[1] for m in range(2)]

    def grad(self, f: Jet) -> list[Jet]:
        """Coordinate gradient d_mu f."""
        return [f.dx(), f.dy()]

    def frame_grad(self, f: Jet) -> list[Jet]:
        """Frame components d_a f = e^mu_a d_mu f."""
        d = self.grad(f)
        return [self.e[0][a] * d[0] + self.e[1][a] * d[1] for a in range(2)]


def _inverse2(m: list[list[Jet]], where) -> list[list[Jet]]:
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if abs(det.value) <= DET_TOL:
        raise GeometryError(f"degenerate frame at {where}: |det| = {abs(det.value):.3g}")
    r = 1 / det
    return [[m[1][1] * r, -m[0][1] * r], [-m[1][0] * r, m[0][0] * r]]


def geometry_at(frame: FrameField, point, order: int = 5) -> GeometryJet:
    """All geometric jets of ``frame`` at ``point`` (frame expanded to ``order``)."""
    if order < 2:
        raise JetError("geometry needs frame order >= 2")
    point = (complex(point[0]), complex(point[1]))
    return geometry_from_jets(frame.signature, frame.jets(point, order), point)


def geometry_from_jets(sig: Signature, e: list[list[Jet]], point=(0j, 0j)) -> GeometryJet:
    n = e[0][0].order
    eta = sig.eta_ab
    gs = gamma_set(sig)
    einv_mu_a = _inverse2(e, point)  # inverse of matrix e[mu][a] is einv[a][mu]
    einv = einv_mu_a
    R2 = range(2)
    g = [[sum((einv[a][m] * einv[a][nu] * eta[a, a] for a in R2), Jet.zero(n)) for nu in R2] for m in R2]
    ginv = [[sum((e[m][a] * e[nu][a] * eta[a, a] for a in R2), Jet.zero(n)) for nu in R2] for m in R2]
    dg = [[[g[m][nu].partial(AXES[lam]) for nu in R2] for m in R2] for lam in R2]
    chr_ = [[[
        0.5 * sum(
            (ginv[al][lam] * (dg[be][lam][mu] + dg[mu][lam][be] - dg[lam][be][mu]) for lam in R2),
            Jet.zero(n - 1),
        )
        for mu in R2] for be in R2] for al in R2]
    de = [[[e[al][c].partial(AXES[mu]) for mu in R2] for c in R2] for al in R2]  # [alpha][c][mu]
    spin = [[[Jet.zero(n - 1) for _ in R2] for _ in R2] for _ in R2]
    for a, b, mu in itertools.product(R2, R2, R2):
        c = b  # eta^{cb} is diagonal
        acc = Jet.zero(n - 1)
        for al in R2:
            inner = de[al][c][mu] + sum((chr_[al][be][mu] * e[be][c] for be in R2), Jet.zero(n - 1))
            acc = acc + einv[a][al] * inner
        spin[a][b][mu] = acc * eta[c, b]
    eps = sig.epsilon_ab
    spinor_conn = [
        0.25 * sum((spin[a][b][mu] * eps[a, b] for a in R2 for b in R2), Jet.zero(n - 1)) for mu in R2
    ]
    dchr = [[[[chr_[al][be][nu].partial(AXES[mu]) for nu in R2] for mu in R2] for be in R2] for al in R2]
    riem = [[[[Jet.zero(n - 2) for _ in R2] for _ in R2] for _ in R2] for _ in R2]
    for al, be, mu, nu in itertools.product(R2, R2, R2, R2):
        t = dchr[al][be][mu][nu] - dchr[al][be][nu][mu]
        for s in R2:
            t = t + chr_[al][s][mu] * chr_[s][be][nu] - chr_[al][s][nu] * chr_[s][be][mu]
        riem[al][be][mu][nu] = t
    R = sum((riem[mu][be][mu][nu] * ginv[nu][be] for mu in R2 for be in R2 for nu in R2), Jet.zero(n - 2))
    return GeometryJet(point, n, sig, gs, e, einv, g, ginv, chr_, spin, spinor_conn, riem, R)


# --------------------------------------------------------------------------
# covariant derivatives of spinors


def _nabla_tensor(T: dict[tuple, Spinor], G: GeometryJet) -> dict[tuple, Spinor]:
    """One more covariant derivative of a spinor-valued covariant tensor.

    ``T`` maps coordinate index tuples to spinors; the new index is prepended.
    """
    gam = G.gammas.gamma_chir
    out: dict[tuple, Spinor] = {}
    for lam in range(2):
        for idx, t in T.items():
            term = t.partial(AXES[lam]) + t.apply(gam) * G.spinor_connection[lam]
            for slot, mu in enumerate(idx):
                for al in range(2):
                    j = idx[:slot] + (al,) + idx[slot + 1:]
                    term = term - T[j] * G.christoffel[al][lam][mu]
            out[(lam,) + idx] = term
    return out


def coordinate_derivatives(psi: Spinor, G: GeometryJet, depth: int) -> list[dict[tuple, Spinor]]:
    """[{(): psi}, {(mu,): nabla_mu psi}, {(l, m): nabla_l nabla_m psi}, ...]."""
    if psi.order < depth:
        raise JetError(f"spinor order {psi.order} too small for {depth} derivatives")
    tower = [{(): psi}]
    for _ in range(depth):
        tower.append(_nabla_tensor(tower[-1], G))
    return tower


def project_to_frame(T: dict[tuple, Spinor], G: GeometryJet) -> dict[tuple, Spinor]:
    """Contract every coordinate index with ``e^mu_a``."""
    k = len(next(iter(T)))
    out = {}
    for fidx in itertools.product(range(2), repeat=k):
        acc = None
        for cidx, t in T.items():
            w = None
            for mu, a in zip(cidx, fidx):
                w = G.e[mu][a] if w is None else w * G.e[mu][a]
            term = t if w is None else t * w
            acc = term if acc is None else acc + term
        out[fidx] = acc
    return out


def frame_derivatives(psi: Spinor, G: GeometryJet, depth: int) -> list[dict[tuple, Spinor]]:
    """Frame-index tower: ``[k][(a, b, ...)] = nabla_a nabla_b ... psi``."""
    return [project_to_frame(T, G) if T.keys() != {()} else T for T in coordinate_derivatives(psi, G, depth)]


def covariant_derivative(psi: Spinor, G: GeometryJet) -> list[Spinor]:
    """``nabla_mu psi`` for mu = x, y."""
    d = coordinate_derivatives(psi, G, 1)[1]
    return [d[(0,)], d[(1,)]]


def frame_covariant_derivative(psi: Spinor, G: GeometryJet) -> list[Spinor]:
    d = frame_derivatives(psi, G, 1)[1]
    return [d[(0,)], d[(1,)]]


def symmetrize(T: dict[tuple, Spinor]) -> dict[tuple, Spinor]:
    out = {}
    for idx in T:
        perms = list(itertools.permutations(idx))
        # mean written as an offset from T[idx], so already-symmetric input is returned unchanged
        dev = spinor_sum([T[p] - T[idx] for p in perms])
        out[idx] = T[idx] + dev * (1.0 / len(perms))
    return out


def second_sym_derivative(psi: Spinor, G: GeometryJet) -> dict[tuple, Spinor]:
    return symmetrize(frame_derivatives(psi, G, 2)[2])


def third_sym_derivative(psi: Spinor, G: GeometryJet) -> dict[tuple, Spinor]:
    return symmetrize(frame_derivatives(psi, G, 3)[3])


# --------------------------------------------------------------------------
# identity checks


def _value_norm(s: Spinor) -> float:
    return s.value_norm()


def ricci_identity_check(psi: Spinor, G: GeometryJet, eps_reading: str = "symbol") -> tuple[float, float]:
    """Residuals of

    ``[nabla_c, nabla_d] psi = 1/4 gamma psi eps_cd R`` and
    ``[nabla_a, nabla_b] nabla_c psi = R/4 gamma eps_ab nabla_c psi
    - R/2 eps^d_c eps_ab nabla_d psi``.

    ``eps^d_c`` is read as the permutation symbol ``eps^{de}`` (no metric
    factors, ``eps^{12} = +1``) contracted with ``eta_ec``.  Passing
    ``eps_reading="raised"`` raises ``d`` of ``eps_dc`` with ``eta`` instead;
    that reading differs by a factor ``eta`` and fails in Lorentzian signature.
    """
    F = frame_derivatives(psi, G, 3)
    gam = G.gammas.gamma_chir
    eps = G.signature.epsilon_ab
    if eps_reading == "symbol":
        eps_mixed = eps @ G.signature.eta_ab
    elif eps_reading == "raised":
        eps_mixed = G.signature.epsilon_mixed
    else:
        raise ValueError(f"unknown eps reading {eps_reading!r}")
    R = G.R
    r1 = 0.0
    for c, d in itertools.product(range(2), repeat=2):
        lhs = F[2][(c, d)] - F[2][(d, c)]
        rhs = psi.apply(gam) * R * (0.25 * eps[c, d])
        r1 = max(r1, _value_norm(lhs - rhs))
    r2 = 0.0
    for a, b, c in itertools.product(range(2), repeat=3):
        lhs = F[3][(a, b, c)] - F[3][(b, a, c)]
        rhs = F[1][(c,)].apply(gam) * R * (0.25 * eps[a, b])
        for d in range(2):
            rhs = rhs - F[1][(d,)] * R * (0.5 * eps_mixed[d, c] * eps[a, b])
        r2 = max(r2, _value_norm(lhs - rhs))
    return r1, r2


def appendix_second_order_check(psi: Spinor, G: GeometryJet) -> float:
    """``nabla_a nabla_c psi - nabla_(ac) psi - R/8 eps_ac gamma psi``."""
    F2 = frame_derivatives(psi, G, 2)[2]
    S2 = symmetrize(F2)
    gam = G.gammas.gamma_chir
    eps = G.signature.epsilon_ab
    r = 0.0
    for a, c in itertools.product(range(2), repeat=2):
        res = F2[(a, c)] - S2[(a, c)] - psi.apply(gam) * G.R * (eps[a, c] / 8)
        r = max(r, _value_norm(res))
    return r


def appendix_third_order_check(psi: Spinor, G: GeometryJet) -> float:
    """Residual of the symmetrized third-derivative identity

    ``nabla_(ab) nabla_c psi = nabla_(abc) psi
    + 1/12 (d_a R eps_bc + d_b R eps_ac) gamma psi
    + R/8 eps_ac gamma nabla_b psi + R/8 eps_bc gamma nabla_a psi
    + R/12 (-eta_ac nabla_b - eta_bc nabla_a + 2 eta_ab nabla_c) psi``.
    """
    F = frame_derivatives(psi, G, 3)
    S3 = symmetrize(F[3])
    gam = G.gammas.gamma_chir
    eps = G.signature.epsilon_ab
    eta = G.signature.eta_ab
    R = G.R
    dR = G.frame_grad(R)
    D1 = F[1]
    gpsi = psi.apply(gam)
    r = 0.0
    for a, b, c in itertools.product(range(2), repeat=3):
        lhs = (F[3][(a, b, c)] + F[3][(b, a, c)]) * 0.5
        rhs = S3[(a, b, c)]
        rhs = rhs + gpsi * ((dR[a] * eps[b, c] + dR[b] * eps[a, c]) * (1 / 12))
        rhs = rhs + D1[(b,)].apply(gam) * R * (eps[a, c] / 8)
        rhs = rhs + D1[(a,)].apply(gam) * R * (eps[b, c] / 8)
        rhs = rhs + (D1[(b,)] * (-eta[a, c]) + D1[(a,)] * (-eta[b, c]) + D1[(c,)] * (2 * eta[a, b])) * R * (1 / 12)
        r = max(r, _value_norm(lhs - rhs))
    return r


# --------------------------------------------------------------------------
# spin covariance


def transformed_frame_jets(G: GeometryJet, a: Jet, b: Jet) -> list[list[Jet]]:
    """``e'^mu_a = e^mu_b lbar^b_a`` with ``lbar = l(S)^-1 = eta l^T eta``."""
    eta = G.signature.eta_ab
    l = covering_matrix(a, b, G.eta)
    lbar = [[l[c][r] * (eta[r, r] * eta[c, c]) for c in range(2)] for r in range(2)]
    return [[G.e[m][0] * lbar[0][aa] + G.e[m][1] * lbar[1][aa] for aa in range(2)] for m in range(2)]


def spin_covariance_check(frame: FrameField, psi: Spinor, phi: tuple[ex.Expr, ex.Expr], point,
                          order: int = 4) -> float:
    """``max_mu || nabla'_mu (phi psi) - phi nabla_mu psi ||`` at ``point``."""
    G = geometry_at(frame, point, order)
    pt = G.point
    a = ex.eval_jet(phi[0], pt, order)
    b = ex.eval_jet(phi[1], pt, order)
    cres = abs(a.value**2 + G.eta * b.value**2 - 1)
    if cres > 1e-10:
        raise SpinConstraintError(f"a^2 + eta b^2 - 1 = {cres:.3g} at {point}")
    Gp = geometry_from_jets(G.signature, transformed_frame_jets(G, a, b), pt)
    gam = G.gammas.gamma_chir
    phi_apply: Callable[[Spinor], Spinor] = lambda s: s * a + s.apply(gam) * b
    d = covariant_derivative(psi, G)
    dp = covariant_derivative(phi_apply(psi), Gp)
    return max(_value_norm(dp[m] - phi_apply(d[m])) for m in range(2))


def check_invariants(G: GeometryJet) -> dict[str, float]:
    """Duality, symmetry and metricity residuals (max over stored coefficients)."""
    R2 = range(2)
    duality = 0.0
    for a, b in itertools.product(R2, R2):
        s = G.einv[a][0] * G.e[0][b] + G.einv[a][1] * G.e[1][b] - (1.0 if a == b else 0.0)
        duality = max(duality, s.max_abs())
    chr_sym = max(
        (G.christoffel[al][b][m] - G.christoffel[al][m][b]).max_abs()
        for al in R2 for b in R2 for m in R2
    )
    spin_anti = max((G.spin_connection[a][b][m] + G.spin_connection[b][a][m]).max_abs()
                    for a in R2 for b in R2 for m in R2)
    metricity = 0.0
    for al, m, nu in itertools.product(R2, R2, R2):
        t = G.g[m][nu].partial(AXES[al])
        for s in R2:
            t = t - G.christoffel[s][al][m] * G.g[s][nu] - G.christoffel[s][al][nu] * G.g[m][s]
        metricity = max(metricity, t.max_abs())
    return {"duality": duality, "christoffel_symmetry": chr_sym,
            "spin_antisymmetry": spin_anti, "metricity": metricity}
