"""Dirac operator and first/second-order symmetry operators acting on spinor jets.

A symmetry operator is ``K = E^{ab} nabla_(ab) + F^a nabla_a + G``.  Its matrix
coefficients are stored by their Clifford components (scalar, vector
``v_c`` along ``gamma^c``, pseudoscalar along ``gamma``), each a jet at the
evaluation point so that ``D K psi`` differentiates them correctly.

For Killing data ``(e^{ab}, alpha^a, zeta^a, A, g)``::

    E^{ab} = e^{ab} I + 2 alpha^(a gamma^b)
    F^a    = (zeta^a + nabla_c e^{ac}) I + (gamma^c nabla_c alpha^a + A gamma^a)
             + 1/3 eps_bc nabla^b e^{ac} gamma
    G      = g I - R/4 alpha_b gamma^b + 1/4 eps_ba nabla^b zeta^a gamma
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import expr as ex
from .clifford import GammaSet
from .geometry import (FrameField, GeometryJet, Spinor, frame_derivatives, geometry_at,
                       spinor_sum, symmetrize)
from .jets import Jet, JetError
from .jets import integrate_closed_form
from .killing import (GField, IntegrabilityError, KillingData, closedness_residual, integrability_form,
                      tensor_gradient, vector_gradient)

R2 = range(2)


@dataclass
class CliffordJet:
    """Matrix field ``s I + v_c gamma^c + p gamma`` with jet components."""

    s: object = 0.0
    v: list = field(default_factory=lambda: [0.0, 0.0])
    p: object = 0.0

    def apply(self, psi: Spinor, gs: GammaSet) -> Spinor:
        terms = []
        if not _is_zero(self.s):
            terms.append(psi * self.s)
        for c in R2:
            if not _is_zero(self.v[c]):
                terms.append(psi.apply(gs.gamma_up[c]) * self.v[c])
        if not _is_zero(self.p):
            terms.append(psi.apply(gs.gamma_chir) * self.p)
        if not terms:
            return Spinor.zero(psi.order)
        return spinor_sum(terms)

    def values(self) -> tuple[complex, tuple[complex, complex], complex]:
        return (_val(self.s), (_val(self.v[0]), _val(self.v[1])), _val(self.p))

    def matrix(self, gs: GammaSet) -> np.ndarray:
        s, v, p = self.values()
        return s * gs.I + v[0] * gs.gamma_up[0] + v[1] * gs.gamma_up[1] + p * gs.gamma_chir


def _is_zero(a) -> bool:
    if isinstance(a, Jet):
        return not np.any(a.c)
    return a == 0


def _val(a) -> complex:
    return a.value if isinstance(a, Jet) else complex(a)


@dataclass
class SymmetryOperator:
    """Coefficients evaluated at one point (jets about that point)."""

    order: int
    E: list  # E[a][b]: CliffordJet
    F: list  # F[a]: CliffordJet
    G: CliffordJet
    geometry: GeometryJet

    def apply(self, psi: Spinor) -> Spinor:
        return operator_apply(self, psi)


@dataclass(frozen=True)
class DiracOperator:
    frame: FrameField
    mass: complex = 0.0


def dirac_apply_at(G: GeometryJet, psi: Spinor, mass: complex = 0.0) -> Spinor:
    """``i gamma^a nabla_a psi - m psi``; the result has order ``psi.order - 1``."""
    if psi.order < 1:
        raise JetError("spinor order exhausted")
    D1 = frame_derivatives(psi, G, 1)[1]
    gs = G.gammas
    out = spinor_sum([D1[(a,)].apply(1j * gs.gamma_up[a]) for a in R2])
    if mass != 0:
        out = out - psi * mass
    return out


def dirac_apply(D: DiracOperator, psi: Spinor, point, frame_order: int | None = None) -> Spinor:
    G = geometry_at(D.frame, point, frame_order or max(psi.order + 1, 2))
    return dirac_apply_at(G, psi, D.mass)


def operator_apply(K: SymmetryOperator, psi: Spinor) -> Spinor:
    if psi.order < K.order:
        raise JetError(f"spinor order {psi.order} < operator order {K.order}")
    G = K.geometry
    gs = G.gammas
    F = frame_derivatives(psi, G, K.order)
    terms = [K.G.apply(psi, gs)]
    for a in R2:
        terms.append(K.F[a].apply(F[1][(a,)], gs))
    if K.order == 2:
        S2 = symmetrize(F[2])
        for a, b in itertools.product(R2, R2):
            terms.append(K.E[a][b].apply(S2[(a, b)], gs))
    return spinor_sum(terms)


# --------------------------------------------------------------------------
# coefficient construction

GSource = Callable[[GeometryJet, list], Jet]


def g_from_expr(g: ex.Expr) -> GSource:
    return lambda G, t: ex.eval_jet(g, G.point, G.order)


def g_synthesized(field: Optional[GField] = None, tol: float = 1e-6) -> GSource:
    """``g`` from the integrability condition.

    The jet of ``g`` about the point is integrated from the jets of
    ``omega = -1/4 nabla_b(R e^{ab})``; its constant term is taken from the
    grid field by bilinear interpolation when one is supplied, else 0.
    Raises :class:`IntegrabilityError` where ``omega`` is not closed.
    """
    def src(G: GeometryJet, t) -> Jet:
        w = integrability_form(t, G)
        c = closedness_residual(w)
        if c > tol:
            raise IntegrabilityError(c, (G.point[0].real, G.point[1].real))
        value = 0.0
        if field is not None:
            value = field.interpolate(G.point[0].real, G.point[1].real)
        return integrate_closed_form(w[0], w[1], value)
    return src


def second_order_at(kd: KillingData, G: GeometryJet, g_source: Optional[GSource] = None,
                    data_order: Optional[int] = None) -> SymmetryOperator:
    n = data_order or G.order
    pt = G.point
    eta_dn = G.signature.eta_ab
    eta_up = G.signature.eta_up
    eps = G.signature.epsilon_ab
    t = kd.tensor_jets(pt, n)
    al = kd.alpha_jets(pt, n)
    ze = kd.zeta_jets(pt, n)
    Dt = tensor_gradient(t, G)  # Dt[c][a][b] = nabla_c e^{ab}
    Dal = vector_gradient(al, G)  # Dal[c][a] = nabla_c alpha^a
    Dze = vector_gradient(ze, G)
    E = [[CliffordJet(t[a][b], [al[a] * (1.0 if b == c else 0.0) + al[b] * (1.0 if a == c else 0.0)
                                for c in R2], 0.0)
          for b in R2] for a in R2]
    F = []
    for a in R2:
        s = ze[a] + sum((Dt[c][a][c] for c in R2), 0)
        v = [Dal[c][a] + (kd.A_const if a == c else 0.0) for c in R2]
        p = sum((eps[b, c] * eta_up[b, b] * Dt[b][a][c] for b in R2 for c in R2), 0) * (1 / 3)
        F.append(CliffordJet(s, v, p))
    if g_source is None:
        g_source = g_synthesized() if kd.synthesize_g else g_from_expr(kd.g_scalar)
    g = g_source(G, t)
    vG = [G.R * al[b] * (-0.25 * eta_dn[b, b]) for b in R2]
    pG = sum((eps[b, a] * eta_up[b, b] * Dze[b][a] for b in R2 for a in R2), 0) * 0.25
    return SymmetryOperator(2, E, F, CliffordJet(g, vG, pG), G)


def build_second_order(kd: KillingData, frame: FrameField, point, order: int = 5,
                       g_source: Optional[GSource] = None) -> SymmetryOperator:
    return second_order_at(kd, geometry_at(frame, point, order), g_source)


def first_order_at(zeta: Sequence[ex.Expr], A: complex, g: complex, G: GeometryJet) -> SymmetryOperator:
    """``F^a = zeta^a I + A gamma^a``, ``G = g I + 1/4 eps_ba nabla^b zeta^a gamma``."""
    eta_up = G.signature.eta_up
    eps = G.signature.epsilon_ab
    ze = [ex.eval_jet(z, G.point, G.order) for z in zeta]
    Dze = vector_gradient(ze, G)
    F = [CliffordJet(ze[a], [A if a == c else 0.0 for c in R2], 0.0) for a in R2]
    pG = sum((eps[b, a] * eta_up[b, b] * Dze[b][a] for b in R2 for a in R2), 0) * 0.25
    zero = CliffordJet()
    return SymmetryOperator(1, [[zero, zero], [zero, zero]], F, CliffordJet(complex(g), [0.0, 0.0], pG), G)


def build_first_order(zeta: Sequence[ex.Expr], A: complex, g: complex, frame: FrameField, point,
                      order: int = 5) -> SymmetryOperator:
    return first_order_at(zeta, A, g, geometry_at(frame, point, order))


def commutator_at(K: SymmetryOperator, psi: Spinor, mass: complex = 0.0) -> Spinor:
    G = K.geometry
    if psi.order < K.order + 1:
        raise JetError("spinor order too small for the commutator")
    return operator_apply(K, dirac_apply_at(G, psi, mass)) - dirac_apply_at(G, operator_apply(K, psi), mass)


def commutator_residual(K: SymmetryOperator, D: DiracOperator, psi: Spinor) -> float:
    """``|| K(D psi) - D(K psi) ||`` at the point (order-0 part only)."""
    return commutator_at(K, psi, D.mass).value_norm()
