"""Killing vector / Killing tensor residuals and the scalar part of a
second-order symmetry operator obtained from the integrability condition
``nabla^a g = -1/4 nabla_b (R e^{ab})``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import expr as ex
from .geometry import AXES, FrameField, GeometryJet, geometry_at
from .jets import Jet, integrate_closed_form

R2 = range(2)


class IntegrabilityError(ValueError):
    def __init__(self, residual: float, where=None):
        super().__init__(f"-1/4 nabla_b(R e^ab) is not closed: residual {residual:.3g}"
                         + (f" at {where}" if where is not None else ""))
        self.residual = residual
        self.where = where


SYNTHESIZE = "synthesize"


@dataclass(frozen=True)
class KillingData:
    """Free data of a second-order symmetry operator, in frame components."""

    e_tensor: tuple[tuple[ex.Expr, ex.Expr], tuple[ex.Expr, ex.Expr]]
    alpha: tuple[ex.Expr, ex.Expr]
    zeta: tuple[ex.Expr, ex.Expr]
    A_const: complex = 0.0
    g_scalar: Union[ex.Expr, str] = SYNTHESIZE

    @classmethod
    def from_strings(cls, e11="0", e12="0", e22="0", alpha1="0", alpha2="0", zeta1="0", zeta2="0",
                     A_const: complex = 0.0, g: str = SYNTHESIZE, aliases=None) -> "KillingData":
        p = lambda s: ex.compile_expr(s, aliases)
        e12p = p(e12)
        gs = g if (not isinstance(g, str) or g.strip() == SYNTHESIZE) else p(g)
        if isinstance(gs, str):
            gs = SYNTHESIZE
        return cls(((p(e11), e12p), (e12p, p(e22))), (p(alpha1), p(alpha2)), (p(zeta1), p(zeta2)),
                   complex(A_const), gs)

    @property
    def synthesize_g(self) -> bool:
        return isinstance(self.g_scalar, str)

    def tensor_jets(self, point, order: int) -> list[list[Jet]]:
        return [[ex.eval_jet(self.e_tensor[a][b], point, order) for b in R2] for a in R2]

    def alpha_jets(self, point, order: int) -> list[Jet]:
        return [ex.eval_jet(self.alpha[a], point, order) for a in R2]

    def zeta_jets(self, point, order: int) -> list[Jet]:
        return [ex.eval_jet(self.zeta[a], point, order) for a in R2]

    def is_first_order(self) -> bool:
        zero = ex.Num(0j)
        return all(self.e_tensor[a][b] == zero for a in R2 for b in R2) and all(
            self.alpha[a] == zero for a in R2)


# --------------------------------------------------------------------------
# covariant derivatives of frame-component tensors


def vector_gradient(v: Sequence[Jet], G: GeometryJet) -> list[list[Jet]]:
    """``D[c][a] = nabla_c v^a`` for frame components ``v^a``."""
    vc = G.to_coord_vector(v)
    cov = [[vc[m].partial(AXES[lam]) + sum((G.christoffel[m][lam][s] * vc[s] for s in R2), 0)
            for m in R2] for lam in R2]  # [lam][mu]
    out = [[None, None], [None, None]]
    for c, a in itertools.product(R2, R2):
        out[c][a] = sum((G.e[lam][c] * G.einv[a][m] * cov[lam][m] for lam in R2 for m in R2), 0)
    return out


def tensor_gradient(t: Sequence[Sequence[Jet]], G: GeometryJet) -> list[list[list[Jet]]]:
    """``D[c][a][b] = nabla_c t^{ab}`` for frame components ``t^{ab}``."""
    K = [[sum((G.e[m][a] * G.e[n][b] * t[a][b] for a in R2 for b in R2), 0) for n in R2] for m in R2]
    cov = [[[K[m][n].partial(AXES[lam])
             + sum((G.christoffel[m][lam][s] * K[s][n] + G.christoffel[n][lam][s] * K[m][s] for s in R2), 0)
             for n in R2] for m in R2] for lam in R2]
    out = [[[None] * 2 for _ in R2] for _ in R2]
    for c, a, b in itertools.product(R2, R2, R2):
        out[c][a][b] = sum((G.e[lam][c] * G.einv[a][m] * G.einv[b][n] * cov[lam][m][n]
                            for lam in R2 for m in R2 for n in R2), 0)
    return out


def _raise_first(D, G: GeometryJet):
    eta = G.signature.eta_up
    if isinstance(D[0][0], list):
        return [[[D[c][a][b] * eta[c, c] for b in R2] for a in R2] for c in R2]
    return [[D[c][a] * eta[c, c] for a in R2] for c in R2]


def killing_vector_residual(v: Sequence[Jet], G: GeometryJet) -> np.ndarray:
    """Symmetrized ``nabla^(a v^b)`` at the point (frame components)."""
    D = _raise_first(vector_gradient(v, G), G)  # D[a][b] = nabla^a v^b
    return np.array([[0.5 * (D[a][b] + D[b][a]).value for b in R2] for a in R2])


def killing_tensor_residual(t: Sequence[Sequence[Jet]], G: GeometryJet) -> np.ndarray:
    """Totally symmetrized ``nabla^(a t^{bc})`` at the point, shape (2, 2, 2)."""
    D = _raise_first(tensor_gradient(t, G), G)
    out = np.zeros((2, 2, 2), dtype=complex)
    for a, b, c in itertools.product(R2, R2, R2):
        out[a, b, c] = sum(D[p][q][r].value for p, q, r in itertools.permutations((a, b, c))) / 6
    return out


def killing_vector_residual_expr(v: Sequence[ex.Expr], frame: FrameField, point, order: int = 3) -> np.ndarray:
    G = geometry_at(frame, point, order)
    return killing_vector_residual([ex.eval_jet(c, G.point, order) for c in v], G)


def killing_tensor_residual_expr(t, frame: FrameField, point, order: int = 3) -> np.ndarray:
    G = geometry_at(frame, point, order)
    return killing_tensor_residual([[ex.eval_jet(t[a][b], G.point, order) for b in R2] for a in R2], G)


# --------------------------------------------------------------------------
# integrability condition


def integrability_form(t: Sequence[Sequence[Jet]], G: GeometryJet) -> list[Jet]:
    """Coordinate components ``omega_mu`` of the 1-form dual to ``-1/4 nabla_b(R t^{ab})``.

    A scalar ``g`` solving the integrability condition has ``d_mu g = omega_mu``.
    """
    D = tensor_gradient(t, G)
    dR = G.frame_grad(G.R)
    eta = G.signature.eta_ab
    W = [-0.25 * sum((dR[b] * t[a][b] + G.R * D[b][a][b] for b in R2), 0) for a in R2]
    return [sum((G.einv[a][m] * W[a] * eta[a, a] for a in R2), 0) for m in R2]


def closedness_residual(omega: Sequence[Jet]) -> float:
    return abs((omega[1].dx() - omega[0].dy()).value)


def local_g_jet(t: Sequence[Sequence[Jet]], G: GeometryJet, value: complex = 0.0) -> Jet:
    """Jet of ``g`` at the point, from the jets of ``omega`` (exact to stored order)."""
    w = integrability_form(t, G)
    return integrate_closed_form(w[0], w[1], value)


@dataclass
class Region:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError(f"degenerate region {self}")

    def grid(self, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
        if nx < 2 or ny < 2:
            raise ValueError("grid must be at least 2x2")
        return np.linspace(self.x_min, self.x_max, nx), np.linspace(self.y_min, self.y_max, ny)


@dataclass
class GField:
    """``g`` sampled on a grid, together with the 1-form it integrates."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # [ix, iy]
    values_alt: np.ndarray  # second path family, for path-independence checks
    omega: np.ndarray  # [ix, iy, mu]
    closedness: float
    closedness_where: tuple[float, float] = (0.0, 0.0)

    @property
    def path_difference(self) -> float:
        return float(np.max(np.abs(self.values - self.values_alt)))

    def interpolate(self, x: float, y: float) -> complex:
        """Bilinear interpolation of the sampled values."""
        xs, ys, v = self.xs, self.ys, self.values
        i = int(np.clip(np.searchsorted(xs, x) - 1, 0, len(xs) - 2))
        j = int(np.clip(np.searchsorted(ys, y) - 1, 0, len(ys) - 2))
        tx = (x - xs[i]) / (xs[i + 1] - xs[i])
        ty = (y - ys[j]) / (ys[j + 1] - ys[j])
        return complex((1 - tx) * (1 - ty) * v[i, j] + tx * (1 - ty) * v[i + 1, j]
                       + (1 - tx) * ty * v[i, j + 1] + tx * ty * v[i + 1, j + 1])

    def fd_defining_residual(self) -> float:
        """Central differences of g against omega at interior nodes (NaN without any)."""
        if len(self.xs) < 3 or len(self.ys) < 3:
            return float("nan")
        hx = self.xs[1] - self.xs[0]
        hy = self.ys[1] - self.ys[0]
        v = self.values
        gx = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * hx)
        gy = (v[1:-1, 2:] - v[1:-1, :-2]) / (2 * hy)
        rx = np.abs(gx - self.omega[1:-1, 1:-1, 0])
        ry = np.abs(gy - self.omega[1:-1, 1:-1, 1])
        return float(max(rx.max(initial=0.0), ry.max(initial=0.0)))


def _segment_integral(f0, f1, d0, d1, h):
    # trapezoid with endpoint-derivative correction, O(h^5) per segment
    return 0.5 * h * (f0 + f1) + h * h / 12 * (d0 - d1)


def integrability_check(tensor, frame: FrameField, region: Region, nx: int, ny: int,
                        order: int = 4, tol: float = 1e-6) -> GField:
    """Sample ``omega`` on the grid, check it is closed and integrate ``g``.

    ``g(x_min, y_min) = 0``.  Path family one runs along x then y, family two
    along y then x; both use the corrected trapezoid rule on each grid cell
    edge.
    """
    xs, ys = region.grid(nx, ny)
    om = np.zeros((nx, ny, 2), dtype=complex)
    dom = np.zeros((nx, ny, 2), dtype=complex)  # d_x omega_x, d_y omega_y
    worst, where = 0.0, (xs[0], ys[0])
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            G = geometry_at(frame, (x, y), order)
            t = [[ex.eval_jet(tensor[a][b], G.point, order) for b in R2] for a in R2]
            w = integrability_form(t, G)
            om[ix, iy] = [w[0].value, w[1].value]
            dom[ix, iy] = [w[0].dx().value, w[1].dy().value]
            c = closedness_residual(w)
            if c > worst:
                worst, where = c, (float(x), float(y))
    if worst > tol:
        raise IntegrabilityError(worst, where)
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]

    def along_x(iy):
        f, d = om[:, iy, 0], dom[:, iy, 0]
        seg = _segment_integral(f[:-1], f[1:], d[:-1], d[1:], hx)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def along_y(ix):
        f, d = om[ix, :, 1], dom[ix, :, 1]
        seg = _segment_integral(f[:-1], f[1:], d[:-1], d[1:], hy)
        return np.concatenate([[0.0], np.cumsum(seg)])

    v1 = np.zeros((nx, ny), dtype=complex)
    base_x = along_x(0)
    for ix in range(nx):
        v1[ix, :] = base_x[ix] + along_y(ix)
    v2 = np.zeros((nx, ny), dtype=complex)
    base_y = along_y(0)
    for iy in range(ny):
        v2[:, iy] = base_y[iy] + along_x(iy)
    return GField(xs, ys, v1, v2, om, worst, where)
