"""Type-I separation of the Dirac equation.

Covers the coefficient functions of the matrix form
``A~ d_x psi + B~ d_y psi + C~ psi - lambda psi = 0``, Liouville metrics and
their D5 frame, a separated-solution builder (closed-form exponentials in the
ignorable coordinate, RK4 in the other), and separation in the complex
variables ``z = x + i y``, ``zbar = x - i y`` on the Minkowski plane.

Liouville coordinates ``(u, v)`` are identified with ``(x, y)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .clifford import Signature
from .geometry import FrameField, GeometryJet, Spinor, geometry_at, random_spinor
from .jets import Jet, jet_exp, jet_sqrt
from .killing import KillingData, Region
from .symop import GSource, dirac_apply_at

LIOUVILLE_ALIASES = {"u": "x", "v": "y"}
SIGMA3 = np.diag([1.0, -1.0]).astype(complex)


class SeparationError(ValueError):
    pass


class StepSizeError(SeparationError):
    pass


# --------------------------------------------------------------------------
# Liouville metrics


@dataclass(frozen=True)
class LiouvilleMetric:
    """``(A(u) + B(v)) (du^2 + eta dv^2)``."""

    A_expr: ex.Expr
    B_expr: ex.Expr
    signature: Signature

    @classmethod
    def from_strings(cls, A: str, B: str, signature: Signature) -> "LiouvilleMetric":
        a = ex.compile_expr(A, LIOUVILLE_ALIASES)
        b = ex.compile_expr(B, LIOUVILLE_ALIASES)
        if not ex.variables(a) <= {"x"}:
            raise SeparationError(f"A must depend on u only: {ex.to_source(a)}")
        if not ex.variables(b) <= {"y"}:
            raise SeparationError(f"B must depend on v only: {ex.to_source(b)}")
        return cls(a, b, signature)

    @property
    def conformal_factor(self) -> ex.Expr:
        return ex.BinOp("+", self.A_expr, self.B_expr)

    @property
    def has_ignorable_x(self) -> bool:
        return not ex.variables(self.A_expr)

    def sign(self, region: Region, nx: int = 5, ny: int = 5) -> int:
        """Sign of ``A + B`` on the region; raises if it vanishes or changes."""
        xs, ys = region.grid(nx, ny)
        f = self.conformal_factor
        vals = np.array([[ex.evaluate(f, x, y) for y in ys] for x in xs])
        if np.max(np.abs(vals.imag)) > 1e-12:
            raise SeparationError("A + B is not real on the region")
        lo, hi = vals.real.min(), vals.real.max()
        if lo > 0:
            return 1
        if hi < 0 and self.signature.eta == -1:
            return -1
        raise SeparationError(f"A + B must be {'nonzero' if self.signature.eta == -1 else 'positive'} "
                              f"and of one sign on {region}: range [{lo:.3g}, {hi:.3g}]")


def _inv_sqrt(f: ex.Expr) -> str:
    return f"1/sqrt({ex.to_source(f)})"


def liouville_frame(m: LiouvilleMetric, region: Optional[Region] = None) -> FrameField:
    """Orthonormal frame along the coordinate lines.

    ``e_1 = d_u / sqrt(A+B)``, ``e_2 = d_v / sqrt(A+B)`` so the metric is
    ``(A+B) diag(1, eta)``.  For a Lorentzian metric with ``A + B < 0`` the
    roles of ``u`` and ``v`` are exchanged.
    """
    s = m.sign(region) if region is not None else 1
    f = m.conformal_factor if s > 0 else ex.Neg(m.conformal_factor)
    r = _inv_sqrt(f)
    if s > 0:
        return FrameField.from_strings(m.signature, r, "0", "0", r)
    return FrameField.from_strings(m.signature, "0", r, r, "0")


def liouville_killing_data(m: LiouvilleMetric, g="synthesize", region: Optional[Region] = None) -> KillingData:
    """Killing tensor ``B/(A+B) d_u d_u - eta A/(A+B) d_v d_v`` in the frame of :func:`liouville_frame`."""
    s = m.sign(region) if region is not None else 1
    A, B = ex.to_source(m.A_expr), ex.to_source(m.B_expr)
    eta = m.signature.eta
    if s > 0:
        return KillingData.from_strings(e11=B, e22=f"{-eta}*({A})", g=g)
    # frame e_1 ~ d_v, e_2 ~ d_u with |A+B|; the signs follow from (A+B) < 0
    return KillingData.from_strings(e11=f"{eta}*({A})", e22=f"-({B})", g=g)


def d5_frame(m: LiouvilleMetric) -> FrameField:
    """Antidiagonal frame ``e^x_2 = 1/sqrt(A+B)``, ``e^y_1 = -1/sqrt(A+B)``.

    Rows of the frame matrix are coordinates: ``e_1 = -R1 d_y``,
    ``e_2 = R1 d_x`` with ``R1 = (A+B)^(-1/2)``; the metric is
    ``(A+B)(eta dx^2 + dy^2)``.
    """
    r = _inv_sqrt(m.conformal_factor)
    return FrameField.from_strings(m.signature, "0", r, "-" + r, "0")


def d5_killing_data(m: LiouvilleMetric, alpha=("0", "0"), zeta=("0", "0")) -> KillingData:
    """``K = d_x (x) d_x`` in the D5 frame: frame components ``diag(0, B)`` (needs ``A = 0``)."""
    _require_ignorable(m)
    return KillingData.from_strings(e22=ex.to_source(m.B_expr), alpha1=alpha[0], alpha2=alpha[1],
                                    zeta1=zeta[0], zeta2=zeta[1], g="0")


def d5_g_source(m: LiouvilleMetric) -> GSource:
    """Closed-form ``g = -eta B'^2 / (16 B^2)``; with it the D5 operator is exactly ``d_x^2``."""
    eta = m.signature.eta

    def src(G: GeometryJet, t) -> Jet:
        B = ex.eval_jet(m.B_expr, G.point, G.order + 1)
        dB = B.dy()
        B = B.truncate(G.order)
        return (dB * dB) / (B * B) * (-eta / 16)
    return src


def d5_translation_zeta(m: LiouvilleMetric) -> tuple[ex.Expr, ex.Expr]:
    """Frame components of ``d_x`` in the D5 frame: ``(0, sqrt(A+B))``."""
    return (ex.Num(0j), ex.Call("sqrt", m.conformal_factor))


def _require_ignorable(m: LiouvilleMetric):
    if not m.has_ignorable_x:
        raise SeparationError("D5 separation needs A = 0 (x ignorable)")


# --------------------------------------------------------------------------
# coefficient functions


@dataclass(frozen=True)
class SeparationCoefficients:
    A1: complex
    A2: complex
    B1: complex
    B2: complex
    C1: complex
    C2: complex

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(A~, B~, C~)`` with the sign patterns of the matrix form."""
        A = np.array([[self.A1, self.A2], [-self.A2, -self.A1]])
        B = np.array([[self.B1, self.B2], [-self.B2, -self.B1]])
        C = np.array([[self.C1, -self.C2], [self.C2, -self.C1]])
        return A, B, C


def coefficients_from_geometry(G: GeometryJet) -> SeparationCoefficients:
    """``A1 = i e^x_1``, ``A2 = -ik e^x_2``, ``B1 = i e^y_1``, ``B2 = -ik e^y_2``,
    ``C1 = -(i/2) e^mu_2 Gamma^{12}_mu``, ``C2 = (i/2) eta k e^mu_1 Gamma^{12}_mu``.
    """
    k = G.signature.k
    eta = G.eta
    e = [[G.e[m][a].value for a in range(2)] for m in range(2)]
    w = [G.spin_connection[0][1][m].value for m in range(2)]
    return SeparationCoefficients(
        A1=1j * e[0][0],
        A2=-1j * k * e[0][1],
        B1=1j * e[1][0],
        B2=-1j * k * e[1][1],
        C1=-0.5j * (e[0][1] * w[0] + e[1][1] * w[1]),
        C2=0.5j * eta * k * (e[0][0] * w[0] + e[1][0] * w[1]),
    )


def separation_coefficients(frame: FrameField, point) -> SeparationCoefficients:
    return coefficients_from_geometry(geometry_at(frame, point, 2))


def operator_matrices(G: GeometryJet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``i gamma^a e^mu_a`` for each ``mu`` and ``i gamma^a e^mu_a Gamma_mu``, from the gamma matrices."""
    gs = G.gammas
    e = [[G.e[m][a].value for a in range(2)] for m in range(2)]
    coef = [1j * (gs.gamma_up[0] * e[m][0] + gs.gamma_up[1] * e[m][1]) for m in range(2)]
    C = sum(coef[m] @ gs.gamma_chir * G.spinor_connection[m].value for m in range(2))
    return coef[0], coef[1], C


def factor_samples(m: LiouvilleMetric, x: float, ys: Sequence[float]) -> np.ndarray:
    """``(A2 F, C2 F)`` along a line of constant ``x``, ``F = sqrt(A+B)`` the separation factor."""
    fr = d5_frame(m)
    out = []
    for y in ys:
        c = separation_coefficients(fr, (x, y))
        F = ex.evaluate(ex.Call("sqrt", m.conformal_factor), x, y)
        out.append((c.A2 * F, c.C2 * F))
    return np.array(out)


# --------------------------------------------------------------------------
# D5 operator form


def _r1_jet(m: LiouvilleMetric, point, order: int) -> Jet:
    return 1 / jet_sqrt(ex.eval_jet(m.conformal_factor, point, order))


def d5_display_apply(m: LiouvilleMetric, psi: Spinor, point) -> Spinor:
    """``-i R1 [(0, k; -k, 0) d_x + sigma3 d_y] + (i/2) R1' sigma3`` applied to ``psi``."""
    k = m.signature.k
    J = np.array([[0, k], [-k, 0]], dtype=complex)
    R1 = _r1_jet(m, point, psi.order + 1)
    dR1 = R1.dy()
    R1 = R1.truncate(psi.order - 1)
    deriv = psi.partial("x").apply(J) + psi.partial("y").apply(SIGMA3)
    return deriv * (R1 * -1j) + psi.apply(SIGMA3).truncate(psi.order - 1) * (dR1 * 0.5j)


def d5_uncorrected_apply(m: LiouvilleMetric, psi: Spinor, point) -> Spinor:
    """``R1 [(0, k; -k, 0) d_x + i sigma3 d_y] + (i/2) R1' sigma3``; a wrong variant kept as a negative control."""
    k = m.signature.k
    J = np.array([[0, k], [-k, 0]], dtype=complex)
    R1 = _r1_jet(m, point, psi.order + 1)
    dR1 = R1.dy()
    R1 = R1.truncate(psi.order - 1)
    deriv = psi.partial("x").apply(J) + psi.partial("y").apply(1j * SIGMA3)
    return deriv * R1 + psi.apply(SIGMA3).truncate(psi.order - 1) * (dR1 * 0.5j)


def d5_dirac_form_check(m: LiouvilleMetric, points: Sequence, rng: np.random.Generator,
                        n_psi: int = 5, uncorrected: bool = False) -> float:
    """Max over points and random spinors of ``||D_general psi - D_display psi||``."""
    _require_ignorable(m)
    fr = d5_frame(m)
    disp = d5_uncorrected_apply if uncorrected else d5_display_apply
    worst = 0.0
    for pt in points:
        G = geometry_at(fr, pt, 4)
        for _ in range(n_psi):
            psi = random_spinor(rng, G.point, 3)
            r = dirac_apply_at(G, psi) - disp(m, psi, G.point)
            worst = max(worst, r.value_norm())
    return worst


# --------------------------------------------------------------------------
# separated solutions


def _expm2(M: np.ndarray, t: float) -> np.ndarray:
    """exp(t M) for a 2x2 matrix (closed form, valid for defective M)."""
    tau = np.trace(M) / 2
    N = M - tau * np.eye(2)
    d = np.sqrt(complex(-np.linalg.det(N)))  # N^2 = d^2 I
    if abs(d * t) < 1e-8:
        sh = t * (1 + (d * t) ** 2 / 6)
        ch = 1 + (d * t) ** 2 / 2
    else:
        sh = np.sinh(d * t) / d
        ch = np.cosh(d * t)
    return np.exp(tau * t) * (ch * np.eye(2) + sh * N)


def _fd_weights(offsets: np.ndarray, order: int = 1) -> np.ndarray:
    """Finite-difference weights for the given derivative on integer offsets."""
    n = len(offsets)
    V = np.vander(offsets.astype(float), n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return np.linalg.solve(V, rhs)


FD_HALF_WIDTH = 4
_FD8 = _fd_weights(np.arange(-FD_HALF_WIDTH, FD_HALF_WIDTH + 1))


@dataclass
class SeparatedSolution:
    metric: LiouvilleMetric
    lam: complex
    kappa: complex
    mu1: complex
    mu2: complex
    c: tuple[complex, complex]
    ys: np.ndarray
    b: np.ndarray  # [i, component]
    db: np.ndarray  # y-derivative of b; NaN where unavailable
    h: float
    x0: float
    method: str

    @property
    def mu(self) -> complex:
        return self.mu1 * self.mu2

    def a(self, x: float) -> np.ndarray:
        return np.array(self.c) * np.exp(self.kappa * x)

    def a_jets(self, x: float, y: float, order: int) -> list[Jet]:
        e = jet_exp(Jet.variable("x", x, order) * self.kappa)
        return [e * self.c[0], e * self.c[1]]

    def psi_jet(self, x: float, i: int) -> Spinor:
        """Order-1 jet of ``psi_j = a_j(x) b_j(y)`` at ``(x, ys[i])``."""
        y = self.ys[i]
        if np.any(np.isnan(self.db[i])):
            raise SeparationError(f"no y-derivative at sample {i} (too close to the table edge)")
        a = self.a_jets(x, y, 1)
        comps = []
        for j in range(2):
            bj = Jet.from_derivatives({(0, 0): self.b[i, j], (0, 1): self.db[i, j]}, 1)
            comps.append(a[j] * bj)
        return Spinor(*comps)

    def interior(self) -> np.ndarray:
        return np.nonzero(~np.isnan(self.db[:, 0]))[0]

    def dirac_residuals(self, xs: Sequence[float], indices: Optional[Sequence[int]] = None) -> np.ndarray:
        """``||D psi - lambda psi||`` at the given sample rows and x values."""
        fr = d5_frame(self.metric)
        idx = self.interior() if indices is None else indices
        out = np.zeros((len(xs), len(idx)))
        for p, x in enumerate(xs):
            for q, i in enumerate(idx):
                G = geometry_at(fr, (x, self.ys[i]), 2)
                out[p, q] = dirac_apply_at(G, self.psi_jet(x, i), self.lam).value_norm()
        return out

    def k_residual(self, xs: Sequence[float]) -> float:
        """``max ||d_x^2 psi - kappa^2 psi||`` over the table."""
        worst = 0.0
        for x in xs:
            for i, y in enumerate(self.ys):
                for j in range(2):
                    aj = self.a_jets(x, y, 2)[j] * self.b[i, j]
                    worst = max(worst, abs(aj.dx().dx().value - self.kappa ** 2 * aj.value))
        return worst

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y", "re_b1", "im_b1", "re_b2", "im_b2"])
            for y, (b1, b2) in zip(self.ys, self.b):
                w.writerow([repr(float(v)) for v in (y, b1.real, b1.imag, b2.real, b2.imag)])


@dataclass(frozen=True)
class _YSystem:
    metric: LiouvilleMetric
    frame: FrameField
    lam: complex
    mu1: complex
    mu2: complex
    x0: float

    def matrix(self, y: float) -> np.ndarray:
        c = separation_coefficients(self.frame, (self.x0, y))
        F = ex.evaluate(ex.Call("sqrt", self.metric.conformal_factor), self.x0, y)
        d = F * c.B1
        if abs(d) < 1e-14:
            raise SeparationError(f"B1 vanishes at y = {y}")
        return np.array([[-F * (c.C1 - self.lam), -self.mu1],
                         [-self.mu2, -F * (c.C1 + self.lam)]]) / d


def separation_constants(m: LiouvilleMetric, kappa: complex, c_ratio: complex = 1.0,
                         x0: float = 0.0, y0: float = 0.0) -> tuple[complex, complex]:
    """``mu1 = (alpha kappa - c) c2/c1``, ``mu2 = (alpha kappa - c) c1/c2`` with
    ``alpha = A2 F`` and ``c = C2 F``."""
    f = factor_samples(m, x0, [y0])[0]
    s = f[0] * kappa - f[1]
    return s * c_ratio, s / c_ratio


def separate_solve(m: LiouvilleMetric, lam: complex, kappa: complex, y_range: tuple[float, float],
                   h: float, c_ratio: complex = 1.0, x0: float = 0.0, method: str = "auto",
                   growth_limit: float = 2.5) -> SeparatedSolution:
    """Separated solution ``psi_j = c_j exp(kappa x) b_j(y)``.

    ``b`` starts at ``(1, 1)`` at ``y_range[0]``.  ``method`` is ``"rk4"``,
    ``"exact"`` (constant coefficients only) or ``"auto"`` (exact when ``B``
    is constant).  RK4 raises :class:`StepSizeError` when
    ``h * spectral radius`` of the system exceeds ``growth_limit``.
    """
    _require_ignorable(m)
    lam = complex(lam)
    if lam == 0:
        raise SeparationError("lambda must be nonzero")
    if not (h > 0 and y_range[1] > y_range[0]):
        raise SeparationError("need h > 0 and a nonempty y range")
    n = int(round((y_range[1] - y_range[0]) / h))
    if n < 1 or abs(n * h - (y_range[1] - y_range[0])) > 1e-9 * max(1.0, abs(y_range[1])):
        raise SeparationError(f"step {h} does not divide the y range {y_range}")
    if c_ratio == 0:
        raise SeparationError("c2/c1 must be nonzero")
    ys = y_range[0] + h * np.arange(n + 1)
    mu1, mu2 = separation_constants(m, kappa, c_ratio, x0, ys[0])
    sysm = _YSystem(m, d5_frame(m), lam, mu1, mu2, x0)
    constant = not ex.variables(m.B_expr)
    if method == "auto":
        method = "exact" if constant else "rk4"
    b = np.zeros((n + 1, 2), dtype=complex)
    b[0] = (1.0, 1.0)
    db = np.full((n + 1, 2), np.nan, dtype=complex)
    if method == "exact":
        if not constant:
            raise SeparationError("exact y-solution needs constant B")
        M = sysm.matrix(ys[0])
        for i, y in enumerate(ys):
            b[i] = _expm2(M, y - ys[0]) @ b[0]
        db = b @ M.T
    elif method == "rk4":
        M0 = sysm.matrix(ys[0])
        for i in range(n):
            y = ys[i]
            Mh = sysm.matrix(y + h / 2)
            M1 = sysm.matrix(y + h)
            rho = max(np.max(np.abs(np.linalg.eigvals(M))) for M in (M0, Mh, M1))
            if h * rho > growth_limit:
                raise StepSizeError(f"step {h} too large at y = {y:.6g}: h * spectral radius = {h * rho:.3g}")
            k1 = M0 @ b[i]
            k2 = Mh @ (b[i] + h / 2 * k1)
            k3 = Mh @ (b[i] + h / 2 * k2)
            k4 = M1 @ (b[i] + h * k3)
            b[i + 1] = b[i] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            M0 = M1
        w = FD_HALF_WIDTH
        for i in range(w, n + 1 - w):
            db[i] = _FD8 @ b[i - w:i + w + 1] / h
    else:
        raise SeparationError(f"unknown method {method!r}")
    return SeparatedSolution(m, lam, complex(kappa), mu1, mu2, (1.0 + 0j, complex(c_ratio)),
                             ys, b, db, h, x0, method)


def type1_operator_apply(m: LiouvilleMetric, psi: Spinor, point) -> Spinor:
    """``L psi = T(T psi)`` with ``T = alpha d_x - c``, ``alpha = A2 F``, ``c = C2 F``.

    Expanding ``T^2`` gives ``alpha^2 d_x^2 + (alpha alpha_x - 2 alpha c) d_x
    + (c^2 - alpha c_x)``; separated solutions satisfy ``L psi = mu1 mu2 psi``.
    """
    fr = d5_frame(m)
    n = psi.order
    G = geometry_at(fr, point, n + 1)
    k = m.signature.k
    F = jet_sqrt(ex.eval_jet(m.conformal_factor, G.point, n + 1))
    alpha = G.e[0][1] * F * (-1j * k)
    w = [G.spin_connection[0][1][mu] for mu in range(2)]
    c = (G.e[0][0] * w[0] + G.e[1][0] * w[1]) * F * (0.5j * m.signature.eta * k)

    def T(s: Spinor) -> Spinor:
        return s.partial("x") * alpha - s.truncate(s.order - 1) * c

    return T(T(psi))


# --------------------------------------------------------------------------
# plane waves


def plane_wave(frame: FrameField, p: complex, q: complex, point=(0.0, 0.0)):
    """Eigen-decomposition of the constant-frame Dirac symbol on ``exp(i(p x + q y))``.

    Returns ``(lams, vecs)``: for each column ``u`` of ``vecs``,
    ``i gamma^a nabla_a (u e^{i(px+qy)}) = lam u e^{i(px+qy)}``.
    """
    G = geometry_at(frame, point, 2)
    Ax, Ay, C = operator_matrices(G)
    M = Ax * (1j * p) + Ay * (1j * q) + C
    lams, vecs = np.linalg.eig(M)
    return lams, vecs


def plane_wave_spinor(u, p: complex, q: complex, point, order: int) -> Spinor:
    x = Jet.variable("x", point[0], order)
    y = Jet.variable("y", point[1], order)
    ph = jet_exp((x * p + y * q) * 1j)
    return Spinor(ph * u[0], ph * u[1])


# --------------------------------------------------------------------------
# complex variables on the Minkowski plane

MINKOWSKI_FRAME = ("i/2", "1/2", "-1/2", "-i/2")  # e^x_1, e^x_2, e^y_1, e^y_2
JZ = np.array([[0, -1], [1, 0]], dtype=complex)


def minkowski_frame() -> FrameField:
    return FrameField.from_strings(Signature.lorentzian(), *MINKOWSKI_FRAME, allow_complex=True)


def d_z(psi: Spinor) -> Spinor:
    return (psi.partial("x") - psi.partial("y") * 1j) * 0.5


def d_zbar(psi: Spinor) -> Spinor:
    return (psi.partial("x") + psi.partial("y") * 1j) * 0.5


def z_form_apply(psi: Spinor) -> Spinor:
    """``(0, -1; 1, 0) d_z + i sigma3 d_zbar``."""
    return d_z(psi).apply(JZ) + d_zbar(psi).apply(1j * SIGMA3)


@dataclass(frozen=True)
class MinkowskiComplexResult:
    frame: FrameField
    residual: float  # max ||D_general psi - i z_form psi||


def minkowski_complex_dirac(rng: np.random.Generator, points: Sequence = ((0.1, 0.2),),
                            n_psi: int = 5) -> MinkowskiComplexResult:
    """Compare the general pipeline with ``i`` times the z-form on random spinors."""
    fr = minkowski_frame()
    worst = 0.0
    for pt in points:
        G = geometry_at(fr, pt, 3)
        for _ in range(n_psi):
            psi = random_spinor(rng, G.point, 3)
            r = dirac_apply_at(G, psi) - z_form_apply(psi) * 1j
            worst = max(worst, r.value_norm())
    return MinkowskiComplexResult(fr, worst)


def exponential_solution(p: complex, lam: complex, point=(0.0, 0.0), order: int = 3,
                         branch: int = 1) -> tuple[Spinor, complex]:
    """``(c1, c2) exp(p z + q zbar)`` with ``p^2 + q^2 = -lam^2``, solving z-form psi = lam psi.

    Returns the spinor jet and ``q``.
    """
    q = branch * np.sqrt(complex(-lam * lam - p * p))
    c = np.array([p, 1j * q - lam], dtype=complex)
    if np.max(np.abs(c)) < 1e-14:
        c = np.array([lam + 1j * q, p], dtype=complex)
    if np.max(np.abs(c)) < 1e-14:
        c = np.array([1.0, 0.0], dtype=complex)
    x = Jet.variable("x", point[0], order)
    y = Jet.variable("y", point[1], order)
    z = x + y * 1j
    zb = x - y * 1j
    ph = jet_exp(z * p + zb * q)
    return Spinor(ph * c[0], ph * c[1]), q


def z_commuting_residual(rng: np.random.Generator, point=(0.1, 0.2), n_psi: int = 5) -> float:
    """``[d_z^2, zform]`` and ``[d_zbar^2, zform]`` on random jets."""
    worst = 0.0
    for _ in range(n_psi):
        psi = random_spinor(rng, point, 4)
        for d in (d_z, d_zbar):
            r = d(d(z_form_apply(psi))) - z_form_apply(d(d(psi)))
            worst = max(worst, r.value_norm())
    return worst


def hj_momenta_identities(px: complex, py: complex) -> tuple[float, float]:
    """``|H - (P^2 + Pbar^2)|`` and ``|L - i (P^2 - Pbar^2)|``."""
    H = 0.5 * (px * px - py * py)
    L = px * py
    P = 0.5 * (px - 1j * py)
    Pb = 0.5 * (px + 1j * py)
    return abs(H - (P * P + Pb * Pb)), abs(L - 1j * (P * P - Pb * Pb))
