"""Batch verification driver.

Usage::

    spin2d verify <config> [--json] [--seed N] [--grid-refine K] [--out report.json]
    spin2d separate <config> --csv out.csv

Config files hold ``key = value`` lines (``#`` starts a comment, strings are
quoted).  Exit codes: 0 all tasks pass, 1 some task fails, 2 config or
expression syntax error, 3 runtime singularity.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from . import clifford as cl
from . import expr as ex
from .geometry import (FrameField, GeometryError, appendix_second_order_check, appendix_third_order_check,
                       geometry_at, random_spinor, ricci_identity_check, spin_covariance_check)
from .jets import JetError
from .killing import (GField, IntegrabilityError, KillingData, Region, integrability_check,
                      killing_tensor_residual, killing_vector_residual)
from .separation import (LIOUVILLE_ALIASES, LiouvilleMetric, SeparationError, d5_dirac_form_check, d5_frame, exponential_solution,
                         hj_momenta_identities, liouville_frame, liouville_killing_data, minkowski_complex_dirac,
                         separate_solve, z_commuting_residual, z_form_apply)
from .symop import DiracOperator, commutator_at, first_order_at, g_from_expr, g_synthesized, second_order_at

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_SINGULAR = 0, 1, 2, 3

TASK_ORDER = (
    "gamma-check", "ricci-identities", "appendix-identities", "spin-covariance", "killing-vector",
    "killing-tensor", "integrability", "commutator", "d5-form", "separate-solve", "minkowski-complex",
    "hj-identities",
)
DEFAULT_TOL = {
    "gamma-check": 1e-12, "ricci-identities": 1e-7, "appendix-identities": 1e-7, "spin-covariance": 1e-8,
    "killing-vector": 1e-9, "killing-tensor": 1e-9, "integrability": 1e-6, "commutator": 1e-8,
    "d5-form": 1e-9, "separate-solve": 1e-6, "minkowski-complex": 1e-10, "hj-identities": 1e-13,
}


class ConfigError(ValueError):
    pass


class TaskSingularity(RuntimeError):
    def __init__(self, task: str, where, cause: Exception):
        super().__init__(f"task {task}: singular at {where}: {cause}")
        self.task = task
        self.where = where


# --------------------------------------------------------------------------
# config

_LINE = re.compile(r"^\s*([A-Za-z_][\w.\-]*)\s*=\s*(.*?)\s*$")


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw
        if '"' not in line:
            line = line.split("#", 1)[0]
        elif line.lstrip().startswith("#"):
            continue
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"line {n}: expected 'key = value': {raw.strip()!r}")
        key, val = m.group(1), m.group(2)
        if val.startswith('"'):
            end = val.find('"', 1)
            if end < 0:
                raise ConfigError(f"line {n}: unterminated string")
            rest = val[end + 1:].strip()
            if rest and not rest.startswith("#"):
                raise ConfigError(f"line {n}: trailing text after string")
            val = val[1:end]
        elif "#" in val:
            val = val.split("#", 1)[0].strip()
        if not val:
            raise ConfigError(f"line {n}: empty value for {key}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key}")
        out[key] = val
    return out


@dataclass
class TaskSpec:
    name: str
    tolerance: float
    params: dict[str, str] = field(default_factory=dict)


@dataclass
class VerificationConfig:
    signature: cl.Signature
    frame: FrameField
    liouville: Optional[LiouvilleMetric]
    killing: Optional[KillingData]
    region: Region
    nx: int
    ny: int
    tasks: list[TaskSpec]
    seed: int
    mass: complex


_KNOWN_PREFIXES = ("frame.", "liouville.", "killing.", "region.", "grid.", "task.")
_KNOWN_KEYS = {"signature", "seed", "mass", "tasks"}
_KILLING_KEYS = ("e11", "e12", "e22", "alpha1", "alpha2", "zeta1", "zeta2", "A", "g")


def _num(kv, key, default, cast=float):
    if key not in kv:
        return default
    try:
        return cast(kv[key])
    except ValueError:
        raise ConfigError(f"{key}: cannot read {kv[key]!r} as {cast.__name__}") from None


_EXPR_KEYS = {"liouville.A", "liouville.B"} | {f"frame.{k}" for k in ("ex1", "ex2", "ey1", "ey2")} \
    | {f"killing.{k}" for k in _KILLING_KEYS if k != "A"}


def _check_expressions(kv: dict[str, str]) -> None:
    # parse every expression up front so a syntax error names its key
    for key in sorted(_EXPR_KEYS & kv.keys()):
        if key == "killing.g" and kv[key].strip() == "synthesize":
            continue
        try:
            ex.parse(kv[key], LIOUVILLE_ALIASES)
        except ex.ExprSyntaxError as exc:
            raise ex.ExprSyntaxError(f"{key} = {kv[key]!r}: {str(exc).rsplit(' at offset', 1)[0]}",
                                     exc.offset, kv[key]) from None


def build_config(kv: dict[str, str]) -> VerificationConfig:
    for key in kv:
        if key not in _KNOWN_KEYS and not key.startswith(_KNOWN_PREFIXES):
            raise ConfigError(f"unknown key {key}")
    _check_expressions(kv)
    try:
        sig = cl.Signature.parse(kv.get("signature", "euclidean"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    region = Region(_num(kv, "region.x_min", -0.5), _num(kv, "region.x_max", 0.5),
                    _num(kv, "region.y_min", -0.5), _num(kv, "region.y_max", 0.5))
    nx, ny = _num(kv, "grid.nx", 3, int), _num(kv, "grid.ny", 3, int)
    if nx < 2 or ny < 2:
        raise ConfigError("grid must be at least 2x2")
    liou = None
    fkeys = [k for k in kv if k.startswith("frame.")]
    lkeys = [k for k in kv if k.startswith("liouville.")]
    if fkeys and lkeys:
        raise ConfigError("give either frame.* or liouville.*, not both")
    if lkeys:
        try:
            liou = LiouvilleMetric.from_strings(kv.get("liouville.A", "0"), kv.get("liouville.B", "1"), sig)
        except SeparationError as exc:
            raise ConfigError(str(exc)) from None
        kind = kv.get("liouville.frame", "diagonal")
        if kind == "diagonal":
            frame = liouville_frame(liou, region)
        elif kind == "d5":
            frame = d5_frame(liou)
        else:
            raise ConfigError(f"liouville.frame must be 'diagonal' or 'd5', got {kind!r}")
    elif fkeys:
        allow = kv.get("frame.complex", "false").lower() == "true"
        try:
            frame = FrameField.from_strings(sig, kv.get("frame.ex1", "1"), kv.get("frame.ex2", "0"),
                                            kv.get("frame.ey1", "0"), kv.get("frame.ey2", "1"), allow_complex=allow)
        except KeyError as exc:
            raise ConfigError(f"missing frame component {exc}") from None
    else:
        frame = FrameField.cartesian(sig)
    kd = None
    kkeys = {k.split(".", 1)[1]: v for k, v in kv.items() if k.startswith("killing.")}
    if kkeys:
        bad = set(kkeys) - set(_KILLING_KEYS)
        if bad:
            raise ConfigError(f"unknown killing keys {sorted(bad)}")
        try:
            A = complex(kkeys.pop("A", "0").replace("i", "j"))
        except ValueError:
            raise ConfigError("killing.A must be a complex constant") from None
        kd = KillingData.from_strings(**kkeys, A_const=A, aliases=LIOUVILLE_ALIASES)
    elif "liouville.A" in kv or "liouville.B" in kv:
        if kv.get("liouville.frame", "diagonal") == "diagonal":
            kd = liouville_killing_data(liou, region=region)
    names = [t.strip() for t in kv.get("tasks", "").split(",") if t.strip()]
    if not names:
        raise ConfigError("no tasks given")
    for n in names:
        if n not in TASK_ORDER:
            raise ConfigError(f"unknown task {n!r}")
    for key in kv:
        if key.startswith("task."):
            tname = key.split(".")[1]
            if tname not in TASK_ORDER:
                raise ConfigError(f"unknown task {tname!r} in {key}")
    tasks = []
    for n in sorted(set(names), key=TASK_ORDER.index):
        pre = f"task.{n}."
        params = {k[len(pre):]: v for k, v in kv.items() if k.startswith(pre)}
        tol = _num(params, "tolerance", DEFAULT_TOL[n])
        params.pop("tolerance", None)
        tasks.append(TaskSpec(n, tol, params))
    try:
        mass = complex(kv.get("mass", "0").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"mass: cannot read {kv['mass']!r}") from None
    return VerificationConfig(sig, frame, liou, kd, region, nx, ny, tasks, _num(kv, "seed", 0, int), mass)


def load_config(path: str) -> VerificationConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return build_config(parse_config_text(text))


# --------------------------------------------------------------------------
# tasks


@dataclass
class TaskResult:
    name: str
    residual: float
    where: Optional[list]
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)


class _Worst:
    def __init__(self):
        self.value = 0.0
        self.where = None

    def update(self, r: float, where):
        r = float(r)
        if r > self.value or self.where is None:
            self.value, self.where = r, [float(np.real(where[0])), float(np.real(where[1]))] \
                if where is not None else None


@dataclass
class Context:
    cfg: VerificationConfig
    rng: np.random.Generator
    refine: int
    task: str = ""

    def points(self, refine: int = 1):
        xs, ys = self.cfg.region.grid((self.cfg.nx - 1) * refine + 1, (self.cfg.ny - 1) * refine + 1)
        return [(float(x), float(y)) for x in xs for y in ys]

    def param(self, spec: TaskSpec, key: str, default, cast=float):
        return _num(spec.params, key, default, cast)

    def need_killing(self) -> KillingData:
        if self.cfg.killing is None:
            raise ConfigError(f"task {self.task} needs killing.* data")
        return self.cfg.killing

    def need_liouville(self) -> LiouvilleMetric:
        if self.cfg.liouville is None:
            raise ConfigError(f"task {self.task} needs liouville.* data")
        return self.cfg.liouville


def _geom(ctx: Context, pt, order: int):
    try:
        return geometry_at(ctx.cfg.frame, pt, order)
    except (GeometryError, JetError, ex.ExprEvalError) as exc:
        raise TaskSingularity(ctx.task, pt, exc) from exc


def task_gamma_check(ctx: Context, spec: TaskSpec):
    sig = ctx.cfg.signature
    gs = cl.gamma_set(sig)
    w = _Worst()
    w.update(cl.dirac_condition_residual(gs), None)
    hom = 0.0
    for _ in range(int(ctx.param(spec, "samples", 100))):
        S = [_random_spin(ctx.rng, gs) for _ in range(2)]
        l0, l1, l01 = cl.covering_map(S[0]), cl.covering_map(S[1]), cl.covering_map(S[0] @ S[1])
        hom = max(hom, float(np.max(np.abs(l01 - l0 @ l1))), cl.so_eta_residual(l0, sig))
        # S gamma_b S^-1 = gamma_a l^a_b
        for b in range(2):
            lhs = S[0].matrix @ gs.gamma_down[b] @ S[0].inverse.matrix
            rhs = sum(gs.gamma_down[a] * l0[a, b] for a in range(2))
            hom = max(hom, float(np.max(np.abs(lhs - rhs))))
        G = ctx.rng.normal(size=(2, 2))
        G = G - G.T
        conn = np.max(np.abs(cl.spinor_connection_commutator_form(G, gs) - cl.spinor_connection_epsilon_form(G, gs)))
        hom = max(hom, float(conn))
    w.update(hom, None)
    return w, {"dirac_condition": cl.dirac_condition_residual(gs), "covering_and_connection": hom}


def _random_spin(rng, gs) -> cl.SpinElement:
    t = rng.uniform(-1.5, 1.5)
    if gs.eta == 1:
        return cl.SpinElement(np.cos(t), np.sin(t), gs)
    return cl.SpinElement(np.cosh(t), np.sinh(t), gs)


def _spinor_loop(ctx: Context, spec: TaskSpec, order: int, fn: Callable) -> _Worst:
    w = _Worst()
    n = int(ctx.param(spec, "spinors", 2))
    for pt in ctx.points():
        G = _geom(ctx, pt, order)
        for _ in range(n):
            w.update(fn(G, random_spinor(ctx.rng, G.point, 4)), pt)
    return w


def task_ricci(ctx: Context, spec: TaskSpec):
    return _spinor_loop(ctx, spec, 5, lambda G, psi: max(ricci_identity_check(psi, G))), {}


def task_appendix(ctx: Context, spec: TaskSpec):
    return _spinor_loop(ctx, spec, 5, lambda G, psi: max(appendix_second_order_check(psi, G),
                                                         appendix_third_order_check(psi, G))), {}


def task_spin_covariance(ctx: Context, spec: TaskSpec):
    angle = spec.params.get("angle", "0.3*x*y + 0.2*x")
    if ctx.cfg.signature.eta == 1:
        phi = (f"cos({angle})", f"sin({angle})")
    else:
        phi = (f"cosh({angle})", f"sinh({angle})")
    phi = (ex.parse(phi[0]), ex.parse(phi[1]))
    w = _Worst()
    for pt in ctx.points():
        for _ in range(int(ctx.param(spec, "spinors", 2))):
            try:
                r = spin_covariance_check(ctx.cfg.frame, random_spinor(ctx.rng, pt, 4), phi, pt)
            except (GeometryError, JetError, ex.ExprEvalError) as exc:
                raise TaskSingularity(ctx.task, pt, exc) from exc
            w.update(r, pt)
    return w, {"angle": angle}


def task_killing_vector(ctx: Context, spec: TaskSpec):
    kd = ctx.need_killing()
    w = _Worst()
    for pt in ctx.points():
        G = _geom(ctx, pt, 3)
        for v in (kd.alpha_jets(G.point, 3), kd.zeta_jets(G.point, 3)):
            w.update(np.max(np.abs(killing_vector_residual(v, G))), pt)
    return w, {}


def task_killing_tensor(ctx: Context, spec: TaskSpec):
    kd = ctx.need_killing()
    w = _Worst()
    for pt in ctx.points():
        G = _geom(ctx, pt, 3)
        w.update(np.max(np.abs(killing_tensor_residual(kd.tensor_jets(G.point, 3), G))), pt)
    return w, {}


def _gfield(ctx: Context, kd: KillingData, refine: int, tol: float) -> GField:
    nx, ny = (ctx.cfg.nx - 1) * refine + 1, (ctx.cfg.ny - 1) * refine + 1
    nx = max(nx, int(ctx.cfg.nx))
    try:
        return integrability_check(kd.e_tensor, ctx.cfg.frame, ctx.cfg.region, nx, ny, tol=tol)
    except (GeometryError, JetError, ex.ExprEvalError) as exc:
        raise TaskSingularity(ctx.task, None, exc) from exc


def task_integrability(ctx: Context, spec: TaskSpec):
    kd = ctx.need_killing()
    w = _Worst()
    try:
        f = _gfield(ctx, kd, 1, spec.tolerance)
    except IntegrabilityError as exc:
        w.update(exc.residual, exc.where)
        return w, {"closed": False}
    h = max(f.xs[1] - f.xs[0], f.ys[1] - f.ys[0])
    fd = f.fd_defining_residual()
    w.update(f.closedness, f.closedness_where)
    if f.path_difference > w.value:
        w.update(f.path_difference, None)
    details = {"closedness": f.closedness, "path_difference": f.path_difference,
               "fd_residual": fd, "fd_bound": 10 * h * h}
    # NaN when the grid has no interior node
    details["fd_bound_violated"] = bool(fd > 10 * h * h)
    if ctx.refine > 1:
        f2 = _gfield(ctx, kd, ctx.refine, spec.tolerance)
        fd2 = f2.fd_defining_residual()
        details["refined_fd_residual"] = fd2
        details["refine_ratio"] = fd / fd2 if fd2 > 0 and np.isfinite(fd) else None
    return w, details


def task_commutator(ctx: Context, spec: TaskSpec):
    kd = ctx.need_killing()
    D = DiracOperator(ctx.cfg.frame, ctx.cfg.mass)
    n = int(ctx.param(spec, "spinors", 3))
    w = _Worst()
    order = 1 if kd.is_first_order() else 2
    g_source = None
    details = {"order": order}
    if order == 2 and kd.synthesize_g:
        try:
            g_source = g_synthesized(_gfield(ctx, kd, 1, 1e-6))
        except IntegrabilityError as exc:
            # no g exists; the commutator is still measured (with g = 0) so the
            # report locates the worst point, and the task cannot pass
            g_source = g_from_expr(ex.Num(0j))
            details["integrability"] = {"closedness": exc.residual, "where": exc.where}
    for pt in ctx.points():
        G = _geom(ctx, pt, 5)
        try:
            if order == 2:
                K = second_order_at(kd, G, g_source)
            else:
                if kd.synthesize_g:
                    g = 0.0
                elif ex.variables(kd.g_scalar):
                    raise ConfigError("first-order operators need a constant killing.g")
                else:
                    g = ex.evaluate(kd.g_scalar, 0, 0)
                K = first_order_at(kd.zeta, kd.A_const, g, G)
            for _ in range(n):
                w.update(commutator_at(K, random_spinor(ctx.rng, G.point, 4), D.mass).value_norm(), pt)
        except (JetError, ex.ExprEvalError) as exc:
            raise TaskSingularity(ctx.task, pt, exc) from exc
    return w, details


def task_d5_form(ctx: Context, spec: TaskSpec):
    m = ctx.need_liouville()
    w = _Worst()
    for pt in ctx.points():
        try:
            r = d5_dirac_form_check(m, [pt], ctx.rng, int(ctx.param(spec, "spinors", 2)))
        except (GeometryError, JetError, ex.ExprEvalError) as exc:
            raise TaskSingularity(ctx.task, pt, exc) from exc
        except SeparationError as exc:
            raise ConfigError(f"task {ctx.task}: {exc}") from None
        w.update(r, pt)
    return w, {}


def _solve(ctx: Context, spec: TaskSpec, h: float):
    m = ctx.need_liouville()
    lam = complex(spec.params.get("lambda", "1").replace("i", "j"))
    kappa = complex(spec.params.get("kappa", "1i").replace("i", "j"))
    ratio = complex(spec.params.get("c_ratio", "1").replace("i", "j"))
    r = ctx.cfg.region
    try:
        return separate_solve(m, lam, kappa, (r.y_min, r.y_max), h, ratio, x0=r.x_min,
                              method=spec.params.get("method", "auto"))
    except (GeometryError, JetError, ex.ExprEvalError) as exc:
        raise TaskSingularity(ctx.task, None, exc) from exc


def task_separate_solve(ctx: Context, spec: TaskSpec):
    r = ctx.cfg.region
    span = r.y_max - r.y_min
    steps = int(ctx.param(spec, "steps", 40, int))
    try:
        sol = _solve(ctx, spec, span / steps)
    except SeparationError as exc:
        raise ConfigError(f"task {ctx.task}: {exc}") from None
    xs, _ = ctx.cfg.region.grid(ctx.cfg.nx, 2)
    idx = sol.interior()
    res = sol.dirac_residuals(xs, idx)
    p, q = np.unravel_index(np.argmax(res), res.shape)
    w = _Worst()
    w.update(res[p, q], (xs[p], sol.ys[idx[q]]))
    kres = sol.k_residual(xs)
    if kres > w.value:
        w.update(kres, None)
    details = {"mu1": [sol.mu1.real, sol.mu1.imag], "mu2": [sol.mu2.real, sol.mu2.imag],
               "method": sol.method, "k_residual": kres, "steps": steps}
    if ctx.refine > 1 and sol.method == "rk4":
        try:
            fine = _solve(ctx, spec, span / (steps * ctx.refine))
        except SeparationError as exc:
            raise ConfigError(f"task {ctx.task}: {exc}") from None
        # compare on coarse nodes that are interior for both tables
        common = [i for i in idx if (i * ctx.refine) in set(fine.interior())]
        rc = sol.dirac_residuals(xs, common).max()
        rf = fine.dirac_residuals(xs, [i * ctx.refine for i in common]).max()
        details["refine_ratio"] = rc / rf if rf > 0 else None
    return w, details


def task_minkowski(ctx: Context, spec: TaskSpec):
    w = _Worst()
    pts = ctx.points()
    res = minkowski_complex_dirac(ctx.rng, pts, 2).residual
    w.update(res, None)
    lam = complex(spec.params.get("lambda", "1.3").replace("i", "j"))
    fam = 0.0
    for pt in pts:
        p = complex(ctx.rng.uniform(-1, 1), ctx.rng.uniform(-1, 1))
        psi, _ = exponential_solution(p, lam, pt)
        fam = max(fam, (z_form_apply(psi) - psi.truncate(2) * lam).value_norm())
    comm = z_commuting_residual(ctx.rng, pts[0])
    w.update(max(res, fam, comm), None)
    return w, {"z_form": res, "exponential_family": fam, "commuting": comm}


def task_hj(ctx: Context, spec: TaskSpec):
    n = int(ctx.param(spec, "samples", 1000))
    z = ctx.rng.normal(size=(n, 4))
    w = _Worst()
    for a, b, c, d in z:
        w.update(max(hj_momenta_identities(complex(a, b), complex(c, d))), None)
    return w, {"samples": n}


TASKS: dict[str, Callable] = {
    "gamma-check": task_gamma_check,
    "ricci-identities": task_ricci,
    "appendix-identities": task_appendix,
    "spin-covariance": task_spin_covariance,
    "killing-vector": task_killing_vector,
    "killing-tensor": task_killing_tensor,
    "integrability": task_integrability,
    "commutator": task_commutator,
    "d5-form": task_d5_form,
    "separate-solve": task_separate_solve,
    "minkowski-complex": task_minkowski,
    "hj-identities": task_hj,
}


# --------------------------------------------------------------------------
# running and reporting


@dataclass
class Report:
    tasks: list[TaskResult]

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tasks)

    @property
    def exit_code(self) -> int:
        return EXIT_PASS if self.passed else EXIT_FAIL

    def to_json_lines(self) -> list[str]:
        return [json.dumps(asdict(t), sort_keys=True) for t in self.tasks]

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "tasks": [asdict(t) for t in self.tasks]},
                          sort_keys=True, indent=2)

    def table(self) -> str:
        rows = [f"{'task':<22}{'residual':>12}{'tolerance':>12}  {'status':<6} where"]
        for t in self.tasks:
            where = "-" if t.where is None else f"({t.where[0]:.4g}, {t.where[1]:.4g})"
            rows.append(f"{t.name:<22}{t.residual:>12.3e}{t.tolerance:>12.1e}  "
                        f"{'PASS' if t.passed else 'FAIL':<6} {where}")
        rows.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(rows)


def run(cfg: VerificationConfig, refine: int = 1) -> Report:
    results = []
    for spec in cfg.tasks:
        # one generator per task keeps results independent of which other tasks run
        ctx = Context(cfg, np.random.default_rng([cfg.seed, TASK_ORDER.index(spec.name)]), refine, spec.name)
        w, details = TASKS[spec.name](ctx, spec)
        passed = bool(np.isfinite(w.value) and w.value <= spec.tolerance)
        results.append(TaskResult(spec.name, w.value, w.where, spec.tolerance, passed, _jsonable(details)))
    return Report(results)


def _jsonable(d):
    if isinstance(d, dict):
        return {k: _jsonable(v) for k, v in d.items()}
    if isinstance(d, (list, tuple)):
        return [_jsonable(v) for v in d]
    if isinstance(d, (np.floating, np.integer)):
        d = d.item()
    if isinstance(d, float) and not np.isfinite(d):
        return None
    if isinstance(d, complex):
        return [d.real, d.imag]
    return d


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spin2d", description="Verify 2D Dirac symmetry operators numerically.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run the tasks of a config file")
    v.add_argument("config")
    v.add_argument("--json", action="store_true", help="one JSON object per task line")
    v.add_argument("--seed", type=int, default=None, help="override the config seed")
    v.add_argument("--grid-refine", type=int, default=1, metavar="K",
                   help="rerun grid-quadrature tasks at K times the resolution and report the ratio")
    v.add_argument("--out", default=None, help="write the full JSON report here")
    s = sub.add_parser("separate", help="export a separated solution table")
    s.add_argument("config")
    s.add_argument("--csv", required=True)
    return p


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "verify":
            if args.seed is not None:
                cfg.seed = args.seed
            if args.grid_refine < 1:
                raise ConfigError("--grid-refine must be >= 1")
            report = run(cfg, args.grid_refine)
        else:
            spec = next((t for t in cfg.tasks if t.name == "separate-solve"), None) \
                or TaskSpec("separate-solve", DEFAULT_TOL["separate-solve"])
            ctx = Context(cfg, np.random.default_rng(cfg.seed), 1, "separate-solve")
            r = cfg.region
            try:
                sol = _solve(ctx, spec, (r.y_max - r.y_min) / int(ctx.param(spec, "steps", 40, int)))
            except SeparationError as exc:
                raise ConfigError(str(exc)) from None
            sol.to_csv(args.csv)
            print(f"wrote {len(sol.ys)} rows to {args.csv}")
            return EXIT_PASS
    except ex.ExprSyntaxError as exc:
        _err(f"expression error: {exc}")
        return EXIT_CONFIG
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, (ex.ExprEvalError, GeometryError, SeparationError, JetError)):
            _err(f"singular: {exc}")
            return EXIT_SINGULAR
        _err(f"config error: {exc}")
        return EXIT_CONFIG
    except TaskSingularity as exc:
        _err(str(exc))
        return EXIT_SINGULAR
    if args.json:
        print("\n".join(report.to_json_lines()))
    else:
        print(report.table())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json() + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
