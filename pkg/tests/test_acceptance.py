"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured value and
the tolerance it is judged against, then asserts.
"""
from pathlib import Path

import numpy as np
import pytest

from spin2d import expr as ex
from spin2d.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, main
from spin2d.clifford import (Signature, SpinElement, covering_map, dirac_condition_residual, gamma_set,
                             so_eta_residual, spinor_connection_commutator_form, spinor_connection_epsilon_form)
from spin2d.geometry import (FrameField, appendix_second_order_check, appendix_third_order_check, geometry_at,
                             random_spinor, ricci_identity_check, spin_covariance_check)
from spin2d.killing import KillingData, Region, integrability_check, killing_tensor_residual
from spin2d.separation import (LiouvilleMetric, d5_dirac_form_check, d5_frame, d5_g_source, d5_killing_data,
                               d5_translation_zeta, exponential_solution, hj_momenta_identities,
                               liouville_frame, liouville_killing_data, minkowski_complex_dirac,
                               separate_solve, z_form_apply)
from spin2d.symop import (DiracOperator, build_first_order, build_second_order, commutator_residual,
                          g_synthesized, operator_apply)

EUC, LOR = Signature.euclidean(), Signature.lorentzian()
SPHERE = FrameField.from_strings(EUC, "(1 + x^2 + y^2)/2", "0", "0", "(1 + x^2 + y^2)/2")
CONFIGS = Path(__file__).parent / "configs"
REGION = Region(-1, 1, -1, 1)

LIOUVILLE = {
    "lorentzian A=0 B=v^2+2": LiouvilleMetric.from_strings("0", "v^2 + 2", LOR),
    "euclidean A=u^2+1 B=cos(v)+2": LiouvilleMetric.from_strings("u^2 + 1", "cos(v) + 2", EUC),
    "lorentzian A=-(u^2+3) B=sin(v)": LiouvilleMetric.from_strings("-(u^2 + 3)", "sin(v)", LOR),
}
# integrability and the commutator need an ignorable coordinate, i.e. constant A
INTEGRABLE = {
    "lorentzian A=0 B=v^2+2": LIOUVILLE["lorentzian A=0 B=v^2+2"],
    "euclidean A=0 B=v^2+2": LiouvilleMetric.from_strings("0", "v^2 + 2", EUC),
    "euclidean A=1 B=cos(v)+2": LiouvilleMetric.from_strings("1", "cos(v) + 2", EUC),
}


@pytest.fixture
def verdict(capsys):
    def emit(n: int, title: str, checks: list[tuple[str, float, str, float]]):
        """``checks`` holds (label, measured, relation, bound) with relation "<", ">" or "=="."""
        cmp = {"<": lambda v, b: v < b, ">": lambda v, b: v > b, "==": lambda v, b: v == b}
        ok = all(cmp[rel](v, b) for _, v, rel, b in checks)
        parts = "; ".join(f"{label} = {v:.3g} ({rel} {b:g})" for label, v, rel, b in checks)
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {title}: {parts}")
        assert ok, parts
    return emit


def points(seed, n):
    return np.random.default_rng(seed).uniform(-1, 1, (n, 2))


def test_criterion_1_clifford(verdict):
    rng = np.random.default_rng(100)
    dirac = max(dirac_condition_residual(gamma_set(s)) for s in (EUC, LOR))
    hom = conn = 0.0
    for sig in (EUC, LOR):
        gs = gamma_set(sig)
        for _ in range(100):
            S = []
            for _ in range(2):
                t = rng.uniform(-1.5, 1.5)
                S.append(SpinElement(np.cos(t), np.sin(t), gs) if sig.eta == 1
                         else SpinElement(np.cosh(t), np.sinh(t), gs))
            l0, l1 = covering_map(S[0]), covering_map(S[1])
            hom = max(hom, np.max(np.abs(covering_map(S[0] @ S[1]) - l0 @ l1)), so_eta_residual(l0, sig))
            w = rng.normal()
            G = np.array([[0, w], [-w, 0]])
            conn = max(conn, np.max(np.abs(spinor_connection_commutator_form(G, gs)
                                           - spinor_connection_epsilon_form(G, gs))))
    verdict(1, "Clifford algebra", [("Dirac condition", dirac, "==", 0), ("covering map", hom, "<", 1e-12),
                                    ("connection forms", conn, "<", 1e-13)])


def test_criterion_2_identities(verdict):
    fixtures = [FrameField.cartesian(EUC), FrameField.cartesian(LOR), SPHERE,
                liouville_frame(LIOUVILLE["lorentzian A=0 B=v^2+2"])]
    rng = np.random.default_rng(101)
    worst = {"com1": 0.0, "com2": 0.0, "app2": 0.0, "app3": 0.0}
    for frame in fixtures:
        for x, y in points(102, 50):
            G = geometry_at(frame, (x, y), 5)
            psi = random_spinor(rng, G.point, 4)
            r1, r2 = ricci_identity_check(psi, G)
            worst["com1"] = max(worst["com1"], r1)
            worst["com2"] = max(worst["com2"], r2)
            worst["app2"] = max(worst["app2"], appendix_second_order_check(psi, G))
            worst["app3"] = max(worst["app3"], appendix_third_order_check(psi, G))
    verdict(2, "Ricci and symmetrization identities, 4 fixtures x 50 points",
            [(k, v, "<", 1e-7) for k, v in worst.items()])


def test_criterion_3_covariance(verdict):
    rng = np.random.default_rng(103)
    rot = (ex.parse("cos(x*y)"), ex.parse("sin(x*y)"))
    boost = (ex.parse("cosh(x + y^2)"), ex.parse("sinh(x + y^2)"))
    lor = liouville_frame(LIOUVILLE["lorentzian A=0 B=v^2+2"])
    r_rot = r_boost = 0.0
    for x, y in points(104, 20):
        psi = random_spinor(rng, (x, y), 4)
        r_rot = max(r_rot, spin_covariance_check(SPHERE, psi, rot, (x, y)))
        r_boost = max(r_boost, spin_covariance_check(lor, psi, boost, (x, y)))
    verdict(3, "spin covariance, 2 fixtures x 20 points",
            [("sphere rotation", r_rot, "<", 1e-8), ("Liouville boost", r_boost, "<", 1e-8)])


def _tensor_residual(frame, t, pt):
    G = geometry_at(frame, pt, 3)
    jets = [[ex.eval_jet(t[a][b], G.point, 3) for b in range(2)] for a in range(2)]
    return float(np.max(np.abs(killing_tensor_residual(jets, G))))


def test_criterion_4_killing(verdict):
    metric_res = liou = 0.0
    pert = np.inf
    for m in LIOUVILLE.values():
        frame = liouville_frame(m, REGION)
        kd = liouville_killing_data(m, region=REGION)
        eta = ((ex.parse("1"), ex.parse("0")), (ex.parse("0"), ex.parse(str(m.signature.eta))))
        t = kd.e_tensor
        perturbed = ((ex.BinOp("+", t[0][0], ex.parse("0.1*x")), t[0][1]), (t[1][0], t[1][1]))
        for x, y in points(105, 10):
            metric_res = max(metric_res, _tensor_residual(frame, eta, (x, y)))
            liou = max(liou, _tensor_residual(frame, t, (x, y)))
            pert = min(pert, _tensor_residual(frame, perturbed, (x, y)))
    for frame in (SPHERE, FrameField.cartesian(LOR)):
        eta = ((ex.parse("1"), ex.parse("0")), (ex.parse("0"), ex.parse(str(frame.signature.eta))))
        for x, y in points(106, 10):
            metric_res = max(metric_res, _tensor_residual(frame, eta, (x, y)))
    verdict(4, "Killing tensors", [("metric", metric_res, "<", 1e-9), ("Liouville tensor", liou, "<", 1e-9),
                                   ("perturbed (min)", pert, ">", 1e-3)])


def test_criterion_5_integrability(verdict):
    n = 21
    h = 2 / (n - 1)
    closed = path = fd = 0.0
    for m in INTEGRABLE.values():
        frame = liouville_frame(m, REGION)
        kd = liouville_killing_data(m, region=REGION)
        gf = integrability_check(kd.e_tensor, frame, REGION, n, n)
        closed = max(closed, gf.closedness)
        path = max(path, gf.path_difference)
        fd = max(fd, gf.fd_defining_residual())
    verdict(5, "integrability and g synthesis, 3 Liouville fixtures with constant A",
            [("closedness", closed, "<", 1e-6), ("path difference", path, "<", 1e-6),
             ("FD defining equation", fd, "<", 10 * h * h)])


def test_criterion_6_commutator(verdict):
    rng = np.random.default_rng(107)
    central = {}
    for name in ("lorentzian A=0 B=v^2+2", "euclidean A=1 B=cos(v)+2"):
        m = INTEGRABLE[name]
        frame = liouville_frame(m)
        kd = liouville_killing_data(m)
        D = DiracOperator(frame, 0.7)
        worst = 0.0
        for x, y in points(108, 10):
            K = build_second_order(kd, frame, (x, y), 5, g_source=g_synthesized())
            for _ in range(30):
                worst = max(worst, commutator_residual(K, D, random_spinor(rng, K.geometry.point, 4)))
        central[name] = worst
    first = 0.0
    for sig, third in ((EUC, ("-y", "x")), (LOR, ("y", "x"))):
        frame = FrameField.cartesian(sig)
        for zeta in (("1", "0"), ("0", "1"), third):
            z = (ex.parse(zeta[0]), ex.parse(zeta[1]))
            for x, y in points(109, 5):
                K = build_first_order(z, 0, 0, frame, (x, y), 4)
                first = max(first, commutator_residual(K, DiracOperator(frame, 1.1),
                                                       random_spinor(rng, K.geometry.point, 4)))
    m = LIOUVILLE["lorentzian A=0 B=v^2+2"]
    frame = liouville_frame(m)
    t = liouville_killing_data(m).e_tensor
    pert = KillingData(((ex.BinOp("+", t[0][0], ex.parse("0.1*x")), t[0][1]), (t[1][0], t[1][1])),
                       (ex.parse("0"), ex.parse("0")), (ex.parse("0"), ex.parse("0")), 0, ex.parse("0"))
    neg = np.inf
    for x, y in [(0.5, 0.3), (-0.4, 0.6), (0.8, -0.2)]:
        K = build_second_order(pert, frame, (x, y), 5)
        neg = min(neg, commutator_residual(K, DiracOperator(frame, 0.7), random_spinor(rng, K.geometry.point, 4)))
    checks = [(f"[K,D] {k}", v, "<", 1e-8) for k, v in central.items()]
    checks += [("flat first-order", first, "<", 1e-9), ("perturbed (min)", neg, ">", 1e-3)]
    verdict(6, "commutator [K, D] psi", checks)


def test_criterion_7_separation(verdict):
    rng = np.random.default_rng(110)
    form = max(d5_dirac_form_check(LiouvilleMetric.from_strings("0", "v^2 + 2", s), points(111, 5), rng)
               for s in (EUC, LOR))
    m = LIOUVILLE["lorentzian A=0 B=v^2+2"]
    sols = [separate_solve(m, 1, 1j, (-1.0, 1.0), 0.1 / 2 ** j) for j in range(3)]
    res = []
    for s in sols:
        rows = np.searchsorted(s.ys, [-0.5, 0.0, 0.5])
        res.append(s.dirac_residuals([0.0, 0.4], rows).max())
    ratios = [res[0] / res[1], res[1] / res[2]]
    kres = max(s.k_residual([0.0, 0.3, -0.7]) for s in sols)
    fr = d5_frame(m)
    square = 0.0
    for x, y in points(112, 5):
        K = build_second_order(d5_killing_data(m), fr, (x, y), 5, g_source=d5_g_source(m))
        L = build_first_order(d5_translation_zeta(m), 0, 0, fr, (x, y), 5)
        psi = random_spinor(rng, K.geometry.point, 4)
        diff = operator_apply(K, psi) - operator_apply(L, operator_apply(L, psi))
        square = max(square, diff.truncate(1).max_abs())
    verdict(7, "D5 separation", [("operator form", form, "<", 1e-9),
                                 ("|ratio h/(h/2) - 16|", max(abs(r - 16) for r in ratios), "<", 16 * 0.2),
                                 ("K psi - kappa^2 psi", kres, "<", 1e-10), ("K - L^2", square, "<", 1e-10)])


def test_criterion_8_complex(verdict):
    rng = np.random.default_rng(113)
    zform = minkowski_complex_dirac(rng, points(114, 5), 5).residual
    fam = 0.0
    for _ in range(50):
        p = complex(*rng.uniform(-1, 1, 2))
        lam = complex(*rng.uniform(0.5, 2, 2))
        psi, q = exponential_solution(p, lam, tuple(rng.uniform(-1, 1, 2)))
        fam = max(fam, (z_form_apply(psi) - psi.truncate(2) * lam).value_norm(), abs(p * p + q * q + lam * lam))
    hj = max(max(hj_momenta_identities(complex(a, b), complex(c, d))) for a, b, c, d in rng.normal(size=(1000, 4)))
    verdict(8, "Minkowski complex separation", [("z-form", zform, "<", 1e-10),
                                                ("exponential family", fam, "<", 1e-10), ("H/L identities", hj, "<", 1e-13)])


def test_criterion_9_cli(verdict, capsys, tmp_path):
    def run(name, *flags):
        code = main(["verify", str(CONFIGS / name), *flags])
        return code, capsys.readouterr().out

    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("liouville_pass.cfg", "--out", str(a))
    run("liouville_pass.cfg", "--out", str(b))
    same_file = a.read_bytes() == b.read_bytes()
    same_lines = run("liouville_perturbed.cfg", "--json")[1] == run("liouville_perturbed.cfg", "--json")[1]
    codes = (run("liouville_pass.cfg")[0], run("liouville_perturbed.cfg")[0], run("parse_fail.cfg")[0])
    expected = (EXIT_PASS, EXIT_FAIL, EXIT_CONFIG)
    verdict(9, f"CLI determinism and exit codes {codes} (expected {expected})",
            [("report mismatch", float(not (same_file and same_lines)), "==", 0),
             ("exit code mismatches", float(sum(c != e for c, e in zip(codes, expected))), "==", 0)])
