"""Acceptance criteria 1-10.

Each test prints one ``PASS``/``FAIL`` line (also collected into the
terminal summary) and then asserts at the stated tolerance.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from qcalab.cayley import Word, cayley_ball, homogeneity_path_check, petersen_graph, apply_word, z2_presentation
from qcalab.errors import DegenerateFitError
from qcalab.kspace import (
    BrillouinZone,
    dispersion,
    interpolating_hamiltonian,
    isotropy_check,
    small_k_residual_fit,
    unitarity_report,
)
from qcalab.lattice import (
    PacketSpec,
    centroid_velocity,
    discrimination_error,
    random_field,
    step_direct,
    step_spectral,
)
from qcalab.maxwell import conjugation_rotation_check, deviation_scan, maxwell_residual
from qcalab.models import (
    DiracParams,
    WeylVariant,
    all_weyl_variants,
    dirac_isotropy_group,
    dirac_rule,
    target_dirac_hamiltonian,
    target_weyl_hamiltonian,
    weyl_isotropy_group,
    weyl_rule,
)

MASSES = (0.0, 0.3, 0.6, 1.0)
SMALL_K = np.geomspace(1e-3, 1e-1, 9)


def _report(n, title, ok, detail, elapsed, budget):
    ok = ok and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title}: {detail} ({elapsed:.1f}s / {budget:.0f}s)"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def _all_rules():
    rules = [weyl_rule(v) for v in all_weyl_variants()]
    rules += [weyl_rule(WeylVariant(2, theta=t)) for t in (0.4, -1.3)]
    for base in (WeylVariant(1), WeylVariant(2), WeylVariant(3), WeylVariant(3, "-", "B")):
        rules += [dirac_rule(DiracParams(m, base)) for m in MASSES]
    return rules


def test_01_unitarity():
    t0 = time.perf_counter()
    worst = 0.0
    rules = _all_rules()
    for rule in rules:
        rep = unitarity_report(rule, 1e-12)
        worst = max(worst, rep.cond1, rep.cond2_max)
    ok = _report(1, "unitarity", worst <= 1e-12, f"{len(rules)} rules, worst residual {worst:.2e}",
                 time.perf_counter() - t0, 5)
    assert ok


def test_02_isotropy():
    t0 = time.perf_counter()
    worst, transitive = 0.0, True
    cases = [(weyl_rule(v), weyl_isotropy_group(v)) for v in all_weyl_variants() if v.dim > 1]
    for m in MASSES:
        p = DiracParams(m)
        cases.append((dirac_rule(p), dirac_isotropy_group(p)))
    for rule, group in cases:
        rep = isotropy_check(rule, group, 1e-12)
        worst = max(worst, rep.worst_residual)
        transitive &= rep.transitive and rep.closed and rep.faithful
        assert len(group.elements) == (4 if rule.dim == 3 else 2)
    ok = _report(2, "isotropy", worst <= 1e-12 and transitive,
                 f"worst residual {worst:.2e}, transitive on S+: {transitive}",
                 time.perf_counter() - t0, 5)
    assert ok


def test_03_dispersion():
    t0 = time.perf_counter()
    worst = 0.0

    def check(rule, expected):
        nonlocal worst
        ks = BrillouinZone(rule.lattice).sample(1000, np.random.default_rng(rule.s + rule.dim))
        om = dispersion(rule, ks)
        exp = expected(ks)
        half = rule.s // 2
        worst = max(worst, np.abs(_wrap(om[:, half:] - exp[:, None])).max(),
                    np.abs(_wrap(om[:, :half] + exp[:, None])).max())

    for v in all_weyl_variants():
        def u_closed(ks, v=v):
            c, s = np.cos(ks / math.sqrt(v.dim)), np.sin(ks / math.sqrt(v.dim))
            if v.dim == 3:
                sign = 1 if v.chirality == "+" else -1
                return c.prod(1) + sign * s.prod(1)
            return c.prod(1)
        if v.dim == 1:
            check(weyl_rule(v), lambda ks: np.abs(ks[:, 0]))
        else:
            check(weyl_rule(v), lambda ks, u=u_closed: np.arccos(np.clip(u(ks), -1, 1)))
    for m in MASSES:
        n = math.sqrt(1 - m * m)
        cube = lambda ks: np.cos(ks / math.sqrt(3)).prod(1) + np.sin(ks / math.sqrt(3)).prod(1)
        check(dirac_rule(DiracParams(m)), lambda ks, n=n: np.arccos(np.clip(n * cube(ks), -1, 1)))
    ok = _report(3, "closed-form dispersion", worst <= 1e-10, f"worst residual {worst:.2e} at 10^3 points",
                 time.perf_counter() - t0, 10)
    assert ok


def test_04_small_k_limit():
    t0 = time.perf_counter()
    slopes = {}
    ok = True
    for v in all_weyl_variants():
        rule = weyl_rule(v)
        target = lambda k, v=v: target_weyl_hamiltonian(v.dim, k, v)
        try:
            fit = small_k_residual_fit(rule, target, SMALL_K, rng=np.random.default_rng(1))
        except DegenerateFitError as e:
            # H_I equals the target identically: the residual sits at round-off
            assert np.max(e.residuals) < 1e-13
            slopes[v.label] = "exact"
            continue
        slopes[v.label] = round(fit.slope, 3)
        ok &= abs(fit.slope - 2.0) <= 0.2
    for m in (0.0, 0.01, 0.05, 0.1):
        rule = dirac_rule(DiracParams(m))
        target = lambda k, m=m: target_dirac_hamiltonian(3, k, m)
        fit = small_k_residual_fit(rule, target, SMALL_K, rng=np.random.default_rng(2), subtract_offset=True)
        slopes[f"dirac m={m}"] = round(fit.slope, 3)
        ok &= abs(fit.slope - 2.0) <= 0.2
    detail = ", ".join(f"{k} {s}" for k, s in slopes.items())
    ok = _report(4, "small-k limit (slope 2.0 ± 0.2)", ok, detail, time.perf_counter() - t0, 30)
    assert ok


def test_05_direct_equals_spectral():
    t0 = time.perf_counter()
    worst = 0.0
    rules = _all_rules()
    shapes = {1: (12,), 2: (6, 6), 3: (4, 4, 4)}
    rng = np.random.default_rng(5)
    for rule in rules:
        for _ in range(100):
            f = random_field(shapes[rule.dim], rule.s, rng)
            worst = max(worst, float(np.abs(step_direct(rule, f).data - step_spectral(rule, f).data).max()))
    ok = _report(5, "direct vs spectral stepping", worst <= 1e-12,
                 f"{len(rules)} rules x 100 fields, worst {worst:.2e}", time.perf_counter() - t0, 60)
    assert ok


def test_06_transport():
    t0 = time.perf_counter()
    w1 = weyl_rule(WeylVariant(1))
    v1 = [centroid_velocity(w1, PacketSpec((k,), 0.05, spinor=(1, 0)), 60, (512,))[0]
          for k in (-2.8, -1.5, -0.4, 0.2, 0.9, 2.0, 3.0)]
    v1 += [centroid_velocity(w1, PacketSpec((k,), 0.05), 60, (512,))[0] for k in (0.4, 1.7)]
    err1 = max(abs(v - 1) for v in v1)
    frozen = centroid_velocity(dirac_rule(DiracParams(1.0)), PacketSpec((0.3, 0, 0), 0.15), 30, (32, 32, 32))
    err_m = float(np.abs(frozen).max())
    v3 = centroid_velocity(weyl_rule(WeylVariant(3)), PacketSpec((0.6, 0, 0), 0.04), 40, (96, 96, 96))
    err3 = abs(np.linalg.norm(v3) - 1 / math.sqrt(3))
    ok = err1 <= 1e-3 and err_m <= 1e-3 and err3 <= 1e-2
    detail = f"d=1 |v-1| {err1:.1e}, dirac m=1 |v| {err_m:.1e}, d=3 ||v|-1/√3| {err3:.1e}"
    ok = _report(6, "wave-packet transport", ok, detail, time.perf_counter() - t0, 120)
    assert ok


def test_07_petersen():
    t0 = time.perf_counter()
    g = petersen_graph()
    w = g.word("brrbr")
    end1, end2 = apply_word(g, 1, w), apply_word(g, 2, w)
    split = end1 == 1 and end2 == 3 and not homogeneity_path_check(g, w, [1, 2]).uniform
    p = z2_presentation()
    ball = cayley_ball(p, 14)
    inner = [v for v, x in ball.positions.items() if abs(x[0]) + abs(x[1]) <= 6]
    rng = np.random.default_rng(7)
    uniform = 0
    for _ in range(1000):
        n = int(rng.integers(0, 9))
        word = Word(tuple(zip(rng.integers(0, 2, n).tolist(), rng.choice([-1, 1], n).tolist())))
        uniform += homogeneity_path_check(ball, word, inner).uniform
    ok = _report(7, "Petersen counterexample", split and uniform == 1000,
                 f"brrbr: 1->{end1}, 2->{end2}; Z^2 words uniform {uniform}/1000",
                 time.perf_counter() - t0, 5)
    assert ok


def test_08_rotation_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    rot = trans = 0.0
    for v in (WeylVariant(3, c, f) for c in "+-" for f in "AB"):
        for _ in range(100):
            k = BrillouinZone("bcc").sample(1, rng)[0]
            t = int(rng.integers(0, 11))
            rot = max(rot, conjugation_rotation_check(v, k, t).deviation)
            trans = max(trans, maxwell_residual(v, k, [float(t)], rng=rng).transversality)
    ok = _report(8, "rotation identity", rot <= 1e-12 and trans <= 1e-12,
                 f"rotation {rot:.2e}, transversality {trans:.2e}", time.perf_counter() - t0, 10)
    assert ok


def test_09_bosonic_statistics():
    t0 = time.perf_counter()
    rows = deviation_scan((2, 4, 6), (0, 1, 2), cap=12)
    dev = {(n, m): d for n, m, d in rows}
    zero = max(dev[n, 0] for n in (2, 4, 6))
    decreasing = all(dev[2, m] > dev[4, m] > dev[6, m] for m in (1, 2))
    detail = ", ".join(f"N={n} M={m}: {d:.4f}" for (n, m), d in sorted(dev.items()))
    ok = _report(9, "emergent bosonic statistics", zero <= 1e-12 and decreasing, detail,
                 time.perf_counter() - t0, 120)
    assert ok


def test_10_discrimination():
    t0 = time.perf_counter()
    rule = weyl_rule(WeylVariant(3))
    self_target = lambda k: interpolating_hamiltonian(rule, k)
    k0 = np.array([1.0, 0.4, -0.3])
    k0 *= 1e-3 / np.linalg.norm(k0)
    spec = PacketSpec(tuple(k0), 1e-4)
    p_self = discrimination_error(rule, self_target, spec, 100)
    target = lambda k: target_weyl_hamiltonian(3, k)
    p = discrimination_error(rule, target, spec, 100)
    ok = p_self == 0.5 and abs(p - 0.5) <= 1e-4
    ok = _report(10, "discrimination", ok, f"self p_e {p_self}, |k0|=1e-3 T=100: 1/2 - p_e = {0.5 - p:.2e}",
                 time.perf_counter() - t0, 60)
    assert ok
