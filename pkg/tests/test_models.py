import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy import constants

from qcalab.errors import IllConditionedError, SingularPointError, SupportMismatchError
from qcalab.kspace import BrillouinZone, build_ak, dispersion, unitarity_report
from qcalab.models import (
    ALPHA,
    BCC,
    GAMMA,
    GAMMA0,
    I2,
    PAULI,
    SIGMA_X,
    SIGMA_Z,
    DiracParams,
    WeylVariant,
    all_weyl_variants,
    dirac_closed_form,
    dirac_rule,
    dispersion_closed_form,
    extract_transition_matrices,
    n_vector,
    planck_scale,
    planck_units,
    target_dirac_hamiltonian,
    target_weyl_hamiltonian,
    weyl_closed_form,
    weyl_rule,
    weyl_u_ntilde,
)

RNG = np.random.default_rng(11)


def _zone_points(v, n=1000):
    return BrillouinZone(v.lattice.name).sample(n, np.random.default_rng(n + v.dim))


# --- lattices and matrices ---------------------------------------------------------------

def test_bcc_generators():
    vecs = BCC.embedding @ BCC.coords.T
    assert np.allclose(np.linalg.norm(vecs, axis=0), 1.0)
    assert np.allclose(vecs.sum(axis=1), 0.0)
    expected = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)
    assert np.allclose(vecs.T, expected)


def test_gamma_algebra():
    gammas = [GAMMA0, *GAMMA]
    eta = np.diag([1, -1, -1, -1])
    for a in range(4):
        for b in range(4):
            anti = gammas[a] @ gammas[b] + gammas[b] @ gammas[a]
            assert np.allclose(anti, 2 * eta[a, b] * np.eye(4))


# --- Weyl rules ------------------------------------------------------------------------

@pytest.mark.parametrize("v", all_weyl_variants(), ids=lambda v: v.label)
def test_rule_reproduces_closed_form(v):
    rule = weyl_rule(v)
    ks = _zone_points(v)
    assert np.abs(build_ak(rule, ks) - weyl_closed_form(v, ks)).max() <= 1e-12


@pytest.mark.parametrize("chir", ["+", "-"])
def test_b_is_transpose_of_a(chir):
    ks = _zone_points(WeylVariant(3))
    a = weyl_closed_form(WeylVariant(3, chir, "A"), ks)
    b = weyl_closed_form(WeylVariant(3, chir, "B"), ks)
    assert np.abs(b - np.swapaxes(a, -1, -2)).max() < 1e-15


def test_weyl3d_ntilde_first_order_symbolic():
    # oracle: sympy series of the closed-form components along k=(√3 t,0,0)
    t = sympy.symbols("t")
    kx = sympy.sqrt(3) * t
    c = [sympy.cos(kx / sympy.sqrt(3)), 1, 1]
    s = [sympy.sin(kx / sympy.sqrt(3)), 0, 0]
    nx = s[0] * c[1] * c[2] - c[0] * s[1] * s[2]
    assert sympy.simplify(sympy.series(nx, t, 0, 2).removeO() - t) == 0
    for tv in (1e-3, 0.2, 1.1):
        _, n = weyl_u_ntilde(WeylVariant(3), np.array([math.sqrt(3) * tv, 0, 0]))
        assert np.allclose(n, [math.sin(tv), 0, 0], atol=1e-15)


def test_weyl1d_eigenprojectors():
    rule = weyl_rule(WeylVariant(1))
    p_plus, p_minus = np.diag([1, 0]), np.diag([0, 1])
    for k in (0.3, -1.7, 2.9):
        expected = np.exp(-1j * k) * p_plus + np.exp(1j * k) * p_minus
        assert np.abs(build_ak(rule, [k]) - expected).max() < 1e-14


def test_theta_family():
    ks = _zone_points(WeylVariant(2), 200)
    for th in (0.3, 1.2, -2.0):
        rot = math.cos(th) * I2 + 1j * math.sin(th) * SIGMA_X
        a0 = weyl_closed_form(WeylVariant(2), ks)
        at = weyl_closed_form(WeylVariant(2, theta=th), ks)
        assert np.abs(at - rot @ a0).max() < 1e-14
        assert unitarity_report(weyl_rule(WeylVariant(2, theta=th))).passed


def test_invalid_variants():
    with pytest.raises(ValueError):
        WeylVariant(4)
    with pytest.raises(ValueError):
        WeylVariant(2, "-")
    with pytest.raises(ValueError):
        WeylVariant(3, theta=0.1)


@pytest.mark.parametrize("v", [WeylVariant(3, c, f) for c in "+-" for f in "AB"], ids=lambda v: v.label)
def test_weyl3d_dispersion_formula(v):
    ks = _zone_points(v)
    c, s = np.cos(ks / math.sqrt(3)), np.sin(ks / math.sqrt(3))
    sign = 1 if v.chirality == "+" else -1
    expected = np.arccos(np.clip(c.prod(1) + sign * s.prod(1), -1, 1))
    om = dispersion(weyl_rule(v), ks)
    assert np.abs(om[:, 1] - expected).max() < 1e-10
    assert np.abs(om[:, 0] + expected).max() < 1e-10


# --- extraction ----------------------------------------------------------------------

def test_extraction_weyl1d():
    gens = {"h": np.array([1.0]), "h^-1": np.array([-1.0])}
    out = extract_transition_matrices(
        lambda ks: np.cos(ks[:, 0])[:, None, None] * I2 - 1j * np.sin(ks[:, 0])[:, None, None] * SIGMA_Z,
        gens,
    )
    assert np.abs(out["h"] - np.diag([1, 0])).max() < 1e-13
    assert np.abs(out["h^-1"] - np.diag([0, 1])).max() < 1e-13
    assert np.abs(out["e"]).max() < 1e-13


def test_extraction_dirac_identity_term():
    p = DiracParams(0.6)
    gens = BCC.generator_table()
    out = extract_transition_matrices(lambda ks: dirac_closed_form(p, ks), gens)
    assert np.abs(out["e"] - 1j * 0.6 * GAMMA0).max() < 1e-13
    assert np.abs(sum(out.values()) - dirac_closed_form(p, np.zeros(3))).max() < 1e-13


def test_extraction_support_mismatch():
    gens = {"h": np.array([1.0]), "h^-1": np.array([-1.0])}
    with pytest.raises(SupportMismatchError):
        extract_transition_matrices(lambda ks: np.exp(-2j * ks[:, 0])[:, None, None] * I2, gens)


def test_extraction_ill_conditioned():
    gens = {"h": np.array([1.0]), "g": np.array([1.0])}
    with pytest.raises(IllConditionedError):
        extract_transition_matrices(lambda ks: np.zeros((len(ks), 2, 2)), gens)


# --- Dirac ------------------------------------------------------------------------------

def test_dirac_massless_block_diagonal():
    rule = dirac_rule(DiracParams(0.0))
    ks = _zone_points(WeylVariant(3), 50)
    d = build_ak(rule, ks)
    w = weyl_closed_form(WeylVariant(3), ks)
    assert np.abs(d[:, :2, 2:]).max() == 0 and np.abs(d[:, 2:, :2]).max() == 0
    assert np.abs(d[:, 2:, 2:] - w).max() < 1e-13
    assert np.abs(d[:, :2, :2] - np.swapaxes(w.conj(), -1, -2)).max() < 1e-13


def test_dirac_n_from_m():
    assert DiracParams(0.6).n == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ValueError):
        DiracParams(1.5)
    with pytest.raises(ValueError):
        DiracParams(-0.1)


def test_dirac_rule_matches_closed_form():
    for m in (0.0, 0.3, 1.0):
        p = DiracParams(m)
        ks = _zone_points(WeylVariant(3), 200)
        assert np.abs(build_ak(dirac_rule(p), ks) - dirac_closed_form(p, ks)).max() < 1e-12


def test_dirac1d_two_identical_blocks():
    rule = dirac_rule(DiracParams(0.4, WeylVariant(1)))
    perm = [0, 2, 3, 1]
    for k in (0.2, -1.1, 2.5):
        d = build_ak(rule, [k])[np.ix_(perm, perm)]
        assert np.abs(d[:2, 2:]).max() < 1e-14 and np.abs(d[2:, :2]).max() < 1e-14
        assert np.abs(d[:2, :2] - d[2:, 2:]).max() < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_dirac_dispersion_formula(m, k):
    p = DiracParams(m)
    om = dispersion(dirac_rule(p), np.array(k))
    expected = dispersion_closed_form(p.variant, np.array(k), m)
    assert np.abs(om[2:] - expected).max() < 1e-6
    assert np.abs(om[:2] + expected).max() < 1e-6


# --- targets ---------------------------------------------------------------------------

def test_weyl_target_basics():
    assert np.abs(target_weyl_hamiltonian(3, np.zeros(3))).max() == 0
    assert np.abs(target_weyl_hamiltonian(1, [0.7]) - 0.7 * SIGMA_Z).max() < 1e-15
    for d in (1, 2, 3):
        k = RNG.normal(size=d)
        ev = np.linalg.eigvalsh(target_weyl_hamiltonian(d, k))
        assert np.allclose(ev, [-np.linalg.norm(k) / math.sqrt(d), np.linalg.norm(k) / math.sqrt(d)])


def test_dirac_target():
    m = 0.3
    assert np.abs(target_dirac_hamiltonian(3, np.zeros(3), m) - m * GAMMA0).max() < 1e-15
    assert np.allclose(np.linalg.eigvalsh(m * GAMMA0), [-m, -m, m, m])
    k = RNG.normal(size=3)
    n = math.sqrt(1 - m * m)
    e = math.sqrt(n * n * k @ k / 3 + m * m)
    assert np.allclose(np.linalg.eigvalsh(target_dirac_hamiltonian(3, k, m)), [-e, -e, e, e])
    h0 = target_dirac_hamiltonian(3, k, 0.0)
    sk = np.einsum("i,iab->ab", k, PAULI) / math.sqrt(3)
    assert np.abs(h0[:2, :2] + sk).max() < 1e-15 and np.abs(h0[2:, 2:] - sk).max() < 1e-15


# --- n vector ---------------------------------------------------------------------------

def test_n_vector_at_zero():
    nt, n, w = n_vector(WeylVariant(3), np.zeros(3))
    assert np.all(nt == 0) and np.all(n == 0) and w == 0


def test_n_vector_weyl1d():
    _, n, w = n_vector(WeylVariant(1), np.array([0.5]))
    assert np.allclose(n, [0, 0, 0.5], atol=1e-15)


@pytest.mark.parametrize("v", all_weyl_variants(), ids=lambda v: v.label)
def test_n_norm_is_omega(v):
    ks = _zone_points(v, 300)
    _, n, w = n_vector(v, ks)
    keep = w < math.pi - 1e-3
    assert np.abs(np.linalg.norm(n, axis=-1)[keep] - w[keep]).max() < 1e-12


def test_n_vector_series_overlap():
    v = WeylVariant(1)
    for k in np.geomspace(1.1e-6, 9e-4, 20):
        _, n_series, _ = n_vector(v, np.array([k]), series_tol=1e-3)
        _, n_direct, _ = n_vector(v, np.array([k]), series_tol=0.0)
        assert abs(n_series[2] - n_direct[2]) < 1e-10


def test_n_vector_singular_at_pi():
    with pytest.raises(SingularPointError):
        n_vector(WeylVariant(1), np.array([math.pi]))


def test_n_exponentiates_to_w():
    from scipy.linalg import expm

    v = WeylVariant(3, "-")
    for k in _zone_points(v, 20):
        _, n, w = n_vector(v, k)
        if w > 3.0:
            continue
        assert np.abs(expm(-1j * np.einsum("i,iab->ab", n, PAULI)) - weyl_closed_form(v, k)).max() < 1e-12


# --- units ---------------------------------------------------------------------------------

def test_natural_units():
    u = planck_units(a=1, tau=1, M=2.5)
    assert u.c == 1 and u.hbar == 2.5


def test_inversion_from_c_hbar_m():
    u = planck_units(c=3.0, hbar=6.0, M=0.5)
    assert u.a == pytest.approx(6.0 / (0.5 * 3.0), rel=1e-15)
    assert u.tau == pytest.approx(u.a / 3.0, rel=1e-15)


def test_inconsistent_units():
    with pytest.raises(ValueError):
        planck_units(a=1, tau=1, c=2, M=1)


def test_underdetermined_units():
    with pytest.raises(ValueError):
        planck_units(a=1, tau=1)


def test_planck_scale_matches_codata():
    u = planck_scale()
    lp = math.sqrt(constants.hbar * constants.G / constants.c ** 3)
    assert u.a == pytest.approx(lp, rel=1e-12)
    assert u.c == pytest.approx(u.a / u.tau, rel=1e-15)
    assert u.hbar == pytest.approx(u.M * u.a * u.c, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(*(st.floats(1e-3, 1e3) for _ in range(3)))
def test_units_round_trip(a, tau, m):
    u = planck_units(a=a, tau=tau, M=m)
    back = planck_units(c=u.c, hbar=u.hbar, M=u.M)
    assert back.a == pytest.approx(a, rel=1e-12) and back.tau == pytest.approx(tau, rel=1e-12)


@pytest.mark.parametrize("m", [0.05, 0.1, 0.5])
def test_dirac_small_k_linear_coefficient(m):
    # the interpolating Hamiltonian carries (arcsin m / m) on its linear term,
    # so it departs from n α·k/√3 at first order for every m > 0
    from qcalab.kspace import interpolating_hamiltonian

    p = DiracParams(m)
    rule = dirac_rule(p)
    d = np.array([0.3, -0.8, 0.5]) / np.linalg.norm([0.3, -0.8, 0.5])
    eps = 1e-4
    lin = (interpolating_hamiltonian(rule, eps * d) - interpolating_hamiltonian(rule, -eps * d)) / (2 * eps)
    a_d = np.einsum("i,iab->ab", d, ALPHA)
    assert np.abs(lin - math.asin(m) / m * p.n / math.sqrt(3) * a_d).max() < 1e-9
    h0 = interpolating_hamiltonian(rule, np.zeros(3))
    assert np.abs(h0 + math.asin(m) * GAMMA0).max() < 1e-14
