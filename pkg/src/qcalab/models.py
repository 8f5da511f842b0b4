"""Weyl and Dirac automata, their continuum targets, and unit bookkeeping.

Every Weyl automaton has the form ``W_k = u_k I - i σ·ñ_k`` with
``u_k² + |ñ_k|² = 1``. Closed forms are written in terms of
``c_i = cos(k_i/√d)`` and ``s_i = sin(k_i/√d)``; transition matrices are
then recovered from the closed form by coefficient extraction, so the
shipped rules and the formulas are two independent routes to ``A_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import (
    IllConditionedError,
    SingularPointError,
    SupportMismatchError,
)
from .kspace import (
    INVERSE_SUFFIX,
    BrillouinZone,
    IsotropyGroup,
    TransitionRule,
    build_ak,
    inverse_label,
)

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

_Z2 = np.zeros((2, 2), dtype=complex)
# spinorial (Weyl) representation
GAMMA0 = np.block([[_Z2, I2], [I2, _Z2]])
GAMMA = np.stack([np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI])
ALPHA = np.stack([GAMMA0 @ g for g in GAMMA])  # γ⁰γ^i


def sigma_dot(v) -> np.ndarray:
    """``σ·v`` for ``v`` of shape (..., 3)."""
    return np.einsum("...i,ijk->...jk", np.asarray(v), PAULI)


def alpha_dot(v) -> np.ndarray:
    """``γ⁰γ·v`` for ``v`` of shape (..., 3)."""
    return np.einsum("...i,ijk->...jk", np.asarray(v), ALPHA)


# --- lattices -----------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    name: str
    coords: np.ndarray  # positive generators, integer
    embedding: np.ndarray

    @property
    def dim(self) -> int:
        return self.embedding.shape[0]

    @property
    def zone(self) -> BrillouinZone:
        return BrillouinZone(self.name)

    def generator_table(self) -> dict[str, np.ndarray]:
        """label -> Euclidean vector for ``S₊ ∪ S₋``."""
        out = {}
        for i, c in enumerate(self.coords):
            v = self.embedding @ c
            out[f"h{i + 1}"] = v
            out[f"h{i + 1}{INVERSE_SUFFIX}"] = -v
        return out


_S3 = 1 / math.sqrt(3)
_S2 = 1 / math.sqrt(2)

# h1=(1,1,1)/√3, h2=(1,-1,-1)/√3, h3=(-1,1,-1)/√3 as integer unit vectors;
# h4 = -(h1+h2+h3) = (-1,-1,1)/√3.
BCC = Lattice(
    "bcc",
    np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]),
    _S3 * np.array([[1, 1, -1], [1, -1, 1], [1, -1, -1]], dtype=float),
)
SQUARE = Lattice(
    "square",
    np.array([[1, 0], [0, 1]]),
    _S2 * np.array([[1, 1], [1, -1]], dtype=float),
)
LINE = Lattice("line", np.array([[1]]), np.array([[1.0]]))

LATTICES = {1: LINE, 2: SQUARE, 3: BCC}


# --- Weyl variants --------------------------------------------------------------

@dataclass(frozen=True)
class WeylVariant:
    """Selects one Weyl automaton.

    ``chirality`` (``"+"``/``"-"``) matters only for d=3, ``theta`` only for
    d=2. ``form="B"`` is the transpose of the ``"A"`` automaton.
    """

    dim: int
    chirality: str = "+"
    form: str = "A"
    theta: float = 0.0

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.chirality not in ("+", "-"):
            raise ValueError("chirality must be '+' or '-'")
        if self.form not in ("A", "B"):
            raise ValueError("form must be 'A' or 'B'")
        if self.dim != 3 and self.chirality != "+":
            raise ValueError("chirality is only defined for d=3")
        if self.dim != 2 and self.theta != 0.0:
            raise ValueError("theta is only defined for d=2")

    @property
    def lattice(self) -> Lattice:
        return LATTICES[self.dim]

    @property
    def label(self) -> str:
        if self.dim == 3:
            return f"weyl3d{self.chirality}{self.form}"
        if self.dim == 2:
            return f"weyl2d{self.form}" + (f"(theta={self.theta:g})" if self.theta else "")
        return "weyl1d"


def all_weyl_variants() -> list[WeylVariant]:
    out = [WeylVariant(3, c, f) for c in "+-" for f in "AB"]
    out += [WeylVariant(2, "+", f) for f in "AB"]
    return out + [WeylVariant(1)]


def _cs(k, d):
    k = np.asarray(k, dtype=float)
    if d == 1 and k.ndim == 0:
        k = k[None]
    arg = k / math.sqrt(d)
    return np.cos(arg), np.sin(arg)


def _base_u_n(dim, chirality, k):
    """(u, ñ) of the A-form at theta = 0; k has shape (..., d)."""
    c, s = _cs(k, dim)
    if dim == 3:
        sg = 1.0 if chirality == "+" else -1.0
        cx, cy, cz = c[..., 0], c[..., 1], c[..., 2]
        sx, sy, sz = s[..., 0], s[..., 1], s[..., 2]
        n = np.stack([
            sx * cy * cz - sg * cx * sy * sz,
            cx * sy * cz + sg * sx * cy * sz,
            cx * cy * sz - sg * sx * sy * cz,
        ], -1)
        return cx * cy * cz + sg * sx * sy * sz, n
    if dim == 2:
        cx, cy = c[..., 0], c[..., 1]
        sx, sy = s[..., 0], s[..., 1]
        return cx * cy, np.stack([sx * cy, cx * sy, sx * sy], -1)
    kk = np.asarray(k, dtype=float)
    kk = kk[..., 0] if kk.ndim else kk
    zero = np.zeros_like(kk)
    return np.cos(kk), np.stack([zero, zero, np.sin(kk)], -1)


def weyl_u_ntilde(v: WeylVariant, k) -> tuple[np.ndarray, np.ndarray]:
    """``(u_k, ñ_k)`` with ``W_k = u_k I - i σ·ñ_k`` exactly.

    For d=2 the ``θ`` rotation ``(cosθ I + i sinθ σ_x)`` is folded in, and
    for B forms ``ñ`` is expressed in the σ basis (``σ_yᵀ = -σ_y`` flips its
    y-component).
    """
    u, n = _base_u_n(v.dim, v.chirality, k)
    if v.theta:
        ct, st = math.cos(v.theta), math.sin(v.theta)
        nx, ny, nz = n[..., 0], n[..., 1], n[..., 2]
        u, n = ct * u + st * nx, np.stack([ct * nx - st * u, ct * ny + st * nz, ct * nz - st * ny], -1)
    if v.form == "B":
        n = n * np.array([1.0, -1.0, 1.0])
    return u, n


def weyl_closed_form(v: WeylVariant, k) -> np.ndarray:
    u, n = weyl_u_ntilde(v, k)
    return np.asarray(u)[..., None, None] * I2 - 1j * sigma_dot(n)


def _u_gradient(v: WeylVariant, k) -> np.ndarray:
    """Closed-form ``∇_k u_k``."""
    k = np.asarray(k, dtype=float).reshape(v.dim)
    r = 1 / math.sqrt(v.dim)
    c, s = _cs(k, v.dim)
    if v.dim == 1:
        return np.array([-math.sin(k[0])])
    if v.dim == 2:
        cx, cy, sx, sy = c[0], c[1], s[0], s[1]
        du = r * np.array([-sx * cy, -cx * sy])
        dnx = r * np.array([cx * cy, -sx * sy])
        ct, st = math.cos(v.theta), math.sin(v.theta)
        return ct * du + st * dnx
    sg = 1.0 if v.chirality == "+" else -1.0
    cx, cy, cz = c
    sx, sy, sz = s
    return r * np.array([
        -sx * cy * cz + sg * cx * sy * sz,
        -cx * sy * cz + sg * sx * cy * sz,
        -cx * cy * sz + sg * sx * sy * cz,
    ])


# --- coefficient extraction -------------------------------------------------------

def extract_transition_matrices(
    ak: Callable[[np.ndarray], np.ndarray],
    generators: Mapping[str, np.ndarray],
    n_samples: int | None = None,
    rng: np.random.Generator | None = None,
    tol: float = 1e-12,
    max_condition: float = 1e8,
    scale: float = math.pi,
) -> dict[str, np.ndarray]:
    """Invert ``A_k = A_e + Σ_h exp(-i k·h) A_h`` for the matrices.

    ``ak`` maps an (n, d) array of wave-vectors to (n, s, s) matrices.
    Samples ``ak`` at random points, solves the linear least-squares
    system, then re-synthesizes at fresh points; a residual above ``tol``
    means ``ak`` has support outside the declared generators. The result
    includes the identity coefficient under ``"e"``.
    """
    rng = np.random.default_rng(12345) if rng is None else rng
    labels = ["e"] + list(generators)
    vecs = np.array([np.zeros_like(np.asarray(next(iter(generators.values())), float))]
                    + [np.asarray(generators[lab], float) for lab in generators])
    d = vecs.shape[1]
    n_samples = n_samples or 4 * len(labels)
    if n_samples < len(labels):
        raise ValueError("need at least |S|+1 sample points")

    def design(ks):
        return np.exp(-1j * ks @ vecs.T)

    ks = rng.uniform(-scale, scale, size=(n_samples, d))
    phi = design(ks)
    if np.linalg.cond(phi) > max_condition:
        raise IllConditionedError("sample points do not resolve the generators")
    vals = np.asarray(ak(ks))
    s = vals.shape[-1]
    coef, *_ = np.linalg.lstsq(phi, vals.reshape(n_samples, -1), rcond=None)
    coef = coef.reshape(len(labels), s, s)

    fresh = rng.uniform(-scale, scale, size=(n_samples, d))
    resynth = np.einsum("nl,lij->nij", design(fresh), coef)
    resid = np.abs(resynth - np.asarray(ak(fresh))).max()
    if resid > tol:
        raise SupportMismatchError(f"re-synthesis residual {resid:.3g} exceeds {tol:g}")
    return dict(zip(labels, coef))


def _clean(m, eps=1e-14):
    re = np.where(np.abs(m.real) < eps, 0.0, m.real)
    im = np.where(np.abs(m.imag) < eps, 0.0, m.imag)
    return re + 1j * im


def _rule_from_coefficients(lattice: Lattice, coefs, name, eps=1e-14):
    labels = list(lattice.generator_table())
    coords = []
    for i, c in enumerate(lattice.coords):
        coords.append(c)
    coords = coords + [-c for c in lattice.coords]
    labels = [f"h{i + 1}" for i in range(len(lattice.coords))] + [
        f"h{i + 1}{INVERSE_SUFFIX}" for i in range(len(lattice.coords))
    ]
    mats = np.stack([_clean(coefs[lab], eps) for lab in labels])
    ident = _clean(coefs["e"], eps)
    if not np.any(ident):
        ident = None
    return TransitionRule(tuple(labels), np.array(coords), lattice.embedding, mats,
                          ident, lattice=lattice.name, name=name)


def weyl_rule(v: WeylVariant) -> TransitionRule:
    """Transition rule of a Weyl automaton, extracted from its closed form."""
    lat = v.lattice
    coefs = extract_transition_matrices(lambda ks: weyl_closed_form(v, ks), lat.generator_table())
    return _rule_from_coefficients(lat, coefs, v.label)


# --- Dirac --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracParams:
    mass: float
    variant: WeylVariant = WeylVariant(3)

    def __post_init__(self):
        if not (0.0 <= self.mass <= 1.0):
            raise ValueError(f"mass must lie in [0, 1], got {self.mass}")

    @property
    def n(self) -> float:
        return math.sqrt(1.0 - self.mass ** 2)

    @property
    def label(self) -> str:
        return f"dirac[{self.variant.label},m={self.mass:g}]"


def dirac_closed_form(p: DiracParams, k) -> np.ndarray:
    """``D_k = n u_k I - i n γ⁰γ·ñ_k + i m γ⁰`` (spinorial gammas).

    Block form: ``[[n W_k†, i m], [i m, n W_k]]``.
    """
    u, nt = weyl_u_ntilde(p.variant, k)
    return (p.n * np.asarray(u)[..., None, None] * np.eye(4)
            - 1j * p.n * alpha_dot(nt) + 1j * p.mass * GAMMA0)


def dirac_rule(p: DiracParams) -> TransitionRule:
    """Dirac rule built from the Weyl transition matrices.

    The upper block of ``D_k`` is ``n W_k†``, whose coefficient at ``h`` is
    ``A_{h⁻¹}†``; the lower block is ``n W_k``; the mass term is the
    identity-element matrix ``i m γ⁰``.
    """
    w = weyl_rule(p.variant)
    mats = []
    for lab in w.labels:
        top = w.matrix(inverse_label(lab)).conj().T
        mats.append(p.n * np.block([[top, _Z2], [_Z2, w.matrix(lab)]]))
    ident = 1j * p.mass * GAMMA0
    return TransitionRule(w.labels, w.coords, w.embedding, np.stack(mats),
                          ident if p.mass else None, lattice=w.lattice, name=p.label)


# --- continuum targets ------------------------------------------------------------

def _pad3(k, d):
    k = np.asarray(k, dtype=float).reshape(-1)
    if d == 1:
        return np.array([0.0, 0.0, k[0]])
    if d == 2:
        return np.array([k[0], k[1], 0.0])
    return k


def target_weyl_hamiltonian(d: int, k, variant: WeylVariant | None = None) -> np.ndarray:
    """``σ·k/√d``; d=1 uses the z-component. A B-form variant gets ``σᵀ``."""
    kv = _pad3(k, d) / math.sqrt(d)
    if variant is not None and variant.form == "B":
        kv = kv * np.array([1.0, -1.0, 1.0])
    return sigma_dot(kv)


def target_dirac_hamiltonian(d: int, k, m: float) -> np.ndarray:
    """``(n/√d) γ⁰γ·k + m γ⁰`` with ``n = √(1-m²)``."""
    if not 0.0 <= m <= 1.0:
        raise ValueError("mass must lie in [0, 1]")
    n = math.sqrt(1 - m * m)
    return n / math.sqrt(d) * alpha_dot(_pad3(k, d)) + m * GAMMA0


# --- interpolating vector -----------------------------------------------------------

def _omega_over_sin(w, series_tol):
    """``ω/sin ω`` with a series for small ``|sin ω|``."""
    w = np.asarray(w, dtype=float)
    small = np.abs(np.sin(w)) < series_tol
    if np.any(small & (w > np.pi / 2)):
        raise SingularPointError("ω = π: n_k = (ω/sin ω) ñ_k diverges")
    series = 1 + w ** 2 / 6 + 7 * w ** 4 / 360 + 31 * w ** 6 / 15120
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = w / np.sin(w)
    return np.where(small, series, direct)


def n_vector(v: WeylVariant, k, series_tol: float = 1e-6):
    """``(ñ_k, n_k, ω_k)`` with ``n_k = (ω_k/sin ω_k) ñ_k``.

    ``ω`` is computed as ``atan2(|ñ|, u)``, which equals ``arccos u`` but
    stays accurate near ``ω = 0``. ``W_k = exp(-i σ·n_k)``.
    """
    u, nt = weyl_u_ntilde(v, k)
    w = np.arctan2(np.linalg.norm(nt, axis=-1), u)
    ratio = _omega_over_sin(w, series_tol)
    return nt, np.asarray(ratio)[..., None] * nt, w


# --- dispersion closed forms ----------------------------------------------------------

def dispersion_closed_form(v: WeylVariant, k, mass: float = 0.0) -> np.ndarray:
    """``ω_k = arccos(√(1-m²) u_k)``; ``mass=0`` gives the Weyl relation."""
    u, _ = weyl_u_ntilde(v, k)
    return np.arccos(np.clip(math.sqrt(1 - mass * mass) * u, -1.0, 1.0))


def dispersion_gradient(v: WeylVariant, k, mass: float = 0.0) -> np.ndarray:
    """Closed-form ``∇ω`` of the positive branch."""
    n = math.sqrt(1 - mass * mass)
    u, _ = weyl_u_ntilde(v, np.asarray(k, float).reshape(v.dim))
    denom = math.sqrt(max(1 - (n * float(u)) ** 2, 0.0))
    if denom == 0.0:
        if mass == 1.0:
            return np.zeros(v.dim)
        raise SingularPointError("gradient undefined where ω = 0 or π")
    return -n * _u_gradient(v, k) / denom


# --- isotropy groups ------------------------------------------------------------------

def _perm_from_orthogonal(lat: Lattice, r: np.ndarray) -> dict[str, str]:
    table = lat.generator_table()
    perm = {}
    for lab, vec in table.items():
        img = r @ vec
        match = [m for m, w in table.items() if np.allclose(w, img, atol=1e-12)]
        if len(match) != 1:
            raise ValueError("orthogonal map does not permute the generators")
        perm[lab] = match[0]
    return perm


def weyl_isotropy_group(v: WeylVariant) -> IsotropyGroup:
    """Isotropy group with its unitary representation.

    d=3: the binary rotations about the coordinate axes, represented by
    ``{I, iσ_x, iσ_y, iσ_z}``. d=2: the exchange ``h1 <-> h2`` (reflection
    ``y -> -y`` of the embedding), represented by a rotation by π about x.
    d=1: trivial.
    """
    lat = v.lattice
    if v.dim == 3:
        rots = [np.eye(3), np.diag([1.0, -1, -1]), np.diag([-1.0, 1, -1]), np.diag([-1.0, -1, 1])]
        us = [I2, 1j * SIGMA_X, 1j * SIGMA_Y, 1j * SIGMA_Z]
    elif v.dim == 2:
        rots = [np.eye(2), np.diag([1.0, -1])]
        us = [I2, 1j * SIGMA_X]
    else:
        rots, us = [np.eye(1)], [I2]
    return IsotropyGroup(tuple((_perm_from_orthogonal(lat, r), u) for r, u in zip(rots, us)))


def dirac_isotropy_group(p: DiracParams) -> IsotropyGroup:
    """Weyl isotropy group acting as ``U ⊕ U``; ``γ⁰`` commutes with it."""
    return weyl_isotropy_group(p.variant).lift(I2)


# --- units --------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitSystem:
    a: float
    tau: float
    M: float
    c: float
    hbar: float


def planck_units(a=None, tau=None, M=None, c=None, hbar=None, rtol: float = 1e-12) -> UnitSystem:
    """Complete ``(a, τ, M, c, ħ)`` from ``c = a/τ`` and ``ħ = M a c``.

    Any three independent quantities determine the rest. Redundant inputs
    must agree to ``rtol``.
    """
    vals = {"a": a, "tau": tau, "M": M, "c": c, "hbar": hbar}
    given = {key for key, x in vals.items() if x is not None}
    for key in given:
        if not vals[key] > 0:
            raise ValueError(f"{key} must be positive")
    changed = True
    while changed:
        changed = False
        v = vals
        if v["c"] is None and v["a"] is not None and v["tau"] is not None:
            v["c"] = v["a"] / v["tau"]; changed = True
        if v["a"] is None and v["c"] is not None and v["tau"] is not None:
            v["a"] = v["c"] * v["tau"]; changed = True
        if v["tau"] is None and v["a"] is not None and v["c"] is not None:
            v["tau"] = v["a"] / v["c"]; changed = True
        if v["hbar"] is None and all(v[x] is not None for x in ("M", "a", "c")):
            v["hbar"] = v["M"] * v["a"] * v["c"]; changed = True
        if v["M"] is None and all(v[x] is not None for x in ("hbar", "a", "c")):
            v["M"] = v["hbar"] / (v["a"] * v["c"]); changed = True
        if v["a"] is None and all(v[x] is not None for x in ("hbar", "M", "c")):
            v["a"] = v["hbar"] / (v["M"] * v["c"]); changed = True
        if v["c"] is None and all(v[x] is not None for x in ("hbar", "M", "a")):
            v["c"] = v["hbar"] / (v["M"] * v["a"]); changed = True
    if any(x is None for x in vals.values()):
        missing = sorted(k for k, x in vals.items() if x is None)
        raise ValueError(f"under-determined unit system; missing {missing}")
    if not math.isclose(vals["c"], vals["a"] / vals["tau"], rel_tol=rtol) or not math.isclose(
        vals["hbar"], vals["M"] * vals["a"] * vals["c"], rel_tol=rtol
    ):
        raise ValueError("inconsistent over-specified unit system")
    return UnitSystem(**vals)


def planck_scale() -> UnitSystem:
    """Units with ``M`` the Planck mass and SI values of ``c`` and ``ħ``."""
    from scipy import constants as sc

    mp = math.sqrt(sc.hbar * sc.c / sc.G)
    return planck_units(M=mp, c=sc.c, hbar=sc.hbar)
