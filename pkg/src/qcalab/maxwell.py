"""Photons as pairs of Weyl fermions.

The bilinear ``G^i(k,t) = φᵀ(k/2,t) σ^i ψ(k/2,t)`` evolves, one step at a
time, by ``σ^i -> W_{k/2}^{†} σ^i W_{k/2}``. This is a rotation of the
3-vector ``G`` about ``n_{k/2}``:

    W^{†t} σ^i W^t = Σ_j R_ij σ^j,   R = Exp(-i 2 n_{k/2}·J t),

with spin-1 generators ``(J_k)_ij = -i ε_kij`` (so ``Exp(-i v·J)`` is the
right-handed rotation by ``|v|`` about ``v``). The transverse part of ``G``
then obeys vacuum Maxwell equations in which ``2 n_{k/2}`` plays the role
of the wave-vector.

The second half of the module works in an explicit fermionic Fock space
to show that smeared polarization operators are bosonic up to corrections
controlled by the excitation density ``M/N``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import CapExceededError, FrameError, SingularPointError
from .models import PAULI, WeylVariant, _pad3, n_vector, weyl_closed_form

_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    _EPS[_i, _j, _k] = np.linalg.det(np.eye(3)[[_i, _j, _k]])


def spin1_generators() -> np.ndarray:
    """``J`` with ``(J_k)_ij = -i ε_kij``, shape (3, 3, 3)."""
    return -1j * _EPS


def rotation(v, t: float = 1.0) -> np.ndarray:
    """``Exp(-i t v·J)``, a real orthogonal 3x3 matrix."""
    gen = np.einsum("k,kij->ij", np.asarray(v, dtype=float), spin1_generators())
    return expm(-1j * t * gen).real


def rotation_generator(v) -> np.ndarray:
    """``-i v·J``; ``(-i v·J) x = v × x``."""
    return (-1j * np.einsum("k,kij->ij", np.asarray(v, float), spin1_generators())).real


def transverse_project(g, n) -> np.ndarray:
    """Remove the component of ``g`` along ``n``."""
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise SingularPointError("n = 0: transverse projection undefined")
    e = n / norm
    g = np.asarray(g)
    return g - np.dot(e, g) * e


@dataclass(frozen=True)
class GField:
    k: np.ndarray
    value: np.ndarray
    n: np.ndarray

    @property
    def transverse(self) -> np.ndarray:
        return transverse_project(self.value, self.n)


def g_field(v: WeylVariant, k, phi, psi) -> GField:
    """``G^i = φᵀ σ^i ψ`` for spinors ``φ, ψ`` at the mode ``k/2``."""
    k = np.asarray(k, dtype=float)
    _, n, _ = n_vector(v, k / 2)
    val = np.einsum("a,iab,b->i", np.asarray(phi, complex), PAULI, np.asarray(psi, complex))
    return GField(k, val, np.asarray(n))


@dataclass(frozen=True)
class RotationReport:
    deviation: float
    axis_deviation: float
    times: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"deviation": self.deviation, "axis_deviation": self.axis_deviation,
                "times": list(self.times)}


def conjugation_rotation_check(v: WeylVariant, k, t) -> RotationReport:
    """Compare ``W^{†t} σ^i W^t`` with ``Σ_j R(t)_ij σ^j`` at ``W = W_{k/2}``.

    ``t`` is a non-negative integer or a sequence of them. Also reports how
    far ``R`` moves the axis ``n_{k/2}``.
    """
    times = tuple(int(x) for x in np.atleast_1d(t))
    if any(x < 0 for x in times):
        raise ValueError("steps must be non-negative")
    k = np.asarray(k, dtype=float)
    w = weyl_closed_form(v, k / 2)
    _, n, _ = n_vector(v, k / 2)
    worst = axis = 0.0
    for tt in times:
        wt = np.linalg.matrix_power(w, tt)
        lhs = np.einsum("ba,ibc,cd->iad", wt.conj(), PAULI, wt)
        r = rotation(2 * n, tt)
        rhs = np.einsum("ij,jab->iab", r, PAULI)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
        axis = max(axis, float(np.abs(r @ n - n).max()))
    return RotationReport(worst, axis, times)


def eb_fields(g_t, n, partner=None) -> tuple[np.ndarray, np.ndarray]:
    """``E = |n|(G + G‡)``, ``B = i|n|(G‡ - G)``.

    ``G‡`` is the conjugate partner of ``G``; by default ``conj(G)``, which
    makes ``E = 2|n| Re G`` and ``B = 2|n| Im G``.
    """
    g_t = np.asarray(g_t, dtype=complex)
    partner = g_t.conj() if partner is None else np.asarray(partner, complex)
    s = float(np.linalg.norm(n))
    return s * (g_t + partner), 1j * s * (partner - g_t)


def reconstruct_g(e, b, n) -> np.ndarray:
    """Inverse of :func:`eb_fields` with the default partner."""
    return (np.asarray(e) + 1j * np.asarray(b)) / (2 * np.linalg.norm(n))


@dataclass(frozen=True)
class MaxwellReport:
    k: tuple[float, ...]
    transversality: float
    curl: float
    curl_fd: float
    discrete: float
    speed_mismatch: float

    def to_dict(self) -> dict:
        return {
            "k": list(self.k),
            "transversality": self.transversality,
            "curl": self.curl,
            "curl_fd": self.curl_fd,
            "discrete": self.discrete,
            "speed_mismatch": self.speed_mismatch,
        }


def maxwell_residual(
    v: WeylVariant,
    k,
    times,
    rng: np.random.Generator | None = None,
    fd_step: float = 1e-4,
) -> MaxwellReport:
    """Residuals of the emergent vacuum Maxwell equations at ``k``.

    ``G_T(0)`` comes from random spinors. ``G_T(t) = R(t) G_T(0)`` and its
    partner ``G‡(t) = R(-t) conj(G_T(0))`` (the partner rotates about
    ``n_{-k/2} = -n_{k/2}``). With these, the fields of :func:`eb_fields`
    must satisfy

        2n·E = 2n·B = 0,   ∂_t E = i 2n × B,   ∂_t B = -i 2n × E.

    ``curl`` uses the exact generator, ``curl_fd`` central differences of
    step ``fd_step``; ``discrete`` compares ``R(t)`` at integer ``t`` with
    the step-by-step W-conjugation; ``speed_mismatch`` is
    ``‖2 n_{k/2} - k/√d‖`` (with ``k_y -> -k_y`` for B forms, whose
    vectors live in the transposed Pauli basis).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    k = np.asarray(k, dtype=float)
    _, n, w = n_vector(v, k / 2)
    n = np.asarray(n)
    if np.linalg.norm(n) == 0:
        raise SingularPointError("n_{k/2} = 0: no transverse plane")
    phi, psi = (rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(2))
    g0 = transverse_project(g_field(v, k, phi, psi).value, n)
    gen = rotation_generator(2 * n)
    two_n = 2 * n

    def fields(t):
        g = rotation(2 * n, t) @ g0
        partner = rotation(2 * n, -t) @ g0.conj()
        return g, partner, *eb_fields(g, n, partner)

    trans = curl = curl_fd = 0.0
    for t in np.atleast_1d(times).astype(float):
        g, partner, e, b = fields(t)
        trans = max(trans, abs(two_n @ e), abs(two_n @ b))
        s = np.linalg.norm(n)
        de = s * (gen @ g - gen @ partner)
        db = 1j * s * (-gen @ partner - gen @ g)
        curl = max(curl, np.abs(de - 1j * np.cross(two_n, b)).max(),
                   np.abs(db + 1j * np.cross(two_n, e)).max())
        _, _, ep, bp = fields(t + fd_step)
        _, _, em, bm = fields(t - fd_step)
        de_fd = (ep - em) / (2 * fd_step)
        db_fd = (bp - bm) / (2 * fd_step)
        curl_fd = max(curl_fd, np.abs(de_fd - 1j * np.cross(two_n, b)).max(),
                      np.abs(db_fd + 1j * np.cross(two_n, e)).max())
    ints = [int(t) for t in np.atleast_1d(times) if float(t).is_integer() and t >= 0]
    discrete = conjugation_rotation_check(v, k, ints).deviation if ints else 0.0
    kb = _pad3(k, v.dim)
    kb = kb * np.array([1.0, -1.0, 1.0]) if v.form == "B" else kb
    speed = float(np.linalg.norm(2 * n - kb / math.sqrt(v.dim)))
    return MaxwellReport(tuple(float(x) for x in k), float(trans), float(curl),
                         float(curl_fd), float(discrete), speed)


# --- Fock space -----------------------------------------------------------------

_LOWER = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
_ZSIGN = sp.csr_matrix(np.diag([1.0, -1.0]))


@dataclass(frozen=True)
class FockAlgebra:
    """Fermionic modes for two species, each with ``n_per_species``
    spin-resolved modes (``n_per_species/2`` wave-vectors times two spin
    states).

    Mode ``j`` of species ``φ`` is global mode ``j``; mode ``j`` of ``ψ`` is
    global mode ``N + j``. Within a species ``j = 2q + a`` for wave-vector
    index ``q`` and spin ``a``. Annihilators are built by the Jordan-Wigner
    construction ``a_j = Z^{⊗j} ⊗ σ⁻ ⊗ I``, where ``σ⁻ = |0⟩⟨1|`` lowers
    occupation 1 to 0.
    """

    n_per_species: int
    annihilators: tuple = field(repr=False)

    @property
    def n_modes(self) -> int:
        return 2 * self.n_per_species

    @property
    def dimension(self) -> int:
        return 2 ** self.n_modes

    @property
    def n_q(self) -> int:
        return self.n_per_species // 2

    def mode(self, species: str, q: int, spin: int) -> int:
        if species not in ("phi", "psi"):
            raise ValueError("species must be 'phi' or 'psi'")
        if not (0 <= q < self.n_q and spin in (0, 1)):
            raise IndexError(f"mode (q={q}, spin={spin}) not present")
        return (0 if species == "phi" else self.n_per_species) + 2 * q + spin

    def a(self, species: str, q: int, spin: int):
        return self.annihilators[self.mode(species, q, spin)]

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dimension)
        v[0] = 1.0
        return v

    def basis_state(self, occupied) -> np.ndarray:
        """Occupation basis vector with the given global modes filled."""
        idx = 0
        for j in occupied:
            idx |= 1 << (self.n_modes - 1 - j)
        v = np.zeros(self.dimension)
        v[idx] = 1.0
        return v

    def number(self, j: int):
        a = self.annihilators[j]
        return (a.T @ a).tocsr()

    def anticommutator_residual(self) -> float:
        """Largest entry of ``{a_i, a_j} `` and ``{a_i, a_j†} - δ_ij``."""
        eye = sp.identity(self.dimension, format="csr")
        worst = 0.0
        for i, j in itertools.product(range(self.n_modes), repeat=2):
            ai, aj = self.annihilators[i], self.annihilators[j]
            r1 = ai @ aj + aj @ ai
            r2 = ai @ aj.T + aj.T @ ai - (eye if i == j else 0 * eye)
            for r in (r1, r2):
                if r.nnz:
                    worst = max(worst, float(np.abs(r.data).max()))
        return worst


def build_fock(n_per_species: int, cap: int = 12) -> FockAlgebra:
    """Fock algebra for two species of ``n_per_species`` modes each."""
    if n_per_species < 2 or n_per_species % 2:
        raise ValueError("modes per species must be a positive even number (spin pairs)")
    total = 2 * n_per_species
    if total > cap:
        raise CapExceededError(f"{total} modes exceed the cap of {cap}")
    ops = []
    for j in range(total):
        parts = [_ZSIGN] * j + [_LOWER] + [sp.identity(2, format="csr")] * (total - j - 1)
        op = parts[0]
        for p in parts[1:]:
            op = sp.kron(op, p, format="csr")
        ops.append(op.tocsr())
    return FockAlgebra(n_per_species, tuple(ops))


@dataclass(frozen=True)
class SmearingProfile:
    """Constant smearing over ``N`` spin-resolved modes.

    ``|f|² = 1/N`` on every mode of the region, so ``Σ|f|² = 1``. Both spin
    states of a wave-vector share the weight ``f_q``.
    """

    n_modes: int

    def __post_init__(self):
        if self.n_modes < 2 or self.n_modes % 2:
            raise ValueError("the region must hold whole spin pairs")

    @property
    def n_q(self) -> int:
        return self.n_modes // 2

    @property
    def weight(self) -> float:
        return 1.0 / math.sqrt(self.n_modes)

    @property
    def total_weight(self) -> float:
        return self.n_modes * self.weight ** 2


def check_frame(u1, u2, n, tol: float = 1e-10) -> np.ndarray:
    """Return the orthonormal frame ``(u1, u2, n/|n|)`` or raise."""
    u1, u2, n = (np.asarray(x, dtype=float) for x in (u1, u2, n))
    if np.linalg.norm(n) == 0:
        raise FrameError("n must be nonzero")
    e = n / np.linalg.norm(n)
    frame = np.stack([u1, u2, e])
    if np.abs(frame @ frame.T - np.eye(3)).max() > tol:
        raise FrameError("u1, u2, n are not orthonormal")
    if np.dot(np.cross(u1, u2), e) <= 0:
        raise FrameError("frame (u1, u2, n) is not right-handed")
    return frame


def transverse_frame(n) -> tuple[np.ndarray, np.ndarray]:
    """A right-handed orthonormal pair ``u1, u2`` perpendicular to ``n``."""
    e = np.asarray(n, float) / np.linalg.norm(n)
    trial = np.eye(3)[np.argmin(np.abs(e))]
    u1 = trial - np.dot(trial, e) * e
    u1 /= np.linalg.norm(u1)
    return u1, np.cross(e, u1)


def polarization_ops(f: FockAlgebra, profile: SmearingProfile, u1, u2, n):
    """``γ^i = Σ_q f_q Σ_ab (u^i·σ)_ab φ_{q,a} ψ_{q,b}`` for ``i = 1, 2``."""
    check_frame(u1, u2, n)
    if profile.n_q > f.n_q:
        raise ValueError(f"profile needs {profile.n_q} wave-vectors, algebra has {f.n_q}")
    out = []
    for u in (u1, u2):
        m = np.einsum("i,iab->ab", u, PAULI)
        op = sp.csr_matrix((f.dimension, f.dimension), dtype=complex)
        for q in range(profile.n_q):
            for a_, b_ in itertools.product(range(2), repeat=2):
                if m[a_, b_] != 0:
                    op = op + profile.weight * m[a_, b_] * (f.a("phi", q, a_) @ f.a("psi", q, b_))
        out.append(op.tocsr())
    return tuple(out)


def excitation_states(f: FockAlgebra, n_region: int, m: int):
    """Occupation states with ``m`` φ- and ``m`` ψ-excitations among the
    first ``n_region`` modes of each species."""
    if m > n_region:
        raise ValueError("more excitations than modes")
    for occ_phi in itertools.combinations(range(n_region), m):
        for occ_psi in itertools.combinations(range(n_region), m):
            yield f.basis_state(list(occ_phi) + [f.n_per_species + j for j in occ_psi])


def boson_commutator_deviation(f: FockAlgebra, gammas, m: int, n_region: int | None = None) -> float:
    """``max ‖([γ^i, γ^j†] - δ_ij)|s⟩‖`` over the ``m``-excitation family."""
    n_region = f.n_per_species if n_region is None else n_region
    eye = sp.identity(f.dimension, format="csr")
    comms = {}
    for i, j in itertools.product(range(len(gammas)), repeat=2):
        gi, gj_dag = gammas[i], gammas[j].conj().T
        c = gi @ gj_dag - gj_dag @ gi
        comms[i, j] = (c - eye if i == j else c).tocsc()
    states = np.stack(list(excitation_states(f, n_region, m)), axis=1)
    worst = 0.0
    for c in comms.values():
        worst = max(worst, float(np.linalg.norm(c @ states, axis=0).max()))
    return worst


def deviation_scan(sizes=(2, 4, 6), excitations=(0, 1, 2), cap: int = 12, rng=None):
    """Rows ``(N_k, M, deviation)``; the polarization frame is a random
    right-handed triad (the deviation is frame-independent)."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = rng.normal(size=3)
    u1, u2 = transverse_frame(n)
    rows = []
    for size in sizes:
        f = build_fock(size, cap)
        gam = polarization_ops(f, SmearingProfile(size), u1, u2, n)
        for m in excitations:
            if m > size:
                continue
            rows.append((size, m, boson_commutator_deviation(f, gam, m)))
    return rows


def write_deviation_csv(path, rows) -> None:
    from ._io import write_csv

    write_csv(path, ["N_k", "M", "deviation"], rows)
