"""One-particle evolution on periodic lattices.

Fields live on integer group coordinates ``g ∈ Z^d / (L_1,…,L_d)`` with
``s`` components per site. On that grid the FFT variable is the integer
phase ``θ = Eᵀk`` (``E`` the lattice embedding), so ``A`` per mode is
``ak_from_phases(rule, θ)``. Positions reported to the user are Euclidean,
``x = E g``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft

from .errors import OverlapError, ShapeError, WrapAroundError
from .kspace import (
    TransitionRule,
    _check_torus,
    ak_from_phases,
    eigenphases,
)


def _workers() -> int | None:
    raw = os.environ.get("QCA_LAB_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return n if n > 0 else None


@dataclass
class SpinorField:
    """Amplitudes ``ψ(g)`` of shape ``(*lattice_shape, s)``."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim < 2:
            raise ShapeError("field needs at least one lattice axis and a spinor axis")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("field contains non-finite amplitudes")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def s(self) -> int:
        return self.data.shape[-1]

    @property
    def dim(self) -> int:
        return self.data.ndim - 1

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def density(self) -> np.ndarray:
        return np.sum(np.abs(self.data) ** 2, axis=-1)

    def copy(self) -> "SpinorField":
        return SpinorField(self.data.copy())

    def inner(self, other: "SpinorField") -> complex:
        return complex(np.vdot(self.data, other.data))


def random_field(shape: Sequence[int], s: int, rng: np.random.Generator) -> SpinorField:
    z = rng.normal(size=(*shape, s)) + 1j * rng.normal(size=(*shape, s))
    return SpinorField(z / np.linalg.norm(z))


def _check_field(rule: TransitionRule, f: SpinorField):
    if f.dim != rule.dim or f.s != rule.s:
        raise ShapeError(
            f"field of shape {f.data.shape} does not match a d={rule.dim}, s={rule.s} rule"
        )
    _check_torus(rule, np.array(f.shape))


# --- stepping -----------------------------------------------------------------

def step_direct(rule: TransitionRule, f: SpinorField) -> SpinorField:
    """``ψ'(g) = Σ_h A_h ψ(g - h)`` with periodic wrap."""
    _check_field(rule, f)
    axes = tuple(range(rule.dim))
    out = np.zeros_like(f.data)
    for _, c, m in rule.terms():
        shifted = np.roll(f.data, shift=tuple(int(x) for x in c), axis=axes)
        out += shifted @ m.T
    return SpinorField(out)


def phase_grid(shape: Sequence[int]) -> np.ndarray:
    """Integer phases ``θ`` of every FFT mode, shape ``(*shape, d)``, in [-π, π)."""
    axes = [2 * np.pi * np.fft.fftfreq(n) for n in shape]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1)


def mode_matrices(rule: TransitionRule, shape: Sequence[int], power: int = 1) -> np.ndarray:
    """``A^power`` at every FFT mode, shape ``(*shape, s, s)``."""
    a = ak_from_phases(rule, phase_grid(shape))
    return a if power == 1 else np.linalg.matrix_power(a, power)


def _apply_modes(mats: np.ndarray, f: SpinorField) -> SpinorField:
    axes = tuple(range(f.dim))
    w = _workers()
    spec = scipy.fft.fftn(f.data, axes=axes, workers=w)
    spec = np.einsum("...ij,...j->...i", mats, spec)
    return SpinorField(scipy.fft.ifftn(spec, axes=axes, workers=w))


def step_spectral(rule: TransitionRule, f: SpinorField) -> SpinorField:
    """One step applied as ``A_θ`` on every discrete Fourier mode."""
    _check_field(rule, f)
    return _apply_modes(mode_matrices(rule, f.shape), f)


def evolve_spectral(rule: TransitionRule, f: SpinorField, steps: int) -> SpinorField:
    """``steps`` updates at once, as ``A_θ^steps`` per mode."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    _check_field(rule, f)
    return _apply_modes(mode_matrices(rule, f.shape, steps), f)


class HamiltonianPropagator:
    """Continuum evolution ``exp(-i H(k) t)`` on the FFT modes of a torus.

    ``hamiltonian`` takes a Euclidean wave-vector. Each mode's ``θ`` is
    taken as the periodic image nearest ``Eᵀ k_center`` before conversion
    to ``k``; the target is not periodic, so the image matters. Modes are
    diagonalized once.
    """

    def __init__(self, hamiltonian: Callable[[np.ndarray], np.ndarray], rule: TransitionRule,
                 shape: Sequence[int], k_center=None):
        self.shape = tuple(int(n) for n in shape)
        self.s = rule.s
        ks = _mode_wavevectors(rule, self.shape, k_center).reshape(-1, rule.dim)
        self._w, self._v = np.linalg.eigh(np.stack([hamiltonian(k) for k in ks]))

    def matrices(self, time: float) -> np.ndarray:
        v = self._v
        u = np.einsum("nij,nj,nkj->nik", v, np.exp(-1j * self._w * time), v.conj())
        return u.reshape(*self.shape, self.s, self.s)

    def evolve(self, f: SpinorField, time: float) -> SpinorField:
        return _apply_modes(self.matrices(time), f)


def evolve_hamiltonian(
    hamiltonian: Callable[[np.ndarray], np.ndarray],
    rule: TransitionRule,
    f: SpinorField,
    time: float,
    k_center=None,
) -> SpinorField:
    """Continuum evolution ``exp(-i H(k) t)`` per mode (see
    :class:`HamiltonianPropagator`)."""
    _check_field(rule, f)
    return HamiltonianPropagator(hamiltonian, rule, f.shape, k_center).evolve(f, time)


def _wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def _mode_wavevectors(rule, shape, k_center=None):
    """Euclidean ``k`` of every FFT mode, nearest image to ``k_center``."""
    theta = phase_grid(shape)
    theta0 = np.zeros(rule.dim) if k_center is None else rule.embedding.T @ np.asarray(k_center, float)
    theta = theta0 + _wrap(theta - theta0)
    return np.linalg.solve(rule.embedding.T, theta.reshape(-1, rule.dim).T).T.reshape(*shape, rule.dim)


# --- packets --------------------------------------------------------------------

@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet around ``k0``.

    ``width`` is the k-space standard deviation ``σ`` of ``|ψ(k)|²``. With
    ``spinor=None`` each mode carries the normalized projection of the
    branch eigenvector at ``k0`` onto that mode's branch eigenspace; an
    explicit ``spinor`` is used unchanged at every mode.
    """

    k0: tuple[float, ...]
    width: float
    spinor: tuple[complex, ...] | None = None
    branch: str = "+"
    center: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "k0", tuple(float(x) for x in np.atleast_1d(self.k0)))
        if not self.width > 0:
            raise ValueError("packet width must be positive")
        if self.branch not in ("+", "-"):
            raise ValueError("branch must be '+' or '-'")
        if self.spinor is not None:
            sp = np.asarray(self.spinor, dtype=complex)
            if not np.linalg.norm(sp) > 0:
                raise ValueError("spinor must be nonzero")
            object.__setattr__(self, "spinor", tuple(sp / np.linalg.norm(sp)))


def _branch_vectors(a: np.ndarray, branch: str, mult: int) -> np.ndarray:
    """Orthonormal basis of the top/bottom ``mult`` eigenphases, batched."""
    lam, vecs = np.linalg.eig(a)
    w = -np.angle(lam)
    order = np.argsort(w, axis=-1)
    pick = order[..., -mult:] if branch == "+" else order[..., :mult]
    sel = np.take_along_axis(vecs, pick[..., None, :], axis=-1)
    q, _ = np.linalg.qr(sel)
    return q


def _branch_multiplicity(a0, branch, merge_tol=1e-9):
    w = eigenphases(a0)
    if branch == "+":
        return int(np.sum(w >= w[-1] - merge_tol))
    return int(np.sum(w <= w[0] + merge_tol))


def branch_spinor(rule: TransitionRule, k, branch: str = "+", reference=None) -> np.ndarray:
    """Unit spinor on a branch at ``k``: the projection of ``reference``
    (default: the first branch eigenvector at ``k``)."""
    theta = rule.embedding.T @ np.asarray(k, float).reshape(rule.dim)
    a = ak_from_phases(rule, theta)
    q = _branch_vectors(a, branch, _branch_multiplicity(a, branch))
    v = q[:, 0] if reference is None else q @ (q.conj().T @ np.asarray(reference, complex))
    return v / np.linalg.norm(v)


def _position_spread(rule, width):
    """Per-axis std of ``|ψ(g)|²`` in integer coordinates."""
    einv = np.linalg.inv(rule.embedding)
    return np.sqrt(np.diag(einv @ einv.T)) / (2 * width)


def make_packet(rule: TransitionRule, shape: Sequence[int], spec: PacketSpec) -> SpinorField:
    """Unit-norm Gaussian superposition of plane waves.

    Amplitudes are ``exp(-|k - k0|²/(4σ²))``, cut to zero beyond ``5σ``.
    The packet is centred at ``spec.center`` (default: the middle of the
    torus).
    """
    shape = tuple(int(n) for n in shape)
    if len(shape) != rule.dim or len(spec.k0) != rule.dim:
        raise ShapeError("shape and k0 must match the rule's dimension")
    _check_torus(rule, np.array(shape))
    k0 = np.array(spec.k0)
    if rule.lattice in ("bcc", "square", "line"):
        from .kspace import BrillouinZone

        if not BrillouinZone(rule.lattice).contains(k0):
            raise ValueError(f"k0={spec.k0} lies outside the Brillouin zone")
    if 5 * spec.width * np.linalg.norm(rule.embedding, axis=0).max() >= np.pi:
        raise ValueError("packet width too large: 5σ support wraps around the zone")
    spread = _position_spread(rule, spec.width)
    if np.any(6 * spread > np.array(shape)):
        raise ValueError(
            f"k-space width {spec.width} gives a packet too wide for shape {shape}: needs ≥ {np.ceil(6 * spread).astype(int).tolist()}"
        )

    ks = _mode_wavevectors(rule, shape, k0)
    dk2 = np.sum((ks - k0) ** 2, axis=-1)
    amp = np.where(dk2 <= (5 * spec.width) ** 2, np.exp(-dk2 / (4 * spec.width ** 2)), 0.0)
    spinors = np.zeros((*shape, rule.s), dtype=complex)
    live = amp > 0
    if spec.spinor is not None:
        sp = np.asarray(spec.spinor, dtype=complex)
        if sp.shape != (rule.s,):
            raise ShapeError(f"spinor must have {rule.s} components")
        spinors[live] = sp
    else:
        ref = branch_spinor(rule, k0, spec.branch)
        a = ak_from_phases(rule, phase_grid(shape)[live])
        mult = _branch_multiplicity(ak_from_phases(rule, rule.embedding.T @ k0), spec.branch)
        q = _branch_vectors(a, spec.branch, mult)
        proj = np.einsum("nij,nkj,k->ni", q, q.conj(), ref)
        pn = np.linalg.norm(proj, axis=-1, keepdims=True)
        if pn.min() < 1e-3:
            raise ValueError("packet support crosses a branch degeneracy; narrow the width")
        spinors[live] = proj / pn

    center = np.array(spec.center if spec.center is not None else [n // 2 for n in shape])
    theta = phase_grid(shape)
    spec_amp = (amp * np.exp(-1j * theta @ center))[..., None] * spinors
    data = scipy.fft.ifftn(spec_amp, axes=tuple(range(rule.dim)), workers=_workers())
    data /= np.linalg.norm(data)
    return SpinorField(data)


def plane_wave(rule: TransitionRule, shape: Sequence[int], mode: Sequence[int],
               spinor=None, branch: str = "+") -> SpinorField:
    """Normalized ``exp(iθ·g) v`` for the FFT mode with integer index ``mode``.

    ``spinor=None`` picks a branch eigenvector of ``A_θ``, making the wave an
    exact eigenvector of one step.
    """
    shape = tuple(int(n) for n in shape)
    mode = np.asarray(mode, dtype=int).reshape(rule.dim)
    theta = 2 * np.pi * mode / np.array(shape)
    if spinor is None:
        a = ak_from_phases(rule, theta)
        spinor = _branch_vectors(a, branch, _branch_multiplicity(a, branch))[:, 0]
    spinor = np.asarray(spinor, dtype=complex)
    grids = np.meshgrid(*(np.arange(n) for n in shape), indexing="ij")
    phase = np.exp(1j * sum(t * g for t, g in zip(theta, grids)))
    data = phase[..., None] * spinor
    return SpinorField(data / np.linalg.norm(data))


# --- centroid tracking ------------------------------------------------------------

def _unwrapped_mean(density, ref, shape):
    """Mean integer position with each axis unwrapped into a window centred
    at ``ref``; also returns the probability in the outer window layers."""
    d = len(shape)
    total = density.sum()
    mean = np.empty(d)
    edge = 0.0
    for ax in range(d):
        marg = density.sum(axis=tuple(i for i in range(d) if i != ax))
        n = shape[ax]
        g = np.arange(n)
        off = (g - ref[ax] + n / 2) % n - n / 2
        mean[ax] = ref[ax] + np.sum(off * marg) / total
        layers = max(1, n // 64)
        edge = max(edge, float(marg[np.abs(off) >= n / 2 - layers].sum() / total))
    return mean, edge


@dataclass
class Trajectory:
    """Centroid history of one evolution; positions are Euclidean."""

    times: np.ndarray
    centroids: np.ndarray
    norms: np.ndarray
    overlaps: np.ndarray | None = None
    wrapped_at: int | None = None

    @property
    def velocity(self) -> np.ndarray:
        """Least-squares slope of the centroid against time."""
        return np.polyfit(self.times, self.centroids, 1)[0]

    def table(self) -> tuple[list[str], list[list]]:
        d = self.centroids.shape[1]
        header = ["t"] + [f"x{i + 1}" for i in range(d)] + ["norm"]
        if self.overlaps is not None:
            header += ["overlap", "p_e"]
        rows = []
        for i, t in enumerate(self.times):
            row = [int(t)] + list(self.centroids[i]) + [self.norms[i]]
            if self.overlaps is not None:
                ov = self.overlaps[i]
                row += [ov, helstrom_error(ov)]
            rows.append(row)
        return header, rows


def track(
    rule: TransitionRule,
    f: SpinorField,
    steps: int,
    target: Callable[[np.ndarray], np.ndarray] | None = None,
    k_center=None,
    edge_tol: float = 1e-2,
    raise_on_wrap: bool = True,
) -> Trajectory:
    """Evolve ``steps`` times, recording the centroid after every step.

    The centroid is unwrapped against its previous value, so only
    increments matter. When the packet has moved more than half the torus
    from its start, or more than ``edge_tol`` of its weight sits in the
    outer layers of the tracking window, the run is flagged as wrapped;
    with ``raise_on_wrap`` a :class:`WrapAroundError` carrying the partial
    trajectory is raised.
    """
    _check_field(rule, f)
    shape = np.array(f.shape)
    mats = mode_matrices(rule, f.shape)
    cur = f
    ref, edge = _unwrapped_mean(cur.density(), shape / 2, shape)
    ref, edge = _unwrapped_mean(cur.density(), ref, shape)
    start = ref.copy()
    cents, norms, ovs = [ref.copy()], [cur.norm], []
    prop = None
    if target is not None:
        prop = HamiltonianPropagator(target, rule, f.shape, k_center)
        ovs.append(1.0)
    wrapped = None
    for t in range(1, steps + 1):
        cur = _apply_modes(mats, cur)
        ref, edge = _unwrapped_mean(cur.density(), ref, shape)
        if target is not None:
            cont = prop.evolve(f, t)
            ovs.append(abs(cur.inner(cont)) / (cur.norm * cont.norm))
        cents.append(ref.copy())
        norms.append(cur.norm)
        if np.any(np.abs(ref - start) > shape / 2) or edge > edge_tol:
            wrapped = t
            break
    traj = Trajectory(
        np.arange(len(cents), dtype=float),
        np.array(cents) @ rule.embedding.T,
        np.array(norms),
        np.array(ovs) if target is not None else None,
        wrapped,
    )
    if wrapped is not None and raise_on_wrap:
        raise WrapAroundError(f"packet reached the torus boundary at step {wrapped}", wrapped, traj)
    return traj


def centroid_velocity(
    rule: TransitionRule, spec: PacketSpec, steps: int, shape: Sequence[int]
) -> np.ndarray:
    """Velocity (Euclidean, per step) of the packet centroid over ``steps``."""
    return track(rule, make_packet(rule, shape, spec), steps).velocity


# --- discrimination -------------------------------------------------------------

def helstrom_error(overlap: float) -> float:
    """Minimum error probability for two pure states with ``|⟨a|b⟩| = overlap``."""
    ov2 = min(max(float(overlap) ** 2, 0.0), 1.0)
    return 0.5 * (1.0 - math.sqrt(1.0 - ov2))


def _quadrature_state(rule, spec, points):
    d = rule.dim
    k0 = np.array(spec.k0)
    axis = np.linspace(-5 * spec.width, 5 * spec.width, points)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), -1).reshape(-1, d)
    grid = grid[np.sum(grid ** 2, axis=1) <= (5 * spec.width) ** 2]
    ks = k0 + grid
    amp = np.exp(-np.sum(grid ** 2, axis=1) / (4 * spec.width ** 2))
    a = ak_from_phases(rule, ks @ rule.embedding)
    if spec.spinor is not None:
        vecs = np.broadcast_to(np.asarray(spec.spinor, complex), (len(ks), rule.s))
    else:
        ref = branch_spinor(rule, k0, spec.branch)
        mult = _branch_multiplicity(ak_from_phases(rule, rule.embedding.T @ k0), spec.branch)
        q = _branch_vectors(a, spec.branch, mult)
        vecs = np.einsum("nij,nkj,k->ni", q, q.conj(), ref)
        pn = np.linalg.norm(vecs, axis=-1, keepdims=True)
        if pn.min() < 1e-3:
            raise ValueError("packet support crosses a branch degeneracy; narrow the width")
        vecs = vecs / pn
    psi = amp[:, None] * vecs
    return ks, a, psi / np.linalg.norm(psi)


def discrimination_error(
    rule: TransitionRule,
    target: Callable[[np.ndarray], np.ndarray],
    spec: PacketSpec,
    steps: int,
    shape: Sequence[int] | None = None,
    points: int = 21,
) -> float:
    """Helstrom error for telling ``A^T ψ`` from ``exp(-iH T) ψ``.

    With ``shape`` both evolutions run on the lattice's FFT modes. Without
    it the packet is represented on a ``points``-per-axis quadrature grid
    over its ``5σ`` support, which allows packets far narrower than any
    affordable torus.
    """
    if shape is not None:
        f = make_packet(rule, shape, spec)
        a = evolve_spectral(rule, f, steps)
        b = evolve_hamiltonian(target, rule, f, steps, spec.k0)
        return helstrom_error(abs(a.inner(b)))
    ks, a, psi = _quadrature_state(rule, spec, points)
    out_a = np.einsum("nij,nj->ni", np.linalg.matrix_power(a, steps), psi)
    hs = np.stack([target(k) for k in ks])
    w, v = np.linalg.eigh(hs)
    u = np.einsum("nij,nj,nkj->nik", v, np.exp(-1j * w * steps), v.conj())
    out_h = np.einsum("nij,nj->ni", u, psi)
    return helstrom_error(abs(np.vdot(out_a, out_h)))


# --- file formats -------------------------------------------------------------------

_SNAPSHOT_MAGIC = "qcalab-field"


def field_to_bytes(f: SpinorField) -> bytes:
    """Text header line ``qcalab-field shape=.. s=.. dtype=complex128
    endian=little`` followed by the raw little-endian amplitudes."""
    header = (
        f"{_SNAPSHOT_MAGIC} shape={','.join(map(str, f.shape))} s={f.s} "
        f"dtype=complex128 endian=little\n"
    )
    return header.encode("ascii") + f.data.astype("<c16").tobytes(order="C")


def field_from_bytes(raw: bytes) -> SpinorField:
    nl = raw.index(b"\n")
    parts = raw[:nl].decode("ascii").split()
    if not parts or parts[0] != _SNAPSHOT_MAGIC:
        raise ValueError("not a qcalab field snapshot")
    meta = dict(p.split("=", 1) for p in parts[1:])
    shape = tuple(int(x) for x in meta["shape"].split(","))
    s = int(meta["s"])
    dt = np.dtype(meta.get("dtype", "complex128")).newbyteorder("<" if meta.get("endian", "little") == "little" else ">")
    body = np.frombuffer(raw[nl + 1:], dtype=dt)
    if body.size != math.prod(shape) * s:
        raise ValueError("snapshot body does not match its header")
    return SpinorField(body.astype(complex).reshape(*shape, s))


def write_trajectory(path, traj: Trajectory) -> None:
    """CSV with ``t``, Euclidean centroid, norm and, when a continuum target
    was tracked, overlap and Helstrom error."""
    from ._io import write_csv

    write_csv(path, *traj.table())


def save_field(path, f: SpinorField) -> None:
    from ._io import atomic_write_bytes

    atomic_write_bytes(path, field_to_bytes(f))


def load_field(path) -> SpinorField:
    with open(path, "rb") as fh:
        return field_from_bytes(fh.read())
