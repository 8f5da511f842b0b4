"""Wave-vector representation of linear automata on Z^d.

An automaton is stored as a :class:`TransitionRule`: integer generator
coordinates, one ``s x s`` transition matrix per generator, and an optional
identity-element (self-interaction) matrix. In wave-vector space the update
is ``A_k = A_e + Σ_h exp(-i k·h) A_h`` where ``h`` is the Euclidean
embedding of each generator.

Position-space convention used throughout the package: amplitudes update as
``ψ'(g) = Σ_h A_h ψ(g - h)`` and plane waves are ``exp(+i k·g) v``. With this
choice a packet on an eigenphase branch ``ω(k)`` moves with velocity
``+∇ω``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BranchCutError,
    DegeneracyError,
    DegenerateFitError,
    NonUnitaryError,
    OverlapError,
    QCAError,
    ShapeError,
)

ALGEBRAIC_TOL = 1e-12
SPECTRAL_TOL = 1e-10

INVERSE_SUFFIX = "^-1"


def inverse_label(label: str) -> str:
    if label.endswith(INVERSE_SUFFIX):
        return label[: -len(INVERSE_SUFFIX)]
    return label + INVERSE_SUFFIX


@dataclass(frozen=True, eq=False)
class TransitionRule:
    """Generators and transition matrices of a homogeneous automaton.

    Attributes
    ----------
    labels : tuple of str
        One label per generator in ``S = S₊ ∪ S₋``; inverses carry a
        ``^-1`` suffix.
    coords : (n, d) int array
        Group coordinates of each generator in Z^d.
    embedding : (d, d) float array
        Maps integer coordinates to Euclidean vectors (columns are the
        images of the unit coordinate vectors).
    matrices : (n, s, s) complex array
        ``A_h`` in label order.
    identity : (s, s) complex array or None
        ``A_e``; present only for self-interacting rules.
    """

    labels: tuple[str, ...]
    coords: np.ndarray
    embedding: np.ndarray
    matrices: np.ndarray
    identity: np.ndarray | None = None
    lattice: str = "custom"
    name: str = ""

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=int))
        mats = np.asarray(self.matrices, dtype=complex)
        emb = np.atleast_2d(np.asarray(self.embedding, dtype=float))
        labels = tuple(self.labels)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ShapeError("matrices must have shape (n, s, s)")
        if not (len(labels) == coords.shape[0] == mats.shape[0]):
            raise ShapeError("labels, coords and matrices disagree in length")
        if emb.shape != (coords.shape[1], coords.shape[1]):
            raise ShapeError("embedding must be a d x d matrix")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise ValueError("duplicate generator labels")
        for lab, i in index.items():
            j = index.get(inverse_label(lab))
            if j is None:
                raise ValueError(f"generator set not closed under inversion: {lab}")
            if not np.array_equal(coords[j], -coords[i]):
                raise ValueError(f"{lab} and its inverse are not opposite vectors")
        ident = None
        if self.identity is not None:
            ident = np.asarray(self.identity, dtype=complex)
            if ident.shape != mats.shape[1:]:
                raise ShapeError("identity matrix has the wrong shape")
        for name, val in (("coords", coords), ("matrices", mats), ("embedding", emb)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        if ident is not None:
            ident.setflags(write=False)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", index)

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def s(self) -> int:
        return self.matrices.shape[1]

    @property
    def vectors(self) -> np.ndarray:
        """Euclidean generator vectors, shape (n, d)."""
        return self.coords @ self.embedding.T

    @property
    def positive_labels(self) -> tuple[str, ...]:
        return tuple(lab for lab in self.labels if not lab.endswith(INVERSE_SUFFIX))

    def matrix(self, label: str) -> np.ndarray:
        if label == "e":
            return self.identity if self.identity is not None else np.zeros((self.s, self.s), complex)
        return self.matrices[self._index[label]]

    def coord(self, label: str) -> np.ndarray:
        if label == "e":
            return np.zeros(self.dim, dtype=int)
        return self.coords[self._index[label]]

    def terms(self):
        """``(label, integer coords, matrix)`` for every term, identity first."""
        if self.identity is not None:
            yield "e", np.zeros(self.dim, dtype=int), self.identity
        for lab, c, m in zip(self.labels, self.coords, self.matrices):
            yield lab, c, m

    def with_matrices(self, updates: Mapping[str, np.ndarray], name: str | None = None):
        mats = self.matrices.copy()
        ident = None if self.identity is None else self.identity.copy()
        for lab, m in updates.items():
            if lab == "e":
                ident = np.asarray(m, dtype=complex)
            else:
                mats[self._index[lab]] = m
        return replace(self, matrices=mats, identity=ident,
                       name=self.name if name is None else name)

    def scaled(self, label: str, factor: float) -> "TransitionRule":
        """Copy with one transition matrix multiplied by ``factor``."""
        return self.with_matrices({label: factor * self.matrix(label)},
                                  name=f"{self.name}*{label}x{factor}")


def identity_rule(dim: int = 1, s: int = 2) -> TransitionRule:
    """The trivial automaton: ``A_e = I`` and zero hopping matrices."""
    coords = np.vstack([np.eye(dim, dtype=int), -np.eye(dim, dtype=int)])
    labels = tuple(f"h{i + 1}" for i in range(dim)) + tuple(
        f"h{i + 1}{INVERSE_SUFFIX}" for i in range(dim)
    )
    return TransitionRule(
        labels, coords, np.eye(dim), np.zeros((2 * dim, s, s)), np.eye(s),
        name="identity",
    )


# --- wave-vector matrices -------------------------------------------------

def _as_points(k, dim):
    k = np.asarray(k, dtype=float)
    single = k.ndim == 0 or (k.ndim == 1 and k.shape[0] == dim)
    k = k.reshape(-1, dim)
    if not np.all(np.isfinite(k)):
        raise ValueError("wave-vector components must be finite")
    return k, single


def ak_from_phases(rule: TransitionRule, theta) -> np.ndarray:
    """``A`` at integer-coordinate phases ``θ = Eᵀk``; θ has shape (..., d)."""
    theta = np.asarray(theta, dtype=float)
    phases = np.exp(-1j * (theta @ rule.coords.T))
    out = np.einsum("...l,lij->...ij", phases, rule.matrices)
    if rule.identity is not None:
        out = out + rule.identity
    return out


def build_ak(rule: TransitionRule, k) -> np.ndarray:
    """``A_k = A_e + Σ_h exp(-i k·h) A_h``.

    ``k`` may be a single d-vector or an array of shape (n, d); the result
    is (s, s) or (n, s, s) accordingly.
    """
    pts, single = _as_points(k, rule.dim)
    out = ak_from_phases(rule, pts @ rule.embedding)
    return out[0] if single else out


def unitarity_residual(a: np.ndarray) -> np.ndarray:
    """Max-abs deviation of ``A†A`` from the identity, per matrix."""
    a = np.asarray(a)
    eye = np.eye(a.shape[-1])
    prod = np.swapaxes(a.conj(), -1, -2) @ a
    return np.abs(prod - eye).max(axis=(-2, -1))


# --- unitarity constraints ------------------------------------------------

@dataclass(frozen=True)
class UnitarityReport:
    cond1: float
    cond2: Mapping[tuple[int, ...], float]
    tol: float

    @property
    def cond2_max(self) -> float:
        return max(self.cond2.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.cond1 <= self.tol and self.cond2_max <= self.tol

    def to_dict(self) -> dict:
        return {
            "cond1": self.cond1,
            "cond2": {",".join(map(str, v)): r for v, r in sorted(self.cond2.items())},
            "cond2_max": self.cond2_max,
            "tol": self.tol,
            "pass": self.passed,
        }


def unitarity_report(rule: TransitionRule, tol: float = ALGEBRAIC_TOL) -> UnitarityReport:
    """Evaluate both unitarity conditions on the transition matrices.

    ``cond1`` is the larger of ``‖Σ A†A - I‖`` and ``‖Σ AA† - I‖`` (max-abs
    entry). ``cond2`` maps every nonzero difference vector ``h' - h`` to the
    larger of the two partial sums ``Σ A_h† A_h'`` and ``Σ A_h' A_h†`` over
    pairs realizing it. The grouping is exact integer arithmetic.
    """
    terms = [(tuple(int(x) for x in c), m) for _, c, m in rule.terms()]
    eye = np.eye(rule.s)
    left = sum(m.conj().T @ m for _, m in terms)
    right = sum(m @ m.conj().T for _, m in terms)
    cond1 = float(max(np.abs(left - eye).max(), np.abs(right - eye).max()))
    sums_l: dict[tuple[int, ...], np.ndarray] = {}
    sums_r: dict[tuple[int, ...], np.ndarray] = {}
    for (c1, m1), (c2, m2) in itertools.product(terms, repeat=2):
        diff = tuple(b - a for a, b in zip(c1, c2))
        if not any(diff):
            continue
        sums_l[diff] = sums_l.get(diff, 0) + m1.conj().T @ m2
        sums_r[diff] = sums_r.get(diff, 0) + m2 @ m1.conj().T
    cond2 = {
        v: float(max(np.abs(sums_l[v]).max(), np.abs(sums_r[v]).max())) for v in sums_l
    }
    return UnitarityReport(cond1, cond2, tol)


# --- isotropy ----------------------------------------------------------------

@dataclass(frozen=True)
class IsotropyGroup:
    """Generator permutations paired with unitaries on the internal space.

    The unitaries need only represent the group up to phase, since they act
    by conjugation.
    """

    elements: tuple[tuple[Mapping[str, str], np.ndarray], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "elements",
            tuple((dict(p), np.asarray(u, dtype=complex)) for p, u in self.elements),
        )

    def lift(self, block: np.ndarray) -> "IsotropyGroup":
        """Same permutations, unitaries ``kron(block, U)``."""
        return IsotropyGroup(tuple((p, np.kron(block, u)) for p, u in self.elements))


@dataclass(frozen=True)
class IsotropyReport:
    worst_residual: float
    transitive: bool
    closed: bool
    faithful: bool
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst_residual <= self.tol and self.transitive and self.closed and self.faithful

    def to_dict(self) -> dict:
        return {
            "worst_residual": self.worst_residual,
            "transitive": self.transitive,
            "closed": self.closed,
            "faithful": self.faithful,
            "tol": self.tol,
            "pass": self.passed,
        }


def _proportional(a, b, tol):
    """Is ``a = c·b`` for a unimodular scalar ``c``?"""
    c = np.trace(b.conj().T @ a) / a.shape[0]
    return abs(abs(c) - 1) <= tol and np.abs(a - c * b).max() <= tol


def isotropy_check(
    rule: TransitionRule, group: IsotropyGroup, tol: float = ALGEBRAIC_TOL
) -> IsotropyReport:
    """Check ``A_{l(h)} = U_l A_h U_l†`` for every element and generator."""
    labels = set(rule.labels)
    worst = 0.0
    for perm, u in group.elements:
        missing = labels - set(perm)
        if missing:
            raise QCAError(f"permutation undefined on {sorted(missing)}")
        for lab in rule.labels:
            target = perm[lab]
            if target not in labels:
                raise QCAError(f"permutation maps {lab} outside the generator set")
            diff = rule.matrix(target) - u @ rule.matrix(lab) @ u.conj().T
            worst = max(worst, float(np.abs(diff).max()))
        if rule.identity is not None:
            diff = rule.identity - u @ rule.identity @ u.conj().T
            worst = max(worst, float(np.abs(diff).max()))

    perms = [tuple(sorted(p.items())) for p, _ in group.elements]
    orbit = {perm[rule.positive_labels[0]] for perm, _ in group.elements}
    transitive = set(rule.positive_labels) <= orbit

    closed = faithful = True
    lookup = {key: i for i, key in enumerate(perms)}
    for (pa, ua), (pb, ub) in itertools.product(group.elements, repeat=2):
        comp = tuple(sorted((lab, pa[pb[lab]]) for lab in pb))
        j = lookup.get(comp)
        if j is None:
            closed = False
            continue
        if not _proportional(ua @ ub, group.elements[j][1], 1e-9):
            faithful = False
    for (i, (pa, ua)), (j, (pb, ub)) in itertools.combinations(enumerate(group.elements), 2):
        if perms[i] != perms[j] and _proportional(ua, ub, 1e-9):
            faithful = False
    return IsotropyReport(worst, transitive, closed, faithful, tol)


# --- Brillouin zones ----------------------------------------------------------

@dataclass(frozen=True)
class BrillouinZone:
    """First Brillouin zone of one of the shipped lattices.

    ``bcc``: ``|k_i ± k_j| ≤ √3π``; ``square``: ``|k_x ± k_y| ≤ √2π``;
    ``line``: ``|k| ≤ π``.
    """

    lattice: str

    def __post_init__(self):
        if self.lattice not in ("bcc", "square", "line"):
            raise ValueError(f"unknown lattice {self.lattice!r}")

    @property
    def dim(self) -> int:
        return {"line": 1, "square": 2, "bcc": 3}[self.lattice]

    @property
    def half_width(self) -> float:
        """Half-side of the bounding box."""
        return {"line": np.pi, "square": np.sqrt(2) * np.pi, "bcc": np.sqrt(3) * np.pi}[self.lattice]

    def contains(self, k, eps: float = 1e-12) -> np.ndarray | bool:
        pts, single = _as_points(k, self.dim)
        bound = self.half_width * (1 + eps)
        if self.lattice == "line":
            ok = np.abs(pts[:, 0]) <= bound
        else:
            ok = np.ones(len(pts), dtype=bool)
            for i, j in itertools.combinations(range(self.dim), 2):
                ok &= np.abs(pts[:, i] + pts[:, j]) <= bound
                ok &= np.abs(pts[:, i] - pts[:, j]) <= bound
        return bool(ok[0]) if single else ok

    def grid(self, n: int) -> np.ndarray:
        """Points of an ``n``-per-axis uniform grid over the bounding box
        that fall inside the zone."""
        if n < 1:
            raise ValueError("grid size must be positive")
        axis = np.linspace(-self.half_width, self.half_width, n)
        pts = np.stack(np.meshgrid(*([axis] * self.dim), indexing="ij"), -1).reshape(-1, self.dim)
        return pts[self.contains(pts)]

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` uniform random points (rejection from the bounding box)."""
        out = np.empty((0, self.dim))
        while len(out) < n:
            cand = rng.uniform(-self.half_width, self.half_width, size=(2 * n, self.dim))
            out = np.vstack([out, cand[self.contains(cand)]])
        return out[:n]


# --- spectra ------------------------------------------------------------------

def eigenphases(a: np.ndarray) -> np.ndarray:
    """Sorted ``ω`` in (-π, π] with eigenvalues ``exp(-iω)``; batched."""
    lam = np.linalg.eigvals(a)
    w = -np.angle(lam)
    w = np.where(w <= -np.pi, w + 2 * np.pi, w)
    return np.sort(w, axis=-1)


def dispersion(rule: TransitionRule, k, tol: float = SPECTRAL_TOL) -> np.ndarray:
    """Sorted eigenphases of ``A_k`` (one row per wave-vector if batched)."""
    a = build_ak(rule, k)
    if np.max(unitarity_residual(a)) > tol:
        raise NonUnitaryError("A_k is not unitary within tolerance")
    return eigenphases(a)


def unitary_log(u: np.ndarray, cut_tol: float = 1e-9) -> np.ndarray:
    """Hermitian ``H`` with ``exp(-iH) = u`` and spectrum in (-π, π).

    ``u`` is diagonalized by a complex Schur decomposition, which is
    diagonal with orthonormal vectors for a normal matrix. Eigenvalues
    within ``cut_tol`` of ``-1`` make the principal branch ambiguous.
    """
    from scipy.linalg import schur

    t, z = schur(np.asarray(u, dtype=complex), output="complex")
    w = -np.angle(np.diag(t))
    if np.any(np.pi - np.abs(w) <= cut_tol):
        raise BranchCutError("eigenphase on the branch cut at -π")
    h = (z * w) @ z.conj().T
    return (h + h.conj().T) / 2


def interpolating_hamiltonian(rule: TransitionRule, k, cut_tol: float = 1e-9,
                              tol: float = SPECTRAL_TOL) -> np.ndarray:
    """``H_I(k)`` with ``exp(-i H_I(k)) = A_k`` on the principal branch."""
    a = build_ak(rule, k)
    if a.ndim == 3:
        return np.stack([interpolating_hamiltonian(rule, kk, cut_tol, tol) for kk in np.asarray(k)])
    if unitarity_residual(a) > tol:
        raise NonUnitaryError("A_k is not unitary within tolerance")
    return unitary_log(a, cut_tol)


def _clusters(phases, merge_tol):
    """Split sorted phases into runs closer than ``merge_tol``."""
    bounds = [0]
    for i in range(1, len(phases)):
        if phases[i] - phases[i - 1] > merge_tol:
            bounds.append(i)
    bounds.append(len(phases))
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def _branch_slice(phases, branch, merge_tol):
    clusters = _clusters(phases, merge_tol)
    if branch in ("+", "-"):
        branch = -1 if branch == "+" else 0
    try:
        return clusters[branch], clusters
    except IndexError:
        raise ValueError(f"branch {branch} out of range ({len(clusters)} branches)") from None


def branch_phase(rule: TransitionRule, k, branch=-1, merge_tol: float = 1e-9) -> float:
    """Eigenphase of a branch; ``branch`` indexes distinct (clustered)
    eigenphases in ascending order, ``"+"``/``"-"`` pick the top/bottom."""
    ph = dispersion(rule, k)
    sl, _ = _branch_slice(ph, branch, merge_tol)
    return float(ph[sl].mean())


def group_velocity(
    rule: TransitionRule,
    k,
    branch=-1,
    step: float = 1e-5,
    richardson: bool = True,
    gap_tol: float = 1e-6,
    merge_tol: float = 1e-9,
) -> np.ndarray:
    """Central-difference gradient of one dispersion branch.

    Exactly degenerate branches (e.g. the doubled Dirac bands) are treated
    as one branch; a crossing, detected as a near-miss gap at ``k`` or a
    change of multiplicity across the stencil, raises
    :class:`DegeneracyError`.
    """
    k = np.asarray(k, dtype=float).reshape(rule.dim)
    ph0 = dispersion(rule, k)
    sl, clusters = _branch_slice(ph0, branch, merge_tol)
    mult = [c.stop - c.start for c in clusters]
    for c in clusters:
        if c != sl and min(abs(ph0[c][0] - ph0[sl][-1]), abs(ph0[c][-1] - ph0[sl][0])) < gap_tol:
            raise DegeneracyError(f"branch {branch} is within {gap_tol} of another at k={k}")

    def value(kk):
        ph = dispersion(rule, kk)
        if [c.stop - c.start for c in _clusters(ph, merge_tol)] != mult:
            raise DegeneracyError(f"branch multiplicity changes near k={k}")
        return ph[sl].mean()

    def central(h):
        g = np.empty(rule.dim)
        for i in range(rule.dim):
            e = np.zeros(rule.dim)
            e[i] = h
            g[i] = (value(k + e) - value(k - e)) / (2 * h)
        return g

    if not richardson:
        return central(step)
    return (4 * central(step / 2) - central(step)) / 3


# --- small-k scaling ------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    slope: float
    prefactor: float
    magnitudes: np.ndarray
    residuals: np.ndarray


def _random_directions(n, d, rng):
    v = rng.normal(size=(n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def small_k_residual_fit(
    rule: TransitionRule,
    target: Callable[[np.ndarray], np.ndarray],
    magnitudes: Sequence[float],
    n_directions: int = 8,
    rng: np.random.Generator | None = None,
    subtract_offset: bool = False,
    floor: float = 1e-13,
    directions: np.ndarray | None = None,
) -> ScalingFit:
    """Fit ``log‖H_I(k) - target(k)‖ = log C + p·log|k|``.

    Residual norms are spectral norms. With ``subtract_offset`` the constant
    ``H_I(0) - target(0)`` is removed first. Returns slope ``p`` and
    prefactor ``C``.
    """
    mags = np.asarray(magnitudes, dtype=float)
    if mags.min() <= 0 or mags.max() / mags.min() < 10:
        raise ValueError("magnitudes must be positive and span at least one decade")
    rng = np.random.default_rng(0) if rng is None else rng
    dirs = _random_directions(n_directions, rule.dim, rng) if directions is None else np.atleast_2d(directions)
    zero = np.zeros(rule.dim)
    offset = interpolating_hamiltonian(rule, zero) - target(zero) if subtract_offset else 0.0
    xs, ys = [], []
    for m in mags:
        for d in dirs:
            k = m * d
            r = np.linalg.norm(interpolating_hamiltonian(rule, k) - target(k) - offset, 2)
            xs.append(m)
            ys.append(r)
    xs, ys = np.array(xs), np.array(ys)
    if np.all(ys < floor):
        raise DegenerateFitError("all residuals below the floating-point floor", ys)
    keep = ys >= floor
    slope, icpt = np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)
    return ScalingFit(float(slope), float(np.exp(icpt)), xs, ys)


# --- translation covariance on a torus ----------------------------------------

def _check_torus(rule, shape):
    offsets = [tuple(np.mod(c, shape)) for _, c, _ in rule.terms()]
    if rule.identity is None:
        offsets.append((0,) * rule.dim)
    if len(set(offsets)) != len(offsets):
        raise OverlapError(f"neighbourhood overlaps itself on a torus of shape {tuple(shape)}")


def torus_operator(
    rule: TransitionRule,
    size: int | Sequence[int],
    patch: Mapping[tuple[int, ...], Mapping[str, np.ndarray]] | None = None,
) -> np.ndarray:
    """Dense one-particle evolution matrix on the periodic lattice.

    ``patch`` maps a site to per-label replacement matrices used only for
    the rows of that site, which makes the rule site-dependent.
    """
    shape = np.broadcast_to(np.asarray(size, dtype=int), (rule.dim,))
    _check_torus(rule, shape)
    sites = list(itertools.product(*(range(n) for n in shape)))
    index = {site: i for i, site in enumerate(sites)}
    s = rule.s
    op = np.zeros((len(sites) * s, len(sites) * s), dtype=complex)
    patch = patch or {}
    for g in sites:
        row = index[g]
        local = patch.get(tuple(g), {})
        for lab, c, m in rule.terms():
            src = tuple(np.mod(np.array(g) - c, shape))
            col = index[src]
            op[row * s:(row + 1) * s, col * s:(col + 1) * s] += local.get(lab, m)
    return op


def translation_operator(shape: Sequence[int], shift: Sequence[int], s: int) -> np.ndarray:
    shape = tuple(int(n) for n in shape)
    sites = list(itertools.product(*(range(n) for n in shape)))
    index = {site: i for i, site in enumerate(sites)}
    perm = np.zeros((len(sites), len(sites)))
    for g in sites:
        perm[index[tuple(np.mod(np.add(g, shift), shape))], index[g]] = 1
    return np.kron(perm, np.eye(s))


def translation_covariance_residual(
    rule: TransitionRule,
    size: int | Sequence[int],
    samples: int = 4,
    rng: np.random.Generator | None = None,
    patch=None,
) -> float:
    shape = np.broadcast_to(np.asarray(size, dtype=int), (rule.dim,))
    op = torus_operator(rule, shape, patch)
    rng = np.random.default_rng(0) if rng is None else rng
    shifts = [np.eye(rule.dim, dtype=int)[i] for i in range(rule.dim)]
    shifts += [rng.integers(0, shape) for _ in range(samples)]
    worst = 0.0
    for sh in shifts:
        t = translation_operator(shape, sh, rule.s)
        worst = max(worst, float(np.abs(t @ op - op @ t).max()))
    return worst


def translation_covariance_check(
    rule: TransitionRule,
    size: int | Sequence[int],
    samples: int = 4,
    rng: np.random.Generator | None = None,
    tol: float = ALGEBRAIC_TOL,
    patch=None,
) -> bool:
    """Does the torus evolution commute with every lattice translation?"""
    return translation_covariance_residual(rule, size, samples, rng, patch) <= tol


# --- exports ------------------------------------------------------------------

def dispersion_table(rule: TransitionRule, ks) -> tuple[list[str], np.ndarray]:
    """Header and rows ``k_1..k_d, ω_1..ω_s`` for a CSV export."""
    ks = np.atleast_2d(np.asarray(ks, dtype=float))
    om = dispersion(rule, ks)
    header = [f"k{i + 1}" for i in range(rule.dim)] + [f"omega{j + 1}" for j in range(rule.s)]
    return header, np.hstack([ks, om])
