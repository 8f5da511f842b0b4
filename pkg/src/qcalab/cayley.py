"""Words, presentations and finite pieces of Cayley graphs.

Groups are handled combinatorially: a word is a path on a colored directed
graph, and a word is a relator exactly when the path it spells is closed.
Only Abelian presentations with explicit integer generator vectors get a
solved word problem (vector normal form); arbitrary colored graphs, such as
the Petersen graph, can still be walked and tested for homogeneity.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    MissingEdgeError,
    UnknownGeneratorError,
    UnreachableError,
    UnsupportedPresentationError,
)

Letter = tuple[int, int]


@dataclass(frozen=True)
class Generator:
    id: int
    name: str = ""
    inverse_of: int | None = None

    @property
    def self_inverse(self) -> bool:
        return self.inverse_of == self.id


@dataclass(frozen=True)
class Word:
    """A word over ``S ∪ S⁻¹``: a sequence of ``(generator id, ±1)`` letters."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(p)) for g, p in self.letters)
        for _, p in letters:
            if p not in (1, -1):
                raise ValueError(f"exponent must be +1 or -1, got {p}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -p) for g, p in reversed(self.letters)))

    def generators(self) -> set[int]:
        return {g for g, _ in self.letters}


EMPTY_WORD = Word()

_TOKEN = re.compile(r"([A-Za-z][0-9]*)(\^-1|\^\+?1)?")


def parse_word(text: str, names: Mapping[str, int]) -> Word:
    """Parse ``"aba^-1b^-1"`` or ``"h1 h2^-1"`` using a name -> id table."""
    letters = []
    pos = 0
    text = text.replace(" ", "")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        name, exp = m.group(1), m.group(2)
        if name not in names:
            raise UnknownGeneratorError(name)
        letters.append((names[name], -1 if exp == "^-1" else 1))
        pos = m.end()
    return Word(tuple(letters))


def _canonical_letter(letter: Letter, gens: Mapping[int, Generator]) -> Letter:
    g, p = letter
    gen = gens[g]
    if gen.inverse_of is None:
        return letter
    if gen.self_inverse:
        return (g, 1)
    # paired labels h, h' with h' = h^-1: rewrite onto the smaller id
    partner = gen.inverse_of
    if partner < g:
        return (partner, -p)
    return letter


def reduce_word(w: Word, generators: Iterable[Generator] | None = None) -> Word:
    """Free reduction of ``w``.

    When ``generators`` is given the letters are validated against it, and
    declared inverse pairings (including self-inverse labels) are honoured.
    """
    if generators is not None:
        gens = {g.id: g for g in generators}
        for g, _ in w.letters:
            if g not in gens:
                raise UnknownGeneratorError(g)
        letters = [_canonical_letter(lt, gens) for lt in w.letters]
    else:
        letters = list(w.letters)
    stack: list[Letter] = []
    for g, p in letters:
        if stack and stack[-1][0] == g and stack[-1][1] == -p:
            stack.pop()
        elif (
            stack
            and generators is not None
            and stack[-1] == (g, p)
            and gens[g].self_inverse
        ):
            stack.pop()
        else:
            stack.append((g, p))
    return Word(tuple(stack))


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[Generator, ...]
    relators: tuple[Word, ...] = ()
    vectors: Mapping[int, tuple[int, ...]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise ValueError("generator ids must be unique")
        for r in self.relators:
            unknown = r.generators() - set(ids)
            if unknown:
                raise UnknownGeneratorError(sorted(unknown)[0])
        if self.vectors is not None:
            vecs = {int(k): tuple(int(x) for x in v) for k, v in self.vectors.items()}
            if set(vecs) != set(ids):
                raise ValueError("every generator needs an integer vector")
            dims = {len(v) for v in vecs.values()}
            if len(dims) != 1:
                raise ValueError("generator vectors must share one dimension")
            object.__setattr__(self, "vectors", vecs)
            for r in self.relators:
                if any(self.word_vector(r)):
                    raise ValueError(f"relator {r} does not sum to zero")

    @property
    def abelian_rank(self) -> int | None:
        if self.vectors is None:
            return None
        return len(next(iter(self.vectors.values())))

    @property
    def names(self) -> dict[str, int]:
        return {g.name: g.id for g in self.generators if g.name}

    def word(self, text: str) -> Word:
        return parse_word(text, self.names)

    def word_vector(self, w: Word) -> tuple[int, ...]:
        if self.vectors is None:
            raise UnsupportedPresentationError("presentation has no integer vectors")
        total = [0] * self.abelian_rank
        for g, p in w:
            if g not in self.vectors:
                raise UnknownGeneratorError(g)
            for i, x in enumerate(self.vectors[g]):
                total[i] += p * x
        return tuple(total)


def _commutators(ids: Sequence[int]) -> list[Word]:
    return [
        Word(((a, 1), (b, 1), (a, -1), (b, -1)))
        for a, b in itertools.combinations(ids, 2)
    ]


def z1_presentation() -> GroupPresentation:
    return GroupPresentation((Generator(0, "h"),), (), {0: (1,)})


def z2_presentation() -> GroupPresentation:
    """``Z² = <a, b | a b a⁻¹ b⁻¹>``."""
    gens = (Generator(0, "a"), Generator(1, "b"))
    return GroupPresentation(gens, tuple(_commutators([0, 1])), {0: (1, 0), 1: (0, 1)})


def bcc_presentation() -> GroupPresentation:
    """Z³ on four generators with ``h1 h2 h3 h4 = e`` (body-centred cubic)."""
    gens = tuple(Generator(i, f"h{i + 1}") for i in range(4))
    vecs = {0: (1, 0, 0), 1: (0, 1, 0), 2: (0, 0, 1), 3: (-1, -1, -1)}
    rels = [Word(((0, 1), (1, 1), (2, 1), (3, 1)))] + _commutators(range(4))
    return GroupPresentation(gens, tuple(rels), vecs)


@dataclass(frozen=True)
class ColoredGraph:
    """Finite colored directed graph.

    ``edges`` holds ``(tail, head, color)`` triples. Colors listed in
    ``undirected`` are self-inverse and stored once per unordered pair.
    ``positions`` optionally maps vertices to group elements (integer
    vectors) for Cayley balls.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]
    colors: tuple[int, ...]
    undirected: frozenset[int] = frozenset()
    color_names: Mapping[int, str] = field(default_factory=dict)
    positions: Mapping[int, tuple[int, ...]] | None = None

    def __post_init__(self):
        out: dict[tuple[int, int], int] = {}
        inc: dict[tuple[int, int], int] = {}
        vset = set(self.vertices)
        for t, h, c in self.edges:
            if t not in vset or h not in vset:
                raise ValueError(f"edge ({t}, {h}) leaves the vertex set")
            if c not in self.colors:
                raise UnknownGeneratorError(c)
            pairs = [(t, h), (h, t)] if c in self.undirected else [(t, h)]
            for a, b in pairs:
                if (a, c) in out or (b, c) in inc:
                    raise ValueError(f"vertex has two {c}-edges in the same direction")
                out[(a, c)] = b
                inc[(b, c)] = a
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_in", inc)

    def step(self, v: int, color: int, exponent: int = 1) -> int:
        table = self._out if exponent == 1 or color in self.undirected else self._in
        try:
            return table[(v, color)]
        except KeyError:
            name = self.color_names.get(color, color)
            raise MissingEdgeError(
                f"no {name}^{exponent:+d} edge at vertex {v}"
            ) from None

    def is_regular(self) -> bool:
        """Every vertex has one outgoing and one incoming edge per color."""
        return all(
            (v, c) in self._out and (v, c) in self._in
            for v in self.vertices
            for c in self.colors
        )

    def degree(self, v: int) -> int:
        nbrs = 0
        for c in self.colors:
            if c in self.undirected:
                nbrs += (v, c) in self._out
            else:
                nbrs += ((v, c) in self._out) + ((v, c) in self._in)
        return nbrs

    def word(self, text: str) -> Word:
        return parse_word(text, {n: c for c, n in self.color_names.items()})

    def to_edge_list(self) -> str:
        """One ``tail head color direction`` record per line."""
        lines = []
        for t, h, c in self.edges:
            name = self.color_names.get(c, str(c))
            lines.append(f"{t} {h} {name} {'undirected' if c in self.undirected else 'directed'}")
        return "\n".join(lines) + "\n"


def apply_word(g: ColoredGraph, v: int, w: Word) -> int:
    for color, p in w:
        v = g.step(v, color, p)
    return v


@dataclass(frozen=True)
class HomogeneityReport:
    uniform: bool
    closed: Mapping[int, bool]
    endpoints: Mapping[int, int]

    @property
    def witnesses(self) -> dict[int, bool]:
        """Vertex -> closed flag, populated only when the sample splits."""
        return {} if self.uniform else dict(self.closed)


def homogeneity_path_check(
    g: ColoredGraph, w: Word, sample: Iterable[int] | None = None
) -> HomogeneityReport:
    """Is ``w`` closed everywhere or open everywhere on ``sample``?"""
    sample = g.vertices if sample is None else tuple(sample)
    ends = {v: apply_word(g, v, w) for v in sample}
    closed = {v: ends[v] == v for v in sample}
    return HomogeneityReport(len(set(closed.values())) <= 1, closed, ends)


def _require_abelian(p: GroupPresentation):
    if p.vectors is None:
        raise UnsupportedPresentationError(
            "only Abelian presentations with integer generator vectors are supported"
        )


def _moves(p: GroupPresentation):
    for g in p.generators:
        v = p.vectors[g.id]
        yield g.id, 1, v
        yield g.id, -1, tuple(-x for x in v)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def cayley_ball(p: GroupPresentation, radius: int) -> ColoredGraph:
    """Word-metric ball of ``radius`` around the identity.

    Vertices are numbered in breadth-first order; ``positions`` gives each
    vertex's integer normal form. Edges leaving the ball are dropped, so
    paths that reach the boundary raise :class:`MissingEdgeError`.
    """
    _require_abelian(p)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    origin = (0,) * p.abelian_rank
    dist = {origin: 0}
    queue = deque([origin])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for _, _, v in _moves(p):
            y = _add(x, v)
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    ids = {x: i for i, x in enumerate(dist)}
    edges = []
    for x, i in ids.items():
        for g in p.generators:
            y = _add(x, p.vectors[g.id])
            if y in ids:
                edges.append((i, ids[y], g.id))
    return ColoredGraph(
        vertices=tuple(ids.values()),
        edges=tuple(edges),
        colors=tuple(g.id for g in p.generators),
        color_names={g.id: g.name for g in p.generators if g.name},
        positions={i: x for x, i in ids.items()},
    )


def word_metric(
    p: GroupPresentation,
    g1: Sequence[int],
    g2: Sequence[int],
    bound: int = 64,
) -> int:
    """Length of the shortest word leading from ``g1`` to ``g2``."""
    _require_abelian(p)
    start, target = tuple(int(x) for x in g1), tuple(int(x) for x in g2)
    if len(start) != p.abelian_rank or len(target) != p.abelian_rank:
        raise ValueError("group elements must match the presentation rank")
    diff = tuple(b - a for a, b in zip(start, target))
    origin = (0,) * p.abelian_rank
    if diff == origin:
        return 0
    seen = {origin}
    frontier = [origin]
    for depth in range(1, bound + 1):
        nxt = []
        for x in frontier:
            for _, _, v in _moves(p):
                y = _add(x, v)
                if y == diff:
                    return depth
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    raise UnreachableError(f"{target} not reached from {start} within {bound} steps")


# --- Petersen graph -------------------------------------------------------

B_COLOR, R_COLOR = 0, 1

# outer 5-cycle, spokes, inner pentagram
_PETERSEN_EDGES = (
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 1),
    (1, 6), (2, 7), (3, 8), (4, 9), (5, 10),
    (6, 8), (8, 10), (10, 7), (7, 9), (9, 6),
)


def _perfect_matchings():
    for combo in itertools.combinations(range(len(_PETERSEN_EDGES)), 5):
        covered = set()
        for i in combo:
            covered.update(_PETERSEN_EDGES[i])
        if len(covered) == 10:
            yield combo


def _cycles(edge_ids):
    adj = {v: [] for v in range(1, 11)}
    for i in edge_ids:
        a, b = _PETERSEN_EDGES[i]
        adj[a].append(b)
        adj[b].append(a)
    if any(len(n) != 2 for n in adj.values()):
        return None
    seen, cycles = set(), []
    for v in range(1, 11):
        if v in seen:
            continue
        cyc, prev, cur = [v], None, v
        seen.add(v)
        while True:
            nxt = [w for w in adj[cur] if w != prev and w not in seen]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            cyc.append(cur)
            seen.add(cur)
        cycles.append(cyc)
    return cycles


def _petersen_from(b_pairs, r_arcs, relabel=None):
    relabel = relabel or {v: v for v in range(1, 11)}
    edges = [(relabel[a], relabel[b], B_COLOR) for a, b in b_pairs]
    edges += [(relabel[a], relabel[b], R_COLOR) for a, b in r_arcs]
    edges.sort()
    return ColoredGraph(
        vertices=tuple(range(1, 11)),
        edges=tuple(edges),
        colors=(B_COLOR, R_COLOR),
        undirected=frozenset({B_COLOR}),
        color_names={B_COLOR: "b", R_COLOR: "r"},
    )


def petersen_colorings() -> list[ColoredGraph]:
    """Every admissible coloring of the Petersen graph, lexicographic order.

    Admissible: one undirected color ``b`` forming a perfect matching and
    one directed color ``r`` giving each vertex exactly one outgoing and one
    incoming edge. The complement of a perfect matching is always two
    5-cycles, so there are 6 matchings x 4 orientations.
    """
    out = []
    for matching in _perfect_matchings():
        rest = [i for i in range(len(_PETERSEN_EDGES)) if i not in matching]
        cycles = _cycles(rest)
        if cycles is None:
            continue
        b_pairs = [_PETERSEN_EDGES[i] for i in matching]
        for flips in itertools.product((False, True), repeat=len(cycles)):
            arcs = []
            for cyc, flip in zip(cycles, flips):
                c = cyc[::-1] if flip else cyc
                arcs += [(c[j], c[(j + 1) % len(c)]) for j in range(len(c))]
            out.append(_petersen_from(b_pairs, arcs))
    return out


def petersen_graph() -> ColoredGraph:
    """Canonical directed, colored Petersen graph.

    Takes the first admissible coloring on which ``brrbr`` is closed at some
    vertices and open at others, and renumbers vertices so that the path is
    closed at vertex 1 and leads from vertex 2 to vertex 3.
    """
    for g in petersen_colorings():
        w = g.word("brrbr")
        rep = homogeneity_path_check(g, w)
        if rep.uniform:
            continue
        closed = min(v for v, c in rep.closed.items() if c)
        opened = min(
            v for v, c in rep.closed.items() if not c and rep.endpoints[v] != closed
        )
        end = rep.endpoints[opened]
        order = [closed, opened, end] + [
            v for v in g.vertices if v not in (closed, opened, end)
        ]
        relabel = {old: new for new, old in enumerate(order, start=1)}
        b_pairs = [(t, h) for t, h, c in g.edges if c == B_COLOR]
        r_arcs = [(t, h) for t, h, c in g.edges if c == R_COLOR]
        return _petersen_from(b_pairs, r_arcs, relabel)
    raise AssertionError("no admissible Petersen coloring splits brrbr")
