"""Oriented link diagrams, PD and braid parsers, and built-in link families.

PD convention: ``X[i, j, k, l]`` lists the four edges at a crossing
counterclockwise, starting with the incoming under-edge ``i``; ``k`` is the
outgoing under-edge and ``j``/``l`` are the over-edges.  A crossing is
positive when the over-strand runs ``l -> j`` and negative when it runs
``j -> l``.

Braid convention: strands travel upward, positions are numbered left to
right, and in ``s_i`` the strand moving from position ``i`` to ``i + 1``
passes over, which makes every ``s_i`` a positive crossing.

A component with no crossings (from a braid strand that never crosses) is a
*free loop*: a single edge label that appears in no crossing.
"""
from __future__ import annotations

import json
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BORROMEAN_BRAID",
    "BraidWord",
    "Crossing",
    "InconsistentEdges",
    "LinkDiagram",
    "MalformedBraid",
    "MalformedPD",
    "NonClosedComponent",
    "PDError",
    "band_sum_borromean",
    "borromean",
    "braid_closure",
    "figure_eight",
    "hopf_link",
    "linking_matrix",
    "parse_braid",
    "parse_pd",
    "render_pd",
    "reverse_component",
    "trefoil",
    "unknot",
    "unlink",
]


class PDError(ValueError):
    pass


class MalformedPD(PDError):
    pass


class InconsistentEdges(PDError):
    pass


class NonClosedComponent(PDError):
    pass


class MalformedBraid(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    """Four edge labels in PD order plus the crossing sign (+1 or -1)."""

    edges: tuple[int, int, int, int]
    sign: int

    @property
    def under_in(self) -> int:
        return self.edges[0]

    @property
    def under_out(self) -> int:
        return self.edges[2]

    @property
    def over_in(self) -> int:
        return self.edges[3] if self.sign > 0 else self.edges[1]

    @property
    def over_out(self) -> int:
        return self.edges[1] if self.sign > 0 else self.edges[3]


class LinkDiagram:
    """A validated oriented link diagram.

    ``edge_component`` maps every edge label (including free loops) to its
    component index; components are numbered by their smallest edge label.
    """

    __slots__ = ("crossings", "edge_component", "ncomponents", "_orbits")

    def __init__(self, crossings: Iterable[Crossing], free_loops: Iterable[int] = ()):
        crossings = tuple(crossings)
        free_loops = tuple(free_loops)
        orbits = _trace(crossings, free_loops)
        order = sorted(range(len(orbits)), key=lambda c: min(orbits[c]))
        orbits = [orbits[c] for c in order]
        edge_component = {e: ci for ci, orbit in enumerate(orbits) for e in orbit}
        object.__setattr__(self, "crossings", crossings)
        object.__setattr__(self, "edge_component", edge_component)
        object.__setattr__(self, "ncomponents", len(orbits))
        object.__setattr__(self, "_orbits", tuple(tuple(o) for o in orbits))

    def __setattr__(self, name, value):
        raise AttributeError("LinkDiagram is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinkDiagram):
            return NotImplemented
        return self.crossings == other.crossings and self.edge_component == other.edge_component

    def __hash__(self) -> int:
        return hash((self.crossings, tuple(sorted(self.edge_component.items()))))

    def __repr__(self) -> str:
        return f"LinkDiagram(crossings={len(self.crossings)}, ncomponents={self.ncomponents})"

    @property
    def edges(self) -> list[int]:
        return sorted(self.edge_component)

    def component_edges(self, i: int) -> tuple[int, ...]:
        """Edges of component ``i`` in orientation order, starting at the smallest label."""
        return self._orbits[i]

    @property
    def free_loops(self) -> list[int]:
        used = {e for c in self.crossings for e in c.edges}
        return [e for e in self.edges if e not in used]

    def to_dict(self) -> dict:
        return {
            "crossings": [{"pd": list(c.edges), "sign": c.sign} for c in self.crossings],
            "edge_component": {str(e): c for e, c in sorted(self.edge_component.items())},
            "ncomponents": self.ncomponents,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> LinkDiagram:
        try:
            crossings = [Crossing(tuple(int(x) for x in c["pd"]), int(c["sign"])) for c in data["crossings"]]
            edge_component = {int(k): int(v) for k, v in data["edge_component"].items()}
            ncomp = int(data["ncomponents"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedPD(f"bad diagram record: {exc}") from None
        for c in crossings:
            if len(c.edges) != 4 or c.sign not in (1, -1):
                raise MalformedPD(f"bad crossing record {c}")
        used = {e for c in crossings for e in c.edges}
        d = cls(crossings, [e for e in edge_component if e not in used])
        if d.edge_component != edge_component or d.ncomponents != ncomp:
            raise InconsistentEdges("edge_component/ncomponents disagree with the crossings")
        return d

    @classmethod
    def from_json(cls, text: str) -> LinkDiagram:
        return cls.from_dict(json.loads(text))


def _trace(crossings: Sequence[Crossing], free_loops: Sequence[int]) -> list[list[int]]:
    """Check the edge structure and return each component's edges in order."""
    heads: dict[int, list[int]] = defaultdict(list)  # edge -> crossings it enters
    tails: dict[int, list[int]] = defaultdict(list)  # edge -> crossings it leaves
    count: dict[int, int] = defaultdict(int)
    for ci, c in enumerate(crossings):
        if c.sign not in (1, -1):
            raise MalformedPD(f"crossing {ci} has sign {c.sign}")
        for e in c.edges:
            count[e] += 1
        heads[c.under_in].append(ci)
        heads[c.over_in].append(ci)
        tails[c.under_out].append(ci)
        tails[c.over_out].append(ci)
    bad = sorted(e for e, k in count.items() if k != 2)
    if bad:
        raise InconsistentEdges(f"edge labels not appearing exactly twice: {bad}")
    for e in free_loops:
        if e in count:
            raise InconsistentEdges(f"free loop {e} also appears in a crossing")
    for e in count:
        if len(heads[e]) != 1 or len(tails[e]) != 1:
            raise NonClosedComponent(f"edge {e} is not traversed consistently")

    # the strand leaving crossing ci along its under (resp. over) strand
    nxt: dict[int, int] = {}
    for c in crossings:
        nxt[c.under_in] = c.under_out
        nxt[c.over_in] = c.over_out
    seen: set[int] = set()
    orbits: list[list[int]] = []
    for start in sorted(count):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        e = nxt[start]
        while e != start:
            if e in seen:
                raise NonClosedComponent(f"strand through edge {start} does not close up")
            orbit.append(e)
            seen.add(e)
            e = nxt[e]
        orbits.append(orbit)
    orbits.extend([e] for e in free_loops)
    return orbits


# --- PD text -----------------------------------------------------------------

_PD_CROSSING = re.compile(r"X\s*\[([^\]]*)\]")


def parse_pd(text: str) -> LinkDiagram:
    """Parse ``X[1,4,2,5] X[3,6,4,1] ...`` into a :class:`LinkDiagram`.

    Strand directions come from the under-strands (``i`` incoming, ``k``
    outgoing); a component that never passes under is oriented so that its
    edge numbers increase.
    """
    body = text.strip()
    if body.startswith("PD[") and body.endswith("]"):
        body = body[3:-1]
    tuples: list[tuple[int, int, int, int]] = []
    pos = 0
    for m in _PD_CROSSING.finditer(body):
        if body[pos : m.start()].strip(" ,\n\t"):
            raise MalformedPD(f"unexpected text {body[pos:m.start()].strip()!r}")
        pos = m.end()
        fields = [f.strip() for f in m.group(1).split(",")]
        if len(fields) != 4:
            raise MalformedPD(f"crossing X[{m.group(1)}] must have 4 entries")
        try:
            tuples.append(tuple(int(f) for f in fields))
        except ValueError:
            raise MalformedPD(f"non-integer entry in X[{m.group(1)}]") from None
    if body[pos:].strip(" ,\n\t"):
        raise MalformedPD(f"unexpected text {body[pos:].strip()!r}")
    if not tuples:
        raise MalformedPD("no crossings found")
    return LinkDiagram(_orient_pd(tuples))


def _orient_pd(tuples: list[tuple[int, int, int, int]]) -> list[Crossing]:
    occ: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for ci, t in enumerate(tuples):
        for s, e in enumerate(t):
            occ[e].append((ci, s))
    bad = sorted(e for e, o in occ.items() if len(o) != 2)
    if bad:
        raise InconsistentEdges(f"edge labels not appearing exactly twice: {bad}")

    over_dir: dict[int, int] = {}  # crossing -> +1 if over runs l->j
    visited: set[tuple[int, int]] = set()
    for start in sorted(occ):
        if occ[start][0] in visited:
            continue
        # walk the strand: leave through the opposite slot, enter the next edge
        passes: list[tuple[int, int, int]] = []  # (crossing, slot entered, edge entered from)
        e, (ci, s) = start, occ[start][0]
        while True:
            visited.add((ci, s))
            passes.append((ci, s, e))
            out_slot = (s + 2) % 4
            visited.add((ci, out_slot))
            e = tuples[ci][out_slot]
            a, b = occ[e]
            ci, s = b if a == (ci, out_slot) else a
            if (ci, s) in visited:
                break
        forward = {s == 0 for _, s, _ in passes if s in (0, 2)}
        if len(forward) > 1:
            raise NonClosedComponent(f"under-strands along edge {start} point both ways")
        if forward:
            fwd = forward.pop()
        else:
            edges = [p[2] for p in passes]
            fwd = _ascending(edges)
        for ci, s, _ in passes:
            if s in (1, 3):
                enters_at = s if fwd else (s + 2) % 4
                over_dir[ci] = 1 if enters_at == 3 else -1
    return [Crossing(t, over_dir[ci]) for ci, t in enumerate(tuples)]


def _ascending(cycle: list[int]) -> bool:
    """Whether walking ``cycle`` in list order follows increasing edge labels."""
    n = len(cycle)
    if n <= 2:
        return cycle[0] <= cycle[-1]
    up = sum(1 for a, b in zip(cycle, cycle[1:] + cycle[:1]) if b > a)
    return up >= n - up


def render_pd(d: LinkDiagram) -> str:
    return " ".join(f"X[{','.join(str(e) for e in c.edges)}]" for c in d.crossings)


# --- braids ------------------------------------------------------------------


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.strands < 1:
            raise MalformedBraid("a braid needs at least one strand")
        for g in self.letters:
            if g == 0 or abs(g) > self.strands - 1:
                raise MalformedBraid(f"generator {g} out of range for {self.strands} strands")

    def permutation(self) -> list[int]:
        """``perm[p]`` is the bottom position of the strand that ends at top position ``p``."""
        pos = list(range(self.strands))
        for g in self.letters:
            i = abs(g) - 1
            pos[i], pos[i + 1] = pos[i + 1], pos[i]
        return pos

    def __pow__(self, n: int) -> BraidWord:
        return BraidWord(self.strands, self.letters * n)

    def __str__(self) -> str:
        return " ".join(f"s{abs(g)}" if g > 0 else f"s{abs(g)}^-1" for g in self.letters)


_BRAID_TOKEN = re.compile(r"^s(\d+)(?:\^([+-]?\d+))?$")


def parse_braid(text: str, strands: int | None = None) -> BraidWord:
    """Parse ``"s1 s2^-1 s1"``; ``^k`` repeats a generator ``|k|`` times."""
    letters: list[int] = []
    for tok in text.replace(",", " ").split():
        m = _BRAID_TOKEN.match(tok)
        if not m:
            raise MalformedBraid(f"bad braid letter {tok!r}")
        g = int(m.group(1))
        k = int(m.group(2)) if m.group(2) is not None else 1
        if g < 1:
            raise MalformedBraid(f"bad generator index in {tok!r}")
        letters.extend([g if k > 0 else -g] * abs(k))
    if strands is None:
        strands = max((abs(g) for g in letters), default=0) + 1
    return BraidWord(strands, tuple(letters))


def braid_closure(b: BraidWord) -> LinkDiagram:
    """Closure of ``b``, with edges renumbered consecutively along each component."""
    label = iter(range(1, 10**9))
    bottom = [next(label) for _ in range(b.strands)]
    current = list(bottom)
    raw: list[tuple[tuple[int, int, int, int], int]] = []
    for g in b.letters:
        i = abs(g) - 1
        a_in, b_in = current[i], current[i + 1]  # a moves right, b moves left
        a_out, b_out = next(label), next(label)
        if g > 0:
            raw.append(((b_in, a_out, b_out, a_in), 1))
        else:
            raw.append(((a_in, b_in, a_out, b_out), -1))
        current[i], current[i + 1] = b_out, a_out
    # closing arcs identify the top edge at each position with the bottom edge
    ident = {top: bot for top, bot in zip(current, bottom)}
    crossings = [Crossing(tuple(ident.get(e, e) for e in t), s) for t, s in raw]
    used = {e for c in crossings for e in c.edges}
    free = [e for e in bottom if e not in used]
    return _relabel(LinkDiagram(crossings, free), start_order=bottom)


def _relabel(d: LinkDiagram, start_order: Sequence[int] | None = None) -> LinkDiagram:
    """Renumber edges 1, 2, ... consecutively along each component."""
    nxt: dict[int, int] = {}
    for c in d.crossings:
        nxt[c.under_in] = c.under_out
        nxt[c.over_in] = c.over_out
    order = list(start_order) if start_order is not None else []
    order += [e for e in d.edges if e not in order]
    new: dict[int, int] = {}
    k = 1
    for start in order:
        if start in new:
            continue
        e = start
        while True:
            new[e] = k
            k += 1
            e = nxt.get(e, e)
            if e == start:
                break
    crossings = [Crossing(tuple(new[e] for e in c.edges), c.sign) for c in d.crossings]
    return LinkDiagram(crossings, [new[e] for e in d.free_loops])


def reverse_component(d: LinkDiagram, i: int) -> LinkDiagram:
    """Reverse the orientation of component ``i``."""
    if not 0 <= i < d.ncomponents:
        raise IndexError(f"no component {i}")
    comp = d.edge_component
    out = []
    for c in d.crossings:
        under_rev = comp[c.under_in] == i
        over_rev = comp[c.over_in] == i
        edges = c.edges
        if under_rev:
            edges = (edges[2], edges[3], edges[0], edges[1])
        sign = -c.sign if under_rev != over_rev else c.sign
        out.append(Crossing(edges, sign))
    return _relabel(LinkDiagram(out, d.free_loops))


def linking_matrix(d: LinkDiagram) -> np.ndarray:
    n = d.ncomponents
    twice = np.zeros((n, n), dtype=np.int64)
    for c in d.crossings:
        a, b = d.edge_component[c.under_in], d.edge_component[c.over_in]
        if a != b:
            twice[a, b] += c.sign
            twice[b, a] += c.sign
    if np.any(twice % 2):
        raise InconsistentEdges("odd signed crossing count between two components")
    return twice // 2


# --- built-in links ----------------------------------------------------------


def unknot() -> LinkDiagram:
    return braid_closure(BraidWord(1, ()))


def unlink(n: int) -> LinkDiagram:
    return braid_closure(BraidWord(n, ()))


def trefoil() -> LinkDiagram:
    return braid_closure(BraidWord(2, (1, 1, 1)))


def figure_eight() -> LinkDiagram:
    return braid_closure(BraidWord(3, (1, -2, 1, -2)))


def hopf_link() -> LinkDiagram:
    """The positive Hopf link (both crossings positive)."""
    return braid_closure(BraidWord(2, (1, 1)))


BORROMEAN_BRAID = BraidWord(3, (1, -2) * 3)


def borromean() -> LinkDiagram:
    return band_sum_borromean(1)


def band_sum_borromean(n: int) -> LinkDiagram:
    """``n`` stacked Borromean patterns, closed up componentwise."""
    if n < 1:
        raise ValueError("band sum needs n >= 1")
    return braid_closure(BORROMEAN_BRAID**n)
