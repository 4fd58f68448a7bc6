"""Milnor invariants of length at most 3 from Magnus expansions of longitudes.

The Magnus map sends a generator to ``1 + X`` and its inverse to
``1 - X + X^2 - ...`` in noncommuting symbols, truncated at a fixed degree.

For ``mu_bar_123`` every Wirtinger arc of component ``j`` is written as a
conjugate ``g m_j g^-1`` of that component's base meridian, where ``g`` is the
product of over-arc meridians met while walking from the base arc.  To degree
2 the image is ``1 + X_j + [G, X_j]`` with ``G`` the degree-one part of the
Magnus image of ``g``; errors in ``G`` itself only enter at degree 3, so
collapsing the letters of ``g`` to their components is exact here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .foxalex import Word, ZeroLinkingRequired, arc_of_edge, wirtinger
from .linkrep import LinkDiagram, linking_matrix

__all__ = [
    "Longitude",
    "TruncatedSeries",
    "WrongComponentCount",
    "arc_conjugators",
    "longitude",
    "longitude_series",
    "magnus",
    "magnus_substitute",
    "mu_bar_123",
]


class WrongComponentCount(ValueError):
    pass


class TruncatedSeries:
    """Noncommutative power series in ``X_0 .. X_{n-1}`` modulo degree ``> degree``."""

    __slots__ = ("nvars", "degree", "coeffs")

    def __init__(self, nvars: int, degree: int, coeffs: Mapping[tuple[int, ...], int] | None = None):
        self.nvars = nvars
        self.degree = degree
        self.coeffs = {
            tuple(w): int(c) for w, c in (coeffs or {}).items() if c and len(w) <= degree
        }

    @classmethod
    def one(cls, nvars: int, degree: int) -> TruncatedSeries:
        return cls(nvars, degree, {(): 1})

    @classmethod
    def symbol(cls, nvars: int, degree: int, i: int) -> TruncatedSeries:
        return cls(nvars, degree, {(i,): 1})

    def __getitem__(self, word) -> int:
        return self.coeffs.get(tuple(word), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.nvars, self.degree, self.coeffs) == (other.nvars, other.degree, other.coeffs)

    def _check(self, other: TruncatedSeries) -> None:
        if (self.nvars, self.degree) != (other.nvars, other.degree):
            raise ValueError("series with different symbol counts or degree caps")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0) + c
        return TruncatedSeries(self.nvars, self.degree, out)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries(self.nvars, self.degree, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        out: dict[tuple[int, ...], int] = {}
        cap = self.degree
        for w1, c1 in self.coeffs.items():
            for w2, c2 in other.coeffs.items():
                if len(w1) + len(w2) <= cap:
                    w = w1 + w2
                    out[w] = out.get(w, 0) + c1 * c2
        return TruncatedSeries(self.nvars, cap, out)

    def inverse(self) -> TruncatedSeries:
        """Inverse of a series with constant term 1."""
        if self[()] != 1:
            raise ValueError("only series with constant term 1 are inverted")
        y = self - TruncatedSeries.one(self.nvars, self.degree)
        result = TruncatedSeries.one(self.nvars, self.degree)
        power = TruncatedSeries.one(self.nvars, self.degree)
        for k in range(1, self.degree + 1):
            power = power * y
            result = result + power if k % 2 == 0 else result - power
        return result

    def homogeneous(self, k: int) -> dict[tuple[int, ...], int]:
        return {w: c for w, c in self.coeffs.items() if len(w) == k}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for w in sorted(self.coeffs, key=lambda w: (len(w), w)):
            c = self.coeffs[w]
            mono = "".join(f"X{i + 1}" for i in w) or "1"
            parts.append(f"{c:+d}*{mono}" if w else f"{c:+d}")
        return " ".join(parts)


def magnus_substitute(
    w: Sequence[tuple[int, int]], images: Mapping[int, TruncatedSeries] | Sequence[TruncatedSeries]
) -> TruncatedSeries:
    """Product of the images of the letters of ``w`` (inverses for negative exponents)."""
    first = next(iter(images.values() if isinstance(images, Mapping) else images))
    inverses: dict[int, TruncatedSeries] = {}
    result = TruncatedSeries.one(first.nvars, first.degree)
    for g, e in w:
        if e > 0:
            result = result * images[g]
        else:
            if g not in inverses:
                inverses[g] = images[g].inverse()
            result = result * inverses[g]
    return result


def magnus(w: Sequence[tuple[int, int]], symbol_of: Mapping[int, int] | Sequence[int], degree: int, nvars: int | None = None) -> TruncatedSeries:
    """Magnus expansion with generator ``g`` sent to ``1 + X_{symbol_of[g]}``."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    values = list(symbol_of.values() if isinstance(symbol_of, Mapping) else symbol_of)
    if nvars is None:
        nvars = max(values, default=-1) + 1
    keys = symbol_of.keys() if isinstance(symbol_of, Mapping) else range(len(values))
    one = TruncatedSeries.one(nvars, degree)
    images = {g: one + TruncatedSeries.symbol(nvars, degree, symbol_of[g]) for g in keys}
    if not w:
        return one
    return magnus_substitute(w, images)


@dataclass(frozen=True)
class Longitude:
    component: int
    word: Word
    base_arc: int


def _under_passes(d: LinkDiagram, i: int, arc: Mapping[int, int]) -> list[tuple[int, int]]:
    """(over-arc, sign) for each under-crossing met walking component ``i``."""
    under_at = {c.under_in: c for c in d.crossings}
    passes = []
    for e in d.component_edges(i):
        c = under_at.get(e)
        if c is not None:
            passes.append((arc[c.over_in], c.sign))
    return passes


def longitude(d: LinkDiagram, i: int) -> Longitude:
    """Zero-framed longitude of component ``i`` as a word in arc generators.

    The base arc holds the component's smallest edge.  With relations
    ``b = o^e a o^-e`` the product of the over-arc letters in reverse order of
    encounter commutes with the base meridian.
    """
    if not 0 <= i < d.ncomponents:
        raise IndexError(f"no component {i}")
    arc = arc_of_edge(d)
    base = arc[d.component_edges(i)[0]]
    passes = _under_passes(d, i, arc)
    comp_of_arc = {a: d.edge_component[e] for e, a in arc.items()}
    writhe = sum(s for o, s in passes if comp_of_arc[o] == i)
    word = tuple(reversed(passes))
    if writhe:
        word += ((base, -1 if writhe > 0 else 1),) * abs(writhe)
    return Longitude(i, word, base)


def arc_conjugators(d: LinkDiagram) -> dict[int, tuple[int, ...]]:
    """For each arc, the abelianized conjugator taking its base meridian to it."""
    arc = arc_of_edge(d)
    comp_of_arc = {a: d.edge_component[e] for e, a in arc.items()}
    under_at = {c.under_in: c for c in d.crossings}
    out: dict[int, tuple[int, ...]] = {}
    n = d.ncomponents
    for i in range(n):
        g = [0] * n
        for e in d.component_edges(i):
            out.setdefault(arc[e], tuple(g))
            c = under_at.get(e)
            if c is not None:
                g[comp_of_arc[arc[c.over_in]]] += c.sign
    return out


def _arc_images(d: LinkDiagram, degree: int = 2) -> dict[int, TruncatedSeries]:
    if degree > 2:
        raise ValueError("arc images are only exact to degree 2")
    p = wirtinger(d)
    n = d.ncomponents
    conj = arc_conjugators(d)
    images = {}
    for a, j in enumerate(p.generator_component):
        x = TruncatedSeries.symbol(n, degree, j)
        g = TruncatedSeries(n, degree, {(k,): c for k, c in enumerate(conj[a])})
        images[a] = TruncatedSeries.one(n, degree) + x + g * x - x * g
    return images


def longitude_series(d: LinkDiagram, i: int, degree: int = 2) -> TruncatedSeries:
    """Magnus image of the zero-framed longitude in base-meridian symbols."""
    lam = longitude(d, i)
    if not lam.word:
        return TruncatedSeries.one(d.ncomponents, degree)
    return magnus_substitute(lam.word, _arc_images(d, degree))


def mu_bar_123(d: LinkDiagram) -> int:
    """Coefficient of ``X_1 X_2`` in the Magnus image of the third longitude."""
    if d.ncomponents != 3:
        raise WrongComponentCount(f"mu_bar_123 needs 3 components, got {d.ncomponents}")
    lk = linking_matrix(d)
    if lk.any():
        raise ZeroLinkingRequired(f"linking matrix is not zero: {lk.tolist()}")
    return longitude_series(d, 2)[(0, 1)]
