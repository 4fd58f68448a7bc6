"""Wirtinger presentations, Fox calculus and Alexander polynomials.

Generators are the arcs of a diagram (maximal over-passing strands), each a
meridian of its component.  At a crossing with sign ``e``, over-arc ``o`` and
under-arcs ``a -> b`` the relation is ``b = o^e a o^-e``.

Alexander polynomials come from the elementary ideal of the Fox matrix with
one column deleted.  Before taking maximal minors the matrix is shrunk by
pivoting on unit entries (``±t^k``); this leaves the gcd of the maximal minors
unchanged up to units.  :func:`maximal_minors` keeps the plain dense route
around for cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .laurent import LaurentPoly, NotDivisible, lp_exact_div, lp_gcd
from .linkrep import LinkDiagram, linking_matrix

__all__ = [
    "AlexanderMatrix",
    "GroupPresentation",
    "NotAKnot",
    "Word",
    "ZeroLinkingRequired",
    "alexander_matrix",
    "alexander_poly",
    "alexander_poly_knot",
    "alexander_poly_link",
    "arc_of_edge",
    "d_zero",
    "determinant",
    "fox_derivative_abelianized",
    "maximal_minors",
    "reduced_alexander",
    "wirtinger",
]

# a free word: sequence of (generator, +1 | -1)
Word = tuple[tuple[int, int], ...]


class NotAKnot(ValueError):
    pass


class ZeroLinkingRequired(ValueError):
    pass


@dataclass(frozen=True)
class GroupPresentation:
    generator_component: tuple[int, ...]
    relators: tuple[Word, ...]
    ncomponents: int

    @property
    def ngenerators(self) -> int:
        return len(self.generator_component)

    def abelianization(self) -> tuple[int, tuple[int, ...]]:
        """Free rank and torsion coefficients of the abelianized group."""
        from sympy import Matrix, ZZ
        from sympy.matrices.normalforms import invariant_factors

        g = self.ngenerators
        if not self.relators:
            return g, ()
        rows = []
        for r in self.relators:
            row = [0] * g
            for x, e in r:
                row[x] += e
            rows.append(row)
        factors = [int(f) for f in invariant_factors(Matrix(rows), domain=ZZ)]
        nonzero = [abs(f) for f in factors if f != 0]
        return g - len(nonzero), tuple(f for f in nonzero if f != 1)


def arc_of_edge(d: LinkDiagram) -> dict[int, int]:
    """Map each edge to its arc index; arcs are numbered by smallest edge."""
    parent = {e: e for e in d.edge_component}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for c in d.crossings:
        a, b = find(c.over_in), find(c.over_out)
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(e) for e in parent})
    index = {r: i for i, r in enumerate(roots)}
    return {e: index[find(e)] for e in parent}


def wirtinger(d: LinkDiagram) -> GroupPresentation:
    arc = arc_of_edge(d)
    narcs = max(arc.values(), default=-1) + 1
    comp = [0] * narcs
    for e, a in arc.items():
        comp[a] = d.edge_component[e]
    relators = []
    for c in d.crossings:
        o, a, b, s = arc[c.over_in], arc[c.under_in], arc[c.under_out], c.sign
        relators.append(((o, s), (a, 1), (o, -s), (b, -1)))
    return GroupPresentation(tuple(comp), tuple(relators), d.ncomponents)


def fox_derivative_abelianized(
    w: Sequence[tuple[int, int]], g: int, varmap: Mapping[int, int] | Sequence[int], nvars: int | None = None
) -> LaurentPoly:
    """Image of the Fox derivative ``dw/dg`` under generator ``x -> t_{varmap[x]}``."""
    if nvars is None:
        values = varmap.values() if isinstance(varmap, Mapping) else varmap
        nvars = max(values, default=-1) + 1
    prefix = [0] * nvars
    terms: dict[tuple[int, ...], int] = {}
    for x, e in w:
        v = varmap[x]
        if x == g:
            if e > 0:
                key = tuple(prefix)
                terms[key] = terms.get(key, 0) + 1
            else:
                after = list(prefix)
                after[v] -= 1
                key = tuple(after)
                terms[key] = terms.get(key, 0) - 1
        prefix[v] += e
    return LaurentPoly(nvars, terms)


@dataclass(frozen=True)
class AlexanderMatrix:
    entries: tuple[tuple[LaurentPoly, ...], ...]
    generator_component: tuple[int, ...]
    nvars: int

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.generator_component)

    def column_deleted(self, j: int) -> list[list[LaurentPoly]]:
        return [[x for k, x in enumerate(row) if k != j] for row in self.entries]


def alexander_matrix(p: GroupPresentation) -> AlexanderMatrix:
    n = p.ncomponents
    varmap = p.generator_component
    rows = tuple(
        tuple(fox_derivative_abelianized(r, g, varmap, n) for g in range(p.ngenerators))
        for r in p.relators
    )
    return AlexanderMatrix(rows, p.generator_component, n)


def determinant(m: Sequence[Sequence[LaurentPoly]], nvars: int) -> LaurentPoly:
    """Fraction-free (Bareiss) determinant over the Laurent ring."""
    n = len(m)
    if n == 0:
        return LaurentPoly.one(nvars)
    a = [list(row) for row in m]
    sign = 1
    prev = LaurentPoly.one(nvars)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly.zero(nvars)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = lp_exact_div(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def maximal_minors(m: Sequence[Sequence[LaurentPoly]], ncols: int, nvars: int) -> list[LaurentPoly]:
    """All ``ncols x ncols`` minors; an empty list stands for the zero ideal."""
    rows = len(m)
    if rows < ncols:
        return []
    return [determinant([m[i] for i in sel], nvars) for sel in combinations(range(rows), ncols)]


def _reduce_units(m: list[list[LaurentPoly]], ncols: int) -> tuple[list[list[LaurentPoly]], int]:
    """Strip unit pivots; the maximal-minor ideal of the result equals that of ``m``."""
    m = [list(r) for r in m]
    while m and ncols:
        best = None
        for i, row in enumerate(m):
            for j, x in enumerate(row):
                if x.is_unit():
                    row_fill = sum(1 for y in row if not y.is_zero())
                    col_fill = sum(1 for r in m if not r[j].is_zero())
                    cost = (row_fill - 1) * (col_fill - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
        if best is None:
            break
        _, pi, pj = best
        prow = m[pi]
        inv = prow[pj] ** -1
        new = []
        for i, row in enumerate(m):
            if i == pi:
                continue
            f = row[pj]
            if f.is_zero():
                new.append([x for k, x in enumerate(row) if k != pj])
            else:
                f = f * inv
                new.append([row[k] - f * prow[k] for k in range(ncols) if k != pj])
        m = new
        ncols -= 1
    return m, ncols


def _ideal_gcd(m: list[list[LaurentPoly]], ncols: int, nvars: int) -> LaurentPoly:
    m, ncols = _reduce_units(m, ncols)
    if ncols == 0:
        return LaurentPoly.one(nvars)
    m = [row for row in m if any(not x.is_zero() for x in row)]
    minors = maximal_minors(m, ncols, nvars)
    if not minors:
        return LaurentPoly.zero(nvars)
    return lp_gcd(minors)


def alexander_poly(d: LinkDiagram, deleted_column: int = 0, dense: bool = False) -> LaurentPoly:
    """Alexander polynomial of a knot or link, canonicalized.

    With two or more components the gcd of maximal minors carries an extra
    factor ``t_c - 1`` (``c`` the component of the deleted generator), which is
    divided out.
    """
    p = wirtinger(d)
    a = alexander_matrix(p)
    n = p.ncomponents
    if not 0 <= deleted_column < p.ngenerators:
        raise IndexError(f"no generator {deleted_column}")
    m = a.column_deleted(deleted_column)
    k = p.ngenerators - 1
    if dense:
        minors = maximal_minors(m, k, n)
        g = lp_gcd(minors) if minors else LaurentPoly.zero(n)
    else:
        g = _ideal_gcd(m, k, n)
    if n >= 2 and not g.is_zero():
        c = p.generator_component[deleted_column]
        g = lp_exact_div(g, LaurentPoly.var(n, c) - 1)
    return g.canonical()


def alexander_poly_link(d: LinkDiagram, deleted_column: int = 0, dense: bool = False) -> LaurentPoly:
    if d.ncomponents < 2:
        raise ValueError("alexander_poly_link needs at least two components")
    return alexander_poly(d, deleted_column, dense)


def alexander_poly_knot(d: LinkDiagram, deleted_column: int = 0, dense: bool = False) -> LaurentPoly:
    if d.ncomponents != 1:
        raise NotAKnot(f"diagram has {d.ncomponents} components")
    return alexander_poly(d, deleted_column, dense)


def _require_zero_linking(d: LinkDiagram) -> None:
    lk = linking_matrix(d)
    if lk.any():
        raise ZeroLinkingRequired(f"linking matrix is not zero: {lk.tolist()}")


def reduced_alexander(d: LinkDiagram) -> LaurentPoly:
    """``Delta_L / prod (t_i - 1)`` for a link with vanishing linking numbers."""
    if d.ncomponents < 2:
        raise ValueError("reduced_alexander needs at least two components")
    _require_zero_linking(d)
    n = d.ncomponents
    delta = alexander_poly(d)
    denom = LaurentPoly.one(n)
    for i in range(n):
        denom = denom * (LaurentPoly.var(n, i) - 1)
    try:
        return lp_exact_div(delta, denom).canonical()
    except NotDivisible:
        raise NotDivisible(f"Delta_L = {delta} is not divisible by {denom}") from None


def d_zero(d: LinkDiagram) -> int:
    return abs(reduced_alexander(d).eval_at_ones())
