"""Cup-form determinants and the Chern character of the Dirac index bundle.

:class:`ExtElement` is an element of the exterior algebra on eight odd
generators, the degree-one classes ``a1..a4`` of the 4-manifold followed by
the coordinate differentials ``dt1..dt4`` on the dual torus.  Monomials are
kept in normal order (all ``a``'s before all ``dt``'s, indices increasing),
with rational coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

import numpy as np

__all__ = [
    "CoordForm",
    "CupForm",
    "ExtElement",
    "NotUnimodular",
    "alpha",
    "basis_change",
    "chern_character_L",
    "chern_character_index",
    "curvature_form",
    "det_from_cupform",
    "dt",
    "ext_mul",
    "index_components",
    "integer_det",
    "universal_connection_form",
]

RANK = 4


class NotUnimodular(ValueError):
    pass


@dataclass(frozen=True)
class CupForm:
    """Top cup product of a chosen basis of H^1, evaluated on the fundamental class."""

    rank: int
    top: int

    def __post_init__(self):
        if self.rank not in (3, 4):
            raise ValueError(f"rank must be 3 or 4, got {self.rank}")


def det_from_cupform(f: CupForm) -> int:
    return abs(f.top)


def integer_det(u: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a small integer matrix (Laplace expansion)."""
    u = [list(map(int, row)) for row in u]
    n = len(u)
    if any(len(row) != n for row in u):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    if n == 1:
        return u[0][0]
    total = 0
    for j, x in enumerate(u[0]):
        if x:
            minor = [row[:j] + row[j + 1 :] for row in u[1:]]
            total += (-1) ** j * x * integer_det(minor)
    return total


def basis_change(f: CupForm, u: Sequence[Sequence[int]]) -> CupForm:
    u = np.asarray(u)
    if u.shape != (f.rank, f.rank):
        raise ValueError(f"basis change must be {f.rank}x{f.rank}")
    det = integer_det(u.tolist())
    if abs(det) != 1:
        raise NotUnimodular(f"det = {det}")
    return CupForm(f.rank, det * f.top)


# --- exterior algebra --------------------------------------------------------

Key = tuple[frozenset, frozenset]


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    """Sign of sorting ``left + right`` (both sorted, disjoint)."""
    inversions = 0
    j = 0
    for x in left:
        while j < len(right) and right[j] < x:
            j += 1
        inversions += j
    return -1 if inversions % 2 else 1


def _flat(key: Key) -> tuple[int, ...]:
    a, d = key
    return tuple(sorted(a)) + tuple(RANK + i for i in sorted(d))


class ExtElement:
    """Element of the exterior algebra; ``terms`` maps ``(alphas, dts)`` to coefficients.

    Generator indices are 1-based: ``(frozenset({1, 2}), frozenset({3}))`` is
    ``a1 a2 dt3``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean: dict[Key, Fraction] = {}
        for (a, d), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                key = (frozenset(a), frozenset(d))
                clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def scalar(cls, c) -> ExtElement:
        return cls({((), ()): c})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExtElement.scalar(other)
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: ExtElement) -> ExtElement:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return ExtElement(out)

    def __neg__(self) -> ExtElement:
        return ExtElement({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: ExtElement) -> ExtElement:
        return self + (-other)

    def scale(self, c) -> ExtElement:
        c = Fraction(c)
        return ExtElement({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return ext_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> ExtElement:
        out = ExtElement.scalar(1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def bidegree_part(self, alpha_deg: int | None = None, dt_deg: int | None = None) -> ExtElement:
        return ExtElement(
            {
                k: v
                for k, v in self.terms.items()
                if (alpha_deg is None or len(k[0]) == alpha_deg) and (dt_deg is None or len(k[1]) == dt_deg)
            }
        )

    def coefficient(self, alphas=(), dts=()) -> Fraction:
        return self.terms.get((frozenset(alphas), frozenset(dts)), Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({len(a) + len(d) for a, d in self.terms}) <= 1

    def degree(self) -> int:
        return max((len(a) + len(d) for a, d in self.terms), default=0)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=_flat):
            mono = "".join(f"a{i}" for i in sorted(k[0])) + "".join(f"dt{i}" for i in sorted(k[1]))
            parts.append(f"{self.terms[k]}*{mono or '1'}")
        return " + ".join(parts)


def alpha(k: int) -> ExtElement:
    return ExtElement({((k,), ()): 1})


def dt(k: int) -> ExtElement:
    return ExtElement({((), (k,)): 1})


def ext_mul(a: ExtElement, b: ExtElement) -> ExtElement:
    out: dict[Key, Fraction] = {}
    for k1, c1 in a.terms.items():
        f1 = _flat(k1)
        for k2, c2 in b.terms.items():
            if k1[0] & k2[0] or k1[1] & k2[1]:
                continue
            sign = _merge_sign(f1, _flat(k2))
            key = (k1[0] | k2[0], k1[1] | k2[1])
            out[key] = out.get(key, Fraction(0)) + sign * c1 * c2
    return ExtElement(out)


def change_alpha_basis(x: ExtElement, u: Sequence[Sequence[int]]) -> ExtElement:
    """Substitute ``a_i -> sum_j u[i][j] a_j`` throughout ``x``."""
    images = [ExtElement({((j + 1,), ()): u[i][j] for j in range(RANK) if u[i][j]}) for i in range(RANK)]
    out = ExtElement()
    for (a, d), c in x.terms.items():
        term = ExtElement.scalar(c)
        for i in sorted(a):
            term = term * images[i - 1]
        for i in sorted(d):
            term = term * dt(i)
        out = out + term
    return out


def curvature_form() -> ExtElement:
    out = ExtElement()
    for k in range(1, RANK + 1):
        out = out + alpha(k) * dt(k)
    return out


def chern_character_L() -> ExtElement:
    """``exp(Omega)``; the series stops at ``Omega^4`` since ``Omega^5 = 0``."""
    omega = curvature_form()
    out = ExtElement()
    power = ExtElement.scalar(1)
    for k in range(0, 2 * RANK + 1):
        if k:
            power = power * omega
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, factorial(k)))
    return out


_TOP = frozenset(range(1, RANK + 1))


def index_components(f: CupForm, ch: ExtElement | None = None) -> dict[int, ExtElement]:
    """Slant product with the fundamental class, split by form degree on the torus.

    Only monomials whose ``a``-part is ``a1 a2 a3 a4`` survive; each such
    monomial pairs to ``f.top``.
    """
    if f.rank != RANK:
        raise ValueError("the index computation needs a rank-4 cup form")
    ch = chern_character_L() if ch is None else ch
    parts: dict[int, dict[Key, Fraction]] = {k: {} for k in range(0, 2 * RANK + 1, 2)}
    for (a, d), c in ch.terms.items():
        if a == _TOP:
            parts.setdefault(len(d), {})[(frozenset(), d)] = c * f.top
    return {k: ExtElement(v) for k, v in parts.items()}


def chern_character_index(f: CupForm) -> int:
    """Coefficient of ``dt1 dt2 dt3 dt4`` in ``ch(L) / [X]``."""
    parts = index_components(f)
    for k in (0, 2):
        if not parts[k].is_zero():
            raise ArithmeticError(f"degree-{k} part of the index character is {parts[k]}")
    top = parts[4].coefficient((), _TOP)
    if top.denominator != 1:
        raise ArithmeticError(f"non-integral top coefficient {top}")
    return int(top)


@dataclass(frozen=True)
class CoordForm:
    """A form ``const + sum_k t_k * linear[k]`` with coefficients affine in the torus coordinates."""

    const: ExtElement
    linear: Mapping[int, ExtElement]

    def d(self) -> ExtElement:
        """Exterior derivative in the ``t`` directions, written ``e_k ^ dt_k``."""
        out = ExtElement()
        for k, e in self.linear.items():
            out = out + e * dt(k)
        return out


def universal_connection_form() -> CoordForm:
    """``sum_k t_k a_k``, the connection 1-form with the ``2*pi*i`` stripped."""
    return CoordForm(ExtElement(), {k: alpha(k) for k in range(1, RANK + 1)})
