"""Mod-2 Seiberg-Witten predictions and the identities that support them.

Nothing here solves gauge-theoretic equations.  Each function computes one
side of an identity from link or cup-product data:

* the parity of the invariant of a homology torus is ``det mod 2``;
* for 0-surgery ``M`` on a 3-component link with zero linking numbers,
  ``|Delta_M(1,1,1)| == det(M)^2`` with ``det(M) = |mu_bar_123|``;
* knot surgery on the three circle factors of ``T^3`` multiplies the
  invariant by ``Delta_K1(T1^2) Delta_K2(T2^2) Delta_K3(T3^2)``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import isqrt
from typing import Sequence

from .foxalex import reduced_alexander
from .laurent import LaurentPoly, lp_canonical, lp_eval_at_ones, lp_substitute_squares
from .linkrep import LinkDiagram
from .milnor import mu_bar_123

__all__ = [
    "NotAKnotPolynomial",
    "NotSymmetrizable",
    "VerificationReport",
    "central_coefficient",
    "knot_surgery_sw",
    "predict_sw_mod2",
    "product_criterion",
    "symmetrize",
    "verify_lemma",
]


class NotAKnotPolynomial(ValueError):
    pass


class NotSymmetrizable(ValueError):
    pass


@dataclass(frozen=True)
class VerificationReport:
    subject: str
    det: int
    alex_eval: int
    mu: int
    lemma_holds: bool
    sw_mod2: int
    chain: list[tuple[str, object]] = field(default_factory=list)

    def __post_init__(self):
        if self.det < 0:
            raise ValueError("det must be nonnegative")
        if self.lemma_holds != (abs(self.alex_eval) == self.det**2):
            raise ValueError("lemma_holds disagrees with alex_eval and det")
        if self.sw_mod2 != self.det % 2:
            raise ValueError("sw_mod2 disagrees with det")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["chain"] = [[k, v] for k, v in self.chain]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> VerificationReport:
        return cls(
            d["subject"], d["det"], d["alex_eval"], d["mu"], d["lemma_holds"], d["sw_mod2"],
            [tuple(x) for x in d["chain"]],
        )

    @classmethod
    def from_json(cls, text: str) -> VerificationReport:
        return cls.from_dict(json.loads(text))


def predict_sw_mod2(det: int) -> int:
    if det < 0:
        raise ValueError("det must be nonnegative")
    return det % 2


def verify_lemma(d: LinkDiagram, subject: str = "link") -> VerificationReport:
    """Check ``|Delta_M(1,1,1)| == det(M)^2`` for 0-surgery on a 3-component link.

    The evaluation at ``(1,1,1)`` is also the total Seiberg-Witten invariant
    of ``M`` summed over spin^c structures, which is how the parity chain
    reaches the invariant of the trivial structure.
    """
    mu = mu_bar_123(d)
    det = abs(mu)
    e = lp_eval_at_ones(reduced_alexander(d))
    sw = predict_sw_mod2(det)
    chain = [
        ("Delta_M(1,1,1)", e),
        ("mu_bar_123", mu),
        ("det(M)", det),
        ("det(M)^2", det * det),
        ("Delta_M(1,1,1) mod 2", e % 2),
        ("det(M) mod 2", sw),
    ]
    return VerificationReport(subject, det, e, mu, abs(e) == det * det, sw, chain)


def knot_surgery_sw(deltas: Sequence[LaurentPoly]) -> LaurentPoly:
    """``prod_i Delta_i(T_i^2)`` as a polynomial in three variables."""
    deltas = list(deltas)
    if len(deltas) != 3:
        raise ValueError("exactly three knot polynomials are required")
    out = LaurentPoly.one(3)
    for i, p in enumerate(deltas):
        if p.nvars != 1:
            raise ValueError(f"polynomial {i} is not in one variable")
        if abs(lp_eval_at_ones(p)) != 1:
            raise NotAKnotPolynomial(f"|Delta({i})(1)| = {abs(lp_eval_at_ones(p))}, expected 1")
        out = out * lp_substitute_squares(p).embed(3, (i,))
    return lp_canonical(out)


def product_criterion(total: int) -> bool:
    """Whether ``|total|`` is a perfect square."""
    n = abs(int(total))
    return isqrt(n) ** 2 == n


def symmetrize(sw: LaurentPoly) -> LaurentPoly:
    """Shift ``sw`` so each variable's exponent range is centred on 0.

    Raises :class:`NotSymmetrizable` if some range has odd width or the
    centred polynomial is not invariant under ``t_i -> 1/t_i`` up to sign.
    """
    if sw.is_zero():
        return sw
    lo = sw.min_exponents()
    hi = sw.max_exponents()
    shift = []
    for i, (a, b) in enumerate(zip(lo, hi)):
        if (a + b) % 2:
            raise NotSymmetrizable(f"exponents of variable {i + 1} span [{a}, {b}]")
        shift.append(-(a + b) // 2)
    p = sw.shift(tuple(shift))
    q = p.invert_variables()
    if q != p and q != -p:
        raise NotSymmetrizable("not symmetric under t -> 1/t")
    return p


def central_coefficient(sw: LaurentPoly) -> int:
    """Coefficient of the monomial fixed by ``t -> 1/t`` in the centred form."""
    p = symmetrize(sw)
    return p.coefficient((0,) * sw.nvars)
