"""Sparse multivariable Laurent polynomials with integer coefficients.

A :class:`LaurentPoly` stores a map from exponent vectors to nonzero Python
ints, so coefficients never overflow.  Values are immutable and hashable.

Alexander polynomials are only defined up to multiplication by a unit
``±t^e``; :meth:`LaurentPoly.canonical` picks one representative per class:
exponents are shifted so that every variable has minimum exponent 0, then the
sign is fixed so that the term that is smallest in graded-lex order (total
degree first, ties broken lexicographically on the exponent tuple) has a
positive coefficient.
"""
from __future__ import annotations

import math
import re
from functools import reduce
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "NotDivisible",
    "lp_arith",
    "lp_canonical",
    "lp_eval_at_ones",
    "lp_exact_div",
    "lp_gcd",
    "lp_substitute_squares",
    "parse_poly",
    "render_poly",
]

Exponent = tuple[int, ...]


class NotDivisible(ArithmeticError):
    """Raised when an exact quotient does not exist in the Laurent ring."""


class LaurentPoly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean: dict[Exponent, int] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} does not have length {nvars}")
            c = int(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, int]) -> LaurentPoly:
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        object.__setattr__(p, "nvars", nvars)
        object.__setattr__(p, "_terms", terms)
        object.__setattr__(p, "_hash", None)
        return p

    @classmethod
    def constant(cls, nvars: int, c: int) -> LaurentPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> LaurentPoly:
        return cls._raw(nvars, {})

    @classmethod
    def one(cls, nvars: int) -> LaurentPoly:
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, nvars: int, exp: Sequence[int], c: int = 1) -> LaurentPoly:
        return cls(nvars, {tuple(exp): c})

    @classmethod
    def var(cls, nvars: int, i: int, power: int = 1) -> LaurentPoly:
        exp = [0] * nvars
        exp[i] = power
        return cls(nvars, {tuple(exp): 1})

    @property
    def terms(self) -> dict[Exponent, int]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp: Sequence[int]) -> int:
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_unit(self) -> bool:
        """True for ``±t^e``, the units of the Laurent ring."""
        if len(self._terms) != 1:
            return False
        (c,) = self._terms.values()
        return c in (1, -1)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self.nvars in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.nvars, frozenset(self._terms.items()))))
        return self._hash

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly.constant(self.nvars, other)
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        return other

    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        out: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if not self.is_unit():
                raise NotDivisible("negative power of a non-unit")
            ((e, c),) = self._terms.items()
            return LaurentPoly.monomial(self.nvars, [-x * -k for x in e], c ** -k)
        result = LaurentPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def min_exponents(self) -> Exponent:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self._terms) for i in range(self.nvars))

    def max_exponents(self) -> Exponent:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(max(e[i] for e in self._terms) for i in range(self.nvars))

    def shift(self, delta: Sequence[int]) -> LaurentPoly:
        """Multiply by the monomial ``t^delta``."""
        return LaurentPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(e, delta)): c for e, c in self._terms.items()},
        )

    def canonical(self) -> LaurentPoly:
        if not self._terms:
            return self
        mins = self.min_exponents()
        shifted = self.shift([-m for m in mins])
        lead = min(shifted._terms, key=_grlex_key)
        return -shifted if shifted._terms[lead] < 0 else shifted

    def eval_at_ones(self) -> int:
        return sum(self._terms.values())

    def evaluate(self, values: Sequence) -> object:
        """Numeric evaluation; ``values`` may be ints, Fractions or floats."""
        total = 0
        for e, c in self._terms.items():
            term = c
            for v, k in zip(values, e):
                term = term * v**k
            total = total + term
        return total

    def substitute_squares(self) -> LaurentPoly:
        return LaurentPoly._raw(
            self.nvars, {tuple(2 * x for x in e): c for e, c in self._terms.items()}
        )

    def invert_variables(self) -> LaurentPoly:
        """The image under ``t_i -> t_i^{-1}`` for every variable."""
        return LaurentPoly._raw(
            self.nvars, {tuple(-x for x in e): c for e, c in self._terms.items()}
        )

    def embed(self, nvars: int, positions: Sequence[int]) -> LaurentPoly:
        """Re-home variable ``i`` of ``self`` as variable ``positions[i]`` of a larger ring."""
        out = {}
        for e, c in self._terms.items():
            new = [0] * nvars
            for x, p in zip(e, positions):
                new[p] += x
            out[tuple(new)] = c
        return LaurentPoly(nvars, out)

    def degree_in(self, i: int) -> int:
        return max(e[i] for e in self._terms) if self._terms else -1

    def content(self) -> int:
        return reduce(math.gcd, self._terms.values(), 0)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.nvars}, {render_poly(self)!r})"

    def __str__(self) -> str:
        return render_poly(self)


def _grlex_key(e: Exponent):
    return (sum(e), e)


def lp_arith(p: LaurentPoly, q: LaurentPoly, op: str) -> LaurentPoly:
    if p.nvars != q.nvars:
        raise ValueError(f"variable count mismatch: {p.nvars} vs {q.nvars}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def lp_canonical(p: LaurentPoly) -> LaurentPoly:
    return p.canonical()


def lp_eval_at_ones(p: LaurentPoly) -> int:
    return p.eval_at_ones()


def lp_substitute_squares(p: LaurentPoly) -> LaurentPoly:
    return p.substitute_squares()


def lp_exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Return ``r`` with ``r * q == p``; raise :class:`NotDivisible` otherwise.

    Both operands are shifted to ordinary polynomials with no monomial factor.
    The Laurent quotient, if it exists, is then an ordinary polynomial, found
    by repeatedly cancelling lex-leading terms.
    """
    if p.nvars != q.nvars:
        raise ValueError(f"variable count mismatch: {p.nvars} vs {q.nvars}")
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    n = p.nvars
    pmin, qmin = p.min_exponents(), q.min_exponents()
    rem = dict(p.shift([-m for m in pmin])._terms)
    qs = q.shift([-m for m in qmin])._terms
    qlead = max(qs)
    qc = qs[qlead]
    quot: dict[Exponent, int] = {}
    while rem:
        lead = max(rem)
        c = rem[lead]
        d = tuple(a - b for a, b in zip(lead, qlead))
        if any(x < 0 for x in d) or c % qc:
            raise NotDivisible(f"{render_poly(q)} does not divide {render_poly(p)}")
        k = c // qc
        quot[d] = k
        for e, qcoef in qs.items():
            t = tuple(a + b for a, b in zip(d, e))
            v = rem.get(t, 0) - k * qcoef
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    shift = [a - b for a, b in zip(pmin, qmin)]
    return LaurentPoly._raw(n, quot).shift(shift)


# --- gcd -------------------------------------------------------------------
# Polynomials handed to the helpers below have non-negative exponents and only
# involve variables with index < k.


def _split_last(p: LaurentPoly, k: int) -> list[LaurentPoly]:
    """Coefficients of ``p`` as a polynomial in variable ``k-1``."""
    deg = p.degree_in(k - 1)
    buckets: list[dict[Exponent, int]] = [dict() for _ in range(deg + 1)]
    for e, c in p.items():
        d = e[k - 1]
        buckets[d][e[: k - 1] + (0,) + e[k:]] = c
    return [LaurentPoly._raw(p.nvars, b) for b in buckets]


def _join_last(coeffs: Sequence[LaurentPoly], k: int, nvars: int) -> LaurentPoly:
    out: dict[Exponent, int] = {}
    for d, c in enumerate(coeffs):
        for e, v in c.items():
            out[e[: k - 1] + (d,) + e[k:]] = v
    return LaurentPoly._raw(nvars, out)


def _trim(coeffs: list[LaurentPoly]) -> list[LaurentPoly]:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _active(p: LaurentPoly) -> int:
    """One more than the largest variable index that occurs in ``p``."""
    k = 0
    for e in p._terms:
        for i in range(len(e) - 1, -1, -1):
            if e[i]:
                k = max(k, i + 1)
                break
    return k


def _gcd_k(p: LaurentPoly, q: LaurentPoly, k: int) -> LaurentPoly:
    n = p.nvars
    if p.is_zero():
        return q
    if q.is_zero():
        return p
    if k == 0:
        return LaurentPoly.constant(n, math.gcd(p.eval_at_ones(), q.eval_at_ones()))
    pc, qc = _split_last(p, k), _split_last(q, k)
    cont_p = _content_k(pc, k - 1)
    cont_q = _content_k(qc, k - 1)
    g_cont = _gcd_k(cont_p, cont_q, k - 1)
    a = [lp_exact_div(c, cont_p) for c in pc]
    b = [lp_exact_div(c, cont_q) for c in qc]
    if len(a) < len(b):
        a, b = b, a
    # primitive PRS in variable k-1
    while True:
        if len(b) == 1:
            return g_cont
        r = _prem(a, b)
        if not r:
            break
        cr = _content_k(r, k - 1)
        a, b = b, [lp_exact_div(c, cr) for c in r]
    return g_cont * _join_last(b, k, n)


def _content_k(coeffs: Sequence[LaurentPoly], k: int) -> LaurentPoly:
    g = LaurentPoly.zero(coeffs[0].nvars)
    for c in coeffs:
        g = _gcd_k(g, c, k)
        # monomials are units of the Laurent ring but not of the polynomial ring
        if g.is_constant() and abs(g.eval_at_ones()) == 1:
            break
    if not g.is_zero():
        lead = min(g._terms, key=_grlex_key)
        if g._terms[lead] < 0:
            g = -g
    return g


def _prem(a: list[LaurentPoly], b: list[LaurentPoly]) -> list[LaurentPoly]:
    """Pseudo-remainder of ``a`` by ``b`` (coefficient lists, low degree first)."""
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] = r[i + shift] - lr * c
        _trim(r)
    return r


def lp_gcd(ps: Iterable[LaurentPoly]) -> LaurentPoly:
    """Greatest common divisor in the Laurent ring, in canonical form."""
    ps = list(ps)
    if not ps:
        raise ValueError("lp_gcd needs at least one polynomial")
    n = ps[0].nvars
    if any(p.nvars != n for p in ps):
        raise ValueError("variable count mismatch in lp_gcd")
    g = LaurentPoly.zero(n)
    for p in ps:
        if p.is_zero():
            continue
        p = p.canonical()
        if g.is_zero():
            g = p
        else:
            g = _gcd_k(g, p, max(_active(g), _active(p))).canonical()
        if g == LaurentPoly.one(n):
            break
    return g.canonical()


# --- text format -----------------------------------------------------------


def _var_name(i: int, nvars: int) -> str:
    return "t" if nvars == 1 else f"t{i + 1}"


def render_poly(p: LaurentPoly) -> str:
    """Render as ``3*t1^2*t2^-1 - 1``; a single variable is written ``t``."""
    if p.is_zero():
        return "0"
    parts = []
    for e in sorted(p._terms, key=_grlex_key, reverse=True):
        c = p._terms[e]
        factors = []
        for i, x in enumerate(e):
            if x == 0:
                continue
            name = _var_name(i, p.nvars)
            factors.append(name if x == 1 else f"{name}^{x}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(t\d*)|(\^\s*[+-]?\s*\d+)|([*+-]))")


def parse_poly(text: str, nvars: int | None = None) -> LaurentPoly:
    """Parse the format produced by :func:`render_poly`.

    ``nvars`` defaults to the largest variable index mentioned (1 for bare ``t``).
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        num, var, exp, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif var is not None:
            tokens.append(("var", var))
        elif exp is not None:
            tokens.append(("exp", exp[1:].replace(" ", "")))
        else:
            tokens.append(("op", op))
        pos = m.end()
    if not tokens:
        raise ValueError("empty polynomial")

    terms: list[tuple[int, dict[int, int]]] = []
    sign = 1
    coef: int | None = None
    powers: dict[int, int] = {}
    expect_factor = True
    max_var = 0
    bare_t = False

    def flush():
        if expect_factor:
            raise ValueError(f"dangling operator in {text!r}")
        terms.append((sign * (1 if coef is None else coef), dict(powers)))

    i = 0
    while i < len(tokens):
        kind, val = tokens[i]
        if kind == "op" and val in "+-":
            if not (expect_factor and not terms and coef is None and not powers and i == 0):
                flush()
            sign = -1 if val == "-" else 1
            coef, powers, expect_factor = None, {}, True
        elif kind == "op":  # '*'
            if expect_factor:
                raise ValueError(f"unexpected '*' in {text!r}")
            expect_factor = True
        elif kind == "num":
            if not expect_factor:
                raise ValueError(f"missing operator before {val!r}")
            coef = (1 if coef is None else coef) * int(val)
            expect_factor = False
        elif kind == "var":
            if not expect_factor:
                raise ValueError(f"missing operator before {val!r}")
            if val == "t":
                idx, bare_t = 0, True
            else:
                idx = int(val[1:]) - 1
                if idx < 0:
                    raise ValueError("variables are numbered from t1")
            power = 1
            if i + 1 < len(tokens) and tokens[i + 1][0] == "exp":
                power = int(tokens[i + 1][1])
                i += 1
            powers[idx] = powers.get(idx, 0) + power
            max_var = max(max_var, idx + 1)
            expect_factor = False
        else:
            raise ValueError(f"unexpected exponent in {text!r}")
        i += 1
    flush()

    if nvars is None:
        nvars = max(max_var, 1 if bare_t else 0)
    if max_var > nvars:
        raise ValueError(f"polynomial mentions t{max_var} but nvars={nvars}")
    if bare_t and nvars != 1:
        raise ValueError("bare 't' is only allowed for one variable")
    out: dict[Exponent, int] = {}
    for c, pw in terms:
        e = [0] * nvars
        for k, v in pw.items():
            e[k] += v
        e = tuple(e)
        out[e] = out.get(e, 0) + c
    return LaurentPoly(nvars, out)
