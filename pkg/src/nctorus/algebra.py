"""Exact *-algebra of Laurent polynomials in the rotation-algebra generators U, V.

Elements are finite sums  sum c_{mn} U^m V^n  in normal order (U-powers to
the left), with VU = e(theta) UV.  Every phase that occurs is an integer
power of the formal generator  L = e(theta/4)  (e(x) means exp(2*pi*i*x)),
so scalars are Laurent polynomials in L with Gaussian-rational
coefficients and all arithmetic is exact.  L is treated as a free
transcendental: theta is irrational, so no relation among its powers is
imposed.

All operations return new values; nothing is mutated in place.
"""

from __future__ import annotations

import cmath
import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Tuple, Union

from .theta import ThetaParam

Rat = Union[int, Fraction]


class GaussRational:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rat = 0, im: Rat = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *args):
        raise AttributeError("GaussRational is immutable")

    def __add__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussRational") -> "GaussRational":
        return GaussRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussRational":
        return GaussRational(-self.re, -self.im)

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __complex__(self) -> complex:
        return float(self.re) + 1j * float(self.im)

    def __repr__(self) -> str:
        return f"GaussRational({self.re}, {self.im})"

    def __str__(self) -> str:
        def rat(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        if self.im == 0:
            return rat(self.re)
        if self.re == 0:
            return f"{rat(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{rat(self.re)}{sign}{rat(abs(self.im))}i"


_QG_ZERO = GaussRational(0)
_QG_ONE = GaussRational(1)


class Monomial(NamedTuple):
    """Exponent pair (m, n) standing for U^m V^n in normal order."""

    m: int
    n: int


class PhaseScalar:
    """A Laurent polynomial  sum_k c_k L^k  with Gaussian-rational c_k.

    L = e(theta/4); zero coefficients are never stored, so equality is
    plain coefficient-wise comparison.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, GaussRational] = ()):
        c = {}
        for k, v in dict(coeffs).items():
            if v:
                c[int(k)] = v
        object.__setattr__(self, "_c", c)

    def __setattr__(self, *args):
        raise AttributeError("PhaseScalar is immutable")

    # ------------------------------------------------------------- factories

    @classmethod
    def zero(cls) -> "PhaseScalar":
        return cls()

    @classmethod
    def one(cls) -> "PhaseScalar":
        return cls({0: _QG_ONE})

    @classmethod
    def lam(cls, k: int = 1) -> "PhaseScalar":
        """The phase L^k."""
        return cls({k: _QG_ONE})

    @classmethod
    def of(cls, value: Union[int, Fraction, GaussRational, "PhaseScalar"]) -> "PhaseScalar":
        if isinstance(value, PhaseScalar):
            return value
        if isinstance(value, GaussRational):
            return cls({0: value})
        return cls({0: GaussRational(value)})

    # ------------------------------------------------------------ arithmetic

    def items(self) -> Iterable[Tuple[int, GaussRational]]:
        return self._c.items()

    def __add__(self, other: "PhaseScalar") -> "PhaseScalar":
        c = dict(self._c)
        for k, v in other._c.items():
            w = c.get(k, _QG_ZERO) + v
            if w:
                c[k] = w
            else:
                c.pop(k, None)
        return PhaseScalar(c)

    def __sub__(self, other: "PhaseScalar") -> "PhaseScalar":
        return self + (-other)

    def __neg__(self) -> "PhaseScalar":
        return PhaseScalar({k: -v for k, v in self._c.items()})

    def __mul__(self, other: "PhaseScalar") -> "PhaseScalar":
        c: dict[int, GaussRational] = {}
        for k1, v1 in self._c.items():
            for k2, v2 in other._c.items():
                k = k1 + k2
                w = c.get(k, _QG_ZERO) + v1 * v2
                if w:
                    c[k] = w
                else:
                    c.pop(k, None)
        return PhaseScalar(c)

    def shifted(self, k: int) -> "PhaseScalar":
        """Multiplication by L^k."""
        return PhaseScalar({kk + k: v for kk, v in self._c.items()})

    def conjugate(self) -> "PhaseScalar":
        """Complex conjugation: L^k -> L^(-k), coefficients conjugated."""
        return PhaseScalar({-k: v.conjugate() for k, v in self._c.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseScalar):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __bool__(self) -> bool:
        return bool(self._c)

    def __repr__(self) -> str:
        return f"PhaseScalar({self._c!r})"

    def __str__(self) -> str:
        return phase_to_text(self)


class Element:
    """A finite normal-ordered Laurent polynomial  sum_{(m,n)} c_{mn} U^m V^n."""

    __slots__ = ("_t",)

    def __init__(self, terms: Mapping[Monomial, PhaseScalar] = ()):
        t = {}
        for mono, coef in dict(terms).items():
            if coef:
                t[Monomial(*mono)] = coef
        object.__setattr__(self, "_t", t)

    def __setattr__(self, *args):
        raise AttributeError("Element is immutable")

    # ------------------------------------------------------------- factories

    @classmethod
    def zero(cls) -> "Element":
        return cls()

    @classmethod
    def one(cls) -> "Element":
        return cls({Monomial(0, 0): PhaseScalar.one()})

    @classmethod
    def monomial(cls, m: int, n: int, coef: Union[int, Fraction, GaussRational, PhaseScalar] = 1) -> "Element":
        return cls({Monomial(m, n): PhaseScalar.of(coef)})

    # --------------------------------------------------------------- queries

    def terms(self) -> Iterable[Tuple[Monomial, PhaseScalar]]:
        return self._t.items()

    def coefficient(self, m: int, n: int) -> PhaseScalar:
        return self._t.get(Monomial(m, n), PhaseScalar.zero())

    def support(self) -> tuple[Monomial, ...]:
        return tuple(sorted(self._t))

    def __bool__(self) -> bool:
        return bool(self._t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        return hash(frozenset(self._t.items()))

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other: "Element") -> "Element":
        t = dict(self._t)
        for mono, coef in other._t.items():
            w = t.get(mono, PhaseScalar.zero()) + coef
            if w:
                t[mono] = w
            else:
                t.pop(mono, None)
        return Element(t)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element({mono: -coef for mono, coef in self._t.items()})

    def scale(self, scalar: Union[int, Fraction, GaussRational, PhaseScalar]) -> "Element":
        s = PhaseScalar.of(scalar)
        return Element({mono: coef * s for mono, coef in self._t.items()})

    def __mul__(self, other: "Element") -> "Element":
        acc: dict[Monomial, dict[int, GaussRational]] = {}
        for (m1, n1), p1 in self._t.items():
            for (m2, n2), p2 in other._t.items():
                shift = 4 * n1 * m2  # V^{n1} U^{m2} = L^{4 n1 m2} U^{m2} V^{n1}
                key = Monomial(m1 + m2, n1 + n2)
                bucket = acc.setdefault(key, {})
                for k1, c1 in p1._c.items():
                    for k2, c2 in p2._c.items():
                        k = k1 + k2 + shift
                        w = bucket.get(k, _QG_ZERO) + c1 * c2
                        if w:
                            bucket[k] = w
                        else:
                            bucket.pop(k, None)
        return Element({mono: PhaseScalar(bucket) for mono, bucket in acc.items() if bucket})

    def __pow__(self, n: int) -> "Element":
        if n < 0:
            raise ValueError("only nonnegative powers are defined on generic elements")
        out = Element.one()
        for _ in range(n):
            out = out * self
        return out

    def star(self) -> "Element":
        """The adjoint:  (c U^m V^n)* = conj(c) L^{4mn} U^{-m} V^{-n}."""
        t: dict[Monomial, PhaseScalar] = {}
        for (m, n), coef in self._t.items():
            t[Monomial(-m, -n)] = coef.conjugate().shifted(4 * m * n)
        return Element(t)

    def __repr__(self) -> str:
        return f"Element({element_to_text(self)!r})"

    def __str__(self) -> str:
        return element_to_text(self)


U = Element.monomial(1, 0)
V = Element.monomial(0, 1)
ONE = Element.one()


# ----------------------------------------------------------------- operations


def normalize_product(a: Monomial, b: Monomial) -> Tuple[PhaseScalar, Monomial]:
    """Normal-order the product of two monomials.

    (U^{ma} V^{na})(U^{mb} V^{nb}) = L^{4 na mb} U^{ma+mb} V^{na+nb}.
    """
    ma, na = a
    mb, nb = b
    return PhaseScalar.lam(4 * na * mb), Monomial(ma + mb, na + nb)


def mul(x: Element, y: Element) -> Element:
    return x * y


def add(x: Element, y: Element) -> Element:
    return x + y


def sub(x: Element, y: Element) -> Element:
    return x - y


def scale(x: Element, scalar) -> Element:
    return x.scale(scalar)


def star(x: Element) -> Element:
    return x.star()


AUTOMORPHISMS = ("sigma", "flip", "gamma")


def apply_automorphism(which: str, x: Element) -> Element:
    """Apply one of the canonical automorphisms.

    sigma: U -> V^{-1}, V -> U   (order four); on monomials
           sigma(U^m V^n) = L^{-4mn} U^n V^{-m}.
    flip:  U -> U^{-1}, V -> V^{-1}; flip = sigma^2.
    gamma: U -> -U, V -> -V (parity).
    """
    t: dict[Monomial, PhaseScalar] = {}
    if which == "sigma":
        for (m, n), coef in x._t.items():
            mono = Monomial(n, -m)
            t[mono] = t.get(mono, PhaseScalar.zero()) + coef.shifted(-4 * m * n)
    elif which == "flip":
        for (m, n), coef in x._t.items():
            t[Monomial(-m, -n)] = coef
    elif which == "gamma":
        for (m, n), coef in x._t.items():
            t[Monomial(m, n)] = coef if (m + n) % 2 == 0 else -coef
    else:
        raise ValueError(f"unknown automorphism {which!r} (expected one of {AUTOMORPHISMS})")
    return Element(t)


def sigma_average(g: Element) -> Element:
    """The orbit sum g + sigma(g) + sigma^2(g) + sigma^3(g); always sigma-invariant."""
    out = g
    cur = g
    for _ in range(3):
        cur = apply_automorphism("sigma", cur)
        out = out + cur
    return out


def canonical_trace(x: Element) -> PhaseScalar:
    """Coefficient of the identity monomial; a trace, invariant under sigma and gamma."""
    return x.coefficient(0, 0)


def numeric_eval(s: PhaseScalar, theta: ThetaParam) -> complex:
    """Evaluate a phase scalar at L = e(theta/4).

    The exponent k*theta/4 is reduced mod 1 in exact rational arithmetic
    against theta's best rational stand-in before exponentiation, so the
    result is accurate to ~1e-15 relative error even for |k| up to 1e4
    (on top of whatever uncertainty an inexact decimal theta carries).
    """
    approx = theta.rational_approx()
    total = 0j
    for k, c in s.items():
        frac = (Fraction(k, 4) * approx) % 1
        total += complex(c) * cmath.exp(2j * cmath.pi * float(frac))
    return total


# ------------------------------------------------------------- serialization


def _rat_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _coef_str(c: GaussRational) -> str:
    if c.im == 0:
        return f"({_rat_str(c.re)})"
    if c.re == 0:
        return f"({_rat_str(c.im)}i)"
    sign = "+" if c.im > 0 else "-"
    return f"({_rat_str(c.re)}{sign}{_rat_str(abs(c.im))}i)"


def _power_str(sym: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return sym
    return f"{sym}^{k}"


def phase_to_text(s: PhaseScalar) -> str:
    """Render a phase scalar as ``(re+imi)L^k`` terms joined by ``+``."""
    if not s:
        return "0"
    parts = []
    for k in sorted(s._c):
        piece = _coef_str(s._c[k])
        lam = _power_str("L", k)
        parts.append(f"{piece}{lam}" if lam else piece)
    return " + ".join(parts)


def element_to_text(x: Element) -> str:
    """Canonical text form: ``(re+imi)L^k U^m V^n`` terms joined by ``+``.

    An element whose coefficient at one monomial has several L-powers
    prints as several terms sharing that monomial; parsing adds them
    back together, so the round trip is lossless.
    """
    if not x:
        return "0"
    parts = []
    for mono in x.support():
        coef = x._t[mono]
        for k in sorted(coef._c):
            factors = [_coef_str(coef._c[k])]
            for sym, e in (("L", k), ("U", mono.m), ("V", mono.n)):
                piece = _power_str(sym, e)
                if piece:
                    factors.append(piece)
            parts.append(" ".join(factors))
    return " + ".join(parts)


_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|[iLUV^()+\-*])")


class ElementParseError(ValueError):
    """Malformed element text; carries the character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                if text[pos:].strip():
                    raise ElementParseError(f"unexpected character {text[pos]!r}", pos)
                break
            self.toks.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0] if self.i < len(self.toks) else ""

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def take(self) -> str:
        tok = self.peek()
        self.i += 1
        return tok


def _parse_rational(ts: _Tokens) -> Fraction:
    tok = ts.peek()
    if not tok or not tok[0].isdigit():
        raise ElementParseError("expected a number", ts.pos())
    ts.take()
    return Fraction(tok)


def _parse_signed_int(ts: _Tokens) -> int:
    sign = 1
    if ts.peek() in ("+", "-"):
        sign = -1 if ts.take() == "-" else 1
    tok = ts.peek()
    if not tok.isdigit():
        raise ElementParseError("expected an integer exponent", ts.pos())
    ts.take()
    return sign * int(tok)


def _parse_gaussian(ts: _Tokens) -> GaussRational:
    """Sum of signed pieces of the form  rational, rational i, or i."""
    total = GaussRational(0)
    sign = 1
    first = True
    while True:
        tok = ts.peek()
        if tok in ("+", "-"):
            sign = -1 if ts.take() == "-" else 1
        elif not first:
            break
        if ts.peek() == "i":
            ts.take()
            total = total + GaussRational(0, sign)
        else:
            r = sign * _parse_rational(ts)
            if ts.peek() == "i":
                ts.take()
                total = total + GaussRational(0, r)
            else:
                total = total + GaussRational(r)
        sign = 1
        first = False
        if ts.peek() not in ("+", "-"):
            break
    return total


def _parse_atom(ts: _Tokens) -> Element:
    tok = ts.peek()
    if tok == "(":
        ts.take()
        g = _parse_gaussian(ts)
        if ts.peek() != ")":
            raise ElementParseError("expected ')'", ts.pos())
        ts.take()
        return Element.monomial(0, 0, g)
    if tok == "i":
        ts.take()
        return Element.monomial(0, 0, GaussRational(0, 1))
    if tok in ("L", "U", "V"):
        ts.take()
        k = 1
        if ts.peek() == "^":
            ts.take()
            k = _parse_signed_int(ts)
        if tok == "L":
            return Element.monomial(0, 0, PhaseScalar.lam(k))
        if tok == "U":
            return Element.monomial(k, 0)
        return Element.monomial(0, k)
    if tok and tok[0].isdigit():
        r = _parse_rational(ts)
        if ts.peek() == "i":
            ts.take()
            return Element.monomial(0, 0, GaussRational(0, r))
        return Element.monomial(0, 0, r)
    raise ElementParseError(f"unexpected token {tok!r}" if tok else "unexpected end of input", ts.pos())


def _parse_term(ts: _Tokens) -> Element:
    """A product of atoms; multiplication is honest algebra multiplication,
    so out-of-order factors like ``V U`` pick up the correct phase."""
    out = _parse_atom(ts)
    while True:
        tok = ts.peek()
        if tok == "*":
            ts.take()
            continue
        if tok in ("(", "i", "L", "U", "V") or (tok and tok[0].isdigit()):
            out = out * _parse_atom(ts)
        else:
            return out


def parse_element(text: str) -> Element:
    """Parse the element grammar: signed terms of scalar/L/U/V factors."""
    ts = _Tokens(text)
    if not ts.toks:
        raise ElementParseError("empty input", 0)
    total = Element.zero()
    sign = 1
    if ts.peek() in ("+", "-"):
        sign = -1 if ts.take() == "-" else 1
    while True:
        term = _parse_term(ts)
        total = total + (term.scale(-1) if sign < 0 else term)
        tok = ts.peek()
        if not tok:
            return total
        if tok in ("+", "-"):
            sign = -1 if ts.take() == "-" else 1
        else:
            raise ElementParseError(f"unexpected token {tok!r}", ts.pos())


def parse_phase(text: str) -> PhaseScalar:
    """Parse a phase scalar (an element with no U or V factors)."""
    x = parse_element(text)
    for (m, n), _ in x.terms():
        if (m, n) != (0, 0):
            raise ElementParseError("phase scalar must not contain U or V", 0)
    return canonical_trace(x)
