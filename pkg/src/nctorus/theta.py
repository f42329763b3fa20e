"""Irrational angle parameters backed by continued fractions.

A :class:`ThetaParam` stores a finite prefix of the continued-fraction
expansion of an irrational number in (0, 1).  Consecutive convergents
bracket the number by rationals, so questions like "is a + b*theta
positive?" are answered exactly at some finite depth (a + b*theta is
never zero for integer (a, b) != (0, 0) when theta is irrational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

Rat = Union[int, Fraction]


class PrecisionExhausted(ArithmeticError):
    """The stored continued-fraction prefix cannot settle the question (insufficient-cf-data)."""


def _cf_terms_of_fraction(x: Fraction, limit: int = 128) -> list[int]:
    """Continued-fraction terms a1, a2, ... of x = [0; a1, a2, ...] for rational x in (0, 1)."""
    out: list[int] = []
    frac = x
    for _ in range(limit):
        if frac == 0:
            break
        inv = 1 / frac
        a = inv.numerator // inv.denominator
        out.append(a)
        frac = inv - a
    return out


def _sign(x: Rat) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class ThetaParam:
    """An irrational number theta in (0, 1), given as [0; a1, a2, ...] prefix.

    ``interval`` optionally records outer rational bounds for inexact
    (decimal) inputs; exact presets leave it None and rely on the
    convergents alone.
    """

    cf_terms: tuple[int, ...]
    name: Optional[str] = None
    interval: Optional[tuple[Fraction, Fraction]] = None

    PRESETS = ("golden", "sqrt2")

    def __post_init__(self) -> None:
        if not self.cf_terms and self.interval is None:
            raise ValueError("continued-fraction prefix must be nonempty")
        if any((not isinstance(a, int)) or a < 1 for a in self.cf_terms):
            raise ValueError("continued-fraction terms must be positive integers")
        if self.interval is not None:
            lo, hi = self.interval
            if not (0 < lo < hi < 1):
                raise ValueError("interval must satisfy 0 < lo < hi < 1")

    # ------------------------------------------------------------------ ctors

    @classmethod
    def preset(cls, name: str, depth: int = 160) -> "ThetaParam":
        """Named angles: golden = (sqrt(5)-1)/2, sqrt2 = sqrt(2)-1."""
        if name == "golden":
            return cls(cf_terms=(1,) * depth, name="golden")
        if name == "sqrt2":
            return cls(cf_terms=(2,) * depth, name="sqrt2")
        raise ValueError(f"unknown theta preset {name!r} (expected one of {cls.PRESETS})")

    @classmethod
    def from_cf(cls, terms: Sequence[int], name: Optional[str] = None) -> "ThetaParam":
        return cls(cf_terms=tuple(int(a) for a in terms), name=name)

    @classmethod
    def from_decimal(cls, text: Union[str, float]) -> "ThetaParam":
        """Build from a decimal approximation; precision is taken at half an ulp.

        The stored continued-fraction prefix is the part shared by both ends
        of the uncertainty interval, so every exact answer derived from it is
        valid for any theta consistent with the input.
        """
        if isinstance(text, float):
            r = Fraction(text)
            u = Fraction(math.ulp(text)) / 2
        else:
            r = Fraction(text)
            digits = len(text.split(".")[1]) if "." in text else 0
            u = Fraction(1, 2 * 10**digits)
        lo, hi = r - u, r + u
        if not (0 < lo and hi < 1):
            raise ValueError("theta must lie strictly inside (0, 1)")
        ta = _cf_terms_of_fraction(lo)
        tb = _cf_terms_of_fraction(hi)
        common = []
        for x, y in zip(ta, tb):
            if x != y:
                break
            common.append(x)
        # an exactly-rational input can pin no terms at all; the raw interval
        # then carries all the precision there is
        return cls(cf_terms=tuple(common), interval=(lo, hi))

    # ------------------------------------------------------------ convergents

    @cached_property
    def _pq(self) -> tuple[tuple[int, int], ...]:
        """Convergents (p0, q0) = (0, 1), (p1, q1) = (1, a1), ..."""
        if not self.cf_terms:
            return ((0, 1),)
        ps = [0, 1]
        qs = [1, self.cf_terms[0]]
        for a in self.cf_terms[1:]:
            ps.append(a * ps[-1] + ps[-2])
            qs.append(a * qs[-1] + qs[-2])
        return tuple(zip(ps, qs))

    def convergents_pq(self, depth: int) -> tuple[tuple[int, int], ...]:
        """The first ``depth + 1`` convergents (p/q), starting at 0/1."""
        if depth + 1 > len(self._pq):
            raise PrecisionExhausted(
                f"insufficient-cf-data: depth {depth} needs more than the stored "
                f"{len(self.cf_terms)} continued-fraction terms"
            )
        return self._pq[: depth + 1]

    @property
    def max_depth(self) -> int:
        return len(self._pq) - 1

    def brackets(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Successively tighter rational intervals lo < theta < hi."""
        pq = self._pq
        for j in range(len(pq) - 1):
            x = Fraction(pq[j][0], pq[j][1])
            y = Fraction(pq[j + 1][0], pq[j + 1][1])
            lo, hi = (x, y) if x < y else (y, x)
            if self.interval is not None:
                lo, hi = max(lo, self.interval[0]), min(hi, self.interval[1])
                if not lo < hi:
                    break
            yield lo, hi
        if self.interval is not None:
            yield self.interval

    def rational_approx(self) -> Fraction:
        """Best available rational stand-in: interval midpoint, else deepest convergent."""
        if self.interval is not None:
            lo, hi = self.interval
            return (lo + hi) / 2
        p, q = self._pq[-1]
        return Fraction(p, q)

    @cached_property
    def value(self) -> float:
        """Double-precision value."""
        return float(self.rational_approx())

    # ---------------------------------------------------------- exact queries

    def sign_linear(self, a: Rat, b: Rat) -> int:
        """Exact sign of a + b*theta.  Returns 0 only for a = b = 0."""
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            return _sign(a)
        for lo, hi in self.brackets():
            v1, v2 = a + b * lo, a + b * hi
            if v1 > 0 and v2 > 0:
                return 1
            if v1 < 0 and v2 < 0:
                return -1
        raise PrecisionExhausted(
            f"insufficient-cf-data: cannot settle sign of {a} + {b}*theta"
        )

    def in_open_interval(self, a: Rat, b: Rat, lo: Rat, hi: Rat) -> bool:
        """Exact test of lo < a + b*theta < hi for rational lo, hi."""
        return (
            self.sign_linear(Fraction(a) - Fraction(lo), b) > 0
            and self.sign_linear(Fraction(a) - Fraction(hi), b) < 0
        )

    def floor_linear(self, b: Rat) -> int:
        """floor(b * theta), exact."""
        b = Fraction(b)
        if b == 0:
            return 0
        n = math.floor(float(b) * self.value)
        while self.sign_linear(-(n + 1), b) > 0:
            n += 1
        while self.sign_linear(-n, b) < 0:
            n -= 1
        return n

    # ------------------------------------------------------------- reflection

    def reflect(self) -> "ThetaParam":
        """The parameter 1 - theta (used to normalize signs of trace values)."""
        a = self.cf_terms
        if a[0] == 1:
            if len(a) < 2:
                raise PrecisionExhausted("insufficient-cf-data: prefix too short to reflect")
            new = (a[1] + 1,) + a[2:]
        else:
            new = (1, a[0] - 1) + a[1:]
        interval = None
        if self.interval is not None:
            lo, hi = self.interval
            interval = (1 - hi, 1 - lo)
        name = None if self.name is None else f"1-{self.name}"
        return ThetaParam(cf_terms=new, name=name, interval=interval)


def parse_theta(spec: str) -> ThetaParam:
    """Parse a command-line theta spec: preset name, ``cf:a1,a2,...`` or a decimal."""
    spec = spec.strip()
    if spec in ThetaParam.PRESETS:
        return ThetaParam.preset(spec)
    if spec.startswith("cf:"):
        terms = [int(tok) for tok in spec[3:].split(",") if tok.strip()]
        return ThetaParam.from_cf(terms)
    return ThetaParam.from_decimal(spec)
