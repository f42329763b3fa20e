"""Integer-lattice arithmetic on six-slot character vectors.

The character range of sigma-invariant classes is the integer span of
nine vectors in (Q + Q*theta + iQ + iQ*theta)^6.  Flattening each slot
over the basis {1, theta} x {1, i} turns "is v an integral combination?"
into an exact 24 x 9 rational linear system, solved by Gaussian
elimination over Fractions.  theta is irrational, so {1, theta} is
independent over Q and the flattening is faithful.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple, Union

from .theta import ThetaParam
from .traces import T4Vector

Rat = Union[int, Fraction]


@dataclass(frozen=True)
class KScalar:
    """An exact value (a + b*theta) + i*(c + d*theta) with rational a, b, c, d."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self):
        for f in ("a", "b", "c", "d"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))

    @classmethod
    def of(cls, a: Rat = 0, b: Rat = 0, c: Rat = 0, d: Rat = 0) -> "KScalar":
        return cls(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    def __add__(self, other: "KScalar") -> "KScalar":
        return KScalar(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: "KScalar") -> "KScalar":
        return KScalar(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> "KScalar":
        return KScalar(-self.a, -self.b, -self.c, -self.d)

    def scale(self, r: Rat) -> "KScalar":
        r = Fraction(r)
        return KScalar(self.a * r, self.b * r, self.c * r, self.d * r)

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def flatten(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def value(self, theta: ThetaParam) -> complex:
        t = theta.value
        return (float(self.a) + float(self.b) * t) + 1j * (float(self.c) + float(self.d) * t)

    def __str__(self) -> str:
        return kscalar_to_text(self)


KSCALAR_ZERO = KScalar()


@dataclass(frozen=True)
class ChernVector:
    """Six exact slots (tau; psi10, psi11; psi20, psi21, psi22)."""

    tau: KScalar
    psi10: KScalar
    psi11: KScalar
    psi20: KScalar
    psi21: KScalar
    psi22: KScalar

    SLOTS = ("tau", "psi10", "psi11", "psi20", "psi21", "psi22")

    def slots(self) -> Tuple[KScalar, ...]:
        return (self.tau, self.psi10, self.psi11, self.psi20, self.psi21, self.psi22)

    def flatten(self) -> Tuple[Fraction, ...]:
        out: list[Fraction] = []
        for s in self.slots():
            out.extend(s.flatten())
        return tuple(out)

    def __add__(self, other: "ChernVector") -> "ChernVector":
        return ChernVector(*(x + y for x, y in zip(self.slots(), other.slots())))

    def __sub__(self, other: "ChernVector") -> "ChernVector":
        return ChernVector(*(x - y for x, y in zip(self.slots(), other.slots())))

    def scale(self, r: Rat) -> "ChernVector":
        return ChernVector(*(s.scale(r) for s in self.slots()))

    def __str__(self) -> str:
        return chern_to_text(self)


class K0Coordinates(NamedTuple):
    """Integer coordinates over the nine basis vectors."""

    n1: int
    n2: int
    n3: int
    n4: int
    n5: int
    n6: int
    n7: int
    n8: int
    n9: int


@dataclass(frozen=True)
class Genus:
    """The topological genus (psi20, psi21, psi22) of a semiflat class."""

    g20: Fraction
    g21: Fraction
    g22: Fraction

    def __post_init__(self):
        for f in ("g20", "g21", "g22"):
            object.__setattr__(self, f, Fraction(getattr(self, f)))

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.g20, self.g21, self.g22)

    def is_integral(self) -> bool:
        return all(g.denominator == 1 for g in self.as_tuple())


def _ks(a=0, b=0, c=0, d=0) -> KScalar:
    return KScalar.of(a, b, c, d)


_HALF = Fraction(1, 2)

_BASIS: Tuple[ChernVector, ...] = (
    # V1..V9; slot order (tau; psi10, psi11; psi20, psi21, psi22)
    ChernVector(_ks(2), _ks(), _ks(), _ks(2), _ks(), _ks()),
    ChernVector(_ks(2), _ks(1, 0, 1), _ks(), _ks(), _ks(), _ks()),
    ChernVector(_ks(1), _ks(1), _ks(), _ks(1), _ks(), _ks()),
    ChernVector(_ks(2), _ks(), _ks(), _ks(), _ks(2), _ks()),
    ChernVector(_ks(2), _ks(), _ks(1, 0, 1), _ks(), _ks(), _ks()),
    ChernVector(_ks(1), _ks(), _ks(1), _ks(), _ks(1), _ks()),
    ChernVector(_ks(0, 1), _ks(_HALF, 0, -_HALF), _ks(_HALF, 0, -_HALF), _ks(_HALF), _ks(_HALF), _ks(1)),
    ChernVector(_ks(0, 1), _ks(-_HALF, 0, -_HALF), _ks(-_HALF, 0, -_HALF), _ks(-_HALF), _ks(-_HALF), _ks(-1)),
    ChernVector(_ks(0, 1), _ks(-_HALF, 0, _HALF), _ks(-_HALF, 0, _HALF), _ks(_HALF), _ks(_HALF), _ks(1)),
)


def basis_vectors() -> Tuple[ChernVector, ...]:
    """The nine spanning vectors V1..V9 of the character lattice."""
    return _BASIS


_MATRIX: Tuple[Tuple[Fraction, ...], ...] = tuple(
    tuple(v.flatten()[row] for v in _BASIS) for row in range(24)
)


def _elimination_transform() -> Tuple[Tuple[int, ...], Tuple[Tuple[Tuple[int, Fraction], ...], ...]]:
    """One-time RREF of [M | I]: pivot columns plus the 24 x 24 transform E.

    E is stored row-sparse; row r of E applied to any rhs gives the value
    of the r-th reduced row, so solving M x = rhs is a single sparse apply.
    """
    rows = [list(r) + [Fraction(int(i == j)) for j in range(24)] for i, r in enumerate(_MATRIX)]
    pivots: list[int] = []
    rank = 0
    for col in range(9):
        piv = next((r for r in range(rank, 24) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank][col]
        rows[rank] = [v / lead for v in rows[rank]]
        for r in range(24):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    transform = tuple(
        tuple((j, row[9 + j]) for j in range(24) if row[9 + j] != 0) for row in rows
    )
    return tuple(pivots), transform


_PIVOTS, _TRANSFORM = _elimination_transform()


def _solve_exact(rhs: Sequence[Fraction]) -> Optional[Tuple[Fraction, ...]]:
    """Solve M x = rhs over Q for the 24 x 9 basis matrix; None if inconsistent."""
    reduced = [sum((coef * rhs[j] for j, coef in row), Fraction(0)) for row in _TRANSFORM]
    rank = len(_PIVOTS)
    if any(reduced[r] for r in range(rank, 24)):
        return None
    solution = [Fraction(0)] * 9
    for r, col in enumerate(_PIVOTS):
        solution[col] = reduced[r]
    return tuple(solution)


def basis_rank() -> int:
    """Rank of the nine basis vectors over Q (exact)."""
    rows = [list(r) for r in _MATRIX]
    rank = 0
    for col in range(9):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank][col]
        rows[rank] = [v / lead for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def recompose(coords: K0Coordinates) -> ChernVector:
    """The exact integral combination sum N_j V_j."""
    out = ChernVector(*([KSCALAR_ZERO] * 6))
    for n, v in zip(coords, _BASIS):
        if n:
            out = out + v.scale(n)
    return out


@dataclass(frozen=True)
class DecomposeResult:
    """Outcome of the lattice decomposition.

    status: "ok" (integral), "non-integer" (in the rational span only), or
    "not-in-span" (inconsistent system).
    """

    status: str
    coordinates: Optional[K0Coordinates] = None
    rational: Optional[Tuple[Fraction, ...]] = None

    def __bool__(self) -> bool:
        return self.status == "ok"


def decompose(v: ChernVector) -> DecomposeResult:
    """Express v over the nine basis vectors with integer coefficients, if possible."""
    sol = _solve_exact(v.flatten())
    if sol is None:
        return DecomposeResult("not-in-span")
    if any(x.denominator != 1 for x in sol):
        return DecomposeResult("non-integer", rational=sol)
    return DecomposeResult("ok", coordinates=K0Coordinates(*(int(x) for x in sol)), rational=sol)


def trace_of(coords: K0Coordinates) -> KScalar:
    """Exact trace of an integer coordinate vector, as a + b*theta."""
    n = coords
    a = 2 * n.n1 + 2 * n.n2 + n.n3 + 2 * n.n4 + 2 * n.n5 + n.n6
    b = n.n7 + n.n8 + n.n9
    return KScalar.of(a, b)


def semiflat_coordinates(n1: int, n2: int, n3: int, n4: int, n9: int) -> K0Coordinates:
    """Fill in the coordinates forced by psi10 = psi11 = 0.

    Vanishing of the two order-four invariants pins n6 = n3, n5 = n2,
    n7 = n9 - n3, n8 = 2*n2 + n3, leaving (n1, n2, n3, n4, n9) free.
    """
    return K0Coordinates(n1, n2, n3, n4, n2, n3, n9 - n3, 2 * n2 + n3, n9)


_SEMIFLAT_REASONS = ("not-in-lattice", "psi10-nonzero", "psi11-nonzero", "nonpositive-trace")


@dataclass(frozen=True)
class MembershipDecision:
    member: bool
    reason: Optional[str] = None
    coordinates: Optional[K0Coordinates] = None
    genus: Optional[Genus] = None
    trace: Optional[KScalar] = None

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "coordinates": list(self.coordinates) if self.coordinates else None,
            "genus": [str(g) for g in self.genus.as_tuple()] if self.genus else None,
            "trace": kscalar_to_text(self.trace) if self.trace else None,
        }


def semiflat_membership(v: ChernVector, theta: ThetaParam) -> MembershipDecision:
    """Decide membership in the semiflat positive cone.

    A vector belongs iff it decomposes integrally over the basis, its two
    order-four invariant slots vanish exactly, and its trace is positive
    (decided exactly from rational brackets of theta).  On membership the
    genus (psi20, psi21, psi22) = (2n1 - n2 + n9, 2n4 - n2 + n9,
    2n9 - 2n2 - 2n3) is returned.
    """
    res = decompose(v)
    if not res:
        return MembershipDecision(False, reason="not-in-lattice")
    if not v.psi10.is_zero():
        return MembershipDecision(False, reason="psi10-nonzero", coordinates=res.coordinates)
    if not v.psi11.is_zero():
        return MembershipDecision(False, reason="psi11-nonzero", coordinates=res.coordinates)
    n = res.coordinates
    # cross-check the linear relations forced by the vanishing slots
    assert n.n6 == n.n3 and n.n5 == n.n2 and n.n7 == n.n9 - n.n3 and n.n8 == 2 * n.n2 + n.n3, (
        "decomposition violates the semiflat constraint relations"
    )
    trace = trace_of(n)
    if theta.sign_linear(trace.a, trace.b) <= 0:
        return MembershipDecision(False, reason="nonpositive-trace", coordinates=n, trace=trace)
    genus = Genus(
        Fraction(2 * n.n1 - n.n2 + n.n9),
        Fraction(2 * n.n4 - n.n2 + n.n9),
        Fraction(2 * n.n9 - 2 * n.n2 - 2 * n.n3),
    )
    return MembershipDecision(True, coordinates=n, genus=genus, trace=trace)


# --------------------------------------------------------------- quantization


@dataclass(frozen=True)
class QuantizationReport:
    ok: bool
    slots: dict

    def __bool__(self) -> bool:
        return self.ok


def _in_half_lattice(s: KScalar) -> bool:
    """Membership in Z + Z*(1-i)/2: no theta part, p + q*(1-i)/2 solvable over Z."""
    if s.b or s.d:
        return False
    q = -2 * s.c
    p = s.a + s.c
    return q.denominator == 1 and p.denominator == 1


def _in_half_integers(s: KScalar) -> bool:
    return not (s.b or s.c or s.d) and (2 * s.a).denominator == 1


def _in_integers(s: KScalar) -> bool:
    return not (s.b or s.c or s.d) and s.a.denominator == 1


def quantization_check(v: ChernVector) -> QuantizationReport:
    """Check each invariant slot against its quantization lattice.

    psi10, psi11 must lie in Z + Z*(1-i)/2; psi20, psi21 in (1/2)Z;
    psi22 in Z.  The trace slot is unconstrained.
    """
    slots = {
        "psi10": _in_half_lattice(v.psi10),
        "psi11": _in_half_lattice(v.psi11),
        "psi20": _in_half_integers(v.psi20),
        "psi21": _in_half_integers(v.psi21),
        "psi22": _in_integers(v.psi22),
    }
    return QuantizationReport(all(slots.values()), slots)


# ------------------------------------------------------------ genus arithmetic

BASIC_GENERA = ((2, 0, 0), (1, 1, 2), (0, 0, 2))


def genus_basis_decompose(g: Genus) -> Optional[Tuple[int, int, int]]:
    """Solve c1*(2,0,0) + c2*(1,1,2) + c3*(0,0,2) = g over the integers.

    Solvable iff g20 = g21 (mod 2) and g22 is even; then c2 = g21,
    c1 = (g20 - g21)/2, c3 = g22/2 - g21.
    """
    if not g.is_integral():
        raise ValueError("genus entries must be integers")
    g20, g21, g22 = (int(x) for x in g.as_tuple())
    if (g20 - g21) % 2 != 0 or g22 % 2 != 0:
        return None
    c2 = g21
    c1 = (g20 - g21) // 2
    c3 = g22 // 2 - g21
    return (c1, c2, c3)


# ------------------------------------------------------------------- synthesis

# Canonical positive-trace class with each basic genus: (2,0,0) and (0,0,2)
# carry trace 2, (1,1,2) carries trace 2*theta.  A negated genus keeps the
# same trace coset mod 4Z + 4Z*theta, so generators for -G use the same trace.
_GENERATOR_TRACES = (KScalar.of(2), KScalar.of(0, 2), KScalar.of(2))


def _generator_vector(genus: Tuple[int, int, int], trace: KScalar) -> ChernVector:
    return ChernVector(
        trace,
        KSCALAR_ZERO,
        KSCALAR_ZERO,
        KScalar.of(genus[0]),
        KScalar.of(genus[1]),
        KScalar.of(genus[2]),
    )


@dataclass(frozen=True)
class GeneratorSpec:
    count: int
    genus: Tuple[int, int, int]
    trace: KScalar
    vector: ChernVector

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "genus": list(self.genus),
            "trace": kscalar_to_text(self.trace),
        }


@dataclass(frozen=True)
class SynthesisRecipe:
    generators: Tuple[GeneratorSpec, ...]
    flat_trace: KScalar

    def total(self) -> ChernVector:
        out = _generator_vector((0, 0, 0), self.flat_trace)
        for g in self.generators:
            out = out + g.vector.scale(g.count)
        return out

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "flat_trace": kscalar_to_text(self.flat_trace),
        }


class SynthesisError(ArithmeticError):
    """Internal consistency failure while assembling a recipe."""


def synthesis_recipe(v: ChernVector, theta: ThetaParam) -> SynthesisRecipe:
    """Write a cone member as basic-genus generators plus a flat class.

    The genus of v is decomposed over the three basic genera; each nonzero
    coefficient c contributes |c| copies of a generator of genus
    sign(c) * G (negation of a genus is realizable at class level) with
    the canonical trace for G.  The remaining trace is carried by a flat
    class and must land in 4Z + 4Z*theta; anything else indicates a
    corrupted input and raises.
    """
    decision = semiflat_membership(v, theta)
    if not decision:
        raise ValueError(f"not a semiflat cone member: {decision.reason}")
    coeffs = genus_basis_decompose(decision.genus)
    if coeffs is None:
        raise SynthesisError("cone member genus failed the basic-genus parity conditions")
    gens: list[GeneratorSpec] = []
    used = KSCALAR_ZERO
    for c, base, trace in zip(coeffs, BASIC_GENERA, _GENERATOR_TRACES):
        if c == 0:
            continue
        sign = 1 if c > 0 else -1
        genus = tuple(sign * x for x in base)
        gens.append(GeneratorSpec(abs(c), genus, trace, _generator_vector(genus, trace)))
        used = used + trace.scale(abs(c))
    flat = decision.trace - used
    if flat.a % 4 != 0 or flat.b % 4 != 0 or flat.c or flat.d:
        raise SynthesisError(f"flat remainder {flat} is not in 4Z + 4Z*theta")
    recipe = SynthesisRecipe(tuple(gens), flat)
    if recipe.total() != v:
        raise SynthesisError("recipe does not recompose to its input")
    return recipe


# ------------------------------------------------------------- serialization


def _rat_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def kscalar_to_text(s: KScalar) -> str:
    """Render like ``4+2t``, ``-1/2+1/2i``, ``2t``; t stands for theta."""
    parts: list[str] = []
    for coef, suffix in ((s.a, ""), (s.b, "t"), (s.c, "i"), (s.d, "ti")):
        if coef == 0:
            continue
        body = _rat_str(abs(coef))
        if suffix and body == "1":
            body = ""
        piece = f"{body}{suffix}"
        if not parts:
            parts.append(piece if coef > 0 else f"-{piece}")
        else:
            parts.append(f"+{piece}" if coef > 0 else f"-{piece}")
    return "".join(parts) if parts else "0"


_KS_TOKEN = re.compile(r"\s*(\d+/\d+|\d+|ti|it|[ti+\-])")


class ChernParseError(ValueError):
    pass


def parse_kscalar(text: str) -> KScalar:
    """Parse the ``a+bt+ci+dti`` grammar."""
    pos = 0
    total = [Fraction(0)] * 4
    sign = 1
    expect_atom = True
    saw_any = False
    while pos < len(text):
        m = _KS_TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ChernParseError(f"unexpected character {text[pos]!r} at {pos}")
            break
        tok = m.group(1)
        pos = m.end()
        if tok in "+-":
            if expect_atom and saw_any:
                raise ChernParseError(f"misplaced sign at {pos}")
            sign = -1 if tok == "-" else 1
            expect_atom = True
            continue
        if tok in ("t", "i", "ti", "it"):
            coef = Fraction(sign)
            slot = {"t": 1, "i": 2, "ti": 3, "it": 3}[tok]
            total[slot] += coef
        else:
            coef = sign * Fraction(tok)
            rest = _KS_TOKEN.match(text, pos)
            if rest and rest.group(1) in ("t", "i", "ti", "it"):
                slot = {"t": 1, "i": 2, "ti": 3, "it": 3}[rest.group(1)]
                total[slot] += coef
                pos = rest.end()
            else:
                total[0] += coef
        sign = 1
        expect_atom = False
        saw_any = True
    if not saw_any:
        raise ChernParseError("empty scalar")
    return KScalar(*total)


def chern_to_text(v: ChernVector) -> str:
    s = [kscalar_to_text(x) for x in v.slots()]
    return f"({s[0]}; {s[1]}, {s[2]}; {s[3]}, {s[4]}, {s[5]})"


def parse_chern(text: str) -> ChernVector:
    """Parse ``(tau; psi10, psi11; psi20, psi21, psi22)``; separators ; and , interchangeable."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    parts = [p for p in re.split(r"[;,]", body) if p.strip()]
    if len(parts) != 6:
        raise ChernParseError(f"expected 6 slots, got {len(parts)}")
    return ChernVector(*(parse_kscalar(p) for p in parts))


def chern_from_t4(t4: T4Vector) -> ChernVector:
    """Convert an exact character vector whose slots are phase-free.

    Only slots that are plain Gaussian rationals (no L powers) convert;
    anything else raises, because a nontrivial phase polynomial has no
    canonical (a + b*theta) + i(c + d*theta) form.
    """
    out = []
    for slot in t4.slots():
        coeffs = dict(slot.items())
        if any(k != 0 for k in coeffs):
            raise ValueError("slot contains phase powers; not a lattice-compatible vector")
        g = coeffs.get(0)
        if g is None:
            out.append(KSCALAR_ZERO)
        else:
            out.append(KScalar.of(g.re, 0, g.im, 0))
    return ChernVector(*out)
