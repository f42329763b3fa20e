"""Unbounded twisted-trace functionals and the associated character vectors.

Two families of linear functionals on the exact algebra, defined on
monomials and extended linearly:

  phi_ij(U^m V^n) = L^{-2mn} [m = i (2)] [n = j (2)]        ij in {00,01,10,11}
  psi_10(U^m V^n) = L^{-(m+n)^2} [m = n   (2)]
  psi_11(U^m V^n) = L^{-(m+n)^2} [m = n+1 (2)]
  psi_20(U^m V^n) = L^{-2mn}     [m = 0 (2)] [n = 0 (2)]
  psi_21(U^m V^n) = L^{-2mn}     [m = 1 (2)] [n = 1 (2)]
  psi_22(U^m V^n) = L^{-2mn}     [m = n+1 (2)]

(L = e(theta/4), so L^{-2mn} = e(-theta*mn/2) and L^{-(m+n)^2} =
e(-theta*(m+n)^2/4); [..] denotes the parity indicator.)

The phi family is twisted by the flip (phi(xy) = phi(flip(y) x)); the
psi_1k family is twisted by sigma, as `twist_discovery` verifies by
exhaustive scan.  Character vectors bundle the canonical trace with one
family; on flip- resp. sigma-invariant projections they are complete
K-theoretic invariants, but both evaluate on arbitrary elements (needed
for oracle testing) and interpreting the result is the caller's business.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .algebra import (
    Element,
    Monomial,
    PhaseScalar,
    apply_automorphism,
    canonical_trace,
    phase_to_text,
)

PHI_INDICES = ("00", "01", "10", "11")
PSI_INDICES = ("10", "11", "20", "21", "22")


def _phi_monomial(i: int, j: int, m: int, n: int) -> Optional[int]:
    """L-exponent of phi_ij on U^m V^n, or None when the parity indicator kills it."""
    if (m - i) % 2 == 0 and (n - j) % 2 == 0:
        return -2 * m * n
    return None


def _psi_monomial(jk: str, m: int, n: int) -> Optional[int]:
    if jk == "10":
        return -((m + n) ** 2) if (m - n) % 2 == 0 else None
    if jk == "11":
        return -((m + n) ** 2) if (m - n - 1) % 2 == 0 else None
    if jk == "20":
        return -2 * m * n if m % 2 == 0 and n % 2 == 0 else None
    if jk == "21":
        return -2 * m * n if (m - 1) % 2 == 0 and (n - 1) % 2 == 0 else None
    if jk == "22":
        return -2 * m * n if (m - n - 1) % 2 == 0 else None
    raise ValueError(f"unknown psi index {jk!r} (expected one of {PSI_INDICES})")


def phi_eval(ij: str, x: Element) -> PhaseScalar:
    """Evaluate the flip-twisted trace phi_ij on an element."""
    if ij not in PHI_INDICES:
        raise ValueError(f"unknown phi index {ij!r} (expected one of {PHI_INDICES})")
    i, j = int(ij[0]), int(ij[1])
    out = PhaseScalar.zero()
    for (m, n), coef in x.terms():
        k = _phi_monomial(i, j, m, n)
        if k is not None:
            out = out + coef.shifted(k)
    return out


def psi_eval(jk: str, x: Element) -> PhaseScalar:
    """Evaluate the order-four twisted trace psi_jk on an element."""
    out = PhaseScalar.zero()
    for (m, n), coef in x.terms():
        k = _psi_monomial(jk, m, n)
        if k is not None:
            out = out + coef.shifted(k)
    return out


@dataclass(frozen=True)
class T2Vector:
    """(tau; phi00, phi01, phi10, phi11) with exact PhaseScalar slots."""

    tau: PhaseScalar
    phi00: PhaseScalar
    phi01: PhaseScalar
    phi10: PhaseScalar
    phi11: PhaseScalar

    def slots(self) -> Tuple[PhaseScalar, ...]:
        return (self.tau, self.phi00, self.phi01, self.phi10, self.phi11)

    def to_json(self) -> list[str]:
        return [phase_to_text(s) for s in self.slots()]


@dataclass(frozen=True)
class T4Vector:
    """(tau; psi10, psi11; psi20, psi21, psi22) with exact PhaseScalar slots."""

    tau: PhaseScalar
    psi10: PhaseScalar
    psi11: PhaseScalar
    psi20: PhaseScalar
    psi21: PhaseScalar
    psi22: PhaseScalar

    def slots(self) -> Tuple[PhaseScalar, ...]:
        return (self.tau, self.psi10, self.psi11, self.psi20, self.psi21, self.psi22)

    def to_json(self) -> list[str]:
        return [phase_to_text(s) for s in self.slots()]


def chern_T2(x: Element) -> T2Vector:
    return T2Vector(
        tau=canonical_trace(x),
        phi00=phi_eval("00", x),
        phi01=phi_eval("01", x),
        phi10=phi_eval("10", x),
        phi11=phi_eval("11", x),
    )


def chern_T4(x: Element) -> T4Vector:
    return T4Vector(
        tau=canonical_trace(x),
        psi10=psi_eval("10", x),
        psi11=psi_eval("11", x),
        psi20=psi_eval("20", x),
        psi21=psi_eval("21", x),
        psi22=psi_eval("22", x),
    )


# -------------------------------------------------------------- relation suite

_BRIDGE_IDENTITIES: tuple[tuple[str, Callable[[Element], PhaseScalar], Callable[[Element], PhaseScalar]], ...] = (
    ("psi20 = phi00", lambda x: psi_eval("20", x), lambda x: phi_eval("00", x)),
    ("psi21 = phi11", lambda x: psi_eval("21", x), lambda x: phi_eval("11", x)),
    ("psi22 = phi01 + phi10", lambda x: psi_eval("22", x), lambda x: phi_eval("01", x) + phi_eval("10", x)),
)

# (name, functional, sign of the functional after composing with gamma)
_GAMMA_SIGNS: tuple[tuple[str, Callable[[Element], PhaseScalar], int], ...] = (
    ("phi00 . gamma = phi00", lambda x: phi_eval("00", x), 1),
    ("phi11 . gamma = phi11", lambda x: phi_eval("11", x), 1),
    ("phi01 . gamma = -phi01", lambda x: phi_eval("01", x), -1),
    ("phi10 . gamma = -phi10", lambda x: phi_eval("10", x), -1),
    ("psi10 . gamma = psi10", lambda x: psi_eval("10", x), 1),
    ("psi20 . gamma = psi20", lambda x: psi_eval("20", x), 1),
    ("psi21 . gamma = psi21", lambda x: psi_eval("21", x), 1),
    ("psi11 . gamma = -psi11", lambda x: psi_eval("11", x), -1),
    ("psi22 . gamma = -psi22", lambda x: psi_eval("22", x), -1),
)


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    failed: Optional[str] = None
    witness: Optional[Monomial] = None

    def __bool__(self) -> bool:
        return self.ok


def relation_check(x: Element) -> RelationReport:
    """Check the psi/phi bridge identities and the gamma sign laws on x, exactly.

    On failure the report carries the identity name and, when one exists,
    a single monomial term of x already witnessing the failure.
    """
    gx = apply_automorphism("gamma", x)

    def find_witness(lhs: Callable[[Element], PhaseScalar], rhs: Callable[[Element], PhaseScalar]) -> Optional[Monomial]:
        for mono, coef in x.terms():
            term = Element({mono: coef})
            if lhs(term) != rhs(term):
                return mono
        return None

    for name, left, right in _BRIDGE_IDENTITIES:
        if left(x) != right(x):
            return RelationReport(False, name, find_witness(left, right))
    for name, func, sign in _GAMMA_SIGNS:
        got = func(gx)
        want = func(x) if sign > 0 else -func(x)
        if got != want:
            gamma_lhs = lambda t, f=func: f(apply_automorphism("gamma", t))
            gamma_rhs = (lambda t, f=func: f(t)) if sign > 0 else (lambda t, f=func: -f(t))
            return RelationReport(False, name, find_witness(gamma_lhs, gamma_rhs))
    return RelationReport(True)


# ------------------------------------------------------------- twist discovery

FUNCTIONALS: dict[str, Callable[[Element], PhaseScalar]] = {
    "tau": canonical_trace,
    **{f"phi{ij}": (lambda x, ij=ij: phi_eval(ij, x)) for ij in PHI_INDICES},
    **{f"psi{jk}": (lambda x, jk=jk: psi_eval(jk, x)) for jk in PSI_INDICES},
}

_TWIST_CANDIDATES = ("id", "sigma", "flip", "sigma3")


def _twist_apply(alpha: str, x: Element) -> Element:
    if alpha == "id":
        return x
    if alpha == "sigma":
        return apply_automorphism("sigma", x)
    if alpha == "flip":
        return apply_automorphism("flip", x)
    if alpha == "sigma3":
        return apply_automorphism("sigma", apply_automorphism("flip", x))
    raise ValueError(f"unknown twist candidate {alpha!r}")


@dataclass(frozen=True)
class TwistDescriptor:
    functional: str
    holds: Tuple[str, ...]
    twist: Optional[str]  # first holding candidate in (id, sigma, flip, sigma3) order


def twist_discovery(functional: str, max_exp: int = 4) -> TwistDescriptor:
    """Find which laws f(xy) = f(alpha(y) x) hold identically on monomials.

    Brute force over all monomial pairs with exponents in [-max_exp, max_exp].
    Empirical results on this algebra: tau -> id; all phi_ij -> flip;
    psi10, psi11 -> sigma; psi20, psi21, psi22 -> flip.
    """
    if functional not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r} (expected one of {sorted(FUNCTIONALS)})")
    f = FUNCTIONALS[functional]
    rng = range(-max_exp, max_exp + 1)
    monos = [Element.monomial(m, n) for m in rng for n in rng]
    surviving = set(_TWIST_CANDIDATES)
    for x in monos:
        for y in monos:
            if not surviving:
                break
            xy = f(x * y)
            for alpha in tuple(surviving):
                if f(_twist_apply(alpha, y) * x) != xy:
                    surviving.discard(alpha)
    holds = tuple(a for a in _TWIST_CANDIDATES if a in surviving)
    return TwistDescriptor(functional=functional, holds=holds, twist=holds[0] if holds else None)
