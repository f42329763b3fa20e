"""Shared oracles and generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from nctorus.algebra import Element, GaussRational, PhaseScalar


def reorder_word_oracle(letters):
    """Brute-force normal ordering of a word in U, V and their inverses.

    ``letters`` is a sequence of ("U", +-1) / ("V", +-1) factors read left
    to right.  Only the single relation V U = L^4 U V (equivalently
    V^a U^b = L^{4ab} U^b V^a applied one adjacent swap at a time) is
    used, so this is independent of the Element multiplication routine.
    Returns (lam_exponent, m, n).
    """
    word = [(sym, int(s)) for sym, s in letters]
    exponent = 0
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            (s1, e1), (s2, e2) = word[i], word[i + 1]
            if s1 == "V" and s2 == "U":
                exponent += 4 * e1 * e2
                word[i], word[i + 1] = word[i + 1], word[i]
                changed = True
    m = sum(e for sym, e in word if sym == "U")
    n = sum(e for sym, e in word if sym == "V")
    return exponent, m, n


def monomial_letters(m, n):
    """U^m V^n as single-step letters."""
    return [("U", 1 if m > 0 else -1)] * abs(m) + [("V", 1 if n > 0 else -1)] * abs(n)


def random_gauss(rng, span=3):
    return GaussRational(
        Fraction(rng.randint(-span, span), rng.choice((1, 2, 3))),
        Fraction(rng.randint(-span, span), rng.choice((1, 2, 3))),
    )


def random_phase(rng, lam_span=4, parts=2):
    coeffs = {}
    for _ in range(rng.randint(1, parts)):
        coeffs[rng.randint(-lam_span, lam_span)] = random_gauss(rng)
    return PhaseScalar(coeffs)


def random_element(rng, max_terms=6, span=5):
    x = Element.zero()
    for _ in range(rng.randint(1, max_terms)):
        x = x + Element.monomial(
            rng.randint(-span, span), rng.randint(-span, span), random_phase(rng)
        )
    return x


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
