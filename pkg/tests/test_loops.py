import random

import numpy as np
import pytest

from nctorus.algebra import Element, apply_automorphism
from nctorus.loops import (
    AlphaOutOfRange,
    CircleFunction,
    GridMismatch,
    InvalidBumpWidth,
    LoopElement,
    assemble_projection,
    bump_pair,
    bump_profiles,
    flip_apply,
    loop_invariants,
    loop_mul,
    loop_star,
    monomial_loop,
    pr_build,
    projection_gates,
)
from nctorus.theta import ThetaParam

GOLDEN = ThetaParam.preset("golden")
SQRT2 = ThetaParam.preset("sqrt2")

N = 1024  # plenty for band-limited test elements


def random_loop(rng, beta, n=N, kmax=2, band=32):
    coeffs = {}
    for k in range(-kmax, kmax + 1):
        if rng.random() < 0.7:
            freqs = np.zeros(n, dtype=complex)
            for _ in range(6):
                m = rng.randint(-band, band)
                freqs[m % n] = rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
            coeffs[k] = CircleFunction(np.fft.ifft(freqs) * n)
    if not coeffs:
        coeffs[0] = CircleFunction.zero(n)
    return LoopElement(beta, coeffs, n)


# ------------------------------------------------------------- loop arithmetic


def test_mul_rule_single_terms():
    beta = GOLDEN.value
    # f V * h V^-1 -> f (h shifted by beta) V^0
    fs = CircleFunction.from_function(lambda t: np.exp(2j * np.pi * 3 * t), N)
    hs = CircleFunction.from_function(lambda t: np.cos(2 * np.pi * t), N)
    x = LoopElement(beta, {1: fs}, N)
    y = LoopElement(beta, {-1: hs}, N)
    z = loop_mul(x, y)
    assert set(z.coeffs) == {0}
    want = fs * hs.shift(beta)
    assert np.allclose(z.coefficient(0).samples, want.samples, atol=1e-12)


def test_grid_and_beta_mismatch_rejected():
    x = LoopElement(0.3, {0: CircleFunction.zero(512)}, 512)
    y = LoopElement(0.3, {0: CircleFunction.zero(1024)}, 1024)
    with pytest.raises(GridMismatch):
        loop_mul(x, y)
    z = LoopElement(0.4, {0: CircleFunction.zero(512)}, 512)
    with pytest.raises(GridMismatch):
        loop_mul(x, z)


def test_associativity_random_triples():
    rng = random.Random(16)
    beta = SQRT2.value
    for _ in range(12):
        x, y, z = (random_loop(rng, beta) for _ in range(3))
        left = loop_mul(loop_mul(x, y), z)
        right = loop_mul(x, loop_mul(y, z))
        assert (left - right).snorm() <= 1e-12 * max(1.0, x.snorm() * y.snorm() * z.snorm())


def test_star_involution():
    rng = random.Random(17)
    beta = GOLDEN.value
    for _ in range(12):
        x = random_loop(rng, beta)
        assert (loop_star(loop_star(x)) - x).snorm() <= 1e-14 * max(1.0, x.snorm())


def test_star_antihomomorphism():
    rng = random.Random(18)
    beta = GOLDEN.value
    for _ in range(8):
        x, y = random_loop(rng, beta), random_loop(rng, beta)
        lhs = loop_star(loop_mul(x, y))
        rhs = loop_mul(loop_star(y), loop_star(x))
        assert (lhs - rhs).snorm() <= 1e-11 * max(1.0, x.snorm() * y.snorm())


def test_snorm_submultiplicative():
    rng = random.Random(19)
    beta = GOLDEN.value
    for _ in range(25):
        x, y = random_loop(rng, beta), random_loop(rng, beta)
        assert loop_mul(x, y).snorm() <= x.snorm() * y.snorm() * (1 + 1e-9)


def test_loop_json_roundtrip():
    rng = random.Random(20)
    x = random_loop(rng, SQRT2.value, n=512)
    back = LoopElement.from_json(x.to_json())
    assert back.n == x.n and back.beta == x.beta
    assert (back - x).snorm() <= 1e-15


# ------------------------------------------------------------------ flip apply


def test_flip_on_base_monomial():
    w = monomial_loop(0, 1, 512, 0.37)
    flipped = flip_apply(w)
    want = monomial_loop(0, -1, 512, 0.37)
    assert (flipped - want).snorm() <= 1e-12


def test_flip_involutive():
    rng = random.Random(21)
    x = random_loop(rng, GOLDEN.value)
    assert (flip_apply(flip_apply(x)) - x).snorm() <= 1e-14 * max(1.0, x.snorm())


@pytest.mark.parametrize("rm,k", [(2, 1), (3, -2), (-1, 0), (0, 2)])
def test_flip_matches_exact_engine_on_monomials(rm, k):
    """flip(U^{rm} V^k) = U^{-rm} V^{-k}: cross-module oracle on embedded monomials."""
    r = 1
    n = 512
    loop = monomial_loop(k, rm, n, (r * GOLDEN.value) % 1.0)
    flipped = flip_apply(loop)
    exact = apply_automorphism("flip", Element.monomial(r * rm, k))
    ((mm, nn), coef), = exact.terms()
    assert nn == -k and mm == -r * rm and coef.items()
    want = monomial_loop(-k, -rm, n, loop.beta)
    assert (flipped - want).snorm() <= 1e-12


# ------------------------------------------------------------------- bump pair


def test_bump_integral_is_alpha():
    for alpha, eps in ((GOLDEN.value, 0.1), (0.31, 0.05), (0.82, 0.04)):
        f, g = bump_pair(alpha, eps, 4096)
        assert abs(f.mean().real - alpha) <= 1e-10


def test_bump_projection_identities_on_grid():
    alpha, eps = GOLDEN.value, 0.1
    n = 4096
    f, g = bump_pair(alpha, eps, n)
    t = CircleFunction.grid(n)
    f_profile, g_profile = bump_profiles(alpha, eps)
    g_back = CircleFunction(g_profile(t - alpha).astype(complex))
    f_back = CircleFunction(f_profile(t - alpha).astype(complex))
    g_fwd = CircleFunction(g_profile(t + alpha).astype(complex))
    # g(t) g(t - alpha) = 0 ; g(t)(f(t) + f(t-alpha) - 1) = 0 ; f - f^2 = g^2 + g(.+alpha)^2
    assert (g * g_back).sup() <= 1e-10
    assert (g * (f + f_back - CircleFunction.from_function(lambda u: np.ones_like(u), n))).sup() <= 1e-10
    lhs = f - f * f
    rhs = g * g + g_fwd * g_fwd
    assert (lhs - rhs).sup() <= 1e-10
    # the same identities via trigonometric shifts stay at interpolation accuracy
    assert (g * g.shift(-alpha)).sup() <= 1e-10
    assert (lhs - (g * g + g.shift(alpha) * g.shift(alpha))).sup() <= 1e-9


def test_bump_width_validation():
    with pytest.raises(InvalidBumpWidth):
        bump_pair(0.6, 0.5, 512)
    with pytest.raises(AlphaOutOfRange):
        bump_pair(1.2, 0.01, 512)


# -------------------------------------------------------------------- pr_build


def test_plain_build_golden():
    e = pr_build(1, 0, GOLDEN)
    gates = projection_gates(e, GOLDEN.value, False)
    assert gates.square_residual <= 1e-8
    assert gates.adjoint_residual <= 1e-12
    assert gates.trace_error <= 1e-10
    assert abs(e.coefficient(0).mean().real - GOLDEN.value) <= 1e-10


def test_build_rejects_bad_flip_interval():
    with pytest.raises(AlphaOutOfRange):
        pr_build(1, 0, SQRT2, flip_symmetric=True)  # alpha = 0.414 not in (1/2, 1)


def test_build_r_validation():
    with pytest.raises(ValueError):
        pr_build(0, 1, GOLDEN)


TABLE_CASES = {
    "golden": {
        ("even", "odd"): (6, -3),
        ("even", "even"): (14, -8),
        ("odd", "odd"): (3, -1),
    },
    "sqrt2": {
        ("even", "odd"): (4, -1),
        ("even", "even"): (2, 0),
        ("odd", "odd"): (9, -3),
    },
}

EXPECTED_ROWS = {
    ("even", "odd"): (0, 1, 0, 0),
    ("even", "even"): (0, 0, 0, 0),
    ("odd", "odd"): (0.5, 0.5, -0.5, 0.5),
}


@pytest.mark.parametrize("preset", ["golden", "sqrt2"])
@pytest.mark.parametrize("parity", list(EXPECTED_ROWS))
def test_flip_symmetric_builds_reproduce_invariant_table(preset, parity):
    th = ThetaParam.preset(preset)
    r, s = TABLE_CASES[preset][parity]
    alpha = r * th.value + s
    e = pr_build(r, s, th, flip_symmetric=True)
    gates = projection_gates(e, alpha, True)
    assert gates.square_residual <= 1e-8
    assert gates.flip_residual <= 1e-8
    assert gates.trace_error <= 1e-10
    rep = loop_invariants(e, th, r)
    assert rep.tau == pytest.approx(alpha, abs=1e-10)
    got = tuple(None if v is None else float(v) for v in rep.rounded)
    assert got == tuple(float(x) for x in EXPECTED_ROWS[parity])


def test_r_odd_s_even_row():
    # the fourth parity combination: (1/2, 1/2, -1/2, -1/2)
    e = pr_build(7, -2, SQRT2, flip_symmetric=True)  # 7 theta - 2 ~ 0.8995
    rep = loop_invariants(e, SQRT2, 7)
    assert tuple(float(v) for v in rep.rounded) == (0.5, 0.5, -0.5, -0.5)


def test_trace_additivity_of_orthogonal_builds():
    th = GOLDEN
    alpha = 2 * th.value - 1  # ~ 0.236
    beta = (2 * th.value) % 1.0
    e = assemble_projection(alpha, beta, n=8192, eps=0.02, centered=True)
    e2 = assemble_projection(alpha, beta, n=8192, eps=0.02, centered=True, offset=0.5)
    total = e + e2
    assert total.coefficient(0).mean().real == pytest.approx(2 * alpha, abs=1e-10)


def test_semicyclic_surrogate_orthogonality():
    """Flip-symmetric builds on opposite arcs multiply to ~0."""
    th = GOLDEN
    alpha = 2 * th.value - 1  # ~ 0.236 < 1/4 leaves room for disjoint supports
    beta = (2 * th.value) % 1.0
    n = 16384
    e = assemble_projection(alpha, beta, n=n, eps=0.012, centered=True)
    e2 = assemble_projection(alpha, beta, n=n, eps=0.012, centered=True, offset=0.5)
    for x in (e, e2):
        gates = projection_gates(x, alpha, True)
        assert gates.square_residual <= 1e-8
        assert gates.flip_residual <= 1e-8
    assert loop_mul(e, e2).snorm() <= 1e-8
    assert loop_mul(e2, e).snorm() <= 1e-8


def test_build_refines_grid_when_too_coarse():
    # at n = 256 the bump is badly resolved; the builder must walk up
    e = pr_build(1, 0, GOLDEN, n=256)
    assert e.n > 256
    assert projection_gates(e, GOLDEN.value, False).square_residual <= 1e-8


# ------------------------------------------------------------------ invariants


def test_invariants_of_even_even_build_are_zero():
    th = SQRT2
    e = pr_build(2, 0, th, flip_symmetric=True)
    rep = loop_invariants(e, th, 2)
    for z in rep.raw:
        assert abs(z) <= 1e-6


def test_invariant_report_rounding_tolerance():
    from nctorus.loops import _round_quarter

    assert _round_quarter(0.25 + 1e-8 + 0j) == 0.25
    assert _round_quarter(0.25 + 1e-3 + 0j) is None
    assert _round_quarter(0.1 + 0j) is None


def test_eval_series_matches_samples_and_interpolates():
    f = CircleFunction.from_function(lambda t: np.exp(2j * np.pi * 5 * t), 512)
    assert f.eval_series(3 / 512) == pytest.approx(f.samples[3], abs=1e-12)
    x = 0.123456789
    assert f.eval_series(x) == pytest.approx(np.exp(2j * np.pi * 5 * x), abs=1e-12)
