"""Numeric loop algebra: elements sum_k f_k(W) V^k with W = U^r.

Coefficients are circle functions held as samples on a uniform dyadic
grid; off-grid values come from trigonometric interpolation through the
discrete Fourier coefficients.  With beta = r*theta mod 1 the base
unitary satisfies V W = e(beta) W V, hence the crossed-product rules

    (f V^a)(h V^b) = f * (h shifted by a*beta) V^{a+b}
    (f V^a)*       = conj(f) shifted by -a*beta, times V^{-a}

where "h shifted by s" means t -> h(t + s).

Projections of Powers-Rieffel type are built from a bump pair (f, g):
e = V g(W) + f(W) + g(W) V^{-1}.  The ramp transition is the
C-infinity two-branch blend B(u)/(B(u)+B(1-u)) with B(u) = exp(-1/u);
its spectral tails decay faster than any power, which is what lets the
projection residual, the trace and the invariant sums all meet their
gates on a 4096-point grid (a merely C^1 ramp provably cannot: the
square-root envelope g would have Lipschitz corners and O(1/j^2)
Fourier tails, i.e. ~1e-4 interpolation error).  g is computed as
sqrt(B(u) B(1-u))/(B(u)+B(1-u)) straight from the branches; going
through sqrt(f - f^2) would lose half the working precision to
cancellation next to the plateau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from .theta import ThetaParam

DEFAULT_GRID = 4096
MIN_GRID = 256
MAX_GRID = 65536

SQUARE_RESIDUAL_GATE = 1e-8
ADJOINT_RESIDUAL_GATE = 1e-12
FLIP_RESIDUAL_GATE = 1e-8
TRACE_GATE = 1e-10
ROUND_TOL = 1e-6


class GridMismatch(ValueError):
    """Operands live on different grids or carry different base steps."""


class AlphaOutOfRange(ValueError):
    pass


class InvalidBumpWidth(ValueError):
    pass


class ResidualExceeded(ArithmeticError):
    """Projection gates failed even on the largest allowed grid."""


def _check_grid(n: int) -> int:
    if n < MIN_GRID or n & (n - 1):
        raise ValueError(f"grid size must be a power of two >= {MIN_GRID}, got {n}")
    return n


class CircleFunction:
    """Complex samples on the grid t_j = j/N, N a power of two >= 256."""

    __slots__ = ("samples",)

    def __init__(self, samples: Iterable[complex]):
        arr = np.asarray(samples, dtype=complex)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        _check_grid(arr.shape[0])
        object.__setattr__(self, "samples", arr)

    def __setattr__(self, *args):
        raise AttributeError("CircleFunction is immutable")

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @staticmethod
    def grid(n: int) -> np.ndarray:
        return np.arange(_check_grid(n)) / n

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n: int = DEFAULT_GRID) -> "CircleFunction":
        return cls(np.asarray(fn(cls.grid(n)), dtype=complex))

    @classmethod
    def zero(cls, n: int = DEFAULT_GRID) -> "CircleFunction":
        return cls(np.zeros(n, dtype=complex))

    # ------------------------------------------------------------ operations

    def _binary(self, other, op) -> "CircleFunction":
        if isinstance(other, CircleFunction):
            if other.n != self.n:
                raise GridMismatch(f"grid sizes differ: {self.n} vs {other.n}")
            return CircleFunction(op(self.samples, other.samples))
        return CircleFunction(op(self.samples, other))

    def __add__(self, other) -> "CircleFunction":
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other) -> "CircleFunction":
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other) -> "CircleFunction":
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, scalar) -> "CircleFunction":
        return CircleFunction(scalar * self.samples)

    def __neg__(self) -> "CircleFunction":
        return CircleFunction(-self.samples)

    def conj(self) -> "CircleFunction":
        return CircleFunction(np.conj(self.samples))

    def reflect(self) -> "CircleFunction":
        """t -> -t; exact on the grid."""
        idx = (-np.arange(self.n)) % self.n
        return CircleFunction(self.samples[idx])

    def freqs(self) -> np.ndarray:
        """Integer frequencies in FFT order (Nyquist bin counted as -N/2)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    def coeffs(self) -> np.ndarray:
        """Discrete Fourier coefficients c_m of sum c_m e(m t), FFT order."""
        return np.fft.fft(self.samples) / self.n

    def shift(self, s: float) -> "CircleFunction":
        """Trigonometric interpolation of t -> f(t + s)."""
        spectrum = np.fft.fft(self.samples)
        phase = np.exp(2j * np.pi * self.freqs() * s)
        return CircleFunction(np.fft.ifft(spectrum * phase))

    def eval_series(self, x: float) -> complex:
        """Value of the interpolating trigonometric polynomial at x."""
        return complex(np.sum(self.coeffs() * np.exp(2j * np.pi * self.freqs() * x)))

    def sup(self) -> float:
        return float(np.abs(self.samples).max()) if self.n else 0.0

    def mean(self) -> complex:
        return complex(self.samples.mean())

    def to_json(self) -> list:
        return [[float(z.real), float(z.imag)] for z in self.samples]

    @classmethod
    def from_json(cls, data) -> "CircleFunction":
        return cls(np.array([complex(re, im) for re, im in data]))


class LoopElement:
    """Finite sum  sum_k f_k(W) V^k  over a fixed base step beta and grid."""

    __slots__ = ("beta", "n", "coeffs")

    def __init__(self, beta: float, coeffs: Mapping[int, CircleFunction], n: Optional[int] = None):
        cleaned: Dict[int, CircleFunction] = {}
        for k, f in dict(coeffs).items():
            if n is None:
                n = f.n
            if f.n != n:
                raise GridMismatch("all coefficients must share one grid")
            cleaned[int(k)] = f
        if n is None:
            n = DEFAULT_GRID
        object.__setattr__(self, "beta", float(beta) % 1.0)
        object.__setattr__(self, "n", _check_grid(n))
        object.__setattr__(self, "coeffs", cleaned)

    def __setattr__(self, *args):
        raise AttributeError("LoopElement is immutable")

    def coefficient(self, k: int) -> CircleFunction:
        return self.coeffs.get(k, CircleFunction.zero(self.n))

    def _compatible(self, other: "LoopElement") -> None:
        if self.n != other.n:
            raise GridMismatch(f"grid sizes differ: {self.n} vs {other.n}")
        if abs(self.beta - other.beta) > 1e-15:
            raise GridMismatch(f"base steps differ: {self.beta} vs {other.beta}")

    def __add__(self, other: "LoopElement") -> "LoopElement":
        self._compatible(other)
        out = dict(self.coeffs)
        for k, f in other.coeffs.items():
            out[k] = out[k] + f if k in out else f
        return LoopElement(self.beta, out, self.n)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        self._compatible(other)
        out = dict(self.coeffs)
        for k, f in other.coeffs.items():
            out[k] = out[k] - f if k in out else -f
        return LoopElement(self.beta, out, self.n)

    def __mul__(self, other: "LoopElement") -> "LoopElement":
        return loop_mul(self, other)

    def star(self) -> "LoopElement":
        return loop_star(self)

    def snorm(self) -> float:
        """The norm surrogate: sum over V-powers of coefficient sup-norms.

        Submultiplicative for the product rule above, and it dominates the
        operator norm, so residual gates in it are meaningful.
        """
        return sum(f.sup() for f in self.coeffs.values())

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "n": self.n,
            "coeffs": {str(k): f.to_json() for k, f in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "LoopElement":
        coeffs = {int(k): CircleFunction.from_json(v) for k, v in data["coeffs"].items()}
        return cls(float(data["beta"]), coeffs, int(data["n"]))


def loop_mul(x: LoopElement, y: LoopElement) -> LoopElement:
    """(f V^a)(h V^b) = f * (h shifted by a*beta) V^{a+b}, extended bilinearly."""
    x._compatible(y)
    acc: Dict[int, CircleFunction] = {}
    for a, fa in x.coeffs.items():
        for b, hb in y.coeffs.items():
            term = fa * (hb.shift(a * x.beta) if a else hb)
            k = a + b
            acc[k] = acc[k] + term if k in acc else term
    return LoopElement(x.beta, acc, x.n)


def loop_star(x: LoopElement) -> LoopElement:
    """(f V^a)* = conj(f) shifted by -a*beta, times V^{-a}."""
    out: Dict[int, CircleFunction] = {}
    for a, fa in x.coeffs.items():
        g = fa.conj()
        out[-a] = g.shift(-a * x.beta) if a else g
    return LoopElement(x.beta, out, x.n)


def flip_apply(e: LoopElement) -> LoopElement:
    """The flip in loop coordinates: coefficient k becomes f_{-k}(-t).

    Matches the exact automorphism U^{rm} V^k -> U^{-rm} V^{-k} on
    monomial loop elements; exact on the grid (index reflection).
    """
    return LoopElement(e.beta, {-k: f.reflect() for k, f in e.coeffs.items()}, e.n)


def monomial_loop(k: int, m: int, n: int = DEFAULT_GRID, beta: float = 0.0) -> LoopElement:
    """The element W^m V^k as a loop element (coefficient t -> e(m t))."""
    f = CircleFunction.from_function(lambda t: np.exp(2j * np.pi * m * t), n)
    return LoopElement(beta, {k: f}, n)


# ------------------------------------------------------------------ bump pair


def _branches(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(B(u), B(1-u)) with B(u) = exp(-1/u) continued by 0 for u <= 0."""
    u = np.asarray(u, dtype=float)
    bu = np.zeros_like(u)
    b1 = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    ui = u[inside]
    bu[inside] = np.exp(-1.0 / ui)
    b1[inside] = np.exp(-1.0 / (1.0 - ui))
    bu[u >= 1] = 1.0
    b1[u <= 0] = 1.0
    return bu, b1


def _smoothstep(u: np.ndarray) -> np.ndarray:
    bu, b1 = _branches(u)
    return bu / (bu + b1)


def bump_profiles(alpha: float, eps: float) -> Tuple[Callable, Callable]:
    """Closed-form bump pair on the circle.

    f ramps 0 -> 1 on [0, eps], holds 1 on [eps, alpha], ramps back on
    [alpha, alpha + eps] and vanishes elsewhere; g lives on the down-ramp
    with g^2 = f - f^2 there.  On the grid these satisfy exactly the
    projection identities

        g(t) g(t + alpha) = 0
        g(t) (f(t) + f(t - alpha) - 1) = 0
        f - f^2 = g^2 + (g shifted by alpha)^2

    which make V g(W) + f(W) + g(W) V^{-1} idempotent.
    """
    if not 0 < alpha < 1:
        raise AlphaOutOfRange(f"alpha must be in (0, 1), got {alpha}")
    if not 0 < eps < min(alpha, 1 - alpha) / 2:
        raise InvalidBumpWidth(
            f"need 0 < eps < min(alpha, 1-alpha)/2 = {min(alpha, 1 - alpha) / 2}, got {eps}"
        )

    def f_profile(t: np.ndarray) -> np.ndarray:
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        out = np.zeros_like(t)
        up = t < eps
        out[up] = _smoothstep(t[up] / eps)
        out[(t >= eps) & (t <= alpha)] = 1.0
        down = (t > alpha) & (t < alpha + eps)
        out[down] = 1.0 - _smoothstep((t[down] - alpha) / eps)
        return out

    def g_profile(t: np.ndarray) -> np.ndarray:
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        out = np.zeros_like(t)
        down = (t > alpha) & (t < alpha + eps)
        bu, b1 = _branches((t[down] - alpha) / eps)
        denom = bu + b1
        out[down] = np.sqrt(bu * b1) / np.where(denom > 0, denom, 1.0)
        return out

    return f_profile, g_profile


def bump_pair(alpha: float, eps: float, n: int = DEFAULT_GRID) -> Tuple[CircleFunction, CircleFunction]:
    """Sample the bump pair on an n-point grid."""
    f_profile, g_profile = bump_profiles(alpha, eps)
    return (
        CircleFunction.from_function(f_profile, n),
        CircleFunction.from_function(g_profile, n),
    )


# ------------------------------------------------------------------- building


@dataclass(frozen=True)
class BuildGates:
    square_residual: float
    adjoint_residual: float
    flip_residual: Optional[float]
    trace_error: float


def assemble_projection(
    alpha: float,
    beta: float,
    *,
    n: int = DEFAULT_GRID,
    eps: Optional[float] = None,
    centered: bool = False,
    offset: float = 0.0,
) -> LoopElement:
    """Assemble  e = V g(W) + f(W) + g(W) V^{-1}  by exact profile sampling.

    All three coefficient arrays are evaluated from the closed-form
    profiles (no interpolation enters the build itself).  With
    ``centered=True`` both profiles are translated by (alpha + eps - 1)/2,
    which puts the plateau of f at 1/2, makes f even, and makes g even
    about (alpha + 1)/2 -- exactly the symmetry that the flip preserves.
    An extra ``offset`` of 1/2 keeps the symmetry while moving the
    support to the opposite arc; other offsets break it.
    """
    if eps is None:
        eps = min(alpha, 1 - alpha) / 4
    f_profile, g_profile = bump_profiles(alpha, eps)
    delta = ((alpha + eps - 1) / 2 if centered else 0.0) + offset
    t = CircleFunction.grid(n)
    f0 = CircleFunction(f_profile(t + delta).astype(complex))
    gm = CircleFunction(g_profile(t + delta).astype(complex))
    gp = CircleFunction(g_profile(t + delta + alpha).astype(complex))
    return LoopElement(beta, {1: gp, 0: f0, -1: gm}, n)


def projection_gates(e: LoopElement, alpha: float, flip_symmetric: bool) -> BuildGates:
    ee = loop_mul(e, e)
    square = (ee - e).snorm()
    adjoint = (loop_star(e) - e).snorm()
    flip_res = (flip_apply(e) - e).snorm() if flip_symmetric else None
    trace = abs(e.coefficient(0).mean().real - alpha)
    return BuildGates(square, adjoint, flip_res, trace)


def pr_build(
    r: int,
    s: int,
    theta: ThetaParam,
    flip_symmetric: bool = False,
    *,
    n: int = DEFAULT_GRID,
    eps: Optional[float] = None,
    offset: float = 0.0,
    max_n: int = MAX_GRID,
) -> LoopElement:
    """Build a Powers-Rieffel projection over the base W = U^r.

    Flip-symmetric builds use alpha = r*theta + s, which must lie in
    (1/2, 1) (the regime in which the invariant table below holds), and
    recentre the bump pair so the flip fixes the element; ``offset`` must
    then be 0 or 1/2.  Plain builds use alpha = (r*theta + s) mod 1 and
    any offset.  Residual gates |e^2 - e|, |e* - e| (and |flip(e) - e|
    when applicable) drive automatic grid refinement x4 up to ``max_n``;
    if the gates still fail, ResidualExceeded is raised.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    if flip_symmetric:
        # exact interval check on r*theta + s
        if not theta.in_open_interval(Fraction(s), r, Fraction(1, 2), 1):
            raise AlphaOutOfRange(
                f"alpha-out-of-range: r*theta + s = {r}*theta{s:+d} is not in (1/2, 1)"
            )
        if offset not in (0.0, 0.5):
            raise ValueError("flip-symmetric builds admit only offsets 0 and 1/2")
        alpha = r * theta.value + s
    else:
        alpha = (r * theta.value + s) % 1.0
    beta = (r * theta.value) % 1.0
    grid = _check_grid(n)
    while True:
        e = assemble_projection(
            alpha, beta, n=grid, eps=eps, centered=flip_symmetric, offset=offset
        )
        gates = projection_gates(e, alpha, flip_symmetric)
        ok = (
            gates.square_residual <= SQUARE_RESIDUAL_GATE
            and gates.adjoint_residual <= ADJOINT_RESIDUAL_GATE
            and gates.trace_error <= TRACE_GATE
            and (gates.flip_residual is None or gates.flip_residual <= FLIP_RESIDUAL_GATE)
        )
        if ok:
            return e
        if grid * 4 > max_n:
            raise ResidualExceeded(
                f"residual-exceeded: gates {gates} not met at grid {grid} "
                f"(limit {max_n}); the grid is too coarse for this bump"
            )
        grid *= 4


# ----------------------------------------------------------------- invariants


@dataclass(frozen=True)
class InvariantReport:
    """Numeric trace and flip-type invariants of a loop element.

    ``raw`` holds the unrounded complex values (phi00, phi01, phi10,
    phi11); ``rounded`` snaps each to the nearest quarter-integer when it
    is within ROUND_TOL of one, else None.
    """

    tau: float
    raw: Tuple[complex, complex, complex, complex]
    rounded: Tuple[Optional[Fraction], ...]

    def rounded_vector(self) -> Tuple[Optional[Fraction], ...]:
        return self.rounded

    def to_json(self) -> dict:
        return {
            "tau": self.tau,
            "phi_raw": [[z.real, z.imag] for z in self.raw],
            "phi_rounded": [None if r is None else str(r) for r in self.rounded],
        }


def _round_quarter(z: complex) -> Optional[Fraction]:
    nearest = Fraction(round(4 * z.real), 4)
    if abs(z.real - float(nearest)) <= ROUND_TOL and abs(z.imag) <= ROUND_TOL:
        return nearest
    return None


def loop_invariants(e: LoopElement, theta: ThetaParam, r: int) -> InvariantReport:
    """Evaluate tau and the four flip-twisted traces through Fourier coefficients.

    For e = sum c_{k,m} U^{rm} V^k the slot (i, j) equals
    sum over k = j (2), rm = i (2) of c_{k,m} e(-theta*r*m*k/2);
    tau is the mean of the V^0 coefficient.
    """
    tv = theta.value
    tau = e.coefficient(0).mean().real
    raw = []
    for i in (0, 1):
        for j in (0, 1):
            total = 0j
            for k, f in e.coeffs.items():
                if (k - j) % 2 != 0:
                    continue
                c = f.coeffs()
                m = f.freqs()
                sel = (r * m - i) % 2 == 0
                if not np.any(sel):
                    continue
                phases = np.exp(-1j * np.pi * tv * r * m[sel] * k)
                total += complex(np.sum(c[sel] * phases))
            raw.append(total)
    raw_t = (raw[0], raw[1], raw[2], raw[3])  # (00, 01, 10, 11)
    return InvariantReport(
        tau=float(tau),
        raw=raw_t,
        rounded=tuple(_round_quarter(z) for z in raw_t),
    )
