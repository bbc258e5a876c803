"""Probabilist's Hermite polynomials, their rescaled companions, and the
absolute Gaussian moments E|p(Z)| that appear as dimension-normalized limits
of the projection constants.

h_0 = 1, h_1 = t, h_{n+1} = t*h_n - n*h_{n-1} (orthogonal for the standard
Gaussian weight).  P_d = h_d / d! satisfies the recursion
P_d = t^d/d! - sum_{k=1}^{floor(d/2)} P_{d-2k} / (k! 2^k), which is how it is
built here; the equality with h_d/d! is a test, not an assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc

from .core import CubeError, SizeGuardError

MAX_POLY_DEGREE = 200
MAX_MOMENT_DEGREE = 60


@dataclass(frozen=True)
class RationalPolynomial:
    """Dense univariate polynomial, exact rational coefficients, lowest first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = tuple(Fraction(c) for c in self.coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t):
        acc = 0 if not isinstance(t, float) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + (float(c) if isinstance(t, float) else c)
        return acc

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPolynomial(tuple(out))

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "RationalPolynomial":
        f = Fraction(factor)
        return RationalPolynomial(tuple(c * f for c in self.coeffs))

    def shifted_up(self, k: int) -> "RationalPolynomial":
        """Multiply by t^k."""
        if self.is_zero():
            return self
        return RationalPolynomial((Fraction(0),) * k + self.coeffs)

    def times_t(self) -> "RationalPolynomial":
        return self.shifted_up(1)


def monomial(d: int, coeff=1) -> RationalPolynomial:
    return RationalPolynomial((Fraction(0),) * d + (Fraction(coeff),))


_hermite_cache: list[RationalPolynomial] = [
    RationalPolynomial((Fraction(1),)),
    RationalPolynomial((Fraction(0), Fraction(1))),
]


def hermite_poly(d: int) -> RationalPolynomial:
    """h_d via the three-term recurrence; integer coefficients."""
    if not 0 <= d <= MAX_POLY_DEGREE:
        raise SizeGuardError(f"hermite degree {d} outside [0, {MAX_POLY_DEGREE}]")
    while len(_hermite_cache) <= d:
        n = len(_hermite_cache) - 1
        h_n, h_prev = _hermite_cache[n], _hermite_cache[n - 1]
        _hermite_cache.append(h_n.times_t() - h_prev.scaled(n))
    return _hermite_cache[d]


_p_cache: list[RationalPolynomial] = [
    RationalPolynomial((Fraction(1),)),
    RationalPolynomial((Fraction(0), Fraction(1))),
]


def p_poly(d: int) -> RationalPolynomial:
    """P_d from its defining recursion (independent of hermite_poly)."""
    if not 0 <= d <= MAX_POLY_DEGREE:
        raise SizeGuardError(f"P degree {d} outside [0, {MAX_POLY_DEGREE}]")
    while len(_p_cache) <= d:
        n = len(_p_cache)
        p = monomial(n, Fraction(1, math.factorial(n)))
        for k in range(1, n // 2 + 1):
            p = p - _p_cache[n - 2 * k].scaled(Fraction(1, math.factorial(k) * 2**k))
        _p_cache.append(p)
    return _p_cache[d]


def hermite_value_normalized(d: int, t: float) -> float:
    """h_d(t)/sqrt(d!) by the orthonormal recurrence; stable for large d."""
    if d == 0:
        return 1.0
    prev, cur = 1.0, t
    for n in range(1, d):
        prev, cur = cur, (t * cur - math.sqrt(n) * prev) / math.sqrt(n + 1)
    return cur


_roots_cache: dict[int, tuple[float, ...]] = {1: (0.0,)}


def hermite_roots(d: int) -> list[float]:
    """The d real roots of h_d, ascending, via interlacing bisection.

    Roots of h_{n-1} strictly interlace those of h_n, so the roots of
    h_{n-1} plus the outer bound sqrt(4n+2) bracket each root of h_n with a
    sign change of the (orthonormal) evaluation.
    """
    if not 1 <= d <= MAX_MOMENT_DEGREE:
        raise SizeGuardError(f"root degree {d} outside [1, {MAX_MOMENT_DEGREE}]")
    for n in range(max(_roots_cache) + 1, d + 1):
        inner = _roots_cache[n - 1]
        bound = math.sqrt(4 * n + 2)
        brackets = [-bound, *inner, bound]
        roots = []
        for lo, hi in zip(brackets, brackets[1:]):
            flo = hermite_value_normalized(n, lo)
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                fmid = hermite_value_normalized(n, mid)
                if fmid == 0.0:
                    lo = hi = mid
                    break
                if (flo < 0) == (fmid < 0):
                    lo, flo = mid, fmid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
        _roots_cache[n] = tuple(roots)
    return list(_roots_cache[d])


def _real_roots(p: RationalPolynomial) -> list[float]:
    """Real roots of a general rational polynomial (companion matrix + Newton)."""
    coeffs = np.array([float(c) for c in p.coeffs])
    if len(coeffs) <= 1:
        return []
    roots = np.polynomial.polynomial.polyroots(coeffs)
    real = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-8 * (1 + abs(r)))
    deriv = np.polynomial.polynomial.polyder(coeffs)
    refined = []
    for r in real:
        for _ in range(3):
            dv = np.polynomial.polynomial.polyval(r, deriv)
            if dv == 0:
                break
            r -= np.polynomial.polynomial.polyval(r, coeffs) / dv
        if not refined or r - refined[-1] > 1e-12 * (1 + abs(r)):
            refined.append(float(r))
    return refined


def _gaussian_density(t: float) -> float:
    return math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi)


def _upper_tail_moments(T: float, max_k: int) -> list[float]:
    """I_k = integral_T^inf t^k phi(t) dt, k = 0..max_k.

    I_0 = erfc(T/sqrt2)/2, I_1 = phi(T), I_k = T^{k-1} phi(T) + (k-1) I_{k-2}.
    """
    phi_T = _gaussian_density(T)
    moments = [float(erfc(T / math.sqrt(2))) / 2.0]
    if max_k >= 1:
        moments.append(phi_T)
    power = 1.0  # T^{k-1} built incrementally
    for k in range(2, max_k + 1):
        power *= T
        moments.append(power * phi_T + (k - 1) * moments[k - 2])
    return moments


def _abs_moment_piecewise(
    eval_fn: Callable[[float], float],
    float_coeffs: Sequence[float],
    roots: Sequence[float],
    tol: float,
) -> float:
    """E|p(Z)| with |p| integrated between consecutive roots, analytic tails.

    eval_fn evaluates p at a float; float_coeffs are p's coefficients (lowest
    first) used only for the sign-constant tails beyond all roots.
    """
    T = max(12.0, (max(abs(r) for r in roots) + 8.0) if roots else 12.0)
    cuts = [-T, *[r for r in roots if -T < r < T], T]
    pieces = []
    budget = tol / (len(cuts) + 1)
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < 1e-15:
            continue
        val, _err = quad(
            lambda t: abs(eval_fn(t)) * _gaussian_density(t),
            lo,
            hi,
            epsabs=budget,
            epsrel=1e-13,
            limit=200,
        )
        pieces.append(val)
    deg = len(float_coeffs) - 1
    moments = _upper_tail_moments(T, deg)
    upper = math.fsum(c * m for c, m in zip(float_coeffs, moments))
    lower = math.fsum(c * (-1) ** k * m for k, (c, m) in enumerate(zip(float_coeffs, moments)))
    lead = float_coeffs[-1] if float_coeffs else 0.0
    sign_upper = 1.0 if lead >= 0 else -1.0
    sign_lower = sign_upper * (1.0 if deg % 2 == 0 else -1.0)
    return math.fsum([sign_lower * lower, *pieces, sign_upper * upper])


def abs_gaussian_moment(p: RationalPolynomial, tol: float = 1e-11) -> float:
    """E|p(Z)| for standard normal Z.

    Splits at the real roots of p (the only kinks of |p|), adaptive
    quadrature per smooth piece, closed-form Gaussian moments beyond
    max(12, largest root + 8) where the sign is constant.
    """
    if tol < 1e-13:
        raise CubeError(f"tol {tol} below quadrature floor 1e-13")
    if p.is_zero():
        return 0.0
    if p.degree() == 0:
        return abs(float(p.coeffs[0]))
    coeffs = [float(c) for c in p.coeffs]
    return _abs_moment_piecewise(p, coeffs, _real_roots(p), tol)


def normalized_limit_constant(d: int, tol: float = 1e-11) -> float:
    """E|h_d(Z)|/sqrt(d!), evaluated through the orthonormal recurrence."""
    if not 1 <= d <= MAX_MOMENT_DEGREE:
        raise SizeGuardError(f"degree {d} outside [1, {MAX_MOMENT_DEGREE}]")
    scale = math.exp(-0.5 * math.lgamma(d + 1))
    coeffs = [float(c) * scale for c in hermite_poly(d).coeffs]
    return _abs_moment_piecewise(
        lambda t: hermite_value_normalized(d, t), coeffs, hermite_roots(d), tol
    )


def limit_constant(d: int) -> float:
    """lim_N lambda(homogeneous degree-d space)/N^{d/2} = E|P_d(Z)|."""
    if not 1 <= d <= MAX_MOMENT_DEGREE:
        raise SizeGuardError(f"degree {d} outside [1, {MAX_MOMENT_DEGREE}]")
    if d <= 20:
        return abs_gaussian_moment(p_poly(d), 1e-11)
    # d! overflows nothing here, but P_d's float coefficients lose accuracy;
    # go through the orthonormal form instead.
    return normalized_limit_constant(d) * math.exp(-0.5 * math.lgamma(d + 1))


def larsson_cohn_ratio(d: int) -> float:
    """E|h_d|/sqrt(d!) divided by its asymptote 2^{7/4} pi^{-5/4} d^{-1/4}."""
    if not 1 <= d <= MAX_MOMENT_DEGREE:
        raise SizeGuardError(f"degree {d} outside [1, {MAX_MOMENT_DEGREE}]")
    asymptote = 2.0 ** (7 / 4) * math.pi ** (-5 / 4) * d ** (-1 / 4)
    return normalized_limit_constant(d) / asymptote
