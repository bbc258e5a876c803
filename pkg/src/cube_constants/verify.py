"""Inequality verification suites: every bound the exact machinery can reach
is recomputed and compared, with integer left-hand sides wherever the
quantity is a binomial sum and 1e-12 relative slack where floats appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import erfcx

from . import combinatorics
from .core import CubeError
from .projection import lambda_level_exact

_REL_SLACK = 1e-12
_UPTO_CONSTANT = 2.69076
_KLIMEK_CONSTANT = 1 + math.sqrt(2)


@dataclass(frozen=True)
class BoundsReport:
    name: str
    lhs: float
    rhs: float
    passed: bool
    context: dict = field(default_factory=dict, compare=False)


def _le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + _REL_SLACK * max(abs(lhs), abs(rhs))


def _report(name: str, lhs, rhs, **context) -> BoundsReport:
    return BoundsReport(name, float(lhs), float(rhs), _le(float(lhs), float(rhs)), context)


def check_range_bounds(n: int, d: int, mode: str = "exact-degree") -> list[BoundsReport]:
    """Sandwiches for lambda of the full degree-d (or <= d) family: the
    trivial 1..sqrt|S| range, the hypercontractive lower bound, and the
    (N/d)^{d/2}-scale pinch."""
    lam = lambda_level_exact(n, d, mode)
    upto = mode in ("up-to-degree", "upto")
    size = (
        sum(math.comb(n, k) for k in range(d + 1)) if upto else math.comb(n, d)
    )
    hyper = _UPTO_CONSTANT**d if upto else math.exp(d / 2)
    scale = (n / d) ** (d / 2)
    lam_f = float(lam)
    ctx = {"N": n, "d": d, "mode": "up-to-degree" if upto else "exact-degree",
           "lambda": lam_f, "family_size": size}
    return [
        BoundsReport("kadets-snobar-lower", 1.0, lam_f, lam >= 1, ctx),
        BoundsReport("kadets-snobar-upper", lam_f, math.sqrt(size),
                      lam * lam <= size, ctx),
        _report("hypercontractive-lower", math.sqrt(size) / hyper, lam_f, **ctx),
        _report("scale-lower", scale / hyper, lam_f, **ctx),
        _report("scale-upper", lam_f, math.exp(d / 2) * scale, **ctx),
    ]


def y_function(x: float) -> float:
    """Y(x) = e^{x^2/2} Int_x^inf e^{-t^2/2} dt, cancellation-free."""
    if x < 0:
        raise CubeError(f"Y is defined for x >= 0, got {x}")
    return math.sqrt(math.pi / 2) * float(erfcx(x / math.sqrt(2)))


def szarek_y_bounds(grid=None) -> list[BoundsReport]:
    """2/(x+sqrt(x^2+4)) <= Y(x) <= 4/(3x+sqrt(x^2+8)) over the grid; the two
    reports carry the worst margin of each side."""
    if grid is None:
        grid = [k / 10 for k in range(501)]
    worst_low = worst_high = None
    for x in grid:
        y = y_function(x)
        low = 2 / (x + math.sqrt(x * x + 4))
        high = 4 / (3 * x + math.sqrt(x * x + 8))
        if worst_low is None or low - y > worst_low[0]:
            worst_low = (low - y, x, low, y)
        if worst_high is None or y - high > worst_high[0]:
            worst_high = (y - high, x, y, high)
    return [
        _report("szarek-lower", worst_low[2], worst_low[3],
                x=worst_low[1], grid_points=len(grid)),
        _report("szarek-upper", worst_high[2], worst_high[3],
                x=worst_high[1], grid_points=len(grid)),
    ]


def _partial_binomial_sum(n: int, m: int) -> int:
    """sum_{k=0}^m C(n,k), exact; near-central sums for odd n use the
    half-total 2^{n-1} minus a short top band."""
    if m < 0:
        return 0
    if m >= n:
        return 1 << n
    half = (n - 1) // 2
    if n % 2 == 1 and half - 16 <= m <= half:
        total = 1 << (n - 1)
        for k in range(m + 1, half + 1):
            total -= math.comb(n, k)
        return total
    return sum(math.comb(n, k) for k in range(m + 1))


def mckay_constant(n: int, alpha: int) -> BoundsReport:
    """Solve the cumulative-binomial formula for its correction exponent:
    sum_{k <= (N-a-1)/2} C(N,k) = sqrt(N) C(N-1,(N-a-1)/2) Y((a+1)/sqrt(N))
    e^{c/sqrt(N)}; the claim is 0 <= c <= sqrt(pi/2)."""
    if not 0 <= alpha < n:
        raise CubeError(f"need 0 <= alpha < N, got alpha={alpha}, N={n}")
    if (n - alpha) % 2 == 0:
        raise CubeError(f"N - alpha = {n - alpha} must be odd")
    if n > 4001:
        raise CubeError(f"N={n} exceeds the 4001 sweep cap")
    m = (n - alpha - 1) // 2
    lhs = _partial_binomial_sum(n, m)
    log_rhs_unit = (
        0.5 * math.log(n)
        + math.log(math.comb(n - 1, m))
        + math.log(y_function((alpha + 1) / math.sqrt(n)))
    )
    c = math.sqrt(n) * (math.log(lhs) - log_rhs_unit)
    upper = math.sqrt(math.pi / 2)
    passed = c >= -_REL_SLACK and _le(c, upper)
    return BoundsReport("mckay-c-range", c, upper, passed,
                        {"N": n, "alpha": alpha, "c": c, "log_lhs": math.log(lhs)})


def check_desigforo(n: int, d: int) -> BoundsReport:
    """sum_{k<=d} C(N,k) <= C(N,d) (N-d+1)/(N-2d+1), exact integers."""
    if 2 * d - 1 >= n:
        raise CubeError(f"need 2d-1 < N, got d={d}, N={n}")
    lhs = sum(math.comb(n, k) for k in range(d + 1))
    rhs = Fraction(math.comb(n, d) * (n - d + 1), n - 2 * d + 1)
    return BoundsReport("desigforo", float(lhs), float(rhs), lhs <= rhs,
                        {"N": n, "d": d})


def _butterfly_columns(table: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh butterfly down axis 0 of a (2^N, trials) array."""
    size, cols = table.shape
    step = 1
    while step < size:
        v = table.reshape(-1, 2 * step, cols)
        left = v[:, :step, :].copy()
        v[:, :step, :] += v[:, step:, :]
        v[:, step:, :] *= -1
        v[:, step:, :] += left
        step *= 2
    return table


def check_klimek(n: int, d: int, trials: int = 500, seed: int = 42) -> BoundsReport:
    """||f_k||_inf <= (1+sqrt2)^d ||f||_inf for every homogeneous part of
    random degree-<=d polynomials (no extremal construction is known, so
    this is a randomized audit; seed and trials ride in the context)."""
    if n > 14 or d > n:
        raise CubeError(f"need d <= N <= 14, got d={d}, N={n}")
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    weights = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)
    support = weights <= d
    table = np.zeros((1 << n, trials))
    table[support, :] = rng.uniform(-1.0, 1.0, size=(int(support.sum()), trials))
    coeff_copy = table.copy()
    values = _butterfly_columns(table)
    sup_f = np.max(np.abs(values), axis=0)
    bound = _KLIMEK_CONSTANT**d
    max_ratio = 0.0
    worst_k = 0
    for k in range(d + 1):
        part = np.where((weights == k)[:, None], coeff_copy, 0.0)
        sup_k = np.max(np.abs(_butterfly_columns(part)), axis=0)
        ratio = float(np.max(sup_k / sup_f))
        if ratio > max_ratio:
            max_ratio, worst_k = ratio, k
    return BoundsReport("klimek", max_ratio, bound, _le(max_ratio, bound),
                        {"N": n, "d": d, "trials": trials, "seed": seed,
                         "worst_k": worst_k})


def check_homog_vs_upto(n: int, d: int) -> BoundsReport:
    """lambda(degree exactly d) <= (1+sqrt2)^d lambda(degree <= d)."""
    lam_h = lambda_level_exact(n, d, "exact-degree")
    lam_u = lambda_level_exact(n, d, "up-to-degree")
    rhs = _KLIMEK_CONSTANT**d * float(lam_u)
    return BoundsReport("homog-vs-upto", float(lam_h), rhs,
                        _le(float(lam_h), rhs),
                        {"N": n, "d": d, "lambda_homog": float(lam_h),
                         "lambda_upto": float(lam_u)})


def range_suite(max_n: int = 12) -> list[BoundsReport]:
    reports = []
    for n in range(1, max_n + 1):
        for d in range(1, n + 1):
            reports.extend(check_range_bounds(n, d, "exact-degree"))
            reports.extend(check_range_bounds(n, d, "up-to-degree"))
            reports.append(check_homog_vs_upto(n, d))
    return reports


def mckay_suite(max_n: int = 4001) -> list[BoundsReport]:
    reports = szarek_y_bounds()
    for n in range(1, max_n + 1, 2):
        for alpha in (0, 2, 4):
            if alpha < n:
                reports.append(mckay_constant(n, alpha))
    return reports


def desigforo_suite(max_n: int = 200, max_d: int = 10) -> list[BoundsReport]:
    reports = []
    for n in range(2, max_n + 1):
        for d in range(1, max_d + 1):
            if 2 * d - 1 < n:
                reports.append(check_desigforo(n, d))
    return reports


def klimek_suite(trials: int = 500, seed: int = 42) -> list[BoundsReport]:
    return [check_klimek(8, 3, trials=trials, seed=seed)]


def combinatorics_suite(max_n: int = 12) -> list[BoundsReport]:
    """Power identity, the two closed C-coefficient forms, the coefficient
    bounds, the N->inf ratio, and the Beckner fits as pass/fail reports."""
    reports = []
    worst_disc, worst_at = -1, None
    for d in range(1, 6):
        for n in range(d, min(max_n, 12) + 1):
            rep = combinatorics.verify_power_identity(d, n)
            if rep.max_discrepancy > worst_disc:
                worst_disc, worst_at = rep.max_discrepancy, (d, n)
    reports.append(BoundsReport("power-identity", worst_disc, 0, worst_disc == 0,
                                {"max_d": 5, "max_n": min(max_n, 12),
                                 "worst_at": worst_at}))
    closed_ok = all(
        combinatorics.c_coefficient(2, 1, n) == n
        and combinatorics.c_coefficient(3, 1, n) == 3 * n - 2
        for n in range(3, 51)
    )
    reports.append(BoundsReport("c-coefficient-closed-forms", 0.0, 0.0, closed_ok,
                                {"range": "3..50"}))
    for d in range(2, 7):
        for k in range(1, d // 2 + 1):
            value = combinatorics.c_coefficient(d, k, 200)
            lo, hi = combinatorics.c_coefficient_bounds(d, k, 200)
            reports.append(BoundsReport(
                f"c-coefficient-bounds-d{d}k{k}", lo, value, lo <= value <= hi,
                {"N": 200, "upper": hi}))
            limit = math.factorial(d) / (math.factorial(k) * 2**k)
            ratio = value / 200**k
            reports.append(_report(
                f"c-limit-ratio-d{d}k{k}", abs(ratio / limit - 1), 10 * d / 200,
                N=200, ratio=ratio, limit=limit))
    for d, n in ((2, 40), (3, 40), (4, 80), (5, 160)):
        fit = combinatorics.beckner_coefficients(d, n)
        reports.append(_report(f"beckner-residual-d{d}", fit.residual, 1e-8,
                               N=n, a=list(fit.a)))
    return reports


def combinatorics_document(max_n: int = 12) -> dict:
    """Same checks as combinatorics_suite, shaped as one document:
    {"identity": bool, "c_table": [...], "beckner": [...]}."""
    identity = True
    for d in range(1, 6):
        for n in range(d, min(max_n, 12) + 1):
            rep = combinatorics.verify_power_identity(d, n)
            identity = identity and rep.max_discrepancy == 0
    c_table = []
    for d in range(2, 7):
        for k in range(1, d // 2 + 1):
            value = combinatorics.c_coefficient(d, k, 200)
            lo, hi = combinatorics.c_coefficient_bounds(d, k, 200)
            limit = math.factorial(d) / (math.factorial(k) * 2**k)
            c_table.append({
                "d": d, "k": k, "N": 200, "value": value,
                "lower": lo, "upper": hi,
                "within_bounds": lo <= value <= hi,
                "ratio": value / 200**k, "limit": limit,
            })
    beckner = []
    for d, n in ((2, 40), (3, 40), (4, 80), (5, 160)):
        fit = combinatorics.beckner_coefficients(d, n)
        beckner.append({"d": d, "N": n, "a": list(fit.a),
                        "residual": fit.residual})
    return {"identity": identity, "c_table": c_table, "beckner": beckner}


_SUITES = ("range", "mckay", "desigforo", "klimek", "combinatorics")


def run_suite(
    name: str,
    max_n: int = 12,
    mckay_max_n: int = 4001,
    desigforo_max_n: int = 200,
    klimek_trials: int = 500,
    seed: int = 42,
) -> list[BoundsReport]:
    if name == "range":
        return range_suite(max_n)
    if name == "mckay":
        return mckay_suite(mckay_max_n)
    if name == "desigforo":
        return desigforo_suite(desigforo_max_n)
    if name == "klimek":
        return klimek_suite(klimek_trials, seed)
    if name == "combinatorics":
        return combinatorics_suite(max_n)
    if name == "all":
        out = []
        for suite in _SUITES:
            out.extend(run_suite(suite, max_n, mckay_max_n, desigforo_max_n,
                                 klimek_trials, seed))
        return out
    raise CubeError(f"unknown suite {name!r}")
