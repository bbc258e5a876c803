"""Projection constants of cube function spaces: lambda(B_S^N) = E|sum_{S in
family} chi_S|, computed exactly, by a level-symmetry fast path, by Monte
Carlo, and through the known closed forms for singleton families.

Exact paths accumulate integers (the integrand is an integer at every cube
point) and divide by the cube size only at the end, so they return exact
rationals with no rounding anywhere.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import level_sum_at
from .core import (
    MAX_DIMENSION,
    MAX_ENUM_DIMENSION,
    CubeError,
    SizeGuardError,
    SupportFamily,
    family_squarefree,
    primes_upto,
)

_WHT_MAX_DIRECT = 22  # 2^22 int64 = 32 MB per value table
MAX_LEVEL_N = 100_000
_Z95 = 1.96

_MODE_ALIASES = {
    "exact-degree": "exact-degree",
    "up-to-degree": "up-to-degree",
    "exact": "exact-degree",
    "homogeneous": "exact-degree",
    "upto": "up-to-degree",
}


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    ci95: tuple[float, float]
    samples: int
    seed: int


@dataclass(frozen=True)
class ClosedForms:
    """lambda(l1^n) and lambda(l2^n(R)) from the Gamma-function formulas."""

    l1: float
    l2: float


@dataclass(frozen=True)
class PrimeSingletonReport:
    lam: Fraction
    ratio: float  # lambda / sqrt(N / log N); tends to sqrt(2/pi), slowly
    prime_count: int


@dataclass(frozen=True)
class SquarefreeReport:
    estimate: McEstimate
    ratio: float  # mean / (sqrt(N) / (log log N)^{1/4}); report-only
    family_size: int
    exact: Fraction | None
    agrees_with_exact: bool | None


def _compact_masks(family: SupportFamily) -> tuple[np.ndarray, int]:
    """Family masks re-indexed onto the active coordinates only.

    Inactive coordinates contribute a factor 2 to both the point count and
    the number of points with each value, so dropping them changes nothing.
    """
    active = family.active_mask()
    place = {}
    rest = active
    while rest:
        low = rest & -rest
        place[low.bit_length() - 1] = len(place)
        rest ^= low
    n_act = len(place)
    if n_act > MAX_DIMENSION:
        raise SizeGuardError(
            f"{n_act} active coordinates exceed the word cap {MAX_DIMENSION}"
        )
    compact = []
    for m in family.masks:
        cm = 0
        while m:
            low = m & -m
            cm |= 1 << place[low.bit_length() - 1]
            m ^= low
        compact.append(cm)
    return np.array(compact, dtype=np.uint64), n_act


def _butterfly_int64_inplace(w: np.ndarray) -> np.ndarray:
    size = len(w)
    step = 1
    while step < size:
        v = w.reshape(-1, 2 * step)
        left = v[:, :step].copy()
        v[:, :step] += v[:, step:]
        v[:, step:] *= -1
        v[:, step:] += left
        step *= 2
    return w


def _values_from_indicator(compact: np.ndarray, n_act: int) -> np.ndarray:
    """g(x) = sum_S chi_S(x) for all x in the active cube, exact in int64.

    The unnormalized Walsh butterfly of the family indicator; intermediate
    values are bounded by |family|, so int64 is exact for n_act <= 24.
    """
    indicator = np.zeros(1 << n_act, dtype=np.int64)
    indicator[compact.astype(np.int64)] = 1
    return _butterfly_int64_inplace(indicator)


def _abs_sum_wht(compact: np.ndarray, n_act: int, threads: int) -> int:
    if n_act <= _WHT_MAX_DIRECT:
        values = _values_from_indicator(compact, n_act)
        np.abs(values, out=values)
        return int(values.sum())
    # Blocked: fix the high coordinates, one butterfly per block.  Block
    # totals are exact ints, so the combination order cannot matter.
    low_bits = _WHT_MAX_DIRECT
    high = n_act - low_bits
    low_mask = np.uint64((1 << low_bits) - 1)
    low_parts = (compact & low_mask).astype(np.int64)
    high_parts = (compact >> np.uint64(low_bits)).astype(np.uint64)

    def block_total(y: int) -> int:
        signs = 1 - 2 * (np.bitwise_count(high_parts & np.uint64(y)).astype(np.int64) & 1)
        table = np.zeros(1 << low_bits, dtype=np.int64)
        np.add.at(table, low_parts, signs)
        _butterfly_int64_inplace(table)
        np.abs(table, out=table)
        return int(table.sum())

    blocks = range(1 << high)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(block_total, blocks))
    return sum(block_total(y) for y in blocks)


def _abs_sum_gray(family: SupportFamily, compact: np.ndarray, n_act: int) -> int:
    """Reference kernel: Gray-code walk with per-coordinate flip buckets.

    Each coordinate flip updates the running character sum through the sets
    containing that coordinate only.  Pure Python; used for small cubes and
    as the independent oracle for the butterfly kernel.
    """
    masks = [int(m) for m in compact]
    buckets: list[list[int]] = [[] for _ in range(n_act)]
    for idx, m in enumerate(masks):
        for i in range(n_act):
            if (m >> i) & 1:
                buckets[i].append(idx)
    signs = [1] * len(masks)
    g = len(masks)  # all-plus point: every character is +1
    total = abs(g)
    for t in range(1, 1 << n_act):
        flip = ((t ^ (t >> 1)) ^ ((t - 1) ^ ((t - 1) >> 1))).bit_length() - 1
        delta = 0
        bucket = buckets[flip]
        for idx in bucket:
            delta += signs[idx]
            signs[idx] = -signs[idx]
        g -= 2 * delta
        total += abs(g)
    return total


def lambda_exact(
    family: SupportFamily,
    kernel: str = "auto",
    max_n: int = MAX_ENUM_DIMENSION,
    threads: int = 1,
) -> Fraction:
    """E|sum_{S in family} chi_S| as an exact rational.

    kernel: "auto" (butterfly, blocked beyond 2^22 points), or "gray" (pure
    Python reference).  The guard applies to the number of active
    coordinates; coordinates no set uses are integrated out for free.
    """
    compact, n_act = _compact_masks(family)
    if n_act > max_n or n_act > MAX_ENUM_DIMENSION:
        raise SizeGuardError(
            f"{n_act} active coordinates exceed the enumeration guard "
            f"{min(max_n, MAX_ENUM_DIMENSION)}"
        )
    if kernel == "gray":
        total = _abs_sum_gray(family, compact, n_act)
    elif kernel in ("auto", "wht"):
        total = _abs_sum_wht(compact, n_act, threads)
    else:
        raise CubeError(f"unknown kernel {kernel!r}")
    return Fraction(total, 1 << n_act)


def lambda_level_exact(n: int, d: int, mode: str = "exact-degree") -> Fraction:
    """lambda of the full degree-d family (or all degrees <= d), exactly.

    The character sum at a point depends only on the number m of +1
    coordinates, so the cube average collapses to a binomial-weighted sum
    over m = 0..N; O(N d) big-integer terms.
    """
    if mode not in _MODE_ALIASES:
        raise CubeError(f"unknown mode {mode!r}")
    mode = _MODE_ALIASES[mode]
    if not 1 <= d <= n:
        raise CubeError(f"need 1 <= d <= N, got d={d}, N={n}")
    if n > MAX_LEVEL_N:
        raise SizeGuardError(f"N={n} exceeds level-formula cap {MAX_LEVEL_N}")
    degrees = range(d, d + 1) if mode == "exact-degree" else range(0, d + 1)
    total = 0
    binom = 1  # C(n, m), updated incrementally
    for m in range(n + 1):
        t = sum(level_sum_at(n, k, m) for k in degrees)
        total += binom * abs(t)
        binom = binom * (n - m) // (m + 1)
    return Fraction(total, 1 << n)


_MC_CHUNK = 1 << 14


def _mc_chunk_sums(seed: int, chunk_index: int, count: int, compact: np.ndarray, n_act: int):
    """Exact integer (sum |g|, sum g^2) over one chunk of samples.

    Chunk streams are keyed by (seed, chunk index): counter-based, so the
    estimate cannot depend on how chunks are spread over workers.
    """
    bitgen = np.random.Philox(key=[seed, chunk_index])
    words = bitgen.random_raw(count)
    if n_act < 64:
        words = words & np.uint64((1 << n_act) - 1)
    g = np.zeros(count, dtype=np.int64)
    for mask in compact:
        parity = (np.bitwise_count(words & mask) & np.uint8(1)).astype(np.int64)
        g += 1 - 2 * parity
    abs_sum = int(np.abs(g).sum())
    sq_sum = int((g * g).sum())
    return abs_sum, sq_sum


def lambda_mc(
    family: SupportFamily, samples: int = 100_000, seed: int = 42, threads: int = 1
) -> McEstimate:
    """Monte Carlo estimate of lambda(B_S^N) with a 95% normal interval."""
    if samples < 100:
        raise CubeError(f"need samples >= 100, got {samples}")
    compact, n_act = _compact_masks(family)
    chunk_sizes = [
        min(_MC_CHUNK, samples - start) for start in range(0, samples, _MC_CHUNK)
    ]
    jobs = [(seed, i, size, compact, n_act) for i, size in enumerate(chunk_sizes)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda args: _mc_chunk_sums(*args), jobs))
    else:
        parts = [_mc_chunk_sums(*args) for args in jobs]
    total_abs = sum(p[0] for p in parts)
    total_sq = sum(p[1] for p in parts)
    mean = total_abs / samples
    # variance from the exact integer sums; threads cannot perturb this
    var_num = total_sq * samples - total_abs * total_abs
    variance = var_num / samples / (samples - 1)
    stderr = math.sqrt(max(variance, 0.0) / samples)
    return McEstimate(
        mean=mean,
        stderr=stderr,
        ci95=(mean - _Z95 * stderr, mean + _Z95 * stderr),
        samples=samples,
        seed=seed,
    )


def lambda_closed_forms(n: int) -> ClosedForms:
    """lambda(l2^n(R)) = (2/sqrt(pi)) Gamma((n+2)/2)/Gamma((n+1)/2); the l1
    value coincides with it for odd n and steps down to n-1 for even n."""
    if n < 1:
        raise CubeError(f"need n >= 1, got {n}")

    def l2(k: int) -> float:
        return 2.0 / math.sqrt(math.pi) * math.exp(
            math.lgamma((k + 2) / 2) - math.lgamma((k + 1) / 2)
        )

    l2_n = l2(n)
    l1_n = l2_n if n % 2 == 1 else l2(n - 1)
    return ClosedForms(l1=l1_n, l2=l2_n)


def haagerup_lambda(n: int) -> Fraction:
    """lambda of n singleton sets: 2^-n sum_k C(n,k) |n-2k|.

    Closed form of (2/pi) Int t^-2 (1 - cos^n t) dt after expanding cos^n
    into cosines of multiples and using Int (1-cos(at)) t^-2 dt = pi|a|/2.
    """
    if not 1 <= n <= 10_000:
        raise CubeError(f"need 1 <= n <= 10000, got {n}")
    total = 0
    binom = 1
    for k in range(n + 1):
        total += binom * abs(n - 2 * k)
        binom = binom * (n - k) // (k + 1)
    return Fraction(total, 1 << n)


def prime_singleton_report(n: int) -> PrimeSingletonReport:
    """lambda of the prime-singleton family plus its sqrt(N/log N) ratio."""
    if n < 3:
        raise CubeError(f"need N >= 3, got {n}")
    count = len(primes_upto(n))
    lam = haagerup_lambda(count)
    ratio = float(lam) / math.sqrt(n / math.log(n))
    return PrimeSingletonReport(lam=lam, ratio=ratio, prime_count=count)


def squarefree_mc(n: int, samples: int = 100_000, seed: int = 42, threads: int = 1) -> SquarefreeReport:
    """Monte Carlo lambda of the square-free family, with the sqrt(N)/(log
    log N)^{1/4} ratio reported and an exact cross-check when small enough."""
    if n < 16:
        raise CubeError(f"need N >= 16, got {n}")
    if samples < 1000:
        raise CubeError(f"need samples >= 1000, got {samples}")
    family = family_squarefree(n)
    estimate = lambda_mc(family, samples=samples, seed=seed, threads=threads)
    ratio = estimate.mean / (math.sqrt(n) / math.log(math.log(n)) ** 0.25)
    exact = None
    agrees = None
    if n <= 24:
        exact = lambda_exact(family)
        agrees = abs(estimate.mean - float(exact)) <= 4 * estimate.stderr
    return SquarefreeReport(
        estimate=estimate,
        ratio=ratio,
        family_size=len(family),
        exact=exact,
        agrees_with_exact=agrees,
    )
