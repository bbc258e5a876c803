"""Boolean cube {-1,+1}^N: points, characters, Walsh transform, support families.

Encoding convention used everywhere in this package: an N-bit integer stands
for a cube point, with bit i set meaning coordinate x_{i+1} = -1 (clear bit
means +1).  A subset S of [N] is the mask with bit i set for i+1 in S.  With
this convention the Walsh character is one AND plus a popcount:

    chi_S(x) = prod_{k in S} x_k = (-1)^popcount(S.bits & x.bits)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Scalar = Union[int, float, Fraction]

MAX_DIMENSION = 63            # active coordinates must fit one machine word
MAX_FAMILY_DIMENSION = 100000  # structural cap; masks are plain Python ints
MAX_ENUM_DIMENSION = 30       # full-cube enumeration guard
MAX_TRANSFORM_DIMENSION = 24  # in-memory transform guard

FAMILY_KINDS = ("explicit", "homogeneous", "upto", "prime-singletons", "square-free")
# JSON spelling differs for one kind; accept both on input.
_KIND_ALIASES = {"squarefree": "square-free"}
_KIND_JSON_NAMES = {"square-free": "squarefree"}


class CubeError(Exception):
    """Base class for domain errors raised by this package."""


class DimensionMismatch(CubeError):
    pass


class SizeGuardError(CubeError):
    """Requested computation exceeds a hard size guard."""


class FamilySpecError(CubeError):
    """Malformed family specification."""


def _check_dimension(n: int, cap: int = MAX_DIMENSION) -> None:
    if not isinstance(n, int) or n < 1:
        raise FamilySpecError(f"dimension must be a positive integer, got {n!r}")
    if n > cap:
        raise SizeGuardError(f"dimension {n} exceeds cap {cap}")


@dataclass(frozen=True)
class CubePoint:
    """A point of {-1,+1}^n, stored as the mask of its -1 coordinates."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_dimension(self.n, MAX_FAMILY_DIMENSION)
        if self.bits < 0 or self.bits >> self.n:
            raise CubeError(f"point mask {self.bits:#x} does not fit dimension {self.n}")

    def coordinate(self, k: int) -> int:
        """x_k for 1-based k."""
        if not 1 <= k <= self.n:
            raise CubeError(f"coordinate {k} out of range [1, {self.n}]")
        return -1 if (self.bits >> (k - 1)) & 1 else 1

    def coordinates(self) -> tuple[int, ...]:
        return tuple(self.coordinate(k) for k in range(1, self.n + 1))


@dataclass(frozen=True)
class SubsetMask:
    """A subset S of [n] as a bit mask (bit i set iff i+1 in S)."""

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_dimension(self.n, MAX_FAMILY_DIMENSION)
        if self.bits < 0 or self.bits >> self.n:
            raise CubeError(f"subset mask {self.bits:#x} does not fit dimension {self.n}")

    def cardinality(self) -> int:
        return self.bits.bit_count()

    def elements(self) -> tuple[int, ...]:
        """1-based, increasing."""
        return tuple(i + 1 for i in range(self.n) if (self.bits >> i) & 1)

    @staticmethod
    def from_elements(elements: Iterable[int], n: int) -> "SubsetMask":
        bits = 0
        for e in elements:
            if not isinstance(e, int) or not 1 <= e <= n:
                raise FamilySpecError(f"element {e!r} out of range [1, {n}]")
            if (bits >> (e - 1)) & 1:
                raise FamilySpecError(f"duplicate element {e} in subset")
            bits |= 1 << (e - 1)
        return SubsetMask(bits, n)


def character_eval(S: SubsetMask, x: CubePoint) -> int:
    """chi_S(x) = x^S in {-1, +1}."""
    if S.n != x.n:
        raise DimensionMismatch(f"subset dimension {S.n} != point dimension {x.n}")
    return -1 if (S.bits & x.bits).bit_count() & 1 else 1


@dataclass(frozen=True)
class SupportFamily:
    """A family of subsets of [n] (the spectrum allowed to a function).

    masks is strictly increasing, hence duplicate-free; d records the degree
    parameter for the homogeneous / upto kinds and is None otherwise.
    """

    n: int
    masks: tuple[int, ...]
    kind: str = "explicit"
    d: int | None = None

    def __post_init__(self) -> None:
        _check_dimension(self.n, MAX_FAMILY_DIMENSION)
        if self.kind not in FAMILY_KINDS:
            raise FamilySpecError(f"unknown family kind {self.kind!r}")
        if not self.masks:
            raise FamilySpecError("family must be nonempty")
        prev = -1
        for m in self.masks:
            if m <= prev:
                raise FamilySpecError("family masks must be strictly increasing")
            if m < 0 or m >> self.n:
                raise FamilySpecError(f"mask {m:#x} does not fit dimension {self.n}")
            prev = m

    def __len__(self) -> int:
        return len(self.masks)

    @property
    def sets(self) -> tuple[SubsetMask, ...]:
        return tuple(SubsetMask(m, self.n) for m in self.masks)

    def degree(self) -> int:
        return max(m.bit_count() for m in self.masks)

    def active_mask(self) -> int:
        """Union of all member masks; coordinates outside it never matter."""
        u = 0
        for m in self.masks:
            u |= m
        return u

    def to_json_dict(self) -> dict:
        kind = _KIND_JSON_NAMES.get(self.kind, self.kind)
        doc: dict = {"kind": kind, "N": self.n}
        if self.kind in ("homogeneous", "upto"):
            doc["d"] = self.d
        if self.kind == "explicit":
            doc["sets"] = [list(SubsetMask(m, self.n).elements()) for m in self.masks]
        return doc

    def permuted(self, perm: Sequence[int]) -> "SupportFamily":
        """Relabel coordinates; perm maps 1-based old index -> new index."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise FamilySpecError("perm must be a permutation of 1..n")
        new_masks = []
        for m in self.masks:
            nm = 0
            for i in range(self.n):
                if (m >> i) & 1:
                    nm |= 1 << (perm[i] - 1)
            new_masks.append(nm)
        return SupportFamily(self.n, tuple(sorted(new_masks)), "explicit")


def family_explicit(n: int, sets: Iterable[Iterable[int]]) -> SupportFamily:
    masks = sorted(SubsetMask.from_elements(s, n).bits for s in sets)
    for a, b in zip(masks, masks[1:]):
        if a == b:
            raise FamilySpecError("duplicate subset in explicit family")
    return SupportFamily(n, tuple(masks), "explicit")


def family_homogeneous(n: int, d: int) -> SupportFamily:
    _check_degree(n, d)
    masks = tuple(sorted(_masks_of_weight(n, d)))
    return SupportFamily(n, masks, "homogeneous", d)


def family_upto(n: int, d: int) -> SupportFamily:
    _check_degree(n, d)
    masks = []
    for k in range(d + 1):
        masks.extend(_masks_of_weight(n, k))
    return SupportFamily(n, tuple(sorted(masks)), "upto", d)


def family_full(n: int) -> SupportFamily:
    """All 2^n subsets of [n]."""
    return family_upto(n, n)


def family_prime_singletons(n: int) -> SupportFamily:
    primes = primes_upto(n)
    if not primes:
        raise FamilySpecError(f"no primes <= {n}")
    masks = tuple(1 << (p - 1) for p in primes)
    return SupportFamily(n, masks, "prime-singletons")


def family_squarefree(n: int) -> SupportFamily:
    """All sets A of primes with prod(A) <= n; A = {} stands for 1 <= n.

    One mask per square-free integer in [n]; the mask of m lists the primes
    dividing m.
    """
    primes = primes_upto(n)
    masks: list[int] = []

    def extend(start: int, mask: int, product: int) -> None:
        masks.append(mask)
        for i in range(start, len(primes)):
            p = primes[i]
            if product * p > n:
                break  # primes increasing, later ones only larger
            extend(i + 1, mask | (1 << (p - 1)), product * p)

    extend(0, 0, 1)
    return SupportFamily(n, tuple(sorted(masks)), "square-free")


def make_family(spec: dict) -> SupportFamily:
    """Build a family from its JSON dict form.

    {"kind":"explicit","N":4,"sets":[[1,2],[3]]}, {"kind":"homogeneous","N":10,"d":3},
    {"kind":"upto","N":10,"d":3}, {"kind":"prime-singletons","N":100},
    {"kind":"squarefree","N":60}.  Indices are 1-based.
    """
    if not isinstance(spec, dict):
        raise FamilySpecError(f"family spec must be a dict, got {type(spec).__name__}")
    try:
        kind = spec["kind"]
        n = spec["N"]
    except KeyError as exc:
        raise FamilySpecError(f"family spec missing key {exc}") from None
    kind = _KIND_ALIASES.get(kind, kind)
    if kind == "explicit":
        if "sets" not in spec:
            raise FamilySpecError("explicit family needs a 'sets' array")
        return family_explicit(n, spec["sets"])
    if kind == "homogeneous":
        return family_homogeneous(n, _require_d(spec))
    if kind == "upto":
        return family_upto(n, _require_d(spec))
    if kind == "prime-singletons":
        return family_prime_singletons(n)
    if kind == "square-free":
        return family_squarefree(n)
    raise FamilySpecError(f"unknown family kind {spec['kind']!r}")


def _require_d(spec: dict) -> int:
    if "d" not in spec:
        raise FamilySpecError(f"{spec['kind']} family needs 'd'")
    return spec["d"]


def _check_degree(n: int, d: int) -> None:
    _check_dimension(n)
    if not isinstance(d, int) or not 1 <= d <= n:
        raise FamilySpecError(f"degree d={d!r} must satisfy 1 <= d <= N={n}")


def _masks_of_weight(n: int, k: int) -> Iterator[int]:
    """All n-bit masks of popcount k, via Gosper's hack."""
    if k == 0:
        yield 0
        return
    m = (1 << k) - 1
    top = 1 << n
    while m < top:
        yield m
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


@dataclass(frozen=True)
class WalshPolynomial:
    """f = sum_S fhat(S) chi_S with coefficients aligned to family.masks."""

    family: SupportFamily
    coeffs: tuple[Scalar, ...]
    exact: bool = True

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.family):
            raise CubeError(
                f"{len(self.coeffs)} coefficients for {len(self.family)} sets"
            )
        if self.exact and any(isinstance(c, float) for c in self.coeffs):
            raise CubeError("float coefficients in a polynomial flagged exact")

    def degree(self) -> int:
        deg = 0
        for m, c in zip(self.family.masks, self.coeffs):
            if c != 0:
                deg = max(deg, m.bit_count())
        return deg


def evaluate(f: WalshPolynomial, x: CubePoint) -> Scalar:
    if f.family.n != x.n:
        raise DimensionMismatch(f"polynomial dimension {f.family.n} != point {x.n}")
    total: Scalar = 0
    for m, c in zip(f.family.masks, f.coeffs):
        if (m & x.bits).bit_count() & 1:
            total -= c
        else:
            total += c
    return total


def _butterfly(values: list) -> list:
    """In-place unnormalized transform: out[S] = sum_x in[x] * chi_S(x)."""
    w = list(values)
    n = len(w)
    step = 1
    while step < n:
        for i in range(0, n, 2 * step):
            for j in range(i, i + step):
                a, b = w[j], w[j + step]
                w[j] = a + b
                w[j + step] = a - b
        step <<= 1
    return w


def _check_transform_length(values: Sequence) -> int:
    size = len(values)
    if size == 0 or size & (size - 1):
        raise CubeError(f"transform length {size} is not a power of two")
    n = size.bit_length() - 1
    if n > MAX_TRANSFORM_DIMENSION:
        raise SizeGuardError(f"transform dimension {n} exceeds {MAX_TRANSFORM_DIMENSION}")
    return n


def walsh_transform(values: Sequence[Scalar]) -> list[Scalar]:
    """Fourier-Walsh coefficients fhat(S) = 2^-N sum_x f(x) chi_S(x).

    Input is the value table indexed by point mask; output is indexed by
    subset mask.  Exact on Fraction/int input (the 2^-N division stays
    rational); N*2^N additions.
    """
    n = _check_transform_length(values)
    w = _butterfly(list(values))
    scale = Fraction(1, 1 << n)
    out: list[Scalar] = []
    for v in w:
        if isinstance(v, float):
            out.append(v / (1 << n))
        else:
            sv = v * scale
            out.append(int(sv) if sv.denominator == 1 else sv)
    return out


def inverse_walsh_transform(coeffs: Sequence[Scalar]) -> list[Scalar]:
    """Value table f(x) = sum_S fhat(S) chi_S(x); exact inverse of walsh_transform."""
    _check_transform_length(coeffs)
    return _butterfly(list(coeffs))


def gray_iterate(n: int) -> Iterator[tuple[CubePoint, int | None]]:
    """Visit all 2^n points, one coordinate flip at a time.

    Yields (point, flipped) where flipped is the 1-based coordinate that
    changed from the previous point, None for the first point (all +1).
    Gray order: point t has mask t ^ (t >> 1).
    """
    _check_dimension(n, MAX_ENUM_DIMENSION)
    last = 0
    yield CubePoint(0, n), None
    for t in range(1, 1 << n):
        g = t ^ (t >> 1)
        flipped = (g ^ last).bit_length()  # exactly one bit differs
        last = g
        yield CubePoint(g, n), flipped


def primes_upto(n: int) -> list[int]:
    """Eratosthenes sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]
