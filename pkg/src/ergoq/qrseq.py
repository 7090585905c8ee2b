"""Low-discrepancy sequence generators.

Provides the Faure sequence (one prime base, binomial digit scrambling
between dimensions), the Kronecker sequence (fractional parts of integer
multiples of irrationals, with the Torus variant using square roots of the
first primes), and the van der Corput radical inverse they build on.

Generators are stateless: the point at index ``i`` is a pure function of
``(spec, i)``, so any number of workers can pull from the same sequence
without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import IO, Sequence

import numpy as np

__all__ = [
    "GeneratorSpec",
    "KINDS",
    "first_primes",
    "faure_point",
    "kronecker_point",
    "pascal_permute",
    "point",
    "point_block",
    "radical_inverse",
    "smallest_prime_greater",
    "to_digits",
    "write_points",
]

KINDS = ("faure", "kronecker", "torus", "van_der_corput")

# Fixed-point resolution for multiples of irrationals.  128 fractional bits
# keep frac(i * sqrt(p)) within ~3e-32 of the true value for i <= 1e7, far
# beyond the 1e-12 the sequences need; plain float64 sqrt would already lose
# digits at i ~ 1e4.
_FIXED_BITS = 128
_FIXED_ONE = 1 << _FIXED_BITS
_FIXED_MASK = _FIXED_ONE - 1


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def smallest_prime_greater(d: int) -> int:
    """Smallest prime strictly greater than d (returns 2 for d = 1).

    This is the Faure base rule: 3 for dimension 2, 5 for dimensions 3 and 4,
    and so on.  The one-dimensional case degenerates to van der Corput in
    base 2.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d == 1:
        return 2
    c = d + 1
    while not _is_prime(c):
        c += 1
    return c


@lru_cache(maxsize=None)
def first_primes(count: int) -> tuple[int, ...]:
    """The first `count` primes, in order."""
    if count < 0:
        raise ValueError("count must be >= 0")
    out: list[int] = []
    c = 2
    while len(out) < count:
        if _is_prime(c):
            out.append(c)
        c += 1
    return tuple(out)


def to_digits(n: int, p: int) -> list[int]:
    """Base-p digits of n, least significant first; [0] for n = 0."""
    if p < 2:
        raise ValueError(f"base must be >= 2, got {p}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return [0]
    digits = []
    while n:
        n, r = divmod(n, p)
        digits.append(r)
    return digits


def radical_inverse(digits: Sequence[int], p: int) -> float:
    """Mirror base-p digits across the radix point.

    Returns sum(digits[j] * p**-(j+1)), digits least significant first.  The
    numerator is accumulated in integer arithmetic and divided once, so the
    result is the correctly rounded float.
    """
    if p < 2:
        raise ValueError(f"base must be >= 2, got {p}")
    num = 0
    for d in reversed(digits):
        if not 0 <= d < p:
            raise ValueError(f"digit {d} out of range for base {p}")
        num = num * p + d
    return num / p ** len(digits)


def pascal_permute(digits: Sequence[int], p: int) -> list[int]:
    """One step of the Faure digit scramble: out[j] = sum_{i>=j} C(i,j)*digits[i] mod p.

    Applying this (D-1) times to the base-p digits of an index produces the
    digits of coordinate D.  The single-digit case is a fixed point
    (C(0,0) = 1), and the map is a bijection on fixed-length digit vectors,
    which is what makes each Faure coordinate a permuted van der Corput
    sequence.
    """
    k = len(digits)
    return [sum(comb(i, j) * digits[i] for i in range(j, k)) % p for j in range(k)]


def _frac_div(num: int, den: int) -> float:
    # int/int true division is correctly rounded, but a fraction within
    # 2**-54 of 1 rounds to exactly 1.0; keep the range contract [0, 1)
    v = num / den
    return math.nextafter(1.0, 0.0) if v == 1.0 else v


@lru_cache(maxsize=None)
def _sqrt_fixed(m: int) -> int:
    """floor(sqrt(m) * 2**_FIXED_BITS), exact via integer square root."""
    return math.isqrt(m << (2 * _FIXED_BITS))


@lru_cache(maxsize=64)
def _torus_alphas_fixed(dim: int) -> tuple[int, ...]:
    return tuple(_sqrt_fixed(p) for p in first_primes(dim))


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a low-discrepancy generator.

    kind: one of "faure", "kronecker", "torus", "van_der_corput".
    dim: number of coordinates per point.
    base: prime base (faure / van_der_corput); faure derives it from dim and
        rejects any other value.
    irrationals: step multipliers (kronecker only); torus derives them as the
        square roots of the first `dim` primes.
    skip: burn-in offset consumers should start reading at.  Defaults to the
        base for faure (the first points in high dimension are degenerate,
        every coordinate equal) and 0 otherwise.
    """

    kind: str
    dim: int = 1
    base: int | None = None
    irrationals: tuple[float, ...] | None = None
    skip: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

        if self.kind == "faure":
            canonical = smallest_prime_greater(self.dim)
            if self.base is None:
                object.__setattr__(self, "base", canonical)
            elif self.base != canonical:
                raise ValueError(
                    f"faure base for dim {self.dim} must be {canonical}, got {self.base}"
                )
        elif self.kind == "van_der_corput":
            if self.dim != 1:
                raise ValueError("van_der_corput is one-dimensional")
            if self.base is None:
                object.__setattr__(self, "base", 2)
            elif not _is_prime(self.base):
                raise ValueError(f"base must be prime, got {self.base}")
        elif self.base is not None:
            raise ValueError(f"{self.kind} takes no base")

        if self.kind == "kronecker":
            if not self.irrationals:
                raise ValueError("kronecker requires irrationals")
            alphas = tuple(float(a) for a in self.irrationals)
            if len(alphas) != self.dim:
                raise ValueError(
                    f"expected {self.dim} irrationals, got {len(alphas)}"
                )
            if any(not math.isfinite(a) or a <= 0.0 for a in alphas):
                raise ValueError("irrationals must be positive and finite")
            object.__setattr__(self, "irrationals", alphas)
        elif self.irrationals is not None:
            raise ValueError(f"{self.kind} derives its multipliers; do not pass irrationals")

        if self.skip is None:
            object.__setattr__(self, "skip", self.base if self.kind == "faure" else 0)
        elif self.skip < 0:
            raise ValueError(f"skip must be >= 0, got {self.skip}")

    @classmethod
    def faure(cls, dim: int, skip: int | None = None) -> "GeneratorSpec":
        return cls(kind="faure", dim=dim, skip=skip)

    @classmethod
    def torus(cls, dim: int, skip: int | None = None) -> "GeneratorSpec":
        return cls(kind="torus", dim=dim, skip=skip)

    @classmethod
    def kronecker(cls, irrationals: Sequence[float], skip: int | None = None) -> "GeneratorSpec":
        alphas = tuple(float(a) for a in irrationals)
        return cls(kind="kronecker", dim=len(alphas), irrationals=alphas, skip=skip)

    @classmethod
    def van_der_corput(cls, base: int = 2, skip: int | None = None) -> "GeneratorSpec":
        return cls(kind="van_der_corput", dim=1, base=base, skip=skip)

    def _alpha_ratios(self) -> tuple[tuple[int, int], ...]:
        """Each multiplier as an exact integer ratio (num, den)."""
        if self.kind == "torus":
            return tuple((a, _FIXED_ONE) for a in _torus_alphas_fixed(self.dim))
        assert self.irrationals is not None
        return tuple(a.as_integer_ratio() for a in self.irrationals)


def faure_point(i: int, spec: GeneratorSpec) -> tuple[float, ...]:
    """Point i of the Faure sequence described by spec.

    Coordinate 1 is the radical inverse of i in the spec's prime base;
    coordinate D is the radical inverse of the (D-1)-fold binomial scramble
    of the same digits.
    """
    if spec.kind not in ("faure", "van_der_corput"):
        raise ValueError(f"expected a faure spec, got kind {spec.kind!r}")
    if i < 0:
        raise ValueError(f"index must be >= 0, got {i}")
    p = spec.base
    assert p is not None
    digits = to_digits(i, p)
    coords = [radical_inverse(digits, p)]
    for _ in range(2, spec.dim + 1):
        digits = pascal_permute(digits, p)
        coords.append(radical_inverse(digits, p))
    return tuple(coords)


def kronecker_point(i: int, spec: GeneratorSpec) -> tuple[float, ...]:
    """Point i of a Kronecker sequence: coordinate k is frac(i * alpha_k).

    The products are taken in exact integer arithmetic (fixed-point square
    roots for torus, the exact binary ratio of each given float otherwise),
    so every coordinate is the correctly rounded fractional part.
    """
    if spec.kind not in ("kronecker", "torus"):
        raise ValueError(f"expected a kronecker or torus spec, got kind {spec.kind!r}")
    if i < 0:
        raise ValueError(f"index must be >= 0, got {i}")
    return tuple(_frac_div(i * num % den, den) for num, den in spec._alpha_ratios())


def point(spec: GeneratorSpec, i: int) -> tuple[float, ...]:
    """Point i of any generator kind; every coordinate lies in [0, 1)."""
    if spec.kind in ("faure", "van_der_corput"):
        return faure_point(i, spec)
    return kronecker_point(i, spec)


def _faure_block(spec: GeneratorSpec, start: int, count: int) -> np.ndarray:
    """Vectorized Faure points for a run of consecutive indices.

    Builds the digit matrix for all indices at once and applies cached powers
    of the mod-p Pascal matrix; agrees bit for bit with faure_point.
    """
    p = spec.base
    assert p is not None
    d = spec.dim
    hi = start + count - 1
    k = max(1, len(to_digits(hi, p)))
    idx = np.arange(start, start + count, dtype=np.int64)
    digits = np.empty((count, k), dtype=np.int64)
    rem = idx.copy()
    for j in range(k):
        digits[:, j] = rem % p
        rem //= p

    # out[:, j] = sum_i digits[:, i] * C(i, j)  (mod p)
    pascal = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(i + 1):
            pascal[i, j] = comb(i, j) % p
    weights = np.array([p ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    den = float(p**k)

    out = np.empty((count, d))
    cur = digits
    out[:, 0] = (cur @ weights) / den
    for col in range(1, d):
        cur = (cur @ pascal) % p
        out[:, col] = (cur @ weights) / den
    return out


def _kronecker_block(spec: GeneratorSpec, start: int, count: int) -> np.ndarray:
    ratios = spec._alpha_ratios()
    out = np.empty((count, spec.dim))
    for col, (num, den) in enumerate(ratios):
        acc = start * num % den
        step = num % den
        for row in range(count):
            out[row, col] = _frac_div(acc, den)
            acc += step
            if acc >= den:
                acc -= den
    return out


def point_block(spec: GeneratorSpec, start: int, count: int) -> np.ndarray:
    """Points start .. start+count-1 as a (count, dim) float array."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be >= 0")
    if count == 0:
        return np.empty((0, spec.dim))
    if spec.kind in ("faure", "van_der_corput"):
        return _faure_block(spec, start, count)
    return _kronecker_block(spec, start, count)


def write_points(fp: IO[str], spec: GeneratorSpec, count: int, start: int | None = None) -> None:
    """Dump points as CSV: header "i,x1,...,xd", 17 significant digits.

    `start` defaults to the spec's skip.  The precision is enough for every
    float64 coordinate to round-trip exactly through the text form.
    """
    if start is None:
        start = spec.skip or 0
    fp.write("i," + ",".join(f"x{j + 1}" for j in range(spec.dim)) + "\n")
    block = point_block(spec, start, count)
    for row in range(count):
        coords = ",".join(format(v, ".17g") for v in block[row])
        fp.write(f"{start + row},{coords}\n")
