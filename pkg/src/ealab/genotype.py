"""Bit-string genotypes, standard-bit mutation, and benchmark fitness functions.

Genotypes are value-semantic: mutation returns a fresh string and never touches
its input. Internally a genotype is an int bit mask (bit ``i`` of ``mask`` is
position ``i``), which keeps the mutation/evaluation hot path cheap; the
engines work on raw masks and only build :class:`BitString` objects at API
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rng import _sampler


class ConfigError(ValueError):
    """Raised on invalid configuration (dimension mismatch, bad parameters)."""


@dataclass(frozen=True)
class BitString:
    """Fixed-length sequence of n binary values.

    ``mask`` packs the bits little-endian: position i is ``(mask >> i) & 1``.
    Length is immutable; instances are hashable and comparable by value.
    """

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"length must be positive, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ConfigError("mask out of range for length n")

    @classmethod
    def from_bits(cls, bits) -> "BitString":
        bits = list(bits)
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ConfigError(f"bit values must be 0 or 1, got {b!r}")
            mask |= b << i
        return cls(len(bits), mask)

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        return cls.from_bits(int(ch) for ch in s)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(n, (1 << n) - 1)

    @classmethod
    def random(cls, n: int, rng) -> "BitString":
        if n < 1:
            raise ConfigError(f"length must be positive, got {n}")
        return cls(n, rng.getrandbits(n))

    @property
    def bits(self) -> tuple:
        return tuple((self.mask >> i) & 1 for i in range(self.n))

    def popcount(self) -> int:
        return self.mask.bit_count()

    def hamming(self, other: "BitString") -> int:
        if self.n != other.n:
            raise ConfigError("length mismatch in Hamming distance")
        return (self.mask ^ other.mask).bit_count()

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.mask >> i) & 1

    def __iter__(self):
        m = self.mask
        for _ in range(self.n):
            yield m & 1
            m >>= 1

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


class OneMax:
    """Fitness = number of one-bits; unique optimum is the all-ones string."""

    def __init__(self, n: int):
        if n < 1:
            raise ConfigError("n must be positive")
        self.n = n
        self._full = (1 << n) - 1
        # any member with fitness >= this threshold is optimal
        self.opt_threshold = n

    def value(self, mask: int) -> int:
        return mask.bit_count()

    def is_opt_mask(self, mask: int) -> bool:
        return mask == self._full

    def __repr__(self):
        return f"OneMax(n={self.n})"


class MultiOptOneMax:
    """OneMax fitness where every string with at most k zeros counts as optimal.

    Declares exactly sum_{j<=k} C(n, j) optima.
    """

    def __init__(self, n: int, k: int):
        if n < 1:
            raise ConfigError("n must be positive")
        if not 0 <= k <= n:
            raise ConfigError("k must be in [0, n]")
        self.n = n
        self.k = k
        self.opt_threshold = n - k

    def value(self, mask: int) -> int:
        return mask.bit_count()

    def is_opt_mask(self, mask: int) -> bool:
        return self.n - mask.bit_count() <= self.k

    def __repr__(self):
        return f"MultiOptOneMax(n={self.n}, k={self.k})"


class UniqueOptGeneric:
    """Fitness = n minus Hamming distance to a fixed target; one optimum."""

    def __init__(self, target: BitString):
        self.n = target.n
        self.target = target
        self._tmask = target.mask
        self.opt_threshold = target.n

    def value(self, mask: int) -> int:
        return self.n - (mask ^ self._tmask).bit_count()

    def is_opt_mask(self, mask: int) -> bool:
        return mask == self._tmask

    def __repr__(self):
        return f"UniqueOptGeneric(n={self.n})"


def _check_dim(f, x: BitString):
    if f.n != x.n:
        raise ConfigError(f"dimension mismatch: fitness n={f.n}, genotype n={x.n}")


def evaluate(f, x: BitString) -> int:
    """Fitness of ``x`` under benchmark ``f`` (integer valued)."""
    _check_dim(f, x)
    return f.value(x.mask)


def is_optimal(f, x: BitString) -> bool:
    """True iff ``x`` is a declared optimum of ``f``."""
    _check_dim(f, x)
    return f.is_opt_mask(x.mask)


def mutate_mask(mask: int, n: int, p: float, rng) -> int:
    """Standard-bit mutation on a raw mask: each bit flips independently
    with probability p.

    Implemented as a Binomial(n, p) flip count followed by a uniform random
    subset of positions, which has exactly the same distribution.
    """
    k = _sampler(n, p).draw(rng)
    if k == 0:
        return mask
    if k == n:
        return mask ^ ((1 << n) - 1)
    flips = 0
    for pos in rng.sample(range(n), k):
        flips |= 1 << pos
    return mask ^ flips


def mutate(x: BitString, p: float, rng) -> BitString:
    """Standard-bit mutation; returns a new string, input unchanged."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"mutation probability must be in [0, 1], got {p}")
    return BitString(x.n, mutate_mask(x.mask, x.n, p, rng))


def make_fitness(kind: str, n: int, k: int | None = None,
                 target: BitString | None = None):
    """Build a fitness function by kind name ('onemax', 'multiopt', 'uniqueopt')."""
    kind = kind.lower()
    if kind == "onemax":
        return OneMax(n)
    if kind == "multiopt":
        if k is None:
            raise ConfigError("multiopt needs k (max zero-count counted optimal)")
        return MultiOptOneMax(n, k)
    if kind == "uniqueopt":
        if target is None:
            raise ConfigError("uniqueopt needs a target string")
        if target.n != n:
            raise ConfigError("target length does not match n")
        return UniqueOptGeneric(target)
    raise ConfigError(f"unknown fitness kind {kind!r}")
