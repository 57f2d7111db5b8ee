"""Samplable additive-error sources over ``{0,1}^n``.

Every source samples from an explicit generator state, so a source plus a
seed fixes the sample sequence.  Flat sources (uniform over their support)
can enumerate that support and report an exact entropy; pseudorandom
sources only report the seed length as an entropy upper bound.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .codes import LinearCode
from .errors import (
    DependentBasis,
    DuplicateSupport,
    EntropyTooLarge,
    FormatError,
    LengthMismatch,
    NotInjective,
    ParameterError,
)
from .gf2 import BitMatrix, BitVector, as_rng, hex_word, parse_hex_word, rank, solve_left, xor_rows

__all__ = [
    "ErrorSource",
    "InjectiveMap",
    "flat_from_support",
    "flat_from_map",
    "subspace_source",
    "prg_source",
    "codeword_flat",
    "uniform_source",
    "xorshift_expander",
    "dumps_support",
    "loads_support",
    "dumps_map",
    "loads_map",
]

# enumerate seeds of a pseudorandom source only up to this length
ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class InjectiveMap:
    """Tabulated injective ``f : {0,1}^m -> {0,1}^n`` (``table[y] = f(y)``)."""

    m: int
    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.m:
            raise LengthMismatch(f"table has {len(self.table)} rows, expected {1 << self.m}")
        limit = 1 << self.n
        if any(not 0 <= v < limit for v in self.table):
            raise LengthMismatch(f"image value does not fit in {self.n} bits")
        if len(set(self.table)) != len(self.table):
            raise NotInjective("two seeds share an image")

    @classmethod
    def identity(cls, m: int, n: int | None = None) -> "InjectiveMap":
        """``y -> 0^(n-m) || y``."""
        n = m if n is None else n
        if n < m:
            raise ParameterError("identity embedding needs n >= m")
        return cls(m, n, tuple(range(1 << m)))

    @classmethod
    def random(cls, m: int, n: int, seed=None) -> "InjectiveMap":
        """Uniform injective map (images drawn without replacement)."""
        if m > n:
            raise ParameterError("no injective map when m > n")
        rng = as_rng(seed)
        size = 1 << m
        if n <= 62:
            picks = rng.choice(1 << n, size=size, replace=False)
            return cls(m, n, tuple(int(v) for v in picks))
        seen, table = set(), []
        while len(table) < size:
            v = int.from_bytes(rng.bytes(-(-n // 8)), "big") >> (8 * -(-n // 8) - n)
            if v not in seen:
                seen.add(v)
                table.append(v)
        return cls(m, n, tuple(table))

    def __call__(self, y: BitVector) -> BitVector:
        if y.length != self.m:
            raise LengthMismatch(f"seed has {y.length} bits, expected {self.m}")
        return BitVector(self.n, self.table[y.value])

    def inverse(self) -> dict[int, int]:
        return {v: y for y, v in enumerate(self.table)}

    def image(self) -> frozenset[int]:
        return frozenset(self.table)


class ErrorSource:
    """A samplable distribution over ``{0,1}^n``.

    ``support`` (ints, when known) doubles as the enumeration order;
    ``member`` is the membership predicate on ints, when the source has one.
    """

    def __init__(self, n: int, kind: str, sampler: Callable[[np.random.Generator], int], *,
                 support: Sequence[int] | None = None,
                 member: Callable[[int], bool] | None = None,
                 entropy: float, entropy_exact: bool, payload=None):
        self.n = n
        self.kind = kind
        self._sampler = sampler
        self._support = tuple(support) if support is not None else None
        self._member = member
        self._entropy = entropy
        self.entropy_exact = entropy_exact
        self.payload = payload

    def __repr__(self) -> str:
        return f"ErrorSource(kind={self.kind!r}, n={self.n}, entropy={self._entropy:g})"

    @property
    def enumerable(self) -> bool:
        return self._support is not None

    @property
    def has_membership(self) -> bool:
        return self._member is not None

    def entropy(self) -> float:
        """log2 of the support size for flat sources; otherwise an upper bound."""
        return self._entropy

    def sample_int(self, rng) -> int:
        return self._sampler(as_rng(rng))

    def sample(self, rng) -> BitVector:
        return BitVector(self.n, self.sample_int(rng))

    def support_ints(self) -> tuple[int, ...]:
        if self._support is None:
            raise TypeError(f"{self.kind} source is not enumerable")
        return self._support

    def support(self) -> list[BitVector]:
        return [BitVector(self.n, v) for v in self.support_ints()]

    def contains_int(self, z: int) -> bool:
        if self._member is None:
            raise TypeError(f"{self.kind} source has no membership test")
        return self._member(z)

    def contains(self, z: BitVector) -> bool:
        if z.length != self.n:
            raise LengthMismatch(f"vector has {z.length} bits, source has n={self.n}")
        return self.contains_int(z.value)


def _uniform_pick(values: tuple[int, ...]) -> Callable[[np.random.Generator], int]:
    count = len(values)
    if count == 1:
        only = values[0]
        return lambda rng: only
    return lambda rng: values[int(rng.integers(count))]


def flat_from_support(vectors: Iterable[BitVector], kind: str = "flat-support") -> ErrorSource:
    vecs = list(vectors)
    if not vecs:
        raise ValueError("support must be non-empty")
    n = vecs[0].length
    if any(v.length != n for v in vecs):
        raise LengthMismatch("support vectors have different lengths")
    values = tuple(v.value for v in vecs)
    members = frozenset(values)
    if len(members) != len(values):
        raise DuplicateSupport("support contains duplicates")
    return ErrorSource(n, kind, _uniform_pick(values), support=values,
                       member=members.__contains__, entropy=math.log2(len(values)),
                       entropy_exact=True, payload=values)


def flat_from_map(f: InjectiveMap) -> ErrorSource:
    """``f(U_m)``; membership by inverse lookup."""
    table = f.table
    size = len(table)
    inverse = f.inverse()
    return ErrorSource(f.n, "flat-map", lambda rng: table[int(rng.integers(size))],
                       support=table, member=inverse.__contains__, entropy=float(f.m),
                       entropy_exact=True, payload=f)


def subspace_source(basis: Sequence[BitVector], n: int | None = None) -> ErrorSource:
    """Uniform over the span of ``basis``; ``n`` is required when the basis is empty."""
    basis = list(basis)
    if n is None:
        if not basis:
            raise ValueError("n required for an empty basis")
        n = basis[0].length
    if any(b.length != n for b in basis):
        raise LengthMismatch("basis vectors have different lengths")
    m = len(basis)
    B = BitMatrix.from_rows(basis, cols=n)
    if rank(B) != m:
        raise DependentBasis(f"basis of {m} vectors has rank {rank(B)}")
    data = B.data

    def member(z: int) -> bool:
        return solve_left(B, BitVector(n, z)) is not None

    def sampler(rng):
        a = int(rng.integers(1 << m)) if m else 0
        return xor_rows(a, data, m)

    support = [xor_rows(a, data, m) for a in range(1 << m)] if m <= ENUMERATION_LIMIT else None
    return ErrorSource(n, "subspace", sampler, support=support, member=member,
                       entropy=float(m), entropy_exact=True, payload=B)


def prg_source(expander: Callable[[int], int], seed_bits: int, n: int) -> ErrorSource:
    """``expander(U_seed_bits)``.

    The image is enumerated when the seed is short; the source counts as
    enumerable only if every image point has the same number of preimages
    (otherwise sampling is not uniform over the image).  The reported
    entropy is ``seed_bits``, an upper bound.  No membership test is
    offered: that is the point of a pseudorandom source.
    """
    if not 0 <= seed_bits < n:
        raise ParameterError(f"need seed length < n, got {seed_bits} >= {n}")
    support = None
    if seed_bits <= ENUMERATION_LIMIT:
        counts = Counter(expander(s) for s in range(1 << seed_bits))
        if len(set(counts.values())) == 1:
            support = tuple(sorted(counts))
    span = 1 << seed_bits
    return ErrorSource(n, "prg", lambda rng: expander(int(rng.integers(span))), support=support,
                       entropy=float(seed_bits), entropy_exact=False, payload=expander)


def codeword_flat(code: LinearCode, m: int) -> ErrorSource:
    """Uniform over the codewords of the ``2**m`` smallest messages."""
    if m < 1:
        raise ParameterError("codeword source needs m >= 1")
    if m > code.k:
        raise EntropyTooLarge(f"m={m} exceeds k={code.k}")
    words = [BitVector(code.n, code.encode_int(x)) for x in range(1 << m)]
    return flat_from_support(words, kind="codeword-flat")


def uniform_source(n: int) -> ErrorSource:
    support = tuple(range(1 << n)) if n <= ENUMERATION_LIMIT else None
    span = 1 << n

    def sampler(rng):
        if n <= 62:
            return int(rng.integers(span))
        return int.from_bytes(rng.bytes(-(-n // 8)), "big") >> (8 * -(-n // 8) - n)

    return ErrorSource(n, "uniform", sampler, support=support, member=lambda z: 0 <= z < span,
                       entropy=float(n), entropy_exact=True)


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def xorshift_expander(seed_bits: int, n: int, key: int = 0x5EED) -> Callable[[int], int]:
    """Toy keyed expander ``{0,1}^seed_bits -> {0,1}^n``.

    The seed and key are mixed with splitmix64 into a 64-bit state, which a
    xorshift64 generator then iterates; the outputs are concatenated and
    truncated to ``n`` bits.  Not cryptographic; only a stand-in for a PRG.
    """

    def expand(seed: int) -> int:
        if not 0 <= seed < (1 << seed_bits):
            raise ValueError("seed out of range")
        state = _splitmix64(seed ^ (key << seed_bits)) or 1
        out, have = 0, 0
        while have < n:
            state ^= (state << 13) & _MASK64
            state ^= state >> 7
            state ^= (state << 17) & _MASK64
            out = (out << 64) | state
            have += 64
        return out >> (have - n)

    return expand


# -- text formats ---------------------------------------------------------------


def dumps_support(source_or_vectors) -> str:
    if isinstance(source_or_vectors, ErrorSource):
        n, values = source_or_vectors.n, source_or_vectors.support_ints()
    else:
        vecs = list(source_or_vectors)
        n, values = vecs[0].length, [v.value for v in vecs]
    lines = [f"support {n} {len(values)}"] + [hex_word(v, n) for v in values]
    return "\n".join(lines) + "\n"


def loads_support(text: str) -> ErrorSource:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split() if lines else []
    if len(head) != 3 or head[0] != "support":
        raise FormatError("bad support header")
    n, count = int(head[1]), int(head[2])
    body = lines[1:]
    if len(body) != count:
        raise FormatError(f"expected {count} vectors, found {len(body)}")
    return flat_from_support([BitVector(n, parse_hex_word(t, n)) for t in body])


def dumps_map(f: InjectiveMap) -> str:
    lines = [f"map {f.m} {f.n}"] + [hex_word(v, f.n) for v in f.table]
    return "\n".join(lines) + "\n"


def loads_map(text: str) -> InjectiveMap:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split() if lines else []
    if len(head) != 3 or head[0] != "map":
        raise FormatError("bad map header")
    m, n = int(head[1]), int(head[2])
    body = lines[1:]
    if len(body) != 1 << m:
        raise FormatError(f"expected {1 << m} rows, found {len(body)}")
    return InjectiveMap(m, n, tuple(parse_hex_word(t, n) for t in body))
