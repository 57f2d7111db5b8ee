"""Constructive decoders and the decoder-to-distinguisher reduction.

* brute force over a flat support, precomputed as a syndrome table;
* exact syndrome decoding of errors drawn from a known linear span;
* a universal-linear-hash decoder whose recoverer inverts ``y -> h0(f(y))``.

Decoders return the decoded :class:`BitVector` or an :class:`Outcome`
describing why they gave up.  Failures are never raised.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .codes import LinearCode, code_from_parity_check
from .errors import DependentBasis, DimensionMismatch, ParameterError
from .gf2 import (
    BitMatrix,
    BitVector,
    as_rng,
    batch_vec_mat_mul,
    parity_rows,
    random_matrix,
    rank,
    rref,
    right_inverse,
    xor_rows,
)
from .sources import ErrorSource, InjectiveMap
from .stats import newcombe_difference

__all__ = [
    "Outcome",
    "SyndromeTable",
    "SyndromeDecoder",
    "build_flat_table",
    "brute_force_decode",
    "brute_force_decoder",
    "subspace_recoverer",
    "subspace_decoder",
    "HashDecoder",
    "build_hash_decoder",
    "collision_set",
    "brute_force_inverter",
    "hash_decode",
    "constant_failure_decoder",
    "DistinguisherResult",
    "distinguisher_from_decoder",
]


class Outcome(enum.Enum):
    AMBIGUOUS = "ambiguous"
    NO_MATCH = "no-match"
    NOT_FOUND = "not-found"

    def __bool__(self):
        return False


class SyndromeDecoder:
    """``y -> (y + recover(y H^T)) Ginv`` on a fixed code.

    ``recover`` maps a syndrome int to an error int or an :class:`Outcome`.
    Instances are callable on :class:`BitVector` words; ``decode_int`` and
    ``decode_batch`` are the raw fast paths.
    """

    def __init__(self, code: LinearCode, recover: Callable[[int], "int | Outcome"]):
        self.code = code
        self.recover = recover

    def decode_int(self, y: int):
        e = self.recover(self.code.syndrome_int(y))
        if isinstance(e, Outcome):
            return e
        return self.code.unencode_int(y ^ e)

    def __call__(self, y: BitVector):
        if y.length != self.code.n:
            raise DimensionMismatch(f"word has {y.length} bits, code has n={self.code.n}")
        out = self.decode_int(y.value)
        if isinstance(out, Outcome):
            return out
        return BitVector(self.code.k, out)

    def decode_batch(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Decode a uint64 array; returns (messages, ok mask)."""
        code = self.code
        words = np.asarray(words, dtype=np.uint64)
        syn = batch_vec_mat_mul(words, code.H, transpose=True)
        uniq, inv = np.unique(syn, return_inverse=True)
        errs = np.zeros(uniq.shape, dtype=np.uint64)
        good = np.zeros(uniq.shape, dtype=bool)
        for i, s in enumerate(uniq.tolist()):
            e = self.recover(int(s))
            if not isinstance(e, Outcome):
                errs[i] = e
                good[i] = True
        inv = inv.reshape(words.shape)
        msgs = batch_vec_mat_mul(words ^ errs[inv], code.Ginv)
        return msgs, good[inv]


# -- brute force over a flat support ---------------------------------------------


@dataclass
class SyndromeTable:
    """Syndrome -> unique support preimage; ambiguous syndromes are kept apart."""

    n: int
    redundancy: int
    entries: dict[int, int] = field(default_factory=dict)
    ambiguous: set[int] = field(default_factory=set)
    preimages: dict[int, int] = field(default_factory=dict)

    def lookup(self, s: int):
        if s in self.entries:
            return self.entries[s]
        if s in self.ambiguous:
            return Outcome.AMBIGUOUS
        return Outcome.NO_MATCH

    def ambiguous_mass(self) -> int:
        """Number of support elements whose syndrome is ambiguous."""
        return sum(self.preimages[s] for s in self.ambiguous)


def build_flat_table(code: LinearCode, source: ErrorSource) -> SyndromeTable:
    """One pass over the support; cost ``O(n^2 2^m)`` bit operations."""
    if source.n != code.n:
        raise DimensionMismatch(f"source has n={source.n}, code has n={code.n}")
    table = SyndromeTable(code.n, code.redundancy)
    H = code.H.data
    for z in source.support_ints():
        s = parity_rows(z, H)
        count = table.preimages.get(s, 0) + 1
        table.preimages[s] = count
        if count == 1:
            table.entries[s] = z
        elif count == 2:
            del table.entries[s]
            table.ambiguous.add(s)
    return table


def brute_force_decode(code: LinearCode, table: SyndromeTable, y: BitVector):
    if y.length != code.n:
        raise DimensionMismatch(f"word has {y.length} bits, code has n={code.n}")
    e = table.lookup(code.syndrome_int(y.value))
    if isinstance(e, Outcome):
        return e
    return BitVector(code.k, code.unencode_int(y.value ^ e))


def brute_force_decoder(code: LinearCode, source: ErrorSource) -> SyndromeDecoder:
    table = build_flat_table(code, source)
    dec = SyndromeDecoder(code, table.lookup)
    dec.table = table
    return dec


# -- linear subspaces -----------------------------------------------------------------


def subspace_recoverer(basis: Sequence[BitVector], n: int | None = None):
    """Parity check ``H`` (m x n) and recoverer for errors in ``span(basis)``.

    The basis is completed to a basis of ``F^n`` with the unit vectors at the
    non-pivot columns of its reduced form; ``H`` realises the linear map
    sending ``z_i`` to ``e_i`` and every completing vector to 0, so the
    syndrome of a span element is its coordinate vector and
    ``rec(s) = sum s_i z_i``.
    """
    basis = list(basis)
    if n is None:
        if not basis:
            raise ValueError("n required for an empty basis")
        n = basis[0].length
    m = len(basis)
    if m > n:
        raise DependentBasis(f"{m} vectors in dimension {n}")
    B = BitMatrix.from_rows(basis, cols=n)
    _, pivots = rref(B)
    if len(pivots) != m:
        raise DependentBasis(f"basis of {m} vectors has rank {len(pivots)}")
    free = [j for j in range(n) if j not in set(pivots)]
    completion = BitMatrix(n - m, n, tuple(1 << (n - 1 - j) for j in free))
    P = B.vstack(completion)
    Pinv = right_inverse(P)
    # x H^T = first m coordinates of x Pinv
    H = Pinv.transpose().take_rows(m)

    def rec(s: BitVector) -> BitVector:
        if s.length != m:
            raise DimensionMismatch(f"syndrome has {s.length} bits, expected {m}")
        return BitVector(n, xor_rows(s.value, B.data, m))

    rec.basis = B
    return H, rec


def subspace_decoder(basis: Sequence[BitVector], n: int | None = None) -> SyndromeDecoder:
    """Rate ``(n - m)/n`` code and exact decoder for errors in ``span(basis)``."""
    H, rec = subspace_recoverer(basis, n)
    code = code_from_parity_check(H, H.cols - H.rows)
    B = rec.basis
    m = B.rows
    dec = SyndromeDecoder(code, lambda s: xor_rows(s, B.data, m))
    dec.recoverer = rec
    return dec


# -- universal-hash decoder -----------------------------------------------------------


def collision_set(f: InjectiveMap, h0: BitMatrix) -> set[int]:
    """Support points of ``f(U_m)`` that share their hash with another point."""
    seen: dict[int, int] = {}
    hit: set[int] = set()
    for z in f.table:
        h = parity_rows(z, h0.data)
        if h in seen:
            hit.add(z)
            hit.add(seen[h])
        else:
            seen[h] = z
    return hit


def brute_force_inverter(f: InjectiveMap, h0: BitMatrix, target: BitVector):
    """Smallest seed ``y`` with ``f(y) h0^T = target``, or ``Outcome.NOT_FOUND``."""
    if target.length != h0.rows:
        raise DimensionMismatch(f"target has {target.length} bits, hash has {h0.rows}")
    for y, z in enumerate(f.table):
        if parity_rows(z, h0.data) == target.value:
            return BitVector(f.m, y)
    return Outcome.NOT_FOUND


@dataclass
class HashDecoder(SyndromeDecoder):
    """Syndrome decoder with ``H = h0`` whose recoverer is ``f(invert(s))``."""

    code: LinearCode
    h0: BitMatrix
    f: InjectiveMap
    c: int
    draws: int
    collisions: set[int]
    inverse_table: dict[int, int] = field(repr=False)

    def __post_init__(self):
        SyndromeDecoder.__init__(self, self.code, self._recover)

    def invert(self, s: int):
        """Precomputed :func:`brute_force_inverter`: smallest seed per hash value."""
        return self.inverse_table.get(s, Outcome.NOT_FOUND)

    def _recover(self, s: int):
        y = self.invert(s)
        if isinstance(y, Outcome):
            return y
        return self.f.table[y]

    @property
    def good_threshold(self) -> float:
        return (1 << self.f.m) / self.f.n ** self.c


def hash_length(m: int, n: int, c: int) -> int:
    """``m + 2c ceil(log2 n)`` output bits."""
    return m + 2 * c * math.ceil(math.log2(n))


def build_hash_decoder(f: InjectiveMap, c: int, seed=None, max_draws: int = 10_000) -> HashDecoder:
    """Draw uniform hash matrices until one is good, then wrap it as a code.

    A uniform ``L x n`` matrix is a linear universal family (distinct inputs
    collide with probability ``2**-L``).  Good means
    ``|C_h| <= 2**m / n**c``, checked exactly on the ``2**m`` support.
    """
    n, m = f.n, f.m
    L = hash_length(m, n, c)
    if L >= n:
        raise ParameterError(f"hash length {L} >= n={n}")
    rng = as_rng(seed)
    threshold = (1 << m) / n**c
    for draw in range(1, max_draws + 1):
        h0 = random_matrix(rng, L, n)
        hits = collision_set(f, h0)
        if len(hits) <= threshold:
            break
    else:
        raise ParameterError(f"no good hash in {max_draws} draws")
    code = code_from_parity_check(h0, n - L)
    inverse: dict[int, int] = {}
    for y, z in enumerate(f.table):
        inverse.setdefault(parity_rows(z, h0.data), y)
    return HashDecoder(code, h0, f, c, draw, hits, inverse)


def hash_decode(hd: HashDecoder, y: BitVector):
    """``(y - f(invert(h0, y H0^T))) Ginv``; ``Outcome.NOT_FOUND`` if the inverter misses."""
    return hd(y)


# -- distinguisher --------------------------------------------------------------------


def constant_failure_decoder(y: BitVector):
    return Outcome.NO_MATCH


@dataclass(frozen=True)
class DistinguisherResult:
    hits_source: int
    hits_uniform: int
    trials: int

    @property
    def accept_source(self) -> float:
        return self.hits_source / self.trials

    @property
    def accept_uniform(self) -> float:
        return self.hits_uniform / self.trials

    @property
    def advantage(self) -> float:
        return self.accept_source - self.accept_uniform

    @property
    def ci95(self) -> tuple[float, float]:
        """Newcombe hybrid score interval for the advantage."""
        return newcombe_difference(self.hits_source, self.trials, self.hits_uniform, self.trials)

    @property
    def half_width(self) -> float:
        lo, hi = self.ci95
        return max(self.advantage - lo, hi - self.advantage)


def distinguisher_from_decoder(enc, dec, source: ErrorSource, k: int, trials: int, seed=None,
                               reference: ErrorSource | None = None) -> DistinguisherResult:
    """Estimate the advantage of ``D(w) = [dec(enc(x) + w) == x]``, ``x`` uniform.

    ``w`` comes from ``source`` on one side and from ``reference`` (uniform
    by default) on the other; each side uses ``trials`` fresh messages.
    """
    from .sources import uniform_source

    if reference is None:
        reference = uniform_source(source.n)
    rng_src, rng_ref = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))

    def accepted(src: ErrorSource, rng) -> int:
        hits = 0
        for _ in range(trials):
            x = BitVector(k, int(rng.integers(1 << k)))
            w = src.sample(rng)
            if dec(enc(x) ^ w) == x:
                hits += 1
        return hits

    return DistinguisherResult(accepted(source, rng_src), accepted(reference, rng_ref), trials)
