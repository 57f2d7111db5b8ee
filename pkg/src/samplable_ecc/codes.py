"""Binary linear codes with syndrome decoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import DimensionMismatch, FormatError, ParameterError, RankDeficient, RecFailure
from .gf2 import (
    BitMatrix,
    BitVector,
    _parse_matrix_lines,
    as_rng,
    dumps_matrix,
    nullspace_basis,
    parity_rows,
    random_matrix,
    rank,
    right_inverse,
    xor_rows,
)

#: Maps a syndrome to an error vector, or raises :class:`RecFailure`.
Recoverer = Callable[[BitVector], BitVector]


@dataclass(frozen=True)
class LinearCode:
    """Generator ``G`` (k x n), parity check ``H`` (r x n), right inverse ``Ginv`` (n x k).

    ``r`` is normally ``n - k``.  Construction checks ``G H^T = 0`` and
    ``G Ginv = I``; :meth:`invariant_violations` also checks the ranks.
    """

    n: int
    k: int
    G: BitMatrix
    H: BitMatrix
    Ginv: BitMatrix = field(repr=False)

    def __post_init__(self):
        if self.G.shape != (self.k, self.n):
            raise DimensionMismatch(f"G is {self.G.shape}, expected {(self.k, self.n)}")
        if self.H.cols != self.n:
            raise DimensionMismatch(f"H has {self.H.cols} columns, expected {self.n}")
        if self.Ginv.shape != (self.n, self.k):
            raise DimensionMismatch(f"Ginv is {self.Ginv.shape}, expected {(self.n, self.k)}")
        for g in self.G.data:
            if parity_rows(g, self.H.data):
                raise ValueError("G H^T != 0")
        ident = BitMatrix.identity(self.k).data
        for g, e in zip(self.G.data, ident):
            if xor_rows(g, self.Ginv.data, self.n) != e:
                raise ValueError("G Ginv != I")

    @classmethod
    def from_matrices(cls, G: BitMatrix, H: BitMatrix) -> "LinearCode":
        return cls(G.cols, G.rows, G, H, right_inverse(G))

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def redundancy(self) -> int:
        """Syndrome length (rows of H)."""
        return self.H.rows

    def invariant_violations(self) -> list[str]:
        """Names of the violated code invariants (empty when all hold)."""
        bad = []
        if any(parity_rows(g, self.H.data) for g in self.G.data):
            bad.append("G H^T = 0")
        ident = BitMatrix.identity(self.k).data
        if any(xor_rows(g, self.Ginv.data, self.n) != e for g, e in zip(self.G.data, ident)):
            bad.append("G Ginv = I")
        if rank(self.G) != self.k:
            bad.append("rank(G) = k")
        if self.H.rows != self.n - self.k or rank(self.H) != self.n - self.k:
            bad.append("rank(H) = n - k")
        return bad

    # raw-int fast paths used by the estimators
    def encode_int(self, x: int) -> int:
        return xor_rows(x, self.G.data, self.k)

    def syndrome_int(self, y: int) -> int:
        return parity_rows(y, self.H.data)

    def unencode_int(self, c: int) -> int:
        return xor_rows(c, self.Ginv.data, self.n)

    def codewords(self) -> list[int]:
        """All ``2**k`` codewords as ints, indexed by message value."""
        words = [0]
        for i in range(self.k - 1, -1, -1):
            g = self.G.data[i]
            words = words + [w ^ g for w in words]
        return words


def code_from_parity_check(H: BitMatrix, k: int) -> LinearCode:
    """Code whose generator is the first ``k`` nullspace vectors of ``H``.

    A rank-deficient ``H`` has a nullspace larger than ``k``; the rate stays
    ``k/n`` and ``G H^T = 0`` still holds, but ``rank(H) = n - k`` does not.
    """
    n = H.cols
    if not 0 <= k <= n:
        raise ParameterError(f"need 0 <= k <= n, got k={k}, n={n}")
    basis = nullspace_basis(H)
    if len(basis) < k:
        raise RankDeficient(f"nullspace has dimension {len(basis)} < {k}")
    G = BitMatrix.from_rows(basis[:k], cols=n)
    return LinearCode(n, k, G, H, right_inverse(G))


def random_code(n: int, k: int, seed=None) -> LinearCode:
    """Random code with a uniformly drawn full-rank ``(n-k) x n`` parity check.

    Draws are repeated until ``H`` has full rank, so the kernel is a uniform
    ``k``-dimensional subspace and a fixed nonzero vector lands in it with
    probability ``(2**k - 1)/(2**n - 1) <= 2**-(n-k)``.
    """
    if not 0 < k < n:
        raise ParameterError(f"need 0 < k < n, got k={k}, n={n}")
    rng = as_rng(seed)
    while True:
        H = random_matrix(rng, n - k, n)
        if rank(H) == n - k:
            return code_from_parity_check(H, k)


def _check_len(v: BitVector, expected: int, what: str):
    if v.length != expected:
        raise DimensionMismatch(f"{what} has {v.length} bits, expected {expected}")


def encode(code: LinearCode, x: BitVector) -> BitVector:
    _check_len(x, code.k, "message")
    return BitVector(code.n, code.encode_int(x.value))


def syndrome(code: LinearCode, y: BitVector) -> BitVector:
    _check_len(y, code.n, "word")
    return BitVector(code.redundancy, code.syndrome_int(y.value))


def unencode(code: LinearCode, c: BitVector) -> BitVector:
    """``c · Ginv``; inverts :func:`encode` on codewords."""
    _check_len(c, code.n, "word")
    return BitVector(code.k, code.unencode_int(c.value))


def syndrome_decode(code: LinearCode, rec: Recoverer, y: BitVector) -> BitVector:
    """``(y - rec(y H^T)) Ginv``.  :class:`RecFailure` from ``rec`` propagates."""
    _check_len(y, code.n, "word")
    e = rec(syndrome(code, y))
    _check_len(e, code.n, "recovered error")
    return BitVector(code.k, code.unencode_int(y.value ^ e.value))


class TableRecoverer:
    """Recoverer backed by an explicit syndrome -> error table."""

    def __init__(self, table: Mapping[BitVector, BitVector]):
        self.table = dict(table)

    def __call__(self, s: BitVector) -> BitVector:
        try:
            return self.table[s]
        except KeyError:
            raise RecFailure(s, "syndrome not in table") from None


def zero_recoverer(n: int) -> Recoverer:
    """Recoverer that assumes no error occurred."""

    def rec(s: BitVector) -> BitVector:
        return BitVector.zeros(n)

    return rec


# -- derandomization -----------------------------------------------------------


@dataclass(frozen=True)
class DerandomizedEncoder:
    """Deterministic encoder ``x -> renc(x, coins[x])`` with its error ledger."""

    renc: Callable[[BitVector, BitVector], BitVector]
    coins: dict[BitVector, BitVector]
    error: dict[BitVector, float]
    average_error: dict[BitVector, float]
    exact: bool

    def __call__(self, x: BitVector) -> BitVector:
        return self.renc(x, self.coins[x])


def derandomize_encoder(renc, dec, source, k: int, coin_bits: int,
                        trials: int | None = None, seed=None) -> DerandomizedEncoder:
    """Fix the coins of a randomized encoder message by message.

    For every message ``x`` each coin string ``r`` is scored by the failure
    probability of ``dec(renc(x, r) + z) != x`` over ``z`` from ``source``,
    exactly when the source is enumerable, otherwise on ``trials`` samples
    (the same samples for every ``r``).  The smallest minimizing ``r`` wins,
    so the chosen error never exceeds the average over coins.
    """
    exact = source.enumerable
    if exact:
        errors = source.support()
    else:
        if not trials:
            raise ParameterError("non-enumerable source needs a trial budget")
        rng = as_rng(seed)
        errors = [source.sample(rng) for _ in range(trials)]
    coins_all = [BitVector(coin_bits, r) for r in range(1 << coin_bits)]
    chosen, err, avg = {}, {}, {}
    for xv in range(1 << k):
        x = BitVector(k, xv)
        rates = []
        for r in coins_all:
            c = renc(x, r)
            fails = sum(1 for z in errors if dec(c ^ z) != x)
            rates.append(fails / len(errors))
        best = min(range(len(rates)), key=lambda i: (rates[i], i))
        chosen[x] = coins_all[best]
        err[x] = rates[best]
        avg[x] = float(np.mean(rates))
    return DerandomizedEncoder(renc, chosen, err, avg, exact)


# -- text format -------------------------------------------------------------


def dumps_code(code: LinearCode) -> str:
    return f"code {code.n} {code.k}\n" + dumps_matrix(code.G) + dumps_matrix(code.H)


def loads_code(text: str) -> LinearCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty code file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "code":
        raise FormatError(f"bad code header {lines[0]!r}")
    n, k = int(head[1]), int(head[2])
    G, pos = _parse_matrix_lines(lines, 1)
    H, pos = _parse_matrix_lines(lines, pos)
    if pos != len(lines):
        raise FormatError("trailing lines after code")
    if G.shape != (k, n):
        raise FormatError(f"G is {G.shape}, header says {(k, n)}")
    return LinearCode.from_matrices(G, H)
