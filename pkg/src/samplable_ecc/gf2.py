"""Dense GF(2) vectors and matrices.

Bits are packed into Python ints.  Column ``j`` of an ``n``-bit row is the
bit of weight ``2**(n - 1 - j)``, i.e. column 0 is the most significant bit.
With that convention integer order on equal-length vectors is the
lexicographic order of their bit strings, which the reconstruction code
relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, FormatError, RankDeficient

__all__ = [
    "BitVector",
    "BitMatrix",
    "rref",
    "rank",
    "nullspace_basis",
    "right_inverse",
    "solve_left",
    "mat_mul",
    "vec_mat_mul",
    "xor_rows",
    "parity_rows",
    "batch_vec_mat_mul",
    "dumps_matrix",
    "loads_matrix",
    "hex_word",
    "parse_hex_word",
    "random_matrix",
    "random_vector",
    "as_rng",
]


def _bits_to_int(bits: Iterable[int]) -> tuple[int, int]:
    value = 0
    length = 0
    for b in bits:
        if b not in (0, 1, True, False):
            raise ValueError(f"not a bit: {b!r}")
        value = (value << 1) | int(b)
        length += 1
    return length, value


@dataclass(frozen=True, order=True)
class BitVector:
    """Fixed-length bit string; ``value`` holds the bits, column 0 first."""

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        """The vector with a single 1 in column ``index`` (0-based)."""
        if not 0 <= index < length:
            raise IndexError(index)
        return cls(length, 1 << (length - 1 - index))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        length, value = _bits_to_int(bits)
        return cls(length, value)

    @classmethod
    def from_str(cls, text: str) -> "BitVector":
        text = text.replace(" ", "").replace("_", "")
        return cls.from_bits(int(ch) for ch in text)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.value >> (self.length - 1 - index)) & 1

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.value >> (self.length - 1 - i)) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if not isinstance(other, BitVector):
            return NotImplemented
        if other.length != self.length:
            raise DimensionMismatch(f"xor of lengths {self.length} and {other.length}")
        return BitVector(self.length, self.value ^ other.value)

    __add__ = __xor__
    __sub__ = __xor__

    def weight(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    def to_str(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def hex(self) -> str:
        return hex_word(self.value, self.length)

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector(self.length + other.length, (self.value << other.length) | other.value)

    def __repr__(self) -> str:
        return f"BitVector('{self.to_str()}')"


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; ``data[i]`` is row ``i`` packed as an int."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.data)}")
        limit = 1 << self.cols
        for r in self.data:
            if not 0 <= r < limit:
                raise ValueError(f"row {r:#x} does not fit in {self.cols} columns")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls(k, k, tuple(1 << (k - 1 - i) for i in range(k)))

    @classmethod
    def from_rows(cls, rows: Sequence, cols: int | None = None) -> "BitMatrix":
        """Build from bit strings, bit lists or :class:`BitVector` rows.

        ``cols`` is required only when ``rows`` is empty.
        """
        vecs = []
        for r in rows:
            if isinstance(r, BitVector):
                vecs.append(r)
            elif isinstance(r, str):
                vecs.append(BitVector.from_str(r))
            else:
                vecs.append(BitVector.from_bits(r))
        if not vecs:
            if cols is None:
                raise ValueError("cols required for an empty matrix")
            return cls(0, cols, ())
        width = vecs[0].length
        if cols is not None and cols != width:
            raise DimensionMismatch(f"rows have {width} columns, expected {cols}")
        if any(v.length != width for v in vecs):
            raise DimensionMismatch("ragged rows")
        return cls(len(vecs), width, tuple(v.value for v in vecs))

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        a = np.asarray(array, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_rows([list(row) for row in a], cols=a.shape[1])

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.data):
            for j in range(self.cols):
                out[i, j] = (r >> (self.cols - 1 - j)) & 1
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def row_vectors(self) -> list[BitVector]:
        return [BitVector(self.cols, r) for r in self.data]

    def col(self, j: int) -> BitVector:
        if not 0 <= j < self.cols:
            raise IndexError(j)
        shift = self.cols - 1 - j
        return BitVector.from_bits((r >> shift) & 1 for r in self.data)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return (self.data[i] >> (self.cols - 1 - j)) & 1

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def transpose(self) -> "BitMatrix":
        out = []
        for j in range(self.cols):
            shift = self.cols - 1 - j
            v = 0
            for r in self.data:
                v = (v << 1) | ((r >> shift) & 1)
            out.append(v)
        return BitMatrix(self.cols, self.rows, tuple(out))

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if other.cols != self.cols:
            raise DimensionMismatch("vstack needs equal column counts")
        return BitMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def take_rows(self, count: int) -> "BitMatrix":
        return BitMatrix(count, self.cols, self.data[:count])

    def is_zero(self) -> bool:
        return not any(self.data)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_mul(self, other)

    def __repr__(self) -> str:
        body = "; ".join(format(r, f"0{self.cols}b") for r in self.data)
        return f"BitMatrix({self.rows}x{self.cols}: [{body}])"


# -- elimination ------------------------------------------------------------


def _eliminate(rows: list[int], width: int, pivot_cols: int) -> list[int]:
    """In-place reduced row echelon form of ``rows`` (``width`` bits each).

    Pivots are searched only among the leftmost ``pivot_cols`` columns, so
    extra columns on the right ride along as an augmented block.  Pivot rows
    end up first, in pivot order.  Returns the pivot column indices.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for col in range(pivot_cols):
        if r == nrows:
            break
        bit = 1 << (width - 1 - col)
        sel = None
        for i in range(r, nrows):
            if rows[i] & bit:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= prow
        pivots.append(col)
        r += 1
    return pivots


def rref(M: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form with leftmost pivots, and the pivot columns."""
    rows = list(M.data)
    pivots = _eliminate(rows, M.cols, M.cols)
    return BitMatrix(M.rows, M.cols, tuple(rows)), pivots


def rank(M: BitMatrix) -> int:
    rows = list(M.data)
    return len(_eliminate(rows, M.cols, M.cols))


def nullspace_basis(M: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : M v^T = 0}``, one vector per free column, in column order."""
    R, pivots = rref(M)
    n = M.cols
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        fbit = 1 << (n - 1 - free)
        v = fbit
        for i, p in enumerate(pivots):
            if R.data[i] & fbit:
                v |= 1 << (n - 1 - p)
        basis.append(BitVector(n, v))
    return basis


def _rref_with_transform(M: BitMatrix) -> tuple[list[int], list[int], list[int]]:
    """Return (reduced rows, pivots, transform rows E) with E·M = reduced."""
    k = M.rows
    width = M.cols + k
    aug = [(r << k) | (1 << (k - 1 - i)) for i, r in enumerate(M.data)]
    pivots = _eliminate(aug, width, M.cols)
    mask = (1 << k) - 1
    reduced = [a >> k for a in aug]
    transform = [a & mask for a in aug]
    return reduced, pivots, transform


def right_inverse(G: BitMatrix) -> BitMatrix:
    """Canonical right inverse ``X`` (n x k) with ``G X = I_k``.

    Solves column by column on the reduced form with every free variable set
    to zero.  Raises :class:`RankDeficient` unless G has full row rank.
    """
    k, n = G.rows, G.cols
    reduced, pivots, E = _rref_with_transform(G)
    if len(pivots) < k:
        raise RankDeficient(f"rank {len(pivots)} < {k} rows")
    # X[p_i, :] = E[i, :], all other rows zero
    out = [0] * n
    for i, p in enumerate(pivots):
        out[p] = E[i]
    return BitMatrix(n, k, tuple(out))


def solve_left(A: BitMatrix, b: BitVector) -> BitVector | None:
    """Some ``x`` with ``x · A = b`` (free variables zero), or None."""
    if b.length != A.cols:
        raise DimensionMismatch(f"target has {b.length} bits, matrix has {A.cols} columns")
    reduced, pivots, E = _rref_with_transform(A)
    n = A.cols
    rem = b.value
    coeff = 0
    for i, p in enumerate(pivots):
        if rem >> (n - 1 - p) & 1:
            rem ^= reduced[i]
            coeff ^= E[i]
    if rem:
        return None
    return BitVector(A.rows, coeff)


# -- products -----------------------------------------------------------------


def xor_rows(value: int, data: Sequence[int], nrows: int) -> int:
    """``value · M`` on raw ints: XOR of the rows selected by the bits of value."""
    acc = 0
    v = value
    while v:
        low = v & -v
        acc ^= data[nrows - low.bit_length()]
        v ^= low
    return acc


def parity_rows(value: int, data: Sequence[int]) -> int:
    """``value · M^T`` on raw ints: one parity bit per row of M."""
    acc = 0
    for r in data:
        acc = (acc << 1) | ((value & r).bit_count() & 1)
    return acc


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    return BitMatrix(A.rows, B.cols, tuple(xor_rows(r, B.data, B.rows) for r in A.data))


def vec_mat_mul(x: BitVector, M: BitMatrix, transpose: bool = False) -> BitVector:
    """``x · M``, or ``x · M^T`` when ``transpose`` is set."""
    if transpose:
        if x.length != M.cols:
            raise DimensionMismatch(f"vector of {x.length} bits times M^T with M {M.rows}x{M.cols}")
        return BitVector(M.rows, parity_rows(x.value, M.data))
    if x.length != M.rows:
        raise DimensionMismatch(f"vector of {x.length} bits times {M.rows}x{M.cols} matrix")
    return BitVector(M.cols, xor_rows(x.value, M.data, M.rows))


def batch_vec_mat_mul(words: np.ndarray, M: BitMatrix, transpose: bool = False) -> np.ndarray:
    """Vectorised :func:`vec_mat_mul` over a uint64 array of packed words.

    Limited to 64-bit operands and results.
    """
    words = np.asarray(words, dtype=np.uint64)
    if max(M.rows, M.cols) > 64:
        raise DimensionMismatch("batch products need dimensions <= 64")
    out = np.zeros(words.shape, dtype=np.uint64)
    if transpose:
        for r in M.data:
            par = np.bitwise_count(words & np.uint64(r)) & np.uint8(1)
            out = (out << np.uint64(1)) | par.astype(np.uint64)
        return out
    for i, r in enumerate(M.data):
        sel = (words >> np.uint64(M.rows - 1 - i)) & np.uint64(1)
        out ^= sel * np.uint64(r)
    return out


# -- sampling -----------------------------------------------------------------


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _random_words(rng: np.random.Generator, count: int, length: int) -> list[int]:
    if length == 0:
        return [0] * count
    nbytes = -(-length // 8)
    raw = rng.integers(0, 256, size=(count, nbytes), dtype=np.uint8)
    pad = 8 * nbytes - length
    return [int.from_bytes(row.tobytes(), "big") >> pad for row in raw]


def random_matrix(seed, rows: int, cols: int) -> BitMatrix:
    """Uniform ``rows x cols`` matrix."""
    rng = as_rng(seed)
    return BitMatrix(rows, cols, tuple(_random_words(rng, rows, cols)))


def random_vector(seed, length: int) -> BitVector:
    rng = as_rng(seed)
    return BitVector(length, _random_words(rng, 1, length)[0])


# -- text format --------------------------------------------------------------


def hex_word(value: int, length: int) -> str:
    """Hex with column 0 as the top bit, right-padded to whole hex digits."""
    digits = -(-length // 4)
    if digits == 0:
        return ""
    return format(value << (4 * digits - length), f"0{digits}x")


def parse_hex_word(text: str, length: int) -> int:
    digits = -(-length // 4)
    text = text.strip()
    if len(text) != digits:
        raise FormatError(f"expected {digits} hex digits for {length} bits, got {text!r}")
    try:
        raw = int(text, 16) if text else 0
    except ValueError as exc:
        raise FormatError(f"bad hex {text!r}") from exc
    pad = 4 * digits - length
    if raw & ((1 << pad) - 1):
        raise FormatError(f"nonzero padding bits in {text!r}")
    return raw >> pad


def dumps_matrix(M: BitMatrix) -> str:
    lines = [f"gf2 {M.rows} {M.cols}"]
    lines.extend(hex_word(r, M.cols) for r in M.data)
    return "\n".join(lines) + "\n"


def _parse_matrix_lines(lines: list[str], start: int) -> tuple[BitMatrix, int]:
    if start >= len(lines):
        raise FormatError("missing gf2 header")
    head = lines[start].split()
    if len(head) != 3 or head[0] != "gf2":
        raise FormatError(f"bad matrix header {lines[start]!r}")
    try:
        rows, cols = int(head[1]), int(head[2])
    except ValueError as exc:
        raise FormatError(f"bad matrix header {lines[start]!r}") from exc
    body = lines[start + 1 : start + 1 + rows]
    if len(body) != rows:
        raise FormatError(f"expected {rows} rows, found {len(body)}")
    data = tuple(parse_hex_word(t, cols) for t in body)
    return BitMatrix(rows, cols, data), start + 1 + rows


def loads_matrix(text: str) -> BitMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    M, end = _parse_matrix_lines(lines, 0)
    if end != len(lines):
        raise FormatError("trailing lines after matrix")
    return M
