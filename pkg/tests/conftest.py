"""Independent brute-force oracles shared by the tests.

These work on plain lists of 0/1 ints with nested loops and never touch the
packed-integer code paths they are used to check.
"""

import itertools

import numpy as np
import pytest


def bits(v, n):
    """Column 0 is the top bit."""
    return [(v >> (n - 1 - j)) & 1 for j in range(n)]


def matrix_bits(M):
    return [bits(r, M.cols) for r in M.data]


def span(rows, n):
    """Every XOR combination of the given bit-lists, as a set of tuples."""
    out = set()
    for mask in itertools.product((0, 1), repeat=len(rows)):
        acc = [0] * n
        for use, r in zip(mask, rows):
            if use:
                acc = [a ^ b for a, b in zip(acc, r)]
        out.add(tuple(acc))
    return out


def brute_rank(M):
    size = len(span(matrix_bits(M), M.cols))
    return size.bit_length() - 1


def dot(a, b):
    return sum(x & y for x, y in zip(a, b)) % 2


def brute_kernel(M):
    """All x with M x^T = 0."""
    rows = matrix_bits(M)
    return {x for x in itertools.product((0, 1), repeat=M.cols) if all(dot(x, r) == 0 for r in rows)}


def brute_vec_mat(x, M):
    """x (bit list of length rows) times M, by the definition."""
    rows = matrix_bits(M)
    out = [0] * M.cols
    for xi, r in zip(x, rows):
        if xi:
            out = [a ^ b for a, b in zip(out, r)]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria record one line each here; printed after the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
