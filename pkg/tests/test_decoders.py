import numpy as np
import pytest

from samplable_ecc.codes import code_from_parity_check, encode, random_code, syndrome
from samplable_ecc.decoders import (
    Outcome,
    brute_force_decode,
    brute_force_decoder,
    brute_force_inverter,
    build_flat_table,
    build_hash_decoder,
    collision_set,
    constant_failure_decoder,
    distinguisher_from_decoder,
    hash_decode,
    subspace_decoder,
    subspace_recoverer,
)
from samplable_ecc.errors import DependentBasis, DimensionMismatch, ParameterError
from samplable_ecc.gf2 import BitMatrix, BitVector, random_matrix, rank
from samplable_ecc.sources import (
    InjectiveMap,
    flat_from_map,
    flat_from_support,
    subspace_source,
    uniform_source,
)

from conftest import dot, matrix_bits

H4 = BitMatrix.from_rows(["1111", "0011"])


def test_outcomes_are_falsy():
    assert not Outcome.AMBIGUOUS and not Outcome.NO_MATCH and not Outcome.NOT_FOUND


# -- flat tables ----------------------------------------------------------------


def test_table_point_mass():
    code = random_code(8, 3, 0)
    table = build_flat_table(code, flat_from_support([BitVector.zeros(8)]))
    assert table.entries == {0: 0}
    assert not table.ambiguous


def test_table_hand_example():
    code = code_from_parity_check(H4, 2)
    table = build_flat_table(code, flat_from_support([BitVector.zeros(4), BitVector.from_str("1000")]))
    assert table.entries == {0b00: 0b0000, 0b10: 0b1000}
    assert not table.ambiguous


def test_two_codewords_are_ambiguous():
    code = code_from_parity_check(H4, 2)
    src = flat_from_support([BitVector.from_str("1100"), BitVector.from_str("0011")])
    table = build_flat_table(code, src)
    assert table.ambiguous == {0} and not table.entries
    assert table.ambiguous_mass() == 2
    assert brute_force_decode(code, table, BitVector.from_str("0000")) is Outcome.AMBIGUOUS


def test_table_consistency_against_pairwise_oracle(rng):
    code = random_code(14, 6, rng)
    f = InjectiveMap.random(6, 14, rng)
    src = flat_from_map(f)
    table = build_flat_table(code, src)
    for s, z in table.entries.items():
        assert z in f.table and code.syndrome_int(z) == s
    # oracle: z is ambiguous iff some other support point differs from it by a codeword
    codewords = set(code.codewords())
    for z in f.table:
        clash = any(z ^ w in codewords for w in f.table if w != z)
        assert (code.syndrome_int(z) in table.ambiguous) == clash


def test_brute_force_decode_outcomes():
    code = random_code(10, 4, 1)
    src = flat_from_support([BitVector.zeros(10), BitVector.unit(10, 3)])
    table = build_flat_table(code, src)
    for x in range(16):
        xv = BitVector(4, x)
        assert brute_force_decode(code, table, encode(code, xv)) == xv
    stray = next(y for y in range(1024) if code.syndrome_int(y) not in table.entries)
    assert brute_force_decode(code, table, BitVector(10, stray)) is Outcome.NO_MATCH
    with pytest.raises(DimensionMismatch):
        brute_force_decode(code, table, BitVector.zeros(9))


def test_exhaustive_failures_are_exactly_ambiguous_support():
    rng = np.random.default_rng(606)
    code = random_code(24, 10, rng)
    f = InjectiveMap.random(6, 24, rng)
    dec = brute_force_decoder(code, flat_from_map(f))
    failed = set()
    for x in range(1 << 10):
        c = code.encode_int(x)
        for z in f.table:
            if dec.decode_int(c ^ z) != x:
                failed.add(z)
    ambiguous = {z for z in f.table if code.syndrome_int(z) in dec.table.ambiguous}
    assert failed == ambiguous


def test_decode_batch_matches_scalar(rng):
    code = random_code(20, 7, rng)
    dec = brute_force_decoder(code, flat_from_map(InjectiveMap.random(5, 20, rng)))
    words = rng.integers(0, 1 << 20, size=500, dtype=np.uint64)
    msgs, ok = dec.decode_batch(words)
    for w, m, good in zip(words.tolist(), msgs.tolist(), ok.tolist()):
        r = dec.decode_int(w)
        assert good == (not isinstance(r, Outcome))
        if good:
            assert m == r


# -- subspace ---------------------------------------------------------------------


def test_subspace_coordinate_basis():
    basis = [BitVector.unit(6, i) for i in range(3)]
    H, rec = subspace_recoverer(basis)
    assert H == BitMatrix.from_rows(["100000", "010000", "001000"])
    assert rec(BitVector.from_str("101")) == BitVector.from_str("101000")


def oracle_syndrome(H, z):
    return [dot(list(z), r) for r in matrix_bits(H)]


def test_subspace_hand_example():
    z1, z2 = BitVector.from_str("1100"), BitVector.from_str("0011")
    H, rec = subspace_recoverer([z1, z2])
    assert oracle_syndrome(H, z1 ^ z2) == [1, 1]
    assert oracle_syndrome(H, z1) == [1, 0]
    assert rec(BitVector.from_str("11")) == BitVector.from_str("1111")


def test_subspace_syndrome_is_coordinate_vector(rng):
    n, m = 12, 4
    while True:
        B = random_matrix(rng, m, n)
        if rank(B) == m:
            break
    basis = B.row_vectors()
    H, rec = subspace_recoverer(basis)
    for a in range(1 << m):
        z = BitVector(n, 0)
        for i in range(m):
            if (a >> (m - 1 - i)) & 1:
                z = z ^ basis[i]
        assert oracle_syndrome(H, z) == [(a >> (m - 1 - i)) & 1 for i in range(m)]
        assert rec(BitVector(m, a)) == z


def test_subspace_decoder_exhaustive_at_12_4(rng):
    basis = [BitVector(12, v) for v in (0b110000000011, 0b001100001100, 0b000011110000, 0b101010101010)]
    dec = subspace_decoder(basis, 12)
    assert dec.code.k == 8 and dec.code.rate == 8 / 12
    span = subspace_source(basis).support_ints()
    for x in range(1 << 8):
        c = dec.code.encode_int(x)
        for z in span:
            assert dec.decode_int(c ^ z) == x


def test_subspace_dependent_basis():
    with pytest.raises(DependentBasis):
        subspace_recoverer([BitVector.from_str("110"), BitVector.from_str("110")])


# -- hash decoder -------------------------------------------------------------------


def test_hash_decoder_identity_map_needs_few_draws():
    f = InjectiveMap.identity(6, 24)
    hd = build_hash_decoder(f, 1, seed=0)
    assert hd.draws <= 5
    assert hd.h0.rows == 6 + 2 * 5
    assert len(hd.collisions) <= 2**6 / 24
    assert all(dot(g, h) == 0 for g in matrix_bits(hd.code.G) for h in matrix_bits(hd.h0))


def test_hash_decoder_parameter_error():
    f = InjectiveMap.identity(8, 16)
    with pytest.raises(ParameterError):
        build_hash_decoder(f, 1, seed=0)  # 8 + 2*4 = 16 rows


def test_collision_set_matches_pairwise_oracle(rng):
    f = InjectiveMap.random(6, 16, rng)
    h = random_matrix(rng, 6, 16)
    hashes = {z: tuple(dot(list(BitVector(16, z)), r) for r in matrix_bits(h)) for z in f.table}
    expected = {z for z in f.table if any(hashes[z] == hashes[w] for w in f.table if w != z)}
    assert collision_set(f, h) == expected


def test_inverter_examples():
    f = InjectiveMap.random(8, 32, seed=4)
    hd = build_hash_decoder(f, 1, seed=4)
    h0 = hd.h0
    target = BitVector(h0.rows, int(syndrome_of(h0, f.table[0])))
    assert brute_force_inverter(f, h0, target) == BitVector(8, 0)
    # exhaustive over all seeds outside the collision set
    for y, z in enumerate(f.table):
        t = BitVector(h0.rows, syndrome_of(h0, z))
        if z not in hd.collisions:
            assert brute_force_inverter(f, h0, t) == BitVector(8, y)
            assert hd.invert(t.value) == y
    missing = next(s for s in range(1 << h0.rows) if s not in {syndrome_of(h0, z) for z in f.table})
    assert brute_force_inverter(f, h0, BitVector(h0.rows, missing)) is Outcome.NOT_FOUND
    with pytest.raises(DimensionMismatch):
        brute_force_inverter(f, h0, BitVector(3, 0))


def syndrome_of(h, z):
    out = 0
    for r in h.data:
        out = (out << 1) | (bin(r & z).count("1") & 1)
    return out


def test_inverter_tie_returns_smaller_seed():
    f = InjectiveMap(2, 4, (0b0001, 0b0010, 0b0100, 0b1000))
    h0 = BitMatrix.from_rows(["0011"])  # seeds 0 and 1 both hash to 1
    assert brute_force_inverter(f, h0, BitVector(1, 1)) == BitVector(2, 0)
    assert brute_force_inverter(f, h0, BitVector(1, 0)) == BitVector(2, 2)


def test_hash_decode_corrects_unique_hash_errors():
    f = InjectiveMap.random(6, 24, seed=9)
    hd = build_hash_decoder(f, 1, seed=9)
    code = hd.code
    for y, z in enumerate(f.table):
        if z in hd.collisions:
            continue
        for x in (0, 1, 77, (1 << code.k) - 1):
            xv = BitVector(code.k, x)
            assert hash_decode(hd, encode(code, xv) ^ BitVector(24, z)) == xv


def test_hash_decode_on_codeword_is_failure_or_not_found():
    f = InjectiveMap.random(6, 24, seed=9)
    hd = build_hash_decoder(f, 1, seed=9)
    xv = BitVector(hd.code.k, 5)
    out = hash_decode(hd, encode(hd.code, xv))
    # zero error is outside the image unless f hits 0; decoding either gives up or errs
    if 0 not in f.table:
        assert out is Outcome.NOT_FOUND or out != xv


# -- distinguisher --------------------------------------------------------------------


def _flat_setup(seed):
    rng = np.random.default_rng(seed)
    code = random_code(24, 10, rng)
    src = flat_from_map(InjectiveMap.random(6, 24, rng))
    dec = brute_force_decoder(code, src)
    return code, src, dec


def test_constant_failure_has_no_advantage():
    code, src, _ = _flat_setup(1)
    r = distinguisher_from_decoder(lambda x: encode(code, x), constant_failure_decoder, src, 10, 2000, 3)
    assert r.advantage == 0 and r.accept_source == 0


def test_uniform_source_has_no_advantage():
    code = random_code(12, 4, 0)
    u = uniform_source(12)
    dec = brute_force_decoder(code, u)
    r = distinguisher_from_decoder(lambda x: encode(code, x), dec, u, 4, 4000, 5)
    assert abs(r.advantage) <= 3 * r.half_width + 1e-12


def test_good_decoder_gives_large_advantage():
    code, src, dec = _flat_setup(2)
    r = distinguisher_from_decoder(lambda x: encode(code, x), dec, src, 10, 5000, 4)
    eps = dec.table.ambiguous_mass() / 64
    assert eps <= 0.05
    assert r.advantage >= (1 - eps) - 2**-10 - 3 * r.half_width
    assert r.advantage >= 0.9
