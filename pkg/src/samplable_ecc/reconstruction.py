"""Reconstruction of an injective sampler from a coder that corrects it.

The environment is an oracle ``O_f`` with a sampling side (``S``,
``y -> f(y)``) and a membership side (``M``, ``z -> [z in f({0,1}^m)]``).
Decoders are written as generator functions: they ``yield`` :class:`Query`
objects, receive the answers, and ``return`` a message int (or ``None``
to give up).  That lets the executor trace every query and halt a run at an
exact point, which both construction procedures below rely on.

Two description procedures turn a coder plus ``f`` into a shorter
description of ``f``:

* invertible path: a set ``T`` of images, their preimages ``B(T)`` and the
  table of ``f`` off ``B(T)``; replaying the decoder re-inverts ``T``;
* forgeable path: a set ``Y`` of seeds, the table off ``Y`` and one advice
  triple ``(x_y, a_y, b_y)`` per seed; replaying the decoder on the
  ``a_y``-th word of ``D(x_y)`` exposes ``f(y)`` as its ``b_y``-th
  membership query.

Both come with exact (big-integer) description-length ledgers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Generator, Iterable

from .codes import LinearCode, random_code
from .errors import (
    FormatError,
    NotACorrector,
    ParameterError,
    SimulationStuck,
    VerdictMismatch,
)
from .gf2 import as_rng, hex_word, parse_hex_word
from .sources import InjectiveMap

__all__ = [
    "Query",
    "BOTTOM",
    "OracleEnv",
    "Trace",
    "TracedCoder",
    "run_traced",
    "Classification",
    "classify",
    "FDescription",
    "describe_invertible",
    "recover_invertible",
    "describe_forgeable",
    "recover_forgeable",
    "LedgerReport",
    "description_ledger",
    "enumerating_coder",
    "inverse_table_coder",
    "lookup_table_coder",
    "dumps_description",
    "loads_description",
]

SAMPLE = "S"
MEMBER = "M"


@dataclass(frozen=True)
class Query:
    kind: str  # "S" or "M"
    arg: int


class _Bottom:
    def __repr__(self):
        return "BOTTOM"


#: Answer to a malformed oracle query.
BOTTOM = _Bottom()

DecodeProgram = Callable[[int], Generator[Query, object, "int | None"]]


class OracleEnv:
    """``O_f`` with per-side query counters."""

    def __init__(self, f: InjectiveMap):
        self.f = f
        self.image = f.image()
        self.s_count = 0
        self.m_count = 0

    def sample(self, y: int):
        self.s_count += 1
        if not 0 <= y < (1 << self.f.m):
            return BOTTOM
        return self.f.table[y]

    def member(self, z: int):
        self.m_count += 1
        if not 0 <= z < (1 << self.f.n):
            return BOTTOM
        return z in self.image

    def query(self, b: int, y: int):
        """The combined oracle ``O_f(b, y)``."""
        if b == 0:
            return self.sample(y)
        if b == 1:
            return self.member(y)
        return BOTTOM

    def answer(self, q: Query):
        return self.sample(q.arg) if q.kind == SAMPLE else self.member(q.arg)


@dataclass
class Trace:
    """Distinct queries of one run, in issue order, and how the run ended."""

    s_queries: list[int] = field(default_factory=list)
    m_queries: list[int] = field(default_factory=list)
    output: int | None = None
    halted: bool = False

    @property
    def total(self) -> int:
        return len(self.s_queries) + len(self.m_queries)


def run_traced(program: Generator, answer: Callable[[Query], object],
               stop: Callable[[Query, Trace], bool] | None = None) -> Trace:
    """Drive ``program`` to completion or until ``stop`` fires.

    Repeated queries are answered from a cache and not re-recorded.  ``stop``
    sees each new query right after it is issued; when it returns true the
    run halts without that query being answered.
    """
    trace = Trace()
    cache: dict[Query, object] = {}
    try:
        q = next(program)
        while True:
            if q in cache:
                reply = cache[q]
            else:
                (trace.s_queries if q.kind == SAMPLE else trace.m_queries).append(q.arg)
                if stop is not None and stop(q, trace):
                    trace.halted = True
                    program.close()
                    return trace
                reply = cache[q] = answer(q)
            q = program.send(reply)
    except StopIteration as done:
        trace.output = done.value
    return trace


@dataclass(frozen=True)
class TracedCoder:
    """Linear encoder plus an oracle decoder program.

    ``q`` bounds the distinct queries of one run of the decoder, counting
    the membership check the forgeable reduction appends to it.
    """

    name: str
    code: LinearCode
    decode: DecodeProgram
    q: int

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    def encode(self, x: int) -> int:
        return self.code.encode_int(x)


def _forger_program(coder: TracedCoder, w: int):
    """Decode ``w``, then ask ``M`` about the implied error (output None if absent)."""
    x = yield from coder.decode(w)
    if x is None:
        return None
    ok = yield Query(MEMBER, w ^ coder.encode(x))
    return x if ok is True else None


# -- classification -------------------------------------------------------------


@dataclass
class Classification:
    invert: frozenset[int]
    forge: frozenset[int]
    verdict: str
    eps: float
    # seed -> messages whose decoding did not ask S about that seed
    unqueried: dict[int, tuple[int, ...]] = field(repr=False, default_factory=dict)


def classify(env: OracleEnv, coder: TracedCoder, eps: float = 0.5) -> Classification:
    """Split the seeds by whether every decoding of ``Enc(x) + f(y)`` asks ``S`` about ``y``.

    Runs the decoder on all ``2^k x 2^m`` inputs with full oracle answers;
    raises :class:`NotACorrector` if any of them decodes wrongly.
    """
    f = env.f
    M, K = 1 << f.m, 1 << coder.k
    invert, forge, unqueried = set(), set(), {}
    for y in range(M):
        z = f.table[y]
        missed = []
        for x in range(K):
            trace = run_traced(coder.decode(coder.encode(x) ^ z), env.answer)
            if trace.output != x:
                raise NotACorrector(f"{coder.name}: seed {y}, message {x} decoded to {trace.output}")
            if trace.total > coder.q:
                raise ParameterError(f"{coder.name} made {trace.total} queries, budget {coder.q}")
            if y not in trace.s_queries:
                missed.append(x)
        if missed:
            forge.add(y)
            unqueried[y] = tuple(missed)
        else:
            invert.add(y)
    verdict = "invertible" if len(invert) > eps * M else "forgeable"
    return Classification(frozenset(invert), frozenset(forge), verdict, eps, unqueried)


# -- descriptions ---------------------------------------------------------------------


@dataclass
class FDescription:
    """Short description of ``f`` relative to a coder.

    ``kept`` is ``T`` (images) for the invertible variant and ``Y`` (seeds)
    for the forgeable one; ``removed_seeds`` is ``B(T)`` resp. ``Y``;
    ``rest`` tabulates ``f`` on every other seed.
    """

    variant: str
    m: int
    n: int
    k: int
    q: int
    T: tuple[int, ...] = ()
    B: tuple[int, ...] = ()
    Y: tuple[int, ...] = ()
    rest: dict[int, int] = field(default_factory=dict)
    advice: dict[int, tuple[int, int, int]] = field(default_factory=dict)

    @property
    def size(self) -> int:
        """``c = |T|`` or ``d = |Y|``."""
        return len(self.T) if self.variant == "invertible" else len(self.Y)

    def components(self) -> list[tuple[str, int]]:
        """(name, number of possible values) per component, given the coder."""
        N, M = 1 << self.n, 1 << self.m
        if self.variant == "invertible":
            c = len(self.T)
            return [
                ("T", math.comb(N, c)),
                ("B(T)", math.comb(M, len(self.B))),
                ("rest", math.perm(N - c, len(self.rest))),
            ]
        d = len(self.Y)
        per_seed = (1 << self.k) * M * self.q
        return [
            ("Y", math.comb(M, d)),
            ("rest", math.perm(N - d, len(self.rest))),
            ("advice", per_seed**d),
        ]

    @property
    def space(self) -> int:
        return math.prod(size for _, size in self.components())

    @property
    def length_bits(self) -> float:
        return sum(math.log2(size) for _, size in self.components())


def describe_invertible(env: OracleEnv, coder: TracedCoder, eps: float = 0.5,
                        classification: Classification | None = None) -> FDescription:
    """Greedy choice of ``T``: smallest candidate image first, ``q`` candidates retired per pick."""
    cls = classification or classify(env, coder, eps)
    if cls.verdict != "invertible":
        raise VerdictMismatch(f"verdict is {cls.verdict}")
    f = env.f
    inverse = f.inverse()
    candidates = {f.table[y] for y in cls.invert}
    x0 = 0
    T = []
    while candidates:
        z = min(candidates)
        candidates.discard(z)
        T.append(z)
        target = inverse[z]
        trace = run_traced(
            coder.decode(coder.encode(x0) ^ z), env.answer,
            stop=lambda q, tr: q.kind == SAMPLE and q.arg == target,
        )
        if not trace.halted:
            raise SimulationStuck(f"decoder never asked S about seed {target}")
        removed = 0
        for y in trace.s_queries[:-1]:
            if f.table[y] in candidates:
                candidates.discard(f.table[y])
                removed += 1
        while removed < coder.q - 1 and candidates:
            candidates.discard(min(candidates))
            removed += 1
    B = sorted(inverse[z] for z in T)
    Bset = set(B)
    rest = {y: f.table[y] for y in range(1 << f.m) if y not in Bset}
    return FDescription("invertible", f.m, f.n, coder.k, coder.q, T=tuple(sorted(T)),
                        B=tuple(B), rest=rest)


def recover_invertible(desc: FDescription, coder: TracedCoder) -> InjectiveMap:
    """Replay the decoder on each ``z`` of ``T`` in order; its first unknown ``S`` query is ``f^{-1}(z)``."""
    if desc.variant != "invertible":
        raise ValueError("not an invertible description")
    table = dict(desc.rest)
    image = set(desc.rest.values()) | set(desc.T)
    pending = set(desc.B)

    def answer(q: Query):
        if q.kind == MEMBER:
            return q.arg in image
        if q.arg in table:
            return table[q.arg]
        raise SimulationStuck(f"S query on unknown seed {q.arg}")

    for z in sorted(desc.T):
        trace = run_traced(coder.decode(coder.encode(0) ^ z), answer,
                           stop=lambda q, tr: q.kind == SAMPLE and q.arg not in table)
        if not trace.halted:
            raise SimulationStuck(f"replay of {z:#x} finished without a new S query")
        y = trace.s_queries[-1]
        if y not in pending:
            raise SimulationStuck(f"seed {y} is neither tabulated nor in B(T)")
        pending.discard(y)
        table[y] = z
    return _as_map(desc, table)


def _as_map(desc: FDescription, table: dict[int, int]) -> InjectiveMap:
    M = 1 << desc.m
    if len(table) != M or set(table) != set(range(M)):
        raise SimulationStuck(f"recovered {len(table)} of {M} entries")
    return InjectiveMap(desc.m, desc.n, tuple(table[y] for y in range(M)))


def describe_forgeable(env: OracleEnv, coder: TracedCoder, delta: float = 0.5,
                       classification: Classification | None = None) -> FDescription:
    """Greedy choice of ``Y`` with advice ``(x_y, a_y, b_y)``.

    ``D[x]`` holds the still-available words ``Enc(x) + f(y)``.  Every
    removal drops one seed from all of them at once, so a seed stays a
    candidate exactly while its words are present.  Each pick retires
    ``q - 1`` further seeds (``(q-1) K`` words) before the next one.
    """
    cls = classification or classify(env, coder, 1 - delta)
    if cls.verdict != "forgeable":
        raise VerdictMismatch(f"verdict is {cls.verdict}")
    f = env.f
    inverse = f.inverse()
    K = 1 << coder.k
    codewords = [coder.encode(x) for x in range(K)]
    D = {x: {codewords[x] ^ f.table[y] for y in cls.forge} for x in range(K)}
    alive = set(cls.forge)

    def retire(seed: int) -> int:
        if seed not in alive:
            return 0
        alive.discard(seed)
        for x in range(K):
            D[x].discard(codewords[x] ^ f.table[seed])
        return K

    Y, advice = [], {}
    while alive:
        y = min(alive)
        z = f.table[y]
        w, x_y = min((codewords[x] ^ z, x) for x in cls.unqueried[y])
        full = sorted(codewords[x_y] ^ v for v in f.table)
        a_y = full.index(w) + 1
        retire(y)
        Y.append(y)
        trace = run_traced(_forger_program(coder, w), env.answer,
                           stop=lambda q, tr: q.kind == MEMBER and q.arg == z)
        if not trace.halted:
            raise SimulationStuck(f"forger never asked M about f({y})")
        if trace.total > coder.q:
            raise ParameterError(f"{coder.name} forger made {trace.total} queries, budget {coder.q}")
        b_y = len(trace.m_queries)
        advice[y] = (x_y, a_y, b_y)
        removed = 0
        for s in trace.s_queries:
            removed += retire(s)
        for v in trace.m_queries[:-1]:
            if v in inverse and inverse[v] in cls.forge:
                removed += retire(inverse[v])
        while removed < (coder.q - 1) * K and alive:
            w_min, x_min = min((codewords[x] ^ f.table[s], x) for s in alive for x in range(K))
            removed += retire(inverse[w_min ^ codewords[x_min]])
    Yset = set(Y)
    rest = {s: f.table[s] for s in range(1 << f.m) if s not in Yset}
    return FDescription("forgeable", f.m, f.n, coder.k, coder.q, Y=tuple(Y), rest=rest,
                        advice=advice)


def recover_forgeable(desc: FDescription, coder: TracedCoder) -> InjectiveMap:
    """Replay the forger on the ``a_y``-th word of ``D(x_y)`` for each ``y`` of ``Y``.

    ``D(x)`` is rebuilt by probing the decoder on every word with answers
    taken only from what is known so far: a word belongs to ``D(x)`` when
    the decoder's output on it is ``x``.  The probe is exact whenever the
    decoder reaches its verdict without consulting unknown table entries
    (true for a decoder with a hardwired lookup table); otherwise the replay
    fails with :class:`SimulationStuck` or recovers a wrong table.
    """
    if desc.variant != "forgeable":
        raise ValueError("not a forgeable description")
    table = dict(desc.rest)
    image = set(desc.rest.values())
    N = 1 << desc.n
    pure_outputs: dict[int, int | None] = {}

    class _Unknown(Exception):
        pass

    def answer(q: Query):
        if q.kind == MEMBER:
            return q.arg in image
        if q.arg in table:
            return table[q.arg]
        raise SimulationStuck(f"S query on unknown seed {q.arg}")

    def probe_answer(q: Query):
        if q.kind == SAMPLE and q.arg not in table:
            raise _Unknown
        return answer(q)

    def decoded(w: int):
        if w in pure_outputs:
            return pure_outputs[w]
        try:
            trace = run_traced(coder.decode(w), probe_answer)
        except _Unknown:
            return None
        if trace.total == 0:
            pure_outputs[w] = trace.output
        return trace.output

    for y in sorted(desc.Y):
        try:
            x_y, a_y, b_y = desc.advice[y]
        except KeyError:
            raise SimulationStuck(f"no advice for seed {y}") from None
        if not 1 <= b_y <= desc.q:
            raise SimulationStuck(f"advice index b_y={b_y} outside [1, {desc.q}]")
        words = [w for w in range(N) if decoded(w) == x_y]
        if not 1 <= a_y <= len(words):
            raise SimulationStuck(f"advice index a_y={a_y} outside D(x_y) of size {len(words)}")
        w = words[a_y - 1]
        trace = run_traced(_forger_program(coder, w), answer,
                           stop=lambda q, tr: q.kind == MEMBER and len(tr.m_queries) == b_y)
        if not trace.halted:
            raise SimulationStuck(f"replay for seed {y} made fewer than {b_y} M queries")
        z = trace.m_queries[-1]
        if z in image:
            raise SimulationStuck(f"recovered image {z:#x} for seed {y} is already taken")
        table[y] = z
        image.add(z)
    return _as_map(desc, table)


# -- ledger ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LedgerReport:
    variant: str
    size: int
    nominal_size: int
    items: tuple[tuple[str, float], ...]
    measured_space: int
    bound_space: int
    baseline_space: int

    @property
    def measured_bits(self) -> float:
        return math.log2(self.measured_space)

    @property
    def bound_bits(self) -> float:
        return math.log2(self.bound_space)

    @property
    def baseline_bits(self) -> float:
        return math.log2(self.baseline_space)

    @property
    def within_bound(self) -> bool:
        return self.measured_space <= self.bound_space

    @property
    def beats_baseline(self) -> bool:
        return self.measured_space < self.baseline_space

    def rows(self) -> list[tuple[str, str]]:
        out = [(name, f"{bits:.3f}") for name, bits in self.items]
        out += [
            ("measured", f"{self.measured_bits:.3f}"),
            ("bound", f"{self.bound_bits:.3f}"),
            ("full table", f"{self.baseline_bits:.3f}"),
            ("within bound", str(self.within_bound)),
        ]
        return out


def invertible_bound_space(n: int, m: int, c: int) -> int:
    """``C(N,c) C(M,c) C(N-c, M-c) (M-c)!`` as an exact integer."""
    N, M = 1 << n, 1 << m
    return math.comb(N, c) * math.comb(M, c) * math.comb(N - c, M - c) * math.factorial(M - c)


def forgeable_bound_space(n: int, m: int, k: int, q: int, d: int) -> int:
    """``C(M,d) C(N-d, M-d) (M-d)! 2^(d (k + m + ceil log2 q))``."""
    N, M = 1 << n, 1 << m
    log_q = (q - 1).bit_length()  # ceil(log2 q) for q >= 1
    return (math.comb(M, d) * math.comb(N - d, M - d) * math.factorial(M - d)
            * (1 << (d * (k + m + log_q))))


def full_table_space(n: int, m: int) -> int:
    """``C(N, M) M!``: all injective maps."""
    return math.perm(1 << n, 1 << m)


def description_ledger(desc: FDescription, eps_or_delta: float = 0.5) -> LedgerReport:
    """Itemised bit costs, the closed-form bound at the realised size, and the full-table cost."""
    M = 1 << desc.m
    size = desc.size
    nominal = math.floor(eps_or_delta * M / desc.q)
    if desc.variant == "invertible":
        bound = invertible_bound_space(desc.n, desc.m, size)
    else:
        bound = forgeable_bound_space(desc.n, desc.m, desc.k, desc.q, size)
    items = tuple((name, math.log2(space)) for name, space in desc.components())
    return LedgerReport(desc.variant, size, nominal, items, desc.space, bound,
                        full_table_space(desc.n, desc.m))


# -- reference coders ------------------------------------------------------------------


def _distinct_syndrome_code(f: InjectiveMap, k: int, seed) -> LinearCode:
    """Random ``[n, k]`` code under which the images of ``f`` have distinct syndromes."""
    rng = as_rng(seed)
    for _ in range(10_000):
        code = random_code(f.n, k, rng)
        syndromes = {code.syndrome_int(z) for z in f.table}
        if len(syndromes) == len(f.table):
            return code
    raise ParameterError(f"no [{f.n},{k}] code separates the support of f")


def enumerating_coder(f: InjectiveMap, k: int, seed=None) -> TracedCoder:
    """Decoder that asks ``S`` about every seed and keeps the one consistent candidate.

    Knows nothing about ``f`` beyond the choice of code; ``q = 2^m``.
    """
    code = _distinct_syndrome_code(f, k, seed)
    M = 1 << f.m

    def decode(w: int):
        hits = []
        for y in range(M):
            z = yield Query(SAMPLE, y)
            if code.syndrome_int(w ^ z) == 0:
                hits.append(z)
        if len(hits) != 1:
            return None
        return code.unencode_int(w ^ hits[0])

    return TracedCoder("enumerating", code, decode, M)


def inverse_table_coder(f: InjectiveMap, k: int, seed=None) -> TracedCoder:
    """Decoder with a hardwired syndrome -> seed table that asks ``S`` once; ``q = 1``."""
    code = _distinct_syndrome_code(f, k, seed)
    seed_of = {code.syndrome_int(z): y for y, z in enumerate(f.table)}

    def decode(w: int):
        y = seed_of.get(code.syndrome_int(w))
        if y is None:
            return None
        z = yield Query(SAMPLE, y)
        return code.unencode_int(w ^ z)

    return TracedCoder("inverse-table", code, decode, 1)


def lookup_table_coder(f: InjectiveMap, k: int, seed=None) -> TracedCoder:
    """Decoder with a hardwired syndrome -> error table and no oracle queries.

    The forgeable reduction adds one membership check, so ``q = 1``.
    """
    code = _distinct_syndrome_code(f, k, seed)
    error_of = {code.syndrome_int(z): z for z in f.table}

    def decode(w: int):
        e = error_of.get(code.syndrome_int(w))
        if e is None:
            return None
        return code.unencode_int(w ^ e)
        yield  # pragma: no cover - makes this a generator

    return TracedCoder("lookup-table", code, decode, 1)


# -- text format -------------------------------------------------------------------


def dumps_description(desc: FDescription) -> str:
    """Header line, then length-prefixed sections of hex words."""
    n, m, k = desc.n, desc.m, desc.k
    out = [f"fdesc {desc.variant} {m} {n} {k} {desc.q}"]

    def section(name: str, lines: list[str]):
        out.append(f"{name} {len(lines)}")
        out.extend(lines)

    if desc.variant == "invertible":
        section("T", [hex_word(z, n) for z in desc.T])
        section("B", [hex_word(y, m) for y in desc.B])
    else:
        section("Y", [hex_word(y, m) for y in desc.Y])
        section("advice", [f"{hex_word(y, m)} {hex_word(a[0], k)} {a[1]} {a[2]}"
                           for y, a in sorted(desc.advice.items())])
    section("rest", [f"{hex_word(y, m)} {hex_word(z, n)}" for y, z in sorted(desc.rest.items())])
    return "\n".join(out) + "\n"


def loads_description(text: str) -> FDescription:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty description")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "fdesc" or head[1] not in ("invertible", "forgeable"):
        raise FormatError(f"bad description header {lines[0]!r}")
    variant = head[1]
    m, n, k, q = (int(v) for v in head[2:])
    sections: dict[str, list[str]] = {}
    pos = 1
    while pos < len(lines):
        name, _, count = lines[pos].partition(" ")
        try:
            count = int(count)
        except ValueError:
            raise FormatError(f"bad section header {lines[pos]!r}") from None
        body = lines[pos + 1 : pos + 1 + count]
        if len(body) != count:
            raise FormatError(f"section {name} truncated")
        sections[name] = body
        pos += 1 + count
    rest = {}
    for ln in sections.get("rest", []):
        ys, zs = ln.split()
        rest[parse_hex_word(ys, m)] = parse_hex_word(zs, n)
    if variant == "invertible":
        T = tuple(parse_hex_word(t, n) for t in sections.get("T", []))
        B = tuple(parse_hex_word(t, m) for t in sections.get("B", []))
        return FDescription(variant, m, n, k, q, T=T, B=B, rest=rest)
    Y = tuple(parse_hex_word(t, m) for t in sections.get("Y", []))
    advice = {}
    for ln in sections.get("advice", []):
        ys, xs, a, b = ln.split()
        advice[parse_hex_word(ys, m)] = (parse_hex_word(xs, k), int(a), int(b))
    return FDescription(variant, m, n, k, q, Y=Y, rest=rest, advice=advice)
