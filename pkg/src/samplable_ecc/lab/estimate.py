"""Deterministic Monte Carlo and exhaustive failure estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..codes import LinearCode
from ..decoders import Outcome, SyndromeDecoder
from ..errors import ParameterError
from ..sources import ErrorSource
from ..stats import wilson

POLICIES = ("all", "uniform-sampled")


@dataclass(frozen=True)
class ErrorEstimate:
    failures: int
    trials: int
    # per-message failure rates, only filled for the "all" policy
    per_message: tuple[float, ...] = ()
    exhaustive: bool = False

    def __post_init__(self):
        if not 0 <= self.failures <= self.trials:
            raise ValueError("failures must lie in [0, trials]")

    @property
    def p_hat(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson(self.failures, self.trials)

    @property
    def max_message(self) -> float | None:
        return max(self.per_message) if self.per_message else None


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for one trial, keyed by (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _decode_many(code: LinearCode, decoder, words: np.ndarray) -> np.ndarray:
    """Decoded messages as an int64 array, -1 where decoding gave up."""
    if isinstance(decoder, SyndromeDecoder) and code.n <= 64 and decoder.code.redundancy <= 64:
        msgs, ok = decoder.decode_batch(words.astype(np.uint64))
        out = msgs.astype(np.int64)
        out[~ok] = -1
        return out
    out = np.empty(len(words), dtype=np.int64)
    decode = getattr(decoder, "decode_int", None)
    for i, y in enumerate(words.tolist()):
        r = decode(int(y)) if decode else decoder(int(y))
        out[i] = -1 if isinstance(r, Outcome) or r is None else int(r)
    return out


def estimate_error(code: LinearCode, decoder, source: ErrorSource, *, trials: int, seed: int,
                   message_policy: str = "all") -> ErrorEstimate:
    """Count ``Dec(Enc(x) + z) != x``; Ambiguous, NoMatch and NotFound are failures.

    ``message_policy = "all"`` runs every message: with ``trials = 0`` each
    message is paired with every support point (exact, needs an enumerable
    source), otherwise with ``trials`` sampled errors.  ``"uniform-sampled"``
    draws ``trials`` (message, error) pairs.  Trial ``t`` uses
    :func:`trial_rng` ``(seed, t)``, so the result does not depend on
    evaluation order.
    """
    if source.n != code.n:
        raise ParameterError(f"source has n={source.n}, code has n={code.n}")
    if message_policy not in POLICIES:
        raise ParameterError(f"unknown message policy {message_policy!r}")
    K = 1 << code.k
    codewords = np.array(code.codewords(), dtype=np.uint64) if code.n <= 64 else None
    if codewords is None:
        raise ParameterError("estimator supports n <= 64")

    if message_policy == "uniform-sampled":
        if trials <= 0:
            raise ParameterError("uniform-sampled policy needs trials > 0")
        xs = np.empty(trials, dtype=np.int64)
        zs = np.empty(trials, dtype=np.uint64)
        for t in range(trials):
            rng = trial_rng(seed, t)
            xs[t] = rng.integers(K)
            zs[t] = source.sample_int(rng)
        out = _decode_many(code, decoder, codewords[xs] ^ zs)
        return ErrorEstimate(int(np.count_nonzero(out != xs)), trials)

    if trials == 0:
        support = np.array(source.support_ints(), dtype=np.uint64)
        per = len(support)
        xs = np.repeat(np.arange(K, dtype=np.int64), per)
        words = np.repeat(codewords, per) ^ np.tile(support, K)
        exhaustive = True
    else:
        per = trials
        xs = np.repeat(np.arange(K, dtype=np.int64), per)
        zs = np.empty(K * per, dtype=np.uint64)
        for t in range(K * per):
            zs[t] = source.sample_int(trial_rng(seed, t))
        words = codewords[xs] ^ zs
        exhaustive = False
    wrong = (_decode_many(code, decoder, words) != xs).reshape(K, per)
    counts = wrong.sum(axis=1)
    return ErrorEstimate(int(counts.sum()), K * per,
                         tuple(float(c) / per for c in counts.tolist()), exhaustive)
