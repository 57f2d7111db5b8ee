"""Experiment configs, scenarios and JSON reports.

A config is flat ``key = value`` text (``#`` starts a comment)::

    scenario = rand-ensemble
    n = 24
    k = 10
    m = 6
    seed = 0

Every random object in a run is drawn from a generator keyed by the master
seed plus a fixed purpose label, so a config always produces the same
report, byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..codes import LinearCode, encode, random_code
from ..decoders import (
    HashDecoder,
    brute_force_decoder,
    build_hash_decoder,
    collision_set,
    constant_failure_decoder,
    distinguisher_from_decoder,
    subspace_decoder,
)
from ..errors import ConfigError, SamplableEccError
from ..gf2 import BitVector, random_matrix, rank
from ..sources import (
    InjectiveMap,
    codeword_flat,
    flat_from_map,
    prg_source,
    subspace_source,
    uniform_source,
    xorshift_expander,
)
from .bounds import converse_holds, converse_max_rate, distinguisher_floor, hash_failure_bound, rand_bound
from .estimate import POLICIES, ErrorEstimate, estimate_error, trial_rng, wilson

INT_KEYS = ("n", "k", "m", "c", "trials", "seed", "codes")
STR_KEYS = ("scenario", "source", "decoder", "message_policy")
KEYS = INT_KEYS + STR_KEYS

# scenario -> (default source, allowed sources, default decoder, allowed decoders)
SCENARIOS = {
    "subspace-exact": ("subspace", {"subspace"}, "subspace", {"subspace"}),
    "rand-ensemble": ("flat-random", {"flat-random"}, "brute-force", {"brute-force"}),
    "linear-adversarial": ("codeword-flat", {"codeword-flat"}, "brute-force", {"brute-force"}),
    "prg-distinguisher": ("prg", {"prg"}, "brute-force", {"brute-force"}),
    "hash-decoder": ("flat-map", {"flat-map"}, "hash", {"hash"}),
    "flat-brute": ("flat-random",
                   {"flat-random", "subspace", "codeword-flat", "prg", "uniform"},
                   "brute-force", {"brute-force"}),
}

DEFAULTS = {
    "subspace-exact": {"trials": 0, "message_policy": "all"},
    "rand-ensemble": {"trials": 0, "message_policy": "all", "codes": 100},
    "linear-adversarial": {"trials": 0, "message_policy": "all"},
    "prg-distinguisher": {"trials": 10_000, "message_policy": "uniform-sampled"},
    "hash-decoder": {"trials": 64, "message_policy": "uniform-sampled", "c": 1, "codes": 200},
    "flat-brute": {"trials": 0, "message_policy": "all"},
}


@dataclass
class ExperimentConfig:
    scenario: str
    n: int
    k: int | None = None
    m: int = 0
    c: int = 1
    source: str = ""
    decoder: str = ""
    trials: int = 0
    seed: int = 0
    message_policy: str = "all"
    codes: int = 1
    lines: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def params(self) -> dict:
        return {key: getattr(self, key) for key in KEYS}

    def fail(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, key=key, line=self.lines.get(key))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate ``key = value`` text; errors name the key and line."""
    raw: dict[str, str] = {}
    lines: dict[str, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {body!r}", line=number)
        if key not in KEYS:
            raise ConfigError(f"unknown key (known: {', '.join(KEYS)})", key=key, line=number)
        if key in raw:
            raise ConfigError("duplicate key", key=key, line=number)
        raw[key] = value
        lines[key] = number
    return build_config(raw, lines)


def build_config(raw: dict[str, object], lines: dict[str, int] | None = None) -> ExperimentConfig:
    lines = lines or {}

    def fail(key, message):
        return ConfigError(message, key=key, line=lines.get(key))

    if "scenario" not in raw:
        raise ConfigError("missing required key", key="scenario")
    scenario = str(raw["scenario"])
    if scenario not in SCENARIOS:
        raise fail("scenario", f"unknown scenario {scenario!r} (known: {', '.join(SCENARIOS)})")
    values: dict[str, object] = dict(DEFAULTS[scenario])
    for key, value in raw.items():
        if key in INT_KEYS:
            try:
                values[key] = int(value)
            except (TypeError, ValueError):
                raise fail(key, f"expected an integer, got {value!r}") from None
        elif key in STR_KEYS:
            values[key] = str(value)
        else:
            raise fail(key, "unknown key")
    if "n" not in values:
        raise ConfigError("missing required key", key="n")
    src_default, src_allowed, dec_default, dec_allowed = SCENARIOS[scenario]
    values.setdefault("source", src_default)
    values.setdefault("decoder", dec_default)
    cfg = ExperimentConfig(lines=lines, **values)

    if cfg.source not in src_allowed:
        raise cfg.fail("source", f"{scenario} supports sources {sorted(src_allowed)}")
    if cfg.decoder not in dec_allowed:
        raise cfg.fail("decoder", f"{scenario} supports decoders {sorted(dec_allowed)}")
    if cfg.message_policy not in POLICIES:
        raise cfg.fail("message_policy", f"expected one of {POLICIES}")
    if cfg.n < 2 or cfg.n > 64:
        raise cfg.fail("n", "need 2 <= n <= 64")
    if not 0 <= cfg.m <= cfg.n:
        raise cfg.fail("m", "need 0 <= m <= n")
    if cfg.trials < 0:
        raise cfg.fail("trials", "need trials >= 0")
    if cfg.message_policy == "uniform-sampled" and cfg.trials == 0:
        raise cfg.fail("trials", "uniform-sampled policy needs trials > 0")
    if cfg.codes < 1:
        raise cfg.fail("codes", "need codes >= 1")
    if cfg.seed < 0:
        raise cfg.fail("seed", "need seed >= 0")
    if cfg.c < 1:
        raise cfg.fail("c", "need c >= 1")

    if scenario == "subspace-exact":
        if cfg.k is None:
            cfg.k = cfg.n - cfg.m
        elif cfg.k != cfg.n - cfg.m:
            raise cfg.fail("k", f"subspace code has k = n - m = {cfg.n - cfg.m}")
    elif scenario == "hash-decoder":
        L = cfg.m + 2 * cfg.c * math.ceil(math.log2(cfg.n))
        if cfg.k is None:
            cfg.k = cfg.n - L
        elif cfg.k != cfg.n - L:
            raise cfg.fail("k", f"hash code has k = n - (m + 2c ceil(log2 n)) = {cfg.n - L}")
    elif cfg.k is None:
        raise ConfigError("missing required key", key="k")
    if not 0 < cfg.k < cfg.n:
        raise cfg.fail("k", f"need 0 < k < n, got k={cfg.k}, n={cfg.n}")
    if cfg.k > 20:
        raise cfg.fail("k", "message length above 20 bits is not supported")
    if cfg.source == "codeword-flat" and not 1 <= cfg.m <= cfg.k:
        raise cfg.fail("m", "codeword-flat source needs 1 <= m <= k")
    if cfg.message_policy == "all" and cfg.trials == 0 and cfg.source == "uniform" and cfg.n > 20:
        raise cfg.fail("trials", "exhaustive run over a uniform source needs n <= 20")
    return cfg


# -- helpers -----------------------------------------------------------------


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator keyed by the master seed and a purpose label."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# purpose labels for derived_rng
_SUPPORT, _CODE, _BASIS, _MAP, _HASH, _DRAWS, _ESTIMATE, _DIST = range(8)


def random_basis(rng: np.random.Generator, m: int, n: int) -> list[BitVector]:
    while True:
        B = random_matrix(rng, m, n)
        if rank(B) == m:
            return B.row_vectors()


def flat_entropy(source) -> float:
    """``log2 |support|`` when the support is known, else the declared entropy."""
    if source.enumerable:
        return math.log2(len(source.support_ints()))
    return source.entropy()


def _make_source(cfg: ExperimentConfig, code: LinearCode | None):
    n, m, seed = cfg.n, cfg.m, cfg.seed
    kind = cfg.source
    if kind in ("flat-random", "flat-map"):
        return flat_from_map(InjectiveMap.random(m, n, derived_rng(seed, _SUPPORT)))
    if kind == "subspace":
        return subspace_source(random_basis(derived_rng(seed, _BASIS), m, n), n)
    if kind == "codeword-flat":
        return codeword_flat(code, m)
    if kind == "prg":
        if m >= n:
            raise cfg.fail("m", "prg seed length must be below n")
        src = prg_source(xorshift_expander(m, n, key=seed), m, n)
        if not src.enumerable:
            raise cfg.fail("m", "prg image is not flat; brute force needs an enumerable source")
        return src
    if kind == "uniform":
        return uniform_source(n)
    raise cfg.fail("source", f"unknown source {kind!r}")


def _assertion(name: str, ok: bool) -> dict:
    return {"name": name, "pass": bool(ok)}


def _rate_converse(cfg_n: int, k: int, m: float, est: ErrorEstimate) -> dict:
    return _assertion("rate_converse", converse_holds(cfg_n, k, m, est.ci95[1]))


def _estimate_fields(est: ErrorEstimate, policy: str) -> dict:
    out = {
        "failures": est.failures,
        "trials": est.trials,
        "p_hat": est.p_hat,
        "ci95": list(est.ci95),
        "message_policy": policy,
        "exhaustive": est.exhaustive,
    }
    if est.per_message:
        out["max_message_p_hat"] = est.max_message
        out["mean_p_hat"] = est.p_hat
    return out


@dataclass
class Report:
    data: dict
    rows: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a["pass"] for a in self.data["assertions"])

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


# -- scenarios ------------------------------------------------------------------


def _run_single(cfg: ExperimentConfig) -> Report:
    """subspace-exact, linear-adversarial, flat-brute."""
    if cfg.scenario == "subspace-exact":
        basis = random_basis(derived_rng(cfg.seed, _BASIS), cfg.m, cfg.n)
        decoder = subspace_decoder(basis, cfg.n)
        code = decoder.code
        source = subspace_source(basis, cfg.n)
    else:
        code = random_code(cfg.n, cfg.k, derived_rng(cfg.seed, _CODE))
        source = _make_source(cfg, code)
        decoder = brute_force_decoder(code, source)
    est = estimate_error(code, decoder, source, trials=cfg.trials,
                         seed=_trial_seed(cfg.seed, _ESTIMATE),
                         message_policy=cfg.message_policy)
    m_eff = flat_entropy(source)
    data = {"scenario": cfg.scenario, "params": cfg.params(), **_estimate_fields(est, cfg.message_policy)}
    data["source_entropy"] = m_eff
    assertions = []
    if cfg.scenario == "subspace-exact":
        data["bound"] = 0.0
        assertions.append(_assertion("zero_failures", est.failures == 0))
    elif cfg.scenario == "linear-adversarial":
        data["bound"] = 0.5
        worst = est.max_message if est.per_message else est.p_hat
        assertions.append(_assertion("max_message_failure_ge_half", worst >= 0.5))
    else:
        gap = cfg.n - cfg.k - m_eff
        data["bound"] = 2.0**-gap if gap >= 0 else None
    if hasattr(decoder, "table"):
        data["ambiguous_mass"] = decoder.table.ambiguous_mass()
    data["converse_max_rate"] = _converse(cfg.n, m_eff, est)
    assertions.append(_rate_converse(cfg.n, code.k, m_eff, est))
    data["assertions"] = assertions
    return Report(data)


def _converse(n: int, m: float, est: ErrorEstimate):
    upper = est.ci95[1]
    return converse_max_rate(n, m, upper) if upper < 1 else None


def _run_ensemble(cfg: ExperimentConfig) -> Report:
    source = _make_source(cfg, None)
    M = len(source.support_ints())
    bound = rand_bound(cfg.n, cfg.k, cfg.m)
    rows, rates = [], []
    total_fail = total_trials = 0
    exact_accounting = converse_ok = True
    for i in range(cfg.codes):
        code = random_code(cfg.n, cfg.k, derived_rng(cfg.seed, _CODE, i))
        decoder = brute_force_decoder(code, source)
        est = estimate_error(code, decoder, source, trials=cfg.trials,
                             seed=_trial_seed(cfg.seed, _ESTIMATE, i),
                             message_policy=cfg.message_policy)
        ambiguous = decoder.table.ambiguous_mass()
        if est.exhaustive:
            # failures are exactly the (message, ambiguous support point) pairs
            exact_accounting &= est.failures == ambiguous * (1 << cfg.k)
        converse_ok &= converse_holds(cfg.n, cfg.k, cfg.m, est.ci95[1])
        total_fail += est.failures
        total_trials += est.trials
        rates.append(est.p_hat)
        rows.append({"code": i, "failures": est.failures, "trials": est.trials,
                     "p_hat": est.p_hat, "ambiguous_fraction": ambiguous / M})
    mean = float(np.mean(rates))
    sigma = float(np.std(rates, ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else 0.0
    lo, hi = wilson(total_fail, total_trials)
    data = {
        "scenario": cfg.scenario,
        "params": cfg.params(),
        "p_hat": mean,
        "ci95": [lo, hi],
        "bound": bound,
        "failures": total_fail,
        "trials": total_trials,
        "message_policy": cfg.message_policy,
        "ensemble_sigma": sigma,
        "codes": cfg.codes,
        "assertions": [
            _assertion("ensemble_mean_le_rand_bound", mean <= bound),
            _assertion("ensemble_mean_within_3sigma_of_bound", mean <= bound + 3 * sigma),
        ],
    }
    if cfg.trials == 0:
        data["assertions"].append(_assertion("failures_equal_ambiguous_mass", exact_accounting))
    data["assertions"].append(_assertion("rate_converse", converse_ok))
    return Report(data, rows)


def _trial_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=key).generate_state(1)[0])


def _run_prg(cfg: ExperimentConfig) -> Report:
    code = random_code(cfg.n, cfg.k, derived_rng(cfg.seed, _CODE))
    source = _make_source(cfg, code)
    decoder = brute_force_decoder(code, source)
    est = estimate_error(code, decoder, source, trials=cfg.trials,
                         seed=_trial_seed(cfg.seed, _ESTIMATE), message_policy=cfg.message_policy)

    def enc(x: BitVector) -> BitVector:
        return encode(code, x)

    dist_seed = _trial_seed(cfg.seed, _DIST)
    real = distinguisher_from_decoder(enc, decoder, source, cfg.k, cfg.trials, dist_seed)
    dummy = distinguisher_from_decoder(enc, constant_failure_decoder, source, cfg.k, cfg.trials,
                                       dist_seed)
    m_eff = flat_entropy(source)
    data = {
        "scenario": cfg.scenario,
        "params": cfg.params(),
        **_estimate_fields(est, cfg.message_policy),
        "bound": distinguisher_floor(est.p_hat, cfg.k),
        "advantage": real.advantage,
        "advantage_half_width": real.half_width,
        "accept_source": real.accept_source,
        "accept_uniform": real.accept_uniform,
        "constant_failure_advantage": dummy.advantage,
        "converse_max_rate": _converse(cfg.n, m_eff, est),
        "assertions": [
            _assertion("decoder_error_le_0.05", est.p_hat <= 0.05),
            _assertion("advantage_ge_0.9", real.advantage >= 0.9),
            _assertion("advantage_half_width_le_0.02", real.half_width <= 0.02),
            _assertion("constant_failure_advantage_le_0.02", abs(dummy.advantage) <= 0.02),
            _rate_converse(cfg.n, cfg.k, m_eff, est),
        ],
    }
    return Report(data)


def _run_hash(cfg: ExperimentConfig) -> Report:
    n, m, c = cfg.n, cfg.m, cfg.c
    f = InjectiveMap.random(m, n, derived_rng(cfg.seed, _MAP))
    hd: HashDecoder = build_hash_decoder(f, c, derived_rng(cfg.seed, _HASH))
    code = hd.code
    K, M = 1 << code.k, 1 << m
    # every seed, each paired with `trials` sampled messages
    xs = np.empty(M * cfg.trials, dtype=np.int64)
    zs = np.empty(M * cfg.trials, dtype=np.uint64)
    est_seed = _trial_seed(cfg.seed, _ESTIMATE)
    codewords = np.array(code.codewords(), dtype=np.uint64)
    for y in range(M):
        for j in range(cfg.trials):
            t = y * cfg.trials + j
            xs[t] = trial_rng(est_seed, t).integers(K)
            zs[t] = f.table[y]
    msgs, ok = hd.decode_batch(codewords[xs] ^ zs)
    wrong = ~ok | (msgs.astype(np.int64) != xs)
    est = ErrorEstimate(int(wrong.sum()), len(xs))
    bound = hash_failure_bound(n, c)

    threshold = M / n**c
    L = hd.h0.rows
    draw_rng = derived_rng(cfg.seed, _DRAWS)
    rows, bad = [], 0
    for i in range(cfg.codes):
        h = random_matrix(draw_rng, L, n)
        size = len(collision_set(f, h))
        bad += size > threshold
        rows.append({"draw": i, "collisions": size, "good": size <= threshold})
    markov = 1 / n**c
    frac = bad / cfg.codes
    sigma = math.sqrt(markov * (1 - markov) / cfg.codes)

    data = {
        "scenario": cfg.scenario,
        "params": cfg.params(),
        **_estimate_fields(est, cfg.message_policy),
        "bound": bound,
        "hash_rows": L,
        "hash_draws_until_good": hd.draws,
        "collisions": len(hd.collisions),
        "good_threshold": threshold,
        "bad_hash_fraction": frac,
        "bad_hash_limit": markov + 3 * sigma,
        "converse_max_rate": _converse(n, m, est),
        "assertions": [
            _assertion("chosen_hash_is_good", len(hd.collisions) <= threshold),
            _assertion("failure_le_3_over_n_to_c", est.p_hat <= bound),
            _assertion("bad_hash_fraction_within_markov", frac < markov + 3 * sigma),
            _rate_converse(n, code.k, m, est),
        ],
    }
    return Report(data, rows)


def run_experiment(cfg: ExperimentConfig) -> Report:
    """Build the scenario, run the estimator and bound checks, return the report."""
    runners = {
        "rand-ensemble": _run_ensemble,
        "prg-distinguisher": _run_prg,
        "hash-decoder": _run_hash,
    }
    try:
        return runners.get(cfg.scenario, _run_single)(cfg)
    except ConfigError:
        raise
    except SamplableEccError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
