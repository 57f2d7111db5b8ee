import json
import math

import numpy as np
import pytest

from samplable_ecc.codes import random_code
from samplable_ecc.decoders import brute_force_decoder, subspace_decoder
from samplable_ecc.errors import ConfigError, ParameterError
from samplable_ecc.gf2 import BitVector
from samplable_ecc.lab import (
    ErrorEstimate,
    converse_holds,
    converse_max_rate,
    estimate_error,
    parse_config,
    rand_bound,
    run_experiment,
    wilson,
)
from samplable_ecc.sources import InjectiveMap, codeword_flat, flat_from_map, subspace_source


# -- bounds ----------------------------------------------------------------------


def test_rand_bound_examples():
    assert rand_bound(24, 10, 6) == 2**-8
    assert rand_bound(20, 10, 10) == 1
    assert rand_bound(20, 10, 4) == 2**-6
    with pytest.raises(ParameterError):
        rand_bound(10, 6, 5)


def test_converse_examples():
    assert converse_max_rate(20, 5, 0) == pytest.approx(1 - 5 / 20)
    assert converse_max_rate(20, 5, 0.5) == pytest.approx(1 - 5 / 20 + 1 / 20)
    with pytest.raises(ParameterError):
        converse_max_rate(20, 5, 1)
    assert converse_holds(10, 9, 5, 1.0)  # vacuous


def test_converse_matches_counting_argument():
    # k/n <= 1 - m/n + log2(1/(1-eps))/n  <=>  (1-eps) 2^m 2^k <= 2^n
    for n, m, k, eps in [(10, 4, 6, 0.0), (10, 4, 7, 0.5), (10, 4, 7, 0.4), (12, 3, 9, 0.0)]:
        counting = (1 - eps) * 2**m * 2**k <= 2**n
        assert converse_holds(n, k, m, eps) == counting


# -- Wilson interval -----------------------------------------------------------------


def test_wilson_known_values():
    # reference values from the closed form, computed by hand
    lo, hi = wilson(0, 10)
    assert lo == 0 and hi == pytest.approx(0.27753, abs=1e-5)
    lo, hi = wilson(5, 10)
    assert lo == pytest.approx(0.23659, abs=1e-5) and hi == pytest.approx(0.76341, abs=1e-5)


def test_wilson_coverage_by_simulation():
    rng = np.random.default_rng(0)
    p, trials, reps = 0.1, 200, 2000
    hits = 0
    for f in rng.binomial(trials, p, size=reps):
        lo, hi = wilson(int(f), trials)
        hits += lo <= p <= hi
    assert 0.93 <= hits / reps <= 0.97


def test_error_estimate_invariants():
    with pytest.raises(ValueError):
        ErrorEstimate(5, 3)
    est = ErrorEstimate(0, 100)
    assert est.p_hat == 0 and 0 <= est.ci95[0] <= est.ci95[1] <= 1


# -- estimator ----------------------------------------------------------------------


def test_subspace_estimate_is_zero():
    basis = [BitVector(14, v) for v in (0b11000000000011, 0b00110000001100, 0b00001111000000)]
    dec = subspace_decoder(basis, 14)
    src = subspace_source(basis)
    for trials in (0, 7):
        est = estimate_error(dec.code, dec, src, trials=trials, seed=1)
        assert est.failures == 0
    est = estimate_error(dec.code, dec, src, trials=500, seed=1, message_policy="uniform-sampled")
    assert est.failures == 0 and est.trials == 500


def test_estimate_exhaustive_matches_loop_oracle():
    rng = np.random.default_rng(5)
    code = random_code(16, 6, rng)
    f = InjectiveMap.random(5, 16, rng)
    dec = brute_force_decoder(code, flat_from_map(f))
    est = estimate_error(code, dec, flat_from_map(f), trials=0, seed=0)
    fails = [0] * 64
    for x in range(64):
        for z in f.table:
            fails[x] += dec.decode_int(code.encode_int(x) ^ z) != x
    assert est.failures == sum(fails) and est.trials == 64 * 32
    assert est.per_message == tuple(c / 32 for c in fails)
    assert est.exhaustive


def test_estimate_is_deterministic_and_order_free():
    rng = np.random.default_rng(6)
    code = random_code(18, 8, rng)
    src = flat_from_map(InjectiveMap.random(9, 18, rng))
    dec = brute_force_decoder(code, src)
    a = estimate_error(code, dec, src, trials=3000, seed=42, message_policy="uniform-sampled")
    b = estimate_error(code, dec, src, trials=3000, seed=42, message_policy="uniform-sampled")
    assert a == b
    # a prefix of the trials is the same experiment: trial t depends only on (seed, t)
    c = estimate_error(code, dec, src, trials=1000, seed=42, message_policy="uniform-sampled")
    assert c.failures <= a.failures


def test_linear_source_max_message_failure_at_least_half():
    code = random_code(14, 6, 3)
    src = codeword_flat(code, 4)
    est = estimate_error(code, brute_force_decoder(code, src), src, trials=0, seed=0)
    assert est.max_message >= 0.5


def test_estimator_rejects_bad_policy():
    code = random_code(8, 3, 0)
    src = codeword_flat(code, 1)
    with pytest.raises(ParameterError):
        estimate_error(code, brute_force_decoder(code, src), src, trials=0, seed=0, message_policy="some")


# -- configs ---------------------------------------------------------------------------


def test_parse_config_basic():
    cfg = parse_config("# comment\nscenario = rand-ensemble\nn = 24\nk = 10  # trailing\nm = 6\n")
    assert (cfg.n, cfg.k, cfg.m, cfg.codes, cfg.trials) == (24, 10, 6, 100, 0)
    assert cfg.source == "flat-random" and cfg.decoder == "brute-force"


def test_unknown_key_names_key_and_line():
    with pytest.raises(ConfigError) as info:
        parse_config("scenario = rand-ensemble\nn = 24\nblock = 3\n")
    assert info.value.key == "block" and info.value.line == 3
    assert "block" in str(info.value) and "line 3" in str(info.value)


@pytest.mark.parametrize("text, key", [
    ("scenario = rand-ensemble\nn = 24\nk = x\nm = 6\n", "k"),
    ("scenario = rand-ensemble\nn = 24\nk = 30\nm = 6\n", "k"),
    ("scenario = nope\nn = 24\n", "scenario"),
    ("scenario = rand-ensemble\nn = 24\nk = 10\nm = 6\nm = 7\n", "m"),
    ("scenario = subspace-exact\nn = 16\nm = 6\nk = 9\n", "k"),
    ("scenario = rand-ensemble\nn = 24\nk = 10\nm = 6\nsource = prg\n", "source"),
    ("scenario = prg-distinguisher\nn = 24\nk = 10\nm = 6\ntrials = 0\n", "trials"),
    ("scenario = rand-ensemble\nn = 24\nk = 10\nm = 6\nmessage_policy = some\n", "message_policy"),
    ("scenario = linear-adversarial\nn = 16\nk = 3\nm = 4\n", "m"),
    ("scenario = rand-ensemble\nn = 24\nk = 10\nm = 6\nseed = -1\n", "seed"),
])
def test_invalid_configs(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key


def test_missing_equals_sign():
    with pytest.raises(ConfigError) as info:
        parse_config("scenario rand-ensemble\n")
    assert info.value.line == 1


# -- experiments -----------------------------------------------------------------------


def test_subspace_exact_report():
    report = run_experiment(parse_config("scenario = subspace-exact\nn = 12\nm = 4\nseed = 3\n"))
    d = report.data
    assert d["p_hat"] == 0 and report.passed
    assert {a["name"] for a in d["assertions"]} == {"zero_failures", "rate_converse"}
    assert set(d) >= {"scenario", "params", "p_hat", "ci95", "bound", "assertions"}


def test_rand_ensemble_report_small():
    cfg = parse_config("scenario = rand-ensemble\nn = 16\nk = 6\nm = 4\ncodes = 10\nseed = 2\n")
    report = run_experiment(cfg)
    names = {a["name"]: a["pass"] for a in report.data["assertions"]}
    assert names["failures_equal_ambiguous_mass"] and names["rate_converse"]
    assert report.data["bound"] == 2**-6
    assert len(report.rows) == 10
    assert report.to_csv().splitlines()[0] == "code,failures,trials,p_hat,ambiguous_fraction"


def test_linear_adversarial_report():
    report = run_experiment(parse_config("scenario = linear-adversarial\nn = 12\nk = 6\nm = 4\n"))
    assert report.passed and report.data["max_message_p_hat"] >= 0.5


def test_flat_brute_with_uniform_source_fails_everything():
    report = run_experiment(parse_config("scenario = flat-brute\nsource = uniform\nn = 10\nk = 4\nm = 10\n"))
    # every syndrome class holds 2^k support points; all ambiguous
    assert report.data["p_hat"] == 1 and report.passed  # the rate converse is vacuous at eps = 1


def test_reports_are_byte_identical():
    text = "scenario = prg-distinguisher\nn = 20\nk = 8\nm = 5\ntrials = 500\nseed = 9\n"
    a = run_experiment(parse_config(text)).to_json()
    b = run_experiment(parse_config(text)).to_json()
    assert a == b
    assert json.loads(a)["params"]["seed"] == 9


def test_different_seeds_give_different_reports():
    base = "scenario = rand-ensemble\nn = 16\nk = 6\nm = 4\ncodes = 5\nseed = {}\n"
    a = run_experiment(parse_config(base.format(1))).rows
    b = run_experiment(parse_config(base.format(2))).rows
    assert a != b or math.isclose(a[0]["p_hat"], b[0]["p_hat"])


def test_newcombe_difference_reference_example():
    # published worked example: 56/70 vs 48/80 gives (0.0524, 0.3339)
    from samplable_ecc.stats import newcombe_difference

    lo, hi = newcombe_difference(56, 70, 48, 80)
    assert lo == pytest.approx(0.0524, abs=1e-4) and hi == pytest.approx(0.3339, abs=1e-4)


def test_newcombe_difference_is_not_degenerate_at_the_boundary():
    from samplable_ecc.stats import newcombe_difference

    lo, hi = newcombe_difference(50, 50, 0, 50)
    # at p = 1 the Wilson lower limit is n / (n + z^2); both sides contribute equally
    z2 = 1.959963984540054**2
    assert hi == 1.0
    assert lo == pytest.approx(1 - math.sqrt(2) * (1 - 50 / (50 + z2)))
    assert lo < 0.9


def test_large_ensemble_mean_within_3_sigma_of_rand_bound():
    cfg = parse_config("scenario = rand-ensemble\nn = 16\nk = 6\nm = 4\ncodes = 2000\nseed = 11\n")
    report = run_experiment(cfg)
    d = report.data
    assert d["bound"] == 2**-6
    assert d["p_hat"] <= d["bound"] + 3 * d["ensemble_sigma"]
