"""Acceptance criteria 1-10, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines appear
inline) or ``python tests/test_acceptance.py``.
"""
import json
import random
import subprocess
import sys
from fractions import Fraction as F

import pytest

from catcrypt import corpus, io
from catcrypt.ensemble import (
    NegligibilityPolicy,
    ensemble_compose,
    identity_fn,
    random_ensemble,
    random_fn,
    rcompose,
    realizes,
    restrict,
)
from catcrypt.games import (
    OracleMismatch,
    check_ind_cpa_diagram,
    check_unique_decryption,
    deterministic_adversaries,
    ind_cca2_guess_prob,
    ind_cpa_advantage,
    ind_cpa_guess_prob,
    random_system,
)
from catcrypt.semiring import compose
from catcrypt.shannon import (
    check_sto_security,
    is_perfectly_secure_direct,
    posterior,
    random_system as random_shannon,
    underlying_dolev_yao,
)
from catcrypt.symbolic import (
    all_systems,
    check_decryption_condition,
    check_rel_security,
    is_algebraically_perfectly_secure,
    possible_plaintexts_constant,
    random_system as random_dy,
)

HALF = F(1, 2)
# fixtures built to violate decryption: the constant cipher, and two ensemble
# systems whose ciphertexts are (partly) random words
NEGATIVE_FIXTURES = {"dy-constant", "ind-noisy", "cca2-useless-oracle"}


@pytest.fixture
def verdict(capsys):
    def report(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return report


def bundled(prefix):
    return sorted(p for p in io.DATA_DIR.glob(f"{prefix}*.json"))


def test_criterion_1_decryption_condition(verdict):
    checked = []
    for p in bundled("dy-"):
        if p.stem in NEGATIVE_FIXTURES:
            continue
        checked.append((p.stem, check_decryption_condition(io.load_dolev_yao(p)).holds))
    for p in bundled("shannon-"):
        checked.append((p.stem, check_decryption_condition(underlying_dolev_yao(io.load_shannon(p))).holds))
    for p in bundled("ind-") + bundled("cca2-"):
        if p.stem in NEGATIVE_FIXTURES or "adversaries" in p.stem:
            continue
        checked.append((p.stem, check_unique_decryption(io.load_abstract(p)).holds))
    neg = check_decryption_condition(io.load_dolev_yao(io.resolve("dy-constant")))
    witness_ok = not neg.holds and {"k", "m"} <= set(neg.witness)
    negatives_fail = all(not check_unique_decryption(io.load_abstract(io.resolve(n))).holds
                         for n in ("ind-noisy", "cca2-useless-oracle"))
    ok = all(h for _, h in checked) and len(checked) == 14 and witness_ok and negatives_fail
    verdict(1, ok, f"{sum(h for _, h in checked)}/{len(checked)} bundled systems pass; constant cipher witness {neg.witness}")


def dy_sweep():
    rng = random.Random(2024)
    exhaustive = list(all_systems(2))
    randoms = [random_dy(3 + i % 2, rng) for i in range(200)]
    return exhaustive, randoms


def test_criterion_2_possible_plaintexts_equivalence(verdict):
    exhaustive, randoms = dy_sweep()
    bad = [s for s in exhaustive + randoms
           if is_algebraically_perfectly_secure(s).holds != possible_plaintexts_constant(s)]
    secure = sum(is_algebraically_perfectly_secure(s).holds for s in exhaustive + randoms)
    verdict(2, not bad and len(randoms) >= 200,
            f"{len(exhaustive)} exhaustive + {len(randoms)} random, {secure} secure, {len(bad)} disagreements")


def test_criterion_3_rel_diagram(verdict):
    exhaustive, randoms = dy_sweep()
    bad = [s for s in exhaustive + randoms
           if check_rel_security(s).passed != is_algebraically_perfectly_secure(s).holds]
    verdict(3, not bad, f"{len(exhaustive) + len(randoms)} systems, {len(bad)} disagreements")


def test_criterion_4_shannon(verdict):
    failures = []
    for n in (1, 2, 3):
        base = corpus.shannon_otp(n)
        a = base.carrier
        priors = {
            "uniform": None,
            "skewed": corpus.skewed(a),
            "point": {a.elements[-1]: 1},
        }
        for name, mu in priors.items():
            s = corpus.shannon_otp(n, mu)
            if not is_perfectly_secure_direct(s).holds:
                failures.append(f"otp-{n}/{name}")
    witnesses = {}
    for name, s in (("identity", corpus.shannon_identity()), ("fixed-key", corpus.shannon_fixed_key())):
        v = is_perfectly_secure_direct(s)
        if v.holds:
            failures.append(name)
            continue
        c, m = v.witness["c"], v.witness["m"]
        # the witness names a posterior that differs from the prior
        if posterior(s, c)[m] == s.mu[m] or F(v.witness["posterior"]) != posterior(s, c)[m]:
            failures.append(f"{name} witness")
        witnesses[name] = v.witness
    verdict(4, not failures, f"OTP n<=3 x 3 priors secure; insecure witnesses {witnesses}; failures {failures}")


def test_criterion_5_sto_diagram(verdict):
    rng = random.Random(7)
    systems = [random_shannon(2 + i % 3, rng) for i in range(120)]
    bad = [s for s in systems if check_sto_security(s).passed != is_perfectly_secure_direct(s).holds]
    secure = sum(is_perfectly_secure_direct(s).holds for s in systems)
    verdict(5, not bad, f"{len(systems)} systems with |A| <= 4, {secure} secure, {len(bad)} disagreements")


def test_criterion_6_monoid(verdict):
    rng = random.Random(11)
    bad = 0
    n = 150
    for _ in range(n):
        lens = [rng.randint(0, 2) for _ in range(4)]
        f = random_fn(rng.randint(0, 2), lens[0], lens[1], rng)
        g = random_fn(rng.randint(0, 2), lens[1], lens[2], rng)
        h = random_fn(rng.randint(0, 2), lens[2], lens[3], rng)
        assoc = rcompose(h, rcompose(g, f)) == rcompose(rcompose(h, g), f)
        unit = rcompose(identity_fn(f.out_len), f) == f == rcompose(f, identity_fn(f.in_len))
        bad += not (assoc and unit)
    verdict(6, bad == 0, f"{n} triples, every (seed, input) compared, {bad} violations")


def test_criterion_7_realization(verdict):
    rng = random.Random(13)
    bad = 0
    n = 60
    for _ in range(n):
        psi = random_ensemble(rng, 3, max_out=3)
        theta = random_ensemble(rng, 3, in_lens=[1, 2, 3], max_out=2)
        ok = realizes(psi.matrices(), psi).holds
        both = ensemble_compose(theta, psi)
        for level in psi.level_numbers:
            f = psi.at(level)
            lb = next(l for l in theta.level_numbers if theta.at(l).in_len >= f.out_len)
            g = restrict(theta.at(lb), f.out_len)
            ok = ok and both.at(level).matrix() == compose(f.matrix(), g.matrix())
        bad += not ok
    verdict(7, bad == 0, f"{n} random 3-level ensembles, {bad} mismatches")


def criterion_8_diagram_agreement():
    """Per-adversary diagram verdicts against |Pr[guess] - 1/2| <= t(l), and
    the all-adversary verdict against the enumerated maximum."""
    rng = random.Random(17)
    policies = [NegligibilityPolicy(2), NegligibilityPolicy(2, strict=True), NegligibilityPolicy(2, "0")]
    compared = mismatches = 0
    for i in range(12):
        level = 1 + i % 2
        sys_ = random_system(rng, 1, 1, 1, level=level)
        best = ind_cpa_advantage(sys_, level).advantage
        advs = [a for a, *_ in deterministic_adversaries(sys_, level)]
        probs = [ind_cpa_guess_prob(sys_, a, level) for a in advs]
        for pol in policies:
            rep = check_ind_cpa_diagram(sys_, advs, pol, [level])
            per_adv = {r.lhs.split("@")[0]: r.equal for r in rep.results}
            for a, p in zip(advs, probs):
                compared += 1
                mismatches += per_adv[a.name] != pol.close(level, abs(p - HALF), 0)
            compared += 1
            mismatches += rep.passed != pol.close(level, best, 0)
    pol = NegligibilityPolicy(2)
    advs = corpus.cpa_adversaries(2)
    for sys_ in (corpus.otp_system(2), corpus.identity_system(2)):
        best = max(ind_cpa_advantage(sys_, l).advantage for l in (1, 2))
        rep = check_ind_cpa_diagram(sys_, advs, pol)
        worst = max(abs(ind_cpa_guess_prob(sys_, a, l) - HALF) for a in advs for l in (1, 2))
        compared += 1
        mismatches += rep.passed != all(pol.close(l, abs(ind_cpa_guess_prob(sys_, a, l) - HALF), 0)
                                        for a in advs for l in (1, 2))
        assert worst <= best
    return compared, mismatches


def test_criterion_8_ind_cpa(verdict):
    otp, ident, noisy = corpus.otp_system(5), corpus.identity_system(5), corpus.noisy_system(2)
    otp_adv = [ind_cpa_advantage(otp, l).advantage for l in range(1, 6)]
    id_adv = [ind_cpa_advantage(ident, l).advantage for l in range(1, 6)]
    rng = random.Random(19)
    tv_checked = 0
    try:
        small = [corpus.otp_system(2), corpus.identity_system(2), noisy]
        for s in small:
            for l in s.levels:
                r = ind_cpa_advantage(s, l)
                tv_checked += r.advantage == r.tv_advantage
        for i in range(40):
            kb, mb, cb = (1 + (i >> j) % 2 for j in range(3))
            r = ind_cpa_advantage(random_system(rng, kb, mb, cb), 1)
            tv_checked += r.advantage == r.tv_advantage
        tv_ok = tv_checked == 6 + 40
    except OracleMismatch as e:
        tv_ok = False
        print(e)
    compared, mismatches = criterion_8_diagram_agreement()
    ok = all(a == 0 for a in otp_adv) and all(a == HALF for a in id_adv) and tv_ok and mismatches == 0
    verdict(8, ok, f"otp max advantage {[str(a) for a in otp_adv]}, identity {[str(a) for a in id_adv]}, "
                   f"{tv_checked} enumeration/TV agreements, diagram vs threshold {compared} comparisons, "
                   f"{mismatches} mismatches")


def test_criterion_9_ind_cca2(verdict):
    sys_ = io.load_abstract(io.resolve("cca2-malleable-otp"))
    kind, advs = io.load_adversaries(io.resolve("cca2-adversaries"))
    by_name = {a.name: a for a in advs}
    flip = [ind_cca2_guess_prob(sys_, by_name["bit-flip"], l) for l in sys_.levels]
    ignore = [ind_cca2_guess_prob(sys_, by_name["oracle-ignoring"], l) for l in sys_.levels]
    ok = kind == "ind-cca2" and all(p == 1 for p in flip) and all(p == HALF for p in ignore)
    verdict(9, ok, f"bit-flip {[str(p) for p in flip]}, oracle-ignoring {[str(p) for p in ignore]}")


COMMANDS = [
    ["check-dy", "--system", "dy-otp-2"],
    ["check-dy", "--system", "dy-identity"],
    ["check-shannon", "--system", "shannon-otp-2"],
    ["check-shannon", "--system", "shannon-fixed-key"],
    ["check-indcpa", "--system", "ind-otp", "--adversaries", "cpa-adversaries", "--level", "2"],
    ["check-indcpa", "--system", "ind-identity", "--policy", "policy-default"],
    ["check-indcca2", "--system", "cca2-malleable-otp", "--adversaries", "cca2-adversaries"],
    ["selftest", "--instances", "20"],
]


def test_criterion_10_determinism(verdict):
    differing = []
    for argv in COMMANDS:
        cmd = [sys.executable, "-m", "catcrypt.cli", *argv, "--seed", "5", "--format", "json"]
        a, b = (subprocess.run(cmd, capture_output=True).stdout for _ in range(2))
        json.loads(a)
        if a != b:
            differing.append(argv[0])
    verdict(10, not differing, f"{len(COMMANDS)} commands run twice each, {len(differing)} differ")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
