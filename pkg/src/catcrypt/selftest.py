"""Cross-oracle agreement suites on generated instances."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ensemble import (
    FeasibleEnsemble,
    NegligibilityPolicy,
    ensemble_compose,
    identity_fn,
    random_ensemble,
    random_fn,
    rcompose,
    realizes,
    restrict,
)
from .games import ind_cpa_advantage, random_system as random_abstract
from .semiring import compose
from .shannon import check_sto_security, is_perfectly_secure_direct, random_system as random_shannon
from .symbolic import (
    all_systems,
    check_rel_security,
    is_algebraically_perfectly_secure,
    possible_plaintexts_constant,
    random_system as random_dy,
)

DEFAULTS = {"dy": 200, "sto": 100, "monoid": 100, "realize": 50, "indcpa": 50}


@dataclass
class Suite:
    name: str
    instances: int = 0
    disagreements: int = 0
    first: dict | None = None
    extra: dict = field(default_factory=dict)

    def record(self, agree: bool, **witness):
        self.instances += 1
        if not agree:
            self.disagreements += 1
            if self.first is None:
                self.first = {"instance": self.instances - 1, **witness}

    @property
    def status(self) -> str:
        if self.instances == 0:
            return "vacuous"
        return "pass" if self.disagreements == 0 else "fail"

    def to_json(self):
        return {
            "suite": self.name,
            "status": self.status,
            "instances": self.instances,
            "disagreements": self.disagreements,
            "first_disagreement": self.first,
            **self.extra,
        }


def _dy_instances(rng, n_random, exhaustive):
    if exhaustive:
        yield from all_systems(2)
    for i in range(n_random):
        yield random_dy(3 + i % 2, rng)


def dy_suites(rng, n_random: int, exhaustive: bool = True):
    plaintexts = Suite("possible-plaintexts")
    rel = Suite("rel-diagram")
    secure = 0
    for s in _dy_instances(rng, n_random, exhaustive):
        direct = is_algebraically_perfectly_secure(s).holds
        secure += direct
        plaintexts.record(direct == possible_plaintexts_constant(s), carrier=len(s.carrier))
        rel.record(direct == check_rel_security(s).passed, carrier=len(s.carrier))
    plaintexts.extra["secure_instances"] = rel.extra["secure_instances"] = secure
    return [plaintexts, rel]


def sto_suite(rng, n: int):
    suite = Suite("sto-diagram")
    secure = 0
    for i in range(n):
        s = random_shannon(2 + i % 3, rng)
        direct = is_perfectly_secure_direct(s).holds
        secure += direct
        suite.record(direct == check_sto_security(s).passed, carrier=len(s.carrier))
    suite.extra["secure_instances"] = secure
    return suite


def monoid_suite(rng, n: int):
    suite = Suite("monoid-laws")
    for _ in range(n):
        l = [rng.randint(0, 2) for _ in range(4)]
        f = random_fn(rng.randint(0, 2), l[0], l[1], rng)
        g = random_fn(rng.randint(0, 2), l[1], l[2], rng)
        h = random_fn(rng.randint(0, 2), l[2], l[3], rng)
        assoc = rcompose(h, rcompose(g, f)) == rcompose(rcompose(h, g), f)
        unit = rcompose(identity_fn(f.out_len), f) == f == rcompose(f, identity_fn(f.in_len))
        suite.record(assoc and unit, profiles=[f.profile, g.profile, h.profile])
    return suite


def realization_suite(rng, n: int):
    suite = Suite("realization")
    for _ in range(n):
        psi = random_ensemble(rng, 3, max_out=3)
        theta = random_ensemble(rng, 3, in_lens=[1, 2, 3], max_out=2)
        ok = realizes(psi.matrices(), psi).holds
        both = ensemble_compose(theta, psi)
        comp = both.matrices()
        ok = ok and realizes(comp, both).holds
        for level in psi.level_numbers:
            f = psi.at(level)
            g = restrict(theta.at(theta_level(theta, f.out_len)), f.out_len)
            ok = ok and comp.at(level) == compose(f.matrix(), g.matrix())
        suite.record(ok)
    return suite


def theta_level(theta: FeasibleEnsemble, width: int) -> int:
    return next(l for l in theta.level_numbers if theta.at(l).in_len >= width)


def indcpa_suite(rng, n: int):
    """Enumeration and TV routes agree (ind_cpa_advantage raises otherwise)."""
    from .games import OracleMismatch

    suite = Suite("indcpa-oracles")
    for i in range(n):
        kb, mb, cb = (1 + (i >> j) % 2 for j in range(3))
        s = random_abstract(rng, kb, mb, cb)
        try:
            r = ind_cpa_advantage(s, 1)
            suite.record(r.advantage == r.tv_advantage)
        except OracleMismatch as e:
            suite.record(False, error=str(e))
    return suite


def run(seed: int = 0, instances: int | None = None) -> dict:
    """Run every suite; ``instances`` overrides each random count (0 also drops the exhaustive sweep)."""
    counts = dict(DEFAULTS) if instances is None else dict.fromkeys(DEFAULTS, instances)
    exhaustive = instances != 0
    rng = random.Random(seed)
    suites = [
        *dy_suites(rng, counts["dy"], exhaustive),
        sto_suite(rng, counts["sto"]),
        monoid_suite(rng, counts["monoid"]),
        realization_suite(rng, counts["realize"]),
        indcpa_suite(rng, counts["indcpa"]),
    ]
    statuses = {s.status for s in suites}
    verdict = "fail" if "fail" in statuses else "vacuous" if statuses == {"vacuous"} else "pass"
    return {
        "command": "selftest",
        "seed": seed,
        "verdict": verdict,
        "suites": [s.to_json() for s in suites],
    }
