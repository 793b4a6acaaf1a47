"""Shannon crypto systems: key and plaintext distributions over a message algebra.

Matrices follow the package convention (rows = inputs). The encryption
operator is the morphism ``m -> c``, so the textbook entry E_{cm} is
``encryption_matrix(s).entry(m, c)``; use ``.T`` for the (c, m) layout.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .diagram import CommutativityReport, Diagram, Edge, check_commutes
from .semiring import (
    ONE,
    RATIONAL,
    EncodedSet,
    Matrix,
    convex_mix,
    identity,
    kronecker,
    reindex,
)
from .symbolic import DolevYaoSystem, SystemError_
from .verdict import Verdict


class ZeroProbabilityCiphertext(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    base: EncodedSet
    weights: Mapping

    def __post_init__(self):
        w = {}
        for x, p in self.weights.items():
            if x not in self.base:
                raise SystemError_(f"weight given for {x!r}, which is not in {self.base!r}")
            p = Fraction(p)
            if p < 0:
                raise SystemError_(f"negative weight {p} at {x!r}")
            if p:
                w[x] = p
        total = sum(w.values(), Fraction(0))
        if total != 1:
            raise SystemError_(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", w)

    def __getitem__(self, x):
        return self.weights.get(x, Fraction(0))

    @property
    def support(self) -> tuple:
        return tuple(x for x in self.base if x in self.weights)

    def items(self):
        return ((x, self.weights[x]) for x in self.support)

    @classmethod
    def uniform(cls, base: EncodedSet, over=None) -> Distribution:
        over = list(base if over is None else over)
        return cls(base, {x: Fraction(1, len(over)) for x in over})

    @classmethod
    def point(cls, base: EncodedSet, x) -> Distribution:
        return cls(base, {x: 1})

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.base == other.base and self.weights == other.weights

    def __hash__(self):
        return hash((self.base, frozenset(self.weights.items())))


def mix(p, d1: Distribution, d2: Distribution) -> Distribution:
    p = Fraction(p)
    return Distribution(d1.base, {x: p * d1[x] + (1 - p) * d2[x] for x in d1.base})


@dataclass(frozen=True)
class ShannonSystem:
    """Message algebra with key distribution ``kappa`` and plaintext prior ``mu``.

    ``enc[k, m]`` is a carrier element, or a mapping c -> probability for
    randomized encryption (an extension; see ``build_sto_security_diagram``).
    """

    carrier: EncodedSet
    enc: dict
    dec: dict
    pair: dict
    kappa: Distribution
    mu: Distribution

    def __post_init__(self):
        a = self.carrier
        for d in (self.kappa, self.mu):
            if d.base != a:
                raise SystemError_("kappa and mu must be distributions over the carrier")
        for k in self.kappa.support:
            if self.pair.get(k) not in a:
                raise SystemError_(f"pair is undefined at key {k!r}")
            for m in self.mu.support:
                if (k, m) not in self.enc:
                    raise SystemError_(f"enc is undefined at {(k, m)!r}")
                for c in self.enc_dist(k, m):
                    if c not in a:
                        raise SystemError_(f"enc{(k, m)!r} produces {c!r} outside the carrier")
                    got = self.dec.get((self.pair[k], c))
                    if got != m:
                        raise SystemError_(
                            f"decryption condition fails at k={k!r}, m={m!r}: "
                            f"D(pair(k), {c!r}) = {got!r}"
                        )

    def enc_dist(self, k, m) -> dict:
        v = self.enc[k, m]
        if isinstance(v, Mapping):
            return {c: Fraction(p) for c, p in v.items() if p}
        return {v: Fraction(1)}

    @property
    def deterministic(self) -> bool:
        return not any(isinstance(v, Mapping) for v in self.enc.values())


def _enc_entries(s: ShannonSystem, kappa: Distribution):
    a = s.carrier
    rows = []
    for m in a:
        row = dict.fromkeys(a, Fraction(0))
        for x, w in kappa.items():
            if (x, m) in s.enc:
                for c, p in s.enc_dist(x, m).items():
                    row[c] += w * p
        rows.append([row[c] for c in a])
    return rows


def _dec_entries(s: ShannonSystem, kappa: Distribution):
    a = s.carrier
    rows = []
    for c in a:
        row = dict.fromkeys(a, Fraction(0))
        for x, w in kappa.items():
            m = s.dec.get((s.pair[x], c))
            if m is not None:
                row[m] += w
        rows.append([row[m] for m in a])
    return rows


def encryption_matrix(s: ShannonSystem, kappa: Distribution | None = None) -> Matrix:
    """Stochastic ``m -> c``: weight of keys in supp(kappa) sending m to c."""
    kappa = s.kappa if kappa is None else kappa
    return Matrix(RATIONAL, s.carrier, s.carrier, _enc_entries(s, kappa))


def decryption_matrix(s: ShannonSystem, kappa: Distribution | None = None) -> Matrix:
    """``c -> m``: weight of keys x in supp(kappa) with D(pair(x), c) = m."""
    kappa = s.kappa if kappa is None else kappa
    return Matrix(RATIONAL, s.carrier, s.carrier, _dec_entries(s, kappa))


def ciphertext_distribution(s: ShannonSystem) -> dict:
    e = encryption_matrix(s)
    out = dict.fromkeys(s.carrier, Fraction(0))
    for m, w in s.mu.items():
        for c in s.carrier:
            out[c] += w * e.entry(m, c)
    return out


def posterior(s: ShannonSystem, c) -> Distribution:
    """Bayes posterior Pr(m | c) over supp(mu)."""
    if c not in s.carrier:
        raise SystemError_(f"{c!r} is not in the carrier")
    e = encryption_matrix(s)
    joint = {m: e.entry(m, c) * w for m, w in s.mu.items()}
    total = sum(joint.values(), Fraction(0))
    if total == 0:
        raise ZeroProbabilityCiphertext(f"ciphertext {c!r} has probability 0")
    support = s.carrier.subset(s.mu.support)
    return Distribution(support, {m: p / total for m, p in joint.items()})


def is_perfectly_secure_direct(s: ShannonSystem) -> Verdict:
    """Posterior equals the prior for every ciphertext of positive probability."""
    pc = ciphertext_distribution(s)
    for c in s.carrier:
        if pc[c] == 0:
            continue
        post = posterior(s, c)
        for m, prior in s.mu.items():
            if post[m] != prior:
                return Verdict.fail(c=c, m=m, posterior=post[m], prior=prior)
    return Verdict.ok()


def sto_edges(s: ShannonSystem, randomized: bool = False) -> dict[str, Matrix]:
    if not s.deterministic and not randomized:
        raise SystemError_("encryption is randomized; pass randomized=True to use the extended joint weights")
    a = s.carrier
    aa = a.product(a)
    n = len(a)
    joint = []
    for c in a:
        row = []
        for k, m in aa:
            w = s.kappa[k] * s.mu[m]
            row.append(w * s.enc_dist(k, m).get(c, 0) if w else Fraction(0))
        joint.append(row)
    e_tilde = Matrix(RATIONAL, a, aa, joint)
    avg = Matrix(RATIONAL, a, ONE, [[Fraction(1, n)] for _ in a])
    bang_x_a = reindex(kronecker(avg, identity(a)), cols=a)
    # 1/n-averaging map to 1, reweighted by the ciphertext marginal of e_tilde
    bang = Matrix(RATIONAL, a, ONE, [[sum(row, Fraction(0)) / n] for row in joint])
    mu = Matrix(RATIONAL, ONE, a, [[s.mu[x] for x in a]])
    return {"E~": e_tilde, "!": bang, "!xA": bang_x_a, "mu": mu}


def build_sto_security_diagram(s: ShannonSystem, randomized: bool = False) -> Diagram:
    """Square A -> AxA -> A' versus A -> 1 -> A' in stochastic operators.

    ``E~`` has the joint weights kappa(k) mu(m) on (k, m) with E(k, m) = c and
    ``!xA`` averages out the key with weight 1/#A. The map ``!`` to the point
    carries each ciphertext's marginal weight (times 1/#A), so the square
    commutes exactly when Pr(c, m) = Pr(c) mu(m) for all c, m.
    With ``randomized=True`` the joint weight is multiplied by Pr(c | k, m).
    """
    a = s.carrier
    m = sto_edges(s, randomized)
    objects = {"A": a, "AxA": a.product(a), "1": ONE, "A'": a}
    edges = [
        Edge("A", "AxA", m["E~"], "E~"),
        Edge("AxA", "A'", m["!xA"], "!xA"),
        Edge("A", "1", m["!"], "!"),
        Edge("1", "A'", m["mu"], "mu"),
    ]
    return Diagram(objects, edges)


def check_sto_security(s: ShannonSystem, randomized: bool = False) -> CommutativityReport:
    return check_commutes(build_sto_security_diagram(s, randomized))


def convexity_check(s: ShannonSystem, p, k, h) -> bool:
    """Encrypting/decrypting under a key mixture equals mixing the operators."""
    p = Fraction(p)
    a = s.carrier
    mixed = mix(p, Distribution.point(a, k), Distribution.point(a, h))
    dk, dh = Distribution.point(a, k), Distribution.point(a, h)
    enc_ok = encryption_matrix(s, mixed) == convex_mix(p, encryption_matrix(s, dk), encryption_matrix(s, dh))
    dec_ok = decryption_matrix(s, mixed) == convex_mix(p, decryption_matrix(s, dk), decryption_matrix(s, dh))
    return enc_ok and dec_ok


def underlying_dolev_yao(s: ShannonSystem) -> DolevYaoSystem:
    """Forget the probabilities; well-formed plaintexts are supp(mu)."""
    if not s.deterministic:
        raise SystemError_("only deterministic encryption has an underlying Dolev-Yao system")
    return DolevYaoSystem(s.carrier, dict(s.enc), dict(s.dec), dict(s.pair), frozenset(s.mu.support))


def from_dolev_yao(d: DolevYaoSystem, kappa: Mapping, mu: Mapping) -> ShannonSystem:
    a = d.carrier
    return ShannonSystem(a, dict(d.enc), dict(d.dec), dict(d.pair), Distribution(a, kappa), Distribution(a, mu))


def random_distribution(base: EncodedSet, rng: random.Random, full_support: bool = False) -> Distribution:
    els = list(base)
    shape = rng.random()
    if shape < 0.3:
        return Distribution.uniform(base)
    if shape < 0.4 and not full_support:
        return Distribution.point(base, rng.choice(els))
    support = els if full_support else rng.sample(els, rng.randint(1, len(els)))
    raw = [rng.randint(1, 6) for _ in support]
    total = sum(raw)
    return Distribution(base, {x: Fraction(r, total) for x, r in zip(support, raw)})


def random_system(n: int, rng: random.Random, full_support: bool = False) -> ShannonSystem:
    from .symbolic import random_system as random_dy

    d = random_dy(n, rng, secure_bias=0.5)
    kappa = random_distribution(d.carrier, rng, full_support)
    mu = random_distribution(d.carrier, rng, full_support)
    return from_dolev_yao(d, kappa.weights, mu.weights)
