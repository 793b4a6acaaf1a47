"""Dolev-Yao message algebras over finite carriers and possibilistic secrecy.

Operations are total tables: ``enc[k, m]``, ``dec[k, c]`` and ``pair[k]``,
with keys as first arguments.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, Iterable

from .diagram import Diagram, Edge, check_commutes, CommutativityReport
from .semiring import (
    BOOLEAN,
    ONE,
    EncodedSet,
    Matrix,
    identity,
    kronecker,
    reindex,
)
from .verdict import Verdict


class SystemError_(ValueError):
    """Malformed system description (unknown labels, partial tables)."""


@dataclass(frozen=True)
class DolevYaoSystem:
    carrier: EncodedSet
    enc: dict
    dec: dict
    pair: dict
    wellformed: frozenset

    def __post_init__(self):
        a = self.carrier
        for name, table, arity in (("enc", self.enc, 2), ("dec", self.dec, 2), ("pair", self.pair, 1)):
            for args in (itertools.product(a, repeat=arity) if arity == 2 else a):
                if args not in table:
                    raise SystemError_(f"{name} is undefined at {args!r}")
                if table[args] not in a:
                    raise SystemError_(f"{name}{args!r} = {table[args]!r} is outside the carrier")
        stray = set(self.wellformed) - set(a)
        if stray:
            raise SystemError_(f"well-formed plaintexts {sorted(map(str, stray))} are outside the carrier")

    @classmethod
    def from_tables(cls, carrier: Iterable[Hashable], enc, dec, pair, wellformed=None) -> DolevYaoSystem:
        """Build from row-major tables: ``enc[i][j]`` is E(key_i, msg_j)."""
        a = carrier if isinstance(carrier, EncodedSet) else EncodedSet(carrier)
        els = a.elements
        n = len(els)
        for name, rows in (("enc", enc), ("dec", dec)):
            if len(rows) != n or any(len(r) != n for r in rows):
                raise SystemError_(f"{name} must be a {n}x{n} table")
        if len(pair) != n:
            raise SystemError_(f"pair must list {n} entries")
        return cls(
            a,
            {(k, m): enc[i][j] for i, k in enumerate(els) for j, m in enumerate(els)},
            {(k, c): dec[i][j] for i, k in enumerate(els) for j, c in enumerate(els)},
            {k: pair[i] for i, k in enumerate(els)},
            frozenset(els if wellformed is None else wellformed),
        )

    def E(self, k, m):
        return self.enc[k, m]

    def D(self, k, c):
        return self.dec[k, c]


def check_decryption_condition(s: DolevYaoSystem) -> Verdict:
    """D(pair(k), E(k, m)) = m for all k, m."""
    for k in s.carrier:
        kbar = s.pair[k]
        for m in s.carrier:
            c = s.enc[k, m]
            got = s.dec[kbar, c]
            if got != m:
                return Verdict.fail(k=k, m=m, c=c, decrypted=got)
    return Verdict.ok()


def satisfies_encryption_equation(s: DolevYaoSystem) -> Verdict:
    """E(k, D(pair(k), c)) = c for all k, c; optional, most systems fail it."""
    for k in s.carrier:
        for c in s.carrier:
            got = s.enc[k, s.dec[s.pair[k], c]]
            if got != c:
                return Verdict.fail(k=k, c=c, reencrypted=got)
    return Verdict.ok()


def tilde_D(s: DolevYaoSystem, c) -> frozenset:
    """Well-formed plaintexts that some key encrypts to ``c``."""
    if c not in s.carrier:
        raise SystemError_(f"ciphertext {c!r} is not in the carrier")
    return frozenset(m for m in s.wellformed if any(s.enc[k, m] == c for k in s.carrier))


def is_algebraically_perfectly_secure(s: DolevYaoSystem) -> Verdict:
    # quantifier loop kept separate from tilde_D so the two routes stay independent
    for c in s.carrier:
        for m in s.carrier:
            in_m = m in s.wellformed
            lhs = in_m and any(s.enc[k, m] == c for k in s.carrier)
            if lhs != in_m:
                return Verdict.fail(c=c, m=m)
    return Verdict.ok()


def possible_plaintexts_constant(s: DolevYaoSystem) -> bool:
    """c D~ m iff m in M, for all c and m."""
    return all(tilde_D(s, c) == s.wellformed for c in s.carrier)


def lemma_equivalence_check(s: DolevYaoSystem) -> bool:
    """True when the direct security verdict matches the possible-plaintexts one."""
    return is_algebraically_perfectly_secure(s).holds == possible_plaintexts_constant(s)


def rel_edges(s: DolevYaoSystem) -> dict[str, Matrix]:
    a = s.carrier
    aa = a.product(a)
    e_tilde = Matrix(
        BOOLEAN, a, aa,
        [[m in s.wellformed and s.enc[k, m] == c for (k, m) in aa] for c in a],
    )
    bang = Matrix(BOOLEAN, a, ONE, [[True] for _ in a])
    bang_x_a = reindex(kronecker(bang, identity(a, BOOLEAN)), cols=a)
    m_point = Matrix(BOOLEAN, ONE, a, [[x in s.wellformed for x in a]])
    return {"E~M": e_tilde, "!": bang, "!xA": bang_x_a, "M": m_point}


def build_rel_security_diagram(s: DolevYaoSystem) -> Diagram:
    """Square A -> AxA -> A' and A -> 1 -> A' in the category of relations.

    The top-left A holds ciphertexts, A' plaintexts; they are the same set
    but distinct diagram objects so that paths cannot loop.
    """
    a = s.carrier
    m = rel_edges(s)
    objects = {"A": a, "AxA": a.product(a), "1": ONE, "A'": a}
    edges = [
        Edge("A", "AxA", m["E~M"], "E~M"),
        Edge("AxA", "A'", m["!xA"], "!xA"),
        Edge("A", "1", m["!"], "!"),
        Edge("1", "A'", m["M"], "M"),
    ]
    return Diagram(objects, edges)


def check_rel_security(s: DolevYaoSystem) -> CommutativityReport:
    return check_commutes(build_rel_security_diagram(s))


def all_systems(n: int, require_decryption: bool = True):
    """Every Dolev-Yao system on an n-element carrier with nonempty M."""
    a = EncodedSet(range(n))
    els = a.elements
    cells = list(itertools.product(els, repeat=2))
    subsets = [frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(els, r)]
    for enc_vals in itertools.product(els, repeat=len(cells)):
        enc = dict(zip(cells, enc_vals))
        for pair_vals in itertools.product(els, repeat=n):
            pair = dict(zip(els, pair_vals))
            for dec_vals in itertools.product(els, repeat=len(cells)):
                dec = dict(zip(cells, dec_vals))
                if require_decryption and any(dec[pair[k], enc[k, m]] != m for k, m in cells):
                    continue
                for wf in subsets:
                    yield DolevYaoSystem(a, enc, dec, pair, wf)


def random_system(n: int, rng: random.Random, secure_bias: float = 0.3) -> DolevYaoSystem:
    """A random system satisfying the decryption condition.

    Keys sharing a decryption key share the encryption permutation. With
    probability ``secure_bias`` the encryption table is a relabelled Latin
    square (every key its own permutation, every column a bijection), which
    makes secure instances common enough to matter.
    """
    els = list(range(n))
    a = EncodedSet(els)
    if rng.random() < secure_bias:
        pair = dict(zip(els, rng.sample(els, n)))
        sigma, tau, offset = rng.sample(els, n), rng.sample(els, n), rng.sample(els, n)
        perms = {pair[k]: [sigma[(offset[k] + tau[m]) % n] for m in els] for k in els}
    else:
        pair = {k: rng.choice(els) for k in els}
        perms = {}
        for k in els:
            if pair[k] not in perms:
                perms[pair[k]] = rng.sample(els, n)
    enc = {(k, m): perms[pair[k]][m] for k in els for m in els}
    dec = {}
    for j in els:
        if j in perms:
            inv = {c: m for m, c in enumerate(perms[j])}
            for c in els:
                dec[j, c] = inv[c]
        else:
            for c in els:
                dec[j, c] = rng.choice(els)
    wf = frozenset(rng.sample(els, rng.randint(1, n)))
    return DolevYaoSystem(a, enc, dec, pair, wf)
