"""Abstract crypto systems over ensembles; IND-CPA and IND-CCA2 at desk scale.

At level l every sort is the set of all bitstrings of its length and the
unit object 1 is encoded as the unary string 1^l. Multi-argument inputs are
concatenated codes in the order the game lists them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .diagram import CommutativityReport, Diagram, Edge, PairResult, check_commutes
from .ensemble import (
    EnsembleError,
    FeasibleEnsemble,
    NegligibilityPolicy,
    RandomizedFn,
    bits,
)
from .semiring import (
    ONE,
    RATIONAL,
    TWO,
    EncodedSet,
    Matrix,
    identity,
    kronecker,
    reindex,
)
from .verdict import Verdict

HALF = Fraction(1, 2)
DEFAULT_DIAGRAM_CAP = 2 ** 20


class CapExceeded(EnsembleError):
    pass


class OracleMismatch(AssertionError):
    """Two independent computations of the same quantity disagree."""


def unit(level: int) -> str:
    return "1" * level


def flat_product(*sets: EncodedSet) -> EncodedSet:
    """Cartesian product with flat tuple labels, lexicographic, codes concatenated."""
    elements = []
    codes = []
    for combo in itertools.product(*(zip(s.elements, s.codes) for s in sets)):
        elements.append(tuple(e for e, _ in combo))
        codes.append("".join(c for _, c in combo))
    return EncodedSet(elements, codes)


@dataclass(frozen=True, eq=False)
class AbstractCryptoSystem:
    """Sorts K, M, C given by bit lengths per level, plus the four ensembles.

    keygen: 1 -> K x K outputs k :: kbar; enc: K x M -> C (randomized);
    dec: K x C -> M and pair: K -> K deterministic (pair is optional and,
    when given, must agree with keygen).
    """

    key_bits: tuple[int, ...]
    msg_bits: tuple[int, ...]
    ct_bits: tuple[int, ...]
    keygen: FeasibleEnsemble
    enc: FeasibleEnsemble
    dec: FeasibleEnsemble
    pair: FeasibleEnsemble | None = None
    start: int = 1
    name: str = ""

    def __post_init__(self):
        for f in ("key_bits", "msg_bits", "ct_bits"):
            object.__setattr__(self, f, tuple(getattr(self, f)))
        n = len(self.key_bits)
        if not (len(self.msg_bits) == len(self.ct_bits) == n):
            raise EnsembleError("sort profiles must cover the same levels")
        for l in self.levels:
            kb, mb, cb = self.sort_bits(l)
            self._expect(self.keygen, l, len(unit(l)), 2 * kb, "keygen")
            self._expect(self.enc, l, kb + mb, cb, "enc")
            self._expect(self.dec, l, kb + cb, mb, "dec")
            if self.dec.at(l).seed_len:
                raise EnsembleError(f"dec must be deterministic (level {l})")
            if self.pair is not None:
                self._expect(self.pair, l, kb, kb, "pair")
                if self.pair.at(l).seed_len:
                    raise EnsembleError(f"pair must be deterministic (level {l})")

    def _expect(self, ens: FeasibleEnsemble, level, s, t, what):
        if level not in ens.level_numbers:
            raise EnsembleError(f"{what} has no level {level}")
        f = ens.at(level)
        if (f.in_len, f.out_len) != (s, t):
            raise EnsembleError(f"{what} at level {level} maps {f.in_len} -> {f.out_len} bits, expected {s} -> {t}")

    @property
    def levels(self) -> range:
        return range(self.start, self.start + len(self.key_bits))

    def sort_bits(self, level: int) -> tuple[int, int, int]:
        i = level - self.start
        if not 0 <= i < len(self.key_bits):
            raise EnsembleError(f"system has no level {level}")
        return self.key_bits[i], self.msg_bits[i], self.ct_bits[i]

    def sorts(self, level: int):
        kb, mb, cb = self.sort_bits(level)
        return EncodedSet.bitstrings(kb), EncodedSet.bitstrings(mb), EncodedSet.bitstrings(cb)

    def key_pairs(self, level: int) -> dict[tuple[str, str], Fraction]:
        kb = self.sort_bits(level)[0]
        return {(o[:kb], o[kb:]): p for o, p in self.keygen.at(level).distribution(unit(level)).items()}

    def key_marginal(self, level: int) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for (k, _), p in self.key_pairs(level).items():
            out[k] = out.get(k, Fraction(0)) + p
        return out

    def encrypt(self, level: int, k: str, m: str) -> dict[str, Fraction]:
        return self.enc.at(level).distribution(k + m)

    def decrypt(self, level: int, kbar: str, c: str) -> str | None:
        f = self.dec.at(level)
        return f("", kbar + c)

    def ciphertext_distribution(self, level: int, m: str) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for k, pk in self.key_marginal(level).items():
            for c, pc in self.encrypt(level, k, m).items():
                out[c] = out.get(c, Fraction(0)) + pk * pc
        return out


def check_unique_decryption(sys: AbstractCryptoSystem) -> Verdict:
    """D(kbar, E(r, k, m)) = m for every keygen output, message and defined seed."""
    for level in sys.levels:
        _, M, _ = sys.sorts(level)
        for (k, kbar) in sys.key_pairs(level):
            if sys.pair is not None:
                expect = sys.pair.at(level)("", k)
                if expect != kbar:
                    return Verdict.fail(level=level, k=k, kbar=kbar, pair=expect)
            for m in M:
                for c in sys.encrypt(level, k, m):
                    got = sys.decrypt(level, kbar, c)
                    if got != m:
                        return Verdict.fail(level=level, k=k, m=m, c=c, decrypted=got)
    return Verdict.ok()


@dataclass(frozen=True, eq=False)
class AdversaryPair:
    """A0 picks m0 :: m1 :: state; A1 maps c :: m0 :: m1 :: state to a guess bit.

    ``shape="game"``: A0's input is the unit 1^l. ``shape="diagram"``: A0
    receives the key, as in the pairing <id, A0> out of K.
    """

    a0: FeasibleEnsemble
    a1: FeasibleEnsemble
    shape: str = "game"
    name: str = "adversary"

    def __post_init__(self):
        if self.shape not in ("game", "diagram"):
            raise EnsembleError(f"unknown adversary shape {self.shape!r}")

    def state_bits(self, level: int, mb: int) -> int:
        sb = self.a0.at(level).out_len - 2 * mb
        if sb < 0:
            raise EnsembleError(f"{self.name}: A0 output at level {level} is shorter than two plaintexts")
        return sb

    def check(self, sys: AbstractCryptoSystem, level: int):
        kb, mb, cb = sys.sort_bits(level)
        sb = self.state_bits(level, mb)
        a0_in = kb if self.shape == "diagram" else len(unit(level))
        f0, f1 = self.a0.at(level), self.a1.at(level)
        if f0.in_len != a0_in:
            raise EnsembleError(f"{self.name}: A0 input at level {level} must be {a0_in} bits, got {f0.in_len}")
        if f1.in_len != cb + 2 * mb + sb or f1.out_len != 1:
            raise EnsembleError(
                f"{self.name}: A1 at level {level} must map {cb + 2 * mb + sb} -> 1 bits, "
                f"got {f1.in_len} -> {f1.out_len}"
            )
        return kb, mb, cb, sb


def _cpa_game(sys, level, key_dist, enc, a0_dist, a1_dist, mb) -> Fraction:
    """Exact Pr[guess = b] with callables for the adversary's stages."""
    total = Fraction(0)
    for k, pk in key_dist.items():
        for out0, p0 in a0_dist(k).items():
            m0, m1, st = out0[:mb], out0[mb:2 * mb], out0[2 * mb:]
            for b, mb_ in (("0", m0), ("1", m1)):
                for c, pc in enc(k, mb_).items():
                    pg = a1_dist(c + m0 + m1 + st).get(b)
                    if pg:
                        total += HALF * pk * p0 * pc * pg
    return total


def ind_cpa_guess_prob(sys: AbstractCryptoSystem, adv: AdversaryPair, level: int) -> Fraction:
    """Probability that A1 guesses the coin, summed exactly over all randomness."""
    kb, mb, cb, sb = adv.check(sys, level)
    f0, f1 = adv.a0.at(level), adv.a1.at(level)
    u = unit(level)
    if adv.shape == "game":
        a0_dist = lambda k: f0.distribution(u)  # noqa: E731
    else:
        a0_dist = f0.distribution
    return _cpa_game(
        sys, level, sys.key_marginal(level),
        lambda k, m: sys.encrypt(level, k, m), a0_dist, f1.distribution, mb,
    )


def _total(dist) -> Fraction:
    return sum(dist.values(), Fraction(0))


@dataclass(frozen=True)
class AdvantageResult:
    level: int
    advantage: Fraction
    tv_advantage: Fraction
    enumerated: int
    brute_force: bool
    pair: tuple[str, str]


def ind_cpa_advantage(
    sys: AbstractCryptoSystem, level: int, cap: int = 2 ** 22, brute_force_limit: int = 2 ** 4
) -> AdvantageResult:
    """Best deterministic adversary's |Pr[guess] - 1/2|, cross-checked against TV.

    Enumeration route: for each plaintext pair, every guessing table on
    ciphertexts (when there are at most ``brute_force_limit`` of them) or the
    per-ciphertext best response otherwise, each scored by the game sum.
    TV route: half the largest total-variation distance between two
    ciphertext distributions.
    """
    kb, mb, cb = sys.sort_bits(level)
    _, M, C = sys.sorts(level)
    keys = sys.key_marginal(level)
    if _total(keys) != 1:
        raise EnsembleError(f"keygen is not total at level {level}")
    enc_cache = {}

    def enc(k, m):
        if (k, m) not in enc_cache:
            enc_cache[k, m] = sys.encrypt(level, k, m)
        return enc_cache[k, m]

    for k in keys:
        for m in M:
            if _total(enc(k, m)) != 1:
                raise EnsembleError(f"encryption is not total at level {level} (k={k}, m={m})")

    n_tables = 2 ** len(C)
    brute = n_tables <= brute_force_limit
    pairs = [(m0, m1) for m0 in M for m1 in M]
    work = len(pairs) * (n_tables if brute else 1)
    if work > cap:
        raise CapExceeded(f"level {level}: {work} adversaries exceed the enumeration cap {cap}")

    dists = {m: sys.ciphertext_distribution(level, m) for m in M}
    best_tv = Fraction(0)
    for m0, m1 in pairs:
        p0, p1 = dists[m0], dists[m1]
        tv = sum((abs(p0.get(c, 0) - p1.get(c, 0)) for c in C), Fraction(0)) / 2
        best_tv = max(best_tv, tv)
    tv_adv = best_tv / 2

    best = Fraction(-1)
    best_pair = pairs[0]
    count = 0
    clist = list(C)
    for m0, m1 in pairs:
        const = {m0 + m1: Fraction(1)}
        a0 = lambda k, const=const: const  # noqa: E731
        if brute:
            tables = itertools.product("01", repeat=len(clist))
        else:
            p0, p1 = dists[m0], dists[m1]
            tables = ["".join("1" if p1.get(c, 0) > p0.get(c, 0) else "0" for c in clist)]
        for table in tables:
            guess = dict(zip(clist, table))
            a1 = lambda x, guess=guess: {guess[x[:cb]]: Fraction(1)}  # noqa: E731
            p = _cpa_game(sys, level, keys, enc, a0, a1, mb)
            count += 1
            adv = abs(p - HALF)
            if adv > best:
                best, best_pair = adv, (m0, m1)
    if best != tv_adv:
        raise OracleMismatch(f"level {level}: enumeration gives {best}, TV oracle gives {tv_adv}")
    return AdvantageResult(level, best, tv_adv, count, brute, best_pair)


def max_ind_cpa_advantage(sys: AbstractCryptoSystem, level: int, cap: int = 2 ** 22) -> Fraction:
    return ind_cpa_advantage(sys, level, cap).advantage


def cpa_diagram(
    sys: AbstractCryptoSystem, adv: AdversaryPair, level: int, cap: int = DEFAULT_DIAGRAM_CAP
) -> Diagram:
    """The IND-CPA square at one level, with the key drawn from keygen.

    Objects: 1, K, K x W (W = M^2 x S as one bitstring sort), the challenge
    object 2 x K x M x W carrying the coin, 2 x C x W, 2 x 2 and 2. The upper
    path ends by comparing A1's guess with the coin (1 = correct); the
    lower path is the fair coin after discarding the key.
    """
    kb, mb, cb, sb = adv.check(sys, level)
    K, M, C = sys.sorts(level)
    W = EncodedSet.bitstrings(2 * mb + sb)
    KW = flat_product(K, W)
    CH = flat_product(TWO, K, M, W)
    CW = flat_product(TWO, C, W)
    TT = flat_product(TWO, TWO)
    sizes = {"pi": len(KW) * len(CH), "Exid": len(CH) * len(CW)}
    for name, size in sizes.items():
        if size > cap:
            raise CapExceeded(f"level {level}: edge {name} would have {size} entries (cap {cap})")

    keys = sys.key_marginal(level)
    key_edge = Matrix(RATIONAL, ONE, K, [[keys.get(k, 0) for k in K]])

    f0, f1 = adv.a0.at(level), adv.a1.at(level)
    u = unit(level)
    a0_rows = []
    for k in K:
        d = f0.distribution(u if adv.shape == "game" else k)
        a0_rows.append([d.get(w, 0) if k2 == k else 0 for (k2, w) in KW])
    a0_edge = Matrix(RATIONAL, K, KW, a0_rows)

    ch_index = CH._index
    pi_rows = []
    for k, w in KW:
        row = [Fraction(0)] * len(CH)
        for b, m in (("0", w[:mb]), ("1", w[mb:2 * mb])):
            row[ch_index[(int(b), k, m, w)]] = HALF
        pi_rows.append(row)
    pi_edge = Matrix(RATIONAL, KW, CH, pi_rows)

    e = sys.enc.at(level).matrix(flat_product(K, M), C)
    exid = reindex(kronecker(kronecker(identity(TWO), e), identity(W)), rows=CH, cols=CW)

    a1 = f1.matrix(flat_product(C, W), EncodedSet.bitstrings(1))
    a1_edge = reindex(kronecker(identity(TWO), a1), rows=CW, cols=TT)

    match = Matrix(RATIONAL, TT, TWO, [[0, 1] if b == g else [1, 0] for b, g in TT])
    bang = Matrix(RATIONAL, K, ONE, [[1] for _ in K])
    coin = Matrix(RATIONAL, ONE, TWO, [[HALF, HALF]])

    objects = {"1": ONE, "K": K, "KxW": KW, "2xKxMxW": CH, "2xCxW": CW, "2x2": TT, "2": TWO}
    edges = [
        Edge("1", "K", key_edge, "keygen"),
        Edge("K", "KxW", a0_edge, "<id,A0>"),
        Edge("KxW", "2xKxMxW", pi_edge, "pi"),
        Edge("2xKxMxW", "2xCxW", exid, "Exid"),
        Edge("2xCxW", "2x2", a1_edge, "idxA1"),
        Edge("2x2", "2", match, "match"),
        Edge("K", "1", bang, "!"),
        Edge("1", "2", coin, "b"),
    ]
    square = [
        (("keygen", "<id,A0>", "pi", "Exid", "idxA1", "match"), ("keygen", "!", "b")),
    ]
    return Diagram(objects, edges, pairs=square, max_path_length=6)


def diagram_size(sys: AbstractCryptoSystem, adv: AdversaryPair, level: int) -> int:
    """Entries of the largest dense edge in the level-l IND-CPA square."""
    kb, mb, cb, sb = adv.check(sys, level)
    w = 2 * mb + sb
    kw = 2 ** (kb + w)
    ch = 2 * 2 ** (kb + mb + w)
    return max(kw * ch, ch * 2 * 2 ** (cb + w))


def check_ind_cpa_diagram(
    sys: AbstractCryptoSystem,
    adversaries: Sequence[AdversaryPair],
    policy: NegligibilityPolicy,
    levels: Sequence[int] | None = None,
    cap: int = DEFAULT_DIAGRAM_CAP,
    on_cap: str = "skip",
) -> CommutativityReport:
    """Check the IND-CPA square for each adversary at each level of the horizon.

    Path composites are compared entrywise with the policy's threshold at
    that level. Levels whose dense edges exceed ``cap`` entries are skipped
    and listed in the report note (``on_cap="raise"`` raises instead).
    """
    if on_cap not in ("skip", "raise"):
        raise EnsembleError(f"unknown cap policy {on_cap!r}")
    if levels is None:
        levels = [l for l in sys.levels if l <= policy.max_level]
    results = []
    checked: set[int] = set()
    skipped: set[int] = set()
    for adv in adversaries:
        for level in levels:
            if on_cap == "skip" and diagram_size(sys, adv, level) > cap:
                skipped.add(level)
                continue
            checked.add(level)
            rep = check_commutes(cpa_diagram(sys, adv, level, cap), policy.predicate(level))
            for r in rep.results:
                results.append(PairResult(f"{adv.name}@{level}: {r.lhs}", r.rhs, r.equal, r.witness))
    note = f"horizon: levels {sorted(checked)}; equality {policy.describe()}"
    if skipped:
        note += f"; levels {sorted(skipped)} skipped (dense edges above {cap} entries)"
    results.sort(key=lambda r: (r.lhs, r.rhs))
    return CommutativityReport(tuple(results), note)


@dataclass(frozen=True, eq=False)
class CCA2Adversary:
    """Four stages sharing state through their outputs.

    A0: 1^l -> c0 :: s0;  A1: c0 :: m :: s0 -> m0 :: m1 :: s1;
    A2: c0 :: m :: m0 :: m1 :: c :: s1 -> c1 :: s2;
    A3: c0 :: m :: m0 :: m1 :: c :: c1 :: m~ :: s2 -> guess bit.
    """

    a0: FeasibleEnsemble
    a1: FeasibleEnsemble
    a2: FeasibleEnsemble
    a3: FeasibleEnsemble
    name: str = "adversary"

    def check(self, sys: AbstractCryptoSystem, level: int):
        kb, mb, cb = sys.sort_bits(level)
        f0, f1, f2, f3 = (e.at(level) for e in (self.a0, self.a1, self.a2, self.a3))
        s0 = f0.out_len - cb
        s1 = f1.out_len - 2 * mb
        s2 = f2.out_len - cb
        expected = [
            ("A0", f0.in_len, len(unit(level))),
            ("A1", f1.in_len, cb + mb + s0),
            ("A2", f2.in_len, cb + mb + 2 * mb + cb + s1),
            ("A3", f3.in_len, cb + mb + 2 * mb + cb + cb + mb + s2),
            ("A3 output", f3.out_len, 1),
        ]
        if min(s0, s1, s2) < 0:
            raise EnsembleError(f"{self.name}: stage outputs at level {level} are too short")
        for what, got, want in expected:
            if got != want:
                raise EnsembleError(f"{self.name}: {what} at level {level} has {got} bits, expected {want}")
        return kb, mb, cb


def ind_cca2_guess_prob(
    sys: AbstractCryptoSystem, adv: CCA2Adversary, level: int, on_repeat: str = "lose"
) -> Fraction:
    """Exact Pr[guess = b] in the chosen-ciphertext game.

    The decryption oracle answers with D(kbar, .) for the keygen's kbar. A
    post-challenge query equal to the challenge is refused: with
    ``on_repeat="lose"`` that branch counts as a wrong guess; ``"allow"``
    answers it anyway (no restriction). Undefined decryptions lose the branch.
    """
    if on_repeat not in ("lose", "allow"):
        raise EnsembleError(f"unknown repeat policy {on_repeat!r}")
    kb, mb, cb = adv.check(sys, level)
    f0, f1, f2, f3 = (e.at(level) for e in (adv.a0, adv.a1, adv.a2, adv.a3))
    total = Fraction(0)
    for (k, kbar), pk in sys.key_pairs(level).items():
        for out0, p0 in f0.distribution(unit(level)).items():
            c0, s0 = out0[:cb], out0[cb:]
            m = sys.decrypt(level, kbar, c0)
            if m is None:
                continue
            for out1, p1 in f1.distribution(c0 + m + s0).items():
                m0, m1, s1 = out1[:mb], out1[mb:2 * mb], out1[2 * mb:]
                for b, mb_ in (("0", m0), ("1", m1)):
                    for c, pc in sys.encrypt(level, k, mb_).items():
                        for out2, p2 in f2.distribution(c0 + m + m0 + m1 + c + s1).items():
                            c1, s2 = out2[:cb], out2[cb:]
                            if c1 == c and on_repeat == "lose":
                                continue
                            mt = sys.decrypt(level, kbar, c1)
                            if mt is None:
                                continue
                            pg = f3.distribution(c0 + m + m0 + m1 + c + c1 + mt + s2).get(b)
                            if pg:
                                total += HALF * pk * p0 * p1 * pc * p2 * pg
    return total


def shannon_reduct(sys: AbstractCryptoSystem, level: int, mu: dict | None = None):
    """The level-l system as a Shannon system; mu defaults to uniform on M.

    The carrier is the union of the key, plaintext and ciphertext strings;
    kappa is keygen's key marginal and pair is read off keygen.
    """
    from .shannon import Distribution, ShannonSystem

    K, M, C = sys.sorts(level)
    pair: dict[str, str] = {}
    for k, kbar in sys.key_pairs(level):
        if pair.setdefault(k, kbar) != kbar:
            raise EnsembleError(f"keygen pairs {k} with several decryption keys at level {level}")
    words = dict.fromkeys([*K, *M, *C, *pair.values()])
    carrier = EncodedSet(words)
    enc = {(k, m): sys.encrypt(level, k, m) for k in K for m in M}
    dec = {}
    for kbar in set(pair.values()):
        for c in C:
            got = sys.decrypt(level, kbar, c)
            if got is not None:
                dec[kbar, c] = got
    kappa = Distribution(carrier, sys.key_marginal(level))
    prior = Distribution.uniform(carrier, M) if mu is None else Distribution(carrier, mu)
    return ShannonSystem(carrier, enc, dec, pair, kappa, prior)


def random_system(rng, kb: int = 1, mb: int = 1, cb: int = 1, max_seed: int = 2, level: int = 1) -> AbstractCryptoSystem:
    """Single-level system with total random keygen and encryption tables.

    Decryption is an arbitrary table, so unique decryption usually fails;
    these instances exercise the advantage computations only.
    """
    from .ensemble import random_fn

    one = lambda f: FeasibleEnsemble((f,), level)  # noqa: E731
    return AbstractCryptoSystem(
        (kb,), (mb,), (cb,),
        keygen=one(random_fn(rng.randint(0, max_seed), level, 2 * kb, rng, 0)),
        enc=one(random_fn(rng.randint(0, max_seed), kb + mb, cb, rng, 0)),
        dec=one(random_fn(0, kb + cb, mb, rng, 0)),
        start=level, name="random",
    )


def deterministic_adversaries(sys: AbstractCryptoSystem, level: int):
    """Every stateless deterministic game-shape adversary at one level.

    Yields (adversary, m0, m1, guess table) with the table indexed like C.
    """
    kb, mb, cb = sys.sort_bits(level)
    _, M, C = sys.sorts(level)
    u = len(unit(level))
    for m0 in M:
        for m1 in M:
            a0 = RandomizedFn.deterministic(u, 2 * mb, lambda x, w=m0 + m1: w)
            for table in itertools.product("01", repeat=len(C)):
                guess = dict(zip(C, table))
                a1 = RandomizedFn.deterministic(cb + 2 * mb, 1, lambda x, g=guess: g[x[:cb]])
                adv = AdversaryPair(
                    FeasibleEnsemble((a0,), level), FeasibleEnsemble((a1,), level), "game",
                    f"m0={m0},m1={m1},guess={''.join(table)}",
                )
                yield adv, m0, m1, "".join(table)
