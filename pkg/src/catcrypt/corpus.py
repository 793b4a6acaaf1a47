"""Running examples, built in code; ``python -m catcrypt.corpus DIR`` writes them as JSON.

Level l of every ensemble system works on l-bit keys, plaintexts and
ciphertexts unless stated otherwise.
"""
from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

from .ensemble import FeasibleEnsemble, RandomizedFn
from .games import AbstractCryptoSystem, AdversaryPair, CCA2Adversary
from .semiring import EncodedSet
from .shannon import Distribution, ShannonSystem, from_dolev_yao
from .symbolic import DolevYaoSystem


def xor(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def flip_last(x: str) -> str:
    return x[:-1] + ("0" if x[-1] == "1" else "1")


# --- Dolev-Yao / Shannon ---------------------------------------------------

def dy_otp(n: int) -> DolevYaoSystem:
    """Vernam cipher on n-bit words: E(k, m) = k xor m, pair = id."""
    a = EncodedSet.bitstrings(n)
    enc = {(k, m): xor(k, m) for k in a for m in a}
    return DolevYaoSystem(a, enc, dict(enc), {k: k for k in a}, frozenset(a))


def dy_shift(n: int = 26) -> DolevYaoSystem:
    a = EncodedSet(range(n))
    enc = {(k, m): (m + k) % n for k in a for m in a}
    dec = {(k, c): (c - k) % n for k in a for c in a}
    return DolevYaoSystem(a, enc, dec, {k: k for k in a}, frozenset(a))


def dy_identity(n: int = 2) -> DolevYaoSystem:
    a = EncodedSet.bitstrings(n)
    enc = {(k, m): m for k in a for m in a}
    return DolevYaoSystem(a, enc, dict(enc), {k: k for k in a}, frozenset(a))


def dy_constant(n: int = 1) -> DolevYaoSystem:
    """Every plaintext encrypts to the same word: decryption cannot work."""
    a = EncodedSet.bitstrings(n)
    zero = a.elements[0]
    enc = {(k, m): zero for k in a for m in a}
    dec = {(k, c): zero for k in a for c in a}
    return DolevYaoSystem(a, enc, dec, {k: k for k in a}, frozenset(a))


def shannon_otp(n: int, mu=None) -> ShannonSystem:
    d = dy_otp(n)
    mu = Distribution.uniform(d.carrier).weights if mu is None else mu
    return from_dolev_yao(d, Distribution.uniform(d.carrier).weights, mu)


def shannon_shift(n: int = 26) -> ShannonSystem:
    d = dy_shift(n)
    u = Distribution.uniform(d.carrier).weights
    return from_dolev_yao(d, u, u)


def shannon_identity(n: int = 2) -> ShannonSystem:
    d = dy_identity(n)
    u = Distribution.uniform(d.carrier).weights
    return from_dolev_yao(d, u, u)


def shannon_fixed_key(n: int = 2) -> ShannonSystem:
    """Vernam cipher whose key distribution is a point mass."""
    d = dy_otp(n)
    key = d.carrier.elements[-1]
    return from_dolev_yao(d, {key: 1}, Distribution.uniform(d.carrier).weights)


def skewed(a: EncodedSet) -> dict:
    """Weight 2/3 on the first element, the rest spread evenly."""
    first, rest = a.elements[0], a.elements[1:]
    if not rest:
        return {first: Fraction(1)}
    return {first: Fraction(2, 3), **{x: Fraction(1, 3 * len(rest)) for x in rest}}


# --- ensemble systems ------------------------------------------------------

def _keygen(levels) -> FeasibleEnsemble:
    """Uniform l-bit key k, output k :: k (symmetric)."""
    return FeasibleEnsemble(
        tuple(RandomizedFn.from_callable(n, n, 2 * n, lambda rho, _x: rho + rho) for n in levels),
        levels[0], "keygen",
    )


def _det(levels, s, t, fn, name) -> FeasibleEnsemble:
    return FeasibleEnsemble(
        tuple(RandomizedFn.deterministic(s(n), t(n), lambda x, n=n: fn(n, x)) for n in levels),
        levels[0], name,
    )


def _system(levels, enc, dec, name, enc_seed=None) -> AbstractCryptoSystem:
    levels = tuple(levels)
    if enc_seed is None:
        enc_ens = _det(levels, lambda n: 2 * n, lambda n: n, enc, "enc")
    else:
        enc_ens = FeasibleEnsemble(
            tuple(
                RandomizedFn.from_callable(enc_seed(n), 2 * n, n, lambda rho, x, n=n: enc(n, rho, x))
                for n in levels
            ),
            levels[0], "enc",
        )
    return AbstractCryptoSystem(
        key_bits=levels, msg_bits=levels, ct_bits=levels,
        keygen=_keygen(levels),
        enc=enc_ens,
        dec=_det(levels, lambda n: 2 * n, lambda n: n, dec, "dec"),
        pair=_det(levels, lambda n: n, lambda n: n, lambda n, k: k, "pair"),
        start=levels[0], name=name,
    )


def otp_system(max_level: int = 5) -> AbstractCryptoSystem:
    """Fresh uniform key per level; E(k, m) = k xor m."""
    f = lambda n, x: xor(x[:n], x[n:])  # noqa: E731
    return _system(range(1, max_level + 1), f, f, "otp")


def identity_system(max_level: int = 5) -> AbstractCryptoSystem:
    """E(k, m) = m; the key is generated and ignored."""
    f = lambda n, x: x[n:]  # noqa: E731
    return _system(range(1, max_level + 1), f, f, "identity")


def noisy_system(max_level: int = 3) -> AbstractCryptoSystem:
    """E(k, m) = m with probability 1/2, a uniform word otherwise.

    Not uniquely decryptable: only the IND-CPA advantage is meaningful.
    """
    enc = lambda n, rho, x: x[n:] if rho[0] == "0" else rho[1:]  # noqa: E731
    dec = lambda n, x: x[n:]  # noqa: E731
    return _system(range(1, max_level + 1), enc, dec, "noisy", enc_seed=lambda n: n + 1)


def malleable_otp_system(max_level: int = 2) -> AbstractCryptoSystem:
    """The Vernam cipher under a fresh key per game, reused by the decryption oracle."""
    sys_ = otp_system(max_level)
    return AbstractCryptoSystem(
        sys_.key_bits, sys_.msg_bits, sys_.ct_bits, sys_.keygen, sys_.enc, sys_.dec, sys_.pair,
        name="malleable-otp",
    )


def useless_oracle_system(max_level: int = 2) -> AbstractCryptoSystem:
    """Ciphertexts are fresh random words independent of the plaintext."""
    enc = lambda n, rho, x: rho  # noqa: E731
    dec = lambda n, x: "0" * n  # noqa: E731
    return _system(range(1, max_level + 1), enc, dec, "useless-oracle", enc_seed=lambda n: n)


def _ens(levels, r, s, t, fn, name) -> FeasibleEnsemble:
    return FeasibleEnsemble(
        tuple(RandomizedFn.from_callable(r(n), s(n), t(n), lambda rho, x, n=n: fn(n, rho, x)) for n in levels),
        levels[0], name,
    )


def cpa_adversaries(max_level: int = 5) -> list[AdversaryPair]:
    """Game-shape adversaries for the l-bit systems above."""
    levels = tuple(range(1, max_level + 1))
    pick = _ens(levels, lambda n: 0, lambda n: n, lambda n: 2 * n, lambda n, rho, x: "0" * n + "1" * n, "pick")
    a1_in = lambda n: 3 * n  # noqa: E731
    first_bit = _ens(levels, lambda n: 0, a1_in, lambda n: 1, lambda n, rho, x: x[0], "first-bit")
    fixed = _ens(levels, lambda n: 0, a1_in, lambda n: 1, lambda n, rho, x: "0", "fixed")
    coin = _ens(levels, lambda n: 1, a1_in, lambda n: 1, lambda n, rho, x: rho, "coin")
    return [
        AdversaryPair(pick, first_bit, "game", "distinguisher"),
        AdversaryPair(pick, fixed, "game", "fixed-guess"),
        AdversaryPair(pick, coin, "game", "coin-flip"),
    ]


def keyed_adversaries(max_level: int = 5) -> list[AdversaryPair]:
    """Diagram-shape adversaries, whose A0 receives the key.

    ``key-blind`` ignores the key and behaves like the game-shape
    distinguisher. ``key-aware`` asks for m0 = k and m1 = not k, which
    tells the two Vernam ciphertexts apart with certainty.
    """
    levels = tuple(range(1, max_level + 1))
    blind = _ens(levels, lambda n: 0, lambda n: n, lambda n: 2 * n, lambda n, rho, x: "0" * n + "1" * n, "blind")
    aware = _ens(levels, lambda n: 0, lambda n: n, lambda n: 2 * n, lambda n, rho, x: x + xor(x, "1" * n), "aware")
    first_bit = _ens(levels, lambda n: 0, lambda n: 3 * n, lambda n: 1, lambda n, rho, x: x[0], "first-bit")
    return [
        AdversaryPair(blind, first_bit, "diagram", "key-blind"),
        AdversaryPair(aware, first_bit, "diagram", "key-aware"),
    ]


def cca2_adversaries(max_level: int = 2) -> list[CCA2Adversary]:
    """Bit-flip attack on a malleable cipher, and an adversary ignoring the oracle.

    Both submit c0 = 0^l before the challenge, choose m0 = 0^l and
    m1 = 0^(l-1)1, and query c xor 0^(l-1)1 afterwards.
    """
    levels = tuple(range(1, max_level + 1))
    r0 = lambda n: 0  # noqa: E731
    a0 = _ens(levels, r0, lambda n: n, lambda n: n, lambda n, rho, x: "0" * n, "query")
    a1 = _ens(levels, r0, lambda n: 2 * n, lambda n: 2 * n, lambda n, rho, x: "0" * n + "0" * (n - 1) + "1", "choose")
    # A2 input: c0 :: m :: m0 :: m1 :: c; the challenge c sits at [4n, 5n)
    a2 = _ens(levels, r0, lambda n: 5 * n, lambda n: n, lambda n, rho, x: flip_last(x[4 * n:5 * n]), "flip")
    # A3 input: c0 :: m :: m0 :: m1 :: c :: c1 :: m~; m~ sits at [6n, 7n)
    a3_in = lambda n: 7 * n  # noqa: E731
    guess = _ens(levels, r0, a3_in, lambda n: 1, lambda n, rho, x: "0" if x[-1] == "1" else "1", "unflip")
    ignore = _ens(levels, r0, a3_in, lambda n: 1, lambda n, rho, x: "0", "ignore")
    return [
        CCA2Adversary(a0, a1, a2, guess, name="bit-flip"),
        CCA2Adversary(a0, a1, a2, ignore, name="oracle-ignoring"),
    ]


def write_corpus(directory) -> list[Path]:
    from . import io

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    docs = {}
    for n in (1, 2, 3):
        docs[f"dy-otp-{n}"] = io.dump_dolev_yao(dy_otp(n), f"otp-{n}")
        docs[f"shannon-otp-{n}"] = io.dump_shannon(shannon_otp(n), f"otp-{n}")
    docs["dy-shift26"] = io.dump_dolev_yao(dy_shift(26), "shift26")
    docs["dy-identity"] = io.dump_dolev_yao(dy_identity(2), "identity")
    docs["dy-constant"] = io.dump_dolev_yao(dy_constant(1), "constant")
    docs["shannon-shift26"] = io.dump_shannon(shannon_shift(26), "shift26")
    docs["shannon-identity"] = io.dump_shannon(shannon_identity(2), "identity")
    docs["shannon-fixed-key"] = io.dump_shannon(shannon_fixed_key(2), "fixed-key")
    docs["ind-otp"] = io.dump_abstract(otp_system(5))
    docs["ind-identity"] = io.dump_abstract(identity_system(5))
    docs["ind-noisy"] = io.dump_abstract(noisy_system(3))
    docs["cca2-malleable-otp"] = io.dump_abstract(malleable_otp_system(2))
    docs["cca2-useless-oracle"] = io.dump_abstract(useless_oracle_system(2))
    docs["cpa-adversaries"] = io.dump_adversaries(cpa_adversaries(5), "ind-cpa")
    docs["cpa-keyed-adversaries"] = io.dump_adversaries(keyed_adversaries(3), "ind-cpa")
    docs["cca2-adversaries"] = io.dump_adversaries(cca2_adversaries(2), "ind-cca2")
    docs["policy-default"] = {"L": 5, "threshold": "2^-l", "strict": False}
    docs["policy-poly"] = {"L": 5, "threshold": "1/l^2", "strict": False}
    written = []
    for name, doc in docs.items():
        p = d / f"{name}.json"
        io.write_json(doc, p)
        written.append(p)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data"
    for p in write_corpus(target):
        print(p)
