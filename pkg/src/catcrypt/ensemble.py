"""Randomized boolean functions, security-parameter ensembles, negligibility.

A ``RandomizedFn`` is a partial table ``seed x input -> output`` over fixed
lengths, stored densely (``-1`` marks undefined). Bitstrings are big-endian,
so the seed ``rho2 :: rho1`` of a composite has index ``rho2 << r1 | rho1``.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .semiring import RATIONAL, EncodedSet, Matrix, Stochasticity, is_stochastic
from .verdict import Verdict

MAX_TABLE_BITS = 24


class EnsembleError(ValueError):
    pass


def bits(i: int, n: int) -> str:
    return format(i, "b").zfill(n) if n else ""


def unbits(b: str) -> int:
    return int(b, 2) if b else 0


def _check_bitstring(b: str, n: int, what: str):
    if len(b) != n or any(ch not in "01" for ch in b):
        raise EnsembleError(f"{what} {b!r} is not a bitstring of length {n}")


class RandomizedFn:
    """Partial map 2^r x 2^s -> 2^t given by its full table."""

    __slots__ = ("seed_len", "in_len", "out_len", "table", "__dict__")

    def __init__(self, seed_len: int, in_len: int, out_len: int, table):
        if min(seed_len, in_len, out_len) < 0:
            raise EnsembleError("lengths must be nonnegative")
        if seed_len + in_len > MAX_TABLE_BITS:
            raise EnsembleError(f"table with {seed_len}+{in_len} index bits is too large")
        arr = np.asarray(table, dtype=np.int64).reshape(2 ** seed_len, 2 ** in_len)
        if arr.size and (arr.min() < -1 or arr.max() >= 2 ** out_len):
            raise EnsembleError(f"table values must lie in [-1, 2^{out_len})")
        arr.setflags(write=False)
        self.seed_len = seed_len
        self.in_len = in_len
        self.out_len = out_len
        self.table = arr

    @classmethod
    def from_mapping(cls, r: int, s: int, t: int, mapping: Mapping[tuple[str, str], str]) -> RandomizedFn:
        table = np.full((2 ** r, 2 ** s), -1, dtype=np.int64)
        for (rho, x), y in mapping.items():
            _check_bitstring(rho, r, "seed")
            _check_bitstring(x, s, "input")
            _check_bitstring(y, t, "output")
            table[unbits(rho), unbits(x)] = unbits(y)
        return cls(r, s, t, table)

    @classmethod
    def from_callable(cls, r: int, s: int, t: int, fn: Callable[[str, str], str | None]) -> RandomizedFn:
        table = np.full((2 ** r, 2 ** s), -1, dtype=np.int64)
        for i in range(2 ** r):
            rho = bits(i, r)
            for j in range(2 ** s):
                y = fn(rho, bits(j, s))
                if y is not None:
                    _check_bitstring(y, t, "output")
                    table[i, j] = unbits(y)
        return cls(r, s, t, table)

    @classmethod
    def deterministic(cls, s: int, t: int, fn: Callable[[str], str | None]) -> RandomizedFn:
        return cls.from_callable(0, s, t, lambda _rho, x: fn(x))

    def __call__(self, rho: str, x: str) -> str | None:
        _check_bitstring(rho, self.seed_len, "seed")
        _check_bitstring(x, self.in_len, "input")
        y = int(self.table[unbits(rho), unbits(x)])
        return None if y < 0 else bits(y, self.out_len)

    def __eq__(self, other):
        if not isinstance(other, RandomizedFn):
            return NotImplemented
        return self.profile == other.profile and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.profile, self.table.tobytes()))

    def __repr__(self):
        return f"RandomizedFn(r={self.seed_len}, s={self.in_len}, t={self.out_len})"

    @property
    def profile(self) -> tuple[int, int, int]:
        return self.seed_len, self.in_len, self.out_len

    @property
    def is_deterministic(self) -> bool:
        return self.seed_len == 0

    def to_mapping(self) -> dict[str, str]:
        """Defined entries keyed "seed,input" (JSON table form)."""
        out = {}
        r, s, t = self.profile
        for i, j in zip(*np.nonzero(self.table >= 0)):
            out[f"{bits(int(i), r)},{bits(int(j), s)}"] = bits(int(self.table[i, j]), t)
        return out

    @cached_property
    def counts(self) -> np.ndarray:
        """counts[x, y] = number of seeds sending input x to output y."""
        return _kernels.seed_histogram(self.table, 2 ** self.out_len)

    def distribution(self, x: str) -> dict[str, Fraction]:
        """Output distribution on input x (mass < 1 where undefined)."""
        _check_bitstring(x, self.in_len, "input")
        row = self.counts[unbits(x)]
        den = 2 ** self.seed_len
        return {bits(int(y), self.out_len): Fraction(int(row[y]), den) for y in np.nonzero(row)[0]}

    def matrix(self, rows: EncodedSet | None = None, cols: EncodedSet | None = None) -> Matrix:
        """Substochastic matrix entry(a, b) = Pr(code(b) <- g(code(a)))."""
        rows = EncodedSet.bitstrings(self.in_len) if rows is None else rows
        cols = EncodedSet.bitstrings(self.out_len) if cols is None else cols
        for es, n, what in ((rows, self.in_len, "row"), (cols, self.out_len, "column")):
            if len(es) and es.code_length != n:
                raise EnsembleError(f"{what} codes must have length {n}")
        den = 2 ** self.seed_len
        counts = self.counts
        ci = [unbits(c) for c in cols.codes]
        entries = tuple(
            tuple(Fraction(int(counts[unbits(a), j]), den) for j in ci) for a in rows.codes
        )
        return Matrix._trusted(RATIONAL, rows, cols, entries)


def seed_prob(g: RandomizedFn, x: str, y: str) -> Fraction:
    """#{rho | g(rho, x) = y} / 2^r."""
    _check_bitstring(x, g.in_len, "input")
    _check_bitstring(y, g.out_len, "output")
    hits = int(np.count_nonzero(g.table[:, unbits(x)] == unbits(y)))
    return Fraction(hits, 2 ** g.seed_len)


def identity_fn(n: int) -> RandomizedFn:
    """iota(<>, x) = x on n-bit strings."""
    return RandomizedFn(0, n, n, np.arange(2 ** n, dtype=np.int64).reshape(1, 2 ** n))


def rcompose(g: RandomizedFn, f: RandomizedFn) -> RandomizedFn:
    """(g . f)(rho2 :: rho1, x) = g(rho2, f(rho1, x)); undefined if either is."""
    if g.in_len != f.out_len:
        raise EnsembleError(f"cannot compose: outer input length {g.in_len} != inner output length {f.out_len}")
    if g.seed_len + f.seed_len + f.in_len > MAX_TABLE_BITS:
        raise EnsembleError("composite table is too large")
    table = _kernels.compose_tables(g.table, f.table)
    return RandomizedFn(g.seed_len + f.seed_len, f.in_len, g.out_len, table)


def restrict(f: RandomizedFn, n: int) -> RandomizedFn:
    """Restriction to n-bit inputs, embedded by right zero-padding."""
    if n > f.in_len:
        raise EnsembleError(f"cannot restrict {f.in_len}-bit inputs to {n} bits")
    shift = f.in_len - n
    cols = np.arange(2 ** n, dtype=np.int64) << shift
    return RandomizedFn(f.seed_len, n, f.out_len, f.table[:, cols])


@dataclass(frozen=True, eq=False)
class FeasibleEnsemble:
    """Functions psi_l for consecutive levels l = start, start+1, ...

    Input lengths must strictly increase (each level is a separate layer of
    one partial function on strings); seed and output lengths may not
    decrease.
    """

    levels: tuple[RandomizedFn, ...]
    start: int = 1
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for a, b in zip(self.levels, self.levels[1:]):
            if not a.in_len < b.in_len:
                raise EnsembleError(f"{self.name or 'ensemble'}: input lengths must strictly increase")
            if a.seed_len > b.seed_len or a.out_len > b.out_len:
                raise EnsembleError(f"{self.name or 'ensemble'}: seed and output lengths may not decrease")

    def __len__(self):
        return len(self.levels)

    def __eq__(self, other):
        if not isinstance(other, FeasibleEnsemble):
            return NotImplemented
        return self.start == other.start and self.levels == other.levels

    def __hash__(self):
        return hash((self.start, self.levels))

    @property
    def level_numbers(self) -> range:
        return range(self.start, self.start + len(self.levels))

    def at(self, level: int) -> RandomizedFn:
        i = level - self.start
        if not 0 <= i < len(self.levels):
            raise EnsembleError(f"{self.name or 'ensemble'} has no level {level}")
        return self.levels[i]

    def profile(self, which: str) -> list[int]:
        attr = {"r": "seed_len", "s": "in_len", "t": "out_len"}[which]
        return [getattr(f, attr) for f in self.levels]

    @property
    def deterministic(self) -> bool:
        return all(f.seed_len == 0 for f in self.levels)

    def matrices(self) -> StochasticEnsemble:
        return StochasticEnsemble(tuple(f.matrix() for f in self.levels), self.start)


def identity_ensemble(lengths: Sequence[int], start: int = 1) -> FeasibleEnsemble:
    return FeasibleEnsemble(tuple(identity_fn(n) for n in lengths), start, "id")


@dataclass(frozen=True)
class StochasticEnsemble:
    levels: tuple[Matrix, ...]
    start: int = 1

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for i, m in enumerate(self.levels):
            if is_stochastic(m) == Stochasticity.NEITHER:
                raise EnsembleError(f"level {self.start + i} is not substochastic")

    @property
    def level_numbers(self) -> range:
        return range(self.start, self.start + len(self.levels))

    def at(self, level: int) -> Matrix:
        return self.levels[level - self.start]


def realizes(Psi: StochasticEnsemble, psi: FeasibleEnsemble) -> Verdict:
    """Every stored level of Psi matches the seed-counting probabilities of psi."""
    for level in Psi.level_numbers:
        m = Psi.at(level)
        if level not in psi.level_numbers:
            return Verdict.fail(level=level, reason="no function at this level")
        f = psi.at(level)
        if m.rows.code_length not in (f.in_len, None) or m.cols.code_length not in (f.out_len, None):
            raise EnsembleError(f"level {level}: code lengths do not match the function's profile")
        counts = f.counts
        den = 2 ** f.seed_len
        for i, (a, ca) in enumerate(zip(m.rows.elements, m.rows.codes)):
            row = counts[unbits(ca)]
            for j, (b, cb) in enumerate(zip(m.cols.elements, m.cols.codes)):
                p = Fraction(int(row[unbits(cb)]), den)
                if m.entries[i][j] != p:
                    return Verdict.fail(level=level, row=a, col=b, matrix=m.entries[i][j], prob=p)
    return Verdict.ok()


def alignment(theta: FeasibleEnsemble, psi: FeasibleEnsemble, mode: str = "composable") -> dict[int, int]:
    """Level of theta used at each level of psi.

    ``composable``: smallest level whose input length covers psi's output
    length. ``literal``: smallest level whose output length covers psi's
    input length.
    """
    out = {}
    for level in psi.level_numbers:
        f = psi.at(level)
        for cand in theta.level_numbers:
            g = theta.at(cand)
            if (g.in_len >= f.out_len) if mode == "composable" else (g.out_len >= f.in_len):
                out[level] = cand
                break
        else:
            raise EnsembleError(f"no level of {theta.name or 'theta'} aligns with level {level} within the stored horizon")
    return out


def ensemble_compose(theta: FeasibleEnsemble, psi: FeasibleEnsemble, mode: str = "composable") -> FeasibleEnsemble:
    """psi, then theta: level l is theta restricted at its aligned level, after psi_l."""
    if mode not in ("composable", "literal"):
        raise EnsembleError(f"unknown alignment mode {mode!r}")
    aligned = alignment(theta, psi, mode)
    levels = []
    for level in psi.level_numbers:
        f = psi.at(level)
        g = theta.at(aligned[level])
        width = f.out_len if mode == "composable" else f.in_len
        levels.append(rcompose(restrict(g, width), f))
    name = f"{theta.name or 'theta'}.{psi.name or 'psi'}"
    return FeasibleEnsemble(tuple(levels), psi.start, name)


_POLY = re.compile(r"^\s*1\s*/\s*l\s*(?:\^\s*(\d+))?\s*$")
_EXP = re.compile(r"^\s*2\s*\^\s*-\s*l\s*$")


def parse_threshold(text: str) -> Callable[[int], Fraction]:
    """``"1/l^c"`` (c >= 0) or ``"2^-l"``, or a constant rational like ``"0"``."""
    m = _POLY.match(text)
    if m:
        c = int(m.group(1) or 1)
        return lambda l: Fraction(1, l ** c) if l >= 1 else Fraction(1)
    if _EXP.match(text):
        return lambda l: Fraction(1, 2 ** l) if l >= 0 else Fraction(1)
    try:
        v = Fraction(text.strip())
    except ValueError:
        raise EnsembleError(f"unknown threshold {text!r}; use '1/l^c', '2^-l' or a constant") from None
    return lambda l: v


@dataclass(frozen=True)
class NegligibilityPolicy:
    """Finite-horizon stand-in for "negligible": |x_l - y_l| <= t(l) for l <= L.

    ``strict`` switches the comparison to ``<``.
    """

    max_level: int = 8
    threshold: str = "2^-l"
    strict: bool = False

    def __post_init__(self):
        if self.max_level < 0:
            raise EnsembleError("max_level must be nonnegative")
        f = parse_threshold(self.threshold)
        values = [f(l) for l in range(0, self.max_level + 1)]
        if any(not 0 <= v <= 1 for v in values):
            raise EnsembleError(f"threshold {self.threshold!r} leaves [0, 1] within the horizon")
        if any(a < b for a, b in zip(values, values[1:])):
            raise EnsembleError(f"threshold {self.threshold!r} is not nonincreasing")

    @cached_property
    def _fn(self):
        return parse_threshold(self.threshold)

    def t(self, level: int) -> Fraction:
        return self._fn(level)

    def close(self, level: int, x, y) -> bool:
        d = abs(Fraction(x) - Fraction(y))
        return d < self.t(level) if self.strict else d <= self.t(level)

    def predicate(self, level: int):
        def eq(x, y):
            return self.close(level, x, y)

        return eq

    def describe(self) -> str:
        op = "<" if self.strict else "<="
        return f"|x_l - y_l| {op} {self.threshold} for levels l <= {self.max_level}"

    def to_json(self):
        return {"L": self.max_level, "threshold": self.threshold, "strict": self.strict}


def _as_levels(x) -> dict[int, Fraction]:
    if isinstance(x, Mapping):
        return {int(k): Fraction(v) for k, v in x.items()}
    return {i + 1: Fraction(v) for i, v in enumerate(x)}


def first_violation(sigma, tau, policy: NegligibilityPolicy) -> int | None:
    s, t = _as_levels(sigma), _as_levels(tau)
    if set(s) != set(t):
        raise EnsembleError("sequences cover different levels")
    for level in sorted(s):
        if level > policy.max_level:
            break
        if not policy.close(level, s[level], t[level]):
            return level
    return None


def negligible_equiv(sigma, tau, policy: NegligibilityPolicy) -> bool:
    """sigma ~ tau within the policy's horizon.

    Sequences are mappings level -> rational, or lists starting at level 1.
    """
    return first_violation(sigma, tau, policy) is None


def random_fn(r: int, s: int, t: int, rng: random.Random, undefined: float = 0.2) -> RandomizedFn:
    """Random table; each entry is undefined with probability ``undefined``."""
    top = 2 ** t
    table = [-1 if rng.random() < undefined else rng.randrange(top) for _ in range(2 ** (r + s))]
    return RandomizedFn(r, s, t, table)


def random_ensemble(
    rng: random.Random, n_levels: int = 3, max_seed: int = 2, max_out: int = 3,
    in_lens: Sequence[int] | None = None, undefined: float = 0.2,
) -> FeasibleEnsemble:
    """Random ensemble with input lengths 1, 2, ... (or ``in_lens``) and monotone r, t."""
    in_lens = list(range(1, n_levels + 1)) if in_lens is None else list(in_lens)
    rs = sorted(rng.randint(0, max_seed) for _ in in_lens)
    ts = sorted(rng.randint(1, max_out) for _ in in_lens)
    return FeasibleEnsemble(
        tuple(random_fn(r, s, t, rng, undefined) for r, s, t in zip(rs, in_lens, ts)), 1, "random",
    )
