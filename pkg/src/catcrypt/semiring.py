"""Dense exact matrices over pluggable semirings.

A ``Matrix`` is a morphism ``rows -> cols``: row labels index the inputs,
column labels the outputs, so a stochastic operator has rows summing to 1
and ``compose(f, g)`` means "f, then g" (the matrix product ``f @ g``).
Relations read the same way: ``entry(a, b)`` is ``a R b``.
"""
from __future__ import annotations

import enum
import math
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from . import _kernels
from .rational import fmt


class MatrixError(ValueError):
    """Raised for dimension, object or semiring mismatches."""


@dataclass(frozen=True)
class Semiring:
    """(carrier, add, mul, zero, one) with an optional total order."""

    name: str
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    coerce: Callable[[Any], Any] = field(default=lambda x: x, compare=False)
    leq: Callable[[Any, Any], bool] | None = field(default=None, compare=False)
    carrier: str = ""

    def sum(self, xs: Iterable) -> Any:
        return reduce(self.add, xs, self.zero)

    def __repr__(self):
        return f"Semiring({self.name})"


def _coerce_bool(x):
    if x in (0, 1, True, False):
        return bool(x)
    raise MatrixError(f"Boolean entry must be 0 or 1, got {x!r}")


def _coerce_rational(x):
    if isinstance(x, float):
        raise MatrixError(f"float entries are not exact: {x!r}")
    return Fraction(x)


BOOLEAN = Semiring(
    "boolean", operator.or_, operator.and_, False, True,
    coerce=_coerce_bool, leq=operator.le, carrier="{0,1}",
)
RATIONAL = Semiring(
    "rational", operator.add, operator.mul, Fraction(0), Fraction(1),
    coerce=_coerce_rational, leq=operator.le, carrier="Q (exact)",
)


class EncodedSet:
    """A finite ordered set whose elements carry injective bitstring codes.

    Default codes are the big-endian binary indices at the minimal common width.
    """

    __slots__ = ("elements", "codes", "_index", "__dict__")

    def __init__(self, elements: Iterable[Hashable], codes: Sequence[str] | dict | None = None):
        elements = tuple(elements)
        if codes is None:
            width = max(len(elements) - 1, 0).bit_length()
            codes = tuple(format(i, "b").zfill(width) if width else "" for i in range(len(elements)))
        elif isinstance(codes, dict):
            codes = tuple(codes[e] for e in elements)
        else:
            codes = tuple(codes)
        if len(codes) != len(elements):
            raise MatrixError("one code per element required")
        index = {}
        for i, e in enumerate(elements):
            if e in index:
                raise MatrixError(f"duplicate element {e!r}")
            index[e] = i
        if len(set(codes)) != len(codes):
            raise MatrixError("codes must be injective")
        for c in codes:
            if any(ch not in "01" for ch in c):
                raise MatrixError(f"code {c!r} is not a bitstring")
        self.elements = elements
        self.codes = codes
        self._index = index

    @classmethod
    def bitstrings(cls, n: int) -> EncodedSet:
        """All bitstrings of length n, each encoded by itself."""
        words = tuple(format(i, "b").zfill(n) if n else "" for i in range(2 ** n))
        return cls(words, words)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._index

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, EncodedSet):
            return NotImplemented
        return self.elements == other.elements and self.codes == other.codes

    def __hash__(self):
        return hash((self.elements, self.codes))

    def __repr__(self):
        if len(self) <= 6:
            return f"EncodedSet({list(self.elements)!r})"
        return f"EncodedSet(<{len(self)} elements>)"

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise MatrixError(f"{x!r} is not an element of {self!r}") from None

    def code(self, x) -> str:
        return self.codes[self.index(x)]

    @cached_property
    def code_length(self) -> int | None:
        """Common code length, or None when codes have mixed lengths."""
        lengths = {len(c) for c in self.codes}
        return lengths.pop() if len(lengths) == 1 else None

    def product(self, other: EncodedSet) -> EncodedSet:
        """Pairs in lexicographic (left, right) order; codes concatenate."""
        return EncodedSet(
            ((a, b) for a in self.elements for b in other.elements),
            (ca + cb for ca in self.codes for cb in other.codes),
        )

    def subset(self, keep: Iterable) -> EncodedSet:
        keep = set(keep)
        pairs = [(e, c) for e, c in zip(self.elements, self.codes) if e in keep]
        return EncodedSet((e for e, _ in pairs), (c for _, c in pairs))


ONE = EncodedSet(("*",), ("",))
TWO = EncodedSet((0, 1), ("0", "1"))


def label(x) -> str:
    """Printable form of an element label (tuples come from products)."""
    if isinstance(x, tuple):
        return "(" + ",".join(label(y) for y in x) + ")"
    return str(x)


class Matrix:
    """Immutable dense matrix of a morphism ``rows -> cols``."""

    __slots__ = ("semiring", "rows", "cols", "entries")

    def __init__(self, semiring: Semiring, rows: EncodedSet, cols: EncodedSet, entries):
        data = tuple(tuple(semiring.coerce(x) for x in row) for row in entries)
        if len(data) != len(rows) or any(len(r) != len(cols) for r in data):
            raise MatrixError(
                f"entries are not {len(rows)}x{len(cols)} for rows {rows!r}, cols {cols!r}"
            )
        object.__setattr__(self, "semiring", semiring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", data)

    @classmethod
    def _trusted(cls, semiring, rows, cols, entries):
        m = object.__new__(cls)
        object.__setattr__(m, "semiring", semiring)
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "cols", cols)
        object.__setattr__(m, "entries", entries)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def entry(self, r, c):
        return self.entries[self.rows.index(r)][self.cols.index(c)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.semiring == other.semiring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.semiring.name, self.rows, self.cols, self.entries))

    def __repr__(self):
        if len(self.rows) * len(self.cols) <= 16:
            body = [[fmt(x) for x in row] for row in self.entries]
            return f"Matrix({self.semiring.name}, {body})"
        return f"Matrix({self.semiring.name}, {len(self.rows)}x{len(self.cols)})"

    @property
    def T(self) -> Matrix:
        return Matrix._trusted(
            self.semiring, self.cols, self.rows, tuple(zip(*self.entries)) or tuple(() for _ in self.cols)
        )

    def row_sums(self):
        return [self.semiring.sum(row) for row in self.entries]

    def nonzero(self):
        z = self.semiring.zero
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                if x != z:
                    yield i, j, x


def matrix(semiring: Semiring, rows: EncodedSet, cols: EncodedSet, entries) -> Matrix:
    return Matrix(semiring, rows, cols, entries)


def identity(a: EncodedSet, semiring: Semiring = RATIONAL) -> Matrix:
    z, o = semiring.zero, semiring.one
    n = len(a)
    return Matrix._trusted(semiring, a, a, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))


def from_function(f: Callable, a: EncodedSet, b: EncodedSet, semiring: Semiring = RATIONAL) -> Matrix:
    """0/1 matrix of a total map with entry(x, f(x)) = 1."""
    z, o = semiring.zero, semiring.one
    rows = []
    for x in a:
        y = f(x)
        if y not in b:
            raise MatrixError(f"f({x!r}) = {y!r} is not an element of the target {b!r}")
        j = b.index(y)
        rows.append(tuple(o if k == j else z for k in range(len(b))))
    return Matrix._trusted(semiring, a, b, tuple(rows))


def _check_composable(f: Matrix, g: Matrix):
    if f.semiring != g.semiring:
        raise MatrixError(f"semiring mismatch: {f.semiring.name} vs {g.semiring.name}")
    if f.cols != g.rows:
        raise MatrixError(f"cannot compose: target {f.cols!r} of the first factor differs from source {g.rows!r} of the second")


_INT64_SAFE = 2 ** 62


def _rational_compose(f: Matrix, g: Matrix):
    n, k, m = len(f.rows), len(f.cols), len(g.cols)
    if n == 0 or m == 0:
        return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))
    df = math.lcm(1, *(x.denominator for row in f.entries for x in row))
    dg = math.lcm(1, *(x.denominator for row in g.entries for x in row))
    nf = [[x.numerator * (df // x.denominator) for x in row] for row in f.entries]
    ng = [[x.numerator * (dg // x.denominator) for x in row] for row in g.entries]
    bound_f = max((abs(x) for row in nf for x in row), default=0)
    bound_g = max((abs(x) for row in ng for x in row), default=0)
    if k and bound_f * bound_g * k < _INT64_SAFE:
        prod = _kernels.int_matmul(
            np.array(nf, dtype=np.int64).reshape(n, k), np.array(ng, dtype=np.int64).reshape(k, m)
        ).tolist()
    else:
        prod = [[0] * m for _ in range(n)]
        for i in range(n):
            row = prod[i]
            for j in range(k):
                x = nf[i][j]
                if x:
                    gj = ng[j]
                    for c in range(m):
                        row[c] += x * gj[c]
    den = df * dg
    return tuple(tuple(Fraction(v, den) for v in row) for row in prod)


def _boolean_compose(f: Matrix, g: Matrix):
    n, k, m = len(f.rows), len(f.cols), len(g.cols)
    a = np.array(f.entries, dtype=np.uint8).reshape(n, k)
    b = np.array(g.entries, dtype=np.uint8).reshape(k, m)
    out = _kernels.bool_matmul(a, b).tolist()
    return tuple(tuple(bool(x) for x in row) for row in out)


def _generic_compose(f: Matrix, g: Matrix):
    sr = f.semiring
    gt = list(zip(*g.entries)) if g.entries else [() for _ in g.cols]
    return tuple(
        tuple(reduce(sr.add, (sr.mul(x, y) for x, y in zip(row, col)), sr.zero) for col in gt)
        for row in f.entries
    )


def compose(f: Matrix, g: Matrix) -> Matrix:
    """f then g: entry(a, c) = sum over b of f(a, b) * g(b, c)."""
    _check_composable(f, g)
    if f.semiring == BOOLEAN:
        entries = _boolean_compose(f, g)
    elif f.semiring == RATIONAL:
        entries = _rational_compose(f, g)
    else:
        entries = _generic_compose(f, g)
    return Matrix._trusted(f.semiring, f.rows, g.cols, entries)


def kronecker(f: Matrix, g: Matrix) -> Matrix:
    """f x g on product objects: entry((a,a'),(b,b')) = f(a,b) * g(a',b')."""
    if f.semiring != g.semiring:
        raise MatrixError(f"semiring mismatch: {f.semiring.name} vs {g.semiring.name}")
    mul = f.semiring.mul
    entries = tuple(
        tuple(mul(x, y) for x in frow for y in grow)
        for frow in f.entries
        for grow in g.entries
    )
    return Matrix._trusted(f.semiring, f.rows.product(g.rows), f.cols.product(g.cols), entries)


class Stochasticity(str, enum.Enum):
    STOCHASTIC = "stochastic"
    SUBSTOCHASTIC = "substochastic"
    NEITHER = "neither"


def is_stochastic(f: Matrix) -> Stochasticity:
    if f.semiring != RATIONAL:
        raise MatrixError("stochasticity is defined for rational matrices")
    if any(x < 0 for row in f.entries for x in row):
        return Stochasticity.NEITHER
    sums = f.row_sums()
    if all(s == 1 for s in sums):
        return Stochasticity.STOCHASTIC
    if all(s <= 1 for s in sums):
        return Stochasticity.SUBSTOCHASTIC
    return Stochasticity.NEITHER


def convex_mix(p, f: Matrix, g: Matrix) -> Matrix:
    """Entrywise p*f + (1-p)*g."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise MatrixError(f"mixing weight {p} outside [0, 1]")
    if f.semiring != RATIONAL or g.semiring != RATIONAL:
        raise MatrixError("convex mixtures need rational matrices")
    if f.rows != g.rows or f.cols != g.cols:
        raise MatrixError(f"shape mismatch: {f.shape} vs {g.shape}")
    q = 1 - p
    entries = tuple(
        tuple(p * x + q * y for x, y in zip(fr, gr)) for fr, gr in zip(f.entries, g.entries)
    )
    return Matrix._trusted(RATIONAL, f.rows, f.cols, entries)


def column(values: dict, target: EncodedSet) -> Matrix:
    """Point ``1 -> target`` with the given weights (missing labels are 0)."""
    return Matrix(RATIONAL, ONE, target, [[values.get(x, 0) for x in target]])


def constant(value, rows: EncodedSet, cols: EncodedSet, semiring: Semiring = RATIONAL) -> Matrix:
    v = semiring.coerce(value)
    return Matrix._trusted(semiring, rows, cols, tuple(tuple(v for _ in cols) for _ in rows))


def to_boolean(f: Matrix) -> Matrix:
    """Support relation of a rational matrix."""
    return Matrix._trusted(BOOLEAN, f.rows, f.cols, tuple(tuple(x != 0 for x in row) for row in f.entries))


def reindex(f: Matrix, rows: EncodedSet | None = None, cols: EncodedSet | None = None) -> Matrix:
    """Same entries over equinumerous objects, matched by position (e.g. 1xA ~ A)."""
    rows = f.rows if rows is None else rows
    cols = f.cols if cols is None else cols
    if len(rows) != len(f.rows) or len(cols) != len(f.cols):
        raise MatrixError(f"cannot reindex {f.shape} matrix onto {len(rows)}x{len(cols)}")
    return Matrix._trusted(f.semiring, rows, cols, f.entries)
