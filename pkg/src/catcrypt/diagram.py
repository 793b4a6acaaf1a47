"""Finite diagrams of matrices and a bounded commutativity checker."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .rational import fmt
from .semiring import EncodedSet, Matrix, MatrixError, compose, label

DEFAULT_MAX_PATH_LENGTH = 4


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    morphism: Matrix
    label: str


def exact(lhs, rhs) -> bool:
    return lhs == rhs


def within(threshold) -> Callable[[Any, Any], bool]:
    """Entry predicate ``|lhs - rhs| <= threshold``."""

    def close(lhs, rhs):
        return abs(lhs - rhs) <= threshold

    close.threshold = threshold
    return close


@dataclass
class Diagram:
    objects: dict[str, EncodedSet]
    edges: list[Edge] = field(default_factory=list)
    pairs: list[tuple[tuple[str, ...], tuple[str, ...]]] | None = None
    max_path_length: int = DEFAULT_MAX_PATH_LENGTH

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            self._validate(e)
            if e.label in seen:
                raise DiagramError(f"duplicate edge label {e.label!r}")
            seen.add(e.label)

    def _validate(self, e: Edge):
        for end in (e.source, e.target):
            if end not in self.objects:
                raise DiagramError(f"edge {e.label!r} refers to unknown object {end!r}")
        if e.morphism.rows != self.objects[e.source]:
            raise DiagramError(f"edge {e.label!r}: matrix rows do not match object {e.source!r}")
        if e.morphism.cols != self.objects[e.target]:
            raise DiagramError(f"edge {e.label!r}: matrix columns do not match object {e.target!r}")

    def add_edge(self, source, target, morphism, label) -> Diagram:
        """New diagram with one more edge; the original is untouched."""
        return Diagram(
            dict(self.objects),
            [*self.edges, Edge(source, target, morphism, label)],
            self.pairs,
            self.max_path_length,
        )

    def edge(self, name: str) -> Edge:
        for e in self.edges:
            if e.label == name:
                return e
        raise DiagramError(f"no edge labelled {name!r}")

    def paths(self) -> list[tuple[Edge, ...]]:
        """All nonempty edge paths of length <= max_path_length."""
        out = []
        frontier = [(e,) for e in self.edges]
        depth = 1
        while frontier and depth <= self.max_path_length:
            out.extend(frontier)
            frontier = [p + (e,) for p in frontier for e in self.edges if e.source == p[-1].target]
            depth += 1
        return out


def path_label(path: Sequence[Edge]) -> str:
    return ";".join(e.label for e in path)


def path_composite(d: Diagram, path: Sequence[Edge | str]) -> Matrix:
    """Left-to-right composite of a path (edges or edge labels)."""
    edges = [d.edge(p) if isinstance(p, str) else p for p in path]
    if not edges:
        raise DiagramError("empty path")
    for a, b in zip(edges, edges[1:]):
        if a.target != b.source:
            raise DiagramError(f"edges {a.label!r} and {b.label!r} are not composable")
    result = edges[0].morphism
    for e in edges[1:]:
        try:
            result = compose(result, e.morphism)
        except MatrixError as err:
            raise DiagramError(f"at edge {e.label!r}: {err}") from err
    return result


@dataclass(frozen=True)
class Witness:
    row: str
    col: str
    lhs: Any
    rhs: Any

    def to_json(self):
        return {"row": self.row, "col": self.col, "lhs": fmt(self.lhs), "rhs": fmt(self.rhs)}


@dataclass(frozen=True)
class PairResult:
    lhs: str
    rhs: str
    equal: bool
    witness: Witness | None = None

    def to_json(self):
        return {
            "pair": [self.lhs, self.rhs],
            "equal": self.equal,
            "witness": self.witness.to_json() if self.witness else None,
        }


@dataclass(frozen=True)
class CommutativityReport:
    results: tuple[PairResult, ...]
    note: str = ""

    @property
    def passed(self) -> bool:
        return all(r.equal for r in self.results)

    @property
    def vacuous(self) -> bool:
        return not self.results

    def failures(self):
        return [r for r in self.results if not r.equal]

    def to_json(self):
        out = {"passed": self.passed, "pairs": [r.to_json() for r in self.results]}
        if self.note:
            out["note"] = self.note
        return out

    def to_text(self) -> str:
        lines = []
        if self.note:
            lines.append(self.note)
        if not self.results:
            lines.append("no parallel paths: commutes vacuously")
        for r in self.results:
            status = "equal" if r.equal else "DIFFER"
            line = f"{r.lhs}  vs  {r.rhs}: {status}"
            if r.witness:
                w = r.witness
                line += f" at ({w.row}, {w.col}): {fmt(w.lhs)} vs {fmt(w.rhs)}"
            lines.append(line)
        lines.append("commutes" if self.passed else "does not commute")
        return "\n".join(lines)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def compare(lhs: Matrix, rhs: Matrix, eq=exact, lhs_name="lhs", rhs_name="rhs") -> PairResult:
    """Entrywise comparison; the witness is the first failing entry in row-major order."""
    if lhs.rows != rhs.rows or lhs.cols != rhs.cols:
        raise DiagramError(f"{lhs_name} and {rhs_name} are not parallel")
    for i, (lr, rr) in enumerate(zip(lhs.entries, rhs.entries)):
        for j, (x, y) in enumerate(zip(lr, rr)):
            if not eq(x, y):
                w = Witness(label(lhs.rows.elements[i]), label(lhs.cols.elements[j]), x, y)
                return PairResult(lhs_name, rhs_name, False, w)
    return PairResult(lhs_name, rhs_name, True)


def check_commutes(d: Diagram, eq: Callable[[Any, Any], bool] = exact, note: str = "") -> CommutativityReport:
    """Compare the composites of every pair of parallel paths.

    ``eq`` is an entry predicate; two composites are equal when it holds at
    every entry. With ``d.pairs`` set only those pairs are checked.
    """
    if d.pairs is not None:
        candidates = [(tuple(d.edge(n) for n in a), tuple(d.edge(n) for n in b)) for a, b in d.pairs]
    else:
        groups: dict[tuple[str, str], list] = {}
        for p in d.paths():
            groups.setdefault((p[0].source, p[-1].target), []).append(p)
        candidates = []
        for paths in groups.values():
            paths.sort(key=path_label)
            candidates.extend(
                (paths[i], paths[j]) for i in range(len(paths)) for j in range(i + 1, len(paths))
            )
    cache: dict[str, Matrix] = {}

    def composite(p):
        key = path_label(p)
        if key not in cache:
            cache[key] = path_composite(d, p)
        return cache[key]

    results = []
    for a, b in candidates:
        la, lb = sorted((path_label(a), path_label(b)))
        pa, pb = (a, b) if path_label(a) == la else (b, a)
        results.append(compare(composite(pa), composite(pb), eq, la, lb))
    results.sort(key=lambda r: (r.lhs, r.rhs))
    return CommutativityReport(tuple(results), note)
