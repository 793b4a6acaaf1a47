"""JSON formats for systems, ensembles, adversaries and policies.

Every loader raises ``InputError`` naming the offending field; JSON syntax
errors carry line and column.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .ensemble import EnsembleError, FeasibleEnsemble, NegligibilityPolicy, RandomizedFn, bits, unbits
from .games import AbstractCryptoSystem, AdversaryPair, CCA2Adversary
from .rational import fmt, parse_fraction
from .semiring import EncodedSet, MatrixError
from .shannon import Distribution, ShannonSystem
from .symbolic import DolevYaoSystem, SystemError_

DATA_DIR = Path(__file__).parent / "data"
EXAMPLES_ENV = "CATCRYPT_EXAMPLES"


class InputError(ValueError):
    pass


def examples_dir() -> Path:
    override = os.environ.get(EXAMPLES_ENV)
    return Path(override) if override else DATA_DIR


def resolve(name: str | os.PathLike) -> Path:
    """A path as given, else a bundled example by name (with or without .json)."""
    p = Path(name)
    if p.exists():
        return p
    base = examples_dir()
    for cand in (base / p.name, base / f"{p.name}.json"):
        if cand.exists():
            return cand
    raise InputError(f"{name}: no such file (and no bundled example of that name in {base})")


def read_json(path) -> Any:
    p = resolve(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"{p}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{p}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def _field(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise InputError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return v


def _frac(x, where) -> Fraction:
    try:
        return parse_fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise InputError(f"{where}: {e}") from None


# --- Dolev-Yao and Shannon -------------------------------------------------

def _carrier(doc, where) -> EncodedSet:
    els = _field(doc, "carrier", where, list)
    if not all(isinstance(x, (str, int)) and not isinstance(x, bool) for x in els):
        raise InputError(f"{where}.carrier: labels must be strings or integers")
    codes = doc.get("codes")
    try:
        return EncodedSet(els, codes)
    except MatrixError as e:
        raise InputError(f"{where}.carrier: {e}") from None


def _lookup(a: EncodedSet, where):
    by_name = {str(x): x for x in a}

    def get(x, field):
        if x in a and not isinstance(x, bool):
            return x
        if isinstance(x, str) and x in by_name:
            return by_name[x]
        raise InputError(f"{where}.{field}: {x!r} is not in the carrier")

    return get


def _square(doc, key, a, where, get, cell=None, partial=False):
    rows = _field(doc, key, where, list)
    n = len(a)
    if len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InputError(f"{where}.{key}: expected a {n}x{n} table")
    cell = cell or (lambda v, f: get(v, f))
    return {
        (k, m): cell(rows[i][j], f"{key}[{i}][{j}]")
        for i, k in enumerate(a) for j, m in enumerate(a)
        if not (partial and rows[i][j] is None)
    }


def load_dolev_yao(path) -> DolevYaoSystem:
    doc = read_json(path)
    where = str(path)
    a = _carrier(doc, where)
    get = _lookup(a, where)
    enc = _square(doc, "enc", a, where, get)
    dec = _square(doc, "dec", a, where, get)
    pair_list = _field(doc, "pair", where, list)
    if len(pair_list) != len(a):
        raise InputError(f"{where}.pair: expected {len(a)} entries")
    pair = {k: get(v, f"pair[{i}]") for i, (k, v) in enumerate(zip(a, pair_list))}
    wf = doc.get("wellformed", list(a))
    wellformed = frozenset(get(x, "wellformed") for x in wf)
    try:
        return DolevYaoSystem(a, enc, dec, pair, wellformed)
    except SystemError_ as e:
        raise InputError(f"{where}: {e}") from None


def _distribution(doc, key, a, where, get) -> Distribution:
    raw = _field(doc, key, where)
    if isinstance(raw, list):
        if len(raw) != len(a):
            raise InputError(f"{where}.{key}: expected {len(a)} weights")
        weights = {x: _frac(w, f"{where}.{key}[{i}]") for i, (x, w) in enumerate(zip(a, raw))}
    elif isinstance(raw, dict):
        weights = {get(x, key): _frac(w, f"{where}.{key}.{x}") for x, w in raw.items()}
    elif raw == "uniform":
        return Distribution.uniform(a)
    else:
        raise InputError(f"{where}.{key}: expected a list, an object or \"uniform\"")
    try:
        return Distribution(a, weights)
    except SystemError_ as e:
        raise InputError(f"{where}.{key}: {e}") from None


def load_shannon(path) -> ShannonSystem:
    doc = read_json(path)
    where = str(path)
    a = _carrier(doc, where)
    get = _lookup(a, where)

    def enc_cell(v, f):
        if isinstance(v, dict):
            return {get(c, f): _frac(p, f"{where}.{f}.{c}") for c, p in v.items()}
        return get(v, f)

    # Shannon tables may leave cells outside supp(kappa) x supp(mu) null
    enc = _square(doc, "enc", a, where, get, enc_cell, partial=True)
    dec = _square(doc, "dec", a, where, get, partial=True)
    pair_list = _field(doc, "pair", where, list)
    if len(pair_list) != len(a):
        raise InputError(f"{where}.pair: expected {len(a)} entries")
    pair = {k: get(v, f"pair[{i}]") for i, (k, v) in enumerate(zip(a, pair_list)) if v is not None}
    kappa = _distribution(doc, "kappa", a, where, get)
    mu = _distribution(doc, "mu", a, where, get)
    try:
        return ShannonSystem(a, enc, dec, pair, kappa, mu)
    except SystemError_ as e:
        raise InputError(f"{where}: {e}") from None


def _table_rows(a, table, cell=lambda v: v):
    return [[cell(table[k, m]) for m in a] for k in a]


def dump_dolev_yao(s: DolevYaoSystem, name: str = "") -> dict:
    a = s.carrier
    return {
        "kind": "dolev-yao",
        "name": name,
        "carrier": list(a),
        "enc": _table_rows(a, s.enc),
        "dec": _table_rows(a, s.dec),
        "pair": [s.pair[k] for k in a],
        "wellformed": [x for x in a if x in s.wellformed],
    }


def dump_shannon(s: ShannonSystem, name: str = "") -> dict:
    a = s.carrier

    def cell(v):
        if isinstance(v, dict):
            return {str(c): fmt(p) for c, p in v.items()}
        return v

    enc = [[cell(s.enc[k, m]) if (k, m) in s.enc else None for m in a] for k in a]
    return {
        "kind": "shannon",
        "name": name,
        "carrier": list(a),
        "enc": enc,
        "dec": [[s.dec.get((k, c)) for c in a] for k in a],
        "pair": [s.pair.get(k) for k in a],
        "kappa": {str(x): fmt(p) for x, p in s.kappa.items()},
        "mu": {str(x): fmt(p) for x, p in s.mu.items()},
    }


# --- ensembles -------------------------------------------------------------

def parse_fn(doc, where) -> RandomizedFn:
    r, s, t = (_field(doc, k, where, int) for k in ("r", "s", "t"))
    table = _field(doc, "table", where)
    try:
        if isinstance(table, dict):
            mapping = {}
            for key, y in table.items():
                rho, sep, x = key.partition(",")
                if not sep:
                    raise InputError(f"{where}.table: key {key!r} is not \"seed,input\"")
                mapping[rho, x] = y
            return RandomizedFn.from_mapping(r, s, t, mapping)
        if isinstance(table, list):
            # dense form: entry seed * 2^s + input, null where undefined
            if len(table) != 2 ** (r + s):
                raise InputError(f"{where}.table: dense form needs {2 ** (r + s)} entries")
            arr = [-1 if y is None else unbits(y) for y in table]
            return RandomizedFn(r, s, t, np.array(arr, dtype=np.int64))
    except (EnsembleError, TypeError) as e:
        raise InputError(f"{where}.table: {e}") from None
    raise InputError(f"{where}.table: expected an object or a list")


def parse_ensemble(doc, where, name="") -> FeasibleEnsemble:
    levels = _field(doc, "levels", where, list)
    fns = tuple(parse_fn(lv, f"{where}.levels[{i}]") for i, lv in enumerate(levels))
    try:
        return FeasibleEnsemble(fns, int(doc.get("start", 1)), name)
    except EnsembleError as e:
        raise InputError(f"{where}: {e}") from None


def dump_fn(f: RandomizedFn, dense: bool | None = None) -> dict:
    r, s, t = f.profile
    if dense is None:
        dense = r + s > 10
    if dense:
        flat = f.table.reshape(-1)
        table = [None if int(y) < 0 else bits(int(y), t) for y in flat]
    else:
        table = f.to_mapping()
    return {"r": r, "s": s, "t": t, "table": table}


def dump_ensemble(e: FeasibleEnsemble) -> dict:
    return {"start": e.start, "levels": [dump_fn(f) for f in e.levels]}


def _ensembles(doc, where) -> dict[str, FeasibleEnsemble]:
    raw = _field(doc, "ensembles", where, dict)
    return {n: parse_ensemble(v, f"{where}.ensembles.{n}", n) for n, v in raw.items()}


def _ref(doc, key, pool, where, optional=False):
    if optional and doc.get(key) is None:
        return None
    n = _field(doc, key, where, str)
    if n not in pool:
        raise InputError(f"{where}.{key}: no ensemble named {n!r}")
    return pool[n]


def load_abstract(path) -> AbstractCryptoSystem:
    doc = read_json(path)
    where = str(path)
    pool = _ensembles(doc, where)
    try:
        return AbstractCryptoSystem(
            key_bits=_field(doc, "key_bits", where, list),
            msg_bits=_field(doc, "msg_bits", where, list),
            ct_bits=_field(doc, "ct_bits", where, list),
            keygen=_ref(doc, "keygen", pool, where),
            enc=_ref(doc, "enc", pool, where),
            dec=_ref(doc, "dec", pool, where),
            pair=_ref(doc, "pair", pool, where, optional=True),
            start=int(doc.get("start", 1)),
            name=str(doc.get("name", "")),
        )
    except EnsembleError as e:
        raise InputError(f"{where}: {e}") from None


def dump_abstract(s: AbstractCryptoSystem) -> dict:
    pool = {"keygen": s.keygen, "enc": s.enc, "dec": s.dec}
    if s.pair is not None:
        pool["pair"] = s.pair
    doc = {
        "kind": "abstract",
        "name": s.name,
        "start": s.start,
        "key_bits": list(s.key_bits),
        "msg_bits": list(s.msg_bits),
        "ct_bits": list(s.ct_bits),
        "ensembles": {n: dump_ensemble(e) for n, e in pool.items()},
    }
    doc.update({n: n for n in pool})
    return doc


def load_adversaries(path) -> tuple[str, list]:
    """Returns ("ind-cpa", [AdversaryPair]) or ("ind-cca2", [CCA2Adversary])."""
    doc = read_json(path)
    where = str(path)
    kind = _field(doc, "kind", where, str)
    pool = _ensembles(doc, where)
    advs = _field(doc, "adversaries", where, list)
    out = []
    for i, a in enumerate(advs):
        w = f"{where}.adversaries[{i}]"
        name = str(a.get("name", f"adversary{i}"))
        try:
            if kind == "ind-cpa":
                out.append(AdversaryPair(
                    _ref(a, "A0", pool, w), _ref(a, "A1", pool, w), a.get("shape", "game"), name,
                ))
            elif kind == "ind-cca2":
                out.append(CCA2Adversary(*(_ref(a, f"A{j}", pool, w) for j in range(4)), name=name))
            else:
                raise InputError(f"{where}.kind: expected \"ind-cpa\" or \"ind-cca2\", got {kind!r}")
        except EnsembleError as e:
            raise InputError(f"{w}: {e}") from None
    return kind, out


def dump_adversaries(advs, kind: str) -> dict:
    pool: dict[str, dict] = {}
    entries = []
    stages = ("A0", "A1") if kind == "ind-cpa" else ("A0", "A1", "A2", "A3")
    for adv in advs:
        entry: dict[str, Any] = {"name": adv.name}
        if kind == "ind-cpa":
            entry["shape"] = adv.shape
        for st in stages:
            key = f"{adv.name}.{st}"
            pool[key] = dump_ensemble(getattr(adv, st.lower()))
            entry[st] = key
        entries.append(entry)
    return {"kind": kind, "ensembles": pool, "adversaries": entries}


def load_policy(path) -> NegligibilityPolicy:
    doc = read_json(path)
    return parse_policy(doc, str(path))


def parse_policy(doc, where="policy") -> NegligibilityPolicy:
    try:
        return NegligibilityPolicy(
            max_level=int(_field(doc, "L", where)),
            threshold=str(doc.get("threshold", "2^-l")),
            strict=bool(doc.get("strict", False)),
        )
    except (EnsembleError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"{where}: {e}") from None


def write_json(doc, path):
    # ensemble tables run to thousands of entries; keep those files on few lines
    indent = None if "ensembles" in doc else 1
    Path(path).write_text(json.dumps(doc, indent=indent, sort_keys=True) + "\n")


def detect_kind(path) -> str:
    doc = read_json(path)
    if isinstance(doc, dict) and isinstance(doc.get("kind"), str):
        return doc["kind"]
    raise InputError(f"{path}: missing field 'kind'")
