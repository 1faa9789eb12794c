"""Text instance files, labeling files and JSON reports.

Instance file::

    POTTS 1
    n m k
    c(1,1) ... c(1,k)        # n lines, token "inf" maps to big-M
    u v w                    # m lines, 1-indexed nodes, w > 0

Lines starting with ``#`` (and trailing ``#`` comments) are ignored.  Numbers
are written with 17 significant digits so that parse/serialize/parse is
the identity.  Labels are 1-indexed in every file format.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import BIG_M, Instance

SCHEMA_VERSION = 1
HEADER = "POTTS 1"


class FormatError(ValueError):
    pass


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _num(tok: str, no: int, big_m: float) -> float:
    low = tok.lower()
    if low in ("inf", "+inf", "infinity"):
        return big_m
    try:
        v = float(tok)
    except ValueError:
        raise FormatError(f"line {no}: cannot parse number {tok!r}") from None
    if not math.isfinite(v):
        raise FormatError(f"line {no}: non-finite value {tok!r}")
    return v


def parse_instance(text: str, big_m: float = BIG_M) -> Instance:
    lines = list(_lines(text))
    if not lines or " ".join(lines[0][1]) != HEADER:
        raise FormatError(f"missing header {HEADER!r}")
    if len(lines) < 2 or len(lines[1][1]) != 3:
        raise FormatError("second line must be 'n m k'")
    no, toks = lines[1]
    try:
        n, m, k = (int(t) for t in toks)
    except ValueError:
        raise FormatError(f"line {no}: 'n m k' must be integers") from None
    body = lines[2:]
    if len(body) != n + m:
        raise FormatError(f"expected {n} cost lines and {m} edge lines, found {len(body)} lines")
    costs = np.empty((n, k))
    for u, (no, toks) in enumerate(body[:n]):
        if len(toks) != k:
            raise FormatError(f"line {no}: expected {k} costs, found {len(toks)}")
        costs[u] = [_num(t, no, big_m) for t in toks]
    edges = np.empty((m, 2), dtype=np.int64)
    weights = np.empty(m)
    for e, (no, toks) in enumerate(body[n:]):
        if len(toks) != 3:
            raise FormatError(f"line {no}: edge lines are 'u v w'")
        try:
            u, v = int(toks[0]), int(toks[1])
        except ValueError:
            raise FormatError(f"line {no}: node indices must be integers") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise FormatError(f"line {no}: node index out of range 1..{n}")
        edges[e] = (u - 1, v - 1)
        weights[e] = _num(toks[2], no, big_m)
    try:
        return Instance(costs, edges, weights)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_instance(inst: Instance, comment: str | None = None) -> str:
    out = [HEADER]
    if comment:
        out += [f"# {line}" for line in comment.splitlines()]
    out.append(f"{inst.n} {inst.m} {inst.k}")
    out += [" ".join(_fmt(c) for c in row) for row in inst.costs]
    out += [f"{u + 1} {v + 1} {_fmt(w)}" for (u, v), w in zip(inst.edges.tolist(), inst.weights)]
    return "\n".join(out) + "\n"


def read_instance(path, big_m: float = BIG_M) -> Instance:
    return parse_instance(Path(path).read_text(), big_m)


def write_instance(path, inst: Instance, comment: str | None = None) -> None:
    Path(path).write_text(format_instance(inst, comment))


def parse_labeling(text: str, n: int | None = None, k: int | None = None) -> np.ndarray:
    toks = [t for _, line in _lines(text) for t in line]
    try:
        x = np.array([int(t) for t in toks], dtype=np.int64) - 1
    except ValueError:
        raise FormatError("labels must be integers") from None
    if n is not None and len(x) != n:
        raise FormatError(f"expected {n} labels, found {len(x)}")
    if len(x) and (x.min() < 0 or (k is not None and x.max() >= k)):
        raise FormatError("label out of range")
    return x


def format_labeling(x) -> str:
    return " ".join(str(int(v) + 1) for v in np.asarray(x)) + "\n"


def read_labeling(path, n=None, k=None) -> np.ndarray:
    return parse_labeling(Path(path).read_text(), n, k)


def write_labeling(path, x) -> None:
    Path(path).write_text(format_labeling(x))


def to_jsonable(obj):
    """Plain-Python copy of ``obj`` (numpy scalars and arrays converted)."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def dump_report(report: dict, kind: str) -> str:
    """Deterministic JSON text with ``schema_version`` and ``kind`` fields."""
    body = {"schema_version": SCHEMA_VERSION, "kind": kind}
    body.update(to_jsonable(report))
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def load_report(text: str) -> dict:
    d = json.loads(text)
    if d.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema_version {d.get('schema_version')!r}")
    return d
