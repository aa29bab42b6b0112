"""Instance file readers and writers.

Text formats (whitespace separated, blank lines and ``#`` comments ignored):

* graph: ``n m`` then ``m`` lines ``u v w`` (0-indexed vertices)
* coverage: ``n m`` then ``n`` lines ``c i1 .. ic`` then one line of ``m`` weights
* facility: ``customers facilities`` then one benefit row per customer,
  then one line of facility costs
* regression: CSV, optional header row, last column is the target

Every reader raises :class:`InstanceParseError` naming the offending line.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import InstanceParseError
from .objectives import (
    CoverageInstance,
    FacilityLocationInstance,
    RegressionInstance,
    WeightedGraph,
)


class _Lines:
    """Significant lines of a text file with their 1-based line numbers."""

    def __init__(self, path):
        self.path = str(path)
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InstanceParseError(f"cannot read file: {exc.strerror}", path=self.path) from exc
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.items.append((no, body.split()))
        self.pos = 0
        self.last = 0

    def error(self, message, line=None):
        return InstanceParseError(message, line=self.last if line is None else line, path=self.path)

    def next(self, what: str) -> list:
        if self.pos >= len(self.items):
            raise self.error(f"unexpected end of file, expected {what}", line=self.last + 1)
        self.last, tokens = self.items[self.pos]
        self.pos += 1
        return tokens

    def finish(self):
        if self.pos < len(self.items):
            no, _ = self.items[self.pos]
            raise self.error("unexpected trailing content", line=no)

    def ints(self, tokens, count=None, what="integers"):
        if count is not None and len(tokens) != count:
            raise self.error(f"expected {count} {what}, found {len(tokens)} fields")
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise self.error(f"expected {what}, got {' '.join(tokens)!r}") from None

    def reals(self, tokens, count=None, what="numbers"):
        if count is not None and len(tokens) != count:
            raise self.error(f"expected {count} {what}, found {len(tokens)} fields")
        try:
            vals = [float(t) for t in tokens]
        except ValueError:
            raise self.error(f"expected {what}, got {' '.join(tokens)!r}") from None
        if not all(math.isfinite(v) for v in vals):
            raise self.error(f"non-finite value among {what}")
        return vals


def _header(lines: _Lines, what: str) -> tuple:
    a, b = lines.ints(lines.next(what), 2, what)
    if a < 1 or b < 0:
        raise lines.error(f"invalid {what}: {a} {b}")
    return a, b


def read_graph(path) -> WeightedGraph:
    lines = _Lines(path)
    n, m = _header(lines, "header 'n m'")
    edges, seen = [], {}
    for _ in range(m):
        tokens = lines.next("edge 'u v w'")
        if len(tokens) != 3:
            raise lines.error(f"expected 'u v w', found {len(tokens)} fields")
        u, v = lines.ints(tokens[:2], what="vertex indices")
        (w,) = lines.reals(tokens[2:], what="edge weight")
        if not (0 <= u < n and 0 <= v < n):
            raise lines.error(f"vertex out of range 0..{n - 1}")
        if u == v:
            raise lines.error(f"self loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise lines.error(f"duplicate edge {u}-{v} (first on line {seen[key]})")
        if w < 0:
            raise lines.error(f"negative edge weight {w}")
        seen[key] = lines.last
        edges.append((u, v, w))
    lines.finish()
    return WeightedGraph(n, edges)


def write_graph(graph: WeightedGraph, path) -> None:
    out = [f"{graph.n} {len(graph.edges)}"]
    out += [f"{u} {v} {w!r}" for u, v, w in graph.edges]
    Path(path).write_text("\n".join(out) + "\n")


def read_coverage(path) -> CoverageInstance:
    lines = _Lines(path)
    n, m = _header(lines, "header 'n m'")
    covered = []
    for e in range(n):
        vals = lines.ints(lines.next(f"cover list of element {e}"), what="item indices")
        c, items = vals[0], vals[1:]
        if c != len(items):
            raise lines.error(f"count {c} does not match {len(items)} listed items")
        for i in items:
            if not 0 <= i < m:
                raise lines.error(f"item {i} outside 0..{m - 1}")
        covered.append(items)
    weights = lines.reals(lines.next("item weights"), m, "item weights")
    if any(w < 0 for w in weights):
        raise lines.error("item weights must be non-negative")
    lines.finish()
    return CoverageInstance(m, covered, weights)


def write_coverage(inst: CoverageInstance, path) -> None:
    out = [f"{inst.n} {inst.m}"]
    out += [" ".join(str(x) for x in (len(c), *c)) for c in inst.covered_by]
    out.append(" ".join(repr(w) for w in inst.weights))
    Path(path).write_text("\n".join(out) + "\n")


def read_facility(path) -> FacilityLocationInstance:
    lines = _Lines(path)
    customers, facilities = _header(lines, "header 'customers facilities'")
    if facilities < 1:
        raise lines.error("need at least one facility")
    rows = []
    for c in range(customers):
        row = lines.reals(lines.next(f"benefit row {c}"), facilities, "benefits")
        if any(b < 0 for b in row):
            raise lines.error("benefits must be non-negative")
        rows.append(row)
    costs = lines.reals(lines.next("facility costs"), facilities, "facility costs")
    if any(x < 0 for x in costs):
        raise lines.error("facility costs must be non-negative")
    lines.finish()
    return FacilityLocationInstance(np.array(rows), np.array(costs))


def write_facility(inst: FacilityLocationInstance, path) -> None:
    c, f = inst.benefit.shape
    out = [f"{c} {f}"]
    out += [" ".join(repr(float(b)) for b in row) for row in inst.benefit]
    out.append(" ".join(repr(float(x)) for x in inst.costs))
    Path(path).write_text("\n".join(out) + "\n")


def read_regression(path, header: bool = False) -> RegressionInstance:
    path = str(path)
    rows, width = [], None
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InstanceParseError(f"cannot read file: {exc.strerror}", path=path) from exc
    with fh:
        reader = csv.reader(fh)
        for record in reader:
            no = reader.line_num
            if header and not rows and width is None:
                width = len(record)
                continue
            if not record or all(not f.strip() for f in record):
                continue
            if width is None:
                width = len(record)
            if len(record) != width:
                raise InstanceParseError(f"expected {width} fields, found {len(record)}", no, path)
            try:
                vals = [float(f) for f in record]
            except ValueError:
                raise InstanceParseError("non-numeric field", no, path) from None
            if not all(math.isfinite(v) for v in vals):
                raise InstanceParseError("non-finite value", no, path)
            rows.append(vals)
    if not rows:
        raise InstanceParseError("no data rows", path=path)
    if width < 2:
        raise InstanceParseError("need at least one predictor column and the target", 1, path)
    data = np.array(rows)
    try:
        return RegressionInstance(data[:, :-1], data[:, -1])
    except ValueError as exc:
        raise InstanceParseError(str(exc), path=path) from exc


def write_regression(design, target, path, header: bool = False) -> None:
    design = np.asarray(design, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j}" for j in range(design.shape[1])] + ["y"])
        for row, y in zip(design, np.asarray(target, dtype=float)):
            w.writerow([repr(float(v)) for v in row] + [repr(float(y))])
