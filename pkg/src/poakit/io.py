"""Readers and writers for the plain-text exchange formats."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParseError, ValidationError
from .mmspace import (FiniteMetricSpace, WeightedGraph, build_graph_metric, normalize_measure,
                      uniform_measure, validate_metric)

SCHEMA_VERSION = 1


def _fmt(x: float) -> str:
    return repr(float(x))


def read_edge_list(path) -> WeightedGraph:
    """`i j w` per line, 0-based, `#` starts a comment."""
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 'i j w', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise ParseError(path, lineno, f"cannot parse {line!r}") from None
    if not edges:
        raise ParseError(path, 0, "no edges found")
    n = 1 + max(max(i, j) for i, j, _ in edges)
    try:
        return WeightedGraph(n, tuple(edges))
    except ValueError as e:
        raise ParseError(path, 0, str(e)) from None


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ParseError(path, lineno, f"non-numeric entry in {row!r}") from None
    if not rows:
        raise ParseError(path, 0, "empty file")
    if len({len(r) for r in rows}) != 1:
        raise ParseError(path, 0, "rows have different lengths")
    return np.array(rows)


def read_vector(path) -> np.ndarray:
    """One number per line; blank lines and `#` comments skipped."""
    vals = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ParseError(path, lineno, f"cannot parse {line!r}") from None
    return np.array(vals)


def write_vector(path, values) -> None:
    Path(path).write_text("".join(_fmt(v) + "\n" for v in values))


def infer_format(path) -> str:
    return "distance-csv" if str(path).lower().endswith(".csv") else "edge-list"


def load_dataset(path, fmt: Optional[str] = None, measure_path=None, validate: bool = False):
    """-> (space, measure, graph or None)."""
    fmt = fmt or infer_format(path)
    graph = None
    if fmt == "edge-list":
        graph = read_edge_list(path)
        space = build_graph_metric(graph)
    elif fmt == "distance-csv":
        dist = read_matrix_csv(path)
        if dist.shape[0] != dist.shape[1]:
            raise ParseError(path, 0, f"distance matrix is {dist.shape[0]}x{dist.shape[1]}")
        if validate:
            rep = validate_metric(dist)
            if not rep.ok:
                raise ValidationError(rep)
        space = FiniteMetricSpace(dist)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if measure_path is None:
        mu = uniform_measure(space.n)
    else:
        raw = read_vector(measure_path)
        if raw.size != space.n:
            raise ParseError(measure_path, 0, f"{raw.size} weights for {space.n} points")
        mu = normalize_measure(raw)
    return space, mu, graph


def write_columns(path, columns, header) -> None:
    """CSV with one column per vector."""
    M = np.column_stack(columns) if len(columns) else np.zeros((0, 0))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in M:
            w.writerow([_fmt(x) for x in row])


def read_columns(path) -> tuple:
    """Inverse of write_columns: (header, (n_rows, n_cols) array)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(path, 0, "empty file")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:] if r])
    except ValueError:
        raise ParseError(path, 0, "non-numeric entry") from None
    return rows[0], data.reshape(-1, len(rows[0]))


def write_json(path, payload: dict) -> None:
    payload = {"schema": SCHEMA_VERSION, **payload}
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
