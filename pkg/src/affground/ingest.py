"""Offline KB construction from scored triple tables.

Two-stage ingestion mirrors how the graph is produced upstream: a
stage-1 table scores properties per verb (``verb,property,weight``) and
a stage-2 table scores objects per property (``property,object,weight``).
A flat ``verb,object,weight`` table can also be imported as a degenerate
KB through synthetic one-per-verb properties, useful for comparing
against general-purpose relation sources.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Literal

from .errors import IngestError, RangeError
from .kb import KnowledgeBase, build_kb, canon_ident

MergePolicy = Literal["max", "mean", "prefer_b"]


@dataclass(frozen=True)
class PropertyScoreRow:
    verb: str
    property: str
    weight: float


@dataclass(frozen=True)
class ObjectScoreRow:
    property: str
    object: str
    weight: float


def _check_row_weight(w: float, row_no: int) -> float:
    w = float(w)
    if not (0.0 <= w <= 1.0):
        raise RangeError(f"row {row_no}: weight {w!r} outside [0, 1]")
    return w


def ingest(
    stage1: Iterable[PropertyScoreRow],
    stage2: Iterable[ObjectScoreRow],
    prune_epsilon: float = 0.0,
) -> KnowledgeBase:
    """Build a version-1 KB keeping only edges with weight > prune_epsilon.

    All verbs from stage1 are declared even if every one of their edges
    is pruned, so querying them yields empty paths rather than errors.
    """
    if prune_epsilon < 0 or prune_epsilon >= 1:
        raise RangeError(f"prune_epsilon must be in [0, 1), got {prune_epsilon}")

    vp: dict[tuple[str, str], float] = {}
    dupes: list[str] = []
    verbs: set[str] = set()
    for i, row in enumerate(stage1, start=1):
        key = (canon_ident(row.verb), canon_ident(row.property))
        verbs.add(key[0])
        if key in vp:
            dupes.append(f"stage1 duplicate ({key[0]}, {key[1]})")
            continue
        vp[key] = _check_row_weight(row.weight, i)

    po: dict[tuple[str, str], float] = {}
    for i, row in enumerate(stage2, start=1):
        key = (canon_ident(row.property), canon_ident(row.object))
        if key in po:
            dupes.append(f"stage2 duplicate ({key[0]}, {key[1]})")
            continue
        po[key] = _check_row_weight(row.weight, i)

    if dupes:
        raise IngestError("; ".join(dupes))

    vp = {k: w for k, w in vp.items() if w > prune_epsilon}
    po = {k: w for k, w in po.items() if w > prune_epsilon}
    properties = {p for _, p in vp} | {p for p, _ in po}
    objects = {o for _, o in po}
    return build_kb(verbs, properties, objects, vp, po, version=1)


def import_flat(pairs: Iterable[tuple[str, str, float]]) -> KnowledgeBase:
    """Adapt flat verb-object scores into the bipartite shape.

    Each verb v gets a synthetic property ``direct_v`` with w_vp = 1.0,
    and the pair weight becomes w_po, so the pair energy is
    tanh(-(1 + weight)).
    """
    vp: dict[tuple[str, str], float] = {}
    po: dict[tuple[str, str], float] = {}
    verbs: set[str] = set()
    objects: set[str] = set()
    seen: set[tuple[str, str]] = set()
    for i, (verb, obj, weight) in enumerate(pairs, start=1):
        v, o = canon_ident(verb), canon_ident(obj)
        if (v, o) in seen:
            raise IngestError(f"duplicate flat pair ({v}, {o})")
        seen.add((v, o))
        prop = f"direct_{v}"
        verbs.add(v)
        objects.add(o)
        vp[(v, prop)] = 1.0
        po[(prop, o)] = _check_row_weight(weight, i)
    properties = {p for _, p in vp}
    return build_kb(verbs, properties, objects, vp, po, version=1)


def merge(a: KnowledgeBase, b: KnowledgeBase, policy: MergePolicy = "max") -> KnowledgeBase:
    """Union two KBs; conflicting edge weights resolved by policy."""

    def resolve(edges_a: dict, edges_b: dict) -> dict:
        out = dict(edges_a)
        for key, wb in edges_b.items():
            if key in out:
                wa = out[key]
                if policy == "max":
                    out[key] = max(wa, wb)
                elif policy == "mean":
                    out[key] = (wa + wb) / 2.0
                elif policy == "prefer_b":
                    out[key] = wb
                else:
                    raise ValueError(f"unknown merge policy {policy!r}")
            else:
                out[key] = wb
        return out

    return build_kb(
        a.verbs | b.verbs,
        a.properties | b.properties,
        a.objects | b.objects,
        resolve(a.vp_edges, b.vp_edges),
        resolve(a.po_edges, b.po_edges),
        version=max(a.version, b.version) + 1,
    )


def _read_table(text: str, columns: tuple[str, str, str], what: str) -> list[tuple[str, str, float]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(c.strip() for c in reader.fieldnames) != columns:
        raise IngestError(
            f"{what}: expected header {','.join(columns)!r}, got {reader.fieldnames!r}"
        )
    rows = []
    for i, row in enumerate(reader, start=2):
        try:
            w = float(row[columns[2]])
        except (TypeError, ValueError):
            raise IngestError(f"{what} line {i}: bad weight {row[columns[2]]!r}")
        rows.append((row[columns[0]], row[columns[1]], w))
    return rows


def read_stage1(text: str) -> list[PropertyScoreRow]:
    """Parse a ``verb,property,weight`` table (header required)."""
    return [PropertyScoreRow(v, p, w) for v, p, w in _read_table(text, ("verb", "property", "weight"), "stage1")]


def read_stage2(text: str) -> list[ObjectScoreRow]:
    """Parse a ``property,object,weight`` table (header required)."""
    return [ObjectScoreRow(p, o, w) for p, o, w in _read_table(text, ("property", "object", "weight"), "stage2")]


def read_flat(text: str) -> list[tuple[str, str, float]]:
    """Parse a ``verb,object,weight`` table (header required)."""
    return _read_table(text, ("verb", "object", "weight"), "flat pairs")


def kb_to_rows(kb: KnowledgeBase) -> tuple[list[PropertyScoreRow], list[ObjectScoreRow]]:
    """Export a KB back to stage tables (inverse of ingest at epsilon 0)."""
    s1 = [PropertyScoreRow(v, p, w) for (v, p), w in sorted(kb.vp_edges.items())]
    s2 = [ObjectScoreRow(p, o, w) for (p, o), w in sorted(kb.po_edges.items())]
    return s1, s2
