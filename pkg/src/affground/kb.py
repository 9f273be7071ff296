"""Immutable, versioned bipartite affordance knowledge base.

The graph routes verbs to objects through descriptive properties:
verb --w_vp--> property --w_po--> object.  A query for (verb, object)
enumerates the connecting properties as grounding paths; the affordance
energy is a tanh-bounded negative aggregate of those path weights, so
lower energy means stronger functional fit and no connection scores
exactly zero.

Values are copy-on-edit: ``edit_edge`` returns a new KnowledgeBase with
a bumped version and never touches its input.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Literal

from .errors import NotFoundError, RangeError

PathCombiner = Literal["sum", "product"]

_IDENT_RE = re.compile(r"[^a-z0-9_]+")


def canon_ident(raw: str) -> str:
    """Case-fold an identifier to lowercase ASCII with underscores."""
    s = raw.strip().lower().replace("-", "_").replace(" ", "_")
    return _IDENT_RE.sub("", s)


def _check_weight(w: float, what: str) -> float:
    w = float(w)
    if not (0.0 <= w <= 1.0) or math.isnan(w):
        raise RangeError(f"{what} weight {w!r} outside [0, 1]")
    return w


@dataclass(frozen=True)
class GroundingPath:
    """One verb->property->object route with its energy contribution."""

    verb: str
    property: str
    object: str
    w_vp: float
    w_po: float
    contribution: float


@dataclass(frozen=True)
class Violation:
    """A single invariant violation found by validate()."""

    kind: str
    subject: str
    message: str


@dataclass(frozen=True)
class KnowledgeBase:
    """Bipartite verb-property-object graph with weighted edges.

    Treat instances as immutable values; edits go through edit_edge.
    """

    version: int = 1
    verbs: frozenset[str] = frozenset()
    properties: frozenset[str] = frozenset()
    objects: frozenset[str] = frozenset()
    vp_edges: dict[tuple[str, str], float] = field(default_factory=dict)
    po_edges: dict[tuple[str, str], float] = field(default_factory=dict)

    def require_verb(self, verb: str) -> None:
        if verb not in self.verbs:
            raise NotFoundError(f"unknown verb {verb!r}")

    def require_object(self, obj: str) -> None:
        if obj not in self.objects:
            raise NotFoundError(f"unknown object {obj!r}")


def _combine(w_vp: float, w_po: float, combiner: PathCombiner) -> float:
    if combiner == "product":
        return w_vp * w_po
    return w_vp + w_po


def connecting_properties(
    kb: KnowledgeBase,
    verb: str,
    obj: str,
    combiner: PathCombiner = "sum",
) -> list[GroundingPath]:
    """All properties linking verb to obj, sorted by descending contribution.

    Ties are broken lexicographically by property name so explanations
    are deterministic.
    """
    kb.require_verb(verb)
    kb.require_object(obj)
    paths = []
    for (v, p), w_vp in kb.vp_edges.items():
        if v != verb:
            continue
        w_po = kb.po_edges.get((p, obj))
        if w_po is None:
            continue
        paths.append(
            GroundingPath(
                verb=verb,
                property=p,
                object=obj,
                w_vp=w_vp,
                w_po=w_po,
                contribution=_combine(w_vp, w_po, combiner),
            )
        )
    paths.sort(key=lambda gp: (-gp.contribution, gp.property))
    return paths


def affordance_energy(
    kb: KnowledgeBase,
    verb: str,
    obj: str,
    combiner: PathCombiner = "sum",
) -> float:
    """tanh(-sum of per-path combined weights); 0.0 when no path connects.

    Always in (-1, 0] for non-negative weights; strictly negative as soon
    as one connecting path has positive combined weight.
    """
    paths = connecting_properties(kb, verb, obj, combiner=combiner)
    total = sum(gp.contribution for gp in paths)
    return math.tanh(-total)


def edit_edge(
    kb: KnowledgeBase,
    kind: Literal["vp", "po"],
    frm: str,
    to: str,
    weight: float,
) -> KnowledgeBase:
    """Upsert one edge, returning a new KB with version incremented."""
    weight = _check_weight(weight, f"{kind} edge ({frm}, {to})")
    if kind == "vp":
        if frm not in kb.verbs:
            raise NotFoundError(f"unknown verb {frm!r}")
        if to not in kb.properties:
            raise NotFoundError(f"unknown property {to!r}")
        vp = dict(kb.vp_edges)
        vp[(frm, to)] = weight
        return KnowledgeBase(
            version=kb.version + 1,
            verbs=kb.verbs,
            properties=kb.properties,
            objects=kb.objects,
            vp_edges=vp,
            po_edges=dict(kb.po_edges),
        )
    if kind == "po":
        if frm not in kb.properties:
            raise NotFoundError(f"unknown property {frm!r}")
        if to not in kb.objects:
            raise NotFoundError(f"unknown object {to!r}")
        po = dict(kb.po_edges)
        po[(frm, to)] = weight
        return KnowledgeBase(
            version=kb.version + 1,
            verbs=kb.verbs,
            properties=kb.properties,
            objects=kb.objects,
            vp_edges=dict(kb.vp_edges),
            po_edges=po,
        )
    raise ValueError(f"edge kind must be 'vp' or 'po', got {kind!r}")


def validate(kb: KnowledgeBase) -> list[Violation]:
    """Check every type invariant; empty list means the KB is well-formed."""
    out: list[Violation] = []
    for (v, p), w in kb.vp_edges.items():
        if v not in kb.verbs:
            out.append(Violation("dangling_node", f"vp({v},{p})", f"vp edge references undeclared verb {v!r}"))
        if p not in kb.properties:
            out.append(Violation("dangling_node", f"vp({v},{p})", f"vp edge references undeclared property {p!r}"))
        if not (0.0 <= w <= 1.0) or math.isnan(w):
            out.append(Violation("weight_range", f"vp({v},{p})", f"vp edge weight {w!r} outside [0, 1]"))
    for (p, o), w in kb.po_edges.items():
        if p not in kb.properties:
            out.append(Violation("dangling_node", f"po({p},{o})", f"po edge references undeclared property {p!r}"))
        if o not in kb.objects:
            out.append(Violation("dangling_node", f"po({p},{o})", f"po edge references undeclared object {o!r}"))
        if not (0.0 <= w <= 1.0) or math.isnan(w):
            out.append(Violation("weight_range", f"po({p},{o})", f"po edge weight {w!r} outside [0, 1]"))
    if kb.version < 1:
        out.append(Violation("version", str(kb.version), f"version must be >= 1, got {kb.version}"))
    return out


def build_kb(
    verbs: Iterable[str],
    properties: Iterable[str],
    objects: Iterable[str],
    vp_edges: dict[tuple[str, str], float],
    po_edges: dict[tuple[str, str], float],
    version: int = 1,
) -> KnowledgeBase:
    """Construct and range-check a KB; endpoints must be declared."""
    kb = KnowledgeBase(
        version=version,
        verbs=frozenset(verbs),
        properties=frozenset(properties),
        objects=frozenset(objects),
        vp_edges={k: _check_weight(w, f"vp edge {k}") for k, w in vp_edges.items()},
        po_edges={k: _check_weight(w, f"po edge {k}") for k, w in po_edges.items()},
    )
    bad = [v for v in validate(kb) if v.kind == "dangling_node"]
    if bad:
        raise NotFoundError(bad[0].message)
    return kb
