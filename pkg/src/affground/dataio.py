"""Canonical serialization for KBs, scenes, embeddings, and reports.

Documents are JSON with a fixed canonical form: keys sorted, UTF-8,
newline-terminated, numbers rendered with at most 9 significant digits
and no trailing zeros.  save(load(bytes)) reproduces the bytes exactly
on canonical input, which is what makes diffing and round-trip tests
byte-stable.  Non-finite energies are encoded as the strings "inf" /
"-inf" so documents stay plain JSON.

The embedding sidecar is binary: magic ``AFFEMB1\\0``, little-endian
u32 count and dim, count*dim float32 values, then one UTF-8 id per
line.  A JSON form (``affemb/1``) with inline arrays is accepted too.
"""
from __future__ import annotations

import json
import math
import struct

import numpy as np

from .errors import ParseError
from .grasp import GraspCandidate, GraspRect
from .engine import GroundTruth, GroundingResult, Scene, SceneCandidate, explain
from .kb import KnowledgeBase, build_kb
from .percept import EmbeddingTable, EmbeddingVector

EMB_MAGIC = b"AFFEMB1\x00"


# ---------------------------------------------------------------- canonical JSON

def format_number(x: float) -> str:
    """Render a float with up to 9 significant digits, no trailing zeros."""
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        raise ParseError("NaN is not representable in canonical documents")
    s = format(float(x), ".9g")
    return s


def _render(value) -> str:
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_render(v)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(v) for v in value) + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    raise ParseError(f"unserializable value of type {type(value).__name__}")


def canonical_bytes(doc: dict) -> bytes:
    """Canonical serialized form of a JSON-compatible document."""
    return (_render(doc) + "\n").encode("utf-8")


def parse_document(raw: bytes, expected_format: str | None = None) -> dict:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"not a valid document: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("document root must be an object")
    if expected_format is not None and doc.get("format") != expected_format:
        raise ParseError(f"format: expected {expected_format!r}, got {doc.get('format')!r}")
    return doc


def _num(doc, path: str, lo=None, hi=None, lo_open=False) -> float:
    cur = doc
    for part in path.replace("]", "").replace("[", ".").split("."):
        key = int(part) if part.lstrip("-").isdigit() else part
        try:
            cur = cur[key]
        except (KeyError, IndexError, TypeError):
            raise ParseError(f"{path}: missing field") from None
    if isinstance(cur, str) and cur in ("inf", "-inf"):
        cur = math.inf if cur == "inf" else -math.inf
    if isinstance(cur, bool) or not isinstance(cur, (int, float)):
        raise ParseError(f"{path}: expected number, got {cur!r}")
    x = float(cur)
    if lo is not None and (x < lo or (lo_open and x == lo)):
        raise ParseError(f"{path}: value {x} out of range")
    if hi is not None and x > hi:
        raise ParseError(f"{path}: value {x} out of range")
    return x


def _str(doc, path: str) -> str:
    cur = doc
    for part in path.split("."):
        try:
            cur = cur[part]
        except (KeyError, TypeError):
            raise ParseError(f"{path}: missing field") from None
    if not isinstance(cur, str):
        raise ParseError(f"{path}: expected string, got {cur!r}")
    return cur


# ---------------------------------------------------------------- KB (affkb/1)

def kb_to_doc(kb: KnowledgeBase) -> dict:
    return {
        "format": "affkb/1",
        "version": kb.version,
        "verbs": sorted(kb.verbs),
        "properties": sorted(kb.properties),
        "objects": sorted(kb.objects),
        "vp_edges": [
            {"verb": v, "property": p, "weight": w}
            for (v, p), w in sorted(kb.vp_edges.items())
        ],
        "po_edges": [
            {"property": p, "object": o, "weight": w}
            for (p, o), w in sorted(kb.po_edges.items())
        ],
    }


def save_kb(kb: KnowledgeBase) -> bytes:
    return canonical_bytes(kb_to_doc(kb))


def load_kb(raw: bytes) -> KnowledgeBase:
    doc = parse_document(raw, "affkb/1")
    version = doc.get("version")
    if not isinstance(version, int) or version < 1:
        raise ParseError(f"version: expected positive integer, got {version!r}")
    for key in ("verbs", "properties", "objects", "vp_edges", "po_edges"):
        if not isinstance(doc.get(key), list):
            raise ParseError(f"{key}: expected list")
    vp = {}
    for i, e in enumerate(doc["vp_edges"]):
        key = (_str(e, "verb"), _str(e, "property"))
        if key in vp:
            raise ParseError(f"vp_edges[{i}]: duplicate edge {key}")
        try:
            vp[key] = _num(e, "weight", 0.0, 1.0)
        except ParseError as err:
            raise ParseError(f"vp_edges[{i}].{err}") from None
    po = {}
    for i, e in enumerate(doc["po_edges"]):
        key = (_str(e, "property"), _str(e, "object"))
        if key in po:
            raise ParseError(f"po_edges[{i}]: duplicate edge {key}")
        try:
            po[key] = _num(e, "weight", 0.0, 1.0)
        except ParseError as err:
            raise ParseError(f"po_edges[{i}].{err}") from None
    try:
        return build_kb(doc["verbs"], doc["properties"], doc["objects"], vp, po, version=version)
    except Exception as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------- scene (affscene/1)

def _rect_to_doc(r: GraspRect) -> dict:
    return {"cx": r.cx, "cy": r.cy, "w": r.w, "h": r.h, "theta_deg": r.theta_deg}


def _rect_from_doc(d, path: str) -> GraspRect:
    try:
        return GraspRect(
            cx=_num(d, "cx"),
            cy=_num(d, "cy"),
            w=_num(d, "w", 0.0, None, lo_open=True),
            h=_num(d, "h", 0.0, None, lo_open=True),
            theta_deg=_num(d, "theta_deg"),
        )
    except ParseError as e:
        raise ParseError(f"{path}.{e}") from None


def scene_to_doc(scene: Scene) -> dict:
    doc: dict = {
        "format": "affscene/1",
        "scene_id": scene.scene_id,
        "candidates": [],
    }
    for c in scene.candidates:
        cd: dict = {
            "roi_id": c.roi_id,
            "bbox": list(c.bbox),
            "embedding_id": c.embedding_id,
            "grasps": [],
        }
        for g in c.grasps:
            gd: dict = {"rect": _rect_to_doc(g.rect), "score": g.score}
            if g.pose6d is not None:
                gd["pose6d"] = list(g.pose6d)
            cd["grasps"].append(gd)
        if c.hypothesis_label is not None:
            cd["hypothesis_label"] = c.hypothesis_label
        doc["candidates"].append(cd)
    if scene.ground_truth is not None:
        gt = scene.ground_truth
        doc["ground_truth"] = {
            "verb": gt.verb,
            "target_roi_id": gt.target_roi_id,
            "target_bbox": list(gt.target_bbox),
            "gt_grasp_rects": [_rect_to_doc(r) for r in gt.gt_grasp_rects],
        }
    return doc


def save_scene(scene: Scene) -> bytes:
    return canonical_bytes(scene_to_doc(scene))


def load_scene(raw: bytes) -> Scene:
    doc = parse_document(raw, "affscene/1")
    scene_id = _str(doc, "scene_id")
    cands_doc = doc.get("candidates")
    if not isinstance(cands_doc, list) or not cands_doc:
        raise ParseError("candidates: expected non-empty list")
    candidates = []
    for i, cd in enumerate(cands_doc):
        bbox = cd.get("bbox")
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise ParseError(f"candidates[{i}].bbox: expected [x, y, w, h]")
        grasps = []
        for j, gd in enumerate(cd.get("grasps", [])):
            rect = gd.get("rect")
            if not isinstance(rect, dict):
                raise ParseError(f"candidates[{i}].grasps[{j}].rect: missing")
            score = _num(gd, "score")
            if not (0.0 < score <= 1.0):
                raise ParseError(
                    f"candidates[{i}].grasps[{j}].score: {score} not in (0, 1]"
                )
            pose6d = gd.get("pose6d")
            if pose6d is not None:
                if not isinstance(pose6d, list) or len(pose6d) != 6:
                    raise ParseError(f"candidates[{i}].grasps[{j}].pose6d: expected 6 reals")
                pose6d = tuple(float(x) for x in pose6d)
            grasps.append(
                GraspCandidate(
                    rect=_rect_from_doc(rect, f"candidates[{i}].grasps[{j}].rect"),
                    score=score,
                    pose6d=pose6d,
                )
            )
        try:
            candidates.append(
                SceneCandidate(
                    roi_id=_str(cd, "roi_id"),
                    bbox=tuple(float(x) for x in bbox),
                    grasps=tuple(grasps),
                    embedding_id=_str(cd, "embedding_id"),
                    hypothesis_label=cd.get("hypothesis_label"),
                )
            )
        except Exception as e:
            raise ParseError(f"candidates[{i}]: {e}") from None
    ground_truth = None
    gt_doc = doc.get("ground_truth")
    if gt_doc is not None:
        tb = gt_doc.get("target_bbox")
        if not isinstance(tb, list) or len(tb) != 4:
            raise ParseError("ground_truth.target_bbox: expected [x, y, w, h]")
        ground_truth = GroundTruth(
            verb=_str(gt_doc, "verb"),
            target_roi_id=_str(gt_doc, "target_roi_id"),
            target_bbox=tuple(float(x) for x in tb),
            gt_grasp_rects=tuple(
                _rect_from_doc(r, f"ground_truth.gt_grasp_rects[{k}]")
                for k, r in enumerate(gt_doc.get("gt_grasp_rects", []))
            ),
        )
    try:
        return Scene(scene_id=scene_id, candidates=tuple(candidates), ground_truth=ground_truth)
    except Exception as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------- embeddings

def save_embeddings(table: EmbeddingTable) -> bytes:
    """Binary sidecar form (AFFEMB1)."""
    ids = table.ids()
    dim = table.dim
    out = bytearray(EMB_MAGIC)
    out += struct.pack("<II", len(ids), dim)
    for i in ids:
        out += table.get(i).values.astype("<f4").tobytes()
    out += ("\n".join(ids) + "\n").encode("utf-8")
    return bytes(out)


def load_embeddings(raw: bytes) -> EmbeddingTable:
    """Accepts the binary sidecar or the affemb/1 JSON form."""
    if raw.startswith(EMB_MAGIC):
        return _load_embeddings_binary(raw)
    doc = parse_document(raw, "affemb/1")
    vecs_doc = doc.get("vectors")
    if not isinstance(vecs_doc, dict):
        raise ParseError("vectors: expected object of id -> array")
    vectors = []
    for vid in sorted(vecs_doc):
        arr = vecs_doc[vid]
        if not isinstance(arr, list) or not arr:
            raise ParseError(f"vectors.{vid}: expected non-empty array")
        vectors.append(EmbeddingVector(id=vid, values=np.array(arr, dtype=np.float32)))
    try:
        return EmbeddingTable(vectors)
    except Exception as e:
        raise ParseError(str(e)) from None


def _load_embeddings_binary(raw: bytes) -> EmbeddingTable:
    header_len = len(EMB_MAGIC) + 8
    if len(raw) < header_len:
        raise ParseError("truncated embedding file header")
    count, dim = struct.unpack_from("<II", raw, len(EMB_MAGIC))
    if dim < 1:
        raise ParseError("dim: must be >= 1")
    payload_end = header_len + count * dim * 4
    if len(raw) < payload_end:
        raise ParseError(
            f"truncated payload: expected {count}x{dim} float32 values"
        )
    ids = raw[payload_end:].decode("utf-8").splitlines()
    if len(ids) != count:
        raise ParseError(f"id list has {len(ids)} entries, header says {count}")
    values = np.frombuffer(raw, dtype="<f4", count=count * dim, offset=header_len)
    values = values.reshape(count, dim)
    vectors = [EmbeddingVector(id=ids[i], values=values[i].copy()) for i in range(count)]
    try:
        return EmbeddingTable(vectors)
    except Exception as e:
        raise ParseError(str(e)) from None


def embeddings_to_doc(table: EmbeddingTable) -> dict:
    return {
        "format": "affemb/1",
        "vectors": {i: [float(x) for x in table.get(i).values] for i in table.ids()},
    }


# ---------------------------------------------------------------- results & reports

def result_to_doc(result: GroundingResult, include_explanations: bool = False) -> dict:
    doc: dict = {
        "format": "affresult/1",
        "verb": result.verb,
        "selected_roi_id": result.selected_roi_id,
        "kb_version": result.kb_version,
        "weights": {
            "alpha": result.weights.alpha,
            "beta": result.weights.beta,
            "gamma": result.weights.gamma,
        },
        "ranked": [
            {
                "roi_id": b.roi_id,
                "e_grasp": b.e_grasp,
                "e_aff": b.e_aff,
                "e_align": b.e_align,
                "e_total": b.e_total,
                "ungraspable": b.ungraspable,
                "paths": [
                    {
                        "property": p.property,
                        "object": p.object,
                        "w_vp": p.w_vp,
                        "w_po": p.w_po,
                        "contribution": p.contribution,
                    }
                    for p in b.paths
                ],
            }
            for b in result.ranked
        ],
    }
    if include_explanations:
        doc["explanations"] = [explain(result, b.roi_id) for b in result.ranked]
    return doc


def report_to_doc(protocol: str, rows: list[dict], config_echo: dict) -> dict:
    return {
        "format": "affreport/1",
        "protocol": protocol,
        "rows": rows,
        "config_echo": config_echo,
    }


def report_to_table(doc: dict) -> str:
    """Flat tab-separated rendering of an affreport/1 document."""
    rows = doc.get("rows", [])
    if not rows:
        return "(empty report)\n"
    cols = sorted({k for r in rows for k in r})
    lines = ["\t".join(cols)]
    for r in rows:
        lines.append("\t".join(_cell(r.get(c)) for c in cols))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)
