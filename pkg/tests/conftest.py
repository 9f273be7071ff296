from __future__ import annotations

import math

import numpy as np
import pytest

from affground import (
    EmbeddingTable,
    EmbeddingVector,
    GraspCandidate,
    GraspRect,
    Scene,
    SceneCandidate,
    build_kb,
)
from affground.engine import GroundTruth
from affground.evalkit import SplitMix64


def pytest_runtest_logreport(report):
    """One pass/fail line per acceptance criterion."""
    if "test_acceptance" in report.nodeid and report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[acceptance] {verdict}: {name}", flush=True)


@pytest.fixture
def writing_kb():
    """Small KB: write -> {tip_shaped, ink_bearing}, cut -> {sharp}."""
    return build_kb(
        verbs=["write", "cut"],
        properties=["tip_shaped", "ink_bearing", "sharp"],
        objects=["pen", "hammer", "scissors"],
        vp_edges={
            ("write", "tip_shaped"): 0.9,
            ("write", "ink_bearing"): 0.7,
            ("cut", "sharp"): 1.0,
        },
        po_edges={
            ("tip_shaped", "pen"): 0.8,
            ("ink_bearing", "pen"): 0.6,
            ("sharp", "scissors"): 0.9,
        },
    )


def unit(dim, i):
    v = np.zeros(dim, dtype=np.float32)
    v[i] = 1.0
    return v


@pytest.fixture
def embeddings():
    """8-d table: verbs, objects, and roi embeddings on simple axes."""
    d = 8
    vecs = [
        EmbeddingVector("write", unit(d, 0)),
        EmbeddingVector("cut", unit(d, 1)),
        EmbeddingVector("pen", unit(d, 0) * 0.9 + unit(d, 2) * 0.1),
        EmbeddingVector("hammer", unit(d, 3)),
        EmbeddingVector("scissors", unit(d, 1) * 0.9 + unit(d, 4) * 0.1),
        EmbeddingVector("roi_pen", unit(d, 0) * 0.8 + unit(d, 2) * 0.2),
        EmbeddingVector("roi_hammer", unit(d, 3) * 0.9 + unit(d, 5) * 0.1),
        EmbeddingVector("roi_scissors", unit(d, 1) * 0.8 + unit(d, 4) * 0.2),
    ]
    return EmbeddingTable(vecs)


def simple_grasp(score=0.9, theta=0.0):
    return GraspCandidate(rect=GraspRect(50, 50, 20, 10, theta), score=score)


@pytest.fixture
def desk_scene():
    return Scene(
        scene_id="desk",
        candidates=(
            SceneCandidate(
                roi_id="roi_a",
                bbox=(10, 10, 40, 40),
                grasps=(simple_grasp(0.9),),
                embedding_id="roi_pen",
                hypothesis_label="pen",
            ),
            SceneCandidate(
                roi_id="roi_b",
                bbox=(60, 10, 40, 40),
                grasps=(simple_grasp(0.8),),
                embedding_id="roi_hammer",
                hypothesis_label="hammer",
            ),
        ),
        ground_truth=GroundTruth(
            verb="write",
            target_roi_id="roi_a",
            target_bbox=(10, 10, 40, 40),
            gt_grasp_rects=(GraspRect(50, 50, 20, 10, 0.0),),
        ),
    )


def random_rect(rng: SplitMix64, span=100.0):
    """Random oriented rect from integer draws (portable)."""
    def u(lo, hi):
        return lo + (rng.next_u64() % 10_000) / 10_000.0 * (hi - lo)

    return GraspRect(
        cx=u(0, span),
        cy=u(0, span),
        w=u(5, 40),
        h=u(5, 40),
        theta_deg=u(-90, 90),
    )


def random_kb(rng: SplitMix64, n_verbs=3, n_props=5, n_objs=4):
    verbs = [f"v{i}" for i in range(n_verbs)]
    props = [f"p{i}" for i in range(n_props)]
    objs = [f"o{i}" for i in range(n_objs)]
    vp = {}
    po = {}
    for v in verbs:
        for p in props:
            if rng.next_u64() % 2:
                vp[(v, p)] = (rng.next_u64() % 1000) / 1000.0
    for p in props:
        for o in objs:
            if rng.next_u64() % 2:
                po[(p, o)] = (rng.next_u64() % 1000) / 1000.0
    return build_kb(verbs, props, objs, vp, po)


def random_embeddings(rng: SplitMix64, ids, dim=8):
    vecs = []
    for i in ids:
        vals = np.array(
            [((rng.next_u64() % 2001) - 1000) / 1000.0 for _ in range(dim)],
            dtype=np.float32,
        )
        if not np.any(vals):
            vals[0] = 1.0
        vecs.append(EmbeddingVector(i, vals))
    return EmbeddingTable(vecs)


def random_scene(rng: SplitMix64, scene_id, n_candidates, emb_ids, allow_empty_grasps=True):
    cands = []
    for i in range(n_candidates):
        n_grasps = rng.next_u64() % 4
        if not allow_empty_grasps and n_grasps == 0:
            n_grasps = 1
        grasps = tuple(
            GraspCandidate(
                rect=random_rect(rng),
                score=max(1, rng.next_u64() % 1000) / 1000.0,
            )
            for _ in range(n_grasps)
        )
        cands.append(
            SceneCandidate(
                roi_id=f"roi_{i:02d}",
                bbox=(float(i * 10), 0.0, 20.0, 20.0),
                grasps=grasps,
                embedding_id=emb_ids[rng.next_u64() % len(emb_ids)],
            )
        )
    return Scene(scene_id=scene_id, candidates=tuple(cands))
