"""Energy fusion and candidate selection.

Each scene candidate gets three independent energy terms: grasp
feasibility (negative log of best confidence), affordance fit from the
knowledge base, and embedding alignment with the verb query.  The total
is the weighted sum alpha*grasp + beta*aff + gamma*align; the candidate
with the lowest total wins.  No cross-candidate normalization happens
anywhere, so each breakdown stands on its own as an explanation.

Affordance scoring needs an object hypothesis per ROI.  Two modes:

* ``labels`` -- the scene provides an explicit hypothesis label and its
  energy is used directly (labels outside the KB vocabulary contribute
  zero energy, same as an object with no connecting path);
* ``posterior`` (default) -- a softmax posterior over KB object name
  embeddings weights the per-object energies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

from .errors import DegenerateInputError, NotFoundError, RangeError
from .grasp import GraspCandidate, GraspRect, best_grasp, grasp_energy
from .kb import GroundingPath, KnowledgeBase, PathCombiner, connecting_properties
from .percept import EmbeddingTable, HypothesisPosterior, alignment_energy, object_posterior

HypothesisMode = Literal["labels", "posterior"]


@dataclass(frozen=True)
class EnergyWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise RangeError("energy weights must be non-negative")
        if self.alpha == 0 and self.beta == 0 and self.gamma == 0:
            raise RangeError("energy weights must not all be zero")


@dataclass(frozen=True)
class GroundConfig:
    hypothesis_mode: HypothesisMode = "posterior"
    temperature: float = 0.1
    combiner: PathCombiner = "sum"
    top_k_paths: int = 10


@dataclass(frozen=True)
class SceneCandidate:
    roi_id: str
    bbox: tuple[float, float, float, float]  # x, y, w, h
    grasps: tuple[GraspCandidate, ...]
    embedding_id: str
    hypothesis_label: Optional[str] = None

    def __post_init__(self):
        if self.bbox[2] <= 0 or self.bbox[3] <= 0:
            raise RangeError(f"roi {self.roi_id!r}: bbox extent must be positive")


@dataclass(frozen=True)
class GroundTruth:
    verb: str
    target_roi_id: str
    target_bbox: tuple[float, float, float, float]
    gt_grasp_rects: tuple[GraspRect, ...]


@dataclass(frozen=True)
class Scene:
    scene_id: str
    candidates: tuple[SceneCandidate, ...]
    ground_truth: Optional[GroundTruth] = None

    def __post_init__(self):
        if not self.candidates:
            raise RangeError(f"scene {self.scene_id!r} has no candidates")
        ids = [c.roi_id for c in self.candidates]
        if len(set(ids)) != len(ids):
            raise RangeError(f"scene {self.scene_id!r} has duplicate roi ids")
        if self.ground_truth and self.ground_truth.target_roi_id not in set(ids):
            raise RangeError(
                f"scene {self.scene_id!r}: ground-truth roi "
                f"{self.ground_truth.target_roi_id!r} not among candidates"
            )

    def candidate(self, roi_id: str) -> SceneCandidate:
        for c in self.candidates:
            if c.roi_id == roi_id:
                return c
        raise NotFoundError(f"roi {roi_id!r} not in scene {self.scene_id!r}")


@dataclass(frozen=True)
class EnergyBreakdown:
    roi_id: str
    e_grasp: float
    e_aff: float
    e_align: float
    e_total: float
    best_grasp: Optional[GraspCandidate]
    paths: tuple[GroundingPath, ...]
    posterior: Optional[HypothesisPosterior] = None
    ungraspable: bool = False


@dataclass(frozen=True)
class GroundingResult:
    verb: str
    selected_roi_id: str
    ranked: tuple[EnergyBreakdown, ...]
    weights: EnergyWeights
    kb_version: int

    def breakdown(self, roi_id: str) -> EnergyBreakdown:
        for b in self.ranked:
            if b.roi_id == roi_id:
                return b
        raise NotFoundError(f"roi {roi_id!r} not in result")


def total_energy(weights: EnergyWeights, e_grasp: float, e_aff: float, e_align: float) -> float:
    """alpha*e_grasp + beta*e_aff + gamma*e_align; +inf propagates."""
    if math.isinf(e_grasp):
        # 0 * inf would be nan; an ungraspable candidate stays at +inf
        # even under alpha = 0 only if alpha > 0, else the term drops out.
        if weights.alpha > 0:
            return math.inf
        return weights.beta * e_aff + weights.gamma * e_align
    return weights.alpha * e_grasp + weights.beta * e_aff + weights.gamma * e_align


def _affordance_term(
    kb: KnowledgeBase,
    verb: str,
    candidate: SceneCandidate,
    embeddings: EmbeddingTable,
    config: GroundConfig,
) -> tuple[float, tuple[GroundingPath, ...], Optional[HypothesisPosterior]]:
    """(e_aff, explanation paths, posterior or None) for one candidate."""

    def energy_and_paths(obj: str) -> tuple[float, list[GroundingPath]]:
        if obj not in kb.objects:
            return 0.0, []
        paths = connecting_properties(kb, verb, obj, combiner=config.combiner)
        return math.tanh(-sum(p.contribution for p in paths)), paths

    if config.hypothesis_mode == "labels":
        if candidate.hypothesis_label is None:
            raise DegenerateInputError(
                f"roi {candidate.roi_id!r} has no hypothesis label (labels mode)"
            )
        e_aff, paths = energy_and_paths(candidate.hypothesis_label)
        return e_aff, tuple(paths), None

    vocab = [(o, embeddings.get(o)) for o in sorted(kb.objects) if o in embeddings]
    if not vocab:
        raise DegenerateInputError(
            "posterior mode needs name embeddings for at least one KB object"
        )
    post = object_posterior(embeddings.get(candidate.embedding_id), vocab, config.temperature)
    e_aff = 0.0
    for obj, prob in post.entries:
        e_obj, _ = energy_and_paths(obj)
        e_aff += prob * e_obj
    # explanation paths come from the most probable hypothesis
    _, top_paths = energy_and_paths(post.top())
    return e_aff, tuple(top_paths), post


def ground(
    scene: Scene,
    verb: str,
    kb: KnowledgeBase,
    embeddings: EmbeddingTable,
    weights: EnergyWeights = EnergyWeights(),
    config: GroundConfig = GroundConfig(),
) -> GroundingResult:
    """Score every candidate, rank ascending by total energy.

    Ties break lexicographically by roi_id; +inf candidates always sort
    to the tail.  Pure function of its immutable inputs.
    """
    kb.require_verb(verb)
    verb_emb = embeddings.get(verb)
    embeddings.resolve_all([c.embedding_id for c in scene.candidates])

    breakdowns: list[EnergyBreakdown] = []
    for cand in scene.candidates:
        e_grasp = grasp_energy(list(cand.grasps))
        chosen = best_grasp(list(cand.grasps)) if cand.grasps else None
        e_align = alignment_energy(embeddings.get(cand.embedding_id), verb_emb)
        e_aff, paths, post = _affordance_term(kb, verb, cand, embeddings, config)
        e_total = total_energy(weights, e_grasp, e_aff, e_align)
        breakdowns.append(
            EnergyBreakdown(
                roi_id=cand.roi_id,
                e_grasp=e_grasp,
                e_aff=e_aff,
                e_align=e_align,
                e_total=e_total,
                best_grasp=chosen,
                paths=paths,
                posterior=post,
                ungraspable=not cand.grasps,
            )
        )

    breakdowns.sort(key=lambda b: (b.e_total, b.roi_id))
    return GroundingResult(
        verb=verb,
        selected_roi_id=breakdowns[0].roi_id,
        ranked=tuple(breakdowns),
        weights=weights,
        kb_version=kb.version,
    )


def explain(result: GroundingResult, roi_id: str, top_k: int = 10) -> dict:
    """Structured explanation record for one ranked candidate."""
    b = result.breakdown(roi_id)
    record: dict = {
        "roi_id": b.roi_id,
        "rank": next(i for i, x in enumerate(result.ranked, 1) if x.roi_id == roi_id),
        "terms": {
            "grasp": {"weight": result.weights.alpha, "energy": b.e_grasp},
            "affordance": {"weight": result.weights.beta, "energy": b.e_aff},
            "alignment": {"weight": result.weights.gamma, "energy": b.e_align},
        },
        "e_total": b.e_total,
        "paths": [
            {
                "property": p.property,
                "object": p.object,
                "w_vp": p.w_vp,
                "w_po": p.w_po,
                "contribution": p.contribution,
            }
            for p in b.paths[:top_k]
        ],
    }
    if b.ungraspable:
        record["note"] = "+inf grasp energy - excluded from selection"
        record["best_grasp"] = None
    elif b.best_grasp is not None:
        record["best_grasp"] = {
            "score": b.best_grasp.score,
            "rect": {
                "cx": b.best_grasp.rect.cx,
                "cy": b.best_grasp.rect.cy,
                "w": b.best_grasp.rect.w,
                "h": b.best_grasp.rect.h,
                "theta_deg": b.best_grasp.rect.theta_deg,
            },
        }
    if b.posterior is not None:
        record["posterior"] = [{"object": o, "p": p} for o, p in b.posterior.entries]
    return record
