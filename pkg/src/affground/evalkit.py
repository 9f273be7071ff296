"""Evaluation protocols: tiered static evaluation and ranked episodes.

Static evaluation scores one grounded scene against ground truth: the
selected ROI must overlap the target box at IoU >= 0.5 and the chosen
grasp rectangle must pass the 30-degree / 0.25-Jaccard criterion.  Tiers
(perfect_grasp_and_detect, perfect_grasp, full_pipeline) differ only in
where the input scenes' boxes and grasps came from; the scoring path is
identical.

Episode evaluation ranks candidate sets per verb and reports top-1
accuracy, MRR, and nDCG (binary gain, log2(i+1) discount over the full
ranking).  Shuffling of candidate presentation order uses a splitmix64
generator so fixtures replay identically across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

from .errors import ConfigurationError, ProtocolError
from .engine import EnergyWeights, GroundConfig, GroundingResult, Scene, ground
from .grasp import GraspRect, grasp_success
from .kb import KnowledgeBase, connecting_properties
from .percept import EmbeddingTable, alignment_energy, object_posterior

Tier = Literal["perfect_grasp_and_detect", "perfect_grasp", "full_pipeline"]
TIERS: tuple[Tier, ...] = ("perfect_grasp_and_detect", "perfect_grasp", "full_pipeline")

EpisodeMode = Literal["single", "multi"]

BBox = tuple[float, float, float, float]


# ---------------------------------------------------------------- splitmix64

class SplitMix64:
    """Tiny integer-only RNG; identical sequences on every platform."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self.MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self.MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


# ---------------------------------------------------------------- geometry

def bbox_iou(a: BBox, b: BBox) -> float:
    """Axis-aligned intersection-over-union of (x, y, w, h) boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    ix = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    iy = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = ix * iy
    union = aw * ah + bw * bh - inter
    if union <= 0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class StaticOutcome:
    roi_correct: bool
    grasp_correct: bool
    success: bool
    tier: Tier


def static_episode_eval(
    pred_bbox: BBox,
    pred_grasp: Optional[GraspRect],
    target_bbox: BBox,
    gt_rects: list[GraspRect],
    tier: Tier,
    iou_min: float = 0.5,
    angle_tol_deg: float = 30.0,
    jaccard_min: float = 0.25,
) -> StaticOutcome:
    """Score one prediction; success requires both the ROI and grasp tests."""
    roi_correct = bbox_iou(pred_bbox, target_bbox) >= iou_min
    grasp_correct = (
        pred_grasp is not None
        and grasp_success(pred_grasp, gt_rects, angle_tol_deg, jaccard_min)
    )
    return StaticOutcome(
        roi_correct=roi_correct,
        grasp_correct=grasp_correct,
        success=roi_correct and grasp_correct,
        tier=tier,
    )


# ---------------------------------------------------------------- ranking metrics

RankedEpisode = tuple[list[str], dict[str, int]]  # (ranked ids, id -> 0/1)


def _first_relevant_rank(ranking: list[str], relevance: dict[str, int]) -> int:
    for i, cid in enumerate(ranking, start=1):
        if relevance.get(cid, 0) > 0:
            return i
    raise ProtocolError("episode has no relevant candidate in its ranking")


def mrr(episodes: list[RankedEpisode]) -> float:
    """Mean of 1/rank-of-first-relevant, ranks starting at 1."""
    if not episodes:
        raise ProtocolError("mrr needs at least one episode")
    return sum(1.0 / _first_relevant_rank(r, rel) for r, rel in episodes) / len(episodes)


def ndcg(episodes: list[RankedEpisode]) -> float:
    """Binary-gain nDCG with log2(i+1) discount over the full ranking."""
    if not episodes:
        raise ProtocolError("ndcg needs at least one episode")
    total = 0.0
    for ranking, relevance in episodes:
        gains = [relevance.get(cid, 0) for cid in ranking]
        n_rel = sum(1 for g in gains if g > 0)
        if n_rel == 0:
            raise ProtocolError("episode has no relevant candidate")
        dcg = sum(g / math.log2(i + 1) for i, g in enumerate(gains, start=1))
        ideal = sum(1.0 / math.log2(i + 1) for i in range(1, n_rel + 1))
        total += dcg / ideal
    return total / len(episodes)


# ---------------------------------------------------------------- episodes

@dataclass(frozen=True)
class EvaluationEpisode:
    episode_id: str
    verb: str
    candidates: tuple[tuple[str, str, Optional[str]], ...]  # (candidate_id, embedding_id, label?)
    relevance: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.candidates) < 2:
            raise ProtocolError(f"episode {self.episode_id!r} needs >= 2 candidates")


def _check_mode(episode: EvaluationEpisode, mode: EpisodeMode) -> None:
    n_rel = sum(1 for v in episode.relevance.values() if v > 0)
    if mode == "single" and n_rel != 1:
        raise ProtocolError(
            f"episode {episode.episode_id!r}: single mode needs exactly one relevant candidate, got {n_rel}"
        )
    if mode == "multi" and n_rel < 1:
        raise ProtocolError(
            f"episode {episode.episode_id!r}: multi mode needs at least one relevant candidate"
        )


def rank_episode(
    episode: EvaluationEpisode,
    kb: KnowledgeBase,
    embeddings: EmbeddingTable,
    weights: EnergyWeights,
    config: GroundConfig = GroundConfig(),
    order: Optional[list[int]] = None,
) -> list[str]:
    """Rank episode candidates by beta*E_aff + gamma*E_align.

    Episodes carry no grasp sets, so the grasp term is absent by
    construction.  Ties break by presentation order then id.
    """
    kb.require_verb(episode.verb)
    verb_emb = embeddings.get(episode.verb)
    idx = order if order is not None else list(range(len(episode.candidates)))
    scored = []
    vocab = None
    for pos, i in enumerate(idx):
        cand_id, emb_id, label = episode.candidates[i]
        emb = embeddings.get(emb_id)
        e_align = alignment_energy(emb, verb_emb)
        if config.hypothesis_mode == "labels" and label is not None:
            e_aff = _label_energy(kb, episode.verb, label, config)
        else:
            if vocab is None:
                vocab = [(o, embeddings.get(o)) for o in sorted(kb.objects) if o in embeddings]
            post = object_posterior(emb, vocab, config.temperature)
            e_aff = sum(
                p * _label_energy(kb, episode.verb, o, config) for o, p in post.entries
            )
        e_total = weights.beta * e_aff + weights.gamma * e_align
        scored.append((e_total, pos, cand_id))
    scored.sort(key=lambda t: (t[0], t[1], t[2]))
    return [cid for _, _, cid in scored]


def _label_energy(kb: KnowledgeBase, verb: str, obj: str, config: GroundConfig) -> float:
    if obj not in kb.objects:
        return 0.0
    paths = connecting_properties(kb, verb, obj, combiner=config.combiner)
    return math.tanh(-sum(p.contribution for p in paths))


def run_episodes(
    episodes: list[EvaluationEpisode],
    kb: KnowledgeBase,
    embeddings: EmbeddingTable,
    weights: EnergyWeights = EnergyWeights(),
    mode: EpisodeMode = "single",
    seed: int = 0,
    config: GroundConfig = GroundConfig(),
) -> dict:
    """Score all episodes; returns an affreport/1-shaped payload.

    Deterministic given the seed: the only randomness is the splitmix64
    shuffle of each episode's candidate presentation order.
    """
    if not episodes:
        raise ProtocolError("no episodes to run")
    rng = SplitMix64(seed)
    per_verb: dict[str, list[RankedEpisode]] = {}
    correct = 0
    ranked_all: list[RankedEpisode] = []
    for ep in episodes:
        _check_mode(ep, mode)
        order = list(range(len(ep.candidates)))
        rng.shuffle(order)
        ranking = rank_episode(ep, kb, embeddings, weights, config, order)
        pair: RankedEpisode = (ranking, ep.relevance)
        ranked_all.append(pair)
        per_verb.setdefault(ep.verb, []).append(pair)
        if ep.relevance.get(ranking[0], 0) > 0:
            correct += 1

    rows = []
    for verb in sorted(per_verb):
        eps = per_verb[verb]
        acc = sum(1 for r, rel in eps if rel.get(r[0], 0) > 0) / len(eps)
        rows.append(
            {
                "verb": verb,
                "episodes": len(eps),
                "accuracy": acc,
                "mrr": mrr(eps),
                "ndcg": ndcg(eps),
            }
        )
    rows.append(
        {
            "verb": "ALL",
            "episodes": len(episodes),
            "accuracy": correct / len(episodes),
            "mrr": mrr(ranked_all),
            "ndcg": ndcg(ranked_all),
        }
    )
    return {
        "format": "affreport/1",
        "protocol": "episodes",
        "rows": rows,
        "config_echo": {
            "mode": mode,
            "seed": seed,
            "weights": {"alpha": weights.alpha, "beta": weights.beta, "gamma": weights.gamma},
            "hypothesis_mode": config.hypothesis_mode,
            "temperature": config.temperature,
        },
    }


# ---------------------------------------------------------------- static runner

def run_static(
    scenes_by_tier: dict[str, list[Scene]],
    kb: KnowledgeBase,
    embeddings: EmbeddingTable,
    weights: EnergyWeights = EnergyWeights(),
    tiers: tuple[Tier, ...] = TIERS,
    config: GroundConfig = GroundConfig(),
) -> dict:
    """Ground every scene per tier, score against its ground truth.

    Every scene must carry ground truth (verb, target box, gt grasp
    rects); tiers without input scenes are a configuration error.
    """
    rows = []
    for tier in tiers:
        scenes = scenes_by_tier.get(tier)
        if not scenes:
            raise ConfigurationError(f"no scenes provided for tier {tier!r}")
        successes = 0
        roi_hits = 0
        grasp_hits = 0
        for scene in scenes:
            if scene.ground_truth is None:
                raise ConfigurationError(
                    f"scene {scene.scene_id!r} lacks ground truth"
                )
            gt = scene.ground_truth
            result = ground(scene, gt.verb, kb, embeddings, weights, config)
            outcome = score_static_result(scene, result, tier)
            successes += outcome.success
            roi_hits += outcome.roi_correct
            grasp_hits += outcome.grasp_correct
        n = len(scenes)
        rows.append(
            {
                "tier": tier,
                "scenes": n,
                "accuracy": successes / n,
                "roi_accuracy": roi_hits / n,
                "grasp_accuracy": grasp_hits / n,
            }
        )
    return {
        "format": "affreport/1",
        "protocol": "static",
        "rows": rows,
        "config_echo": {
            "weights": {"alpha": weights.alpha, "beta": weights.beta, "gamma": weights.gamma},
            "hypothesis_mode": config.hypothesis_mode,
            "iou_min": 0.5,
            "angle_tol_deg": 30.0,
            "jaccard_min": 0.25,
        },
    }


def score_static_result(scene: Scene, result: GroundingResult, tier: Tier) -> StaticOutcome:
    """Static outcome for the selected candidate of one grounded scene."""
    gt = scene.ground_truth
    if gt is None:
        raise ConfigurationError(f"scene {scene.scene_id!r} lacks ground truth")
    selected = scene.candidate(result.selected_roi_id)
    chosen = result.ranked[0].best_grasp
    return static_episode_eval(
        pred_bbox=selected.bbox,
        pred_grasp=chosen.rect if chosen else None,
        target_bbox=gt.target_bbox,
        gt_rects=list(gt.gt_grasp_rects),
        tier=tier,
    )
