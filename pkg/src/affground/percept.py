"""Embedding store and alignment scoring.

Vectors arrive from upstream encoders as 32-bit float arrays; nothing
here runs a model.  Cosine similarity feeds two consumers: the alignment
energy tanh(-cos) between an ROI embedding and the verb embedding, and a
softmax posterior over the KB object vocabulary that lets an unlabeled
ROI participate in affordance scoring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, ResolutionError, ShapeError


@dataclass(frozen=True)
class EmbeddingVector:
    id: str
    values: np.ndarray  # float32, shape (dim,)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        object.__setattr__(self, "values", arr)
        if arr.ndim != 1 or arr.size < 1:
            raise ShapeError(f"embedding {self.id!r} must be a 1-D vector, got shape {arr.shape}")

    @property
    def dim(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class HypothesisPosterior:
    """Distribution over candidate object identifiers for one ROI."""

    entries: tuple[tuple[str, float], ...]
    temperature: float

    def top(self) -> str:
        return self.entries[0][0]

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)


class EmbeddingTable:
    """Read-only id -> vector map; all vectors share one dimension."""

    def __init__(self, vectors: list[EmbeddingVector]):
        self._by_id: dict[str, EmbeddingVector] = {}
        dim = None
        for vec in vectors:
            if vec.id in self._by_id:
                raise ShapeError(f"duplicate embedding id {vec.id!r}")
            if dim is None:
                dim = vec.dim
            elif vec.dim != dim:
                raise ShapeError(
                    f"embedding {vec.id!r} has dim {vec.dim}, table dim is {dim}"
                )
            self._by_id[vec.id] = vec
        self.dim = dim or 0

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, key: str) -> bool:
        return key in self._by_id

    def ids(self) -> list[str]:
        return sorted(self._by_id)

    def get(self, key: str) -> EmbeddingVector:
        try:
            return self._by_id[key]
        except KeyError:
            raise ResolutionError(f"embedding id {key!r} not found", [key]) from None

    def resolve_all(self, ids: list[str]) -> None:
        """Raise one error listing every missing id."""
        missing = sorted({i for i in ids if i not in self._by_id})
        if missing:
            raise ResolutionError(
                "missing embedding ids: " + ", ".join(missing), missing
            )


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1], computed in float64."""
    if u.dim != v.dim:
        raise ShapeError(f"dim mismatch: {u.id!r} has {u.dim}, {v.id!r} has {v.dim}")
    a = u.values.astype(np.float64)
    b = v.values.astype(np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        zero = u.id if na == 0.0 else v.id
        raise DegenerateInputError(f"zero-norm embedding {zero!r}")
    sim = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, sim))


def alignment_energy(roi_emb: EmbeddingVector, verb_emb: EmbeddingVector) -> float:
    """tanh of negated cosine similarity; lower = better visual match."""
    return math.tanh(-cosine(roi_emb, verb_emb))


def object_posterior(
    roi_emb: EmbeddingVector,
    vocab: list[tuple[str, EmbeddingVector]],
    temperature: float = 0.1,
) -> HypothesisPosterior:
    """Softmax over cosine similarities to vocabulary name embeddings.

    Entries are ordered by descending probability, ties broken by id, so
    the posterior is deterministic and its argmax is entries[0].
    """
    if not vocab:
        raise DegenerateInputError("object_posterior needs a non-empty vocabulary")
    if temperature <= 0:
        raise DegenerateInputError(f"temperature must be > 0, got {temperature}")
    sims = np.array([cosine(roi_emb, emb) for _, emb in vocab], dtype=np.float64)
    logits = sims / temperature
    logits -= logits.max()  # shift-invariant softmax
    probs = np.exp(logits)
    probs /= probs.sum()
    entries = sorted(
        zip((name for name, _ in vocab), probs.tolist()),
        key=lambda e: (-e[1], e[0]),
    )
    return HypothesisPosterior(entries=tuple(entries), temperature=temperature)
