"""Verb-conditioned object selection by energy minimization.

A scene's candidate regions are ranked by the weighted sum of three
bounded energy terms: grasp feasibility, symbolic affordance fit from a
bipartite verb-property-object knowledge base, and embedding alignment
with the verb query.  The lowest-energy candidate is selected and every
candidate carries a full, inspectable breakdown.
"""
from .engine import (
    EnergyBreakdown,
    EnergyWeights,
    GroundConfig,
    GroundingResult,
    GroundTruth,
    Scene,
    SceneCandidate,
    explain,
    ground,
    total_energy,
)
from .grasp import GraspCandidate, GraspRect, best_grasp, grasp_energy, grasp_success, rect_jaccard
from .kb import (
    GroundingPath,
    KnowledgeBase,
    affordance_energy,
    build_kb,
    connecting_properties,
    edit_edge,
    validate,
)
from .ingest import import_flat, ingest, merge
from .percept import (
    EmbeddingTable,
    EmbeddingVector,
    HypothesisPosterior,
    alignment_energy,
    cosine,
    object_posterior,
)

__version__ = "0.1.0"

__all__ = [
    "EnergyBreakdown",
    "EnergyWeights",
    "GroundConfig",
    "GroundingResult",
    "GroundTruth",
    "Scene",
    "SceneCandidate",
    "explain",
    "ground",
    "total_energy",
    "GraspCandidate",
    "GraspRect",
    "best_grasp",
    "grasp_energy",
    "grasp_success",
    "rect_jaccard",
    "GroundingPath",
    "KnowledgeBase",
    "affordance_energy",
    "build_kb",
    "connecting_properties",
    "edit_edge",
    "validate",
    "import_flat",
    "ingest",
    "merge",
    "EmbeddingTable",
    "EmbeddingVector",
    "HypothesisPosterior",
    "alignment_energy",
    "cosine",
    "object_posterior",
]
