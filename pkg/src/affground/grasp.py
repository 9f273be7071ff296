"""Grasp scoring and oriented-rectangle success geometry.

The grasp energy is the negative natural log of the best confidence in a
candidate set; an empty set maps to +inf so ungraspable regions stay in
explanations but can never win selection.  The success criterion for a
predicted rectangle pairs an angular test (modulo the 180-degree symmetry
of a gripper rectangle) with a Jaccard overlap computed exactly by
clipping one oriented rectangle against the other's half-planes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotFoundError, RangeError

Point = tuple[float, float]


def _normalize_theta(theta_deg: float) -> float:
    """Fold an angle into (-90, 90]; rectangles are 180-degree symmetric."""
    t = math.fmod(theta_deg, 180.0)
    if t > 90.0:
        t -= 180.0
    elif t <= -90.0:
        t += 180.0
    return t


@dataclass(frozen=True)
class GraspRect:
    """Planar grasp rectangle: center, extent, rotation in degrees."""

    cx: float
    cy: float
    w: float
    h: float
    theta_deg: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise RangeError(f"grasp rect extent must be positive, got w={self.w}, h={self.h}")
        object.__setattr__(self, "theta_deg", _normalize_theta(float(self.theta_deg)))

    def corners(self) -> list[Point]:
        """Corner coordinates in counter-clockwise order."""
        th = math.radians(self.theta_deg)
        c, s = math.cos(th), math.sin(th)
        hw, hh = self.w / 2.0, self.h / 2.0
        out = []
        for dx, dy in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)):
            out.append((self.cx + dx * c - dy * s, self.cy + dx * s + dy * c))
        return out

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class GraspCandidate:
    """One proposed grasp: planar rect, confidence, optional 6-DOF pose.

    pose6d (x, y, z, roll, pitch, yaw) is carried opaquely for downstream
    consumers; nothing here interprets it.
    """

    rect: GraspRect
    score: float
    pose6d: tuple[float, float, float, float, float, float] | None = None

    def __post_init__(self):
        if not (0.0 < self.score <= 1.0):
            raise RangeError(f"grasp score must be in (0, 1], got {self.score}")


def best_grasp(candidates: list[GraspCandidate]) -> GraspCandidate:
    """Max-score candidate; ties go to the lowest list index."""
    if not candidates:
        raise NotFoundError("no grasp candidates")
    best = candidates[0]
    for cand in candidates[1:]:
        if cand.score > best.score:
            best = cand
    return best


def grasp_energy(candidates: list[GraspCandidate]) -> float:
    """-ln(max score); empty set yields +inf (unselectable, not an error)."""
    if not candidates:
        return math.inf
    return -math.log(best_grasp(candidates).score)


def _polygon_area(poly: list[Point]) -> float:
    if len(poly) < 3:
        return 0.0
    acc = 0.0
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        acc += x0 * y1 - x1 * y0
    return abs(acc) / 2.0


def _clip_halfplane(poly: list[Point], a: Point, b: Point) -> list[Point]:
    """Keep the part of poly left of the directed edge a->b (CCW clipper)."""

    def side(p: Point) -> float:
        return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

    out: list[Point] = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        sc, sn = side(cur), side(nxt)
        if sc >= 0:
            out.append(cur)
            if sn < 0:
                out.append(_intersect(cur, nxt, a, b))
        elif sn >= 0:
            out.append(_intersect(cur, nxt, a, b))
    return out


def _intersect(p: Point, q: Point, a: Point, b: Point) -> Point:
    dx1, dy1 = q[0] - p[0], q[1] - p[1]
    dx2, dy2 = b[0] - a[0], b[1] - a[1]
    denom = dx1 * dy2 - dy1 * dx2
    t = ((a[0] - p[0]) * dy2 - (a[1] - p[1]) * dx2) / denom
    return (p[0] + t * dx1, p[1] + t * dy1)


def convex_intersection_area(subject: list[Point], clipper: list[Point]) -> float:
    """Area of the intersection of two convex CCW polygons."""
    poly = list(subject)
    n = len(clipper)
    for i in range(n):
        if not poly:
            return 0.0
        poly = _clip_halfplane(poly, clipper[i], clipper[(i + 1) % n])
    return _polygon_area(poly)


def rect_jaccard(a: GraspRect, b: GraspRect) -> float:
    """Intersection-over-union of two oriented rectangles, exact clipping."""
    inter = convex_intersection_area(a.corners(), b.corners())
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def angular_deviation_deg(a: float, b: float) -> float:
    """Smallest angle between two grasp orientations, modulo 180 degrees."""
    d = abs(math.fmod(a - b, 180.0))
    return min(d, 180.0 - d)


def grasp_success(
    pred: GraspRect,
    gt: list[GraspRect],
    angle_tol_deg: float = 30.0,
    jaccard_min: float = 0.25,
) -> bool:
    """True iff some ground-truth rect is within the angle tolerance and
    the Jaccard index strictly exceeds the threshold."""
    if not gt:
        raise NotFoundError("no ground-truth grasp rectangles")
    for g in gt:
        if angular_deviation_deg(pred.theta_deg, g.theta_deg) <= angle_tol_deg:
            if rect_jaccard(pred, g) > jaccard_min:
                return True
    return False
