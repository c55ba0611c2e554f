"""Exact 2D primitives for the image-source tracer.

Everything here is scalar and pure. The propagation engine has its own
vectorised twin of the visibility test; the two are checked against each
other in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

EPS = 1e-9  # m; self-hit and endpoint tolerance


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Point2":
        return Point2(k * self.x, k * self.y)

    def dot(self, other: "Point2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)

    def distance(self, other: "Point2") -> float:
        return (self - other).norm()

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Segment:
    a: Point2
    b: Point2

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("degenerate segment: a == b")

    @property
    def vector(self) -> Point2:
        return self.b - self.a

    @property
    def length(self) -> float:
        return self.vector.norm()

    @property
    def midpoint(self) -> Point2:
        return Point2(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))

    def unit_normal(self) -> Point2:
        """Left-hand unit normal of a -> b."""
        v = self.vector
        n = v.norm()
        return Point2(-v.y / n, v.x / n)

    def distance_to(self, p: Point2) -> float:
        """Euclidean distance from ``p`` to the closed segment."""
        v = self.vector
        t = (p - self.a).dot(v) / v.dot(v)
        t = min(1.0, max(0.0, t))
        return p.distance(self.a + v.scaled(t))


@dataclass(frozen=True)
class Ray:
    origin: Point2
    direction: Point2

    def __post_init__(self):
        if abs(self.direction.norm() - 1.0) > 1e-12:
            raise ValueError("ray direction must be a unit vector")

    @classmethod
    def toward(cls, origin: Point2, target: Point2) -> "Ray":
        d = target - origin
        n = d.norm()
        if n == 0.0:
            raise ValueError("ray target coincides with origin")
        return cls(origin, Point2(d.x / n, d.y / n))


def _segment_params(p: Point2, d: Point2, seg: Segment):
    """Solve p + t*d = a + u*(b - a). Returns (t, u) or None when parallel."""
    e = seg.vector
    denom = d.cross(e)
    if abs(denom) <= 1e-15 * d.norm() * e.norm():
        return None
    ap = seg.a - p
    return ap.cross(e) / denom, ap.cross(d) / denom


def intersect_ray_segment(ray: Ray, seg: Segment) -> Optional[Tuple[Point2, float]]:
    """First hit of ``ray`` on ``seg`` as ``(point, distance)``, or None.

    Endpoints count as hits. Hits closer than ``EPS`` to the origin are
    discarded so a ray leaving a wall does not hit that wall again. A ray
    running along a collinear segment hits its nearest endpoint ahead; one
    starting on it slides along and does not hit.
    """
    hit = _segment_params(ray.origin, ray.direction, seg)
    if hit is None:
        if abs((seg.a - ray.origin).cross(ray.direction)) > EPS:
            return None
        ta = (seg.a - ray.origin).dot(ray.direction)
        tb = (seg.b - ray.origin).dot(ray.direction)
        t = min(ta, tb)
        if t <= EPS:
            return None
        return ray.origin + ray.direction.scaled(t), t
    t, u = hit
    if t <= EPS or u < 0.0 or u > 1.0:
        return None
    return ray.origin + ray.direction.scaled(t), t


def mirror_point(p: Point2, line_through: Segment) -> Point2:
    """Reflect ``p`` across the infinite line carrying ``line_through``."""
    a = line_through.a
    v = line_through.vector
    t = (p - a).dot(v) / v.dot(v)
    foot = a + v.scaled(t)
    return Point2(2.0 * foot.x - p.x, 2.0 * foot.y - p.y)


def reflect_direction(d: Point2, n: Point2) -> Point2:
    k = 2.0 * d.dot(n)
    return Point2(d.x - k * n.x, d.y - k * n.y)


def segment_blocks(p: Point2, q: Point2, seg: Segment, eps: float = EPS) -> bool:
    """True if ``seg`` meets the open segment (p, q) away from its ends."""
    d = q - p
    length = d.norm()
    hit = _segment_params(p, d, seg)
    if hit is None:
        if abs((seg.a - p).cross(d)) > eps * length:
            return False
        # collinear overlap, measured along p -> q in metres
        ta = (seg.a - p).dot(d) / length
        tb = (seg.b - p).dot(d) / length
        lo, hi = min(ta, tb), max(ta, tb)
        return max(lo, eps) < min(hi, length - eps)
    t, u = hit
    if u < 0.0 or u > 1.0:
        return False
    return eps < t * length < length - eps


def is_visible(
    p: Point2,
    q: Point2,
    occluders: Sequence[Segment],
    skip: Iterable[int] = (),
) -> bool:
    """Line of sight between ``p`` and ``q`` past ``occluders``.

    Occluders whose index is in ``skip`` are ignored, and so are contacts
    within ``EPS`` of either end.
    """
    if p == q:
        raise ValueError("visibility query with p == q")
    skip = set(skip)
    return not any(
        segment_blocks(p, q, seg) for i, seg in enumerate(occluders) if i not in skip
    )
