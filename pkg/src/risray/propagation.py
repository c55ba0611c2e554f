"""Image-source specular ray tracer and power maps.

The core (`_trace`) unfolds every wall sequence for a whole batch of
receiver points at once. Per-point arithmetic is elementwise
(+, -, *, /, sqrt) and summed over sequences in a fixed order, so the
value at a point does not depend on which batch it was evaluated in.
That is what makes maps bit-identical across chunkings and thread counts.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import EPS, Point2, mirror_point
from .scene import Bounds, Transmitter, Wall

C = 299_792_458.0  # m/s


class Summation(str, Enum):
    INCOHERENT = "incoherent"


@dataclass(frozen=True)
class PropagationParams:
    max_order: int = 3
    power_floor_dbm: float = -150.0
    summation: Summation = Summation.INCOHERENT

    def __post_init__(self):
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")
        object.__setattr__(self, "summation", Summation(self.summation))


@dataclass(frozen=True)
class PropagationPath:
    bounce_points: Tuple[Point2, ...]
    wall_refs: Tuple[int, ...]  # indices into the wall list
    total_length: float
    total_reflection_loss_db: float

    @property
    def order(self) -> int:
        return len(self.wall_refs)


def fspl_db(distance_m: float, frequency_hz: float) -> float:
    """Free-space path loss 20 log10(4 pi d f / c)."""
    return 20.0 * math.log10(4.0 * math.pi * distance_m * frequency_hz / C)


def path_power(path: PropagationPath, tx_power_dbm: float, frequency_hz: float) -> float:
    if path.total_length <= EPS:
        raise ValueError("degenerate path")
    return tx_power_dbm - fspl_db(path.total_length, frequency_hz) - path.total_reflection_loss_db


def wall_sequences(n_walls: int, max_order: int) -> List[Tuple[int, ...]]:
    """All bounce sequences up to ``max_order`` with no wall hit twice in a row.

    Ordered by length, then lexicographically.
    """
    out: List[Tuple[int, ...]] = [()]
    level: List[Tuple[int, ...]] = [()]
    for _ in range(max_order):
        level = [s + (w,) for s in level for w in range(n_walls) if not s or s[-1] != w]
        out.extend(level)
    return out


def _images(src: Point2, walls: Sequence[Wall], max_order: int):
    """(sequence, [src, image_1, ..., image_k]) for every bounce sequence."""
    level = [((), [src])]
    yield level[0]
    for _ in range(max_order):
        nxt = []
        for seq, imgs in level:
            for w, wall in enumerate(walls):
                if seq and seq[-1] == w:
                    continue
                nxt.append((seq + (w,), imgs + [mirror_point(imgs[-1], wall.segment)]))
        yield from nxt
        level = nxt


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _blocked(p: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(M, W) mask: wall w meets the open leg p[m] -> q[m] away from its ends.

    Vector twin of ``geometry.segment_blocks``; endpoint contact counts.
    """
    dx = (q[:, 0] - p[:, 0])[:, None]
    dy = (q[:, 1] - p[:, 1])[:, None]
    ex = (b[:, 0] - a[:, 0])[None, :]
    ey = (b[:, 1] - a[:, 1])[None, :]
    apx = a[None, :, 0] - p[:, 0, None]
    apy = a[None, :, 1] - p[:, 1, None]
    length = np.sqrt(dx * dx + dy * dy)
    elen = np.sqrt(ex * ex + ey * ey)
    denom = _cross(dx, dy, ex, ey)
    para = np.abs(denom) <= 1e-15 * length * elen
    with np.errstate(divide="ignore", invalid="ignore"):
        t = _cross(apx, apy, ex, ey) / denom
        u = _cross(apx, apy, dx, dy) / denom
        s = t * length
        hit = ~para & (u >= 0.0) & (u <= 1.0) & (s > EPS) & (s < length - EPS)
        if para.any():
            colin = para & (np.abs(_cross(apx, apy, dx, dy)) <= EPS * length)
            if colin.any():
                ta = (apx * dx + apy * dy) / length
                bpx = b[None, :, 0] - p[:, 0, None]
                bpy = b[None, :, 1] - p[:, 1, None]
                tb = (bpx * dx + bpy * dy) / length
                lo = np.maximum(np.minimum(ta, tb), EPS)
                hi = np.minimum(np.maximum(ta, tb), length - EPS)
                hit |= colin & (lo < hi)
    return hit


def _touches(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(M, W) mask: point p[m] lies within EPS of segment w."""
    ex = (b[:, 0] - a[:, 0])[None, :]
    ey = (b[:, 1] - a[:, 1])[None, :]
    px = p[:, 0, None] - a[None, :, 0]
    py = p[:, 1, None] - a[None, :, 1]
    t = np.clip((px * ex + py * ey) / (ex * ex + ey * ey), 0.0, 1.0)
    rx = px - t * ex
    ry = py - t * ey
    return np.sqrt(rx * rx + ry * ry) <= EPS


@dataclass
class _SequenceHits:
    seq: Tuple[int, ...]
    index: np.ndarray  # which query points have this path
    length: np.ndarray
    loss_db: float
    bounces: Optional[np.ndarray]  # (k, len(index), 2)


def _trace(
    src: Point2,
    points: np.ndarray,
    walls: Sequence[Wall],
    max_order: int,
    keep_bounces: bool = False,
) -> Iterator[_SequenceHits]:
    n = len(points)
    a = np.array([[w.segment.a.x, w.segment.a.y] for w in walls], dtype=float).reshape(-1, 2)
    b = np.array([[w.segment.b.x, w.segment.b.y] for w in walls], dtype=float).reshape(-1, 2)
    n_walls = len(walls)
    src_xy = np.array([src.x, src.y])

    for seq, imgs in _images(src, walls, max_order):
        idx = np.arange(n)
        cur = points
        bounces: List[np.ndarray] = []
        # unfold from the receiver back towards the source
        for j in range(len(seq) - 1, -1, -1):
            img = imgs[j + 1]
            w = seq[j]
            dx = cur[:, 0] - img.x
            dy = cur[:, 1] - img.y
            ex = b[w, 0] - a[w, 0]
            ey = b[w, 1] - a[w, 1]
            apx = a[w, 0] - img.x
            apy = a[w, 1] - img.y
            denom = _cross(dx, dy, ex, ey)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = _cross(apx, apy, ex, ey) / denom
                u = _cross(apx, apy, dx, dy) / denom
                length = np.sqrt(dx * dx + dy * dy)
                ok = (
                    (denom != 0.0)
                    & (u >= 0.0)
                    & (u <= 1.0)
                    & (t * length > EPS)
                    & ((1.0 - t) * length > EPS)
                )
            idx = idx[ok]
            if idx.size == 0:
                break
            hit = np.column_stack((img.x + t[ok] * dx[ok], img.y + t[ok] * dy[ok]))
            bounces = [bp[ok] for bp in bounces]
            bounces.insert(0, hit)
            cur = hit
        else:
            chain = [np.broadcast_to(src_xy, (idx.size, 2))] + bounces + [points[idx]]
            keep = np.ones(idx.size, dtype=bool)
            # a bounce on a junction with another wall would leak through it
            for j, w in enumerate(seq):
                others = np.arange(n_walls) != w
                if others.any():
                    keep &= ~_touches(bounces[j], a[others], b[others]).any(axis=1)
            for i in range(len(chain) - 1):
                mask = np.ones(n_walls, dtype=bool)
                if i > 0:
                    mask[seq[i - 1]] = False
                if i < len(seq):
                    mask[seq[i]] = False
                if mask.any():
                    keep &= ~_blocked(chain[i], chain[i + 1], a[mask], b[mask]).any(axis=1)
            if not keep.any():
                continue
            total = np.zeros(int(keep.sum()))
            for i in range(len(chain) - 1):
                d = chain[i + 1][keep] - chain[i][keep]
                total = total + np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1])
            loss = 0.0
            for w in seq:
                loss += walls[w].reflection_loss_db
            yield _SequenceHits(
                seq,
                idx[keep],
                total,
                loss,
                np.stack([bp[keep] for bp in bounces]) if keep_bounces and bounces else None,
            )


def enumerate_paths(
    tx: Point2, rx: Point2, walls: Sequence[Wall], params: PropagationParams
) -> List[PropagationPath]:
    """Every specular path tx -> rx with at most ``params.max_order`` bounces."""
    if tx == rx:
        raise ValueError("receiver collocated with transmitter")
    pts = np.array([[rx.x, rx.y]])
    paths = []
    for h in _trace(tx, pts, walls, params.max_order, keep_bounces=True):
        bps = () if h.bounces is None else tuple(Point2(*map(float, h.bounces[k, 0])) for k in range(len(h.seq)))
        paths.append(PropagationPath(bps, h.seq, float(h.length[0]), h.loss_db))
    return paths


def _sum_mw(tx: Transmitter, points: np.ndarray, walls: Sequence[Wall], params: PropagationParams) -> np.ndarray:
    total = np.zeros(len(points))
    # received mW = 10^((P_tx - loss)/10) * (c / (4 pi f d))^2
    k0 = (C / (4.0 * math.pi * tx.frequency_hz)) ** 2
    for h in _trace(tx.position, points, walls, params.max_order):
        k = 10.0 ** ((tx.power_dbm - h.loss_db) / 10.0) * k0
        total[h.index] += k / (h.length * h.length)
    return total


def _to_dbm(total_mw: np.ndarray, floor_dbm: float) -> np.ndarray:
    # math.log10 per element keeps results independent of numpy's SIMD path
    return np.array(
        [max(10.0 * math.log10(v), floor_dbm) if v > 0.0 else floor_dbm for v in total_mw.tolist()],
        dtype=float,
    )


def received_powers(
    tx: Transmitter, points: np.ndarray, walls: Sequence[Wall], params: PropagationParams
) -> np.ndarray:
    """Received power in dBm at each row of ``points`` (shape (N, 2))."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return np.zeros(0)
    d = points - np.array([tx.position.x, tx.position.y])
    if np.any(np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]) <= EPS):
        raise ValueError("receiver collocated with transmitter")
    return _to_dbm(_sum_mw(tx, points, walls, params), params.power_floor_dbm)


def received_power(
    tx: Transmitter, point: Point2, walls: Sequence[Wall], params: PropagationParams
) -> float:
    return float(received_powers(tx, np.array([[point.x, point.y]]), walls, params)[0])


@dataclass
class PowerMap:
    """Received power on a regular grid.

    ``values[j, i]`` is the cell centred at
    ``(origin.x + (i + 0.5) * resolution, origin.y + (j + 0.5) * resolution)``,
    so rows run along x and row 0 is the lowest y.
    """

    origin: Point2
    resolution: float
    nx: int
    ny: int
    values: np.ndarray

    def cell_center(self, i: int, j: int) -> Point2:
        return Point2(
            self.origin.x + (i + 0.5) * self.resolution,
            self.origin.y + (j + 0.5) * self.resolution,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# origin_x,origin_y,resolution,nx,ny\n")
        buf.write(f"{self.origin.x!r},{self.origin.y!r},{self.resolution!r},{self.nx},{self.ny}\n")
        for row in self.values:
            buf.write(",".join(f"{v:.6f}" for v in row))
            buf.write("\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PowerMap":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ValueError("power map CSV: missing header")
        ox, oy, res, nx, ny = lines[1].split(",")
        values = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]], dtype=float)
        nx, ny = int(nx), int(ny)
        if values.shape != (ny, nx):
            raise ValueError(f"power map CSV: expected {ny}x{nx} values, got {values.shape}")
        return cls(Point2(float(ox), float(oy)), float(res), nx, ny, values)


def _grid_count(extent: float, resolution: float) -> int:
    return max(1, int(math.ceil(extent / resolution - 1e-9)))


def _near_any_wall(points: np.ndarray, walls: Sequence[Wall]) -> np.ndarray:
    near = np.zeros(len(points), dtype=bool)
    for w in walls:
        ax, ay = w.segment.a.x, w.segment.a.y
        ex, ey = w.segment.b.x - ax, w.segment.b.y - ay
        px, py = points[:, 0] - ax, points[:, 1] - ay
        t = np.clip((px * ex + py * ey) / (ex * ex + ey * ey), 0.0, 1.0)
        rx, ry = px - t * ex, py - t * ey
        near |= np.sqrt(rx * rx + ry * ry) <= EPS
    return near


def power_map(
    tx: Transmitter,
    walls: Sequence[Wall],
    bounds: Bounds,
    resolution: float,
    params: PropagationParams,
    workers: int = 1,
) -> PowerMap:
    """Received power at every cell centre of a grid covering ``bounds``.

    Cells on the transmitter or on a wall get the power floor. ``workers``
    splits the grid across threads; the result is identical for any value.
    """
    if not resolution > 0:
        raise ValueError("resolution must be > 0")
    if not (bounds.width > 0 and bounds.height > 0):
        raise ValueError("degenerate bounds")
    nx = _grid_count(bounds.width, resolution)
    ny = _grid_count(bounds.height, resolution)
    xs = bounds.xmin + (np.arange(nx) + 0.5) * resolution
    ys = bounds.ymin + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack((gx.ravel(), gy.ravel()))

    d = pts - np.array([tx.position.x, tx.position.y])
    dead = (np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]) <= EPS) | _near_any_wall(pts, walls)
    live = np.flatnonzero(~dead)

    out = np.full(len(pts), float(params.power_floor_dbm))
    chunks = [c for c in np.array_split(live, max(1, workers)) if c.size]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _sum_mw(tx, pts[c], walls, params), chunks))
    else:
        results = [_sum_mw(tx, pts[c], walls, params) for c in chunks]
    for c, mw in zip(chunks, results):
        out[c] = _to_dbm(mw, params.power_floor_dbm)
    return PowerMap(Point2(bounds.xmin, bounds.ymin), float(resolution), nx, ny, out.reshape(ny, nx))
