"""Seeded synthetic binary scenes with exact instance ground truth.

Scenes place parametric shapes (discs, capsules, annuli, small dots) on a
blank canvas. Spacing is controlled between shape *cores* (disc centers,
capsule axes) so the ``overlap`` ratio has the same meaning for every
shape: at 0 the rasterized shapes are guaranteed disjoint, and as it grows
adjacent shapes close in and fuse in the binary union while the per-shape
truth keeps them apart. Everything is driven by a 64-bit linear
congruential generator so a scene spec reproduces bit-identical output on
any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import LabelMap, Mask

REGIMES = ("round", "elongated", "ring", "dense_points", "mixed")

# Gap added around every shape so overlap=0 scenes stay disjoint under
# 8-connectivity after rasterization.
_CLEARANCE = 3.0


class PlacementError(RuntimeError):
    """Rejection sampling could not place all requested shapes."""

    def __init__(self, placed: int, requested: int):
        super().__init__(f"placed only {placed} of {requested} shapes after 1000 attempts each")
        self.placed = placed
        self.requested = requested


class Lcg:
    """Deterministic 64-bit linear congruential generator.

    state' = state * 6364136223846793005 + 1442695040888963407 (mod 2**64);
    uniform() takes the top 53 bits. Small integer math only, so every
    language reproduces the same stream.
    """

    _MULT = 6364136223846793005
    _INC = 1442695040888963407
    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = (int(seed) ^ 0x9E3779B97F4A7C15) & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state * self._MULT + self._INC) & self._MASK
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in [lo, hi] (modulo reduction, documented bias)."""
        return lo + self.next_u64() % (hi - lo + 1)


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    regime: str
    n_objects: int
    overlap: float
    seed: int

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}, expected one of {REGIMES}")
        if self.n_objects < 0:
            raise ValueError(f"n_objects must be >= 0, got {self.n_objects}")
        if not 0.0 <= self.overlap < 1.0:
            raise ValueError(f"overlap must lie in [0, 1), got {self.overlap}")
        if self.width < 8 or self.height < 8:
            raise ValueError("canvas must be at least 8x8")


@dataclass(frozen=True)
class _Shape:
    kind: str
    cx: float
    cy: float
    radius: float  # circumscribed radius (canvas margin)
    halfwidth: float = 0.0
    angle: float = 0.0
    inner: float = 0.0

    @property
    def reach(self) -> float:
        """Half-thickness around the core: disc radius or capsule half-width."""
        return self.halfwidth if self.kind == "capsule" else self.radius

    def core(self) -> tuple[float, float, float, float]:
        """Core segment (degenerate for round shapes): x0, y0, x1, y1."""
        if self.kind != "capsule":
            return (self.cx, self.cy, self.cx, self.cy)
        half_len = self.radius - self.halfwidth
        ax = math.cos(self.angle) * half_len
        ay = math.sin(self.angle) * half_len
        return (self.cx - ax, self.cy - ay, self.cx + ax, self.cy + ay)

    def paint(self, truth: np.ndarray, label: int) -> None:
        h, w = truth.shape
        r = self.radius + 1.5
        x0, x1 = max(0, int(self.cx - r)), min(w, int(self.cx + r) + 2)
        y0, y1 = max(0, int(self.cy - r)), min(h, int(self.cy + r) + 2)
        yy, xx = np.mgrid[y0:y1, x0:x1]
        if self.kind in ("disc", "dot"):
            hit = (xx - self.cx) ** 2 + (yy - self.cy) ** 2 <= self.radius**2
        elif self.kind == "ring":
            d2 = (xx - self.cx) ** 2 + (yy - self.cy) ** 2
            hit = (d2 <= self.radius**2) & (d2 > self.inner**2)
        else:  # capsule
            sx0, sy0, sx1, sy1 = self.core()
            ax, ay = sx1 - sx0, sy1 - sy0
            px = xx - sx0
            py = yy - sy0
            seg2 = ax * ax + ay * ay
            if seg2 == 0:
                t = np.zeros_like(px, dtype=np.float64)
            else:
                t = np.clip((px * ax + py * ay) / seg2, 0.0, 1.0)
            dx = px - t * ax
            dy = py - t * ay
            hit = dx * dx + dy * dy <= self.halfwidth**2
        sub = truth[y0:y1, x0:x1]
        sub[hit] = label


def _segment_distance(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> float:
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b

    def point_seg(px, py, x0, y0, x1, y1):
        dx, dy = x1 - x0, y1 - y0
        seg2 = dx * dx + dy * dy
        if seg2 == 0:
            return math.hypot(px - x0, py - y0)
        t = max(0.0, min(1.0, ((px - x0) * dx + (py - y0) * dy) / seg2))
        return math.hypot(px - (x0 + t * dx), py - (y0 + t * dy))

    def orient(px, py, qx, qy, rx, ry):
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    # Proper intersection means distance zero.
    d1 = orient(ax0, ay0, ax1, ay1, bx0, by0)
    d2 = orient(ax0, ay0, ax1, ay1, bx1, by1)
    d3 = orient(bx0, by0, bx1, by1, ax0, ay0)
    d4 = orient(bx0, by0, bx1, by1, ax1, ay1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return 0.0
    return min(
        point_seg(ax0, ay0, bx0, by0, bx1, by1),
        point_seg(ax1, ay1, bx0, by0, bx1, by1),
        point_seg(bx0, by0, ax0, ay0, ax1, ay1),
        point_seg(bx1, by1, ax0, ay0, ax1, ay1),
    )


def _core_gap(a: _Shape, b: _Shape) -> float:
    """Distance between cores minus both reaches (negative = raster overlap)."""
    return _segment_distance(a.core(), b.core()) - a.reach - b.reach


def _required_gap(overlap: float, a: _Shape, b: _Shape) -> float:
    """Minimum allowed core gap; shrinks below 0 as overlap grows."""
    return _CLEARANCE - overlap * (a.reach + b.reach + _CLEARANCE)


def _sample_shape(rng: Lcg, regime: str, index: int) -> _Shape:
    kind_regime = regime
    if regime == "mixed":
        kind_regime = "round" if index % 2 == 0 else "elongated"
    if kind_regime == "round":
        r = 6.0 + rng.uniform() * 6.0
        return _Shape(kind="disc", cx=0, cy=0, radius=r)
    if kind_regime == "elongated":
        halfw = 3.0 + rng.uniform() * 1.5
        half_len = 8.0 + rng.uniform() * 5.0
        angle = rng.uniform() * math.pi
        return _Shape(kind="capsule", cx=0, cy=0, radius=half_len + halfw, halfwidth=halfw, angle=angle)
    if kind_regime == "ring":
        r = 8.0 + rng.uniform() * 5.0
        inner = r * (0.4 + rng.uniform() * 0.15)
        return _Shape(kind="ring", cx=0, cy=0, radius=r, inner=inner)
    # dense_points
    r = 1.0 + rng.uniform()
    return _Shape(kind="dot", cx=0, cy=0, radius=r)


def _with_pose(proto: _Shape, cx: float, cy: float, angle: float | None = None) -> _Shape:
    return _Shape(
        kind=proto.kind,
        cx=cx,
        cy=cy,
        radius=proto.radius,
        halfwidth=proto.halfwidth,
        angle=proto.angle if angle is None else angle,
        inner=proto.inner,
    )


def _slide_to_gap(
    anchor: _Shape,
    proto: _Shape,
    origin: tuple[float, float],
    theta: float,
    target_gap: float,
) -> _Shape:
    """Slide the candidate outward along a ray until its core gap to the
    anchor reaches target_gap (bisection; the gap grows with distance)."""
    ox, oy = origin
    ux, uy = math.cos(theta), math.sin(theta)
    lo = 0.0
    hi = anchor.radius + proto.radius + abs(target_gap) + 6.0
    for _ in range(30):
        mid = (lo + hi) / 2.0
        cand = _with_pose(proto, ox + mid * ux, oy + mid * uy)
        if _core_gap(anchor, cand) < target_gap:
            lo = mid
        else:
            hi = mid
    return _with_pose(proto, ox + hi * ux, oy + hi * uy)


def generate(spec: SceneSpec) -> tuple[Mask, int, LabelMap]:
    """Build one scene; returns (binary mask, true count, instance truth).

    The truth label map keeps one label per shape with later shapes winning
    overlapped pixels, so the true count never depends on fusion in the
    binary union.
    """
    rng = Lcg(spec.seed)
    truth = np.zeros((spec.height, spec.width), dtype=np.int32)
    shapes: list[_Shape] = []
    for k in range(spec.n_objects):
        proto = _sample_shape(rng, spec.regime, k)
        placed = None
        margin = proto.radius + 2.0
        for attempt in range(1000):
            # Shapes cluster in small groups: most join an existing shape,
            # the rest start new groups elsewhere on the canvas.
            anchored = spec.overlap > 0.0 and shapes and attempt < 500 and rng.uniform() < 0.7
            if anchored:
                # Land next to an existing shape with the core gap right at
                # the allowed minimum so fusion actually happens.
                anchor = shapes[rng.randint(0, len(shapes) - 1)]
                x0, y0, x1, y1 = anchor.core()
                t = rng.uniform()
                px, py = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
                theta = rng.uniform() * 2.0 * math.pi
                target = _required_gap(spec.overlap, anchor, proto) + rng.uniform() * 1.0
                cand = _slide_to_gap(anchor, proto, (px, py), theta, target)
            else:
                if spec.width - 2 * margin <= 1 or spec.height - 2 * margin <= 1:
                    continue
                cx = margin + rng.uniform() * (spec.width - 2 * margin - 1)
                cy = margin + rng.uniform() * (spec.height - 2 * margin - 1)
                cand = _with_pose(proto, cx, cy)
            if not (margin <= cand.cx <= spec.width - margin - 1 and margin <= cand.cy <= spec.height - margin - 1):
                continue
            ok = True
            for other in shapes:
                if _core_gap(other, cand) < _required_gap(spec.overlap, other, cand) - 1e-6:
                    ok = False
                    break
            if ok:
                placed = cand
                break
        if placed is None:
            raise PlacementError(placed=k, requested=spec.n_objects)
        shapes.append(placed)

    for label, shape in enumerate(shapes, start=1):
        shape.paint(truth, label)
    return Mask(truth > 0), len(shapes), LabelMap(truth)
