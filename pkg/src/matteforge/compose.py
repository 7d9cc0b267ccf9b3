"""Scene planning and alpha compositing.

plan_layout places 2-3 entities on a canvas under one of six position
relationships: the four axis relations keep bounding boxes strictly
separated (no occlusion), while in_front_of/behind force a partial overlap
so the front entity occludes the back one. composite renders the scene
with the over operator and returns, per entity, the ground-truth visible
alpha after occlusion attenuation.

eval_relation is the single predicate implementation shared by expression
generation and grounding: relative relations compare scaled-box centers
(plus z and overlap for depth), absolute ones pick the extreme entity
along an axis or the one nearest the canvas center.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import Entity
from .errors import IndexOutOfRange, PlacementInfeasible, SizeMismatch
from .raster import resize_bilinear
from .tables import RELATIONS

OCCLUSION_RELATIONS = ("in_front_of", "behind")
AXIS_RELATIONS = ("left", "right", "top", "bottom")
ABSOLUTE_RELATIONS = ("left", "right", "top", "bottom", "middle")

DEFAULT_SCALE_RANGE = (0.35, 0.6)
DEFAULT_OVERLAP_RANGE = (0.15, 0.5)


@dataclass(frozen=True)
class Placement:
    """A scaled entity positioned on the canvas (top-left anchor)."""

    entity_id: str
    scale: float
    offset_x: int
    offset_y: int
    z: int
    width: int
    height: int

    @property
    def center(self) -> tuple[float, float]:
        return (self.offset_x + self.width / 2.0, self.offset_y + self.height / 2.0)

    @property
    def box(self) -> tuple[int, int, int, int]:
        """(x0, y0, x1, y1), exclusive right/bottom edge."""
        return (self.offset_x, self.offset_y,
                self.offset_x + self.width, self.offset_y + self.height)

    def to_json(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "scale": round(float(self.scale), 6),
            "offset_x": self.offset_x,
            "offset_y": self.offset_y,
            "z": self.z,
            "width": self.width,
            "height": self.height,
        }

    @staticmethod
    def from_json(data: dict) -> "Placement":
        return Placement(
            entity_id=data["entity_id"], scale=float(data["scale"]),
            offset_x=int(data["offset_x"]), offset_y=int(data["offset_y"]),
            z=int(data["z"]), width=int(data["width"]), height=int(data["height"]),
        )


@dataclass(frozen=True)
class SceneLayout:
    """Placed entities plus the relationship facts the scene was built for."""

    canvas_w: int
    canvas_h: int
    placements: tuple[Placement, ...]
    relation_facts: tuple[tuple[int, int, str], ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "canvas_w": self.canvas_w,
            "canvas_h": self.canvas_h,
            "placements": [p.to_json() for p in self.placements],
            "relation_facts": [
                {"subject": s, "object": o, "relation": r}
                for s, o, r in self.relation_facts
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "SceneLayout":
        return SceneLayout(
            canvas_w=int(data["canvas_w"]),
            canvas_h=int(data["canvas_h"]),
            placements=tuple(Placement.from_json(p) for p in data["placements"]),
            relation_facts=tuple(
                (f["subject"], f["object"], f["relation"])
                for f in data["relation_facts"]
            ),
        )


def _boxes_intersect(a: Placement, b: Placement) -> bool:
    return _intersection_area(a, b) > 0


def _intersection_area(a: Placement, b: Placement) -> int:
    ax0, ay0, ax1, ay1 = a.box
    bx0, by0, bx1, by1 = b.box
    w = min(ax1, bx1) - max(ax0, bx0)
    h = min(ay1, by1) - max(ay0, by0)
    return max(0, w) * max(0, h)


def _scaled_dims(entity: Entity, frac: float, canvas_min: int) -> tuple[float, int, int]:
    # scale kept at manifest precision so layouts survive JSON round trips
    scale = round(frac * canvas_min / max(entity.height, entity.width), 6)
    w = max(1, int(round(entity.width * scale)))
    h = max(1, int(round(entity.height * scale)))
    return scale, w, h


def _randint(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] inclusive."""
    return int(rng.integers(lo, hi + 1))


def plan_layout(
    entities: Sequence[Entity],
    relation: str,
    canvas: tuple[int, int],
    rng: np.random.Generator,
    scale_range: tuple[float, float] = DEFAULT_SCALE_RANGE,
    overlap_range: tuple[float, float] = DEFAULT_OVERLAP_RANGE,
    max_attempts: int = 60,
) -> SceneLayout:
    """Place entities[0] and entities[1] under ``relation``; extras go to
    free space. Deterministic given identical inputs and rng state."""
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    n = len(entities)
    if n < 2 or n > 3:
        raise ValueError(f"need 2 or 3 entities, got {n}")
    if relation in OCCLUSION_RELATIONS and n != 2:
        raise ValueError(f"relation {relation} requires exactly 2 entities")
    cw, ch = int(canvas[0]), int(canvas[1])
    cmin = min(cw, ch)

    for _ in range(max_attempts):
        dims = []
        ok = True
        for entity in entities:
            frac = float(rng.uniform(scale_range[0], scale_range[1]))
            scale, w, h = _scaled_dims(entity, frac, cmin)
            if w > cw or h > ch:
                ok = False
            dims.append((scale, w, h))
        if not ok:
            continue

        if relation in AXIS_RELATIONS:
            boxes = _place_separated(relation, dims[0][1:], dims[1][1:], cw, ch, rng)
            zs = [0, 1]
        else:
            boxes = _place_overlapping(relation, dims[0][1:], dims[1][1:],
                                       cw, ch, rng, overlap_range)
            zs = [1, 0] if relation == "in_front_of" else [0, 1]
        if boxes is None:
            continue

        placements = [
            Placement(entities[i].id, dims[i][0], boxes[i][0], boxes[i][1],
                      zs[i], dims[i][1], dims[i][2])
            for i in range(2)
        ]
        if n == 3:
            spot = _place_free(dims[2][1:], placements, cw, ch, rng)
            if spot is None:
                continue
            placements.append(Placement(
                entities[2].id, dims[2][0], spot[0], spot[1], 2,
                dims[2][1], dims[2][2],
            ))
        return SceneLayout(
            canvas_w=cw, canvas_h=ch,
            placements=tuple(placements),
            relation_facts=((0, 1, relation),),
        )
    raise PlacementInfeasible(
        f"could not place {n} entities under {relation} on {cw}x{ch}"
    )


def _place_separated(relation, dim0, dim1, cw, ch, rng):
    """Boxes strictly ordered (1 px gap or more) on the relation axis."""
    w0, h0 = dim0
    w1, h1 = dim1
    if relation in ("left", "right"):
        first, second = ((w0, h0), (w1, h1)) if relation == "left" else ((w1, h1), (w0, h0))
        if first[0] + second[0] + 1 > cw:
            return None
        xa = _randint(rng, 0, cw - first[0] - second[0] - 1)
        xb = _randint(rng, xa + first[0] + 1, cw - second[0])
        ya = _randint(rng, 0, ch - first[1])
        yb = _randint(rng, 0, ch - second[1])
        if relation == "left":
            return [(xa, ya), (xb, yb)]
        return [(xb, yb), (xa, ya)]
    first, second = ((w0, h0), (w1, h1)) if relation == "top" else ((w1, h1), (w0, h0))
    if first[1] + second[1] + 1 > ch:
        return None
    ya = _randint(rng, 0, ch - first[1] - second[1] - 1)
    yb = _randint(rng, ya + first[1] + 1, ch - second[1])
    xa = _randint(rng, 0, cw - first[0])
    xb = _randint(rng, 0, cw - second[0])
    if relation == "top":
        return [(xa, ya), (xb, yb)]
    return [(xb, yb), (xa, ya)]


def _place_overlapping(relation, dim0, dim1, cw, ch, rng, overlap_range, tries=200):
    """Overlap with intersection-over-min-area inside ``overlap_range``."""
    lo, hi = overlap_range
    # subject of in_front_of sits in front; of behind, in back
    front, back = (0, 1) if relation == "in_front_of" else (1, 0)
    dims = (dim0, dim1)
    wb, hb = dims[back]
    wf, hf = dims[front]
    xb = _randint(rng, 0, cw - wb)
    yb = _randint(rng, 0, ch - hb)
    min_area = min(wb * hb, wf * hf)
    for _ in range(tries):
        xf = _randint(rng, max(0, xb - wf + 1), min(cw - wf, xb + wb - 1))
        yf = _randint(rng, max(0, yb - hf + 1), min(ch - hf, yb + hb - 1))
        iw = min(xb + wb, xf + wf) - max(xb, xf)
        ih = min(yb + hb, yf + hf) - max(yb, yf)
        iom = max(0, iw) * max(0, ih) / min_area
        if lo <= iom <= hi:
            spots = [None, None]
            spots[back] = (xb, yb)
            spots[front] = (xf, yf)
            return spots
    return None


def _place_free(dim, placed, cw, ch, rng, tries=200):
    """A spot whose box touches none of the existing placements."""
    w, h = dim
    if w > cw or h > ch:
        return None
    for _ in range(tries):
        x = _randint(rng, 0, cw - w)
        y = _randint(rng, 0, ch - h)
        probe = Placement("_probe", 1.0, x, y, -1, w, h)
        if not any(_boxes_intersect(probe, p) for p in placed):
            return (x, y)
    return None


def eval_relation(layout: SceneLayout, i: int, j: int | None, relation: str) -> bool:
    """Shared relation predicate.

    With j given: compare scaled-box centers (x for left/right, y for
    top/bottom), or z order plus a nonzero box overlap for depth;
    ``beside`` is left-or-right. With j None (absolute form): left/right/
    top/bottom hold for the strict extreme along the axis and ``middle``
    for the entity strictly nearest the canvas center. Depth relations
    have no absolute reading and are never true there.
    """
    n = len(layout.placements)
    if i < 0 or i >= n:
        raise IndexOutOfRange(f"index {i} outside 0..{n - 1}")
    if j is not None and (j < 0 or j >= n):
        raise IndexOutOfRange(f"index {j} outside 0..{n - 1}")
    placements = layout.placements
    centers = [p.center for p in placements]

    if j is None:
        cx, cy = centers[i]
        others = [centers[k] for k in range(n) if k != i]
        if relation == "left":
            return all(cx < ox for ox, _ in others)
        if relation == "right":
            return all(cx > ox for ox, _ in others)
        if relation == "top":
            return all(cy < oy for _, oy in others)
        if relation == "bottom":
            return all(cy > oy for _, oy in others)
        if relation == "middle":
            gx, gy = layout.canvas_w / 2.0, layout.canvas_h / 2.0
            dist = (cx - gx) ** 2 + (cy - gy) ** 2
            return all(
                dist < (ox - gx) ** 2 + (oy - gy) ** 2 for ox, oy in others
            )
        return False  # depth and beside have no absolute reading

    if i == j:
        return False
    (cxi, cyi), (cxj, cyj) = centers[i], centers[j]
    if relation == "left":
        return cxi < cxj
    if relation == "right":
        return cxi > cxj
    if relation == "top":
        return cyi < cyj
    if relation == "bottom":
        return cyi > cyj
    if relation == "beside":
        return cxi != cxj
    if relation == "in_front_of":
        return (placements[i].z > placements[j].z
                and _boxes_intersect(placements[i], placements[j]))
    if relation == "behind":
        return (placements[i].z < placements[j].z
                and _boxes_intersect(placements[i], placements[j]))
    return False  # middle has no relative reading


@dataclass(frozen=True)
class CompositeResult:
    """Rendered scene: float image (0..255) plus per-entity rasters."""

    image: np.ndarray
    visible_alphas: tuple[np.ndarray, ...]
    alpha_layers: tuple[np.ndarray, ...]
    foreground_layers: tuple[np.ndarray, ...]


def recomposite(
    visible_alphas: Sequence[np.ndarray],
    foreground_layers: Sequence[np.ndarray],
    background: np.ndarray,
) -> np.ndarray:
    """image = sum_i visible_i * F_i + (1 - sum_i visible_i) * B."""
    coverage = np.zeros_like(visible_alphas[0])
    for visible in visible_alphas:
        coverage = coverage + visible
    image = (1.0 - coverage)[:, :, None] * background.astype(np.float64)
    for visible, fg in zip(visible_alphas, foreground_layers):
        image = image + visible[:, :, None] * fg
    return image


def composite(
    layout: SceneLayout,
    background: np.ndarray,
    entities: Sequence[Entity],
) -> CompositeResult:
    """Render the layout over a background via alpha blending.

    ``entities`` must align with ``layout.placements``. Each entity's
    visible alpha is its resampled matte attenuated by every layer above
    it: visible_i = alpha_i * prod_{z_j > z_i} (1 - alpha_j). The image is
    assembled from the visible alphas, so recompositing from the returned
    rasters reproduces it bit for bit.
    """
    h, w = background.shape[:2]
    if (layout.canvas_h, layout.canvas_w) != (h, w):
        raise SizeMismatch(
            f"background {w}x{h} vs canvas {layout.canvas_w}x{layout.canvas_h}"
        )
    if len(entities) != len(layout.placements):
        raise SizeMismatch("entity list does not match placements")

    alpha_layers: list[np.ndarray] = []
    fg_layers: list[np.ndarray] = []
    for placement, entity in zip(layout.placements, entities):
        if entity.id != placement.entity_id:
            raise SizeMismatch(
                f"entity order mismatch: {entity.id} vs {placement.entity_id}"
            )
        a = resize_bilinear(entity.alpha, placement.height, placement.width)
        f = resize_bilinear(entity.rgb, placement.height, placement.width)
        canvas_a = np.zeros((h, w), dtype=np.float64)
        canvas_f = np.zeros((h, w, 3), dtype=np.float64)
        x0, y0, x1, y1 = placement.box
        canvas_a[y0:y1, x0:x1] = a
        canvas_f[y0:y1, x0:x1] = f
        alpha_layers.append(canvas_a)
        fg_layers.append(canvas_f)

    # Occlusion attenuation, processed top layer first.
    order = sorted(range(len(entities)),
                   key=lambda k: layout.placements[k].z, reverse=True)
    above = np.ones((h, w), dtype=np.float64)
    visible: list[np.ndarray | None] = [None] * len(entities)
    for k in order:
        visible[k] = alpha_layers[k] * above
        above = above * (1.0 - alpha_layers[k])

    visible_list = [v for v in visible if v is not None]
    image = recomposite(visible_list, fg_layers, background)
    return CompositeResult(
        image=image,
        visible_alphas=tuple(visible_list),
        alpha_layers=tuple(alpha_layers),
        foreground_layers=tuple(fg_layers),
    )
