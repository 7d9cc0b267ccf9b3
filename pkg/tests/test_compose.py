"""Layout planning, relation predicates, and the over-operator renderer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matteforge.compose import (
    Placement,
    SceneLayout,
    composite,
    eval_relation,
    plan_layout,
)
from matteforge.errors import IndexOutOfRange, SizeMismatch
from matteforge.tables import RELATIONS

from conftest import make_entity, toy_catalog


def _entities(n=2):
    pool = toy_catalog(num_humans=2, num_animals=2, num_objects=2, size=(24, 30))
    return pool[:n]


def _rng(seed=0):
    return np.random.default_rng(seed)


def _bbox(p: Placement):
    return p.box


def sequential_over(layers, background):
    """Independent oracle: classic painter's loop, back to front."""
    out = background.astype(np.float64).copy()
    for alpha, fg in layers:
        out = alpha[:, :, None] * fg + (1.0 - alpha[:, :, None]) * out
    return out


def test_left_means_strictly_left():
    a, b = _entities(2)
    layout = plan_layout([a, b], "left", (200, 150), _rng(1))
    box_a, box_b = _bbox(layout.placements[0]), _bbox(layout.placements[1])
    assert box_a[2] < box_b[0]
    assert eval_relation(layout, 0, 1, "left")


def test_front_overlaps_and_wins_z():
    a, b = _entities(2)
    layout = plan_layout([a, b], "in_front_of", (200, 150), _rng(2))
    pa, pb = layout.placements
    assert pa.z > pb.z
    assert eval_relation(layout, 0, 1, "in_front_of")
    assert eval_relation(layout, 1, 0, "behind")


def test_same_seed_same_layout():
    a, b = _entities(2)
    one = plan_layout([a, b], "top", (180, 180), _rng(7))
    two = plan_layout([a, b], "top", (180, 180), _rng(7))
    assert one == two


@given(st.integers(0, 10_000), st.sampled_from(RELATIONS))
@settings(max_examples=60, deadline=None)
def test_planned_facts_hold_and_fit(seed, relation):
    entities = _entities(3 if relation not in ("in_front_of", "behind") else 2)
    canvas = (220, 170)
    layout = plan_layout(entities, relation, canvas, _rng(seed))
    for subject, obj, rel in layout.relation_facts:
        assert eval_relation(layout, subject, obj, rel)
    for p in layout.placements:
        x0, y0, x1, y1 = p.box
        assert 0 <= x0 and 0 <= y0 and x1 <= canvas[0] and y1 <= canvas[1]
        frac = max(p.width, p.height) / min(canvas)
        assert 0.35 - 0.01 <= frac <= 0.6 + 0.01
    zs = [p.z for p in layout.placements]
    assert len(set(zs)) == len(zs)
    if relation in ("in_front_of", "behind"):
        assert len(layout.placements) == 2


def test_occlusion_overlap_band():
    a, b = _entities(2)
    for seed in range(12):
        layout = plan_layout([a, b], "behind", (200, 160), _rng(seed))
        pa, pb = layout.placements
        x0, y0, x1, y1 = pa.box
        u0, v0, u1, v1 = pb.box
        iw = min(x1, u1) - max(x0, u0)
        ih = min(y1, v1) - max(y0, v0)
        iom = max(0, iw) * max(0, ih) / min(pa.width * pa.height,
                                            pb.width * pb.height)
        assert 0.15 <= iom <= 0.5


def test_third_entity_keeps_clear():
    entities = _entities(3)
    layout = plan_layout(entities, "right", (260, 200), _rng(3))
    boxes = [p.box for p in layout.placements]
    x0, y0, x1, y1 = boxes[2]
    for u0, v0, u1, v1 in boxes[:2]:
        assert x1 <= u0 or u1 <= x0 or y1 <= v0 or v1 <= y0


def _manual_layout(centers, canvas=(512, 100), size=10, zs=None):
    placements = []
    for k, (cx, cy) in enumerate(centers):
        placements.append(Placement(
            entity_id=f"m{k}", scale=1.0,
            offset_x=int(cx - size / 2), offset_y=int(cy - size / 2),
            z=zs[k] if zs else k, width=size, height=size,
        ))
    return SceneLayout(canvas_w=canvas[0], canvas_h=canvas[1],
                       placements=tuple(placements))


def test_absolute_relations_pick_extremes():
    layout = _manual_layout([(10, 50), (50, 50)], canvas=(100, 100))
    assert eval_relation(layout, 0, 1, "left")
    assert eval_relation(layout, 0, None, "left")
    assert not eval_relation(layout, 1, None, "left")
    assert eval_relation(layout, 1, None, "right")


def test_absolute_middle_three_entities():
    # centers at x = 100, 256, 400 on a 512-wide canvas: only the middle one
    layout = _manual_layout([(100, 50), (256, 50), (400, 50)], canvas=(512, 100))
    assert [eval_relation(layout, k, None, "middle") for k in range(3)] == [
        False, True, False
    ]


def test_beside_is_side_agnostic():
    layout = _manual_layout([(10, 50), (50, 50)], canvas=(100, 100))
    assert eval_relation(layout, 0, 1, "beside")
    assert eval_relation(layout, 1, 0, "beside")


def test_depth_needs_overlap():
    layout = _manual_layout([(10, 50), (80, 50)], canvas=(100, 100), zs=[1, 0])
    assert not eval_relation(layout, 0, 1, "in_front_of")  # disjoint boxes
    overlapping = _manual_layout([(48, 50), (52, 50)], canvas=(100, 100), zs=[1, 0])
    assert eval_relation(overlapping, 0, 1, "in_front_of")
    assert eval_relation(overlapping, 1, 0, "behind")


def test_index_out_of_range():
    layout = _manual_layout([(10, 50), (50, 50)])
    with pytest.raises(IndexOutOfRange):
        eval_relation(layout, 5, None, "left")
    with pytest.raises(IndexOutOfRange):
        eval_relation(layout, 0, 9, "left")


def test_midpoint_blend_pixel():
    entity = make_entity("mid", "ball", "object", color="red", size=(10, 10))
    rgb = np.zeros((10, 10, 3), dtype=np.uint8)
    rgb[:, :] = (200, 100, 0)
    alpha = np.full((10, 10), 0.5)
    entity = entity.__class__(
        id="mid", rgb=rgb, alpha=alpha, category="ball",
        synonyms=frozenset({"ball"}), entity_class="object",
        attributes=entity.attributes,
    )
    layout = SceneLayout(
        canvas_w=20, canvas_h=20,
        placements=(Placement("mid", 1.0, 5, 5, 0, 10, 10),),
    )
    background = np.zeros((20, 20, 3), dtype=np.uint8)
    background[:, :] = (0, 100, 200)
    result = composite(layout, background, [entity])
    assert np.allclose(result.image[10, 10], (100.0, 100.0, 100.0))


def test_full_occlusion_zeroes_back_alpha():
    front = make_entity("f", "ball", "object", color="red", size=(12, 12))
    hard = np.ones((12, 12))
    front = front.__class__(
        id="f", rgb=front.rgb, alpha=hard, category="ball",
        synonyms=front.synonyms, entity_class="object",
        attributes=front.attributes,
    )
    back = make_entity("b", "cup", "object", color="blue", size=(12, 12))
    layout = SceneLayout(
        canvas_w=30, canvas_h=30,
        placements=(
            Placement("f", 1.0, 5, 5, 1, 12, 12),
            Placement("b", 1.0, 5, 5, 0, 12, 12),
        ),
    )
    background = np.zeros((30, 30, 3), dtype=np.uint8)
    result = composite(layout, background, [front, back])
    assert np.all(result.visible_alphas[1][5:17, 5:17] == 0.0)


def test_visible_alpha_untouched_when_disjoint():
    a, b = _entities(2)
    layout = plan_layout([a, b], "left", (200, 150), _rng(11))
    background = np.zeros((150, 200, 3), dtype=np.uint8)
    result = composite(layout, background, [a, b])
    for placed, visible in zip(result.alpha_layers, result.visible_alphas):
        assert np.array_equal(placed, visible)


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_reconstruction_matches_sequential_oracle(seed):
    rng = np.random.default_rng(seed)
    relation = RELATIONS[int(rng.integers(0, len(RELATIONS)))]
    n = 2 if relation in ("in_front_of", "behind") else int(rng.integers(2, 4))
    entities = toy_catalog(num_humans=2, num_animals=2, num_objects=2,
                           size=(20, 26))[:n]
    layout = plan_layout(entities, relation, (180, 140),
                         np.random.default_rng(seed + 1))
    background = rng.integers(0, 256, size=(140, 180, 3), dtype=np.uint8)
    result = composite(layout, background, entities)

    # coverage never exceeds one
    coverage = np.zeros_like(result.visible_alphas[0])
    for visible in result.visible_alphas:
        coverage = coverage + visible
    assert float(coverage.max()) <= 1.0

    # recompositing from returned rasters is exact in floating point
    recon = (1.0 - coverage)[:, :, None] * background.astype(np.float64)
    for visible, fg in zip(result.visible_alphas, result.foreground_layers):
        recon = recon + visible[:, :, None] * fg
    assert np.array_equal(recon, result.image)

    # independent sequential over-operator agrees to 1 LSB after quantization
    order = np.argsort([p.z for p in layout.placements])
    layers = [(result.alpha_layers[k], result.foreground_layers[k]) for k in order]
    oracle = sequential_over(layers, background)
    q_impl = np.rint(np.clip(result.image, 0, 255)).astype(np.int16)
    q_oracle = np.rint(np.clip(oracle, 0, 255)).astype(np.int16)
    assert int(np.abs(q_impl - q_oracle).max()) <= 1


def test_background_size_must_match():
    a, b = _entities(2)
    layout = plan_layout([a, b], "left", (200, 150), _rng(5))
    with pytest.raises(SizeMismatch):
        composite(layout, np.zeros((100, 100, 3), dtype=np.uint8), [a, b])


def test_layout_json_round_trip():
    a, b = _entities(2)
    layout = plan_layout([a, b], "bottom", (150, 150), _rng(9))
    assert SceneLayout.from_json(layout.to_json()) == layout


def test_placement_infeasible_when_scales_cannot_separate():
    from matteforge.errors import PlacementInfeasible

    a, b = _entities(2)
    with pytest.raises(PlacementInfeasible):
        # two boxes of >= 0.55 x canvas can never sit side by side
        plan_layout([a, b], "left", (40, 40), _rng(0),
                    scale_range=(0.55, 0.6), max_attempts=10)
