"""SAD/MSE/MAD metrics, aggregation variants, and run scoring."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matteforge.builder import BuildConfig, build_dataset
from matteforge.errors import (
    EmptyInput,
    ManifestMismatch,
    RangeViolation,
    SizeMismatch,
)
from matteforge.metrics import (
    EntityScore,
    aggregate,
    entity_metrics,
    evaluate_run,
)
from matteforge.raster import load_alpha, save_alpha

from conftest import toy_backgrounds, toy_catalog, toy_tables


def brute_force_metrics(gt, pred):
    """Independent elementwise oracle."""
    sad = 0.0
    sq = 0.0
    for g, p in zip(gt.ravel().tolist(), pred.ravel().tolist()):
        sad += abs(g - p)
        sq += (g - p) ** 2
    n = gt.size
    return sad, sq / n, sad / n


def test_identity_is_zero():
    gt = np.random.default_rng(0).random((12, 12))
    assert entity_metrics(gt, gt) == (0.0, 0.0, 0.0)


def test_closed_form_half_error():
    gt = np.ones((10, 10))
    pred = np.full((10, 10), 0.5)
    sad, mse, mad = entity_metrics(gt, pred)
    assert sad == pytest.approx(50.0)
    assert mse == pytest.approx(0.25)
    assert mad == pytest.approx(0.5)


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(99)
    for _ in range(100):
        gt = rng.random((16, 16))
        pred = rng.random((16, 16))
        got = entity_metrics(gt, pred)
        want = brute_force_metrics(gt, pred)
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-9


@given(st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_symmetry_and_bounds(seed):
    rng = np.random.default_rng(seed)
    gt = rng.random((8, 16))
    pred = rng.random((8, 16))
    forward = entity_metrics(gt, pred)
    backward = entity_metrics(pred, gt)
    assert forward == backward
    sad, mse, mad = forward
    assert mad <= np.sqrt(mse) + 1e-12
    assert np.sqrt(mse) <= 1.0
    # power-of-two pixel count: the sum/mean identity is exact
    assert sad == mad * gt.size


def test_size_and_range_validation():
    with pytest.raises(SizeMismatch):
        entity_metrics(np.zeros((4, 4)), np.zeros((4, 5)))
    with pytest.raises(RangeViolation):
        entity_metrics(np.full((4, 4), 1.5), np.zeros((4, 4)))
    with pytest.raises(RangeViolation):
        entity_metrics(np.zeros((4, 4)), np.full((4, 4), -0.1))


def test_aggregate_fixture():
    records = [
        EntityScore("im1", "e1", "KEYWORD", 10.0, 0.0, 0.0),
        EntityScore("im2", "e2", "KEYWORD", 4.0, 0.0, 0.0),
        EntityScore("im2", "e3", "KEYWORD", 4.0, 0.0, 0.0),
    ]
    report = aggregate(records, sad_scale=1.0)
    assert report.sad == pytest.approx(6.0)
    assert report.sad_e == pytest.approx(7.0)


def test_aggregate_single_entity_images_coincide():
    records = [
        EntityScore(f"im{k}", f"e{k}", "KEYWORD", float(k), 0.01 * k, 0.001 * k)
        for k in range(5)
    ]
    report = aggregate(records, sad_scale=1.0)
    assert report.sad == pytest.approx(report.sad_e)
    assert report.mse == pytest.approx(report.mse_e)
    assert report.mad == pytest.approx(report.mad_e)


def test_aggregate_order_independence():
    rng = np.random.default_rng(5)
    records = [
        EntityScore(f"im{k % 4}", f"e{k}", "BE",
                    float(rng.random()), float(rng.random()),
                    float(rng.random()))
        for k in range(20)
    ]
    base = aggregate(records)
    shuffled = list(records)
    rng.shuffle(shuffled)
    other = aggregate(shuffled)
    assert base == other


def test_aggregate_empty_rejected():
    with pytest.raises(EmptyInput):
        aggregate([])


def test_default_scale_is_thousandths():
    records = [EntityScore("im", "e", "KEYWORD", 1000.0, 0.0, 0.0)]
    assert aggregate(records).sad == pytest.approx(1.0)


@pytest.fixture(scope="module")
def scored_build(tmp_path_factory):
    out = tmp_path_factory.mktemp("scoreset")
    catalog = toy_catalog(num_humans=6, num_animals=2, num_objects=2,
                          size=(22, 22))
    config = BuildConfig(master_seed=5, composites_per_group_train=2,
                         extra_random_train=1)
    manifest = build_dataset(config, catalog, toy_backgrounds(),
                             out_dir=out, tables=toy_tables())
    return manifest, out


def test_evaluate_gt_copy_is_zero(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    for image in manifest.images:
        for entity in image.entities:
            gt = load_alpha(out / entity.visible_alpha_path)
            save_alpha(pred / image.image_id / f"{entity.entity_id}.png", gt)
    report = evaluate_run(pred, manifest, setting="expression", manifest_dir=out)
    assert report.sad == 0.0 and report.mse == 0.0 and report.mad == 0.0
    assert report.sad_e == 0.0


def test_evaluate_expression_scores_each_text(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    pred.mkdir()
    report = evaluate_run(pred, manifest, setting="expression", manifest_dir=out)
    mattes = sum(len(im.entities) for im in manifest.images)
    assert len(report.records) == 4 * mattes


def test_evaluate_all_zero_predictions(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    pred.mkdir()
    scale = 1e-3
    report = evaluate_run(pred, manifest, setting="keyword",
                          sad_scale=scale, manifest_dir=out)
    gt_masses = []
    from matteforge.builder import filter_keyword_setting
    for image in filter_keyword_setting(manifest).images:
        for entity in image.entities:
            gt_masses.append(load_alpha(out / entity.visible_alpha_path).sum())
    expected = scale * float(np.mean(gt_masses))
    assert report.sad == pytest.approx(expected, rel=1e-12)


def test_evaluate_keyword_uses_filtered_images(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    pred.mkdir()
    from matteforge.builder import filter_keyword_setting
    report = evaluate_run(pred, manifest, setting="keyword", manifest_dir=out)
    expected = sum(len(im.entities)
                   for im in filter_keyword_setting(manifest).images)
    assert len(report.records) == expected


def test_evaluate_rejects_unknown_ids(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    (pred / "train-999999").mkdir(parents=True)
    save_alpha(pred / "train-999999" / "ghost.png", np.ones((4, 4)))
    with pytest.raises(ManifestMismatch):
        evaluate_run(pred, manifest, manifest_dir=out)


def test_evaluate_report_files(scored_build, tmp_path):
    manifest, out = scored_build
    pred = tmp_path / "pred"
    pred.mkdir()
    report = evaluate_run(pred, manifest, manifest_dir=out)
    report.write(tmp_path / "report.json")
    assert (tmp_path / "report.json").exists()
    assert (tmp_path / "report.csv").exists()
    lines = (tmp_path / "report.csv").read_text().splitlines()
    assert lines[0].startswith("image_id,entity_id,kind")
    assert len(lines) == len(report.records) + 1
