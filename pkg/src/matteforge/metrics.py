"""Alpha-matte error metrics and run scoring.

Per entity: the raw sum of absolute differences, the mean squared error,
and the mean absolute difference between ground truth and prediction.
Aggregation has two variants: entity-averaged (mean over all scored
entities) and image-averaged (mean within each image first, then over
images), the latter reported with an (E) suffix. Reported SAD applies a
configurable scale to the raw pixel sum (default 1e-3, the usual
thousands convention); the raw value is always kept alongside.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .builder import DatasetManifest, filter_keyword_setting
from .errors import EmptyInput, ManifestMismatch, RangeViolation, SizeMismatch
from .raster import load_alpha

log = logging.getLogger(__name__)

DEFAULT_SAD_SCALE = 1e-3


def entity_metrics(gt: np.ndarray, pred: np.ndarray) -> tuple[float, float, float]:
    """(sad_raw, mse, mad) between two [0, 1] mattes of equal size."""
    if gt.shape != pred.shape:
        raise SizeMismatch(f"gt {gt.shape} vs pred {pred.shape}")
    for name, arr in (("gt", gt), ("pred", pred)):
        if arr.size == 0:
            raise SizeMismatch(f"{name} raster is empty")
        if float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
            raise RangeViolation(f"{name} values outside [0, 1]")
    diff = np.abs(gt.astype(np.float64) - pred.astype(np.float64))
    sad_raw = float(diff.sum())
    mse = float(np.mean(diff * diff))
    mad = float(diff.mean())
    return sad_raw, mse, mad


@dataclass(frozen=True)
class EntityScore:
    """One scored (entity, text) pair."""

    image_id: str
    entity_id: str
    kind: str
    sad_raw: float
    mse: float
    mad: float


@dataclass(frozen=True)
class MetricReport:
    records: tuple[EntityScore, ...]
    sad_scale: float
    sad: float
    mse: float
    mad: float
    sad_e: float
    mse_e: float
    mad_e: float

    def to_json(self) -> dict:
        return {
            "sad_scale": self.sad_scale,
            "entity_averaged": {"sad": self.sad, "mse": self.mse, "mad": self.mad},
            "image_averaged": {
                "sad_e": self.sad_e, "mse_e": self.mse_e, "mad_e": self.mad_e,
            },
            "num_records": len(self.records),
        }

    def write(self, json_path: str | Path, csv_path: str | Path | None = None) -> None:
        json_path = Path(json_path)
        json_path.parent.mkdir(parents=True, exist_ok=True)
        json_path.write_text(
            json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        if csv_path is None:
            csv_path = json_path.with_suffix(".csv")
        with open(csv_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["image_id", "entity_id", "kind", "sad_raw", "mse", "mad"])
            for r in self.records:
                writer.writerow([r.image_id, r.entity_id, r.kind,
                                 repr(r.sad_raw), repr(r.mse), repr(r.mad)])


def aggregate(
    records: Iterable[EntityScore], sad_scale: float = DEFAULT_SAD_SCALE
) -> MetricReport:
    """Entity- and image-averaged means over the scored records.

    Records are put in canonical order first, so the report is independent
    of input ordering.
    """
    ordered = tuple(sorted(
        records, key=lambda r: (r.image_id, r.entity_id, r.kind)
    ))
    if not ordered:
        raise EmptyInput("no records to aggregate")

    n = len(ordered)
    sad = sum(r.sad_raw * sad_scale for r in ordered) / n
    mse = sum(r.mse for r in ordered) / n
    mad = sum(r.mad for r in ordered) / n

    by_image: dict[str, list[EntityScore]] = {}
    for r in ordered:
        by_image.setdefault(r.image_id, []).append(r)
    image_means = []
    for image_id in sorted(by_image):
        group = by_image[image_id]
        m = len(group)
        image_means.append((
            sum(r.sad_raw * sad_scale for r in group) / m,
            sum(r.mse for r in group) / m,
            sum(r.mad for r in group) / m,
        ))
    k = len(image_means)
    sad_e = sum(v[0] for v in image_means) / k
    mse_e = sum(v[1] for v in image_means) / k
    mad_e = sum(v[2] for v in image_means) / k

    return MetricReport(
        records=ordered, sad_scale=sad_scale,
        sad=sad, mse=mse, mad=mad,
        sad_e=sad_e, mse_e=mse_e, mad_e=mad_e,
    )


def _check_pred_dir(pred_dir: Path, known: dict[str, set[str]]) -> None:
    for image_dir in sorted(p for p in pred_dir.iterdir() if p.is_dir()):
        if image_dir.name not in known:
            raise ManifestMismatch(f"unknown image id {image_dir.name!r} in predictions")
        for matte in image_dir.glob("*.png"):
            if matte.stem not in known[image_dir.name]:
                raise ManifestMismatch(
                    f"unknown entity {matte.stem!r} for image {image_dir.name!r}"
                )


def evaluate_run(
    pred_dir: str | Path,
    manifest: DatasetManifest,
    setting: str = "expression",
    sad_scale: float = DEFAULT_SAD_SCALE,
    manifest_dir: str | Path = ".",
) -> MetricReport:
    """Score a directory of predicted mattes against a built dataset.

    Predictions live at ``<pred_dir>/<image_id>/<entity_id>.png``. In the
    keyword setting only ambiguity-filtered images count, one record per
    entity; in the expression setting every one of the entity's four texts
    is scored against the same ground-truth matte. A missing prediction
    scores as an all-zero matte (with a warning); ids unknown to the
    manifest are an error.
    """
    if setting not in ("keyword", "expression"):
        raise ValueError(f"unknown setting {setting!r}")
    pred_dir = Path(pred_dir)
    manifest_dir = Path(manifest_dir)
    if not manifest.rasters_written:
        raise ManifestMismatch("manifest was built without rasters; nothing to score")

    if setting == "keyword":
        images = filter_keyword_setting(manifest).images
    else:
        images = manifest.images

    # ids are checked against the whole manifest; the setting only selects
    # which images are scored
    known = {
        im.image_id: {e.entity_id for e in im.entities} for im in manifest.images
    }
    _check_pred_dir(pred_dir, known)

    records: list[EntityScore] = []
    for image in images:
        for entity in image.entities:
            gt = load_alpha(manifest_dir / entity.visible_alpha_path)
            pred_path = pred_dir / image.image_id / f"{entity.entity_id}.png"
            if pred_path.exists():
                pred = load_alpha(pred_path)
            else:
                log.warning("missing prediction %s; scoring as all zeros", pred_path)
                pred = np.zeros_like(gt)
            sad_raw, mse, mad = entity_metrics(gt, pred)
            if setting == "keyword":
                records.append(EntityScore(
                    image.image_id, entity.entity_id, "KEYWORD", sad_raw, mse, mad,
                ))
            else:
                for expression in entity.expressions:
                    records.append(EntityScore(
                        image.image_id, entity.entity_id, expression.kind,
                        sad_raw, mse, mad,
                    ))
    return aggregate(records, sad_scale)
