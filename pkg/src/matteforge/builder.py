"""Dataset construction: balancing, grouping, composition, and statistics.

The recipe: balance each split's class counts to 5:1:1 (humans, animals,
objects) by seeded round-robin duplication, form groups of 5 humans + 1
animal + 1 object, then emit a fixed number of composites per group plus a
batch of extra composites drawn from the whole pool. Every composite
samples a relationship at the configured 7:2:1 ratio over left/right,
top/bottom, and front/behind, places 2 or 3 entities (always 2 for the
depth relations), renders the scene, and attaches one keyword plus four
verified expressions per entity.

Failed slots (infeasible placement, ungroundable expression) are resampled
with a fresh derived seed and logged, so totals stay exact. Every slot's
random stream is derived from (master seed, split, slot index, attempt),
which makes the output byte-identical regardless of worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import raster
from .catalog import AttributeSet, Entity
from .compose import OCCLUSION_RELATIONS, SceneLayout, composite, plan_layout
from .errors import (
    AmbiguousParse,
    BuildError,
    EmptyInput,
    ImbalancedPool,
    NoTrueRelation,
    PlacementInfeasible,
    UngroundableExpression,
    UnitTooSmall,
    UnparsableExpression,
    UsageError,
)
from .expressions import ExpressionRecord, generate_suite, keyword_for
from .grammar import Grammar
from .logic import EntityMeta, SceneMeta
from .seeding import spawn_rng
from .tables import CategoryTables, WordBags

SPLITS = ("train", "test")
RELATION_PAIRS = (("left", "right"), ("top", "bottom"), ("in_front_of", "behind"))


@dataclass(frozen=True)
class BuildConfig:
    """Knobs of one dataset build. The seed is mandatory."""

    master_seed: int
    composites_per_group_train: int = 20
    composites_per_group_test: int = 10
    extra_random_train: int = 2800
    extra_random_test: int = 390
    relation_ratio: tuple[float, float, float] = (7.0, 2.0, 1.0)
    balance_unit: int | str | Mapping[str, int] = "auto"
    canvas: str | tuple[int, int] = "background"
    scale_range: tuple[float, float] = (0.35, 0.6)
    overlap_range: tuple[float, float] = (0.15, 0.5)
    triple_probability: float = 0.5
    max_slot_attempts: int = 20
    workers: int = 1
    save_rasters: bool = True

    def __post_init__(self) -> None:
        if self.master_seed is None:
            raise UsageError("a master seed is required")
        if any(r <= 0 for r in self.relation_ratio):
            raise UsageError("relation ratio entries must be positive")
        if self.composites_per_group_train <= 0 or self.composites_per_group_test <= 0:
            raise UsageError("composites per group must be positive")

    def per_group(self, split: str) -> int:
        return (self.composites_per_group_train if split == "train"
                else self.composites_per_group_test)

    def extra(self, split: str) -> int:
        return self.extra_random_train if split == "train" else self.extra_random_test

    def unit_for(self, split: str) -> int | None:
        if isinstance(self.balance_unit, str):
            if self.balance_unit.lower() == "auto":
                return None
            return int(self.balance_unit)
        if isinstance(self.balance_unit, Mapping):
            value = self.balance_unit.get(split, "auto")
            return None if value == "auto" else int(value)
        return int(self.balance_unit)

    @staticmethod
    def from_json(data: Mapping) -> "BuildConfig":
        kwargs = dict(data)
        for key in ("relation_ratio", "scale_range", "overlap_range"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if isinstance(kwargs.get("canvas"), list):
            kwargs["canvas"] = tuple(kwargs["canvas"])
        return BuildConfig(**kwargs)


@dataclass(frozen=True)
class BalancePlan:
    """Arithmetic of one split's 5:1:1 balancing."""

    unit: int
    targets: tuple[int, int, int]
    duplicates: tuple[int, int, int]


def balance(counts: tuple[int, int, int], unit: int | None = None) -> BalancePlan:
    """Duplication plan bringing (humans, animals, objects) to (5u, u, u).

    With unit None the smallest feasible unit is used:
    max(ceil(H/5), A, O). An explicit unit below that is rejected.
    """
    humans, animals, objects = counts
    minimum = max(math.ceil(humans / 5), animals, objects)
    if unit is None:
        unit = minimum
    if unit < minimum:
        raise UnitTooSmall(f"unit {unit} below minimum {minimum} for {counts}")
    targets = (5 * unit, unit, unit)
    duplicates = (targets[0] - humans, targets[1] - animals, targets[2] - objects)
    return BalancePlan(unit=unit, targets=targets, duplicates=duplicates)


def duplicate_round_robin(
    pool: Sequence[Entity], target: int, rng: np.random.Generator
) -> list[Entity]:
    """Original pool plus duplicates cycled over a seeded shuffle."""
    if not pool and target > 0:
        raise ImbalancedPool("cannot duplicate from an empty class pool")
    instances = list(pool)
    order = [pool[int(i)] for i in rng.permutation(len(pool))]
    k = 0
    while len(instances) < target:
        instances.append(order[k % len(order)])
        k += 1
    return instances


def apply_balance(
    pool: Sequence[Entity], plan: BalancePlan, rng: np.random.Generator
) -> list[Entity]:
    """Materialize the duplication plan over a mixed-class pool."""
    by_class = {"human": [], "animal": [], "object": []}
    for entity in pool:
        by_class[entity.entity_class].append(entity)
    out: list[Entity] = []
    for cls, target in zip(("human", "animal", "object"), plan.targets):
        out.extend(duplicate_round_robin(by_class[cls], target, rng))
    return out


def make_groups(pool: Sequence[Entity], rng: np.random.Generator) -> list[list[Entity]]:
    """Partition a balanced (5u, u, u) pool into u groups of 5H + 1A + 1O."""
    by_class = {"human": [], "animal": [], "object": []}
    for entity in pool:
        by_class[entity.entity_class].append(entity)
    humans, animals, objects = (by_class["human"], by_class["animal"], by_class["object"])
    unit = len(animals)
    if unit == 0 or len(objects) != unit or len(humans) != 5 * unit:
        raise ImbalancedPool(
            f"pool {len(humans)}:{len(animals)}:{len(objects)} is not (5u, u, u)"
        )
    humans = [humans[int(i)] for i in rng.permutation(len(humans))]
    animals = [animals[int(i)] for i in rng.permutation(len(animals))]
    objects = [objects[int(i)] for i in rng.permutation(len(objects))]
    return [
        humans[5 * g:5 * g + 5] + [animals[g]] + [objects[g]]
        for g in range(unit)
    ]


def sample_relation(rng: np.random.Generator, ratio=(7.0, 2.0, 1.0)) -> str:
    """One of the six relations; pair class at ``ratio``, direction uniform."""
    total = float(sum(ratio))
    roll = float(rng.random()) * total
    if roll < ratio[0]:
        pair = RELATION_PAIRS[0]
    elif roll < ratio[0] + ratio[1]:
        pair = RELATION_PAIRS[1]
    else:
        pair = RELATION_PAIRS[2]
    return pair[0] if rng.random() < 0.5 else pair[1]


# --- manifest records --------------------------------------------------------


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    category: str
    entity_class: str
    synonyms: frozenset[str]
    attributes: AttributeSet
    visible_alpha_path: str
    keyword: str
    expressions: tuple[ExpressionRecord, ...]

    def to_json(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "category": self.category,
            "class": self.entity_class,
            "synonyms": sorted(self.synonyms),
            "attributes": self.attributes.to_json(),
            "visible_alpha_path": self.visible_alpha_path,
            "keyword": self.keyword,
            "expressions": [e.to_json() for e in self.expressions],
        }

    @staticmethod
    def from_json(data: dict) -> "EntityRecord":
        return EntityRecord(
            entity_id=data["entity_id"],
            category=data["category"],
            entity_class=data["class"],
            synonyms=frozenset(data["synonyms"]),
            attributes=AttributeSet.from_json(data["attributes"]),
            visible_alpha_path=data["visible_alpha_path"],
            keyword=data["keyword"],
            expressions=tuple(
                ExpressionRecord.from_json(e) for e in data["expressions"]
            ),
        )


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    split: str
    composite_path: str
    background_id: str
    relation: str
    layout: SceneLayout
    entities: tuple[EntityRecord, ...]
    keyword_ok: bool

    def scene_meta(self) -> SceneMeta:
        metas = tuple(
            EntityMeta(e.entity_id, e.category, e.synonyms, e.attributes)
            for e in self.entities
        )
        return SceneMeta(layout=self.layout, entities=metas)

    def to_json(self) -> dict:
        return {
            "image_id": self.image_id,
            "split": self.split,
            "composite_path": self.composite_path,
            "background_id": self.background_id,
            "relation": self.relation,
            "layout": self.layout.to_json(),
            "entities": [e.to_json() for e in self.entities],
            "keyword_ok": self.keyword_ok,
        }

    @staticmethod
    def from_json(data: dict) -> "ImageRecord":
        return ImageRecord(
            image_id=data["image_id"],
            split=data["split"],
            composite_path=data["composite_path"],
            background_id=data["background_id"],
            relation=data["relation"],
            layout=SceneLayout.from_json(data["layout"]),
            entities=tuple(EntityRecord.from_json(e) for e in data["entities"]),
            keyword_ok=bool(data["keyword_ok"]),
        )


@dataclass(frozen=True)
class DatasetManifest:
    images: tuple[ImageRecord, ...]
    master_seed: int
    rasters_written: bool = True
    skipped: tuple[dict, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "rasters_written": self.rasters_written,
            "images": [im.to_json() for im in self.images],
            "skipped": list(self.skipped),
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    @staticmethod
    def from_json(data: dict) -> "DatasetManifest":
        return DatasetManifest(
            images=tuple(ImageRecord.from_json(im) for im in data["images"]),
            master_seed=int(data["master_seed"]),
            rasters_written=bool(data.get("rasters_written", True)),
            skipped=tuple(data.get("skipped", ())),
        )

    @staticmethod
    def load(path: str | Path) -> "DatasetManifest":
        return DatasetManifest.from_json(
            json.loads(Path(path).read_text(encoding="utf-8"))
        )


@dataclass(frozen=True)
class Background:
    id: str
    rgb: np.ndarray


def load_backgrounds(directory: str | Path) -> list[Background]:
    """All PNGs in a directory, sorted by name for determinism."""
    directory = Path(directory)
    out = []
    for path in sorted(directory.glob("*.png")):
        out.append(Background(id=path.stem, rgb=raster.load_rgb(path)))
    if not out:
        raise UsageError(f"no background PNGs in {directory}")
    return out


# --- the build ---------------------------------------------------------------


def _ambiguous_pair(entities: Sequence[EntityRecord]) -> bool:
    for a in range(len(entities)):
        for b in range(a + 1, len(entities)):
            if entities[a].synonyms & entities[b].synonyms:
                return True
    return False


def _pick_distinct(rng, instances: Sequence[Entity], n: int) -> list[Entity]:
    """n entities with distinct ids, uniform over the distinct ids."""
    by_id: dict[str, Entity] = {}
    for e in instances:
        by_id.setdefault(e.id, e)
    ids = sorted(by_id)
    if len(ids) < n:
        raise ImbalancedPool(f"need {n} distinct entities, pool has {len(ids)}")
    picked = rng.choice(len(ids), size=n, replace=False)
    return [by_id[ids[int(i)]] for i in sorted(int(p) for p in picked)]


def _render_slot(
    slot: int,
    split: str,
    source: Sequence[Entity],
    backgrounds: Sequence[Background],
    config: BuildConfig,
    tables: CategoryTables | None,
    word_bags: WordBags | None,
    out_dir: Path | None,
):
    """Build one composite slot, resampling on generation failures."""
    failures: list[dict] = []
    for attempt in range(config.max_slot_attempts):
        rng = spawn_rng(config.master_seed, split, "slot", slot, attempt)
        try:
            relation = sample_relation(rng, config.relation_ratio)
            if relation in OCCLUSION_RELATIONS:
                count = 2
            else:
                count = 3 if rng.random() < config.triple_probability else 2
            chosen = _pick_distinct(rng, source, count)
            background = backgrounds[int(rng.integers(0, len(backgrounds)))]
            if config.canvas == "background":
                bg = background.rgb.astype(np.float64)
            else:
                w, h = config.canvas
                bg = raster.resize_bilinear(background.rgb, int(h), int(w))
            canvas = (bg.shape[1], bg.shape[0])
            layout = plan_layout(
                chosen, relation, canvas, rng,
                scale_range=config.scale_range,
                overlap_range=config.overlap_range,
            )
            scene = SceneMeta.from_entities(layout, chosen)
            grammar = Grammar.for_scene(scene, tables, word_bags)

            image_id = f"{split}-{slot:06d}"
            entity_records = []
            for k, entity in enumerate(chosen):
                kw_rng = spawn_rng(config.master_seed, split, "kw", slot, attempt, k)
                expr_rng = spawn_rng(config.master_seed, split, "expr", slot, attempt, k)
                keyword = keyword_for(entity, kw_rng, tables)
                expressions = generate_suite(entity, scene, expr_rng,
                                             grammar=grammar, word_bags=word_bags)
                entity_records.append(EntityRecord(
                    entity_id=entity.id,
                    category=entity.category,
                    entity_class=entity.entity_class,
                    synonyms=entity.synonyms,
                    attributes=entity.attributes,
                    visible_alpha_path=f"mattes/{image_id}/{entity.id}.png",
                    keyword=keyword,
                    expressions=tuple(expressions),
                ))

            if config.save_rasters:
                assert out_dir is not None
                result = composite(layout, bg, chosen)
                raster.save_rgb(out_dir / "images" / f"{image_id}.png",
                                raster.quantize_rgb(result.image))
                for record, visible in zip(entity_records, result.visible_alphas):
                    raster.save_alpha(out_dir / record.visible_alpha_path, visible)

            record = ImageRecord(
                image_id=image_id,
                split=split,
                composite_path=f"images/{image_id}.png",
                background_id=background.id,
                relation=relation,
                layout=layout,
                entities=tuple(entity_records),
                keyword_ok=not _ambiguous_pair(entity_records),
            )
            return record, failures
        except (PlacementInfeasible, UngroundableExpression, NoTrueRelation,
                AmbiguousParse, UnparsableExpression) as err:
            failures.append({
                "split": split, "slot": slot, "attempt": attempt,
                "error": type(err).__name__, "detail": str(err),
            })
    raise BuildError(
        f"slot {split}-{slot} failed {config.max_slot_attempts} attempts: "
        f"{failures[-1]['detail']}"
    )


def build_dataset(
    config: BuildConfig,
    catalog: Sequence[Entity],
    backgrounds: Sequence[Background],
    out_dir: str | Path | None = None,
    tables: CategoryTables | None = None,
    word_bags: WordBags | None = None,
) -> DatasetManifest:
    """Run the full recipe over the catalog's train/test pools.

    Composites, visible-alpha mattes, and manifest.json land under
    ``out_dir`` (required unless ``config.save_rasters`` is off, in which
    case a manifest-only dry run is performed). Fully deterministic given
    the config; the worker count never changes the output.
    """
    if config.save_rasters and out_dir is None:
        raise UsageError("out_dir is required when rasters are saved")
    if not backgrounds:
        raise UsageError("background pool is empty")
    out_path = Path(out_dir) if out_dir is not None else None

    jobs = []
    for split in SPLITS:
        pool = [e for e in catalog if e.split == split]
        if not pool:
            continue
        counts = (
            sum(e.entity_class == "human" for e in pool),
            sum(e.entity_class == "animal" for e in pool),
            sum(e.entity_class == "object" for e in pool),
        )
        if 0 in counts:
            raise ImbalancedPool(
                f"{split} pool must contain all three classes, got {counts}"
            )
        plan = balance(counts, config.unit_for(split))
        instances = apply_balance(
            pool, plan, spawn_rng(config.master_seed, split, "balance")
        )
        groups = make_groups(
            instances, spawn_rng(config.master_seed, split, "groups")
        )
        slot = 0
        for group in groups:
            for _ in range(config.per_group(split)):
                jobs.append((split, slot, group))
                slot += 1
        for _ in range(config.extra(split)):
            jobs.append((split, slot, instances))
            slot += 1

    def run(job):
        split, slot, source = job
        return _render_slot(slot, split, source, backgrounds, config,
                            tables, word_bags, out_path)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool_exec:
            outcomes = list(pool_exec.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]

    images = []
    skipped: list[dict] = []
    for record, failures in outcomes:
        images.append(record)
        skipped.extend(failures)
    images.sort(key=lambda im: (im.split, im.image_id))
    skipped.sort(key=lambda s: (s["split"], s["slot"], s["attempt"]))

    manifest = DatasetManifest(
        images=tuple(images),
        master_seed=config.master_seed,
        rasters_written=config.save_rasters,
        skipped=tuple(skipped),
    )
    if out_path is not None:
        manifest.save(out_path / "manifest.json")
    return manifest


def filter_keyword_setting(manifest: DatasetManifest) -> DatasetManifest:
    """Drop images whose entities share any synonym (ambiguous keywords)."""
    kept = tuple(
        im for im in manifest.images if not _ambiguous_pair(im.entities)
    )
    return DatasetManifest(
        images=kept,
        master_seed=manifest.master_seed,
        rasters_written=manifest.rasters_written,
        skipped=manifest.skipped,
    )


# --- statistics --------------------------------------------------------------


@dataclass(frozen=True)
class SettingStats:
    image_num: int
    matte_num: int
    text_num: int
    category_num: int
    avg_text_length: float

    def to_json(self) -> dict:
        return {
            "image_num": self.image_num,
            "matte_num": self.matte_num,
            "text_num": self.text_num,
            "category_num": self.category_num,
            "avg_text_length": round(self.avg_text_length, 6),
        }


@dataclass(frozen=True)
class StatsReport:
    expression: SettingStats
    keyword: SettingStats
    class_proportions: dict[str, float]
    relation_counts: dict[str, int]
    attribute_counts: dict[str, int]
    keyword_counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "expression_setting": self.expression.to_json(),
            "keyword_setting": self.keyword.to_json(),
            "class_proportions": {
                k: round(v, 6) for k, v in sorted(self.class_proportions.items())
            },
            "relation_counts": dict(sorted(self.relation_counts.items())),
            "attribute_counts": dict(sorted(self.attribute_counts.items())),
            "keyword_counts": dict(sorted(self.keyword_counts.items())),
        }

    def write(self, directory: str | Path) -> None:
        """stats.json plus one CSV per frequency table."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "stats.json").write_text(
            json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        tables = {
            "relation_frequency.csv": self.relation_counts,
            "attribute_frequency.csv": self.attribute_counts,
            "keyword_frequency.csv": self.keyword_counts,
        }
        for name, counts in tables.items():
            lines = ["value,count"]
            lines += [f"{k},{v}" for k, v in sorted(counts.items())]
            (directory / name).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _word_count(text: str) -> int:
    return len(text.split())


def _setting_stats(images: Sequence[ImageRecord], texts: list[str]) -> SettingStats:
    mattes = sum(len(im.entities) for im in images)
    categories = {e.category for im in images for e in im.entities}
    avg = (sum(_word_count(t) for t in texts) / len(texts)) if texts else 0.0
    return SettingStats(
        image_num=len(images),
        matte_num=mattes,
        text_num=len(texts),
        category_num=len(categories),
        avg_text_length=avg,
    )


def stats(manifest: DatasetManifest, split: str | None = None) -> StatsReport:
    """Exact tallies for both settings plus the frequency tables."""
    images = [
        im for im in manifest.images if split is None or im.split == split
    ]
    if not images:
        raise EmptyInput("no images to tally")

    expr_texts = [
        rec.text for im in images for e in im.entities for rec in e.expressions
    ]
    keyword_images = [im for im in images if not _ambiguous_pair(im.entities)]
    keyword_texts = [e.keyword for im in keyword_images for e in im.entities]

    entities = [e for im in images for e in im.entities]
    class_counts: dict[str, int] = {}
    attribute_counts: dict[str, int] = {}
    keyword_counts: dict[str, int] = {}
    for e in entities:
        class_counts[e.entity_class] = class_counts.get(e.entity_class, 0) + 1
        keyword_counts[e.keyword] = keyword_counts.get(e.keyword, 0) + 1
        for word in e.attributes.words():
            attribute_counts[word] = attribute_counts.get(word, 0) + 1
    relation_counts: dict[str, int] = {}
    for im in images:
        relation_counts[im.relation] = relation_counts.get(im.relation, 0) + 1

    total = len(entities)
    return StatsReport(
        expression=_setting_stats(images, expr_texts),
        keyword=_setting_stats(keyword_images, keyword_texts),
        class_proportions={k: v / total for k, v in class_counts.items()},
        relation_counts=relation_counts,
        attribute_counts=attribute_counts,
        keyword_counts=keyword_counts,
    )
