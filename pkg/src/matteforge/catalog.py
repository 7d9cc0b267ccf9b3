"""Entity catalog: asset loading, validation, and attribute annotation.

An Entity couples a color raster with its alpha matte, an entry-level
category name, the synonym set usable to refer to it, and the annotated
attribute set the expression engine consumes. Non-human entities carry
exactly three attributes (color, transparent, salient); human entities
carry six (plus gender, age group, clothes) and are always salient and
non-transparent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import raster
from .colors import annotate_color as _annotate_color
from .errors import DimensionMismatch, EmptyEntity, UnknownCategory
from .tables import (
    AGE_GROUPS,
    CategoryTables,
    age_to_group,
    default_tables,
    flag_words,
)

ENTITY_CLASSES: tuple[str, ...] = ("human", "animal", "object")


@dataclass(frozen=True)
class AttributeSet:
    """Annotated attributes of one entity."""

    color: str
    transparent: bool
    salient: bool
    gender: str | None = None
    age_group: str | None = None
    clothes: str | None = None

    @property
    def is_human(self) -> bool:
        return self.gender is not None

    def words(self) -> tuple[str, ...]:
        """Attribute words in canonical rendering order.

        Humans: gender, age group, transparency, saliency, color, clothes.
        Others: color, transparency, saliency.
        """
        t_word, s_word = flag_words(self.transparent, self.salient)
        if self.is_human:
            assert self.age_group is not None and self.clothes is not None
            return (self.gender, self.age_group, t_word, s_word, self.color, self.clothes)
        return (self.color, t_word, s_word)

    def to_json(self) -> dict:
        out: dict = {
            "color": self.color,
            "transparent": self.transparent,
            "salient": self.salient,
        }
        if self.gender is not None:
            out["gender"] = self.gender
        if self.age_group is not None:
            out["age_group"] = self.age_group
        if self.clothes is not None:
            out["clothes"] = self.clothes
        return out

    @staticmethod
    def from_json(data: Mapping) -> "AttributeSet":
        return AttributeSet(
            color=data["color"],
            transparent=bool(data["transparent"]),
            salient=bool(data["salient"]),
            gender=data.get("gender"),
            age_group=data.get("age_group"),
            clothes=data.get("clothes"),
        )


@dataclass(frozen=True)
class Entity:
    """One foreground asset with rasters and annotations."""

    id: str
    rgb: np.ndarray
    alpha: np.ndarray
    category: str
    synonyms: frozenset[str]
    entity_class: str
    attributes: AttributeSet
    split: str = "train"

    @property
    def height(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def width(self) -> int:
        return int(self.alpha.shape[1])


def _validate_rasters(rgb: np.ndarray, alpha: np.ndarray, entity_id: str) -> None:
    if rgb.shape[:2] != alpha.shape[:2]:
        raise DimensionMismatch(
            f"{entity_id}: rgb {rgb.shape[:2]} vs alpha {alpha.shape[:2]}"
        )
    if not np.any(alpha > 0):
        raise EmptyEntity(f"{entity_id}: alpha matte is all zero")


def annotate_flags(category: str, tables: CategoryTables | None = None) -> tuple[bool, bool]:
    """(transparent, salient) flags of a category per the embedded lists."""
    return (tables or default_tables()).annotate_flags(category)


def build_entity(
    entity_id: str,
    rgb: np.ndarray,
    alpha: np.ndarray,
    meta: Mapping,
    tables: CategoryTables | None = None,
    allow_unknown_category: bool = False,
) -> Entity:
    """Assemble and validate an Entity from decoded rasters and metadata.

    Metadata must contain ``category`` and ``class``; human entities also
    need ``gender``, ``age`` (or ``age_group``) and ``clothes``. Unknown
    categories are rejected unless allow_unknown_category registers them
    with an identity synonym set.
    """
    tables = tables or default_tables()
    _validate_rasters(rgb, alpha, entity_id)

    category = str(meta["category"]).lower()
    entity_class = str(meta["class"]).lower()
    if entity_class not in ENTITY_CLASSES:
        raise ValueError(f"{entity_id}: unknown entity class {entity_class!r}")
    if not tables.knows(category):
        if not allow_unknown_category:
            raise UnknownCategory(f"{entity_id}: {category!r}")
        tables = tables.with_category(category)

    transparent, salient = tables.annotate_flags(category)
    color = _annotate_color(rgb, alpha)

    if entity_class == "human":
        # gendered nouns canonicalize to "human"; any other category name
        # would make every synonym ambiguous between two categories
        if category != "human":
            raise ValueError(
                f"{entity_id}: human entities use category 'human', got {category!r}"
            )
        gender = meta.get("gender")
        if gender not in ("male", "female"):
            raise ValueError(f"{entity_id}: human entity needs gender male/female")
        if "age_group" in meta:
            age_group = str(meta["age_group"])
            if age_group not in AGE_GROUPS:
                raise ValueError(f"{entity_id}: unknown age group {age_group!r}")
        elif "age" in meta:
            age_group = age_to_group(int(meta["age"]))
        else:
            raise ValueError(f"{entity_id}: human entity needs age or age_group")
        clothes = meta.get("clothes")
        if not clothes:
            raise ValueError(f"{entity_id}: human entity needs a clothes label")
        # People are salient, non-transparent by definition.
        attributes = AttributeSet(
            color=color, transparent=False, salient=True,
            gender=gender, age_group=age_group, clothes=str(clothes).lower(),
        )
        synonyms = tables.synonyms_of(category) | tables.human_synonyms_for(
            gender, age_group
        )
    else:
        attributes = AttributeSet(color=color, transparent=transparent, salient=salient)
        synonyms = tables.synonyms_of(category)

    return Entity(
        id=entity_id,
        rgb=rgb,
        alpha=alpha,
        category=category,
        synonyms=synonyms,
        entity_class=entity_class,
        attributes=attributes,
        split=str(meta.get("split", "train")),
    )


def load_entity(
    rgb_path: str | Path,
    alpha_path: str | Path | None,
    meta: Mapping,
    tables: CategoryTables | None = None,
    allow_unknown_category: bool = False,
) -> Entity:
    """Load an entity from an RGB+alpha PNG pair (or one RGBA PNG)."""
    if alpha_path is None:
        rgb, alpha = raster.load_rgba(rgb_path)
    else:
        rgb = raster.load_rgb(rgb_path)
        alpha = raster.load_alpha(alpha_path)
    entity_id = str(meta.get("id") or Path(rgb_path).stem)
    return build_entity(
        entity_id, rgb, alpha, meta,
        tables=tables, allow_unknown_category=allow_unknown_category,
    )


def save_entity(entity: Entity, directory: str | Path) -> dict:
    """Persist rasters and metadata; returns the catalog record."""
    directory = Path(directory)
    rgb_path = directory / f"{entity.id}.png"
    alpha_path = directory / f"{entity.id}_alpha.png"
    raster.save_rgb(rgb_path, entity.rgb)
    raster.save_alpha(alpha_path, entity.alpha)
    record = {
        "id": entity.id,
        "category": entity.category,
        "class": entity.entity_class,
        "split": entity.split,
        "rgb": rgb_path.name,
        "alpha": alpha_path.name,
        "synonyms": sorted(entity.synonyms),
        "attributes": entity.attributes.to_json(),
    }
    return record


def write_catalog(entities: Iterable[Entity], directory: str | Path) -> Path:
    """Write rasters plus a catalog.json index for a set of entities."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records = [save_entity(e, directory) for e in entities]
    path = directory / "catalog.json"
    path.write_text(
        json.dumps({"entities": records}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return path


def read_catalog(path: str | Path) -> list[Entity]:
    """Load a catalog.json back into fully materialized entities."""
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    out: list[Entity] = []
    for record in data["entities"]:
        rgb = raster.load_rgb(path.parent / record["rgb"])
        alpha = raster.load_alpha(path.parent / record["alpha"])
        _validate_rasters(rgb, alpha, record["id"])
        attributes = AttributeSet.from_json(record["attributes"])
        out.append(Entity(
            id=record["id"],
            rgb=rgb,
            alpha=alpha,
            category=record["category"],
            synonyms=frozenset(record["synonyms"]),
            entity_class=record["class"],
            attributes=attributes,
            split=record.get("split", "train"),
        ))
    return out


def rename(entity: Entity, new_id: str) -> Entity:
    return replace(entity, id=new_id)
