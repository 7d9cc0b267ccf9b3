"""Shared factories for synthetic entities, scenes, and catalogs."""

from __future__ import annotations

import numpy as np
import pytest

from matteforge.catalog import Entity, build_entity
from matteforge.colors import CSS3_COLORS
from matteforge.tables import CategoryTables, default_tables

TOY_CATEGORIES = {
    "cat": set(), "dog": set(), "bird": set(), "horse": set(), "rabbit": set(),
    "flower": {"plant"}, "ball": set(), "cup": set(), "vase": set(),
    "box": set(), "glass": set(), "net": set(), "lamp": set(), "chair": set(),
}


def toy_tables() -> CategoryTables:
    tables = default_tables()
    for category, synonyms in TOY_CATEGORIES.items():
        tables = tables.with_category(category, frozenset(synonyms))
    return tables


def solid_rasters(color, size=(32, 32), soft_edge=True):
    """Constant-color raster with a soft-edged elliptical alpha."""
    h, w = size
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    rgb[:, :] = color
    ys, xs = np.mgrid[0:h, 0:w]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    dist = np.sqrt(((ys - cy) / (h / 2.0)) ** 2 + ((xs - cx) / (w / 2.0)) ** 2)
    if soft_edge:
        alpha = np.clip(1.3 - dist * 1.3, 0.0, 1.0)
    else:
        alpha = (dist <= 1.0).astype(np.float64)
    # keep alpha on the 8-bit grid so PNG round trips are exact
    alpha = np.rint(alpha * 255.0) / 255.0
    return rgb, alpha


def make_entity(
    entity_id: str,
    category: str,
    entity_class: str = "object",
    color: str = "red",
    size=(32, 32),
    tables: CategoryTables | None = None,
    split: str = "train",
    **human_fields,
) -> Entity:
    """Entity whose annotated color is exactly ``color`` (a CSS3 keyword)."""
    rgb, alpha = solid_rasters(CSS3_COLORS[color], size=size)
    meta = {"category": category, "class": entity_class, "split": split}
    meta.update(human_fields)
    return build_entity(entity_id, rgb, alpha, meta, tables=tables or toy_tables())


_HUMAN_VARIANTS = [
    ("male", 30, "jeans"), ("female", 30, "dress"), ("male", 10, "hoodie"),
    ("female", 17, "skirt"), ("male", 70, "coat"), ("female", 70, "scarf"),
    ("male", 17, "jacket"), ("female", 5, "overalls"),
]

_ANIMAL_CATEGORIES = ["cat", "dog", "bird", "horse", "rabbit"]
_OBJECT_CATEGORIES = ["flower", "ball", "cup", "vase", "box", "glass", "net", "lamp", "chair"]


def toy_catalog(num_humans=13, num_animals=5, num_objects=5,
                size=(28, 28), split="train"):
    """A pool of distinct-color entities in the three classes."""
    tables = toy_tables()
    names = sorted(CSS3_COLORS)
    # spread color picks so every entity gets a distinct keyword
    picks = iter(names[7::3])
    entities = []
    for i in range(num_humans):
        gender, age, clothes = _HUMAN_VARIANTS[i % len(_HUMAN_VARIANTS)]
        entities.append(make_entity(
            f"{split}-hum{i:03d}", "human", "human", next(picks), size,
            tables, split, gender=gender, age=age, clothes=f"{clothes}{i}",
        ))
    for i in range(num_animals):
        entities.append(make_entity(
            f"{split}-ani{i:03d}", _ANIMAL_CATEGORIES[i % len(_ANIMAL_CATEGORIES)],
            "animal", next(picks), size, tables, split,
        ))
    for i in range(num_objects):
        entities.append(make_entity(
            f"{split}-obj{i:03d}", _OBJECT_CATEGORIES[i % len(_OBJECT_CATEGORIES)],
            "object", next(picks), size, tables, split,
        ))
    return entities


def toy_backgrounds(count=3, size=(120, 160)):
    from matteforge.builder import Background

    h, w = size
    out = []
    for i in range(count):
        rgb = np.zeros((h, w, 3), dtype=np.uint8)
        rgb[:, :, 0] = 40 * (i + 1)
        rgb[:, :, 1] = np.linspace(0, 200, w, dtype=np.uint8)[None, :]
        rgb[:, :, 2] = 90
        out.append(Background(id=f"bg{i:02d}", rgb=rgb))
    return out


@pytest.fixture(scope="session")
def tables():
    return toy_tables()


@pytest.fixture(scope="session")
def small_catalog():
    return toy_catalog(num_humans=6, num_animals=3, num_objects=3)
