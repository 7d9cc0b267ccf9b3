"""Synthetic assets shared by the demo scripts.

Real builds ingest foreground/alpha PNG pairs; the demos fabricate small
solid-color entities with soft elliptical mattes so they run anywhere in
a second or two.
"""

from __future__ import annotations

import numpy as np

from matteforge import CategoryTables, default_tables
from matteforge.catalog import Entity, build_entity
from matteforge.colors import CSS3_COLORS

DEMO_CATEGORIES = {
    "cat": set(), "dog": set(), "bird": set(),
    "flower": {"plant"}, "ball": set(), "cup": set(), "glass": set(),
    "net": set(), "vase": set(),
}


def demo_tables() -> CategoryTables:
    tables = default_tables()
    for category, synonyms in DEMO_CATEGORIES.items():
        tables = tables.with_category(category, frozenset(synonyms))
    return tables


def soft_disk_asset(color_name: str, size=(40, 40)):
    h, w = size
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    rgb[:, :] = CSS3_COLORS[color_name]
    ys, xs = np.mgrid[0:h, 0:w]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    dist = np.sqrt(((ys - cy) / (h / 2.0)) ** 2 + ((xs - cx) / (w / 2.0)) ** 2)
    alpha = np.rint(np.clip(1.3 - dist * 1.3, 0.0, 1.0) * 255.0) / 255.0
    return rgb, alpha


def demo_entity(entity_id, category, entity_class, color_name,
                size=(40, 40), split="train", **human_fields) -> Entity:
    rgb, alpha = soft_disk_asset(color_name, size)
    meta = {"category": category, "class": entity_class, "split": split}
    meta.update(human_fields)
    return build_entity(entity_id, rgb, alpha, meta, tables=demo_tables())


def demo_pool(split="train", humans=6, animals=3, objects=3) -> list[Entity]:
    colors = ["peru", "steelblue", "olive", "orchid", "sienna", "teal",
              "crimson", "goldenrod", "indigo", "salmon", "khaki", "navy",
              "plum", "coral", "maroon"]
    variants = [("male", 30, "jeans"), ("female", 28, "dress"),
                ("male", 9, "hoodie"), ("female", 18, "jacket"),
                ("male", 65, "coat"), ("female", 70, "scarf")]
    picks = iter(colors)
    pool = []
    for i in range(humans):
        gender, age, clothes = variants[i % len(variants)]
        pool.append(demo_entity(
            f"{split}-person{i}", "human", "human", next(picks),
            split=split, gender=gender, age=age, clothes=f"{clothes}{i}",
        ))
    animal_names = ["cat", "dog", "bird"]
    for i in range(animals):
        pool.append(demo_entity(
            f"{split}-animal{i}", animal_names[i % 3], "animal", next(picks),
            split=split,
        ))
    object_names = ["flower", "ball", "glass"]
    for i in range(objects):
        pool.append(demo_entity(
            f"{split}-object{i}", object_names[i % 3], "object", next(picks),
            split=split,
        ))
    return pool


def demo_backgrounds(count=2, size=(150, 200)):
    from matteforge import Background

    h, w = size
    out = []
    for i in range(count):
        rgb = np.zeros((h, w, 3), dtype=np.uint8)
        rgb[:, :, 0] = np.linspace(20, 120, h, dtype=np.uint8)[:, None]
        rgb[:, :, 1] = 60 + 50 * i
        rgb[:, :, 2] = np.linspace(140, 40, w, dtype=np.uint8)[None, :]
        out.append(Background(id=f"bg{i}", rgb=rgb))
    return out
