"""Entity loading, validation, and annotation round trips."""

import numpy as np
import pytest

from matteforge.catalog import (
    build_entity,
    load_entity,
    read_catalog,
    save_entity,
    write_catalog,
)
from matteforge.errors import DimensionMismatch, EmptyEntity, UnknownCategory
from matteforge.raster import save_alpha, save_rgb

from conftest import make_entity, solid_rasters, toy_tables


def _write_pair(tmp_path, rgb, alpha, stem="asset"):
    rgb_path = tmp_path / f"{stem}.png"
    alpha_path = tmp_path / f"{stem}_alpha.png"
    save_rgb(rgb_path, rgb)
    save_alpha(alpha_path, alpha)
    return rgb_path, alpha_path


def test_load_entity_happy_path(tmp_path, tables):
    rgb, alpha = solid_rasters((255, 0, 0), size=(64, 64))
    rgb_path, alpha_path = _write_pair(tmp_path, rgb, alpha)
    entity = load_entity(
        rgb_path, alpha_path,
        {"id": "e1", "category": "cat", "class": "animal"},
        tables=tables,
    )
    assert entity.height == 64 and entity.width == 64
    assert entity.entity_class == "animal"
    assert entity.attributes.color == "red"
    assert "cat" in entity.synonyms


def test_dimension_mismatch(tmp_path, tables):
    rgb, _ = solid_rasters((10, 10, 10), size=(64, 64))
    _, alpha32 = solid_rasters((10, 10, 10), size=(32, 32))
    rgb_path, alpha_path = _write_pair(tmp_path, rgb, np.ones((64, 64)))
    save_alpha(alpha_path, alpha32)
    with pytest.raises(DimensionMismatch):
        load_entity(rgb_path, alpha_path,
                    {"category": "cat", "class": "animal"}, tables=tables)


def test_empty_alpha_rejected(tmp_path, tables):
    rgb, _ = solid_rasters((10, 10, 10), size=(16, 16))
    rgb_path, alpha_path = _write_pair(tmp_path, rgb, np.zeros((16, 16)))
    with pytest.raises(EmptyEntity):
        load_entity(rgb_path, alpha_path,
                    {"category": "cat", "class": "animal"}, tables=tables)


def test_unknown_category_needs_flag(tables):
    rgb, alpha = solid_rasters((9, 9, 9), size=(8, 8))
    with pytest.raises(UnknownCategory):
        build_entity("x", rgb, alpha, {"category": "zeppelin", "class": "object"},
                     tables=tables)
    entity = build_entity("x", rgb, alpha,
                          {"category": "zeppelin", "class": "object"},
                          tables=tables, allow_unknown_category=True)
    assert entity.synonyms == {"zeppelin"}


def test_rgba_single_file(tmp_path, tables):
    from PIL import Image

    rgb, alpha = solid_rasters((0, 0, 255), size=(20, 20))
    rgba = np.dstack([rgb, (alpha * 255).astype(np.uint8)])
    path = tmp_path / "asset.png"
    Image.fromarray(rgba, "RGBA").save(path)
    entity = load_entity(path, None, {"category": "ball", "class": "object"},
                         tables=tables)
    assert np.array_equal(entity.rgb, rgb)
    assert np.array_equal(entity.alpha, alpha)


def test_non_human_has_three_attribute_words():
    entity = make_entity("o1", "glass", "object", color="silver")
    words = entity.attributes.words()
    assert words == ("silver", "transparent", "salient")


def test_human_has_six_attribute_words():
    entity = make_entity("h1", "human", "human", color="peru",
                         gender="female", age=40, clothes="dress")
    words = entity.attributes.words()
    assert words == ("female", "adult", "non-transparent", "salient", "peru", "dress")
    # humans are salient and non-transparent regardless of flag tables
    assert entity.attributes.salient and not entity.attributes.transparent
    assert {"woman", "lady", "person", "human"} <= entity.synonyms


def test_human_requires_fields():
    rgb, alpha = solid_rasters((5, 5, 5), size=(8, 8))
    meta = {"category": "human", "class": "human", "gender": "male", "age": 30}
    with pytest.raises(ValueError):
        build_entity("h", rgb, alpha, meta)  # clothes missing
    meta["clothes"] = "suit"
    del meta["age"]
    with pytest.raises(ValueError):
        build_entity("h", rgb, alpha, meta)  # age missing
    meta["age_group"] = "adult"
    entity = build_entity("h", rgb, alpha, meta)
    assert entity.attributes.age_group == "adult"


def test_save_load_round_trip_is_bit_exact(tmp_path, tables):
    entity = make_entity("rt1", "cat", "animal", color="orchid", size=(33, 21))
    save_entity(entity, tmp_path)
    reloaded = load_entity(
        tmp_path / "rt1.png", tmp_path / "rt1_alpha.png",
        {"id": "rt1", "category": "cat", "class": "animal"},
        tables=tables,
    )
    assert np.array_equal(reloaded.rgb, entity.rgb)
    assert np.array_equal(reloaded.alpha, entity.alpha)


def test_catalog_round_trip(tmp_path):
    entities = [
        make_entity("c1", "cat", "animal", color="tomato"),
        make_entity("c2", "human", "human", color="teal",
                    gender="male", age=8, clothes="shorts", split="test"),
    ]
    path = write_catalog(entities, tmp_path / "cat")
    loaded = read_catalog(path)
    assert [e.id for e in loaded] == ["c1", "c2"]
    for a, b in zip(entities, loaded):
        assert np.array_equal(a.rgb, b.rgb)
        assert np.array_equal(a.alpha, b.alpha)
        assert a.attributes == b.attributes
        assert a.synonyms == b.synonyms
        assert a.split == b.split


def test_human_category_must_be_human():
    rgb, alpha = solid_rasters((5, 5, 5), size=(8, 8))
    meta = {"category": "man", "class": "human", "gender": "male",
            "age": 30, "clothes": "suit"}
    with pytest.raises(ValueError):
        build_entity("h", rgb, alpha, meta,
                     tables=toy_tables().with_category("man"))
