"""Embedded linguistic tables and the age-group mapping."""

import json

import pytest

from matteforge.tables import (
    AGE_GROUPS,
    HUMAN_BASE_SYNONYMS,
    HUMAN_SYNONYMS,
    NON_SALIENT_CATEGORIES,
    RELATIVE_WORD_BAGS,
    ABSOLUTE_WORD_BAGS,
    TRANSPARENT_CATEGORIES,
    age_to_group,
    default_tables,
    load_tables,
)


def _registered(name):
    return default_tables().with_category(name)


def test_transparent_fixtures():
    assert _registered("wine glass").annotate_flags("wine glass") == (True, True)
    assert default_tables().annotate_flags("human") == (False, True)
    assert _registered("fire").annotate_flags("fire") == (True, False)


def test_every_listed_category_annotates():
    for name in TRANSPARENT_CATEGORIES | NON_SALIENT_CATEGORIES:
        transparent, salient = _registered(name).annotate_flags(name)
        assert transparent == (name in TRANSPARENT_CATEGORIES)
        assert salient == (name not in NON_SALIENT_CATEGORIES)


def test_list_contents():
    assert {"smoke", "glass", "water", "plastic bag", "wine glass",
            "wedding dress", "beer", "crystal stone"} <= TRANSPARENT_CATEGORIES
    assert {"leaves", "water spray", "smog", "light"} <= NON_SALIENT_CATEGORIES
    assert len(TRANSPARENT_CATEGORIES) == 30
    assert len(NON_SALIENT_CATEGORIES) == 14
    # non-salient non-transparent entries do not exist; overlap does
    assert {"fire", "flame"} <= TRANSPARENT_CATEGORIES & NON_SALIENT_CATEGORIES


def test_human_synonym_cells():
    assert HUMAN_SYNONYMS[("female", "adult")] == {"woman", "lady"}
    assert HUMAN_SYNONYMS[("male", "child")] == {"baby boy", "little boy", "boy"}
    assert HUMAN_SYNONYMS[("female", "senior")] == {
        "old woman", "senior citizen", "pensioner"
    }
    assert HUMAN_SYNONYMS[("male", "adult")] == {"man"}
    assert HUMAN_BASE_SYNONYMS == {
        "human being", "citizenry", "person", "individual", "mankind", "mortal"
    }


def test_human_synonyms_include_base():
    got = default_tables().human_synonyms_for("female", "adult")
    assert got == HUMAN_BASE_SYNONYMS | {"woman", "lady"}
    got = default_tables().human_synonyms_for("male", "child")
    assert got == HUMAN_BASE_SYNONYMS | {"baby boy", "little boy", "boy"}


@pytest.mark.parametrize("age,group", [
    (0, "child"), (2, "child"), (12, "child"),
    (13, "child"),   # 12-bracket midpoint 10 at distance 3 beats youth at 4.5
    (15, "youth"), (20, "youth"),
    (23, "youth"),   # equidistant 17.5 vs 28.5: younger group wins
    (25, "adult"), (30, "adult"), (53, "adult"),
    (60, "senior"), (100, "senior"), (130, "senior"),
])
def test_age_mapping(age, group):
    assert age_to_group(age) == group


def test_age_mapping_is_monotone():
    order = {g: i for i, g in enumerate(AGE_GROUPS)}
    previous = 0
    for age in range(0, 131):
        rank = order[age_to_group(age)]
        assert rank >= previous
        previous = rank


def test_age_out_of_range():
    with pytest.raises(ValueError):
        age_to_group(-1)
    with pytest.raises(ValueError):
        age_to_group(131)


def test_middle_has_no_relative_bag():
    assert "middle" in ABSOLUTE_WORD_BAGS
    assert "middle" not in RELATIVE_WORD_BAGS


def test_word_bag_contents():
    assert "at the rightmost edge of" in ABSOLUTE_WORD_BAGS["right"]
    assert "farthest to the left of" in ABSOLUTE_WORD_BAGS["left"]
    assert set(RELATIVE_WORD_BAGS["bottom"]) == {"below", "under", "underneath"}
    assert set(RELATIVE_WORD_BAGS["top"]) == {"above", "over", "on top of", "on"}
    shared = set(RELATIVE_WORD_BAGS["left"]) & set(RELATIVE_WORD_BAGS["right"])
    assert shared == {"beside", "next to", "close to", "near"}
    assert ABSOLUTE_WORD_BAGS["in_front_of"] == ("in front of",)
    assert set(ABSOLUTE_WORD_BAGS["behind"]) == {
        "behind", "in the back of", "at the back of"
    }


def test_load_tables_overrides(tmp_path):
    path = tmp_path / "tables.json"
    path.write_text(json.dumps({
        "synonyms": {"flower": ["plant"]},
        "transparent": ["glass"],
    }))
    tables = load_tables(path)
    assert tables.synonyms_of("flower") == {"flower", "plant"}
    assert tables.annotate_flags("flower") == (False, True)
    t, _ = tables.with_category("glass").annotate_flags("glass")
    assert t is True
    # untouched defaults survive
    assert tables.human_synonyms_for("male", "adult") >= {"man", "person"}
