"""Static linguistic tables: category flags, synonyms, and relation words.

All tables ship embedded and can be overridden (or extended) from a JSON
file. The transparent/non-salient lists decide the boolean attributes of a
category; the human synonym table maps (gender, age group) to the nouns an
expression may use for a person; the word bags hold the prepositional
phrases allowed for each position relationship in the absolute and
relative styles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import UnknownCategory

# Categories treated as transparent.
TRANSPARENT_CATEGORIES: frozenset[str] = frozenset({
    "smoke", "glass", "water", "gauze", "lace", "ice", "bubble wrap",
    "plastic bag", "net", "fire", "flame", "cloth", "mesh bag", "mesh",
    "wine glass", "ice cube", "spider web", "wine", "cloud", "smog",
    "veil", "wedding dress", "fishing net", "cloth net", "light",
    "water drop", "drip", "dew", "crystal stone", "beer",
})

# Categories treated as non-salient.
NON_SALIENT_CATEGORIES: frozenset[str] = frozenset({
    "smoke", "water", "gauze", "lace", "fire", "flame", "net", "leaves",
    "spider web", "mesh", "wine", "smog", "light", "water spray",
})

# Nouns usable for any person regardless of gender or age.
HUMAN_BASE_SYNONYMS: frozenset[str] = frozenset({
    "human being", "citizenry", "person", "individual", "mankind", "mortal",
})

AGE_GROUPS: tuple[str, ...] = ("child", "youth", "adult", "senior")
GENDERS: tuple[str, ...] = ("male", "female")

# (gender, age group) -> gendered nouns for that bracket.
HUMAN_SYNONYMS: dict[tuple[str, str], frozenset[str]] = {
    ("female", "child"): frozenset({"baby girl", "little girl", "girl"}),
    ("male", "child"): frozenset({"baby boy", "little boy", "boy"}),
    ("female", "youth"): frozenset({
        "girl", "teenager", "adolescent", "miss", "missy",
        "young lady", "young woman",
    }),
    ("male", "youth"): frozenset({"boy", "teenager", "adolescent"}),
    ("female", "adult"): frozenset({"woman", "lady"}),
    ("male", "adult"): frozenset({"man"}),
    ("female", "senior"): frozenset({"old woman", "senior citizen", "pensioner"}),
    ("male", "senior"): frozenset({"old man", "senior citizen", "pensioner"}),
}

# Age sub-brackets per group. Ages between brackets map to the group whose
# nearest sub-bracket midpoint is closest; ties go to the younger group.
AGE_BRACKETS: dict[str, tuple[tuple[int, int], ...]] = {
    "child": ((0, 2), (4, 6), (8, 12)),
    "youth": ((15, 20),),
    "adult": ((25, 32), (38, 43), (48, 53)),
    "senior": ((60, 100),),
}

RELATIONS: tuple[str, ...] = ("left", "right", "top", "bottom", "in_front_of", "behind")

# Pseudo-relations that never appear as layout facts: "middle" exists only
# in absolute expressions; "beside" is the side-agnostic reading shared by
# the left and right relative bags.
ABSOLUTE_ONLY_RELATIONS: tuple[str, ...] = ("middle",)
RELATIVE_ONLY_RELATIONS: tuple[str, ...] = ("beside",)

ABSOLUTE_WORD_BAGS: dict[str, tuple[str, ...]] = {
    "left": (
        "at the most left side of",
        "on the far left of",
        "at the leftmost edge of",
        "farthest to the left of",
    ),
    "right": (
        "at the most right side of",
        "on the far right of",
        "at the rightmost edge of",
        "farthest to the right of",
    ),
    "middle": (
        "in the middle of",
        "in the center of",
    ),
    "top": (
        "on top of",
        "in the upper part of",
    ),
    "bottom": (
        "below",
        "in the lower part of",
    ),
    "in_front_of": (
        "in front of",
    ),
    "behind": (
        "behind",
        "in the back of",
        "at the back of",
    ),
}

# Phrases shared between the left and right relative bags carry no side
# information; they parse to the pseudo-relation "beside".
RELATIVE_WORD_BAGS: dict[str, tuple[str, ...]] = {
    "left": (
        "to the left of",
        "on the left side of",
        "at the left side of",
        "beside",
        "next to",
        "close to",
        "near",
    ),
    "right": (
        "to the right of",
        "on the right side of",
        "at the right side of",
        "beside",
        "next to",
        "close to",
        "near",
    ),
    "top": (
        "above",
        "over",
        "on top of",
        "on",
    ),
    "bottom": (
        "below",
        "under",
        "underneath",
    ),
    "in_front_of": (
        "in front of",
    ),
    "behind": (
        "behind",
        "in the back of",
        "at the back of",
    ),
}

SIDE_AGNOSTIC_PHRASES: frozenset[str] = frozenset({
    "beside", "next to", "close to", "near",
})

PHOTO_NOUNS: tuple[str, ...] = ("photo", "image", "picture")

ARTICLES: tuple[str, ...] = ("the", "a")

CONNECTIVES: tuple[str, ...] = ("which is", "that is")

# Markers introducing the color/clothes tail of a human description.
HUMAN_SUFFIX_MARKERS: tuple[str, ...] = (
    "with the", "wearing the", "in the", "who is dressed in",
)

FLAG_WORDS: tuple[str, ...] = ("transparent", "non-transparent", "salient", "non-salient")


def flag_words(transparent: bool, salient: bool) -> tuple[str, str]:
    """Attribute words for the two boolean flags."""
    return (
        "transparent" if transparent else "non-transparent",
        "salient" if salient else "non-salient",
    )


@dataclass(frozen=True)
class CategoryTables:
    """Category universe with flags and synonyms.

    ``synonym_map`` doubles as the list of known categories. The flag sets
    and human tables default to the embedded data above.
    """

    synonym_map: dict[str, frozenset[str]] = field(default_factory=dict)
    transparent_set: frozenset[str] = TRANSPARENT_CATEGORIES
    non_salient_set: frozenset[str] = NON_SALIENT_CATEGORIES
    human_base_synonyms: frozenset[str] = HUMAN_BASE_SYNONYMS
    human_synonyms: dict[tuple[str, str], frozenset[str]] = field(
        default_factory=lambda: dict(HUMAN_SYNONYMS)
    )

    def __post_init__(self) -> None:
        merged = {"human": frozenset({"human"})}
        for cat, syns in self.synonym_map.items():
            merged[cat] = frozenset(syns) | {cat}
        object.__setattr__(self, "synonym_map", merged)

    def knows(self, category: str) -> bool:
        return category in self.synonym_map

    def synonyms_of(self, category: str) -> frozenset[str]:
        try:
            return self.synonym_map[category]
        except KeyError:
            raise UnknownCategory(category) from None

    def annotate_flags(self, category: str) -> tuple[bool, bool]:
        """(transparent, salient) for a known category."""
        if not self.knows(category):
            raise UnknownCategory(category)
        return category in self.transparent_set, category not in self.non_salient_set

    def human_synonyms_for(self, gender: str, age_group: str) -> frozenset[str]:
        """All nouns usable for a person of the given gender and age group."""
        if gender not in GENDERS:
            raise ValueError(f"unknown gender {gender!r}")
        if age_group not in AGE_GROUPS:
            raise ValueError(f"unknown age group {age_group!r}")
        return self.human_base_synonyms | self.human_synonyms[(gender, age_group)]

    def with_category(self, category: str, synonyms: frozenset[str] = frozenset()) -> "CategoryTables":
        """Return tables extended with one more category."""
        updated = {c: s for c, s in self.synonym_map.items()}
        updated[category] = updated.get(category, frozenset()) | synonyms | {category}
        return CategoryTables(
            synonym_map=updated,
            transparent_set=self.transparent_set,
            non_salient_set=self.non_salient_set,
            human_base_synonyms=self.human_base_synonyms,
            human_synonyms=self.human_synonyms,
        )


def age_to_group(age: int) -> str:
    """Map an age in years to its group via nearest sub-bracket midpoint.

    Ages inside a listed sub-bracket land in that group directly; gap ages
    go to the group with the nearest midpoint, younger group on ties.
    """
    if age < 0 or age > 130:
        raise ValueError(f"age {age} outside [0, 130]")
    for group in AGE_GROUPS:
        if any(lo <= age <= hi for lo, hi in AGE_BRACKETS[group]):
            return group
    best_group = AGE_GROUPS[0]
    best_dist = float("inf")
    for group in AGE_GROUPS:  # youngest first: strict < keeps younger on ties
        for lo, hi in AGE_BRACKETS[group]:
            dist = abs(age - (lo + hi) / 2.0)
            if dist < best_dist:
                best_dist = dist
                best_group = group
    return best_group


def default_tables() -> CategoryTables:
    """Embedded tables with an empty (extensible) category universe."""
    return CategoryTables()


@dataclass(frozen=True)
class WordBags:
    """Relation phrase bags plus the small closed word classes.

    Phrases present in both the left and right relative bags are
    side-agnostic: they parse to the pseudo-relation ``beside`` and ground
    as left-or-right.
    """

    absolute: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(ABSOLUTE_WORD_BAGS)
    )
    relative: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(RELATIVE_WORD_BAGS)
    )
    photo_nouns: tuple[str, ...] = PHOTO_NOUNS
    articles: tuple[str, ...] = ARTICLES
    connectives: tuple[str, ...] = CONNECTIVES
    human_suffix_markers: tuple[str, ...] = HUMAN_SUFFIX_MARKERS

    def side_agnostic_phrases(self) -> frozenset[str]:
        left = set(self.relative.get("left", ()))
        right = set(self.relative.get("right", ()))
        return frozenset(left & right)

    def rel_table(self) -> dict[tuple[str, ...], frozenset[tuple[str, str]]]:
        """phrase words -> {(relation, style)} over both styles."""
        agnostic = self.side_agnostic_phrases()
        table: dict[tuple[str, ...], set[tuple[str, str]]] = {}
        for relation, bag in self.absolute.items():
            for phrase in bag:
                table.setdefault(tuple(phrase.split()), set()).add((relation, "abs"))
        for relation, bag in self.relative.items():
            for phrase in bag:
                norm = "beside" if phrase in agnostic else relation
                table.setdefault(tuple(phrase.split()), set()).add((norm, "rel"))
        return {k: frozenset(v) for k, v in table.items()}

    def phrase_relation(self, phrase: str, style: str) -> str:
        """The relation recorded in the logic for an emitted phrase."""
        readings = self.rel_table().get(tuple(phrase.lower().split()), ())
        for relation, st in readings:
            if st == style:
                return relation
        raise KeyError(f"{phrase!r} has no {style} reading")


def default_word_bags() -> WordBags:
    return WordBags()


def load_word_bags(path: str | Path) -> WordBags:
    """Load word bags and template word classes from JSON.

    Keys (all optional, defaults embedded): ``absolute`` and ``relative``
    (relation -> phrase list), ``photo_nouns``, ``articles``,
    ``connectives``, ``human_suffix_markers``.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    bags = WordBags(
        absolute={k: tuple(v) for k, v in raw.get(
            "absolute", ABSOLUTE_WORD_BAGS).items()},
        relative={k: tuple(v) for k, v in raw.get(
            "relative", RELATIVE_WORD_BAGS).items()},
        photo_nouns=tuple(raw.get("photo_nouns", PHOTO_NOUNS)),
        articles=tuple(raw.get("articles", ARTICLES)),
        connectives=tuple(raw.get("connectives", CONNECTIVES)),
        human_suffix_markers=tuple(
            raw.get("human_suffix_markers", HUMAN_SUFFIX_MARKERS)
        ),
    )
    if "middle" in bags.relative:
        raise ValueError("middle is absolute-only and cannot have a relative bag")
    return bags


def load_tables(path: str | Path) -> CategoryTables:
    """Load tables from JSON, overriding the embedded defaults field by field.

    Recognized keys: ``synonyms`` (category -> synonym list, merged over
    the defaults), ``transparent``, ``non_salient``, ``human_base_synonyms``
    (lists, replacing the defaults), ``human_synonyms``
    (gender -> age group -> list, replacing the defaults).
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    synonym_map = {
        cat: frozenset(syns) for cat, syns in raw.get("synonyms", {}).items()
    }
    human = dict(HUMAN_SYNONYMS)
    if "human_synonyms" in raw:
        human = {
            (gender, group): frozenset(words)
            for gender, groups in raw["human_synonyms"].items()
            for group, words in groups.items()
        }
    return CategoryTables(
        synonym_map=synonym_map,
        transparent_set=frozenset(raw.get("transparent", TRANSPARENT_CATEGORIES)),
        non_salient_set=frozenset(raw.get("non_salient", NON_SALIENT_CATEGORIES)),
        human_base_synonyms=frozenset(
            raw.get("human_base_synonyms", HUMAN_BASE_SYNONYMS)
        ),
        human_synonyms=human,
    )
