"""Expression generation: keywords plus the four templated descriptions.

Each entity in a scene gets one keyword and four expressions: a basic
description (all attributes, no relation), an absolute-position
description anchored to the photo frame, and two relative-position
descriptions against a partner entity (attribute-prefix form and
"which/that is" form). Every expression is verified before being emitted:
it must parse back to the logic it was generated from and ground to
exactly its target entity. Generation retries with fresh draws, escalating
to the full attribute set, before giving up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import Entity
from .compose import eval_relation
from .errors import NoTrueRelation, UngroundableExpression
from .grammar import Grammar, ground
from .logic import LogicForm, SceneMeta
from .tables import (
    RELATIONS,
    CategoryTables,
    WordBags,
    default_tables,
    default_word_bags,
)

EXPRESSION_KINDS: tuple[str, ...] = ("BE", "APE", "RPE1", "RPE2")
_ABS_CANDIDATES: tuple[str, ...] = ("left", "right", "top", "bottom", "middle")


@dataclass(frozen=True)
class ExpressionRecord:
    """One emitted text with the logic it was generated from."""

    entity_id: str
    kind: str
    text: str
    logic: LogicForm

    def to_json(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "kind": self.kind,
            "text": self.text,
            "logic": self.logic.to_json(),
        }

    @staticmethod
    def from_json(data: dict) -> "ExpressionRecord":
        return ExpressionRecord(
            entity_id=data["entity_id"],
            kind=data["kind"],
            text=data["text"],
            logic=LogicForm.from_json(data["logic"]),
        )


def _choice(rng: np.random.Generator, options) -> str:
    options = sorted(options) if isinstance(options, (set, frozenset)) else list(options)
    return str(options[int(rng.integers(0, len(options)))])


def _join_list(words) -> str:
    """Attribute list rendering: "a", "a and b", "a, b and c"."""
    words = list(words)
    if len(words) == 1:
        return words[0]
    return ", ".join(words[:-1]) + " and " + words[-1]


def _subset(rng: np.random.Generator, words: tuple[str, ...], full: bool) -> tuple[str, ...]:
    """Non-empty subset in canonical order; ``full`` forces all words."""
    if full or len(words) == 1:
        return words
    size = int(rng.integers(1, len(words) + 1))
    picked = rng.choice(len(words), size=size, replace=False)
    return tuple(words[i] for i in sorted(int(p) for p in picked))


def keyword_for(
    entity: Entity,
    rng: np.random.Generator,
    tables: CategoryTables | None = None,
) -> str:
    """The entry-level category name; humans draw a seeded synonym."""
    if entity.entity_class == "human":
        tables = tables or default_tables()
        attrs = entity.attributes
        pool = tables.human_synonyms_for(attrs.gender, attrs.age_group)
        return _choice(rng, pool)
    return entity.category


def _scene_index(scene: SceneMeta, entity_id: str) -> int:
    for k, meta in enumerate(scene.entities):
        if meta.entity_id == entity_id:
            return k
    raise ValueError(f"entity {entity_id} not in scene")


def _render_np(rng, atts, obj_word, bags: WordBags, *, style: str) -> str:
    article = _choice(rng, bags.articles)
    if style == "prefix":
        return f"{article} {_join_list(atts)} {obj_word}"
    connective = _choice(rng, bags.connectives)
    return f"{article} {obj_word} {connective} {_join_list(atts)}"


def _draw_be(entity: Entity, rng, bags: WordBags) -> tuple[str, LogicForm]:
    words = entity.attributes.words()
    obj_word = _choice(rng, entity.synonyms)
    article = _choice(rng, bags.articles)
    if entity.attributes.is_human:
        marker = _choice(rng, bags.human_suffix_markers)
        text = (f"{article} {' '.join(words[:4])} {obj_word} "
                f"{marker} {' '.join(words[4:])}")
    else:
        style = _choice(rng, ("prefix", "conn"))
        if style == "prefix":
            text = f"{article} {_join_list(words)} {obj_word}"
        else:
            connective = _choice(rng, bags.connectives)
            text = f"{article} {obj_word} {connective} {_join_list(words)}"
    return text, LogicForm("BE", entity.category, frozenset(words))


def _draw_ape(entity, scene, idx, rng, full, bags: WordBags) -> tuple[str, LogicForm]:
    true_abs = [
        r for r in _ABS_CANDIDATES if eval_relation(scene.layout, idx, None, r)
    ]
    if not true_abs:
        raise NoTrueRelation(f"{entity.id}: no absolute relation holds")
    relation = _choice(rng, true_abs)
    phrase = _choice(rng, bags.absolute[relation])
    noun = _choice(rng, bags.photo_nouns)
    atts = _subset(rng, entity.attributes.words(), full)
    obj_word = _choice(rng, entity.synonyms)
    style = _choice(rng, ("prefix", "conn"))
    np_text = _render_np(rng, atts, obj_word, bags, style=style)
    text = f"{np_text} {phrase} the {noun}"
    logic = LogicForm(
        "APE", entity.category, frozenset(atts),
        rel=bags.phrase_relation(phrase, "abs"), abs=True,
    )
    return text, logic


def _draw_rpe(entity, scene, idx, rng, kind, full, bags: WordBags) -> tuple[str, LogicForm]:
    facts = [
        (j, r)
        for j in range(len(scene.entities)) if j != idx
        for r in RELATIONS
        if eval_relation(scene.layout, idx, j, r)
    ]
    if not facts:
        raise NoTrueRelation(f"{entity.id}: no relative fact holds")
    j, relation = facts[int(rng.integers(0, len(facts)))]
    partner = scene.entities[j]
    phrase = _choice(rng, bags.relative[relation])
    atts0 = _subset(rng, entity.attributes.words(), full)
    atts1 = _subset(rng, partner.attributes.words(), full)
    obj0 = _choice(rng, entity.synonyms)
    obj1 = _choice(rng, partner.synonyms)
    style = "prefix" if kind == "RPE1" else "conn"
    np0 = _render_np(rng, atts0, obj0, bags, style=style)
    np1 = _render_np(rng, atts1, obj1, bags, style=style)
    text = f"{np0} {phrase} {np1}"
    logic = LogicForm(
        "RPE", entity.category, frozenset(atts0),
        rel=bags.phrase_relation(phrase, "rel"), abs=False,
        obj1=partner.category, atts1=frozenset(atts1),
    )
    return text, logic


def generate(
    entity: Entity,
    scene: SceneMeta,
    kind: str,
    rng: np.random.Generator,
    grammar: Grammar | None = None,
    tables: CategoryTables | None = None,
    word_bags: WordBags | None = None,
    max_tries: int = 48,
) -> ExpressionRecord:
    """Emit one verified expression of the given kind for the entity.

    The text is accepted only if parsing recovers the generating logic and
    grounding resolves to exactly the target. Positional kinds draw random
    attribute subsets and escalate to the full set in the second half of
    the retry budget; a basic expression already uses every attribute, so
    an ambiguous one fails immediately.
    """
    if kind not in EXPRESSION_KINDS:
        raise ValueError(f"unknown expression kind {kind!r}")
    bags = word_bags or default_word_bags()
    grammar = grammar or Grammar.for_scene(scene, tables, bags)
    idx = _scene_index(scene, entity.id)
    if kind in ("RPE1", "RPE2") and len(scene.entities) < 2:
        raise ValueError("relative expressions need at least 2 entities")

    last_error: Exception | None = None
    for attempt in range(max_tries):
        full = attempt >= max_tries // 2
        if kind == "BE":
            text, logic = _draw_be(entity, rng, bags)
        elif kind == "APE":
            text, logic = _draw_ape(entity, scene, idx, rng, full, bags)
        else:
            text, logic = _draw_rpe(entity, scene, idx, rng, kind, full, bags)
        try:
            parsed = grammar.parse(text)
        except Exception as err:  # vocabulary collision: retry other draws
            last_error = err
            continue
        if parsed != logic:
            last_error = ValueError(f"{text!r} parsed to a different logic")
            continue
        if ground(parsed, scene) == frozenset({entity.id}):
            return ExpressionRecord(entity.id, kind, text, logic)
        if kind == "BE":
            break  # grounding of a full-attribute BE cannot change on retry
    raise UngroundableExpression(
        f"{entity.id}: no unique {kind} after {max_tries} tries"
        + (f" ({last_error})" if last_error else "")
    )


def generate_suite(
    entity: Entity,
    scene: SceneMeta,
    rng: np.random.Generator,
    grammar: Grammar | None = None,
    tables: CategoryTables | None = None,
    word_bags: WordBags | None = None,
) -> list[ExpressionRecord]:
    """The four verified expressions (BE, APE, RPE1, RPE2) for one entity."""
    bags = word_bags or default_word_bags()
    grammar = grammar or Grammar.for_scene(scene, tables, bags)
    records = []
    for kind in EXPRESSION_KINDS:
        try:
            records.append(generate(
                entity, scene, kind, rng, grammar=grammar, word_bags=bags,
            ))
        except NoTrueRelation as err:
            raise UngroundableExpression(str(err)) from err
    return records
