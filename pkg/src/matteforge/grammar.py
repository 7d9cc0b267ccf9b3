"""Expression parsing and grounding.

The generated language is a closed template grammar: keywords, basic
descriptions, absolute-position descriptions (anchored to "the photo/
image/picture"), and relative-position descriptions against a second
entity. parse() inverts the templates back into a LogicForm using
recursive descent over a longest-match phrase tokenization; ground()
resolves a LogicForm against a scene to the set of entities it denotes.
These two functions define the normative semantics every generated
expression is verified against.

Phrases inside one lexical class match greedily (longest wins, no
backtracking); different classes may claim different spans at the same
position and the parser explores those alternatives. Phrases that appear
in both the left and right relative word bags (beside, next to, close to,
near) carry no side information and parse to the pseudo-relation
``beside``, which grounds as left-or-right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .catalog import AttributeSet
from .colors import CSS3_COLORS
from .compose import eval_relation
from .errors import AmbiguousParse, UnparsableExpression
from .logic import LogicForm, SceneMeta
from .tables import (
    AGE_GROUPS,
    CategoryTables,
    FLAG_WORDS,
    GENDERS,
    WordBags,
    default_tables,
    default_word_bags,
)

_WORD_RE = re.compile(r"[^\s,]+|,")

_KIND_PRIORITY = {"RPE": 0, "APE": 1, "BE": 2, "KEYWORD": 3}


def _words_of(phrase: str) -> tuple[str, ...]:
    return tuple(phrase.lower().split())


# rel table of the embedded bags, for callers that never customize
REL_TABLE: dict[tuple[str, ...], frozenset[tuple[str, str]]] = (
    default_word_bags().rel_table()
)


def phrase_relation(phrase: str, style: str) -> str:
    """The relation a default-bag phrase denotes in the parsed logic."""
    return default_word_bags().phrase_relation(phrase, style)


@dataclass(frozen=True)
class Vocabulary:
    """Phrase tables the tokenizer matches against."""

    cat_table: dict[tuple[str, ...], frozenset[str]]
    att_table: dict[tuple[str, ...], str]

    @staticmethod
    def build(
        tables: CategoryTables | None = None,
        extra_categories: Mapping[str, Iterable[str]] | None = None,
        attribute_phrases: Iterable[str] = (),
    ) -> "Vocabulary":
        tables = tables or default_tables()
        cat_table: dict[tuple[str, ...], set[str]] = {}

        def add_cat(word: str, canonical: str) -> None:
            cat_table.setdefault(_words_of(word), set()).add(canonical)

        for category, synonyms in tables.synonym_map.items():
            for synonym in synonyms:
                add_cat(synonym, category)
        for word in tables.human_base_synonyms:
            add_cat(word, "human")
        for cell in tables.human_synonyms.values():
            for word in cell:
                add_cat(word, "human")
        if extra_categories:
            for canonical, synonyms in extra_categories.items():
                add_cat(canonical, canonical)
                for synonym in synonyms:
                    add_cat(synonym, canonical)

        att_table: dict[tuple[str, ...], str] = {}
        for name in CSS3_COLORS:
            att_table[_words_of(name)] = name
        for word in FLAG_WORDS + GENDERS + tuple(AGE_GROUPS):
            att_table[_words_of(word)] = word
        for phrase in attribute_phrases:
            att_table[_words_of(phrase)] = " ".join(_words_of(phrase))

        return Vocabulary(
            cat_table={k: frozenset(v) for k, v in cat_table.items()},
            att_table=att_table,
        )


def _longest(words: list[str], pos: int, table: Mapping[tuple[str, ...], object], max_len: int):
    """Longest phrase of one class starting at pos, or None."""
    limit = min(max_len, len(words) - pos)
    for length in range(limit, 0, -1):
        key = tuple(words[pos:pos + length])
        if key in table:
            return table[key], pos + length
    return None


class Grammar:
    """Parser for the generated expression language."""

    def __init__(
        self,
        vocabulary: Vocabulary | None = None,
        word_bags: WordBags | None = None,
    ):
        self.vocab = vocabulary or Vocabulary.build()
        self.bags = word_bags or default_word_bags()
        self._rel_table = self.bags.rel_table()
        self._cat_max = max((len(k) for k in self.vocab.cat_table), default=1)
        self._att_max = max((len(k) for k in self.vocab.att_table), default=1)
        self._rel_max = max(len(k) for k in self._rel_table)
        self._suffix_table = {
            _words_of(m): m for m in self.bags.human_suffix_markers
        }
        self._suffix_max = max(len(k) for k in self._suffix_table)
        self._conn_table = {_words_of(c): c for c in self.bags.connectives}
        self._conn_max = max(len(k) for k in self._conn_table)
        self._articles = frozenset(self.bags.articles)
        self._photo_nouns = frozenset(self.bags.photo_nouns)

    @staticmethod
    def for_scene(
        scene: SceneMeta,
        tables: CategoryTables | None = None,
        word_bags: WordBags | None = None,
    ) -> "Grammar":
        """Grammar whose vocabulary covers everything a scene can mention."""
        extra = {m.category: set(m.synonyms) for m in scene.entities}
        vocab = Vocabulary.build(
            tables=tables,
            extra_categories=extra,
            attribute_phrases=scene.clothes_phrases(),
        )
        return Grammar(vocab, word_bags)

    # --- tokenizer-level helpers -------------------------------------------

    def _match_cat(self, words, pos):
        return _longest(words, pos, self.vocab.cat_table, self._cat_max)

    def _match_att(self, words, pos):
        return _longest(words, pos, self.vocab.att_table, self._att_max)

    def _match_rel(self, words, pos):
        return _longest(words, pos, self._rel_table, self._rel_max)

    # --- productions --------------------------------------------------------

    def _att_list(self, words, pos):
        """All (attribute set, end) readings of an attribute list at pos.

        Items may be juxtaposed or separated by "and", a comma, or a comma
        plus "and".
        """
        out: set[tuple[frozenset, int]] = set()

        def walk(p: int, acc: frozenset) -> None:
            matched = self._match_att(words, p)
            if matched is None:
                return
            value, end = matched
            acc2 = acc | {value}
            out.add((acc2, end))
            walk(end, acc2)
            if end < len(words) and words[end] == ",":
                walk(end + 1, acc2)
                if end + 1 < len(words) and words[end + 1] == "and":
                    walk(end + 2, acc2)
            if end < len(words) and words[end] == "and":
                walk(end + 1, acc2)

        walk(pos, frozenset())
        return out

    def _np_core(self, words, pos):
        """Noun phrases: ART atts OBJ, or ART OBJ which/that-is atts."""
        alts: set[tuple[frozenset, frozenset, int]] = set()
        if pos >= len(words) or words[pos] not in self._articles:
            return alts
        body = pos + 1
        for atts, q in self._att_list(words, body):
            cat = self._match_cat(words, q)
            if cat is not None:
                alts.add((cat[0], atts, cat[1]))
        cat = self._match_cat(words, body)
        if cat is not None:
            conn = _longest(words, cat[1], self._conn_table, self._conn_max)
            if conn is not None:
                for atts, q in self._att_list(words, conn[1]):
                    alts.add((cat[0], atts, q))
        return alts

    def _np_basic(self, words, pos):
        """_np_core plus the human tail: ART atts OBJ <marker> atts."""
        alts = set(self._np_core(words, pos))
        if pos >= len(words) or words[pos] not in self._articles:
            return alts
        for atts, q in self._att_list(words, pos + 1):
            cat = self._match_cat(words, q)
            if cat is None:
                continue
            marker = _longest(words, cat[1], self._suffix_table, self._suffix_max)
            if marker is None:
                continue
            for tail, r in self._att_list(words, marker[1]):
                alts.add((cat[0], atts | tail, r))
        return alts

    def _parse_all(self, words: list[str]) -> set[LogicForm]:
        end = len(words)
        results: set[LogicForm] = set()

        cat = self._match_cat(words, 0)
        if cat is not None and cat[1] == end:
            for canonical in cat[0]:
                results.add(LogicForm("KEYWORD", canonical))

        for cats, atts, q in self._np_basic(words, 0):
            if q == end and atts:
                for canonical in cats:
                    results.add(LogicForm("BE", canonical, atts))

        for cats, atts, q in self._np_core(words, 0):
            if not atts:
                continue
            rel = self._match_rel(words, q)
            if rel is None:
                continue
            readings, after_rel = rel
            # absolute: <rel> the photo/image/picture, consuming everything
            if (after_rel + 2 == end
                    and words[after_rel] in self._articles
                    and words[after_rel + 1] in self._photo_nouns):
                for relation, style in readings:
                    if style != "abs":
                        continue
                    for canonical in cats:
                        results.add(LogicForm(
                            "APE", canonical, atts, rel=relation, abs=True,
                        ))
            # relative: <rel> second noun phrase
            for cats2, atts2, q2 in self._np_core(words, after_rel):
                if q2 != end or not atts2:
                    continue
                for relation, style in readings:
                    if style != "rel":
                        continue
                    for canonical in cats:
                        for canonical2 in cats2:
                            results.add(LogicForm(
                                "RPE", canonical, atts,
                                rel=relation, abs=False,
                                obj1=canonical2, atts1=atts2,
                            ))
        return results

    def parse(self, text: str) -> LogicForm:
        """Parse one generated expression into its unique LogicForm."""
        words = _WORD_RE.findall(text.lower())
        if not words:
            raise UnparsableExpression("empty expression")
        results = self._parse_all(words)
        if not results:
            raise UnparsableExpression(self._diagnose(words, text))
        contents = {
            (lf.obj0, lf.atts0, lf.rel, lf.abs, lf.obj1, lf.atts1)
            for lf in results
        }
        if len(contents) > 1:
            raise AmbiguousParse(
                f"{text!r} admits {len(contents)} distinct logic forms"
            )
        # identical content under several templates: highest-priority kind wins
        return min(results, key=lambda lf: _KIND_PRIORITY[lf.kind])

    def _diagnose(self, words: list[str], text: str) -> str:
        for pos, word in enumerate(words):
            if word in self._articles or word in ("and", ","):
                continue
            if word in self._photo_nouns:
                continue
            if self._match_cat(words, pos) or self._match_att(words, pos):
                continue
            if self._match_rel(words, pos):
                continue
            if _longest(words, pos, self._suffix_table, self._suffix_max):
                continue
            if _longest(words, pos, self._conn_table, self._conn_max):
                continue
            if pos > 0 and (self._match_rel(words, pos - 1)
                            or _longest(words, pos - 1, self._suffix_table,
                                        self._suffix_max)):
                continue  # covered by a phrase starting earlier
            return f"token {word!r} outside the vocabulary in {text!r}"
        return f"no template matches {text!r}"


_DEFAULT_GRAMMAR: Grammar | None = None


def parse(text: str) -> LogicForm:
    """Parse with the embedded default vocabulary."""
    global _DEFAULT_GRAMMAR
    if _DEFAULT_GRAMMAR is None:
        _DEFAULT_GRAMMAR = Grammar()
    return _DEFAULT_GRAMMAR.parse(text)


def attribute_consistent(word: str, attrs: AttributeSet) -> bool:
    """Is one attribute word compatible with an entity's attributes?

    Absent metadata never matches: a clothes word can only be satisfied by
    an entity that has a clothes label equal to it.
    """
    if word == "transparent":
        return attrs.transparent
    if word == "non-transparent":
        return not attrs.transparent
    if word == "salient":
        return attrs.salient
    if word == "non-salient":
        return not attrs.salient
    return word in (attrs.color, attrs.gender, attrs.age_group, attrs.clothes)


def ground(logic: LogicForm, scene: SceneMeta) -> frozenset[str]:
    """All entity ids in the scene the logic form denotes.

    An entity matches when its synonym set contains obj0 and every word in
    atts0 is consistent with its attributes; a relation additionally
    requires eval_relation to hold (absolute form for APE, existence of a
    matching partner for RPE). The empty set is a legal result.
    """
    metas = scene.entities

    def matches(meta, obj, atts) -> bool:
        return obj in meta.synonyms and all(
            attribute_consistent(word, meta.attributes) for word in atts
        )

    candidates = [
        k for k, meta in enumerate(metas) if matches(meta, logic.obj0, logic.atts0)
    ]
    if logic.rel is None:
        return frozenset(metas[k].entity_id for k in candidates)
    if logic.abs:
        return frozenset(
            metas[k].entity_id for k in candidates
            if eval_relation(scene.layout, k, None, logic.rel)
        )
    hits = []
    for k in candidates:
        for m, meta in enumerate(metas):
            if m == k:
                continue
            if (matches(meta, logic.obj1, logic.atts1)
                    and eval_relation(scene.layout, k, m, logic.rel)):
                hits.append(k)
                break
    return frozenset(metas[k].entity_id for k in hits)
