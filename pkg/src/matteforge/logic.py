"""Structured meaning of expressions and the scene facts they resolve against."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .catalog import AttributeSet, Entity
from .compose import SceneLayout

KINDS: tuple[str, ...] = ("KEYWORD", "BE", "APE", "RPE")


@dataclass(frozen=True)
class LogicForm:
    """Target category and attributes, optionally constrained by a relation.

    ``abs`` marks an image-absolute relation (the APE reading); relative
    relations carry the related object in ``obj1``/``atts1``.
    """

    kind: str
    obj0: str
    atts0: frozenset[str] = frozenset()
    rel: str | None = None
    abs: bool = False
    obj1: str | None = None
    atts1: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown logic kind {self.kind!r}")
        if self.kind == "APE" and (self.rel is None or not self.abs or self.obj1):
            raise ValueError("APE logic needs an absolute relation and no object")
        if self.kind == "RPE" and (self.rel is None or self.abs or not self.obj1):
            raise ValueError("RPE logic needs a relative relation and an object")
        if self.kind in ("KEYWORD", "BE") and self.rel is not None:
            raise ValueError(f"{self.kind} logic carries no relation")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "obj0": self.obj0,
                     "atts0": sorted(self.atts0)}
        if self.rel is not None:
            out["rel"] = self.rel
            out["abs"] = self.abs
        if self.obj1 is not None:
            out["obj1"] = self.obj1
            out["atts1"] = sorted(self.atts1)
        return out

    @staticmethod
    def from_json(data: dict) -> "LogicForm":
        return LogicForm(
            kind=data["kind"],
            obj0=data["obj0"],
            atts0=frozenset(data.get("atts0", ())),
            rel=data.get("rel"),
            abs=bool(data.get("abs", False)),
            obj1=data.get("obj1"),
            atts1=frozenset(data.get("atts1", ())),
        )


@dataclass(frozen=True)
class EntityMeta:
    """Groundable facts about one placed entity."""

    entity_id: str
    category: str
    synonyms: frozenset[str]
    attributes: AttributeSet


@dataclass(frozen=True)
class SceneMeta:
    """A layout plus the per-entity facts needed for grounding."""

    layout: SceneLayout
    entities: tuple[EntityMeta, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if len(self.entities) != len(self.layout.placements):
            raise ValueError("entity metadata does not match layout")

    @staticmethod
    def from_entities(layout: SceneLayout, entities: Sequence[Entity]) -> "SceneMeta":
        metas = tuple(
            EntityMeta(
                entity_id=e.id,
                category=e.category,
                synonyms=e.synonyms,
                attributes=e.attributes,
            )
            for e in entities
        )
        return SceneMeta(layout=layout, entities=metas)

    def clothes_phrases(self) -> frozenset[str]:
        return frozenset(
            m.attributes.clothes for m in self.entities
            if m.attributes.clothes is not None
        )
