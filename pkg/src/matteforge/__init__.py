"""matteforge: a deterministic forge for referring-image-matting datasets.

Composites foreground/alpha assets into scenes with provable position
relationships, emits keyword and expression annotations whose unique
grounding is machine-verified, and scores predicted alpha mattes with the
SAD/MSE/MAD metric family in entity- and image-averaged variants.
"""

from .builder import (
    Background,
    BuildConfig,
    DatasetManifest,
    balance,
    build_dataset,
    filter_keyword_setting,
    load_backgrounds,
    make_groups,
    sample_relation,
    stats,
)
from .catalog import AttributeSet, Entity, annotate_flags, build_entity, load_entity
from .colors import annotate_color, nearest_color_name
from .compose import (
    CompositeResult,
    Placement,
    SceneLayout,
    composite,
    eval_relation,
    plan_layout,
    recomposite,
)
from .errors import ForgeError
from .expressions import ExpressionRecord, generate, generate_suite, keyword_for
from .grammar import Grammar, Vocabulary, ground, parse
from .logic import LogicForm, SceneMeta
from .metrics import aggregate, entity_metrics, evaluate_run
from .seeding import spawn_rng
from .tables import (
    CategoryTables,
    WordBags,
    age_to_group,
    default_tables,
    default_word_bags,
    load_tables,
    load_word_bags,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSet", "Background", "BuildConfig", "CategoryTables",
    "CompositeResult", "DatasetManifest", "Entity", "ExpressionRecord",
    "ForgeError", "Grammar", "LogicForm", "Placement", "SceneLayout",
    "SceneMeta", "Vocabulary", "WordBags", "age_to_group", "aggregate", "annotate_color",
    "annotate_flags", "balance", "build_dataset", "build_entity", "composite",
    "default_tables", "entity_metrics", "eval_relation", "evaluate_run",
    "filter_keyword_setting", "generate", "generate_suite", "ground",
    "default_word_bags", "keyword_for", "load_backgrounds", "load_entity",
    "load_tables", "load_word_bags",
    "make_groups", "nearest_color_name", "parse", "plan_layout",
    "recomposite", "sample_relation", "spawn_rng", "stats",
]
