"""Command line entry point.

Subcommands: ingest, build, stats, eval, parse, ground, compose-preview.
Machine-readable output goes to stdout or files as JSON; diagnostics go to
stderr. Exit codes: 0 success, 1 validation error (usage, bad config),
2 data error (unreadable or inconsistent inputs). The FORGE_LOG
environment variable sets the log level and never affects outputs.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import builder as builder_mod
from . import catalog as catalog_mod
from . import grammar as grammar_mod
from . import metrics as metrics_mod
from . import raster
from .builder import BuildConfig, DatasetManifest
from .compose import composite, plan_layout
from .errors import ForgeError, UsageError
from .seeding import spawn_rng
from .tables import default_tables, load_tables


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # validation failures exit 1, not 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_meta(path: Path) -> list[dict]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("entities", [])
    if not isinstance(data, list):
        raise UsageError("metadata must be a list of records or {'entities': [...]}")
    return data


def _cmd_ingest(args) -> int:
    meta_path = Path(args.meta)
    tables = load_tables(args.tables) if args.tables else default_tables()
    entities = []
    for record in _load_meta(meta_path):
        base = meta_path.parent
        if "rgba" in record:
            rgb_path, alpha_path = base / record["rgba"], None
        else:
            rgb_path, alpha_path = base / record["rgb"], base / record["alpha"]
        entities.append(catalog_mod.load_entity(
            rgb_path, alpha_path, record,
            tables=tables, allow_unknown_category=args.allow_unknown,
        ))
    out = catalog_mod.write_catalog(entities, args.out)
    print(json.dumps({"catalog": str(out), "entities": len(entities)}))
    return 0


def _build_config(args) -> tuple[BuildConfig, dict]:
    file_cfg: dict = {}
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    paths = {
        "catalog": args.catalog or file_cfg.pop("catalog", None),
        "backgrounds": args.backgrounds or file_cfg.pop("backgrounds", None),
        "tables": args.tables or file_cfg.pop("tables", None),
    }
    if args.seed is not None:
        file_cfg["master_seed"] = args.seed
    if "master_seed" not in file_cfg:
        raise UsageError("a seed is required (--seed or master_seed in the config)")
    if args.workers is not None:
        file_cfg["workers"] = args.workers
    try:
        config = BuildConfig.from_json(file_cfg)
    except TypeError as err:
        raise UsageError(f"bad config: {err}") from None
    if not paths["catalog"] or not paths["backgrounds"]:
        raise UsageError("--catalog and --backgrounds (or config entries) are required")
    return config, paths


def _cmd_build(args) -> int:
    config, paths = _build_config(args)
    tables = load_tables(paths["tables"]) if paths["tables"] else None
    entities = catalog_mod.read_catalog(paths["catalog"])
    backgrounds = builder_mod.load_backgrounds(paths["backgrounds"])
    manifest = builder_mod.build_dataset(
        config, entities, backgrounds, out_dir=args.out, tables=tables,
    )
    print(json.dumps({
        "manifest": str(Path(args.out) / "manifest.json"),
        "images": len(manifest.images),
        "skipped_attempts": len(manifest.skipped),
    }))
    return 0


def _cmd_stats(args) -> int:
    manifest = DatasetManifest.load(args.manifest)
    report = builder_mod.stats(manifest, split=args.split)
    if args.out:
        report.write(args.out)
    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return 0


def _cmd_eval(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = DatasetManifest.load(manifest_path)
    report = metrics_mod.evaluate_run(
        args.pred, manifest,
        setting=args.setting,
        sad_scale=args.scale,
        manifest_dir=manifest_path.parent,
    )
    if args.out:
        report.write(args.out)
    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return 0


def _cmd_parse(args) -> int:
    tables = load_tables(args.tables) if args.tables else None
    vocab = grammar_mod.Vocabulary.build(tables=tables)
    logic = grammar_mod.Grammar(vocab).parse(args.expr)
    print(json.dumps(logic.to_json(), indent=2, sort_keys=True))
    return 0


def _cmd_ground(args) -> int:
    manifest = DatasetManifest.load(args.manifest)
    image = next((im for im in manifest.images if im.image_id == args.image), None)
    if image is None:
        raise UsageError(f"image {args.image!r} not in manifest")
    scene = image.scene_meta()
    tables = load_tables(args.tables) if args.tables else None
    logic = grammar_mod.Grammar.for_scene(scene, tables).parse(args.expr)
    hits = grammar_mod.ground(logic, scene)
    print(json.dumps({
        "logic": logic.to_json(),
        "entities": sorted(hits),
    }, indent=2, sort_keys=True))
    return 0


def _cmd_compose_preview(args) -> int:
    entities = catalog_mod.read_catalog(args.catalog)
    by_id = {e.id: e for e in entities}
    try:
        chosen = [by_id[i] for i in args.ids.split(",")]
    except KeyError as err:
        raise UsageError(f"unknown entity id {err.args[0]!r}") from None
    background = raster.load_rgb(args.background)
    canvas = (background.shape[1], background.shape[0])
    rng = spawn_rng(args.seed, "compose-preview")
    layout = plan_layout(chosen, args.relation, canvas, rng)
    result = composite(layout, background, chosen)
    out = Path(args.out)
    raster.save_rgb(out / "composite.png", raster.quantize_rgb(result.image))
    for entity, visible in zip(chosen, result.visible_alphas):
        raster.save_alpha(out / "mattes" / f"{entity.id}.png", visible)
    (out / "layout.json").write_text(
        json.dumps(layout.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(json.dumps({"out": str(out), "layout": layout.to_json()}))
    return 0


def _make_parser() -> _Parser:
    parser = _Parser(prog="forge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and annotate entity assets")
    p.add_argument("--meta", required=True, help="entity metadata JSON")
    p.add_argument("--tables", help="category tables JSON override")
    p.add_argument("--allow-unknown", action="store_true",
                   help="register categories missing from the tables")
    p.add_argument("--out", required=True, help="catalog output directory")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("build", help="build a dataset from a catalog")
    p.add_argument("--config", help="forge.json (BuildConfig fields)")
    p.add_argument("--seed", type=int, help="master seed (required here or in config)")
    p.add_argument("--catalog", help="catalog.json from ingest")
    p.add_argument("--backgrounds", help="directory of background PNGs")
    p.add_argument("--tables", help="category tables JSON override")
    p.add_argument("--workers", type=int, help="parallel slots (never changes output)")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("stats", help="tally a built manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=["train", "test"])
    p.add_argument("--out", help="directory for stats.json and frequency CSVs")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("eval", help="score predicted mattes against a manifest")
    p.add_argument("--pred", required=True, help="directory of predicted mattes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--setting", choices=["keyword", "expression"],
                   default="expression")
    p.add_argument("--scale", type=float, default=metrics_mod.DEFAULT_SAD_SCALE,
                   help="reporting scale applied to raw SAD")
    p.add_argument("--out", help="report JSON path (CSV written alongside)")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("parse", help="parse one expression to its logic form")
    p.add_argument("--expr", required=True)
    p.add_argument("--tables", help="category tables JSON (for category words)")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("ground", help="resolve an expression against one image")
    p.add_argument("--expr", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--image", required=True, help="image id inside the manifest")
    p.add_argument("--tables")
    p.set_defaults(func=_cmd_ground)

    p = sub.add_parser("compose-preview", help="render one composite for inspection")
    p.add_argument("--catalog", required=True)
    p.add_argument("--ids", required=True, help="comma-separated entity ids (2 or 3)")
    p.add_argument("--relation", required=True,
                   choices=["left", "right", "top", "bottom", "in_front_of", "behind"])
    p.add_argument("--background", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compose_preview)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.environ.get("FORGE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ForgeError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
