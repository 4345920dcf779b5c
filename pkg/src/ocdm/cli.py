"""Command line entry point wiring generation, mining and export together.

Exit codes: 0 success, 1 input or validation problem, 2 internal error.
Errors are printed to stderr as ``code: message`` lines.  Every run writes
a ``manifest.json`` next to its outputs recording the command, the full
configuration, a content hash of the input log, the tool version and the
wall-clock duration.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import re
import sys
import time
from datetime import datetime
from pathlib import Path

from . import __version__
from .discovery import DiscoveredDrd, InvalidConfig, InvalidLog, MiningConfig, mine_dmn_models
from .docel import DocelError, parse_docel, validate_log, write_docel
from .export import drd_to_dot, drd_to_json, model_rules, rules_to_json, tree_to_dot
from .generators import (
    InvalidParams,
    PublicationParams,
    ShippingParams,
    generate_publication_log,
    generate_shipping_log,
)
from .learners import LearnerConfig

_SLUG = re.compile(r"[^0-9A-Za-z]+")


def _slug(text: str) -> str:
    return _SLUG.sub("-", text).strip("-")


# The run record never participates in content hashes, so a regenerated
# directory fingerprints identically regardless of when it was produced.
RUN_MANIFEST = "run_manifest.json"


def directory_fingerprint(directory: Path) -> str:
    """Content hash over (relative path, bytes) of every file, sorted."""
    digest = hashlib.sha256()
    for path in sorted(directory.rglob("*")):
        if path.is_file() and path.name != RUN_MANIFEST:
            digest.update(str(path.relative_to(directory)).encode("utf-8"))
            digest.update(b"\0")
            digest.update(path.read_bytes())
            digest.update(b"\0")
    return digest.hexdigest()


def _write_manifest(
    out_dir: Path,
    command: str,
    config: dict,
    fingerprint: str,
    started: float,
    name: str = "manifest.json",
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "log_fingerprint": fingerprint,
        "tool_version": __version__,
        "wall_clock_seconds": round(time.monotonic() - started, 3),
    }
    (out_dir / name).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _mining_config(args: argparse.Namespace) -> MiningConfig:
    return MiningConfig(
        min_shift=args.min_shift,
        max_shift=args.max_shift,
        min_traceprop=args.min_traceprop,
        min_corr=args.min_corr,
        min_dev=args.min_dev,
        min_support=args.min_support,
        learner=LearnerConfig(),
        rng_seed=args.seed,
    )


def _add_mining_flags(parser: argparse.ArgumentParser) -> None:
    defaults = MiningConfig()
    parser.add_argument("--min-shift", type=float, default=defaults.min_shift)
    parser.add_argument("--max-shift", type=int, default=defaults.max_shift)
    parser.add_argument("--min-traceprop", type=float, default=defaults.min_traceprop)
    parser.add_argument("--min-corr", type=float, default=defaults.min_corr)
    parser.add_argument("--min-dev", type=float, default=defaults.min_dev)
    parser.add_argument("--min-support", type=float, default=defaults.min_support)
    parser.add_argument("--seed", type=int, default=defaults.rng_seed)


def _unique_name(base: str, used: set[str]) -> str:
    name = base
    k = 2
    while name in used:
        name = f"{base}_{k}"
        k += 1
    used.add(name)
    return name


def write_artifacts(
    drds: list[DiscoveredDrd], out_dir: Path, metadata: dict
) -> list[str]:
    """Write drd_*.json/.dot plus tree_*.dot and rules_*.json per decision."""
    written: list[str] = []
    used: set[str] = set()
    for drd in drds:
        top = drd.top
        base = _unique_name(
            f"{_slug(top.label)}_{_slug(top.activity)}_{_slug(top.object_type)}", used
        )
        (out_dir / f"drd_{base}.json").write_text(
            drd_to_json(drd, metadata), encoding="utf-8"
        )
        (out_dir / f"drd_{base}.dot").write_text(drd_to_dot(drd), encoding="utf-8")
        written += [f"drd_{base}.json", f"drd_{base}.dot"]
        for node in sorted(drd.models):
            model = drd.models[node]
            leaf = f"{base}__{_slug(node.label)}"
            (out_dir / f"tree_{leaf}.dot").write_text(
                tree_to_dot(
                    model.tree, model.dataset.encodings, model.dataset.target_encoding
                ),
                encoding="utf-8",
            )
            (out_dir / f"rules_{leaf}.json").write_text(
                rules_to_json(model_rules(model)), encoding="utf-8"
            )
            written += [f"tree_{leaf}.dot", f"rules_{leaf}.json"]
    return written


def _cmd_generate(args: argparse.Namespace) -> int:
    started = time.monotonic()
    out_dir = Path(args.out)
    if args.process == "publication":
        params = PublicationParams(
            max_authors=args.authors,
            max_publishers=args.publishers,
            num_books=args.books,
            prob_compliance=args.prob_compliance,
            publication_threshold=args.publication_threshold,
            max_published_books=args.max_published_books,
            rng_seed=args.seed,
        )
        log = generate_publication_log(params)
    else:
        params = ShippingParams(
            num_customers=args.customers,
            num_orders=args.orders,
            product_value=args.product_value,
            order_value_threshold=args.order_value_threshold,
            prob_refund=args.prob_refund,
            max_order_quantity=args.max_order_quantity,
            rng_seed=args.seed,
        )
        log = generate_shipping_log(params)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_docel(log, out_dir)
    config = dataclasses.asdict(params)
    config["start_time"] = params.start_time.isoformat()
    # The DOCEL directory already owns manifest.json (the schema manifest),
    # so the run record goes to run_manifest.json here.
    _write_manifest(
        out_dir,
        f"generate {args.process}",
        config,
        directory_fingerprint(out_dir),
        started,
        name=RUN_MANIFEST,
    )
    print(f"wrote {len(log.events)} events to {out_dir}")
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    started = time.monotonic()
    log_dir = Path(args.log)
    out_dir = Path(args.out)
    log = parse_docel(log_dir)
    report = validate_log(log)
    if report.errors:
        for issue in report.errors[:20]:
            print(f"{issue.code}: {issue.message} [{issue.location}]", file=sys.stderr)
        return 1
    config = _mining_config(args)
    drds = mine_dmn_models(log, config)
    out_dir.mkdir(parents=True, exist_ok=True)
    fingerprint = directory_fingerprint(log_dir)
    metadata = {
        "config": {
            "min_shift": config.min_shift,
            "max_shift": config.max_shift,
            "min_traceprop": config.min_traceprop,
            "min_corr": config.min_corr,
            "min_dev": config.min_dev,
            "min_support": config.min_support,
            "rng_seed": config.rng_seed,
        },
        "log_fingerprint": fingerprint,
        "tool_version": __version__,
    }
    written = write_artifacts(drds, out_dir, metadata)
    _write_manifest(out_dir, "mine", metadata["config"], fingerprint, started)
    print(f"discovered {len(drds)} decision diagrams; wrote {len(written)} artifacts")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    """Re-render the DOT view of a previously mined drd_*.json document."""
    started = time.monotonic()
    source = Path(args.drd)
    if not source.is_file():
        print(f"MissingFile: {source}", file=sys.stderr)
        return 1
    document = json.loads(source.read_text(encoding="utf-8"))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    nodes = {n["label"]: n for n in document["nodes"]}
    ids = {label: f"n{i}" for i, label in enumerate(sorted(nodes))}
    lines = ["digraph drd {", "  rankdir=BT;"]
    for label in sorted(nodes):
        node = nodes[label]
        text = f"{label}\\n{node['activity']}\\n{node['object_type']}"
        style = "shape=box" if node["kind"] == "decision" else "shape=box, style=rounded"
        lines.append(f'  {ids[label]} [label="{text}", {style}];')
    for edge in sorted(
        document["edges"], key=lambda e: (e["from"], e["to"], e["supporting_objects"])
    ):
        lines.append(
            f'  {ids[edge["from"]]} -> {ids[edge["to"]]} [label="{edge["supporting_objects"]}"];'
        )
    lines.append("}")
    target = out_dir / (source.stem + ".dot")
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(out_dir, "export", {"drd": str(source)}, "", started)
    print(f"wrote {target}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocdm",
        description=(
            "Discover decision structure and decision logic from data-aware"
            " object-centric event logs, and generate the synthetic logs to"
            " validate the discovery."
        ),
    )
    parser.add_argument("--version", action="version", version=f"ocdm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic DOCEL log")
    gen_sub = gen.add_subparsers(dest="process", required=True)

    pub = gen_sub.add_parser("publication", help="book publication process")
    pub.add_argument("--books", type=int, default=100)
    pub.add_argument("--authors", type=int, default=100)
    pub.add_argument("--publishers", type=int, default=100)
    pub.add_argument("--prob-compliance", type=float, default=0.7)
    pub.add_argument("--publication-threshold", type=int, default=5)
    pub.add_argument("--max-published-books", type=int, default=9)
    pub.add_argument("--seed", type=int, default=42)
    pub.add_argument("--out", required=True)
    pub.set_defaults(handler=_cmd_generate)

    ship = gen_sub.add_parser("shipping", help="order shipping process")
    ship.add_argument("--orders", type=int, default=150)
    ship.add_argument("--customers", type=int, default=50)
    ship.add_argument("--product-value", type=float, default=40.0)
    ship.add_argument("--order-value-threshold", type=float, default=100.0)
    ship.add_argument("--prob-refund", type=float, default=0.15)
    ship.add_argument("--max-order-quantity", type=int, default=3)
    ship.add_argument("--seed", type=int, default=42)
    ship.add_argument("--out", required=True)
    ship.set_defaults(handler=_cmd_generate)

    mine = sub.add_parser("mine", help="discover decision diagrams from a log")
    mine.add_argument("--log", required=True)
    mine.add_argument("--out", required=True)
    _add_mining_flags(mine)
    mine.set_defaults(handler=_cmd_mine)

    export = sub.add_parser("export", help="re-render DOT from a drd_*.json")
    export.add_argument("--drd", required=True)
    export.add_argument("--out", required=True)
    export.set_defaults(handler=_cmd_export)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (DocelError,) as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except (InvalidConfig, InvalidLog, InvalidParams) as exc:
        code = type(exc).__name__
        print(f"{code}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"InternalError: {exc!r}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
