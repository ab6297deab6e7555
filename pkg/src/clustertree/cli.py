"""Command-line interface.

Exit codes: 0 success, 1 schema violation in an input document, 2 failed
precondition (bad arguments, density not in the required class, ...),
3 internal invariant breach.  Set ``CLUSTERTREE_LOG=debug`` or ``info``
for diagnostics on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from ._files import atomic_write_text
from .axioms import is_cluster_tree, verify_cluster
from .discretizer import DensitySpec, convergence_experiment, discretize
from .exceptions import InvariantError, PreconditionError, SchemaError
from .fixtures import write_fixtures
from .level_tree import (
    SCHEMA_VERSION,
    axiom_tree,
    export_forest,
    export_tree,
    forest_from_json,
    hartigan_tree,
    sweep_forest,
    tree_from_json,
)
from .merge_metric import merge_distortion
from .regions import complex_from_json, export_complex

log = logging.getLogger("clustertree")

EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_INVARIANT = 1, 2, 3


def _read(path) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, output) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(output, text)


def _input(args):
    path = args.input_path or args.input
    if path is None:
        raise PreconditionError("no input given (positional path or --input)")
    return path


def _tree_format(args) -> str:
    fmt = args.format or "json"
    if fmt not in ("json", "dot"):
        raise PreconditionError(f"--format {fmt} is not available for trees")
    return fmt


def _load_tree(text, complex=None):
    doc = json.loads(text) if text.strip() else None
    if isinstance(doc, dict) and "trees" in doc:
        return forest_from_json(doc, complex)
    return tree_from_json(text, complex)


# -- subcommands ----------------------------------------------------------------


def cmd_hartigan(args) -> None:
    cx = complex_from_json(_read(_input(args)))
    _emit(export_tree(hartigan_tree(cx), _tree_format(args)), args.output)


def cmd_axiom_tree(args) -> None:
    cx = complex_from_json(_read(_input(args)))
    _emit(export_tree(axiom_tree(cx), _tree_format(args)), args.output)


def cmd_forest(args) -> None:
    cx = complex_from_json(_read(_input(args)))
    _emit(export_forest(sweep_forest(cx, args.adjacency), _tree_format(args)), args.output)


def cmd_verify(args) -> None:
    doc = json.loads(_read(_input(args)))
    cx = complex_from_json(doc)
    if args.clusters is not None:
        doc = json.loads(_read(args.clusters))
    if not isinstance(doc, dict) or "clusters" not in doc:
        raise SchemaError("verify needs a 'clusters' array (in the complex file or via --clusters)")
    try:
        clusters = [[int(r) for r in c] for c in doc["clusters"]]
    except (TypeError, ValueError):
        raise SchemaError("'clusters' must be a list of id lists") from None
    try:
        verdicts = [verify_cluster(c, cx).to_dict() for c in clusters]
    except KeyError as exc:
        raise PreconditionError(f"cluster references an unknown region: {exc}") from None
    head = {
        "schema": SCHEMA_VERSION,
        "cluster_tree": is_cluster_tree(clusters),
        "all_pass": all(v["A1"] and v["A2"] and v["A3"] for v in verdicts),
    }
    rows = ",\n  ".join(json.dumps(v) for v in verdicts)
    _emit(json.dumps(head)[:-1] + f', "verdicts": [\n  {rows}\n]}}\n', args.output)


def cmd_compare(args) -> None:
    cx = complex_from_json(_read(args.complex)) if args.complex else None
    t1 = _load_tree(_read(args.tree1), cx)
    t2 = _load_tree(_read(args.tree2), cx)
    points = None
    if args.samples:
        if cx is None or cx.grid is None:
            raise PreconditionError("--samples needs --complex with cell geometry")
        lo, hi = _bounding_box(cx)
        points = np.random.default_rng(args.seed).uniform(lo, hi, size=(args.samples, cx.grid.dim))
    result = merge_distortion(t1, t2, points)
    out = {"schema": SCHEMA_VERSION, **result.to_dict()}
    if result.mode == "exact":
        out["d_M_exact"] = str(result.value)
    _emit(json.dumps(out) + "\n", args.output)


def _bounding_box(cx):
    boxes = [cx.grid.cell_box(c) for r in cx.regions for c in r.cells]
    lo = np.min([[float(v) for v in b.lower] for b in boxes], axis=0)
    hi = np.max([[float(v) for v in b.upper] for b in boxes], axis=0)
    return lo, hi


def cmd_discretize(args) -> None:
    spec = DensitySpec.from_json(_read(_input(args)))
    if args.scale is None:
        raise PreconditionError("discretize needs --scale")
    eta = args.eta if args.eta is not None else spec.default_eta(args.scale)
    disc = discretize(spec, eta, args.scale, args.samples_per_axis)
    text = export_complex(disc.complex)
    cert = {
        "eta": eta,
        "samples_per_axis": disc.samples_per_axis,
        "sup_norm_bound": disc.sup_norm_bound,
        "sampling_slack": disc.sampling_slack,
        "in_F_int": disc.in_F_int,
    }
    _emit(text.rstrip()[:-1] + f', "certificate": {json.dumps(cert)}}}\n', args.output)


def cmd_converge(args) -> None:
    spec = DensitySpec.from_json(_read(_input(args)))
    if args.format not in (None, "csv"):
        raise PreconditionError("converge writes CSV only")
    try:
        scales = [float(s) for s in args.scales.split(",")]
    except ValueError:
        raise PreconditionError(f"bad --scales {args.scales!r}") from None
    report = convergence_experiment(
        spec, scales, args.pair_samples, seed=args.seed, k=args.samples_per_axis, eta=args.eta
    )
    log.info("within bound: %s, d_M non-increasing: %s", report.within_bound, report.d_M_non_increasing)
    _emit(report.to_csv(), args.output)


def cmd_fixtures(args) -> None:
    target = args.directory or args.output or "."
    for path in write_fixtures(target):
        print(path)


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustertree",
        description="Cluster trees of piecewise-constant densities.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help, input=True):
        p = sub.add_parser(name, help=help, description=help)
        p.set_defaults(func=func)
        if input:
            p.add_argument("input_path", nargs="?", help="input JSON file ('-' for stdin)")
            p.add_argument("--input", help="same as the positional input")
        p.add_argument("--output", "-o", help="output file (default stdout)")
        p.add_argument("--format", choices=["json", "dot", "csv"])
        return p

    add("hartigan", cmd_hartigan, "Hartigan tree of a complex (touch-graph sweep)")
    add("axiom-tree", cmd_axiom_tree, "finest tree satisfying the axioms (neighbor-graph sweep)")
    p = add("forest", cmd_forest, "one sweep tree per connected component")
    p.add_argument("--adjacency", choices=["touch", "neighbor"], default="touch")

    p = add("verify", cmd_verify, "check axioms A1-A3 for each cluster")
    p.add_argument("--clusters", help='JSON file with {"clusters": [[ids], ...]}')

    p = add("compare", cmd_compare, "merge distortion distance between two trees", input=False)
    p.add_argument("tree1")
    p.add_argument("tree2")
    p.add_argument("--complex", help="complex both trees are defined on")
    p.add_argument("--samples", type=int, default=0, help="sample this many points instead of exact mode")
    p.add_argument("--seed", type=int, default=0)

    for name, func, help in (
        ("discretize", cmd_discretize, "piecewise-constant approximation of a density spec"),
        ("converge", cmd_converge, "convergence experiment over decreasing scales (CSV)"),
    ):
        p = add(name, func, help)
        p.add_argument("--eta", type=float)
        p.add_argument("--samples-per-axis", type=int, default=11)
        if name == "discretize":
            p.add_argument("--scale", type=float)
        else:
            p.add_argument("--scales", default="0.5,0.25,0.125,0.0625")
            p.add_argument("--pair-samples", type=int, default=1000)
            p.add_argument("--seed", type=int, default=0)

    p = add("fixtures", cmd_fixtures, "write the example complexes, trees and density specs", input=False)
    p.add_argument("directory", nargs="?")
    return parser


def _configure_logging() -> None:
    level = os.environ.get("CLUSTERTREE_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(level=getattr(logging, level.upper()), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except json.JSONDecodeError as exc:
        print(f"schema error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PreconditionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
