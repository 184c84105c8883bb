"""Command-line interface: ``mdgraph <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import checks
from .experiments import ExperimentSpec, load_zachary, run_experiment
from .generator import ConfigError, GeneratorConfig, generate
from .graph import GraphError, from_edge_list, metrics, to_edge_list, to_json
from .md import (
    TreeError,
    largest_prime_node,
    md_stats,
    modular_decomposition,
    prime_subgraph_dot,
    tree_to_dict,
    tree_to_dot,
    tree_to_json,
)
from .samplers import ba_graph, derive_rng, er_graph, sample_prime_uniform

CONVENTIONS = "local clustering of vertices with degree < 2 is 0; diameter of a disconnected graph is that of its largest component"


def _default_seed() -> int:
    return int(os.environ.get("MDGRAPH_SEED", "0"))


def _read_graph(path: str, args):
    if path == "zachary":
        return load_zachary()
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return from_edge_list(text, one_based=args.one_based, drop_loops=args.drop_loops)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_decompose(args) -> int:
    g = _read_graph(args.input, args)
    tree = modular_decomposition(g)
    stats = md_stats(tree)
    doc = {"n": g.n, "num_edges": g.num_edges, "stats": stats.as_row(), "tree": tree_to_dict(tree)}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if args.dot_tree:
        Path(args.dot_tree).write_text(tree_to_dot(tree, one_based=args.one_based))
    if args.dot_prime:
        node = largest_prime_node(tree)
        if node is None:
            print("no prime node; --dot-prime skipped", file=sys.stderr)
        else:
            Path(args.dot_prime).write_text(prime_subgraph_dot(node, one_based=args.one_based))
    return 0


def cmd_metrics(args) -> int:
    g = _read_graph(args.input, args)
    report = metrics(g)
    doc = asdict(report)
    doc["degree_histogram"] = {str(k): v for k, v in report.degree_histogram.items()}
    doc["conventions"] = CONVENTIONS
    print(json.dumps(doc, indent=2))
    return 0


def cmd_generate(args) -> int:
    cfg = GeneratorConfig.from_json(Path(args.config).read_text())
    if args.n is not None:
        cfg = cfg.with_(n=args.n)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg.seed is not None else _default_seed())
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        sample = generate(cfg, derive_rng(seed, i))
        if out_dir:
            (out_dir / f"sample_{i:04d}.graph.json").write_text(to_json(sample.graph) + "\n")
            (out_dir / f"sample_{i:04d}.tree.json").write_text(tree_to_json(sample.tree) + "\n")
            (out_dir / f"sample_{i:04d}.edges").write_text(to_edge_list(sample.graph))
        else:
            print(json.dumps({"index": i, "graph": json.loads(to_json(sample.graph)), "tree": tree_to_dict(sample.tree)}))
    if out_dir:
        print(f"wrote {args.count} samples to {out_dir}")
    return 0


def cmd_sample(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        rng = derive_rng(seed, i)
        if args.model == "er":
            g = er_graph(args.n, args.p, rng)
        elif args.model == "ba":
            g = ba_graph(args.n, args.m_steps, rng)
        else:
            g = sample_prime_uniform(args.n, rng)
        if out_dir:
            (out_dir / f"{args.model}_{i:04d}.edges").write_text(to_edge_list(g))
        else:
            print(to_json(g))
    return 0


def cmd_experiment(args) -> int:
    if args.spec:
        spec = ExperimentSpec.from_dict(json.loads(Path(args.spec).read_text()))
        if args.out_dir:
            spec.out_dir = args.out_dir
    else:
        if not args.kind:
            raise SystemExit("experiment: give --spec or --kind")
        params = {}
        if args.n is not None:
            params["n"] = args.n
        if args.p:
            params["ps"] = [float(x) for x in args.p.split(",")]
        if args.m_steps is not None:
            params["m_steps"] = args.m_steps
        if args.config:
            params["config"] = args.config
        if args.alpha is not None:
            params["alpha"] = args.alpha
        if args.input:
            params["input"] = args.input
            params["one_based"] = args.one_based
        seed = args.seed if args.seed is not None else _default_seed()
        spec = ExperimentSpec(args.kind, params, args.replicates, seed, args.out_dir)
    result = run_experiment(spec, jobs=args.jobs)
    for row in result.summary:
        print(f"{row['group']:>14}  {row['statistic']:<28} mean={row['mean']:.4g}  sd={row['sd']:.4g}  N={row['count']}")
    if spec.out_dir:
        print(f"outputs in {spec.out_dir}")
    return 0


def cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    claims = None if args.all or not args.claim else args.claim
    reports = checks.run_checks(claims, seed=seed)
    for r in reports:
        print(r.summary_line())
    if args.json_out:
        Path(args.json_out).write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    return 0 if all(r.verdict for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_input(p):
        p.add_argument("input", nargs="?", help="edge-list file, '-' for stdin, or 'zachary'")
        p.add_argument("--in", dest="input_opt", help="edge-list file (alternative to the positional)")
        p.add_argument("--one-based", action="store_true", help="vertex ids start at 1")
        p.add_argument("--drop-loops", action="store_true", help="silently remove self-loops")

    p = sub.add_parser("decompose", help="modular decomposition of an edge list")
    graph_input(p)
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--dot-tree", help="write the MD tree as DOT")
    p.add_argument("--dot-prime", help="write the largest prime node's graph as DOT")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("metrics", help="density, distances and clustering of an edge list")
    graph_input(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("generate", help="sample graphs from the MD generator")
    p.add_argument("--config", required=True, help="generator config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--n", type=int, help="override the config's vertex count")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="baseline random graphs")
    p.add_argument("model", choices=["er", "ba", "prime"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--m-steps", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", help="output directory for edge lists (default: JSON lines on stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("experiment", help="replicated experiments with CSV output")
    p.add_argument("--spec", help="experiment spec JSON")
    p.add_argument("--kind", choices=["er-sweep", "ba", "md-generator", "real-graph"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", help="comma-separated edge probabilities (er-sweep)")
    p.add_argument("--m-steps", type=int)
    p.add_argument("--config", help="generator config JSON (md-generator)")
    p.add_argument("--alpha", type=float, help="prime power-law exponent for the reference config")
    p.add_argument("--input", help="edge list (real-graph); defaults to the Zachary fixture")
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("check", help="Monte-Carlo checks of the generator's properties")
    p.add_argument("--all", action="store_true")
    p.add_argument("--claim", action="append", choices=sorted(checks.CLAIMS))
    p.add_argument("--seed", type=int)
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "input_opt"):
        args.input = args.input_opt or args.input
        if not args.input:
            parser.error(f"{args.command}: an input edge list is required")
    if args.command == "check" and not (args.all or args.claim):
        parser.error("check: give --all or --claim")
    try:
        return args.func(args)
    except (GraphError, TreeError, ConfigError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"mdgraph {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
