"""Batch experiments: MD statistics of baseline models and real graphs, and
graph metrics of the MD generator, summarised over seeded replicates."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .generator import GeneratorConfig, generate
from .graph import Graph, degrees, from_edge_list, metrics
from .md import md_stats, modular_decomposition
from .samplers import ba_graph, derive_rng, er_graph

KINDS = ("er-sweep", "ba", "md-generator", "real-graph")


def load_zachary() -> Graph:
    text = resources.files("mdgraph.data").joinpath("zachary.edges").read_text()
    return from_edge_list(text, one_based=True)


def load_reference_config(alpha: float | None = None, n: int | None = None) -> GeneratorConfig:
    doc = json.loads(resources.files("mdgraph.data").joinpath("reference_config.json").read_text())
    if n is not None:
        doc["n"] = n
    if alpha is not None:
        doc["child_law"]["prime"]["alpha"] = alpha
    return GeneratorConfig.from_dict(doc)


@dataclass
class ExperimentSpec:
    kind: str
    params: dict = field(default_factory=dict)
    replicates: int = 50
    seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        path = self.params.get("input")
        if path is not None and not Path(path).exists():
            raise FileNotFoundError(path)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        return cls(
            kind=doc["kind"],
            params=dict(doc.get("params", {})),
            replicates=int(doc.get("replicates", 50)),
            seed=int(doc.get("seed", 0)),
            out_dir=doc.get("out_dir"),
        )


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[dict]
    summary: list[dict]
    degree_histogram: list[dict] = field(default_factory=list)
    ccdf: list[dict] = field(default_factory=list)
    tail: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def summary_for(self, group: str) -> dict[str, dict]:
        return {r["statistic"]: r for r in self.summary if r["group"] == group}


# ---------------------------------------------------------------------------
# Replicates
# ---------------------------------------------------------------------------

def _md_row(g: Graph) -> dict:
    stats = md_stats(modular_decomposition(g))
    row = stats.as_row()
    row["num_edges"] = g.num_edges
    return row


def _groups(spec: ExperimentSpec) -> list[tuple[str, dict]]:
    p = spec.params
    if spec.kind == "er-sweep":
        return [(f"p={prob}", {"n": int(p.get("n", 50)), "p": float(prob)}) for prob in p.get("ps", [0.01, 0.05, 0.5])]
    if spec.kind == "ba":
        return [(f"m={int(p.get('m_steps', 1))}", {"n": int(p.get("n", 50)), "m": int(p.get("m_steps", 1))})]
    if spec.kind == "md-generator":
        cfg = _generator_config(p)
        return [(f"alpha={_alpha(cfg)}", {"config": cfg.to_dict()})]
    return [(Path(p["input"]).name if "input" in p else "zachary", dict(p))]


def _generator_config(p: dict) -> GeneratorConfig:
    if "config" in p:
        doc = p["config"]
        if isinstance(doc, str):
            doc = json.loads(Path(doc).read_text())
        cfg = GeneratorConfig.from_dict(doc)
        if "n" in p:
            cfg = cfg.with_(n=int(p["n"]))
        return cfg
    return load_reference_config(alpha=p.get("alpha", 0.08), n=int(p.get("n", 100)))


def _alpha(cfg: GeneratorConfig):
    law = getattr(cfg.child_law, "prime", cfg.child_law)
    return getattr(law, "alpha", "na")


def _replicate(kind: str, params: dict, seed: int, group_index: int, index: int) -> tuple[dict, list[int]]:
    rng = derive_rng(seed, group_index, index)
    if kind == "er-sweep":
        return _md_row(er_graph(params["n"], params["p"], rng)), []
    if kind == "ba":
        return _md_row(ba_graph(params["n"], params["m"], rng)), []
    if kind == "md-generator":
        sample = generate(GeneratorConfig.from_dict(params["config"]), rng)
        row = metrics(sample.graph).as_row()
        stats = md_stats(sample.tree)
        row.update({f"md_{k}": v for k, v in stats.as_row().items()})
        return row, degrees(sample.graph)
    if "input" in params:
        text = Path(params["input"]).read_text()
        g = from_edge_list(text, one_based=bool(params.get("one_based", False)), drop_loops=bool(params.get("drop_loops", False)))
    else:
        g = load_zachary()
    row = _md_row(g)
    row.update({k: v for k, v in metrics(g).as_row().items() if k not in row})
    return row, degrees(g)


def _summarize(rows: list[dict]) -> list[dict]:
    out = []
    groups = list(dict.fromkeys(r["group"] for r in rows))
    for group in groups:
        sub = [r for r in rows if r["group"] == group]
        keys = [k for k in sub[0] if k not in ("group", "replicate")]
        for key in keys:
            vals = [r[key] for r in sub]
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals if v is not None):
                continue
            vals = [float(v) for v in vals if v is not None]
            if not vals:
                continue
            sd = float(np.std(vals, ddof=1)) if len(vals) > 1 else float("nan")
            out.append({"group": group, "statistic": key, "mean": float(np.mean(vals)), "sd": sd, "count": len(vals)})
    return out


def degree_tables(degs: list[int], tail_fraction: float = 0.5) -> tuple[list[dict], list[dict], list[dict], float | None]:
    """Histogram, CCDF P(D >= d) and the log-log upper tail with its fitted slope.

    The tail holds the degrees whose CCDF is at most ``tail_fraction``.
    """
    hist = sorted(Counter(degs).items())
    total = len(degs)
    rows_h = [{"degree": d, "count": c, "fraction": c / total} for d, c in hist]
    ccdf = []
    remaining = total
    for d, c in hist:
        ccdf.append({"degree": d, "ccdf": remaining / total})
        remaining -= c
    tail = [
        {"degree": r["degree"], "log10_degree": math.log10(r["degree"]), "log10_ccdf": math.log10(r["ccdf"])}
        for r in ccdf
        if r["degree"] > 0 and r["ccdf"] <= tail_fraction
    ]
    slope = None
    if len(tail) >= 2:
        slope = float(np.polyfit([t["log10_degree"] for t in tail], [t["log10_ccdf"] for t in tail], 1)[0])
    return rows_h, ccdf, tail, slope


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ExperimentResult:
    reps = 1 if spec.kind == "real-graph" else spec.replicates
    tasks = [
        (spec.kind, params, spec.seed, gi, i)
        for gi, (_, params) in enumerate(_groups(spec))
        for i in range(reps)
    ]
    names = [name for name, _ in _groups(spec) for _ in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_replicate, *zip(*tasks)))
    else:
        outputs = [_replicate(*t) for t in tasks]
    rows = []
    pooled: list[int] = []
    for name, (kind, _, _, _, i), (row, degs) in zip(names, tasks, outputs):
        rows.append({"group": name, "replicate": i, **row})
        pooled.extend(degs)
    result = ExperimentResult(spec=spec, rows=rows, summary=_summarize(rows))
    result.info = {"kind": spec.kind, "seed": spec.seed, "replicates": reps, "groups": [n for n, _ in _groups(spec)]}
    if spec.kind == "md-generator":
        result.info["n"] = _generator_config(spec.params).n
        result.info["config"] = _groups(spec)[0][1]["config"]
    if pooled:
        result.degree_histogram, result.ccdf, result.tail, slope = degree_tables(pooled)
        result.info["tail_slope"] = slope
    if spec.out_dir:
        write_outputs(result, Path(spec.out_dir))
    return result


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    fields = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})
    return buf.getvalue()


def write_outputs(result: ExperimentResult, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    tables = {
        "replicates.csv": result.rows,
        "summary.csv": result.summary,
        "degree_histogram.csv": result.degree_histogram,
        "degree_ccdf.csv": result.ccdf,
        "degree_tail_loglog.csv": result.tail,
    }
    for name, rows in tables.items():
        if rows:
            path = out_dir / name
            path.write_text(to_csv(rows))
            written.append(path)
    info = dict(result.info)
    info["spec"] = asdict(result.spec)
    path = out_dir / "experiment.json"
    path.write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written
