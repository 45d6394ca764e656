"""End-to-end corpus pipeline with deterministic outputs.

A run ingests a corpus, computes every per-paper measure, fits the default
regression battery (or an explicit spec file), aggregates yearly trends, and
writes CSV tables plus a parameter/digest manifest into the output
directory. Reruns over identical inputs produce byte-identical directories;
nothing written here carries a timestamp.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, fields as dataclass_fields

from . import centrality as centrality_mod
from . import cooccurrence as cooccur_mod
from . import novelty as novelty_mod
from .errors import ClaimGraphError, CollinearityError, SchemaError
from .graphs import DEFAULT_PATH_CAP, build_graph, complexity_measures
from .ingest import (
    DEFAULT_MAX_YEAR,
    DEFAULT_MIN_YEAR,
    Diagnostic,
    load_outcome_table,
    load_rank_table,
    merge_outcomes,
    parse_corpus_file,
)
from .model import PaperRecord
from .regression import OUTCOMES, RegressionSpec, load_spec_file, run_spec
from .tableio import write_csv, write_csv_dicts
from .trends import aggregate_trends

__version__ = "0.1.0"

NOVELTY_VIEWS = ("full", "causal")
GAP_VIEWS = ("full", "causal")
CENTRALITY_VIEWS = ("full", "causal", "noncausal")

CENTRALITY_STATS = ("mean_eigen", "var_eigen", "mean_pagerank", "var_pagerank")

DEFAULT_BATTERY_MEASURES = (
    "prop_causal_edges",
    "num_unique_paths_full",
    "longest_path_full",
    "source_sink_full",
    "prop_novel_edges_full",
    "prop_novel_paths_full",
    "prop_novel_subgraphs_full",
    "gap_prop_full",
    "z_mean_eigen_full",
    "z_var_eigen_full",
    "z_mean_pagerank_full",
    "z_var_pagerank_full",
)


class PipelineStageError(ClaimGraphError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineConfig:
    corpus: str = ""
    outcomes: list[str] = field(default_factory=list)
    ranks: str = ""
    specs: str = ""
    default_tier: str = "Unpublished"
    strict: bool = False
    min_year: int = DEFAULT_MIN_YEAR
    max_year: int = DEFAULT_MAX_YEAR
    path_len: int = novelty_mod.DEFAULT_PATH_LEN
    subgraph_size: int = novelty_mod.DEFAULT_SUBGRAPH_SIZE
    tau: int = cooccur_mod.DEFAULT_TAU
    epsilon: float = 1e-9
    damping: float = centrality_mod.DEFAULT_DAMPING
    tol: float = centrality_mod.DEFAULT_TOL
    max_iter: int = centrality_mod.DEFAULT_MAX_ITER
    path_cap: int = DEFAULT_PATH_CAP
    subset_cap: int = novelty_mod.DEFAULT_SUBSET_CAP


_BOOL_KEYS = {"strict"}
_INT_KEYS = {"min_year", "max_year", "path_len", "subgraph_size", "tau",
             "max_iter", "path_cap", "subset_cap"}
_FLOAT_KEYS = {"epsilon", "damping", "tol"}
_PATH_KEYS = {"corpus", "ranks", "specs"}


def parse_config_text(text: str, base_dir: str = ".") -> PipelineConfig:
    """Parse a plain key=value config; '#' starts a comment. Relative paths
    resolve against the config file's directory."""
    known = {f.name for f in dataclass_fields(PipelineConfig)}
    config = PipelineConfig()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or key not in known:
            raise SchemaError(f"bad config line {raw!r}", line_no=line_no)
        if key == "outcomes":
            config.outcomes = [os.path.join(base_dir, p.strip())
                               for p in value.split(",") if p.strip()]
        elif key in _PATH_KEYS:
            setattr(config, key, os.path.join(base_dir, value) if value else "")
        elif key in _BOOL_KEYS:
            setattr(config, key, value.lower() in ("1", "true", "yes"))
        elif key in _INT_KEYS:
            setattr(config, key, int(value))
        elif key in _FLOAT_KEYS:
            setattr(config, key, float(value))
        else:
            setattr(config, key, value)
    if not config.corpus:
        raise SchemaError("config is missing corpus=")
    return config


def parse_config_file(path: str) -> PipelineConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base_dir=os.path.dirname(path) or ".")


MEASURE_COLUMNS: list[str] = (
    ["paper_id", "year", "pub_tier", "citations", "outcome_source",
     "num_edges", "num_causal_edges", "prop_causal_edges",
     "num_unique_paths_full", "longest_path_full",
     "num_unique_paths_causal", "longest_path_causal",
     "num_unique_paths_noncausal", "longest_path_noncausal",
     "source_sink_full", "source_sink_causal", "source_sink_noncausal"]
    + [f"{base}_{view}" for view in NOVELTY_VIEWS
       for base in ("num_novel_edges", "prop_novel_edges",
                    "num_novel_paths", "prop_novel_paths",
                    "num_novel_subgraphs", "prop_novel_subgraphs")]
    + [f"gap_prop_{view}" for view in GAP_VIEWS]
    + [f"{stat}_{view}" for view in CENTRALITY_VIEWS for stat in CENTRALITY_STATS]
    + [f"z_{stat}_{view}" for view in CENTRALITY_VIEWS for stat in CENTRALITY_STATS]
)


def compute_measure_rows(records: list[PaperRecord],
                         config: PipelineConfig) -> list[dict]:
    """One wide dict per record, in input order, None marking missing."""
    rows: list[dict] = []
    for record in records:
        cm = complexity_measures(record, path_cap=config.path_cap,
                                 epsilon=config.epsilon)
        rows.append({
            "paper_id": record.paper_id,
            "year": record.year,
            "pub_tier": record.pub_tier,
            "citations": record.citations,
            "outcome_source": record.outcome_source or None,
            "num_edges": cm.num_edges,
            "num_causal_edges": cm.num_causal_edges,
            "prop_causal_edges": cm.prop_causal_edges,
            "num_unique_paths_full": cm.num_unique_paths,
            "longest_path_full": cm.longest_path,
            "num_unique_paths_causal": cm.num_unique_paths_causal,
            "longest_path_causal": cm.longest_path_causal,
            "num_unique_paths_noncausal": cm.num_unique_paths_noncausal,
            "longest_path_noncausal": cm.longest_path_noncausal,
            "source_sink_full": cm.source_sink_full,
            "source_sink_causal": cm.source_sink_causal,
            "source_sink_noncausal": cm.source_sink_noncausal,
        })
    by_id = {row["paper_id"]: row for row in rows}

    for view in NOVELTY_VIEWS:
        graphs = [build_graph(r, view) for r in records]
        scores, _ = novelty_mod.score_corpus(
            graphs, path_len=config.path_len,
            subgraph_size=config.subgraph_size, subset_cap=config.subset_cap)
        for paper_id, nm in scores.items():
            row = by_id[paper_id]
            row[f"num_novel_edges_{view}"] = nm.num_novel_edges
            row[f"prop_novel_edges_{view}"] = nm.prop_novel_edges
            row[f"num_novel_paths_{view}"] = nm.num_novel_paths
            row[f"prop_novel_paths_{view}"] = nm.prop_novel_paths
            row[f"num_novel_subgraphs_{view}"] = nm.num_novel_subgraphs
            row[f"prop_novel_subgraphs_{view}"] = nm.prop_novel_subgraphs

    for view in GAP_VIEWS:
        graphs = [build_graph(r, view) for r in records]
        scores, _ = cooccur_mod.score_corpus(graphs, tau=config.tau)
        for paper_id, value in scores.items():
            by_id[paper_id][f"gap_prop_{view}"] = value

    for view in CENTRALITY_VIEWS:
        graphs = [build_graph(r, view) for r in records]
        stats = centrality_mod.score_corpus(
            graphs, view=view, damping=config.damping,
            tol=config.tol, max_iter=config.max_iter)
        for st in stats:
            row = by_id[st.paper_id]
            row[f"mean_eigen_{view}"] = st.mean_eigen
            row[f"var_eigen_{view}"] = st.var_eigen
            row[f"mean_pagerank_{view}"] = st.mean_pagerank
            row[f"var_pagerank_{view}"] = st.var_pagerank

    for view in CENTRALITY_VIEWS:
        for stat in CENTRALITY_STATS:
            col = f"{stat}_{view}"
            z_vals = centrality_mod.standardize([row.get(col) for row in rows])
            for row, z in zip(rows, z_vals):
                row[f"z_{col}"] = z

    for row in rows:
        for col in MEASURE_COLUMNS:
            row.setdefault(col, None)
    return rows


def default_battery() -> list[RegressionSpec]:
    specs: list[RegressionSpec] = []
    for outcome in OUTCOMES:
        for measure in DEFAULT_BATTERY_MEASURES:
            specs.append(RegressionSpec(outcome=outcome, measure=measure,
                                        fixed_effects=True, cluster="by_year"))
            specs.append(RegressionSpec(outcome=outcome, measure=measure,
                                        fixed_effects=False, cluster="none"))
    return specs


def run_regressions(rows: list[dict], specs: list[RegressionSpec],
                    keep_errors: bool = True) -> list[dict]:
    """Run specs in order; with keep_errors, inestimable specs become rows
    with an error note instead of aborting the run."""
    out: list[dict] = []
    for spec in specs:
        base = {
            "outcome": spec.outcome, "measure": spec.measure,
            "view": spec.view, "fe": int(spec.fixed_effects),
            "cluster": spec.cluster,
        }
        try:
            res = run_spec(rows, spec)
        except (CollinearityError, SchemaError) as exc:
            if not keep_errors:
                raise
            base.update(alpha=None, beta=None, se_beta=None, n=None,
                        r_squared=None, error=str(exc))
        else:
            base.update(alpha=res.alpha, beta=res.beta, se_beta=res.se_beta,
                        n=res.n, r_squared=res.r_squared, error=None)
        out.append(base)
    return out


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path: str, config: PipelineConfig, n_records: int,
                   n_diagnostics: int, selfloops_dropped: int) -> None:
    lines = [f"tool=claimgraph {__version__}"]
    inputs = [("corpus", config.corpus)]
    inputs += [(f"outcomes[{i}]", p) for i, p in enumerate(config.outcomes)]
    if config.ranks:
        inputs.append(("ranks", config.ranks))
    if config.specs:
        inputs.append(("specs", config.specs))
    for label, p in inputs:
        lines.append(f"input {label}={os.path.basename(p)} sha256={_sha256(p)}")
    for key in ("default_tier", "strict", "min_year", "max_year", "path_len",
                "subgraph_size", "tau", "epsilon", "damping", "tol",
                "max_iter", "path_cap", "subset_cap"):
        lines.append(f"param {key}={getattr(config, key)}")
    lines.append(f"records={n_records}")
    lines.append(f"diagnostics={n_diagnostics}")
    lines.append(f"selfloop_claims_dropped={selfloops_dropped}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass
class PipelineRun:
    out_dir: str
    n_records: int
    diagnostics: list[Diagnostic]


def run_pipeline(config: PipelineConfig, out_dir: str) -> PipelineRun:
    os.makedirs(out_dir, exist_ok=True)

    try:
        records, diagnostics = parse_corpus_file(
            config.corpus, strict=config.strict,
            min_year=config.min_year, max_year=config.max_year)
    except ClaimGraphError as exc:
        raise PipelineStageError("ingest", exc) from exc

    if config.outcomes:
        try:
            sources = [load_outcome_table(p, name=os.path.basename(p))
                       for p in config.outcomes]
            ranks = load_rank_table(config.ranks) if config.ranks else {}
            records = merge_outcomes(records, sources, ranks,
                                     default_tier=config.default_tier)
        except ClaimGraphError as exc:
            raise PipelineStageError("merge-outcomes", exc) from exc

    try:
        rows = compute_measure_rows(records, config)
    except ClaimGraphError as exc:
        raise PipelineStageError("measures", exc) from exc

    write_csv_dicts(
        os.path.join(out_dir, "measures.csv"), MEASURE_COLUMNS, rows,
        comment="one row per paper; empty fields are missing values")

    novelty_cols = (["paper_id", "year"]
                    + [f"{base}_{view}" for view in NOVELTY_VIEWS
                       for base in ("num_novel_edges", "prop_novel_edges",
                                    "num_novel_paths", "prop_novel_paths",
                                    "num_novel_subgraphs", "prop_novel_subgraphs")])
    write_csv_dicts(os.path.join(out_dir, "novelty.csv"), novelty_cols, rows)

    gap_cols = ["paper_id", "year"] + [f"gap_prop_{v}" for v in GAP_VIEWS]
    write_csv_dicts(os.path.join(out_dir, "gaps.csv"), gap_cols, rows)

    centrality_rows = []
    for row in rows:
        for view in CENTRALITY_VIEWS:
            centrality_rows.append({
                "paper_id": row["paper_id"], "year": row["year"], "view": view,
                **{stat: row.get(f"{stat}_{view}") for stat in CENTRALITY_STATS},
                **{f"z_{stat}": row.get(f"z_{stat}_{view}")
                   for stat in CENTRALITY_STATS},
            })
    write_csv_dicts(
        os.path.join(out_dir, "centrality.csv"),
        ["paper_id", "year", "view", *CENTRALITY_STATS,
         *[f"z_{s}" for s in CENTRALITY_STATS]],
        centrality_rows)

    try:
        if config.specs:
            specs = load_spec_file(config.specs)
            reg_rows = run_regressions(rows, specs, keep_errors=False)
        else:
            reg_rows = run_regressions(rows, default_battery(), keep_errors=True)
    except ClaimGraphError as exc:
        raise PipelineStageError("regress", exc) from exc
    write_csv_dicts(
        os.path.join(out_dir, "regressions.csv"),
        ["outcome", "measure", "view", "fe", "cluster", "alpha", "beta",
         "se_beta", "n", "r_squared", "error"],
        reg_rows)

    trend_rows = aggregate_trends(records, group_by="year")
    write_csv(
        os.path.join(out_dir, "trends_year.csv"),
        ["group", "metric", "value", "n", "ci95"],
        [(t.group, t.metric, t.value, t.n, t.ci95) for t in trend_rows])

    with open(os.path.join(out_dir, "diagnostics.txt"), "w",
              encoding="utf-8") as fh:
        for diag in diagnostics:
            fh.write(f"{diag}\n")

    selfloops = sum(build_graph(r, "full").n_selfloop_claims for r in records)
    write_manifest(os.path.join(out_dir, "manifest.txt"), config,
                   n_records=len(records), n_diagnostics=len(diagnostics),
                   selfloops_dropped=selfloops)
    return PipelineRun(out_dir=out_dir, n_records=len(records),
                       diagnostics=diagnostics)
