"""Command-line interface.

Every subcommand reads plain files and writes CSV (stdout by default), so
runs can be scripted and diffed. `claimgraph run` drives the full pipeline
from a key=value config file.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import centrality as centrality_mod
from . import cooccurrence as cooccur_mod
from . import novelty as novelty_mod
from .embedding import (
    fetch_remote_embeddings,
    load_embedding_table,
    match_concept,
    match_concept_all,
)
from .errors import ClaimGraphError
from .graphs import build_graph, complexity_measures
from .ingest import (
    load_outcome_table,
    load_rank_table,
    merge_outcomes,
    parse_corpus_file,
    serialize_corpus,
)
from .pipeline import (
    PipelineConfig,
    compute_measure_rows,
    parse_config_file,
    run_pipeline,
    run_regressions,
    MEASURE_COLUMNS,
)
from .regression import load_spec_file
from .tableio import format_cell, parse_float, parse_int, read_csv_dicts
from .trends import GROUPINGS, aggregate_trends

CLI_VIEWS = ("full", "causal", "non-causal")


def _view_arg(view: str) -> str:
    return "noncausal" if view == "non-causal" else view


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write_table(fh, header: list[str], rows) -> None:
    import csv

    writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def _load_corpus(args) -> list:
    records, diagnostics = parse_corpus_file(args.corpus, strict=args.strict)
    for diag in diagnostics:
        print(diag, file=sys.stderr)
    return records


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="line-delimited corpus file")
    parser.add_argument("--strict", action="store_true",
                        help="abort on the first malformed line")
    parser.add_argument("--out", default=None, help="output file (default stdout)")


def cmd_run(args) -> int:
    config = parse_config_file(args.config)
    run = run_pipeline(config, args.out)
    for diag in run.diagnostics:
        print(diag, file=sys.stderr)
    print(f"wrote {run.n_records} papers to {run.out_dir}", file=sys.stderr)
    return 0


def cmd_ingest(args) -> int:
    records = _load_corpus(args)
    if args.outcomes:
        import os

        sources = [load_outcome_table(p, name=os.path.basename(p))
                   for p in args.outcomes.split(",")]
        ranks = load_rank_table(args.ranks) if args.ranks else {}
        records = merge_outcomes(records, sources, ranks,
                                 default_tier=args.default_tier)
    with _open_out(args.out) as fh:
        serialize_corpus(records, fh)
    return 0


def cmd_measures(args) -> int:
    records = _load_corpus(args)
    header = ["paper_id", "year", "num_edges", "num_causal_edges",
              "prop_causal_edges",
              "num_unique_paths_full", "longest_path_full",
              "num_unique_paths_causal", "longest_path_causal",
              "num_unique_paths_noncausal", "longest_path_noncausal",
              "source_sink_full", "source_sink_causal", "source_sink_noncausal"]
    rows = []
    for record in records:
        cm = complexity_measures(record, path_cap=args.path_cap)
        rows.append([cm.paper_id, cm.year, cm.num_edges, cm.num_causal_edges,
                     cm.prop_causal_edges,
                     cm.num_unique_paths, cm.longest_path,
                     cm.num_unique_paths_causal, cm.longest_path_causal,
                     cm.num_unique_paths_noncausal, cm.longest_path_noncausal,
                     cm.source_sink_full, cm.source_sink_causal,
                     cm.source_sink_noncausal])
    with _open_out(args.out) as fh:
        _write_table(fh, header, rows)
    return 0


def cmd_novelty(args) -> int:
    records = _load_corpus(args)
    view = _view_arg(args.view)
    graphs = [build_graph(r, view) for r in records]
    ledger = (novelty_mod.load_ledger_file(args.ledger_in)
              if args.ledger_in else None)
    if ledger is None:
        scores, ledger = novelty_mod.score_corpus(
            graphs, path_len=args.path_len, subgraph_size=args.subgraph_size)
    else:
        scores, ledger = novelty_mod.score_corpus(graphs, ledger=ledger)
    if args.ledger_out:
        novelty_mod.save_ledger_file(ledger, args.ledger_out)
    header = ["paper_id", "year", "num_novel_edges", "prop_novel_edges",
              "num_novel_paths", "prop_novel_paths",
              "num_novel_subgraphs", "prop_novel_subgraphs"]
    rows = []
    for record in records:
        m = scores[record.paper_id]
        rows.append([m.paper_id, m.year, m.num_novel_edges, m.prop_novel_edges,
                     m.num_novel_paths, m.prop_novel_paths,
                     m.num_novel_subgraphs, m.prop_novel_subgraphs])
    with _open_out(args.out) as fh:
        _write_table(fh, header, rows)
    return 0


def cmd_gaps(args) -> int:
    records = _load_corpus(args)
    view = _view_arg(args.view)
    graphs = [build_graph(r, view) for r in records]
    table = (cooccur_mod.load_pair_table_file(args.table_in)
             if args.table_in else None)
    scores, table = cooccur_mod.score_corpus(graphs, tau=args.tau, table=table)
    if args.table_out:
        cooccur_mod.save_pair_table_file(table, args.table_out)
    rows = [[r.paper_id, r.year, scores[r.paper_id]] for r in records]
    with _open_out(args.out) as fh:
        _write_table(fh, ["paper_id", "year", "gap_prop"], rows)
    return 0


def cmd_centrality(args) -> int:
    records = _load_corpus(args)
    view = _view_arg(args.view)
    graphs = [build_graph(r, view) for r in records]
    stats = centrality_mod.score_corpus(graphs, view=view, damping=args.damping)
    by_id = {s.paper_id: s for s in stats}
    raw_rows = [by_id[r.paper_id] for r in records]
    z_cols = {
        stat: centrality_mod.standardize([getattr(s, stat) for s in raw_rows])
        for stat in ("mean_eigen", "var_eigen", "mean_pagerank", "var_pagerank")
    }
    header = ["paper_id", "year", "view", "mean_eigen", "var_eigen",
              "mean_pagerank", "var_pagerank", "z_mean_eigen", "z_var_eigen",
              "z_mean_pagerank", "z_var_pagerank"]
    rows = []
    for idx, s in enumerate(raw_rows):
        rows.append([s.paper_id, s.year, args.view, s.mean_eigen, s.var_eigen,
                     s.mean_pagerank, s.var_pagerank,
                     z_cols["mean_eigen"][idx], z_cols["var_eigen"][idx],
                     z_cols["mean_pagerank"][idx], z_cols["var_pagerank"][idx]])
    with _open_out(args.out) as fh:
        _write_table(fh, header, rows)
    return 0


def cmd_node_series(args) -> int:
    records = _load_corpus(args)
    view = _view_arg(args.view)
    graphs = [build_graph(r, view) for r in records]
    series = centrality_mod.node_centrality_series(graphs, args.code)
    with _open_out(args.out) as fh:
        _write_table(fh, ["year", "eigen_centrality", "eigen_centrality_minmax"],
                     series)
    return 0


def cmd_regress(args) -> int:
    raw = read_csv_dicts(args.measures)
    rows: list[dict] = []
    for entry in raw:
        row: dict = {"paper_id": entry.get("paper_id", ""),
                     "year": parse_int(entry.get("year", "")),
                     "pub_tier": entry.get("pub_tier") or None,
                     "citations": parse_int(entry.get("citations", ""))}
        for key, value in entry.items():
            if key not in row:
                row[key] = parse_float(value)
        rows.append(row)
    specs = load_spec_file(args.specs)
    results = run_regressions(rows, specs, keep_errors=False)
    header = ["outcome", "measure", "view", "fe", "cluster", "alpha", "beta",
              "se_beta", "n", "r_squared"]
    with _open_out(args.out) as fh:
        _write_table(fh, header,
                     [[r[c] for c in header] for r in results])
    return 0


def cmd_trends(args) -> int:
    records = _load_corpus(args)
    rows = aggregate_trends(records, group_by=args.group_by)
    with _open_out(args.out) as fh:
        _write_table(fh, ["group", "metric", "value", "n", "ci95"],
                     [(t.group, t.metric, t.value, t.n, t.ci95) for t in rows])
    return 0


def cmd_match(args) -> int:
    index = load_embedding_table(args.index)
    queries: list[tuple[str, list[float]]] = []
    if args.remote_texts:
        with open(args.queries, encoding="utf-8") as fh:
            texts = [line.rstrip("\n") for line in fh if line.strip()]
        vectors = fetch_remote_embeddings(texts)
        queries = [(f"q{i}", vec) for i, vec in enumerate(vectors, start=1)]
    else:
        table = load_embedding_table(args.queries)
        queries = list(zip(table.ids, table.vectors))
    rows = []
    for query_id, vec in queries:
        if args.threshold is not None:
            for rank, m in enumerate(
                    match_concept_all(vec, index, args.threshold, query_id),
                    start=1):
                rows.append([m.query_id, m.code, m.score, rank])
        else:
            m = match_concept(vec, index, query_id)
            rows.append([m.query_id, m.code, m.score, 1])
    with _open_out(args.out) as fh:
        _write_table(fh, ["query_id", "code", "similarity", "rank"], rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimgraph",
        description="Knowledge-graph measures for claim corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("ingest", help="parse, merge outcomes, re-serialize")
    _add_corpus_args(p)
    p.add_argument("--outcomes", default="",
                   help="comma-separated outcome tables, highest priority first")
    p.add_argument("--ranks", default="", help="journal rank table")
    p.add_argument("--default-tier", default="Unpublished",
                   choices=["Unpublished", "Unknown"])
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("measures", help="per-paper structural measures")
    _add_corpus_args(p)
    p.add_argument("--path-cap", type=int, default=1_000_000)
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("novelty", help="novelty against the year frontier")
    _add_corpus_args(p)
    p.add_argument("--view", default="full", choices=["full", "causal"])
    p.add_argument("--path-len", type=int, default=novelty_mod.DEFAULT_PATH_LEN)
    p.add_argument("--subgraph-size", type=int,
                   default=novelty_mod.DEFAULT_SUBGRAPH_SIZE)
    p.add_argument("--ledger-in", default="", help="resume from a saved ledger")
    p.add_argument("--ledger-out", default="", help="save the final ledger")
    p.set_defaults(func=cmd_novelty)

    p = sub.add_parser("gaps", help="gap-filling against pair counts")
    _add_corpus_args(p)
    p.add_argument("--view", default="full", choices=["full", "causal"])
    p.add_argument("--tau", type=int, default=cooccur_mod.DEFAULT_TAU)
    p.add_argument("--table-in", default="", help="resume from a saved pair table")
    p.add_argument("--table-out", default="", help="save the final pair table")
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("centrality", help="prior-year centrality statistics")
    _add_corpus_args(p)
    p.add_argument("--view", default="non-causal", choices=list(CLI_VIEWS))
    p.add_argument("--damping", type=float,
                   default=centrality_mod.DEFAULT_DAMPING)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("node-series",
                       help="yearly eigenvector centrality of one code")
    _add_corpus_args(p)
    p.add_argument("--code", required=True)
    p.add_argument("--view", default="full", choices=list(CLI_VIEWS))
    p.set_defaults(func=cmd_node_series)

    p = sub.add_parser("regress", help="fit regression specs on a measures table")
    p.add_argument("--measures", required=True, help="measures.csv from a run")
    p.add_argument("--specs", required=True,
                   help="CSV of outcome,measure,view,fe,cluster")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("trends", help="grouped causal-share and method trends")
    _add_corpus_args(p)
    p.add_argument("--group-by", default="year", choices=list(GROUPINGS))
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("match", help="match query vectors to concept codes")
    p.add_argument("--index", required=True, help="id,v1,...,vD table")
    p.add_argument("--queries", required=True,
                   help="query vector table, or text lines with --remote-texts")
    p.add_argument("--threshold", type=float, default=None,
                   help="return every match scoring at least this")
    p.add_argument("--remote-texts", action="store_true",
                   help="embed query text lines via the configured provider")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_match)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ClaimGraphError, OSError) as exc:
        print(f"claimgraph: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
