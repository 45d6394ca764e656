"""Per-paper knowledge graphs and structural complexity measures.

Each paper's claims form a directed graph on concept codes. Claims are
counted before deduplication; path and ratio measures run on the collapsed
graph (one edge per distinct ordered code pair, self-loops dropped).

Views filter at the claim level before collapsing: `full` keeps everything,
`causal` keeps claims whose methods whitelist as causal, `noncausal` keeps
the rest. A code pair claimed both ways therefore appears in both filtered
views.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import PathBudgetExceeded
from .model import PaperRecord

VIEWS = ("full", "causal", "noncausal")

DEFAULT_PATH_CAP = 1_000_000


@dataclass
class PaperGraph:
    """Deduplicated directed graph of one paper's claims under one view."""

    paper_id: str
    year: int
    view: str = "full"
    nodes: set[str] = field(default_factory=set)
    edges: set[tuple[str, str]] = field(default_factory=set)
    n_claims: int = 0
    n_selfloop_claims: int = 0

    @property
    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {node: [] for node in self.nodes}
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj

    def sources(self) -> set[str]:
        return {u for u, _ in self.edges}

    def sinks(self) -> set[str]:
        return {v for _, v in self.edges}


def build_graph(record: PaperRecord, view: str = "full") -> PaperGraph:
    """Collapse a record's claims (filtered to `view`) into a PaperGraph.

    Self-loop claims are dropped from the graph but counted, so nothing is
    lost silently.
    """
    if view not in VIEWS:
        raise ValueError(f"unknown view {view!r}")
    graph = PaperGraph(paper_id=record.paper_id, year=record.year, view=view)
    for edge in record.edges:
        if view == "causal" and not edge.is_causal:
            continue
        if view == "noncausal" and edge.is_causal:
            continue
        graph.n_claims += 1
        if edge.source == edge.sink:
            graph.n_selfloop_claims += 1
            continue
        graph.nodes.add(edge.source)
        graph.nodes.add(edge.sink)
        graph.edges.add((edge.source, edge.sink))
    return graph


def iter_simple_paths(graph: PaperGraph, max_len: int | None = None,
                      cap: int | None = None) -> Iterator[tuple[str, ...]]:
    """Yield every simple directed path (>= 1 edge) as a node tuple.

    Paths are node sequences without repeats, so the walk terminates even on
    cyclic graphs. Deterministic order: depth-first from each start node in
    code order. `cap` bounds the number of paths yielded.
    """
    adj = graph.adjacency
    count = 0
    for start in sorted(graph.nodes):
        # Stack of (node, path-so-far); neighbors pushed in reverse so the
        # smallest code is explored first.
        stack: list[tuple[str, tuple[str, ...]]] = [(start, (start,))]
        while stack:
            node, path = stack.pop()
            for nxt in reversed(adj[node]):
                if nxt in path:
                    continue
                new_path = path + (nxt,)
                count += 1
                if cap is not None and count > cap:
                    raise PathBudgetExceeded(graph.paper_id, cap)
                yield new_path
                if max_len is None or len(new_path) - 1 < max_len:
                    stack.append((nxt, new_path))


def count_paths(graph: PaperGraph, cap: int = DEFAULT_PATH_CAP) -> tuple[int, int]:
    """(number of distinct simple paths, longest simple path length in edges)."""
    n_paths = 0
    longest = 0
    for path in iter_simple_paths(graph, cap=cap):
        n_paths += 1
        longest = max(longest, len(path) - 1)
    return n_paths, longest


def source_sink_ratio(graph: PaperGraph, epsilon: float = 1e-9) -> float:
    """Nodes with out-edges over nodes with in-edges, denominator padded by
    epsilon. An edgeless graph scores 0."""
    return len(graph.sources()) / (len(graph.sinks()) + epsilon)


@dataclass(frozen=True)
class ComplexityMeasures:
    paper_id: str
    year: int
    num_edges: int
    num_causal_edges: int
    prop_causal_edges: float | None
    num_unique_paths: int | None
    longest_path: int | None
    num_unique_paths_causal: int | None
    longest_path_causal: int | None
    num_unique_paths_noncausal: int | None
    longest_path_noncausal: int | None
    source_sink_full: float | None
    source_sink_causal: float | None
    source_sink_noncausal: float | None


def complexity_measures(record: PaperRecord, path_cap: int = DEFAULT_PATH_CAP,
                        epsilon: float = 1e-9) -> ComplexityMeasures:
    """All structural measures for one record.

    Zero-edge records yield missing (None) path and ratio measures so they
    stay distinguishable from papers whose graphs truly have zero paths.
    """
    num_edges = len(record.edges)
    num_causal = sum(1 for e in record.edges if e.is_causal)
    if num_edges == 0:
        return ComplexityMeasures(
            paper_id=record.paper_id, year=record.year,
            num_edges=0, num_causal_edges=0, prop_causal_edges=None,
            num_unique_paths=None, longest_path=None,
            num_unique_paths_causal=None, longest_path_causal=None,
            num_unique_paths_noncausal=None, longest_path_noncausal=None,
            source_sink_full=None, source_sink_causal=None,
            source_sink_noncausal=None,
        )
    per_view: dict[str, tuple[int, int, float]] = {}
    for view in VIEWS:
        graph = build_graph(record, view)
        n_paths, longest = count_paths(graph, cap=path_cap)
        per_view[view] = (n_paths, longest, source_sink_ratio(graph, epsilon))
    return ComplexityMeasures(
        paper_id=record.paper_id, year=record.year,
        num_edges=num_edges, num_causal_edges=num_causal,
        prop_causal_edges=num_causal / num_edges,
        num_unique_paths=per_view["full"][0], longest_path=per_view["full"][1],
        num_unique_paths_causal=per_view["causal"][0],
        longest_path_causal=per_view["causal"][1],
        num_unique_paths_noncausal=per_view["noncausal"][0],
        longest_path_noncausal=per_view["noncausal"][1],
        source_sink_full=per_view["full"][2],
        source_sink_causal=per_view["causal"][2],
        source_sink_noncausal=per_view["noncausal"][2],
    )
