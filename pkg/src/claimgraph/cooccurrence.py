"""Concept co-occurrence counts and gap-filling scores.

The pair table counts, per unordered code pair, how many prior papers used
both codes anywhere in their graph. A paper's gap-filling score is the share
of its own code pairs that are still rare (count below a threshold) in work
published strictly before its year.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence, TextIO

from .errors import YearOrderError
from .graphs import PaperGraph

DEFAULT_TAU = 5

TABLE_MAGIC = "#claimgraph-pairs v1"


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass
class PairCountTable:
    """Cumulative unordered co-occurrence counts through `through_year`."""

    through_year: int | None = None
    counts: dict[tuple[str, str], int] = field(default_factory=dict)

    def count(self, a: str, b: str) -> int:
        return self.counts.get(_pair(a, b), 0)


def update_pair_counts(table: PairCountTable,
                       papers: Sequence[PaperGraph]) -> PairCountTable:
    """Add one year's papers to the table: +1 per paper per distinct pair.

    Papers must share one year strictly after the table's horizon, keeping
    the table a function of strictly earlier work during scoring.
    """
    if not papers:
        return table
    years = {g.year for g in papers}
    if len(years) > 1:
        raise YearOrderError(f"update_pair_counts got mixed years {sorted(years)}")
    year = years.pop()
    if table.through_year is not None and year <= table.through_year:
        raise YearOrderError(
            f"year {year} not after table horizon {table.through_year}")
    for graph in papers:
        for a, b in combinations(sorted(graph.nodes), 2):
            key = (a, b)
            table.counts[key] = table.counts.get(key, 0) + 1
    table.through_year = year
    return table


def gap_filling_prop(graph: PaperGraph, table: PairCountTable,
                     tau: int = DEFAULT_TAU) -> float | None:
    """Share of the paper's unordered code pairs with prior count < tau.

    Graphs with fewer than two nodes have no pairs and score missing. The
    score is monotone non-decreasing in tau.
    """
    nodes = sorted(graph.nodes)
    if len(nodes) < 2:
        return None
    pairs = list(combinations(nodes, 2))
    rare = sum(1 for a, b in pairs if table.count(a, b) < tau)
    return rare / len(pairs)


def score_corpus(graphs: Sequence[PaperGraph], tau: int = DEFAULT_TAU,
                 table: PairCountTable | None = None,
                 ) -> tuple[dict[str, float | None], PairCountTable]:
    """Gap scores for one view's graphs, processed in year order."""
    if table is None:
        table = PairCountTable()
    by_year: dict[int, list[PaperGraph]] = {}
    for graph in graphs:
        by_year.setdefault(graph.year, []).append(graph)
    out: dict[str, float | None] = {}
    for year in sorted(by_year):
        for graph in by_year[year]:
            out[graph.paper_id] = gap_filling_prop(graph, table, tau)
        update_pair_counts(table, by_year[year])
    return out, table


def save_pair_table(table: PairCountTable, fh: TextIO) -> None:
    fh.write(f"{TABLE_MAGIC}\n")
    fh.write(f"through_year={'' if table.through_year is None else table.through_year}\n")
    fh.write("code1,code2,count\n")
    for (a, b), count in sorted(table.counts.items()):
        fh.write(f"{a},{b},{count}\n")


def save_pair_table_file(table: PairCountTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        save_pair_table(table, fh)


def load_pair_table(fh: TextIO) -> PairCountTable:
    lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != TABLE_MAGIC:
        raise ValueError("not a pair-count table file")
    if len(lines) < 3 or not lines[1].startswith("through_year="):
        raise ValueError("pair-count table missing header")
    value = lines[1].partition("=")[2]
    table = PairCountTable(through_year=int(value) if value else None)
    if lines[2] != "code1,code2,count":
        raise ValueError("pair-count table missing column header")
    for line in lines[3:]:
        if not line:
            continue
        a, b, raw = line.split(",")
        if b < a:
            raise ValueError(f"pair {a},{b} not sorted")
        table.counts[(a, b)] = int(raw)
    return table


def load_pair_table_file(path: str) -> PairCountTable:
    with open(path, encoding="utf-8") as fh:
        return load_pair_table(fh)
