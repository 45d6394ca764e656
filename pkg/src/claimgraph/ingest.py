"""Corpus ingestion and outcome merging.

The corpus wire format is UTF-8 line-delimited JSON, one paper per line:

    {"paper_id": "p1", "year": 2014, "fields": ["Labour"],
     "title": "...",                      # optional
     "pub_tier": "Top5",                  # optional
     "citations": 12,                     # optional
     "outcome_source": "src",             # optional
     "edges": [{"source_code": "D31", "sink_code": "J62",
                "source_text": "...", "sink_text": "...",
                "methods": ["OLS"], "relationship": "correlation"}]}

Malformed lines are reported with their line number and skipped unless
strict mode is on, in which case the first problem aborts the parse.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, replace, field
from typing import Iterable, Sequence, TextIO

from .errors import DuplicatePaperError, SchemaError
from .model import (
    PUB_TIERS,
    RELATIONSHIPS,
    ClaimEdge,
    PaperRecord,
    normalize_code,
    normalize_title,
    unknown_method_tags,
)

log = logging.getLogger(__name__)

DEFAULT_MIN_YEAR = 1980
DEFAULT_MAX_YEAR = 2023


@dataclass(frozen=True)
class Diagnostic:
    line_no: int
    kind: str
    message: str

    def __str__(self) -> str:
        return f"line {self.line_no}: [{self.kind}] {self.message}"


def _parse_edge(obj: dict) -> ClaimEdge:
    if not isinstance(obj, dict):
        raise ValueError("edge must be an object")
    try:
        source = normalize_code(str(obj["source_code"]))
        sink = normalize_code(str(obj["sink_code"]))
    except KeyError as exc:
        raise ValueError(f"edge missing {exc.args[0]!r}") from None
    methods = obj.get("methods", [])
    if not isinstance(methods, list) or not all(isinstance(m, str) for m in methods):
        raise ValueError("edge methods must be a list of strings")
    relationship = str(obj.get("relationship", "correlation"))
    if relationship not in RELATIONSHIPS:
        raise ValueError(f"unknown relationship {relationship!r}")
    return ClaimEdge(
        source=source,
        sink=sink,
        source_text=str(obj.get("source_text", "")),
        sink_text=str(obj.get("sink_text", "")),
        methods=tuple(sorted(methods)),
        relationship=relationship,
    )


def _parse_record(obj: dict, min_year: int, max_year: int) -> PaperRecord:
    if not isinstance(obj, dict):
        raise ValueError("record must be an object")
    try:
        paper_id = str(obj["paper_id"])
        year = obj["year"]
    except KeyError as exc:
        raise ValueError(f"record missing {exc.args[0]!r}") from None
    if not paper_id:
        raise ValueError("paper_id must be non-empty")
    if not isinstance(year, int) or isinstance(year, bool):
        raise ValueError(f"year must be an integer, got {year!r}")
    if not min_year <= year <= max_year:
        raise ValueError(f"year {year} outside [{min_year}, {max_year}]")
    fields = obj.get("fields", [])
    if not isinstance(fields, list) or not all(isinstance(f, str) for f in fields):
        raise ValueError("fields must be a list of strings")
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        raise ValueError("edges must be a list")
    pub_tier = str(obj.get("pub_tier", "Unknown"))
    if pub_tier not in PUB_TIERS:
        raise ValueError(f"unknown pub_tier {pub_tier!r}")
    citations = obj.get("citations")
    if citations is not None:
        if not isinstance(citations, int) or isinstance(citations, bool) or citations < 0:
            raise ValueError(f"citations must be a non-negative integer, got {citations!r}")
    title = obj.get("title")
    if title is not None:
        title = str(title)
    return PaperRecord(
        paper_id=paper_id,
        year=year,
        fields=tuple(sorted(set(fields))),
        edges=tuple(_parse_edge(e) for e in edges),
        title=title,
        pub_tier=pub_tier,
        citations=citations,
        outcome_source=str(obj.get("outcome_source", "")),
    )


def parse_corpus(lines: Iterable[str] | TextIO, strict: bool = False,
                 min_year: int = DEFAULT_MIN_YEAR,
                 max_year: int = DEFAULT_MAX_YEAR,
                 ) -> tuple[list[PaperRecord], list[Diagnostic]]:
    """Parse line-delimited records, in input order.

    Returns (records, diagnostics). Diagnostics cover malformed lines,
    duplicate paper ids, and unrecognized method tags. In strict mode the
    first malformed line or duplicate id raises instead.
    """
    records: list[PaperRecord] = []
    diagnostics: list[Diagnostic] = []
    seen: dict[str, int] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            record = _parse_record(obj, min_year, max_year)
        except (ValueError, TypeError) as exc:
            if strict:
                raise SchemaError(str(exc), line_no=line_no) from None
            diagnostics.append(Diagnostic(line_no, "schema", str(exc)))
            continue
        if record.paper_id in seen:
            msg = (f"duplicate paper_id {record.paper_id!r} "
                   f"(first seen on line {seen[record.paper_id]})")
            if strict:
                raise DuplicatePaperError(msg, line_no=line_no)
            diagnostics.append(Diagnostic(line_no, "duplicate", msg))
            continue
        seen[record.paper_id] = line_no
        for edge in record.edges:
            for tag in unknown_method_tags(edge.methods):
                diagnostics.append(Diagnostic(
                    line_no, "unknown-method",
                    f"paper {record.paper_id!r}: unrecognized method tag {tag!r}"))
        records.append(record)
    return records, diagnostics


def parse_corpus_file(path: str, strict: bool = False,
                      min_year: int = DEFAULT_MIN_YEAR,
                      max_year: int = DEFAULT_MAX_YEAR,
                      ) -> tuple[list[PaperRecord], list[Diagnostic]]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, strict=strict, min_year=min_year, max_year=max_year)


def record_to_dict(record: PaperRecord) -> dict:
    obj: dict = {
        "paper_id": record.paper_id,
        "year": record.year,
        "fields": list(record.fields),
        "edges": [
            {
                "source_code": e.source,
                "sink_code": e.sink,
                "source_text": e.source_text,
                "sink_text": e.sink_text,
                "methods": list(e.methods),
                "relationship": e.relationship,
            }
            for e in record.edges
        ],
    }
    if record.title is not None:
        obj["title"] = record.title
    if record.pub_tier != "Unknown":
        obj["pub_tier"] = record.pub_tier
    if record.citations is not None:
        obj["citations"] = record.citations
    if record.outcome_source:
        obj["outcome_source"] = record.outcome_source
    return obj


def serialize_corpus(records: Sequence[PaperRecord], fh: TextIO) -> None:
    """Write records as line-delimited JSON; parse(serialize(x)) == x."""
    for record in records:
        fh.write(json.dumps(record_to_dict(record), sort_keys=True))
        fh.write("\n")


def serialize_corpus_file(records: Sequence[PaperRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        serialize_corpus(records, fh)


@dataclass
class OutcomeTable:
    """One prioritized outcome source: paper_id (or title) -> journal/citations."""

    name: str
    by_id: dict[str, dict] = field(default_factory=dict)
    by_title: dict[str, dict] = field(default_factory=dict)

    def lookup(self, record: PaperRecord) -> dict | None:
        row = self.by_id.get(record.paper_id)
        if row is None and record.title is not None:
            row = self.by_title.get(normalize_title(record.title))
        return row


def load_outcome_table(path: str, name: str | None = None) -> OutcomeTable:
    """Load a delimited outcome table with header (paper_id, journal, citations).

    An optional title column enables exact normalized-title matching for rows
    whose paper_id is empty.
    """
    table = OutcomeTable(name=name or path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty outcome table")
        cols = set(reader.fieldnames)
        if "paper_id" not in cols and "title" not in cols:
            raise SchemaError(f"{path}: outcome table needs a paper_id or title column")
        for idx, row in enumerate(reader, start=2):
            journal = (row.get("journal") or "").strip()
            cites_raw = (row.get("citations") or "").strip()
            citations: int | None = None
            if cites_raw:
                try:
                    citations = int(cites_raw)
                except ValueError:
                    raise SchemaError(f"{path}: bad citations {cites_raw!r}", line_no=idx)
                if citations < 0:
                    raise SchemaError(f"{path}: negative citations", line_no=idx)
            entry = {"journal": journal or None, "citations": citations}
            pid = (row.get("paper_id") or "").strip()
            title = (row.get("title") or "").strip()
            if pid:
                table.by_id[pid] = entry
            elif title:
                table.by_title[normalize_title(title)] = entry
    return table


def load_rank_table(path: str) -> dict[str, str]:
    """Load (journal, tier) rows mapping normalized journal names to tiers."""
    ranks: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"journal", "tier"} <= set(reader.fieldnames):
            raise SchemaError(f"{path}: rank table needs journal and tier columns")
        for idx, row in enumerate(reader, start=2):
            tier = (row.get("tier") or "").strip()
            if tier not in PUB_TIERS:
                raise SchemaError(f"{path}: unknown tier {tier!r}", line_no=idx)
            ranks[(row.get("journal") or "").strip().casefold()] = tier
    return ranks


def journal_tier(journal: str | None, ranks: dict[str, str]) -> str:
    """Rank-table tier for a journal. Journals missing from the table map
    to Other; no journal at all means the paper is unpublished."""
    if not journal:
        return "Unpublished"
    return ranks.get(journal.strip().casefold(), "Other")


def merge_outcomes(records: Sequence[PaperRecord],
                   sources: Sequence[OutcomeTable],
                   ranks: dict[str, str],
                   default_tier: str = "Unpublished") -> list[PaperRecord]:
    """Attach publication tier and citation counts from prioritized sources.

    Field-wise hierarchical merge: the tier comes from the highest-priority
    source holding a journal for the paper, citations from the highest-
    priority source holding a citation count. Lower-priority conflicts are
    logged and discarded. Papers absent everywhere get `default_tier`.
    Applying the merge twice with the same sources is a no-op.
    """
    if default_tier not in PUB_TIERS:
        raise ValueError(f"unknown default tier {default_tier!r}")
    merged: list[PaperRecord] = []
    for record in records:
        tier: str | None = None
        tier_source = ""
        citations: int | None = None
        for source in sources:
            row = source.lookup(record)
            if row is None:
                continue
            if row["journal"] is not None:
                t = journal_tier(row["journal"], ranks)
                if tier is None:
                    tier, tier_source = t, source.name
                elif t != tier:
                    log.info("outcome conflict for %s: %s says %s, keeping %s from %s",
                             record.paper_id, source.name, t, tier, tier_source)
            if row["citations"] is not None and citations is None:
                citations = row["citations"]
        merged.append(replace(
            record,
            pub_tier=tier if tier is not None else default_tier,
            citations=citations,
            outcome_source=tier_source,
        ))
    return merged
