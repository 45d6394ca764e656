"""Knowledge-graph measures and outcome regressions for claim corpora."""

__version__ = "0.1.0"

from .graphs import PaperGraph, build_graph, complexity_measures, source_sink_ratio
from .ingest import merge_outcomes, parse_corpus, parse_corpus_file, serialize_corpus
from .model import ClaimEdge, PaperRecord, is_causal_methods

__all__ = [
    "__version__",
    "ClaimEdge",
    "PaperRecord",
    "PaperGraph",
    "build_graph",
    "complexity_measures",
    "source_sink_ratio",
    "is_causal_methods",
    "merge_outcomes",
    "parse_corpus",
    "parse_corpus_file",
    "serialize_corpus",
]
