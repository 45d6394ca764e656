"""Domain types: concept codes, method tags, claim edges, paper records.

A corpus is a sequence of paper records. Each record carries claim edges
between concept codes (an uppercase letter followed by one or two digits,
e.g. "D31"). Whether a claim is causal is decided by its method tags
alone, never by the relationship label.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PUB_TIERS = ("Top5", "Top6to20", "Top21to100", "Other", "Unpublished", "Unknown")

RELATIONSHIPS = (
    "direct-causal",
    "indirect-causal",
    "mediation",
    "confounding",
    "theorized",
    "correlation",
)

_CODE_RE = re.compile(r"^[A-Z][0-9]{1,2}$")


def normalize_code(code: str) -> str:
    """Uppercase and validate a concept code. Raises ValueError when malformed."""
    code = code.strip().upper()
    if not _CODE_RE.match(code):
        raise ValueError(f"malformed concept code {code!r}")
    return code


# Canonical names for causal identification methods. Matching an edge's
# normalized tags against this set is the only causality test.
CAUSAL_METHODS = frozenset(
    {
        "DID",
        "IV/2SLS",
        "RCT/EXPERIMENT",
        "RDD",
        "EVENT STUDY",
        "SYNTHETIC CONTROL",
    }
)

# Spelling variants folded into canonical names before the whitelist test.
METHOD_ALIASES = {
    "DIFFERENCE-IN-DIFFERENCES": "DID",
    "DIFFERENCES-IN-DIFFERENCES": "DID",
    "DIFF-IN-DIFF": "DID",
    "DIFF IN DIFF": "DID",
    "DD": "DID",
    "IV": "IV/2SLS",
    "2SLS": "IV/2SLS",
    "INSTRUMENTAL VARIABLE": "IV/2SLS",
    "INSTRUMENTAL VARIABLES": "IV/2SLS",
    "RCT": "RCT/EXPERIMENT",
    "RCTS": "RCT/EXPERIMENT",
    "EXPERIMENT": "RCT/EXPERIMENT",
    "EXPERIMENTS": "RCT/EXPERIMENT",
    "RANDOMIZED CONTROLLED TRIAL": "RCT/EXPERIMENT",
    "RANDOMISED CONTROLLED TRIAL": "RCT/EXPERIMENT",
    "RANDOMIZED EXPERIMENT": "RCT/EXPERIMENT",
    "RANDOMISED EXPERIMENT": "RCT/EXPERIMENT",
    "FIELD EXPERIMENT": "RCT/EXPERIMENT",
    "LAB EXPERIMENT": "RCT/EXPERIMENT",
    "RD": "RDD",
    "REGRESSION DISCONTINUITY": "RDD",
    "EVENT STUDIES": "EVENT STUDY",
    "SYNTHETIC CONTROLS": "SYNTHETIC CONTROL",
}

# Tags we expect to see but that never confer causality. Anything outside
# CAUSAL_METHODS and this set lands in the unknown-tags report.
KNOWN_NONCAUSAL_METHODS = frozenset(
    {
        "OLS",
        "TWFE",
        "PANEL",
        "CORRELATION",
        "DESCRIPTIVE",
        "STRUCTURAL ESTIMATION",
        "SIMULATIONS",
        "SIMULATION",
        "CALIBRATION",
        "THEORETICAL",
        "NON-EMPIRICAL",
        "THEORY",
        "MATCHING",
        "SURVEY",
    }
)


def normalize_method_tag(tag: str) -> str:
    """Trim, uppercase, collapse inner whitespace, and resolve aliases."""
    tag = re.sub(r"\s+", " ", tag.strip().upper())
    return METHOD_ALIASES.get(tag, tag)


def is_causal_methods(methods: tuple[str, ...] | list[str],
                      whitelist: frozenset[str] = CAUSAL_METHODS) -> bool:
    """True when any normalized tag sits on the causal whitelist."""
    return any(normalize_method_tag(t) in whitelist for t in methods)


def unknown_method_tags(methods: tuple[str, ...] | list[str]) -> list[str]:
    """Normalized tags outside both the causal and the known non-causal sets."""
    out = []
    for t in methods:
        norm = normalize_method_tag(t)
        if norm not in CAUSAL_METHODS and norm not in KNOWN_NONCAUSAL_METHODS:
            out.append(norm)
    return out


@dataclass(frozen=True)
class ClaimEdge:
    """One directed claim between two concept codes.

    `methods` keeps the raw tags as given (sorted for stable round-trips);
    `is_causal` is derived from them and never stored independently.
    """

    source: str
    sink: str
    source_text: str = ""
    sink_text: str = ""
    methods: tuple[str, ...] = ()
    relationship: str = "correlation"

    @property
    def is_causal(self) -> bool:
        return is_causal_methods(self.methods)


@dataclass
class PaperRecord:
    paper_id: str
    year: int
    fields: tuple[str, ...] = ()
    edges: tuple[ClaimEdge, ...] = ()
    title: str | None = None
    pub_tier: str = "Unknown"
    citations: int | None = None
    outcome_source: str = ""

    def method_tags(self) -> set[str]:
        """Normalized method tags used anywhere in the paper."""
        tags: set[str] = set()
        for e in self.edges:
            tags.update(normalize_method_tag(t) for t in e.methods)
        return tags

    def prop_causal(self) -> float | None:
        """Share of claim edges that are causal; None for zero-edge papers."""
        if not self.edges:
            return None
        return sum(1 for e in self.edges if e.is_causal) / len(self.edges)


def normalize_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace. Used for exact
    title matching against outcome tables; no fuzzy matching is attempted."""
    title = title.casefold()
    title = re.sub(r"[^a-z0-9 ]+", " ", title)
    return re.sub(r"\s+", " ", title).strip()
