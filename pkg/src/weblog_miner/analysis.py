"""Filtering mined results and rendering them as JSON, CSV, or DOT.

The site filter drops rules and patterns that merely restate existing
hyperlinks; predicate filtering answers the "only show me X" questions a
query console otherwise would.  All renderings are deterministic: the
same value always produces the same bytes, and JSON output round-trips
through ``read_report``.
"""

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Union
from urllib.parse import urlparse

from .logs import LogEntry
from .mining import AssociationRule, NavigationGraph, SequentialPattern, SessionCluster

__all__ = [
    "SCHEMA_VERSION",
    "SiteTopology",
    "PatternPredicate",
    "site_filter",
    "filter_patterns",
    "render_report",
    "read_report",
]

SCHEMA_VERSION = 1

Pattern = Union[SequentialPattern, AssociationRule]


@dataclass(frozen=True)
class SiteTopology:
    """The site's directed hyperlinks, used to spot unsurprising patterns.

    ``source`` records where the links came from (a CSV path or observed
    referrers) so reports can say which topology was applied.
    """

    links: frozenset
    source: str = "unspecified"

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(
            (src, dst) for src, dst in self.links))

    @classmethod
    def from_csv(cls, path: str) -> "SiteTopology":
        """Load a two-column ``from,to`` CSV; a literal header row is skipped."""
        links = set()
        with open(path, newline="", encoding="utf-8") as handle:
            for row_number, row in enumerate(csv.reader(handle), start=1):
                if not row:
                    continue
                if len(row) != 2:
                    raise ValueError(
                        f"topology row {row_number} needs exactly two columns: {row!r}")
                if row_number == 1 and row == ["from", "to"]:
                    continue
                links.add((row[0], row[1]))
        return cls(links=frozenset(links), source=f"csv:{path}")

    @classmethod
    def from_entries(cls, entries: Iterable[LogEntry]) -> "SiteTopology":
        """Derive links from observed referrer -> resource pairs.

        Referrers with a scheme are reduced to their path component so
        they compare against logged resources.
        """
        links = set()
        for entry in entries:
            if entry.referrer is None:
                continue
            referrer = entry.referrer
            if "://" in referrer:
                referrer = urlparse(referrer).path
            if referrer:
                links.add((referrer, entry.resource))
        return cls(links=frozenset(links), source="referrers")


def _confirms_links(pattern: Pattern, links: frozenset) -> bool:
    if isinstance(pattern, SequentialPattern):
        items = pattern.items
        if len(items) < 2:
            # Nothing to confirm: a single page states no link.
            return False
        return all((a, b) in links for a, b in zip(items, items[1:]))
    if isinstance(pattern, AssociationRule):
        if len(pattern.antecedent) == 1 and len(pattern.consequent) == 1:
            (a,) = pattern.antecedent
            (b,) = pattern.consequent
            return (a, b) in links
        return False
    raise TypeError(f"not a mined pattern: {pattern!r}")


def site_filter(patterns: Sequence[Pattern], topology: SiteTopology) -> List[Pattern]:
    """Drop results that only confirm direct hyperlinks.

    A sequential pattern goes iff every adjacent pair is a known link; a
    rule goes iff both sides are singletons joined by a known link.
    Everything else is kept, in input order.
    """
    return [p for p in patterns if not _confirms_links(p, topology.links)]


@dataclass(frozen=True)
class PatternPredicate:
    """Conjunction of optional thresholds on mined results.

    Unset fields do not constrain; ``min_confidence`` only applies to
    results that carry a confidence.  A rule's length is the size of both
    sides together; ``must_contain`` requires every listed resource.
    """

    min_support: Optional[float] = None
    min_confidence: Optional[float] = None
    min_length: Optional[int] = None
    max_length: Optional[int] = None
    must_contain: Optional[frozenset] = None

    def __post_init__(self):
        for name in ("min_support", "min_confidence"):
            value = getattr(self, name)
            if value is not None and not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1]: {value}")
        for name in ("min_length", "max_length"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be at least 1: {value}")
        if (self.min_length is not None and self.max_length is not None
                and self.min_length > self.max_length):
            raise ValueError("min_length must not exceed max_length")
        if self.must_contain is not None:
            object.__setattr__(self, "must_contain", frozenset(self.must_contain))

    def matches(self, pattern: Pattern) -> bool:
        if isinstance(pattern, SequentialPattern):
            length = len(pattern.items)
            resources = set(pattern.items)
            confidence = None
        else:
            length = len(pattern.antecedent) + len(pattern.consequent)
            resources = set(pattern.antecedent) | set(pattern.consequent)
            confidence = pattern.confidence
        if self.min_support is not None and pattern.support < self.min_support:
            return False
        if (self.min_confidence is not None and confidence is not None
                and confidence < self.min_confidence):
            return False
        if self.min_length is not None and length < self.min_length:
            return False
        if self.max_length is not None and length > self.max_length:
            return False
        if self.must_contain is not None and not self.must_contain <= resources:
            return False
        return True


def filter_patterns(patterns: Sequence[Pattern],
                    predicate: PatternPredicate) -> List[Pattern]:
    """Keep the results satisfying every set predicate field, in order."""
    return [p for p in patterns if predicate.matches(p)]


ReportValue = Union[NavigationGraph, Sequence[Pattern], Sequence[SessionCluster]]

_KIND_GRAPH = "graph"
_KIND_RULES = "rules"
_KIND_PATTERNS = "sequential_patterns"
_KIND_CLUSTERS = "clusters"


def _kind_of(results: ReportValue, kind: Optional[str]) -> str:
    if kind is not None:
        if kind not in (_KIND_GRAPH, _KIND_RULES, _KIND_PATTERNS, _KIND_CLUSTERS):
            raise ValueError(f"unknown report kind: {kind!r}")
        return kind
    if isinstance(results, NavigationGraph):
        return _KIND_GRAPH
    if isinstance(results, Sequence) and results:
        first = results[0]
        if isinstance(first, AssociationRule):
            return _KIND_RULES
        if isinstance(first, SequentialPattern):
            return _KIND_PATTERNS
        if isinstance(first, SessionCluster):
            return _KIND_CLUSTERS
    raise ValueError("cannot infer the report kind; pass kind= explicitly")


def _rule_to_dict(rule: AssociationRule) -> dict:
    return {
        "antecedent": sorted(rule.antecedent),
        "consequent": sorted(rule.consequent),
        "support": rule.support,
        "confidence": rule.confidence,
        "count": rule.count,
    }


def _pattern_to_dict(pattern: SequentialPattern) -> dict:
    return {
        "items": list(pattern.items),
        "support": pattern.support,
        "count": pattern.count,
    }


def _cluster_to_dict(cluster: SessionCluster) -> dict:
    return {
        "members": sorted(cluster.member_session_ids),
        "medoid": cluster.medoid,
    }


def _graph_to_dict(graph: NavigationGraph) -> dict:
    return {
        "nodes": graph.sorted_nodes(),
        "edges": [
            {"source": s, "target": t, "count": c}
            for s, t, c in graph.sorted_edges()
        ],
    }


def render_report(results: ReportValue, fmt: str,
                  kind: Optional[str] = None) -> bytes:
    """Render mined results to bytes in ``json``, ``csv``, or ``dot``.

    DOT is only valid for navigation graphs; any other pairing raises
    ValueError.  ``kind`` disambiguates empty result lists.
    """
    fmt = fmt.lower()
    if fmt not in ("json", "csv", "dot"):
        raise ValueError(f"unknown report format: {fmt!r}")
    resolved = _kind_of(results, kind)
    if fmt == "dot":
        if resolved != _KIND_GRAPH:
            raise ValueError("DOT output is only defined for navigation graphs")
        return results.to_dot().encode("utf-8")
    if fmt == "json":
        document = {"schema_version": SCHEMA_VERSION, "kind": resolved}
        if resolved == _KIND_GRAPH:
            document[_KIND_GRAPH] = _graph_to_dict(results)
        elif resolved == _KIND_RULES:
            document[_KIND_RULES] = [_rule_to_dict(r) for r in results]
        elif resolved == _KIND_PATTERNS:
            document[_KIND_PATTERNS] = [_pattern_to_dict(p) for p in results]
        else:
            document[_KIND_CLUSTERS] = [_cluster_to_dict(c) for c in results]
        return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if resolved == _KIND_GRAPH:
        writer.writerow(["from", "to", "count"])
        for s, t, c in results.sorted_edges():
            writer.writerow([s, t, c])
    elif resolved == _KIND_RULES:
        writer.writerow(["antecedent", "consequent", "support", "confidence", "count"])
        for rule in results:
            writer.writerow(["|".join(sorted(rule.antecedent)),
                             "|".join(sorted(rule.consequent)),
                             repr(rule.support), repr(rule.confidence), rule.count])
    elif resolved == _KIND_PATTERNS:
        writer.writerow(["items", "support", "count"])
        for pattern in results:
            writer.writerow(["|".join(pattern.items),
                             repr(pattern.support), pattern.count])
    else:
        writer.writerow(["members", "medoid"])
        for cluster in results:
            writer.writerow(["|".join(str(m) for m in sorted(cluster.member_session_ids)),
                             cluster.medoid])
    return out.getvalue().encode("utf-8")


def read_report(data: Union[bytes, str]):
    """Parse a JSON report produced by ``render_report`` back into objects."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    document = json.loads(data)
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version: {version!r}")
    kind = document.get("kind")
    if kind == _KIND_GRAPH:
        payload = document[_KIND_GRAPH]
        return NavigationGraph(
            nodes=frozenset(payload["nodes"]),
            edges={(e["source"], e["target"]): e["count"]
                   for e in payload["edges"]})
    if kind == _KIND_RULES:
        return [AssociationRule(antecedent=frozenset(r["antecedent"]),
                                consequent=frozenset(r["consequent"]),
                                support=r["support"],
                                confidence=r["confidence"],
                                count=r["count"])
                for r in document[_KIND_RULES]]
    if kind == _KIND_PATTERNS:
        return [SequentialPattern(items=tuple(p["items"]),
                                  support=p["support"],
                                  count=p["count"])
                for p in document[_KIND_PATTERNS]]
    if kind == _KIND_CLUSTERS:
        return [SessionCluster(member_session_ids=frozenset(c["members"]),
                               medoid=c["medoid"])
                for c in document[_KIND_CLUSTERS]]
    raise ValueError(f"unknown report kind: {kind!r}")
