"""Pattern discovery over the session databases.

Four miners live here:

* a navigation graph counting adjacent page transitions,
* level-wise Apriori association rules with downward-closure pruning,
* two sequential-pattern engines with identical contracts: one grows
  prefixes over projected databases, the other mines a single web-access
  pattern tree whose nodes carry binary position codes so conditional
  search never rebuilds intermediate trees,
* single-link session clustering on Jaccard page-set similarity.

Sequential patterns use subsequence containment (not necessarily
contiguous) counted at most once per sequence.  Support values are the
exact rationals count/db_size evaluated in floating point, so equal
counts compare equal across engines.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .preprocess import SequenceDB, Session, TransactionDB

__all__ = [
    "NavigationGraph",
    "AssociationRule",
    "SequentialPattern",
    "WapNode",
    "WapTree",
    "SessionCluster",
    "build_path_graph",
    "frequent_itemsets",
    "mine_association_rules",
    "mine_sequences_projection",
    "build_waptree",
    "mine_sequences_waptree",
    "cluster_sessions",
]

DEFAULT_MAX_PATTERN_LENGTH = 10


def _check_fraction(name: str, value: float) -> None:
    if not 0 < value <= 1:
        raise ValueError(f"{name} must be in (0, 1]: {value}")


def _check_max_length(max_length: Optional[int]) -> None:
    if max_length is not None and max_length < 1:
        raise ValueError(f"max_length must be at least 1: {max_length}")


@dataclass(frozen=True)
class NavigationGraph:
    """Directed page graph; each edge counts observed adjacent transitions."""

    nodes: frozenset
    edges: dict  # (from, to) -> traversal count

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", dict(self.edges))
        for (src, dst), count in self.edges.items():
            if src not in self.nodes or dst not in self.nodes:
                raise ValueError(f"edge endpoint not in nodes: {(src, dst)}")
            if count < 1:
                raise ValueError(f"edge counts must be >= 1: {(src, dst)}={count}")

    def sorted_nodes(self) -> List[str]:
        return sorted(self.nodes)

    def sorted_edges(self) -> List[Tuple[str, str, int]]:
        return [(s, t, self.edges[(s, t)]) for s, t in sorted(self.edges)]

    def total_traversals(self) -> int:
        return sum(self.edges.values())

    def to_dot(self) -> str:
        """DOT rendering with nodes and edges in lexicographic order."""
        def quote(name: str) -> str:
            return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = ["digraph {"]
        for node in self.sorted_nodes():
            lines.append(f"  {quote(node)};")
        for src, dst, count in self.sorted_edges():
            lines.append(f"  {quote(src)} -> {quote(dst)} [label={count}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_path_graph(db: SequenceDB) -> NavigationGraph:
    """Count every adjacent page pair across all sequences.

    Nodes cover every resource seen anywhere, including pages that only
    appear in single-visit sessions.
    """
    nodes = set()
    edges: Dict[Tuple[str, str], int] = {}
    for _sid, seq in db.sequences:
        nodes.update(seq)
        for src, dst in zip(seq, seq[1:]):
            edges[(src, dst)] = edges.get((src, dst), 0) + 1
    return NavigationGraph(nodes=frozenset(nodes), edges=edges)


@dataclass(frozen=True)
class AssociationRule:
    """X -> Y with fractional support/confidence and the raw joint count."""

    antecedent: frozenset
    consequent: frozenset
    support: float
    confidence: float
    count: int

    def __post_init__(self):
        if not self.antecedent or not self.consequent:
            raise ValueError("rule sides must be non-empty")
        if self.antecedent & self.consequent:
            raise ValueError("rule sides must be disjoint")
        if not 0 <= self.support <= 1 or not 0 <= self.confidence <= 1:
            raise ValueError("support and confidence must lie in [0, 1]")
        if self.confidence < self.support:
            raise ValueError("confidence cannot be below support")


@dataclass(frozen=True)
class SequentialPattern:
    """An ordered page list with its fractional support and raw count."""

    items: tuple
    support: float
    count: int

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("pattern must be non-empty")
        if not 0 <= self.support <= 1:
            raise ValueError("support must lie in [0, 1]")


def frequent_itemsets(db: TransactionDB, min_support: float) -> Dict[frozenset, int]:
    """Level-wise Apriori: all frequent itemsets with their counts.

    Candidates of size k are joined from frequent (k-1)-itemsets sharing a
    (k-2)-prefix and pruned by downward closure before counting.
    """
    _check_fraction("min_support", min_support)
    transactions = [items for _sid, items in db.transactions]
    n = len(transactions)
    if n == 0:
        return {}

    def frequent(count: int) -> bool:
        return count / n >= min_support

    counts: Dict[frozenset, int] = {}
    for items in transactions:
        for item in items:
            key = frozenset((item,))
            counts[key] = counts.get(key, 0) + 1
    result = {s: c for s, c in counts.items() if frequent(c)}
    level = sorted(tuple(sorted(s)) for s in result)
    k = 2
    while level:
        candidates = set()
        for a, b in combinations(level, 2):
            if a[:-1] == b[:-1]:
                candidate = frozenset(a) | frozenset(b)
                if len(candidate) == k and all(
                        frozenset(sub) in result
                        for sub in combinations(sorted(candidate), k - 1)):
                    candidates.add(candidate)
        if not candidates:
            break
        tally = {c: 0 for c in candidates}
        for items in transactions:
            for candidate in candidates:
                if candidate <= items:
                    tally[candidate] += 1
        survivors = {c: t for c, t in tally.items() if frequent(t)}
        result.update(survivors)
        level = sorted(tuple(sorted(s)) for s in survivors)
        k += 1
    return result


def mine_association_rules(db: TransactionDB, min_support: float,
                           min_confidence: float) -> List[AssociationRule]:
    """All rules X -> Y meeting both thresholds.

    Every non-empty proper split of each frequent itemset of size >= 2 is
    considered; confidence is count(X u Y) / count(X).  Output is sorted
    by support descending, confidence descending, then lexicographically.
    """
    _check_fraction("min_support", min_support)
    _check_fraction("min_confidence", min_confidence)
    n = len(db.transactions)
    if n == 0:
        return []
    itemsets = frequent_itemsets(db, min_support)
    rules = []
    for itemset, count in itemsets.items():
        if len(itemset) < 2:
            continue
        items = sorted(itemset)
        for size in range(1, len(items)):
            for antecedent in combinations(items, size):
                ant = frozenset(antecedent)
                confidence = count / itemsets[ant]
                if confidence >= min_confidence:
                    rules.append(AssociationRule(
                        antecedent=ant,
                        consequent=itemset - ant,
                        support=count / n,
                        confidence=confidence,
                        count=count,
                    ))
    rules.sort(key=lambda r: (-r.support, -r.confidence,
                              tuple(sorted(r.antecedent)),
                              tuple(sorted(r.consequent))))
    return rules


def mine_sequences_projection(db: SequenceDB, min_support: float,
                              max_length: Optional[int] = DEFAULT_MAX_PATTERN_LENGTH,
                              ) -> List[SequentialPattern]:
    """Prefix-growth mining over projected databases.

    Each projection is a list of (sequence index, suffix start) pairs, so
    extending a prefix only rescans the live suffixes.  Patterns come out
    in lexicographic depth-first order.
    """
    _check_fraction("min_support", min_support)
    _check_max_length(max_length)
    sequences = [seq for _sid, seq in db.sequences]
    n = len(sequences)
    if n == 0:
        return []
    patterns: List[SequentialPattern] = []

    def extend(prefix: tuple, projections: List[Tuple[int, int]]) -> None:
        counts: Dict[str, int] = {}
        for si, start in projections:
            seen = set()
            for item in sequences[si][start:]:
                if item not in seen:
                    seen.add(item)
                    counts[item] = counts.get(item, 0) + 1
        for item in sorted(counts):
            count = counts[item]
            if count / n < min_support:
                continue
            grown = prefix + (item,)
            patterns.append(SequentialPattern(
                items=grown, support=count / n, count=count))
            if max_length is None or len(grown) < max_length:
                projected = []
                for si, start in projections:
                    seq = sequences[si]
                    for j in range(start, len(seq)):
                        if seq[j] == item:
                            projected.append((si, j + 1))
                            break
                extend(grown, projected)

    extend((), [(i, 0) for i in range(n)])
    return patterns


@dataclass(eq=False)
class WapNode:
    """One tree node: event symbol, pass-through count, binary code.

    The root has symbol None and an empty code.  A child's code appends
    its index, written in the minimal bit width for the parent's child
    count (at least one bit, so codes stay unique).
    """

    symbol: Optional[str]
    count: int = 0
    code: str = ""
    parent: Optional["WapNode"] = None
    children: dict = field(default_factory=dict)  # symbol -> WapNode


@dataclass
class WapTree:
    """Prefix tree over frequency-filtered access sequences.

    ``header`` links every non-root node by symbol, in insertion order;
    ``sequence_count`` keeps the database size for support fractions.
    """

    root: WapNode
    header: dict  # symbol -> list of WapNode
    sequence_count: int


def _is_ancestor_or_self(node: WapNode, other: WapNode) -> bool:
    """Code-prefix ancestor test: codes are unique and prefix-closed."""
    return other.code.startswith(node.code)


def build_waptree(db: SequenceDB, min_support: float) -> WapTree:
    """Insert each sequence, minus its infrequent events, into one tree.

    Event frequency is counted once per sequence.  Node counts equal the
    number of sequences whose filtered prefix passes through the node;
    binary position codes are assigned once all children are known.
    """
    _check_fraction("min_support", min_support)
    sequences = [seq for _sid, seq in db.sequences]
    n = len(sequences)
    event_counts: Dict[str, int] = {}
    for seq in sequences:
        for event in set(seq):
            event_counts[event] = event_counts.get(event, 0) + 1
    frequent = {e for e, c in event_counts.items() if n and c / n >= min_support}

    root = WapNode(symbol=None)
    header: Dict[str, List[WapNode]] = {}
    for seq in sequences:
        filtered = [e for e in seq if e in frequent]
        if not filtered:
            continue
        node = root
        node.count += 1
        for event in filtered:
            child = node.children.get(event)
            if child is None:
                child = WapNode(symbol=event, parent=node)
                node.children[event] = child
                header.setdefault(event, []).append(child)
            child.count += 1
            node = child

    stack = [root]
    while stack:
        node = stack.pop()
        kids = list(node.children.values())
        if kids:
            width = max(1, (len(kids) - 1).bit_length())
            for i, child in enumerate(kids):
                child.code = node.code + format(i, f"0{width}b")
                stack.append(child)
    return WapTree(root=root, header=header, sequence_count=n)


def mine_sequences_waptree(db: SequenceDB, min_support: float,
                           max_length: Optional[int] = DEFAULT_MAX_PATTERN_LENGTH,
                           ) -> List[SequentialPattern]:
    """Mine the tree by suffix growth without building conditional trees.

    A conditional base is a set of (node, count) pairs, each standing for
    ``count`` sequences whose remaining prefix is the root path ending at
    ``node``.  Extending by an event walks that event's header list and
    keeps the deepest entry whose binary code is a prefix of the base
    node's code, i.e. its deepest occurrence on the path.  Counts stay
    disjoint, so every sequence is counted at most once per pattern.

    Returns the same (pattern, support) list as the projection engine, in
    the same lexicographic order.
    """
    _check_fraction("min_support", min_support)
    _check_max_length(max_length)
    tree = build_waptree(db, min_support)
    n = tree.sequence_count
    if n == 0 or not tree.header:
        return []
    # Header lists sorted by code length descending: the first prefix hit
    # while scanning is automatically the deepest occurrence.
    by_depth = {
        event: sorted(nodes, key=lambda nd: -len(nd.code))
        for event, nodes in tree.header.items()
    }
    events = sorted(tree.header)
    patterns: List[SequentialPattern] = []

    def grow(suffix: tuple, base: Dict[WapNode, int]) -> None:
        if max_length is not None and len(suffix) >= max_length:
            return
        for event in events:
            candidates = by_depth[event]
            support_count = 0
            projected: Dict[WapNode, int] = {}
            for node, count in base.items():
                for occurrence in candidates:
                    if len(occurrence.code) <= len(node.code) and \
                            _is_ancestor_or_self(occurrence, node):
                        support_count += count
                        parent = occurrence.parent
                        if parent is not tree.root:
                            projected[parent] = projected.get(parent, 0) + count
                        break
            if support_count and support_count / n >= min_support:
                patterns.append(SequentialPattern(
                    items=(event,) + suffix,
                    support=support_count / n,
                    count=support_count))
                grow((event,) + suffix, projected)

    for event in events:
        occurrences = tree.header[event]
        # Attribute each sequence to its deepest occurrence of the event:
        # subtract the counts of occurrences whose nearest same-symbol
        # ancestor is this node.
        nested: Dict[int, int] = {}
        for node in occurrences:
            walker = node.parent
            while walker is not None and walker.symbol is not None:
                if walker.symbol == event:
                    nested[id(walker)] = nested.get(id(walker), 0) + node.count
                    break
                walker = walker.parent
        support_count = 0
        base: Dict[WapNode, int] = {}
        for node in occurrences:
            attributed = node.count - nested.get(id(node), 0)
            if attributed <= 0:
                continue
            support_count += attributed
            parent = node.parent
            if parent is not tree.root:
                base[parent] = base.get(parent, 0) + attributed
        if support_count and support_count / n >= min_support:
            patterns.append(SequentialPattern(
                items=(event,), support=support_count / n, count=support_count))
            grow((event,), base)

    patterns.sort(key=lambda p: p.items)
    return patterns


@dataclass(frozen=True)
class SessionCluster:
    """A group of session ids with its most central member."""

    member_session_ids: frozenset
    medoid: int

    def __post_init__(self):
        object.__setattr__(self, "member_session_ids",
                           frozenset(self.member_session_ids))
        if self.medoid not in self.member_session_ids:
            raise ValueError("medoid must be a member of the cluster")


def cluster_sessions(sessions: Sequence[Session],
                     similarity_threshold: float) -> List[SessionCluster]:
    """Single-link clusters over Jaccard similarity of page sets.

    Sessions are adjacent when the Jaccard similarity of their page sets
    is at least the threshold; clusters are the connected components of
    that graph.  Session ids are positions in the input list, the medoid
    maximizes summed similarity to the rest of its cluster (ties go to
    the lowest id).
    """
    if not 0 <= similarity_threshold <= 1:
        raise ValueError(
            f"similarity threshold must be in [0, 1]: {similarity_threshold}")
    page_sets = [s.page_set for s in sessions]
    n = len(page_sets)

    def jaccard(i: int, j: int) -> float:
        a, b = page_sets[i], page_sets[j]
        union = len(a | b)
        return len(a & b) / union if union else 1.0

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    similarity = {}
    for i in range(n):
        for j in range(i + 1, n):
            sim = jaccard(i, j)
            similarity[(i, j)] = sim
            if sim >= similarity_threshold:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    components: Dict[int, List[int]] = {}
    for i in range(n):
        components.setdefault(find(i), []).append(i)

    clusters = []
    for _root, members in sorted(components.items()):
        def summed(i: int) -> float:
            return sum(similarity[tuple(sorted((i, j)))]
                       for j in members if j != i)
        medoid = min(members, key=lambda i: (-summed(i), i))
        clusters.append(SessionCluster(
            member_session_ids=frozenset(members), medoid=medoid))
    return clusters
