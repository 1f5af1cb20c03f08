"""Mining engines against brute-force oracles and hand-counted cases."""

import random

import pytest

from weblog_miner.mining import (
    AssociationRule,
    SequentialPattern,
    build_path_graph,
    build_waptree,
    cluster_sessions,
    frequent_itemsets,
    mine_association_rules,
    mine_sequences_projection,
    mine_sequences_waptree,
)
from weblog_miner.preprocess import SequenceDB, TransactionDB

import _oracles


def seq_db(*sequences):
    return SequenceDB(tuple(enumerate(tuple(s) for s in sequences)))


def txn_db(mapping):
    return TransactionDB(tuple((sid, frozenset(items))
                               for sid, items in mapping.items()))


SESSION_TABLE = {
    123: {"Condition_home.htm", "See_doctor.htm"},
    134: {"Side_effects.htm", "See_doctor.htm", "Screening.htm"},
    245: {"See_doctor.htm", "Condition_home.htm"},
}
CUSTOMER_TABLE = {
    123: {"Cola", "Pretzels", "Chips"},
    134: {"Diapers", "Cola", "Band aids", "Apples"},
    245: {"Cola", "Pretzels"},
}


class TestPathGraph:
    def test_adjacency_counting(self):
        graph = build_path_graph(seq_db("AB", "AB", "AC"))
        assert graph.edges == {("A", "B"): 2, ("A", "C"): 1}
        assert graph.nodes == {"A", "B", "C"}

    def test_empty_db(self):
        graph = build_path_graph(SequenceDB(()))
        assert graph.nodes == frozenset() and graph.edges == {}

    def test_count_conservation_on_random_dbs(self):
        rng = random.Random(3501)
        for _ in range(100):
            db, sequences = _oracles.random_sequence_db(rng)
            graph = build_path_graph(db)
            assert graph.total_traversals() == sum(len(s) - 1 for s in sequences)
            assert graph.nodes == {item for s in sequences for item in s}

    def test_dot_is_stable(self):
        graph = build_path_graph(seq_db("AB", "AB", "AC"))
        dot = graph.to_dot()
        assert dot == graph.to_dot()
        assert '"A" -> "B" [label=2];' in dot
        assert dot.index('"A" -> "B"') < dot.index('"A" -> "C"')


class TestAssociationRules:
    def test_session_table_reconstruction(self):
        rules = mine_association_rules(txn_db(SESSION_TABLE), 0.6, 0.75)
        assert len(rules) == 1
        rule = rules[0]
        assert rule.antecedent == frozenset({"Condition_home.htm"})
        assert rule.consequent == frozenset({"See_doctor.htm"})
        assert abs(rule.support - 2 / 3) < 1e-12
        assert rule.confidence == 1.0
        assert rule.count == 2

    def test_customer_table_reconstruction(self):
        rules = mine_association_rules(txn_db(CUSTOMER_TABLE), 0.6, 0.75)
        assert [(r.antecedent, r.consequent) for r in rules] == [
            (frozenset({"Pretzels"}), frozenset({"Cola"}))]
        assert abs(rules[0].support - 2 / 3) < 1e-12
        assert rules[0].confidence == 1.0

    def test_empty_db(self):
        assert mine_association_rules(TransactionDB(()), 0.5, 0.5) == []

    @pytest.mark.parametrize("support,confidence", [
        (0.0, 0.5), (1.1, 0.5), (0.5, 0.0), (0.5, 1.5), (-0.2, 0.5),
    ])
    def test_parameter_errors(self, support, confidence):
        with pytest.raises(ValueError):
            mine_association_rules(txn_db(SESSION_TABLE), support, confidence)

    def test_matches_brute_force_on_random_dbs(self):
        rng = random.Random(3502)
        for _ in range(100):
            n = rng.randint(1, 10)
            alphabet = "ABCDEF"[:rng.randint(1, 6)]
            transactions = [frozenset(rng.sample(alphabet,
                                                 rng.randint(1, len(alphabet))))
                            for _ in range(n)]
            min_support = rng.choice([0.1, 0.3, 0.5, 0.8])
            min_confidence = rng.choice([0.4, 0.6, 0.9])
            db = TransactionDB(tuple(enumerate(transactions)))
            expected_sets = _oracles.brute_frequent_itemsets(transactions, min_support)
            assert frequent_itemsets(db, min_support) == expected_sets
            got = [(r.antecedent, r.consequent, r.support, r.confidence, r.count)
                   for r in mine_association_rules(db, min_support, min_confidence)]
            assert got == _oracles.brute_rules(transactions, min_support,
                                               min_confidence)

    def test_downward_closure_of_reported_itemsets(self):
        rng = random.Random(3503)
        from itertools import combinations
        for _ in range(50):
            transactions = [frozenset(rng.sample("ABCDE", rng.randint(1, 5)))
                            for _ in range(rng.randint(1, 8))]
            db = TransactionDB(tuple(enumerate(transactions)))
            found = frequent_itemsets(db, 0.4)
            for itemset in found:
                for k in range(1, len(itemset)):
                    for sub in combinations(sorted(itemset), k):
                        assert frozenset(sub) in found

    def test_output_ordering(self):
        transactions = [frozenset("AB"), frozenset("AB"), frozenset("BC"),
                        frozenset("ABC"), frozenset("AC")]
        rules = mine_association_rules(TransactionDB(tuple(enumerate(transactions))),
                                       0.2, 0.1)
        keys = [(-r.support, -r.confidence, tuple(sorted(r.antecedent)),
                 tuple(sorted(r.consequent))) for r in rules]
        assert keys == sorted(keys)


THIRTY_PERCENT_PATTERN = ("A", "B", "C", "D", "E")


def thirty_percent_db(total=10, planted=3, seed=99):
    """A small corpus where exactly `planted` sequences contain A..E in order."""
    rng = random.Random(seed)
    sequences = []
    for i in range(total):
        if i < planted:
            seq = list(THIRTY_PERCENT_PATTERN)
            for _ in range(rng.randint(0, 3)):
                seq.insert(rng.randrange(len(seq) + 1), rng.choice("ABCF"))
        else:
            while True:
                seq = [rng.choice("ABCDEF") for _ in range(rng.randint(1, 8))]
                if not _oracles.contains_subsequence(seq, THIRTY_PERCENT_PATTERN):
                    break
        sequences.append(tuple(seq))
    assert sum(_oracles.contains_subsequence(s, THIRTY_PERCENT_PATTERN)
               for s in sequences) == planted
    return SequenceDB(tuple(enumerate(sequences)))


class TestSequenceEngines:
    @pytest.mark.parametrize("miner", [mine_sequences_projection,
                                       mine_sequences_waptree])
    def test_thirty_percent_scenario(self, miner):
        db = thirty_percent_db()
        by_items = {p.items: p for p in miner(db, 0.3)}
        found = by_items[THIRTY_PERCENT_PATTERN]
        assert found.support == 0.3
        assert found.count == 3
        assert THIRTY_PERCENT_PATTERN not in {p.items for p in miner(db, 0.301)}

    @pytest.mark.parametrize("miner", [mine_sequences_projection,
                                       mine_sequences_waptree])
    def test_singleton_db(self, miner):
        patterns = miner(seq_db("A"), 1.0)
        assert [(p.items, p.support) for p in patterns] == [(("A",), 1.0)]

    @pytest.mark.parametrize("miner", [mine_sequences_projection,
                                       mine_sequences_waptree])
    def test_empty_db(self, miner):
        assert miner(SequenceDB(()), 0.5) == []

    @pytest.mark.parametrize("miner", [mine_sequences_projection,
                                       mine_sequences_waptree])
    def test_parameter_errors(self, miner):
        with pytest.raises(ValueError):
            miner(seq_db("A"), 0.0)
        with pytest.raises(ValueError):
            miner(seq_db("A"), 1.2)
        with pytest.raises(ValueError):
            miner(seq_db("A"), 0.5, max_length=0)

    def test_max_length_bounds_output(self):
        db = seq_db("ABCD", "ABCD")
        patterns = mine_sequences_projection(db, 1.0, max_length=2)
        assert max(len(p.items) for p in patterns) == 2

    def test_engines_agree_with_oracle(self):
        rng = random.Random(3504)
        for _ in range(100):
            db, sequences = _oracles.random_sequence_db(rng)
            min_support = rng.choice([0.1, 0.2, 0.3, 0.5, 0.7])
            projection = mine_sequences_projection(db, min_support, 8)
            waptree = mine_sequences_waptree(db, min_support, 8)
            assert [(p.items, p.support, p.count) for p in projection] == \
                   [(p.items, p.support, p.count) for p in waptree]
            oracle = _oracles.brute_sequential_patterns(sequences, min_support, 8)
            assert {p.items: p.count for p in projection} == oracle

    def test_lexicographic_dfs_order(self):
        db = seq_db("BA", "AB", "AABB")
        patterns = mine_sequences_projection(db, 0.3, 8)
        items = [p.items for p in patterns]
        assert items == sorted(items)

    def test_anti_monotone_supports(self):
        rng = random.Random(3505)
        for _ in range(30):
            db, sequences = _oracles.random_sequence_db(rng)
            patterns = {p.items: p.count for p in
                        mine_sequences_projection(db, 0.3, 6)}
            for items, count in patterns.items():
                for drop in range(len(items)):
                    sub = items[:drop] + items[drop + 1:]
                    if sub:
                        sub_count = sum(
                            1 for s in sequences
                            if _oracles.contains_subsequence(s, sub))
                        assert sub_count >= count


class TestWapTree:
    def test_infrequent_event_removed(self):
        tree = build_waptree(seq_db("AB", "AB", "AC"), 0.5)
        root_children = tree.root.children
        assert set(root_children) == {"A"}
        a = root_children["A"]
        assert a.count == 3
        assert set(a.children) == {"B"}
        assert a.children["B"].count == 2

    def test_single_sequence_is_one_path(self):
        tree = build_waptree(seq_db("XYZ"), 1.0)
        node, path = tree.root, []
        while node.children:
            assert len(node.children) == 1
            node = next(iter(node.children.values()))
            assert node.count == 1
            path.append(node.symbol)
        assert path == ["X", "Y", "Z"]

    def test_root_child_counts_cover_nonempty_sequences(self):
        rng = random.Random(3506)
        for _ in range(100):
            db, sequences = _oracles.random_sequence_db(rng)
            min_support = rng.choice([0.2, 0.4, 0.6])
            tree = build_waptree(db, min_support)
            n = len(sequences)
            frequent = {e for e in {i for s in sequences for i in s}
                        if sum(1 for s in sequences if e in s) / n >= min_support}
            nonempty = sum(1 for s in sequences if any(e in frequent for e in s))
            assert sum(c.count for c in tree.root.children.values()) == nonempty
            assert tree.root.count == nonempty

    def test_codes_are_unique_and_encode_ancestry(self):
        rng = random.Random(3507)
        for _ in range(50):
            db, _sequences = _oracles.random_sequence_db(rng)
            tree = build_waptree(db, 0.1)
            nodes = []
            stack = [tree.root]
            while stack:
                node = stack.pop()
                nodes.append(node)
                stack.extend(node.children.values())
            codes = [n.code for n in nodes]
            assert len(set(codes)) == len(codes)
            for node in nodes:
                assert sum(c.count for c in node.children.values()) <= node.count

            def ancestors(node):
                out = set()
                walker = node.parent
                while walker is not None:
                    out.add(id(walker))
                    walker = walker.parent
                return out

            for a in nodes:
                for b in nodes:
                    is_prefix = a is not b and b.code.startswith(a.code)
                    assert is_prefix == (id(a) in ancestors(b))

    def test_header_lists_every_node_by_symbol(self):
        tree = build_waptree(seq_db("AB", "ABA", "BA"), 0.1)
        for symbol, nodes in tree.header.items():
            assert all(n.symbol == symbol for n in nodes)
        total = sum(len(v) for v in tree.header.values())
        count = 0
        stack = [tree.root]
        while stack:
            node = stack.pop()
            count += len(node.children)
            stack.extend(node.children.values())
        assert total == count


class TestClustering:
    def test_identical_page_sets_cluster_together(self):
        sessions = [_oracles.sequential_session(
            _oracles.random_session(random.Random(0)).user,
            ["/a", "/b"], _oracles.random_session(random.Random(0)).start, [10])
            for _ in range(2)]
        clusters = cluster_sessions(sessions, 0.9)
        assert len(clusters) == 1
        assert clusters[0].member_session_ids == {0, 1}

    def test_disjoint_page_sets_stay_apart(self):
        rng = random.Random(3508)
        user = _oracles.random_session(rng).user
        start = _oracles.random_session(rng).start
        sessions = [_oracles.sequential_session(user, ["/a"], start, []),
                    _oracles.sequential_session(user, ["/b"], start, [])]
        clusters = cluster_sessions(sessions, 0.1)
        assert [sorted(c.member_session_ids) for c in clusters] == [[0], [1]]

    def test_threshold_range_enforced(self):
        with pytest.raises(ValueError):
            cluster_sessions([], -0.1)
        with pytest.raises(ValueError):
            cluster_sessions([], 1.5)

    def test_components_match_brute_force(self):
        rng = random.Random(3509)
        for _ in range(100):
            sessions = [_oracles.random_session(rng)
                        for _ in range(rng.randint(0, 10))]
            threshold = rng.choice([0.0, 0.2, 0.5, 0.9, 1.0])
            clusters = cluster_sessions(sessions, threshold)
            # brute-force connected components
            n = len(sessions)
            page_sets = [s.page_set for s in sessions]

            def jaccard(i, j):
                union = page_sets[i] | page_sets[j]
                return len(page_sets[i] & page_sets[j]) / len(union) if union else 1.0

            labels = list(range(n))
            changed = True
            while changed:
                changed = False
                for i in range(n):
                    for j in range(n):
                        if i != j and jaccard(i, j) >= threshold:
                            merged = min(labels[i], labels[j])
                            if labels[i] != merged or labels[j] != merged:
                                labels[i] = labels[j] = merged
                                changed = True
            expected = {}
            for i, label in enumerate(labels):
                expected.setdefault(label, set()).add(i)
            assert sorted(sorted(c.member_session_ids) for c in clusters) == \
                   sorted(sorted(m) for m in expected.values())
            # medoid: max summed similarity, ties to the lowest id
            for cluster in clusters:
                members = sorted(cluster.member_session_ids)
                def summed(i):
                    return sum(jaccard(i, j) for j in members if j != i)
                best = min(members, key=lambda i: (-summed(i), i))
                assert cluster.medoid == best

    def test_clusters_partition_the_input(self):
        rng = random.Random(3510)
        sessions = [_oracles.random_session(rng) for _ in range(12)]
        clusters = cluster_sessions(sessions, 0.5)
        seen = sorted(i for c in clusters for i in c.member_session_ids)
        assert seen == list(range(12))


class TestResultInvariants:
    def test_rule_validation(self):
        with pytest.raises(ValueError):
            AssociationRule(antecedent=frozenset(), consequent=frozenset("B"),
                            support=0.5, confidence=0.6, count=1)
        with pytest.raises(ValueError):
            AssociationRule(antecedent=frozenset("A"), consequent=frozenset("A"),
                            support=0.5, confidence=0.6, count=1)
        with pytest.raises(ValueError):
            AssociationRule(antecedent=frozenset("A"), consequent=frozenset("B"),
                            support=0.7, confidence=0.6, count=1)

    def test_pattern_validation(self):
        with pytest.raises(ValueError):
            SequentialPattern(items=(), support=0.5, count=1)
        with pytest.raises(ValueError):
            SequentialPattern(items=("A",), support=1.5, count=1)
