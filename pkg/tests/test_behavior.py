"""Active-time modelling, interest profiles, and the synthetic generator."""

import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from weblog_miner.behavior import (
    ClientEvent,
    EventKind,
    GeneratorSpec,
    InterestProfile,
    active_time,
    build_interest_profile,
    events_from_csv,
    events_to_csv,
    generate_synthetic,
    merge_client_events,
    path_tokens,
    rerank,
    window_active_times,
)
from weblog_miner.logs import LogFormat, parse_log
from weblog_miner.preprocess import UserKey, UserKeyKind, clean, identify_users, sessionize

import _oracles

T0 = datetime(2000, 10, 10, 12, 0, 0, tzinfo=timezone.utc)
USER = UserKey(UserKeyKind.IP_AGENT, "10.0.0.1|UA")


def session_spanning(seconds, resource="/page.html"):
    return _oracles.sequential_session(USER, [resource, resource], T0, [seconds])


def event(seconds, resource="/page.html", window="w1", user=USER,
          kind=EventKind.CLICK):
    return ClientEvent(user=user, window_id=window, resource=resource,
                       timestamp=T0 + timedelta(seconds=seconds), kind=kind)


class TestActiveTime:
    def test_ninety_second_example(self):
        session = session_spanning(600)
        ext = merge_client_events(session, [event(0), event(30), event(600)], 60)
        assert ext.active_seconds == 90.0
        assert ext.elapsed_seconds == 600.0
        assert active_time(ext) == 90.0

    def test_no_events_means_no_active_time(self):
        ext = merge_client_events(session_spanning(600), [], 60)
        assert ext.active_seconds == 0.0
        assert ext.elapsed_seconds == 600.0

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            merge_client_events(session_spanning(10), [], 0)

    def test_foreign_window_steals_the_span(self):
        # One click on the session's page, then the user works elsewhere.
        session = session_spanning(300)
        events = [event(0), event(10, resource="/elsewhere.html", window="w2")]
        ext = merge_client_events(session, events, 120)
        assert ext.active_seconds == 10.0

    def test_other_users_events_are_ignored(self):
        stranger = UserKey(UserKeyKind.IP_AGENT, "9.9.9.9|Other")
        ext = merge_client_events(session_spanning(100),
                                  [event(0, user=stranger)], 60)
        assert ext.active_seconds == 0.0
        assert ext.events == ()

    def test_events_outside_window_are_dropped(self):
        session = session_spanning(100)
        events = [event(-50), event(100 + 61)]
        ext = merge_client_events(session, events, 60)
        assert ext.events == ()

    def test_credit_is_clipped_at_session_end(self):
        session = session_spanning(100)
        ext = merge_client_events(session, [event(90)], 60)
        assert ext.active_seconds == 10.0

    def test_matches_simulation_on_random_traces(self):
        rng = random.Random(5701)
        for _ in range(200):
            pages = ["/page.html", "/other.html", "/far.html"]
            visit_count = rng.randint(2, 5)
            gaps = [rng.randint(1, 300) for _ in range(visit_count - 1)]
            session = _oracles.sequential_session(
                USER, [rng.choice(pages[:2]) for _ in range(visit_count)],
                T0, gaps)
            threshold = rng.choice([5, 17, 60, 120])
            events = _oracles.random_event_trace(
                rng, USER, pages, session.start,
                int((session.end - session.start).total_seconds()), windows=3)
            ext = merge_client_events(session, events, threshold)
            simulated = _oracles.simulate_session_active(session, ext.events,
                                                         threshold)
            assert ext.active_seconds == simulated
            assert 0 <= ext.active_seconds <= ext.elapsed_seconds

    def test_window_totals_match_simulation_and_bound(self):
        rng = random.Random(5702)
        for _ in range(100):
            span = rng.randint(10, 600)
            start, end = T0, T0 + timedelta(seconds=span)
            events = _oracles.random_event_trace(rng, USER, ["/a", "/b"],
                                                 start, span, windows=4)
            threshold = rng.choice([5, 30, 90])
            totals = window_active_times(events, start, end, threshold)
            simulated = _oracles.simulate_window_seconds(events, start, end,
                                                         threshold)
            assert {w: t for w, t in totals.items() if t} == \
                   {w: float(c) for w, c in simulated.items()}
            assert sum(totals.values()) <= span + 1e-9

    def test_active_time_monotone_in_threshold(self):
        rng = random.Random(5703)
        for _ in range(50):
            span = rng.randint(60, 600)
            session = session_spanning(span)
            events = _oracles.random_event_trace(
                rng, USER, ["/page.html", "/other.html"], T0, span)
            previous = -1.0
            for threshold in (5, 15, 60, 180, 900):
                ext = merge_client_events(session, events, threshold)
                assert ext.active_seconds >= previous
                previous = ext.active_seconds


class TestPathTokens:
    def test_extension_and_case_folding(self):
        assert path_tokens("/Sports/Cricket.html") == ["sports", "cricket"]

    def test_query_and_fragment_stripped(self):
        assert path_tokens("/news/today.html?id=7#top") == ["news", "today"]

    def test_hidden_segment_kept_whole(self):
        assert path_tokens("/.well-known/x") == [".well-known", "x"]


class TestInterestProfile:
    def test_first_page_boost_example(self):
        session = _oracles.sequential_session(
            USER, ["/sports/cricket.html"], T0, [])
        profile = build_interest_profile([session])
        assert profile.weights == {"sports": 2.0, "cricket": 2.0}

    def test_empty_history(self):
        profile = build_interest_profile([])
        assert profile.weights == {}

    def test_mixed_users_rejected(self):
        other = UserKey(UserKeyKind.AUTH_USER, "frank")
        sessions = [_oracles.sequential_session(USER, ["/a"], T0, []),
                    _oracles.sequential_session(other, ["/a"], T0, [])]
        with pytest.raises(ValueError):
            build_interest_profile(sessions)

    def test_boost_below_one_rejected(self):
        with pytest.raises(ValueError):
            InterestProfile(weights={}, first_page_boost=0.5)

    def test_weights_match_direct_recount(self):
        rng = random.Random(5704)
        for _ in range(200):
            sessions = [_oracles.random_session(rng, user=USER)
                        for _ in range(rng.randint(0, 5))]
            boost = rng.choice([1.0, 1.5, 2.0, 3.0])
            profile = build_interest_profile(sessions, first_page_boost=boost)
            expected = {}
            for session in sessions:
                for i, visit in enumerate(session.visits):
                    for token in path_tokens(visit.resource):
                        expected[token] = expected.get(token, 0.0) + (
                            boost if i == 0 else 1.0)
            assert profile.weights == expected
            assert all(w >= 0 for w in profile.weights.values())


class TestRerank:
    def test_profile_pulls_matching_pages_up(self):
        profile = InterestProfile(weights={"sports": 2.0})
        ranked = rerank(profile, ["/news/a.html", "/sports/b.html"])
        assert ranked == ["/sports/b.html", "/news/a.html"]

    def test_empty_profile_keeps_input_order(self):
        profile = InterestProfile(weights={})
        candidates = ["/c.html", "/a.html", "/b.html"]
        assert rerank(profile, candidates) == candidates

    @given(st.lists(st.sampled_from(sorted(_oracles.PAGES)), max_size=12),
           st.dictionaries(st.sampled_from(["sports", "news", "products"]),
                           st.floats(min_value=0, max_value=5), max_size=3))
    def test_permutation_and_sortedness(self, candidates, weights):
        profile = InterestProfile(weights=weights)
        ranked = rerank(profile, candidates)
        assert sorted(ranked) == sorted(candidates)
        scores = [profile.score(c) for c in ranked]
        assert scores == sorted(scores, reverse=True)

    def test_adding_a_token_never_lowers_scores(self):
        base = InterestProfile(weights={"sports": 1.0})
        richer = InterestProfile(weights={"sports": 1.0, "news": 2.0})
        for page in _oracles.PAGES:
            assert richer.score(page) >= base.score(page)


class TestEventCsv:
    def test_round_trip(self):
        events = [event(0), event(5, window="w2", kind=EventKind.SCROLL),
                  event(9, resource="/other, with comma")]
        assert events_from_csv(events_to_csv(events)) == events

    def test_header_required(self):
        with pytest.raises(ValueError):
            events_from_csv("nope\n")


SPEC = GeneratorSpec(
    user_count=4,
    pages=("/a.html", "/b.html", "/c.html", "/d.html", "/e.html", "/f.html"),
    session_count=60,
    planted_patterns=((("/a.html", "/b.html", "/c.html"), 0.25),),
    asset_noise_rate=0.2,
    corruption_rate=0.1,
    event_rate=0.8,
)


class TestGenerator:
    def test_deterministic(self):
        assert generate_synthetic(SPEC, 7) == generate_synthetic(SPEC, 7)

    def test_different_seeds_differ(self):
        assert generate_synthetic(SPEC, 7) != generate_synthetic(SPEC, 8)

    def test_planted_support_is_exact(self):
        corpus = generate_synthetic(SPEC, 7)
        truth = corpus.ground_truth
        pattern = tuple(truth["planted"][0]["pattern"])
        planted = set(truth["planted"][0]["session_indexes"])
        assert len(planted) == round(0.25 * SPEC.session_count)
        for record in truth["sessions"]:
            contained = _oracles.contains_subsequence(record["pages"], pattern)
            assert contained == (record["session_index"] in planted)

    def test_corruption_matches_parse_report(self):
        corpus = generate_synthetic(SPEC, 11)
        _records, report = parse_log(list(corpus.access_log_lines),
                                     LogFormat.COMBINED)
        truth = corpus.ground_truth
        assert report.total_lines == truth["counts"]["total_lines"]
        assert report.malformed == truth["counts"]["corrupted_lines"]
        assert sorted(n - 1 for n, _ in report.first_errors)[:50] == \
               truth["corrupted_line_numbers"][:50]

    def test_assets_are_exactly_what_clean_removes(self):
        spec = GeneratorSpec(**{**SPEC.__dict__, "corruption_rate": 0.0})
        corpus = generate_synthetic(spec, 13)
        records, report = parse_log(list(corpus.access_log_lines),
                                    LogFormat.COMBINED)
        assert report.malformed == 0
        kept = clean(records)
        assert len(records) - len(kept) == corpus.ground_truth["counts"]["asset_lines"]

    def test_pipeline_recovers_ground_truth_sessions(self):
        spec = GeneratorSpec(**{**SPEC.__dict__, "corruption_rate": 0.0})
        corpus = generate_synthetic(spec, 17)
        records, _report = parse_log(list(corpus.access_log_lines),
                                     LogFormat.COMBINED)
        rebuilt = []
        for user, entries in identify_users(clean(records)).items():
            for session in sessionize(entries, 1800, user=user):
                rebuilt.append((user.as_string(), session.start.isoformat(),
                                list(session.resources)))
        expected = [(s["user"], s["start_time"], s["pages"])
                    for s in corpus.ground_truth["sessions"]]
        assert sorted(rebuilt) == sorted(expected)

    def test_event_lines_parse_back(self):
        corpus = generate_synthetic(SPEC, 19)
        events = events_from_csv("\n".join(corpus.client_event_lines) + "\n")
        assert len(events) == corpus.ground_truth["counts"]["client_events"]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            GeneratorSpec(user_count=0, pages=("/a",), session_count=1)
        with pytest.raises(ValueError):
            GeneratorSpec(user_count=1, pages=(), session_count=1)
        with pytest.raises(ValueError):
            GeneratorSpec(user_count=1, pages=("/a",), session_count=10,
                          corruption_rate=1.5)
        with pytest.raises(ValueError):
            GeneratorSpec(user_count=1, pages=("/a",), session_count=10,
                          planted_patterns=((("/a",), 0.8), (("/b",), 0.8)))

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            GeneratorSpec.from_dict({"user_count": 1, "pages": ["/a"],
                                     "session_count": 1, "bogus": 2})

    def test_dict_round_trip(self):
        assert GeneratorSpec.from_dict(SPEC.to_dict()) == SPEC
