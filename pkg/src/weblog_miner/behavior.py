"""Client-side engagement modelling and user-interest ranking.

Server logs only say when pages were requested.  Given a side channel of
client events (clicks, scrolls, keypresses, focus changes) this module
separates *active* time from elapsed wall-clock time: an instant belongs
to the window of the most recent preceding event, engagement expires
after an idle threshold, and a session only accrues instants whose
attributed event touched one of its own pages.  A user reading another
window therefore earns the idle session nothing.

It also builds per-user interest profiles from URL path tokens (the first
page of a session weighs extra, since opening it was a deliberate act)
and re-ranks candidate pages by those weights.  A deterministic synthetic
corpus generator for exercising the whole pipeline lives here too.
"""

import csv
import io
import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .logs import LogEntry, serialize_combined
from .preprocess import Session, UserKey, UserKeyKind

__all__ = [
    "EventKind",
    "ClientEvent",
    "ExtendedSession",
    "InterestProfile",
    "merge_client_events",
    "active_time",
    "window_active_times",
    "path_tokens",
    "build_interest_profile",
    "rerank",
    "events_to_csv",
    "events_from_csv",
    "GeneratorSpec",
    "SyntheticCorpus",
    "generate_synthetic",
]

DEFAULT_IDLE_THRESHOLD_SECONDS = 60.0
DEFAULT_FIRST_PAGE_BOOST = 2.0


class EventKind(Enum):
    CLICK = "click"
    SCROLL = "scroll"
    KEYPRESS = "keypress"
    FOCUS = "focus"


@dataclass(frozen=True)
class ClientEvent:
    """One client-side interaction inside a browser window."""

    user: UserKey
    window_id: str
    resource: str
    timestamp: datetime
    kind: EventKind

    def __post_init__(self):
        if self.timestamp.utcoffset() is None:
            raise ValueError("client event timestamps must carry a UTC offset")


@dataclass(frozen=True)
class ExtendedSession:
    """A session annotated with client events and its active time."""

    base: Session
    events: tuple
    active_seconds: float
    elapsed_seconds: float

    def __post_init__(self):
        if not 0 <= self.active_seconds <= self.elapsed_seconds + 1e-9:
            raise ValueError("active time must lie within [0, elapsed]")


def _credited_intervals(events: Sequence[ClientEvent], start: datetime,
                        end: datetime, idle_threshold: float):
    """Yield ``(event, seconds)`` pairs: the engaged span each event owns.

    An event holds the user's attention from its own timestamp until the
    idle threshold runs out, the next event takes over, or the session
    ends, whichever comes first.  Spans are clipped to [start, end] and
    are disjoint by construction.
    """
    horizon = timedelta(seconds=idle_threshold)
    for i, event in enumerate(events):
        lo = max(event.timestamp, start)
        hi = min(event.timestamp + horizon, end)
        if i + 1 < len(events):
            hi = min(hi, events[i + 1].timestamp)
        width = (hi - lo).total_seconds()
        yield event, max(0.0, width)


def merge_client_events(session: Session, events: Iterable[ClientEvent],
                        idle_threshold: float = DEFAULT_IDLE_THRESHOLD_SECONDS,
                        ) -> ExtendedSession:
    """Attach a user's client events to a session and score its active time.

    Events are filtered to the session's user and to the window
    [start, end + idle_threshold], then sorted by timestamp.  The session
    accrues exactly the instants whose attributed event touched one of
    its own pages, so time spent in a window on some other site counts
    for nothing here.
    """
    if idle_threshold <= 0:
        raise ValueError(f"idle threshold must be positive: {idle_threshold}")
    start, end = session.start, session.end
    cutoff = end + timedelta(seconds=idle_threshold)
    relevant = sorted(
        (e for e in events
         if e.user == session.user and start <= e.timestamp <= cutoff),
        key=lambda e: e.timestamp)
    pages = session.page_set
    active = sum(width for event, width
                 in _credited_intervals(relevant, start, end, idle_threshold)
                 if event.resource in pages)
    elapsed = (end - start).total_seconds()
    return ExtendedSession(base=session, events=tuple(relevant),
                           active_seconds=min(active, elapsed),
                           elapsed_seconds=elapsed)


def active_time(ext: ExtendedSession) -> float:
    """The session's engaged seconds, never above its elapsed seconds."""
    return ext.active_seconds


def window_active_times(events: Sequence[ClientEvent], start: datetime,
                        end: datetime,
                        idle_threshold: float = DEFAULT_IDLE_THRESHOLD_SECONDS,
                        ) -> Dict[str, float]:
    """Engaged seconds per window over [start, end].

    Windows share one attention stream, so the returned values sum to at
    most the span's length.
    """
    if idle_threshold <= 0:
        raise ValueError(f"idle threshold must be positive: {idle_threshold}")
    ordered = sorted(events, key=lambda e: e.timestamp)
    totals: Dict[str, float] = {}
    for event, width in _credited_intervals(ordered, start, end, idle_threshold):
        totals[event.window_id] = totals.get(event.window_id, 0.0) + width
    return totals


def path_tokens(resource: str) -> List[str]:
    """Lowercase URL path segments with query, fragment and extension cut.

    ``/Sports/Cricket.html?id=1`` tokenizes to ``["sports", "cricket"]``.
    """
    path = resource.split("?", 1)[0].split("#", 1)[0]
    tokens = []
    for segment in path.split("/"):
        if not segment:
            continue
        segment = segment.lower()
        dot = segment.rfind(".")
        if dot > 0:
            segment = segment[:dot]
        if segment:
            tokens.append(segment)
    return tokens


@dataclass(frozen=True)
class InterestProfile:
    """Per-user weights over URL path tokens."""

    weights: dict
    first_page_boost: float = DEFAULT_FIRST_PAGE_BOOST

    def __post_init__(self):
        if self.first_page_boost < 1:
            raise ValueError(
                f"first_page_boost must be at least 1: {self.first_page_boost}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("interest weights must be non-negative")
        object.__setattr__(self, "weights", dict(self.weights))

    def score(self, resource: str) -> float:
        return sum(self.weights.get(token, 0.0) for token in path_tokens(resource))


def build_interest_profile(sessions: Sequence[Session],
                           first_page_boost: float = DEFAULT_FIRST_PAGE_BOOST,
                           ) -> InterestProfile:
    """Accumulate token weights over one user's visit history.

    Each visit adds one unit per token occurrence; the first page of each
    session adds the boost instead, since the user opened it on purpose.
    """
    users = {s.user for s in sessions}
    if len(users) > 1:
        raise ValueError("interest profiles are per-user; got sessions "
                         f"from {len(users)} users")
    weights: Dict[str, float] = {}
    for session in sessions:
        for i, visit in enumerate(session.visits):
            unit = first_page_boost if i == 0 else 1.0
            for token in path_tokens(visit.resource):
                weights[token] = weights.get(token, 0.0) + unit
    return InterestProfile(weights=weights, first_page_boost=first_page_boost)


def rerank(profile: InterestProfile, candidates: Sequence[str]) -> List[str]:
    """Stable sort of candidates by descending profile score.

    Always a permutation of the input; with an empty profile every score
    is zero and the input order is preserved.
    """
    return sorted(candidates, key=profile.score, reverse=True)


_EVENT_CSV_HEADER = ["user", "window_id", "resource", "timestamp", "kind"]


def events_to_csv(events: Sequence[ClientEvent]) -> str:
    """Render events as the side-channel CSV (ISO-8601 timestamps)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_EVENT_CSV_HEADER)
    for event in events:
        writer.writerow([event.user.as_string(), event.window_id,
                         event.resource, event.timestamp.isoformat(),
                         event.kind.value])
    return out.getvalue()


def events_from_csv(text: str) -> List[ClientEvent]:
    """Parse the event CSV; the header row is required."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != _EVENT_CSV_HEADER:
        raise ValueError(f"event CSV must start with header {_EVENT_CSV_HEADER}")
    events = []
    for number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(_EVENT_CSV_HEADER):
            raise ValueError(f"event CSV row {number} needs "
                             f"{len(_EVENT_CSV_HEADER)} columns: {row!r}")
        user, window_id, resource, timestamp, kind = row
        events.append(ClientEvent(
            user=UserKey.from_string(user),
            window_id=window_id,
            resource=resource,
            timestamp=datetime.fromisoformat(timestamp),
            kind=EventKind(kind)))
    return events


@dataclass(frozen=True)
class GeneratorSpec:
    """Configuration for the deterministic synthetic corpus generator.

    ``planted_patterns`` lists (pattern, target_support) pairs: each
    pattern is embedded, in order, into exactly round(target * sessions)
    sessions and kept out of all the others.  ``session_gap_seconds``
    should exceed the sessionization timeout you plan to mine with.
    """

    user_count: int
    pages: tuple
    session_count: int
    transition_weights: Optional[dict] = None
    session_length: tuple = (3, 8)
    asset_noise_rate: float = 0.0
    corruption_rate: float = 0.0
    planted_patterns: tuple = ()
    event_rate: float = 0.0
    start_time: str = "2000-10-10T00:00:00+00:00"
    visit_gap_seconds: tuple = (5, 300)
    session_gap_seconds: int = 3600

    def __post_init__(self):
        if self.user_count < 1:
            raise ValueError(f"user_count must be at least 1: {self.user_count}")
        if self.session_count < 1:
            raise ValueError(f"session_count must be at least 1: {self.session_count}")
        pages = tuple(self.pages)
        if not pages or len(set(pages)) != len(pages) or any(not p for p in pages):
            raise ValueError("pages must be a non-empty list of distinct names")
        object.__setattr__(self, "pages", pages)
        length = tuple(self.session_length)
        if len(length) != 2 or not 1 <= length[0] <= length[1]:
            raise ValueError(f"session_length must be (lo, hi) with 1 <= lo <= hi: {length}")
        object.__setattr__(self, "session_length", length)
        gap = tuple(self.visit_gap_seconds)
        if len(gap) != 2 or not 1 <= gap[0] <= gap[1]:
            raise ValueError(f"visit_gap_seconds must be (lo, hi) with 1 <= lo <= hi: {gap}")
        object.__setattr__(self, "visit_gap_seconds", gap)
        if self.session_gap_seconds < 1:
            raise ValueError("session_gap_seconds must be positive")
        for name in ("asset_noise_rate", "corruption_rate"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1]: {value}")
        if self.event_rate < 0:
            raise ValueError(f"event_rate must be non-negative: {self.event_rate}")
        stamp = datetime.fromisoformat(self.start_time)
        if stamp.utcoffset() is None:
            raise ValueError("start_time must carry a UTC offset")
        planted = tuple((tuple(pattern), float(target))
                        for pattern, target in self.planted_patterns)
        total = 0
        for pattern, target in planted:
            if not pattern or any(not item for item in pattern):
                raise ValueError(f"planted pattern must be non-empty: {pattern!r}")
            if not 0 <= target <= 1:
                raise ValueError(f"target support must lie in [0, 1]: {target}")
            total += round(target * self.session_count)
        if total > self.session_count:
            raise ValueError("planted pattern targets exceed the session count")
        object.__setattr__(self, "planted_patterns", planted)
        if self.transition_weights is not None:
            page_set = set(pages)
            for src, row in self.transition_weights.items():
                if src not in page_set:
                    raise ValueError(f"transition source is not a site page: {src!r}")
                if not row or any(dst not in page_set for dst in row):
                    raise ValueError(f"transition row targets unknown pages: {src!r}")
                if any(w < 0 for w in row.values()) or not any(w > 0 for w in row.values()):
                    raise ValueError(f"transition weights for {src!r} need a positive entry")

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        known = {
            "user_count", "pages", "session_count", "transition_weights",
            "session_length", "asset_noise_rate", "corruption_rate",
            "planted_patterns", "event_rate", "start_time",
            "visit_gap_seconds", "session_gap_seconds",
        }
        for key in data:
            if key not in known:
                raise ValueError(f"unknown generator key: {key!r}")
        kwargs = dict(data)
        if "planted_patterns" in kwargs:
            kwargs["planted_patterns"] = tuple(
                (tuple(item["pattern"]), float(item["target_support"]))
                for item in kwargs["planted_patterns"])
        for key in ("session_length", "visit_gap_seconds", "pages"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "user_count": self.user_count,
            "pages": list(self.pages),
            "session_count": self.session_count,
            "transition_weights": self.transition_weights,
            "session_length": list(self.session_length),
            "asset_noise_rate": self.asset_noise_rate,
            "corruption_rate": self.corruption_rate,
            "planted_patterns": [
                {"pattern": list(p), "target_support": t}
                for p, t in self.planted_patterns
            ],
            "event_rate": self.event_rate,
            "start_time": self.start_time,
            "visit_gap_seconds": list(self.visit_gap_seconds),
            "session_gap_seconds": self.session_gap_seconds,
        }


@dataclass(frozen=True)
class SyntheticCorpus:
    """Generator output: combined-format lines, event CSV lines, and the
    ground truth needed to verify whatever consumes them."""

    access_log_lines: tuple
    client_event_lines: tuple
    ground_truth: dict


_ASSET_POOL = ("/img/banner.gif", "/img/logo.png", "/static/site.css",
               "/static/app.js", "/img/spacer.gif")

_EVENT_KINDS = (EventKind.CLICK, EventKind.SCROLL,
                EventKind.KEYPRESS, EventKind.FOCUS)


def _contains_subsequence(sequence: Sequence[str], pattern: Sequence[str]) -> bool:
    it = iter(sequence)
    return all(item in it for item in pattern)


def _markov_walk(rng: random.Random, spec: GeneratorSpec, length: int) -> List[str]:
    weights = spec.transition_weights
    seq: List[str] = []
    current = None
    for _ in range(length):
        row = weights.get(current) if weights and current is not None else None
        if row:
            population = [p for p in spec.pages if row.get(p, 0) > 0]
            nxt = rng.choices(population, weights=[row[p] for p in population])[0]
        else:
            nxt = spec.pages[rng.randrange(len(spec.pages))]
        seq.append(nxt)
        current = nxt
    return seq


def _embed_pattern(rng: random.Random, seq: List[str],
                   pattern: Tuple[str, ...]) -> List[str]:
    out = list(seq)
    floor = 0
    for item in pattern:
        pos = rng.randint(floor, len(out))
        out.insert(pos, item)
        floor = pos + 1
    return out


def _session_pages(rng: random.Random, spec: GeneratorSpec,
                   planted_here: List[Tuple[str, ...]],
                   all_planted: List[Tuple[str, ...]]) -> List[str]:
    """A page sequence containing the planted patterns and no others.

    Random walks rarely collide with a planted pattern, so draw-and-check
    converges almost immediately; the concatenation fallback covers
    adversarial transition weights.
    """
    forbidden = [p for p in all_planted if p not in planted_here]
    for _attempt in range(100):
        seq = _markov_walk(rng, spec, rng.randint(*spec.session_length))
        for pattern in planted_here:
            seq = _embed_pattern(rng, seq, pattern)
        if not any(_contains_subsequence(seq, p) for p in forbidden):
            return seq
    if planted_here:
        seq = [item for pattern in planted_here for item in pattern]
        if not any(_contains_subsequence(seq, p) for p in forbidden):
            return seq
    else:
        for page in spec.pages:
            if not any(_contains_subsequence([page], p) for p in forbidden):
                return [page]
    raise ValueError("planted patterns are mutually inconsistent")


def generate_synthetic(spec: GeneratorSpec, seed: int) -> SyntheticCorpus:
    """Produce a combined-format log, a client event CSV, and ground truth.

    Pure function of (spec, seed): the same inputs always yield identical
    bytes.  Ground truth records per-session page sequences, which output
    lines are asset noise, which were corrupted, and the exact planted
    support achieved.
    """
    rng = random.Random(seed)
    start = datetime.fromisoformat(spec.start_time)

    order = list(range(spec.session_count))
    rng.shuffle(order)
    cursor = 0
    planted_for: Dict[int, List[Tuple[str, ...]]] = {}
    planted_truth = []
    for pattern, target in spec.planted_patterns:
        k = round(target * spec.session_count)
        chosen = sorted(order[cursor:cursor + k])
        cursor += k
        for index in chosen:
            planted_for.setdefault(index, []).append(pattern)
        planted_truth.append({
            "pattern": list(pattern),
            "target_support": target,
            "session_indexes": chosen,
            "support": k / spec.session_count,
        })
    all_planted = [pattern for pattern, _ in spec.planted_patterns]

    user_clock = [start + timedelta(seconds=17 * u) for u in range(spec.user_count)]
    user_session_ordinal = [0] * spec.user_count

    records = []  # (timestamp, emit order, LogEntry, is_asset)
    events: List[ClientEvent] = []
    session_truth = []
    emit = 0
    event_ordinal = 0

    for index in range(spec.session_count):
        u = index % spec.user_count
        ip = f"10.0.{u // 250}.{u % 250 + 1}"
        agent = f"SynthBrowser/{u}.0 (Linux; en)"
        user_key = UserKey(UserKeyKind.IP_AGENT, f"{ip}|{agent}")
        window_id = f"w{u}-{user_session_ordinal[u]}"
        user_session_ordinal[u] += 1

        pages = _session_pages(rng, spec, planted_for.get(index, []), all_planted)
        clock = user_clock[u]
        session_truth.append({
            "session_index": index,
            "user": user_key.as_string(),
            "pages": list(pages),
            "start_time": clock.isoformat(),
        })
        previous = None
        for i, page in enumerate(pages):
            referrer = f"http://synth.example{previous}" if previous else None
            records.append((clock, emit, LogEntry(
                host=ip, identity=None, auth_user=None, timestamp=clock,
                method="GET", resource=page, protocol="HTTP/1.0",
                status=200, bytes=rng.randint(200, 64000),
                referrer=referrer, user_agent=agent), False))
            emit += 1
            gap = rng.randint(*spec.visit_gap_seconds) if i + 1 < len(pages) else 60
            if rng.random() < spec.asset_noise_rate:
                asset = _ASSET_POOL[rng.randrange(len(_ASSET_POOL))]
                records.append((clock + timedelta(seconds=1), emit, LogEntry(
                    host=ip, identity=None, auth_user=None,
                    timestamp=clock + timedelta(seconds=1),
                    method="GET", resource=asset, protocol="HTTP/1.0",
                    status=200, bytes=rng.randint(40, 4000),
                    referrer=f"http://synth.example{page}",
                    user_agent=agent), True))
                emit += 1
            whole = int(spec.event_rate)
            burst = whole + (1 if rng.random() < spec.event_rate - whole else 0)
            offsets = sorted(rng.randrange(0, max(1, gap)) for _ in range(burst))
            for offset in offsets:
                events.append(ClientEvent(
                    user=user_key, window_id=window_id, resource=page,
                    timestamp=clock + timedelta(seconds=offset),
                    kind=_EVENT_KINDS[event_ordinal % len(_EVENT_KINDS)]))
                event_ordinal += 1
            previous = page
            if i + 1 < len(pages):
                clock += timedelta(seconds=gap)
        user_clock[u] = clock + timedelta(
            seconds=spec.session_gap_seconds + rng.randint(0, 600))

    records.sort(key=lambda r: (r[0], r[1]))
    lines = [serialize_combined(entry) for _ts, _order, entry, _asset in records]
    asset_line_numbers = [i for i, (_ts, _order, _entry, asset)
                          in enumerate(records) if asset]

    corrupt_count = round(spec.corruption_rate * len(lines))
    corrupted = sorted(rng.sample(range(len(lines)), corrupt_count))
    for i in corrupted:
        # Dropping the first quote breaks the request grammar for certain.
        lines[i] = lines[i].replace('"', "", 1)

    events.sort(key=lambda e: e.timestamp)
    event_lines = tuple(events_to_csv(events).splitlines())

    truth = {
        "seed": seed,
        "sessions": session_truth,
        "planted": planted_truth,
        "asset_line_numbers": asset_line_numbers,
        "corrupted_line_numbers": corrupted,
        "counts": {
            "total_lines": len(lines),
            "page_lines": len(lines) - len(asset_line_numbers),
            "asset_lines": len(asset_line_numbers),
            "corrupted_lines": len(corrupted),
            "client_events": len(events),
        },
    }
    return SyntheticCorpus(access_log_lines=tuple(lines),
                           client_event_lines=event_lines,
                           ground_truth=truth)
