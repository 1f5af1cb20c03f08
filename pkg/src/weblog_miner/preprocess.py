"""Turning raw access-log records into mining-ready databases.

The pipeline is: clean out asset/error noise, partition records by user,
cut each user's record stream into sessions on an inactivity timeout, and
project sessions into the two database shapes the miners consume
(unordered per-session item sets and ordered page sequences).
"""

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .logs import LogEntry

__all__ = [
    "DEFAULT_ASSET_EXTENSIONS",
    "DEFAULT_SESSION_TIMEOUT_SECONDS",
    "CleanConfig",
    "UserKeyKind",
    "UserKey",
    "Visit",
    "Session",
    "TransactionDB",
    "SequenceDB",
    "clean",
    "user_key_for",
    "identify_users",
    "sessionize",
    "to_transactions",
    "to_sequences",
    "session_to_dict",
    "session_from_dict",
]

DEFAULT_ASSET_EXTENSIONS = frozenset({
    ".gif", ".jpg", ".jpeg", ".png", ".bmp", ".ico",
    ".css", ".js", ".swf", ".mp3", ".mp4", ".avi",
})

DEFAULT_SESSION_TIMEOUT_SECONDS = 1800.0


@dataclass(frozen=True)
class CleanConfig:
    """Rules for dropping records that are not page views.

    Asset requests are matched by resource suffix (query string ignored),
    error responses by status >= 400, and robots by user-agent substring.
    The blocklist ships empty; populate it per site.
    """

    asset_extensions: frozenset = DEFAULT_ASSET_EXTENSIONS
    drop_error_statuses: bool = True
    drop_non_get: bool = False
    agent_blocklist: tuple = ()

    def __post_init__(self):
        normalized = frozenset(ext.lower() for ext in self.asset_extensions)
        for ext in normalized:
            if not ext.startswith("."):
                raise ValueError(f"asset extension must start with '.': {ext!r}")
        object.__setattr__(self, "asset_extensions", normalized)
        object.__setattr__(self, "agent_blocklist", tuple(self.agent_blocklist))


class UserKeyKind(Enum):
    AUTH_USER = "auth_user"
    IP_AGENT = "ip_agent"


@dataclass(frozen=True)
class UserKey:
    """Identity a record is attributed to.

    The authenticated user name wins whenever present; otherwise records
    fall back to the host plus user-agent pair, since bare addresses may
    be temporary ISP assignments.
    """

    kind: UserKeyKind
    value: str

    def as_string(self) -> str:
        return f"{self.kind.value}:{self.value}"

    @classmethod
    def from_string(cls, text: str) -> "UserKey":
        kind, sep, value = text.partition(":")
        if not sep:
            raise ValueError(f"malformed user key: {text!r}")
        return cls(kind=UserKeyKind(kind), value=value)


def _path_of(resource: str) -> str:
    """The resource with any query string or fragment removed."""
    return resource.split("?", 1)[0].split("#", 1)[0]


def _is_asset(resource: str, extensions: frozenset) -> bool:
    path = _path_of(resource).lower()
    return any(path.endswith(ext) for ext in extensions)


def clean(entries: Iterable[LogEntry], config: Optional[CleanConfig] = None) -> List[LogEntry]:
    """Drop records matching the cleaning rules; order is preserved.

    Idempotent and monotone: the output is a subsequence of the input and
    every removed entry matches at least one configured rule.
    """
    cfg = config if config is not None else CleanConfig()
    kept = []
    for entry in entries:
        if _is_asset(entry.resource, cfg.asset_extensions):
            continue
        if cfg.drop_error_statuses and entry.status >= 400:
            continue
        if cfg.drop_non_get and entry.method != "GET":
            continue
        if cfg.agent_blocklist and entry.user_agent is not None and any(
                marker in entry.user_agent for marker in cfg.agent_blocklist):
            continue
        kept.append(entry)
    return kept


def user_key_for(entry: LogEntry) -> UserKey:
    if entry.auth_user is not None:
        return UserKey(UserKeyKind.AUTH_USER, entry.auth_user)
    agent = entry.user_agent if entry.user_agent is not None else ""
    return UserKey(UserKeyKind.IP_AGENT, f"{entry.host}|{agent}")


def identify_users(entries: Iterable[LogEntry]) -> Dict[UserKey, List[LogEntry]]:
    """Partition entries by user key, keeping per-user record order.

    Keys appear in order of first sighting; every entry lands in exactly
    one bucket.
    """
    buckets: Dict[UserKey, List[LogEntry]] = {}
    for entry in entries:
        buckets.setdefault(user_key_for(entry), []).append(entry)
    return buckets


@dataclass(frozen=True)
class Visit:
    """One page view; dwell is the gap to the next visit in the session."""

    resource: str
    timestamp: datetime
    dwell_seconds: Optional[float]


@dataclass(frozen=True)
class Session:
    """An ordered run of one user's page visits within the timeout.

    The last visit's dwell is unknown server-side and stays None rather
    than being imputed.
    """

    user: UserKey
    visits: tuple

    def __post_init__(self):
        visits = tuple(self.visits)
        object.__setattr__(self, "visits", visits)
        if not visits:
            raise ValueError("a session needs at least one visit")
        for i, visit in enumerate(visits):
            if i + 1 < len(visits):
                nxt = visits[i + 1]
                if nxt.timestamp < visit.timestamp:
                    raise ValueError("visit timestamps must be non-decreasing")
                expected = (nxt.timestamp - visit.timestamp).total_seconds()
                if visit.dwell_seconds != expected:
                    raise ValueError(
                        f"dwell of visit {i} must be {expected}, got {visit.dwell_seconds}")
            elif visit.dwell_seconds is not None:
                raise ValueError("the last visit's dwell must be absent")

    @property
    def start(self) -> datetime:
        return self.visits[0].timestamp

    @property
    def end(self) -> datetime:
        return self.visits[-1].timestamp

    @property
    def resources(self) -> tuple:
        return tuple(v.resource for v in self.visits)

    @property
    def page_set(self) -> frozenset:
        return frozenset(v.resource for v in self.visits)


def sessionize(entries: Sequence[LogEntry],
               timeout_seconds: float = DEFAULT_SESSION_TIMEOUT_SECONDS,
               user: Optional[UserKey] = None) -> List[Session]:
    """Cut one user's entries into sessions on an inactivity timeout.

    Entries are stably sorted by timestamp first, so equal timestamps keep
    their input order.  Within a session consecutive gaps are <= timeout;
    across a session boundary the gap is > timeout.
    """
    if timeout_seconds <= 0:
        raise ValueError(f"timeout must be positive: {timeout_seconds}")
    ordered = sorted(entries, key=lambda e: e.timestamp)
    if not ordered:
        return []
    key = user if user is not None else user_key_for(ordered[0])
    runs: List[List[LogEntry]] = [[ordered[0]]]
    for entry in ordered[1:]:
        gap = (entry.timestamp - runs[-1][-1].timestamp).total_seconds()
        if gap > timeout_seconds:
            runs.append([entry])
        else:
            runs[-1].append(entry)
    sessions = []
    for run in runs:
        visits = []
        for i, entry in enumerate(run):
            dwell = None
            if i + 1 < len(run):
                dwell = (run[i + 1].timestamp - entry.timestamp).total_seconds()
            visits.append(Visit(resource=entry.resource,
                                timestamp=entry.timestamp,
                                dwell_seconds=dwell))
        sessions.append(Session(user=key, visits=tuple(visits)))
    return sessions


SessionId = Union[int, str]


@dataclass(frozen=True)
class TransactionDB:
    """Per-session item sets: ``(session_id, frozenset of resources)``."""

    transactions: tuple

    def __post_init__(self):
        object.__setattr__(self, "transactions", tuple(
            (sid, frozenset(items)) for sid, items in self.transactions))

    def __len__(self) -> int:
        return len(self.transactions)


@dataclass(frozen=True)
class SequenceDB:
    """Per-session page sequences in visit order, repeats preserved."""

    sequences: tuple

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(
            (sid, tuple(seq)) for sid, seq in self.sequences))

    def __len__(self) -> int:
        return len(self.sequences)


def to_transactions(sessions: Sequence[Session]) -> TransactionDB:
    """One transaction per session; items are the distinct resources.

    Session ids are the positions in the input list.
    """
    return TransactionDB(tuple(
        (i, session.page_set) for i, session in enumerate(sessions)))


def to_sequences(sessions: Sequence[Session]) -> SequenceDB:
    """One sequence per session, in visit order including repeats."""
    return SequenceDB(tuple(
        (i, session.resources) for i, session in enumerate(sessions)))


def session_to_dict(session: Session) -> dict:
    """JSON view with ISO-8601 timestamps."""
    return {
        "user": {"kind": session.user.kind.value, "value": session.user.value},
        "visits": [
            {
                "resource": v.resource,
                "timestamp": v.timestamp.isoformat(),
                "dwell_seconds": v.dwell_seconds,
            }
            for v in session.visits
        ],
        "start": session.start.isoformat(),
        "end": session.end.isoformat(),
    }


def session_from_dict(data: dict) -> Session:
    user = UserKey(kind=UserKeyKind(data["user"]["kind"]),
                   value=data["user"]["value"])
    visits = tuple(
        Visit(resource=v["resource"],
              timestamp=datetime.fromisoformat(v["timestamp"]),
              dwell_seconds=v["dwell_seconds"])
        for v in data["visits"]
    )
    return Session(user=user, visits=visits)
