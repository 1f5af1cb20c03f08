"""Bit-exact parsing and serialization of Apache 1.3 style log lines.

Five line formats are supported:

* common log format (CLF): ``%h %l %u %t "%r" %>s %b``
* combined log format: CLF plus quoted referrer and user-agent fields
* error log: ``[Wed Oct 11 14:32:52 2000] [error] [client 1.2.3.4] message``
* referer log: ``REFERRER -> TARGET``
* agent log: one bare user-agent string per line

The parsers are deliberately strict: a line is accepted only when
re-serializing the parsed record reproduces the input byte for byte.
Hyphens stand for absent values (``%l``, ``%u``, ``%b`` and the quoted
combined fields) and map to ``None``.  ``parse_log`` applies a
skip-and-count policy, so malformed lines never abort a run.
"""

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Optional, Union

__all__ = [
    "LogFormat",
    "StatusClass",
    "LogEntry",
    "ErrorEntry",
    "RefererPair",
    "ParseReport",
    "LogParseError",
    "classify_status",
    "parse_clf",
    "parse_combined",
    "parse_error_line",
    "parse_referer_pair",
    "parse_agent_line",
    "parse_line",
    "scan_log",
    "parse_log",
    "serialize_clf",
    "serialize_combined",
    "serialize_error_line",
    "serialize_referer_pair",
    "serialize_agent_line",
    "serialize_record",
    "entry_to_dict",
    "entry_from_dict",
    "record_to_dict",
]

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")

_MONTH_INDEX = {name: i + 1 for i, name in enumerate(MONTHS)}

# Largest legal UTC offset, in minutes (+/-14:00).
_MAX_OFFSET_MINUTES = 14 * 60

# ParseReport keeps at most this many (line_number, reason) samples.
ERROR_SAMPLE_CAP = 100


class LogFormat(Enum):
    """The five supported log file grammars."""

    CLF = "clf"
    COMBINED = "combined"
    ERROR_LOG = "error"
    REFERER_LOG = "referer"
    AGENT_LOG = "agent"


class StatusClass(Enum):
    """HTTP status classes, determined solely by the hundreds digit."""

    INFORMATIONAL = 1
    SUCCESS = 2
    REDIRECT = 3
    CLIENT_ERROR = 4
    SERVER_ERROR = 5


def classify_status(code: int) -> StatusClass:
    """Classify an HTTP status code by its hundreds digit.

    Raises ValueError for codes outside [100, 599].
    """
    if not 100 <= code <= 599:
        raise ValueError(f"status code out of range [100, 599]: {code}")
    return StatusClass(code // 100)


class LogParseError(ValueError):
    """A line does not match its format grammar.

    ``position`` is the zero-based character offset where parsing failed
    and ``reason`` a short human-readable explanation.
    """

    def __init__(self, reason: str, position: int):
        super().__init__(f"{reason} (at offset {position})")
        self.reason = reason
        self.position = position


def _check_token(name: str, value: Optional[str], allow_none: bool = True) -> None:
    if value is None:
        if not allow_none:
            raise ValueError(f"{name} must not be None")
        return
    if not value:
        raise ValueError(f"{name} must be non-empty")
    if " " in value:
        raise ValueError(f"{name} must not contain spaces: {value!r}")
    if value == "-":
        raise ValueError(f"{name} must not be the literal absent marker '-'")


def _check_quoted(name: str, value: Optional[str]) -> None:
    if value is not None and '"' in value:
        raise ValueError(f"{name} must not contain double quotes: {value!r}")


@dataclass(frozen=True)
class LogEntry:
    """One parsed access-log record (CLF or combined).

    ``identity``, ``auth_user`` and ``bytes`` are ``None`` when the line
    carried the ``-`` absent marker; ``referrer`` and ``user_agent`` are
    ``None`` for CLF lines and for quoted ``-`` fields in combined lines.
    """

    host: str
    identity: Optional[str]
    auth_user: Optional[str]
    timestamp: datetime
    method: str
    resource: str
    protocol: str
    status: int
    bytes: Optional[int]
    referrer: Optional[str] = None
    user_agent: Optional[str] = None

    def __post_init__(self):
        _check_token("host", self.host, allow_none=False)
        _check_token("identity", self.identity)
        _check_token("auth_user", self.auth_user)
        if not 100 <= self.status <= 599:
            raise ValueError(f"status out of range [100, 599]: {self.status}")
        if self.bytes is not None and self.bytes < 0:
            raise ValueError(f"bytes must be non-negative: {self.bytes}")
        offset = self.timestamp.utcoffset()
        if offset is None:
            raise ValueError("timestamp must carry a UTC offset")
        if abs(offset) > timedelta(minutes=_MAX_OFFSET_MINUTES):
            raise ValueError(f"UTC offset beyond +/-14:00: {offset}")
        for name in ("method", "protocol"):
            value = getattr(self, name)
            _check_token(name, value, allow_none=False)
            _check_quoted(name, value)
        if not self.resource:
            raise ValueError("resource must be non-empty")
        if '"' in self.resource:
            raise ValueError("resource must not contain double quotes")
        if self.resource != " ".join(self.resource.split(" ")) or self.resource.startswith(" "):
            raise ValueError("resource must not carry leading/trailing or doubled spaces")
        _check_quoted("referrer", self.referrer)
        _check_quoted("user_agent", self.user_agent)
        if self.referrer == "-" or self.user_agent == "-":
            raise ValueError("quoted fields must use None for the absent marker")


@dataclass(frozen=True)
class ErrorEntry:
    """One parsed error-log record; the timestamp carries no zone."""

    timestamp: datetime
    severity: str
    client: Optional[str]
    message: str

    def __post_init__(self):
        if self.timestamp.tzinfo is not None:
            raise ValueError("error-log timestamps are zone-less")
        if not self.severity or "]" in self.severity:
            raise ValueError(f"invalid severity: {self.severity!r}")
        if self.client is not None and (not self.client or "]" in self.client):
            raise ValueError(f"invalid client: {self.client!r}")
        if not self.message:
            raise ValueError("message must be non-empty")


class RefererPair(NamedTuple):
    """A referer-log record: where the client came from and what it fetched."""

    referrer: str
    target: str


LogRecord = Union[LogEntry, ErrorEntry, RefererPair, str]


@dataclass(frozen=True)
class ParseReport:
    """Counts from one parsing run; totals always reconcile."""

    total_lines: int
    parsed: int
    malformed: int
    first_errors: tuple  # of (line_number, reason), capped at ERROR_SAMPLE_CAP

    def __post_init__(self):
        if self.total_lines != self.parsed + self.malformed:
            raise ValueError("total_lines must equal parsed + malformed")
        if len(self.first_errors) > ERROR_SAMPLE_CAP:
            raise ValueError(f"first_errors capped at {ERROR_SAMPLE_CAP}")

    def to_dict(self) -> dict:
        return {
            "total_lines": self.total_lines,
            "parsed": self.parsed,
            "malformed": self.malformed,
            "first_errors": [
                {"line_number": n, "reason": r} for n, r in self.first_errors
            ],
        }


class _Scanner:
    """Cursor over one log line, for error messages that carry a position."""

    __slots__ = ("line", "pos")

    def __init__(self, line: str):
        self.line = line
        self.pos = 0

    def fail(self, reason: str):
        raise LogParseError(reason, self.pos)

    def token(self, name: str) -> str:
        start = self.pos
        line = self.line
        while self.pos < len(line) and line[self.pos] != " ":
            self.pos += 1
        if self.pos == start:
            self.fail(f"empty {name} field")
        return line[start:self.pos]

    def space(self) -> None:
        if self.pos >= len(self.line) or self.line[self.pos] != " ":
            self.fail("expected a single space separator")
        self.pos += 1

    def literal(self, ch: str, what: str) -> None:
        if self.pos >= len(self.line) or self.line[self.pos] != ch:
            self.fail(f"expected {what}")
        self.pos += 1

    def until(self, ch: str, what: str) -> str:
        idx = self.line.find(ch, self.pos)
        if idx < 0:
            self.fail(f"unterminated {what}")
        content = self.line[self.pos:idx]
        self.pos = idx + 1
        return content

    def rest(self) -> str:
        out = self.line[self.pos:]
        self.pos = len(self.line)
        return out

    def end(self) -> None:
        if self.pos != len(self.line):
            self.fail("unexpected trailing characters")


_CLF_TS_RE = re.compile(
    r"(\d{2})/(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)/(\d{4})"
    r":(\d{2}):(\d{2}):(\d{2}) ([+-])(\d{2})(\d{2})"
)

_ERROR_TS_RE = re.compile(
    r"(Mon|Tue|Wed|Thu|Fri|Sat|Sun) "
    r"(Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) "
    r"([ \d]\d) (\d{2}):(\d{2}):(\d{2}) (\d{4})"
)


def _parse_clf_timestamp(text: str, at: int) -> datetime:
    m = _CLF_TS_RE.fullmatch(text)
    if m is None:
        raise LogParseError(f"malformed timestamp {text!r}", at)
    day, mon, year, hh, mm, ss, sign, oh, om = m.groups()
    offset_minutes = int(oh) * 60 + int(om)
    if int(om) > 59 or offset_minutes > _MAX_OFFSET_MINUTES:
        raise LogParseError(f"UTC offset beyond +/-14:00: {sign}{oh}{om}", at)
    if sign == "-" and offset_minutes == 0:
        raise LogParseError("negative zero UTC offset", at)
    delta = timedelta(minutes=offset_minutes)
    tz = timezone(delta if sign == "+" else -delta)
    try:
        return datetime(int(year), _MONTH_INDEX[mon], int(day),
                        int(hh), int(mm), int(ss), tzinfo=tz)
    except ValueError as exc:
        raise LogParseError(f"invalid date/time: {exc}", at)


def _format_clf_timestamp(ts: datetime) -> str:
    offset = ts.utcoffset()
    total = round(offset.total_seconds() // 60)
    sign = "-" if total < 0 else "+"
    total = abs(total)
    return (f"{ts.day:02d}/{MONTHS[ts.month - 1]}/{ts.year:04d}"
            f":{ts.hour:02d}:{ts.minute:02d}:{ts.second:02d}"
            f" {sign}{total // 60:02d}{total % 60:02d}")


def _parse_request(text: str, at: int) -> tuple:
    tokens = text.split(" ")
    if len(tokens) < 3 or any(not t for t in tokens):
        raise LogParseError(f"request line needs method, resource and protocol: {text!r}", at)
    return tokens[0], " ".join(tokens[1:-1]), tokens[-1]


def _parse_status(token: str, at: int) -> int:
    if not token.isdigit() or str(int(token)) != token:
        raise LogParseError(f"non-numeric status field: {token!r}", at)
    value = int(token)
    if not 100 <= value <= 599:
        raise LogParseError(f"status code out of range [100, 599]: {value}", at)
    return value


def _parse_bytes(token: str, at: int) -> Optional[int]:
    if token == "-":
        return None
    if not token.isdigit() or str(int(token)) != token:
        raise LogParseError(f"malformed bytes field: {token!r}", at)
    return int(token)


def _parse_access(line: str, combined: bool) -> LogEntry:
    sc = _Scanner(line)
    host = sc.token("host")
    sc.space()
    identity = sc.token("identity")
    sc.space()
    auth_user = sc.token("auth user")
    sc.space()
    ts_at = sc.pos
    sc.literal("[", "'[' opening the timestamp")
    timestamp = _parse_clf_timestamp(sc.until("]", "timestamp bracket"), ts_at)
    sc.space()
    req_at = sc.pos
    sc.literal('"', "'\"' opening the request line")
    method, resource, protocol = _parse_request(sc.until('"', "request quote"), req_at)
    sc.space()
    status_at = sc.pos
    status = _parse_status(sc.token("status"), status_at)
    sc.space()
    bytes_at = sc.pos
    size = _parse_bytes(sc.token("bytes"), bytes_at)
    referrer = user_agent = None
    if combined:
        sc.space()
        sc.literal('"', "'\"' opening the referrer")
        ref_text = sc.until('"', "referrer quote")
        sc.space()
        sc.literal('"', "'\"' opening the user agent")
        agent_text = sc.until('"', "user agent quote")
        referrer = None if ref_text == "-" else ref_text
        user_agent = None if agent_text == "-" else agent_text
    sc.end()
    return LogEntry(
        host=host,
        identity=None if identity == "-" else identity,
        auth_user=None if auth_user == "-" else auth_user,
        timestamp=timestamp,
        method=method,
        resource=resource,
        protocol=protocol,
        status=status,
        bytes=size,
        referrer=referrer,
        user_agent=user_agent,
    )


def parse_clf(line: str) -> LogEntry:
    """Parse one common-log-format line.

    The line must not carry a trailing newline.  Raises LogParseError with
    an offset and reason on any grammar violation.
    """
    return _parse_access(line, combined=False)


def parse_combined(line: str) -> LogEntry:
    """Parse one combined-log-format line (CLF plus referrer/user-agent)."""
    return _parse_access(line, combined=True)


def parse_error_line(line: str) -> ErrorEntry:
    """Parse one error-log line.

    Grammar: ``[<weekday> <month> <day> HH:MM:SS YYYY] [<severity>]``
    optionally followed by `` [client <ip>]``, then a single space and the
    message.  Days below 10 are space-padded, matching the server's
    ctime-style clock, and the weekday must agree with the date.
    """
    sc = _Scanner(line)
    ts_at = sc.pos
    sc.literal("[", "'[' opening the timestamp")
    ts_text = sc.until("]", "timestamp bracket")
    m = _ERROR_TS_RE.fullmatch(ts_text)
    if m is None:
        raise LogParseError(f"malformed error-log timestamp {ts_text!r}", ts_at)
    weekday, mon, day, hh, mm, ss, year = m.groups()
    try:
        timestamp = datetime(int(year), _MONTH_INDEX[mon], int(day),
                             int(hh), int(mm), int(ss))
    except ValueError as exc:
        raise LogParseError(f"invalid date/time: {exc}", ts_at)
    if WEEKDAYS[timestamp.weekday()] != weekday:
        raise LogParseError(
            f"weekday {weekday!r} does not match the date", ts_at)
    sc.space()
    sev_at = sc.pos
    sc.literal("[", "'[' opening the severity")
    severity = sc.until("]", "severity bracket")
    if not severity:
        raise LogParseError("empty severity field", sev_at)
    sc.space()
    client = None
    if sc.line.startswith("[client ", sc.pos):
        client_at = sc.pos
        sc.pos += len("[client ")
        client = sc.until("]", "client bracket")
        if not client:
            raise LogParseError("empty client field", client_at)
        sc.space()
    message = sc.rest()
    if not message:
        sc.fail("empty message")
    return ErrorEntry(timestamp=timestamp, severity=severity,
                      client=client, message=message)


def parse_referer_pair(line: str) -> RefererPair:
    """Split a referer-log line at its first `` -> `` separator."""
    idx = line.find(" -> ")
    if idx < 0:
        raise LogParseError("missing ' -> ' separator", 0)
    referrer = line[:idx]
    target = line[idx + 4:]
    if not referrer:
        raise LogParseError("empty referrer", 0)
    if not target:
        raise LogParseError("empty target", idx + 4)
    return RefererPair(referrer=referrer, target=target)


def parse_agent_line(line: str) -> str:
    """An agent-log line is the bare user-agent string; must be non-empty."""
    if not line:
        raise LogParseError("empty agent line", 0)
    return line


_PARSERS = {
    LogFormat.CLF: parse_clf,
    LogFormat.COMBINED: parse_combined,
    LogFormat.ERROR_LOG: parse_error_line,
    LogFormat.REFERER_LOG: parse_referer_pair,
    LogFormat.AGENT_LOG: parse_agent_line,
}


def parse_line(line: str, fmt: LogFormat) -> LogRecord:
    """Parse one line in the given format."""
    return _PARSERS[fmt](line)


def serialize_clf(entry: LogEntry) -> str:
    """Render the seven CLF fields; referrer/user-agent are not emitted."""
    return (f"{entry.host} {entry.identity or '-'} {entry.auth_user or '-'}"
            f" [{_format_clf_timestamp(entry.timestamp)}]"
            f" \"{entry.method} {entry.resource} {entry.protocol}\""
            f" {entry.status}"
            f" {'-' if entry.bytes is None else entry.bytes}")


def serialize_combined(entry: LogEntry) -> str:
    """Render a combined-format line; absent quoted fields become ``"-"``."""
    referrer = "-" if entry.referrer is None else entry.referrer
    agent = "-" if entry.user_agent is None else entry.user_agent
    return f'{serialize_clf(entry)} "{referrer}" "{agent}"'


def serialize_error_line(entry: ErrorEntry) -> str:
    ts = entry.timestamp
    stamp = (f"{WEEKDAYS[ts.weekday()]} {MONTHS[ts.month - 1]} {ts.day:2d}"
             f" {ts.hour:02d}:{ts.minute:02d}:{ts.second:02d} {ts.year:04d}")
    client = f" [client {entry.client}]" if entry.client is not None else ""
    return f"[{stamp}] [{entry.severity}]{client} {entry.message}"


def serialize_referer_pair(pair: RefererPair) -> str:
    return f"{pair.referrer} -> {pair.target}"


def serialize_agent_line(agent: str) -> str:
    return agent


def serialize_record(record: LogRecord, fmt: LogFormat) -> str:
    """Serialize a record back to its source grammar."""
    if fmt is LogFormat.CLF:
        return serialize_clf(record)
    if fmt is LogFormat.COMBINED:
        return serialize_combined(record)
    if fmt is LogFormat.ERROR_LOG:
        return serialize_error_line(record)
    if fmt is LogFormat.REFERER_LOG:
        return serialize_referer_pair(record)
    if fmt is LogFormat.AGENT_LOG:
        return serialize_agent_line(record)
    raise ValueError(f"unknown log format: {fmt!r}")


def _strip_line_ending(raw: str) -> str:
    if raw.endswith("\n"):
        raw = raw[:-1]
    if raw.endswith("\r"):
        raw = raw[:-1]
    return raw


def scan_log(lines: Iterable[str], fmt: LogFormat) -> Iterator[tuple]:
    """Yield ``(line_number, record, error)`` per input line, in order.

    Exactly one of ``record``/``error`` is None.  Line endings are
    stripped before parsing; this is the streaming core behind
    ``parse_log`` and the memory use per line is bounded by line length.
    """
    parser = _PARSERS[fmt]
    for number, raw in enumerate(lines, start=1):
        line = _strip_line_ending(raw)
        if not line:
            yield number, None, LogParseError("empty line", 0)
            continue
        try:
            yield number, parser(line), None
        except LogParseError as exc:
            yield number, None, exc


def parse_log(lines: Iterable[str], fmt: LogFormat) -> tuple:
    """Parse a stream of lines, skipping and counting malformed ones.

    Returns ``(records, report)``.  Record order preserves line order and
    the report's totals always reconcile; the first hundred errors are
    sampled with their line numbers.
    """
    records = []
    errors = []
    total = parsed = 0
    for number, record, error in scan_log(lines, fmt):
        total += 1
        if error is None:
            parsed += 1
            records.append(record)
        elif len(errors) < ERROR_SAMPLE_CAP:
            errors.append((number, error.reason))
    return records, ParseReport(
        total_lines=total,
        parsed=parsed,
        malformed=total - parsed,
        first_errors=tuple(errors),
    )


def entry_to_dict(entry: LogEntry) -> dict:
    """JSON-friendly view of a LogEntry (ISO-8601 timestamp with offset)."""
    return {
        "host": entry.host,
        "identity": entry.identity,
        "auth_user": entry.auth_user,
        "timestamp": entry.timestamp.isoformat(),
        "method": entry.method,
        "resource": entry.resource,
        "protocol": entry.protocol,
        "status": entry.status,
        "bytes": entry.bytes,
        "referrer": entry.referrer,
        "user_agent": entry.user_agent,
    }


def entry_from_dict(data: dict) -> LogEntry:
    return LogEntry(
        host=data["host"],
        identity=data.get("identity"),
        auth_user=data.get("auth_user"),
        timestamp=datetime.fromisoformat(data["timestamp"]),
        method=data["method"],
        resource=data["resource"],
        protocol=data["protocol"],
        status=data["status"],
        bytes=data.get("bytes"),
        referrer=data.get("referrer"),
        user_agent=data.get("user_agent"),
    )


def record_to_dict(record: LogRecord) -> dict:
    """JSON-friendly view of any record kind."""
    if isinstance(record, LogEntry):
        return entry_to_dict(record)
    if isinstance(record, ErrorEntry):
        return {
            "timestamp": record.timestamp.isoformat(),
            "severity": record.severity,
            "client": record.client,
            "message": record.message,
        }
    if isinstance(record, RefererPair):
        return {"referrer": record.referrer, "target": record.target}
    if isinstance(record, str):
        return {"user_agent": record}
    raise TypeError(f"not a log record: {record!r}")
