"""Command-line front end wiring the pipeline together.

Subcommands mirror the pipeline stages: ``parse``, ``clean``,
``sessionize``, ``mine paths|rules|seq``, ``filter``, ``extend``,
``profile``, ``rerank`` and ``gen``.  Stages exchange newline-delimited
JSON so they compose through files or shell pipes.

Exit codes: 0 success, 1 usage or configuration error, 2 when the
malformed-line fraction exceeds the configured limit, 3 on I/O errors.
Diagnostics go to standard error; data goes to standard output or ``-o``.
"""

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from . import analysis, behavior, logs, mining, preprocess

__all__ = ["RunConfig", "MiningConfig", "ConfigError", "load_config", "run", "main"]

CONFIG_ENV_VAR = "WEBLOG_MINER_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MALFORMED = 2
EXIT_IO = 3

_FORMATS = {
    "clf": logs.LogFormat.CLF,
    "combined": logs.LogFormat.COMBINED,
    "error": logs.LogFormat.ERROR_LOG,
    "referer": logs.LogFormat.REFERER_LOG,
    "agent": logs.LogFormat.AGENT_LOG,
}
_ENGINES = ("projection", "waptree")
_OUTPUT_FORMATS = ("json", "csv", "dot")


class ConfigError(Exception):
    """A configuration file or value is unusable; names the offending key."""


class UsageError(Exception):
    """Bad command line."""


class MalformedInputError(Exception):
    """Too many unparseable lines to trust the run."""


@dataclass(frozen=True)
class MiningConfig:
    min_support: float = 0.1
    min_confidence: float = 0.5
    max_length: Optional[int] = mining.DEFAULT_MAX_PATTERN_LENGTH


@dataclass(frozen=True)
class RunConfig:
    """Effective settings for a run; flags override file values override
    these defaults."""

    format: str = "combined"
    timeout_seconds: float = preprocess.DEFAULT_SESSION_TIMEOUT_SECONDS
    clean: preprocess.CleanConfig = field(default_factory=preprocess.CleanConfig)
    mining: MiningConfig = field(default_factory=MiningConfig)
    engine: str = "projection"
    idle_threshold_seconds: float = behavior.DEFAULT_IDLE_THRESHOLD_SECONDS
    output_format: str = "json"
    topology_path: Optional[str] = None
    max_malformed_fraction: float = 0.5

    def validate(self) -> None:
        if self.format not in _FORMATS:
            raise ConfigError(f"format: unknown log format {self.format!r}")
        if self.timeout_seconds <= 0:
            raise ConfigError(f"timeout_seconds: must be positive, got {self.timeout_seconds}")
        if not 0 < self.mining.min_support <= 1:
            raise ConfigError(f"mining.min_support: must be in (0, 1], got {self.mining.min_support}")
        if not 0 < self.mining.min_confidence <= 1:
            raise ConfigError(f"mining.min_confidence: must be in (0, 1], got {self.mining.min_confidence}")
        if self.mining.max_length is not None and self.mining.max_length < 1:
            raise ConfigError(f"mining.max_length: must be at least 1, got {self.mining.max_length}")
        if self.engine not in _ENGINES:
            raise ConfigError(f"engine: must be one of {_ENGINES}, got {self.engine!r}")
        if self.idle_threshold_seconds <= 0:
            raise ConfigError(
                f"idle_threshold_seconds: must be positive, got {self.idle_threshold_seconds}")
        if self.output_format not in _OUTPUT_FORMATS:
            raise ConfigError(
                f"output_format: must be one of {_OUTPUT_FORMATS}, got {self.output_format!r}")
        if not 0 <= self.max_malformed_fraction <= 1:
            raise ConfigError(
                f"max_malformed_fraction: must be in [0, 1], got {self.max_malformed_fraction}")


_TOP_KEYS = {
    "format", "timeout_seconds", "clean", "mining", "engine",
    "idle_threshold_seconds", "output_format", "topology_path",
    "max_malformed_fraction",
}
_CLEAN_KEYS = {"asset_extensions", "drop_error_statuses", "drop_non_get",
               "agent_blocklist"}
_MINING_KEYS = {"min_support", "min_confidence", "max_length"}


def _reject_unknown(data: dict, known: set, prefix: str = "") -> None:
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown configuration key: {prefix}{key!r}")


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON configuration file.

    Unknown keys are rejected outright: a typo in a mining threshold must
    not silently fall back to a default.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _reject_unknown(data, _TOP_KEYS)

    kwargs = {k: v for k, v in data.items() if k not in ("clean", "mining")}
    if "clean" in data:
        if not isinstance(data["clean"], dict):
            raise ConfigError("clean: must be a JSON object")
        _reject_unknown(data["clean"], _CLEAN_KEYS, prefix="clean.")
        clean_kwargs = dict(data["clean"])
        if "asset_extensions" in clean_kwargs:
            clean_kwargs["asset_extensions"] = frozenset(clean_kwargs["asset_extensions"])
        if "agent_blocklist" in clean_kwargs:
            clean_kwargs["agent_blocklist"] = tuple(clean_kwargs["agent_blocklist"])
        try:
            kwargs["clean"] = preprocess.CleanConfig(**clean_kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"clean: {exc}")
    if "mining" in data:
        if not isinstance(data["mining"], dict):
            raise ConfigError("mining: must be a JSON object")
        _reject_unknown(data["mining"], _MINING_KEYS, prefix="mining.")
        kwargs["mining"] = MiningConfig(**data["mining"])
    try:
        config = RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc))
    config.validate()
    return config


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    return load_config(path) if path else RunConfig()


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="weblog-miner",
                     description="Parse web server logs, rebuild sessions, "
                                 "and mine navigation patterns.")
    parser.add_argument("--config", help="JSON configuration file "
                        f"(or set ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add_io(p, input_help="input file ('-' for stdin)"):
        p.add_argument("input", nargs="?", default="-", help=input_help)
        p.add_argument("-o", "--output", default="-",
                       help="output file ('-' for stdout)")

    p = sub.add_parser("parse", help="parse a log file into JSON records")
    add_io(p, "log file ('-' for stdin)")
    p.add_argument("--format", choices=sorted(_FORMATS))
    p.add_argument("--workers", type=int, default=1,
                   help="shard a seekable file across N workers")
    p.add_argument("--max-malformed-fraction", type=float, default=None)

    p = sub.add_parser("clean", help="drop asset/error records")
    add_io(p, "record NDJSON ('-' for stdin)")
    p.add_argument("--asset-extensions",
                   help="comma-separated suffixes replacing the default set")
    p.add_argument("--drop-error-statuses", action=argparse.BooleanOptionalAction,
                   default=None)
    p.add_argument("--drop-non-get", action=argparse.BooleanOptionalAction,
                   default=None)
    p.add_argument("--agent-blocklist",
                   help="comma-separated user-agent substrings to drop")

    p = sub.add_parser("sessionize", help="group records into user sessions")
    add_io(p, "record NDJSON ('-' for stdin)")
    p.add_argument("--timeout", type=float, default=None,
                   help="session inactivity timeout in seconds")

    p = sub.add_parser("mine", help="mine sessions for patterns")
    p.add_argument("target", choices=("paths", "rules", "seq"))
    add_io(p, "session NDJSON ('-' for stdin)")
    p.add_argument("--min-support", type=float, default=None)
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--engine", choices=_ENGINES, default=None)
    p.add_argument("--output-format", choices=_OUTPUT_FORMATS, default=None)

    p = sub.add_parser("filter", help="filter a mined report")
    add_io(p, "report JSON ('-' for stdin)")
    p.add_argument("--min-support", type=float, default=None)
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--min-length", type=int, default=None)
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--must-contain", help="comma-separated resources")
    p.add_argument("--topology", default=None,
                   help="site topology CSV; drops link-confirming results")
    p.add_argument("--output-format", choices=("json", "csv"), default=None)

    p = sub.add_parser("extend", help="merge client events into sessions")
    add_io(p, "session NDJSON ('-' for stdin)")
    p.add_argument("--events", required=True, help="client event CSV")
    p.add_argument("--idle-threshold", type=float, default=None)

    p = sub.add_parser("profile", help="build a user interest profile")
    add_io(p, "session NDJSON ('-' for stdin)")
    p.add_argument("--user", help="user key (kind:value); required when "
                   "sessions span several users")
    p.add_argument("--first-page-boost", type=float, default=None)

    p = sub.add_parser("rerank", help="reorder candidates by interest")
    add_io(p, "candidate resources, one per line ('-' for stdin)")
    p.add_argument("--profile", required=True, help="profile JSON file")

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--spec", required=True, help="generator spec JSON file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    return parser


class _Streams:
    def __init__(self, stdin, stdout, stderr):
        self.stdin = stdin if stdin is not None else sys.stdin
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stderr = stderr if stderr is not None else sys.stderr


def _open_input(path: str, streams: _Streams):
    if path == "-":
        return streams.stdin, False
    return open(path, encoding="utf-8", newline=""), True


def _open_output(path: str, streams: _Streams):
    if path == "-":
        return streams.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_text(args, streams: _Streams, text: str) -> None:
    out, owned = _open_output(args.output, streams)
    try:
        out.write(text)
    finally:
        if owned:
            out.close()


def _iter_ndjson(stream):
    for line in stream:
        line = line.strip()
        if line:
            yield json.loads(line)


def _read_sessions(args, streams: _Streams) -> List[preprocess.Session]:
    stream, owned = _open_input(args.input, streams)
    try:
        return [preprocess.session_from_dict(doc) for doc in _iter_ndjson(stream)]
    finally:
        if owned:
            stream.close()


def _read_entries(args, streams: _Streams) -> List[logs.LogEntry]:
    stream, owned = _open_input(args.input, streams)
    try:
        return [logs.entry_from_dict(doc) for doc in _iter_ndjson(stream)]
    finally:
        if owned:
            stream.close()


def _shard_ranges(path: str, workers: int) -> List[tuple]:
    """Line-aligned byte ranges covering the file, at most ``workers`` long."""
    size = os.path.getsize(path)
    bounds = [0]
    with open(path, "rb") as handle:
        for i in range(1, workers):
            target = size * i // workers
            if target <= bounds[-1]:
                continue
            handle.seek(target)
            handle.readline()
            cut = handle.tell()
            if bounds[-1] < cut < size:
                bounds.append(cut)
    bounds.append(size)
    return list(zip(bounds, bounds[1:]))


def _parse_shard(path: str, fmt: logs.LogFormat, start: int, end: int) -> tuple:
    """Parse one byte range; returns (output lines, count, parsed, errors)."""
    out_lines: List[str] = []
    errors: List[tuple] = []
    total = parsed = 0
    with open(path, "rb") as handle:
        handle.seek(start)
        position = start
        while position < end:
            raw = handle.readline()
            if not raw:
                break
            position += len(raw)
            total += 1
            line = raw.decode("utf-8", errors="replace")
            stripped = line.rstrip("\r\n")
            if not stripped:
                errors.append((total, "empty line"))
                continue
            try:
                record = logs.parse_line(stripped, fmt)
            except logs.LogParseError as exc:
                errors.append((total, exc.reason))
                continue
            parsed += 1
            out_lines.append(json.dumps(logs.record_to_dict(record), sort_keys=True))
    return out_lines, total, parsed, errors


def _cmd_parse(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    fmt = _FORMATS[args.format or config.format]
    limit = (args.max_malformed_fraction if args.max_malformed_fraction is not None
             else config.max_malformed_fraction)
    if not 0 <= limit <= 1:
        raise UsageError(f"--max-malformed-fraction must be in [0, 1], got {limit}")
    if args.workers < 1:
        raise UsageError(f"--workers must be at least 1, got {args.workers}")

    total = parsed = 0
    error_samples: List[tuple] = []
    out, out_owned = _open_output(args.output, streams)
    try:
        if args.workers > 1:
            if args.input == "-":
                raise UsageError("--workers needs a seekable input file")
            ranges = _shard_ranges(args.input, args.workers)
            with concurrent.futures.ThreadPoolExecutor(max_workers=args.workers) as pool:
                shards = list(pool.map(
                    lambda r: _parse_shard(args.input, fmt, r[0], r[1]), ranges))
            offset = 0
            for lines, shard_total, shard_parsed, shard_errors in shards:
                for number, reason in shard_errors:
                    if len(error_samples) < logs.ERROR_SAMPLE_CAP:
                        error_samples.append((offset + number, reason))
                total += shard_total
                parsed += shard_parsed
                offset += shard_total
                for line in lines:
                    out.write(line + "\n")
        else:
            stream, in_owned = _open_input(args.input, streams)
            try:
                for number, record, error in logs.scan_log(stream, fmt):
                    total += 1
                    if error is not None:
                        if len(error_samples) < logs.ERROR_SAMPLE_CAP:
                            error_samples.append((number, error.reason))
                        continue
                    parsed += 1
                    out.write(json.dumps(logs.record_to_dict(record),
                                         sort_keys=True) + "\n")
            finally:
                if in_owned:
                    stream.close()
    finally:
        if out_owned:
            out.close()

    report = logs.ParseReport(total_lines=total, parsed=parsed,
                              malformed=total - parsed,
                              first_errors=tuple(error_samples))
    streams.stderr.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    if total and (total - parsed) / total > limit:
        raise MalformedInputError(
            f"{total - parsed} of {total} lines were malformed, "
            f"above the {limit} limit")
    return EXIT_OK


def _cmd_clean(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    clean_config = config.clean
    overrides = {}
    if args.asset_extensions is not None:
        overrides["asset_extensions"] = frozenset(
            ext.strip() for ext in args.asset_extensions.split(",") if ext.strip())
    if args.drop_error_statuses is not None:
        overrides["drop_error_statuses"] = args.drop_error_statuses
    if args.drop_non_get is not None:
        overrides["drop_non_get"] = args.drop_non_get
    if args.agent_blocklist is not None:
        overrides["agent_blocklist"] = tuple(
            s for s in args.agent_blocklist.split(",") if s)
    if overrides:
        clean_config = replace(clean_config, **overrides)
    entries = _read_entries(args, streams)
    kept = preprocess.clean(entries, clean_config)
    _write_text(args, streams, "".join(
        json.dumps(logs.entry_to_dict(e), sort_keys=True) + "\n" for e in kept))
    return EXIT_OK


def _cmd_sessionize(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    timeout = args.timeout if args.timeout is not None else config.timeout_seconds
    entries = _read_entries(args, streams)
    pieces = []
    for user, user_entries in preprocess.identify_users(entries).items():
        for session in preprocess.sessionize(user_entries, timeout, user=user):
            pieces.append(json.dumps(preprocess.session_to_dict(session),
                                     sort_keys=True) + "\n")
    _write_text(args, streams, "".join(pieces))
    return EXIT_OK


def _mine_params(args, config: RunConfig) -> MiningConfig:
    return MiningConfig(
        min_support=(args.min_support if args.min_support is not None
                     else config.mining.min_support),
        min_confidence=(args.min_confidence if args.min_confidence is not None
                        else config.mining.min_confidence),
        max_length=(args.max_length if args.max_length is not None
                    else config.mining.max_length),
    )


def _cmd_mine(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    params = _mine_params(args, config)
    output_format = args.output_format or config.output_format
    sessions = _read_sessions(args, streams)
    if args.target == "paths":
        graph = mining.build_path_graph(preprocess.to_sequences(sessions))
        data = analysis.render_report(graph, output_format)
    elif args.target == "rules":
        if output_format == "dot":
            raise UsageError("DOT output is only defined for 'mine paths'")
        rules = mining.mine_association_rules(
            preprocess.to_transactions(sessions),
            params.min_support, params.min_confidence)
        data = analysis.render_report(rules, output_format, kind="rules")
    else:
        if output_format == "dot":
            raise UsageError("DOT output is only defined for 'mine paths'")
        engine = args.engine or config.engine
        miner = (mining.mine_sequences_projection if engine == "projection"
                 else mining.mine_sequences_waptree)
        patterns = miner(preprocess.to_sequences(sessions),
                         params.min_support, params.max_length)
        data = analysis.render_report(patterns, output_format,
                                      kind="sequential_patterns")
    _write_text(args, streams, data.decode("utf-8"))
    return EXIT_OK


def _cmd_filter(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    stream, owned = _open_input(args.input, streams)
    try:
        document = stream.read()
    finally:
        if owned:
            stream.close()
    results = analysis.read_report(document)
    if isinstance(results, mining.NavigationGraph):
        raise UsageError("filter operates on rules or sequential patterns")
    kind = ("rules" if results and isinstance(results[0], mining.AssociationRule)
            else json.loads(document).get("kind"))
    predicate = analysis.PatternPredicate(
        min_support=args.min_support,
        min_confidence=args.min_confidence,
        min_length=args.min_length,
        max_length=args.max_length,
        must_contain=(frozenset(s for s in args.must_contain.split(",") if s)
                      if args.must_contain else None),
    )
    results = analysis.filter_patterns(results, predicate)
    topology = None
    topology_path = args.topology or config.topology_path
    if topology_path:
        topology = analysis.SiteTopology.from_csv(topology_path)
        results = analysis.site_filter(results, topology)
    output_format = args.output_format or ("json" if config.output_format == "dot"
                                           else config.output_format)
    data = analysis.render_report(results, output_format, kind=kind)
    if topology is not None and output_format == "json":
        document = json.loads(data.decode("utf-8"))
        document["topology_source"] = topology.source
        data = (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")
    _write_text(args, streams, data.decode("utf-8"))
    return EXIT_OK


def _cmd_extend(args, streams: _Streams) -> int:
    config = _resolve_config(args)
    idle = (args.idle_threshold if args.idle_threshold is not None
            else config.idle_threshold_seconds)
    with open(args.events, encoding="utf-8", newline="") as handle:
        events = behavior.events_from_csv(handle.read())
    by_user: Dict[preprocess.UserKey, List[behavior.ClientEvent]] = {}
    for event in events:
        by_user.setdefault(event.user, []).append(event)
    pieces = []
    for session in _read_sessions(args, streams):
        extended = behavior.merge_client_events(
            session, by_user.get(session.user, []), idle)
        pieces.append(json.dumps({
            "session": preprocess.session_to_dict(session),
            "active_seconds": extended.active_seconds,
            "elapsed_seconds": extended.elapsed_seconds,
            "event_count": len(extended.events),
        }, sort_keys=True) + "\n")
    _write_text(args, streams, "".join(pieces))
    return EXIT_OK


def _cmd_profile(args, streams: _Streams) -> int:
    boost = (args.first_page_boost if args.first_page_boost is not None
             else behavior.DEFAULT_FIRST_PAGE_BOOST)
    sessions = _read_sessions(args, streams)
    if args.user:
        key = preprocess.UserKey.from_string(args.user)
        sessions = [s for s in sessions if s.user == key]
        if not sessions:
            raise UsageError(f"no sessions for user {args.user!r}")
    elif len({s.user for s in sessions}) > 1:
        raise UsageError("sessions span several users; pass --user")
    profile = behavior.build_interest_profile(sessions, first_page_boost=boost)
    _write_text(args, streams, json.dumps({
        "schema_version": analysis.SCHEMA_VERSION,
        "kind": "interest_profile",
        "weights": dict(sorted(profile.weights.items())),
        "first_page_boost": profile.first_page_boost,
    }, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _cmd_rerank(args, streams: _Streams) -> int:
    with open(args.profile, encoding="utf-8") as handle:
        document = json.load(handle)
    if document.get("kind") != "interest_profile":
        raise UsageError(f"{args.profile} is not an interest profile")
    profile = behavior.InterestProfile(
        weights=document["weights"],
        first_page_boost=document.get("first_page_boost",
                                      behavior.DEFAULT_FIRST_PAGE_BOOST))
    stream, owned = _open_input(args.input, streams)
    try:
        candidates = [line.rstrip("\r\n") for line in stream if line.strip()]
    finally:
        if owned:
            stream.close()
    ranked = behavior.rerank(profile, candidates)
    _write_text(args, streams, "".join(c + "\n" for c in ranked))
    return EXIT_OK


def _cmd_gen(args, streams: _Streams) -> int:
    with open(args.spec, encoding="utf-8") as handle:
        data = json.load(handle)
    try:
        spec = behavior.GeneratorSpec.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"generator spec: {exc}")
    corpus = behavior.generate_synthetic(spec, args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    log_path = os.path.join(args.out_dir, "access.log")
    events_path = os.path.join(args.out_dir, "events.csv")
    truth_path = os.path.join(args.out_dir, "truth.json")
    with open(log_path, "w", encoding="utf-8", newline="") as handle:
        handle.write("".join(line + "\n" for line in corpus.access_log_lines))
    with open(events_path, "w", encoding="utf-8", newline="") as handle:
        handle.write("".join(line + "\n" for line in corpus.client_event_lines))
    with open(truth_path, "w", encoding="utf-8") as handle:
        json.dump(corpus.ground_truth, handle, sort_keys=True, indent=2)
        handle.write("\n")
    streams.stderr.write(
        f"wrote {len(corpus.access_log_lines)} log lines, "
        f"{max(0, len(corpus.client_event_lines) - 1)} events to {args.out_dir}\n")
    return EXIT_OK


_HANDLERS = {
    "parse": _cmd_parse,
    "clean": _cmd_clean,
    "sessionize": _cmd_sessionize,
    "mine": _cmd_mine,
    "filter": _cmd_filter,
    "extend": _cmd_extend,
    "profile": _cmd_profile,
    "rerank": _cmd_rerank,
    "gen": _cmd_gen,
}


def run(argv: Sequence[str], stdin=None, stdout=None, stderr=None) -> int:
    """Execute one CLI invocation; returns the process exit code.

    The streams are injectable for tests; identical (argv, input bytes,
    config) always produce identical output bytes and exit code.
    """
    streams = _Streams(stdin, stdout, stderr)
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        streams.stderr.write(parser.format_usage())
        streams.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help prints and exits 0
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        streams.stderr.write(parser.format_usage())
        streams.stderr.write("error: a subcommand is required\n")
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args, streams)
    except (UsageError, ConfigError) as exc:
        streams.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        streams.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except MalformedInputError as exc:
        streams.stderr.write(f"error: {exc}\n")
        return EXIT_MALFORMED
    except OSError as exc:
        streams.stderr.write(f"error: {exc}\n")
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
