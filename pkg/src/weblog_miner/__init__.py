"""Web server log parsing, sessionization, and navigation pattern mining.

The package splits into focused modules: :mod:`weblog_miner.logs` parses
and serializes the raw line formats, :mod:`weblog_miner.preprocess`
cleans records and rebuilds sessions, :mod:`weblog_miner.mining`
discovers navigation graphs, association rules, sequential patterns and
session clusters, :mod:`weblog_miner.analysis` filters and renders the
results, :mod:`weblog_miner.behavior` models client-side engagement and
user interest, and :mod:`weblog_miner.cli` ties it all to a command
line.
"""

from .analysis import (
    PatternPredicate,
    SiteTopology,
    filter_patterns,
    read_report,
    render_report,
    site_filter,
)
from .behavior import (
    ClientEvent,
    EventKind,
    ExtendedSession,
    GeneratorSpec,
    InterestProfile,
    SyntheticCorpus,
    active_time,
    build_interest_profile,
    generate_synthetic,
    merge_client_events,
    rerank,
    window_active_times,
)
from .logs import (
    ErrorEntry,
    LogEntry,
    LogFormat,
    LogParseError,
    ParseReport,
    RefererPair,
    StatusClass,
    classify_status,
    parse_clf,
    parse_combined,
    parse_error_line,
    parse_log,
    parse_referer_pair,
    serialize_clf,
    serialize_combined,
    serialize_error_line,
    serialize_referer_pair,
)
from .mining import (
    AssociationRule,
    NavigationGraph,
    SequentialPattern,
    SessionCluster,
    WapTree,
    build_path_graph,
    build_waptree,
    cluster_sessions,
    frequent_itemsets,
    mine_association_rules,
    mine_sequences_projection,
    mine_sequences_waptree,
)
from .preprocess import (
    CleanConfig,
    SequenceDB,
    Session,
    TransactionDB,
    UserKey,
    UserKeyKind,
    Visit,
    clean,
    identify_users,
    sessionize,
    to_sequences,
    to_transactions,
)

__version__ = "0.1.0"
