"""Container terminal operations engine bindings."""

from quayside._quayside import (  # noqa: F401
    ArchiveTier,
    ContainerId,
    EdifactDocument,
    billable_storage_days,
    check_digit,
    estimate_rehandles,
    format_iso8601,
    line_amount,
    parse_baplie_file,
    parse_iso8601,
    run_scenario,
    tier_for_age_years,
    tokenize,
    validate_container_id,
)

__all__ = [
    "ArchiveTier",
    "ContainerId",
    "EdifactDocument",
    "billable_storage_days",
    "check_digit",
    "estimate_rehandles",
    "format_iso8601",
    "line_amount",
    "parse_baplie_file",
    "parse_iso8601",
    "run_scenario",
    "tier_for_age_years",
    "tokenize",
    "validate_container_id",
]
