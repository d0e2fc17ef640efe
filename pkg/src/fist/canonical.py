"""Canonical JSON and timestamp formatting.

Every document this package emits (corpus, incident, report, bundle, layer)
goes through :func:`canonical_json` so that identical inputs always produce
byte-identical output.
"""

from __future__ import annotations

import json
import re
from datetime import datetime, timezone

from .errors import SchemaError

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

_TIMESTAMP_RE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}Z")


def canonical_json(document) -> str:
    """Serialize with fixed formatting; key order is the caller's insertion order."""
    return json.dumps(document, ensure_ascii=False, indent=2) + "\n"


def format_timestamp(value: datetime) -> str:
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    if not isinstance(text, str) or _TIMESTAMP_RE.fullmatch(text) is None:
        raise SchemaError(f"timestamp must match YYYY-MM-DDTHH:MM:SSZ, got {text!r}")
    try:
        parsed = datetime.strptime(text, TIMESTAMP_FORMAT)
    except ValueError as exc:
        raise SchemaError(f"invalid timestamp {text!r}: {exc}") from exc
    return parsed.replace(tzinfo=timezone.utc)


def utc_now() -> datetime:
    """Current time truncated to whole seconds, the canonical resolution."""
    return datetime.now(timezone.utc).replace(microsecond=0)
