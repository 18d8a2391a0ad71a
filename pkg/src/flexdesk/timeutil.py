"""Instant parsing and formatting. All internal instants are tz-aware UTC."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

UTC = timezone.utc


def utc_now() -> datetime:
    return datetime.now(tz=UTC).replace(microsecond=0)


def ensure_utc(t: datetime) -> datetime:
    """Normalize an instant to UTC. Naive datetimes are taken as UTC."""
    if t.tzinfo is None:
        return t.replace(tzinfo=UTC)
    return t.astimezone(UTC)


def floor_second(t: datetime) -> datetime:
    return t.replace(microsecond=0)


def parse_instant(text: str) -> datetime:
    # fromisoformat() on 3.10 rejects a trailing 'Z'
    cleaned = text.strip()
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    return ensure_utc(datetime.fromisoformat(cleaned))


def iso(t: datetime) -> str:
    return ensure_utc(t).isoformat()


def minutes(n: float) -> timedelta:
    return timedelta(minutes=n)
