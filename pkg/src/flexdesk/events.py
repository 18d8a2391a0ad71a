"""Append-only JSON-lines event log with strictly increasing sequence numbers.

The log is the durable source of truth: replaying it rebuilds the full
service state. Snapshots are plain canonical-JSON dumps of that state, used
for fast inspection and for bit-equality checks after recovery.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

from .errors import CorruptLog
from .timeutil import ensure_utc, iso, parse_instant, utc_now


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


@dataclass(frozen=True)
class EventRecord:
    seq: int
    kind: str
    payload: dict
    timestamp: datetime

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "payload": self.payload,
            "timestamp": iso(self.timestamp),
        }


class EventLog:
    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._next_seq = 1
        self._fp = None  # append handle, opened on first write and kept
        if self.path.exists():
            records = list(self.read_all())
            if records:
                self._next_seq = records[-1].seq + 1

    def append(self, kind: str, payload: dict, timestamp: Optional[datetime] = None) -> EventRecord:
        with self._lock:
            record = EventRecord(
                seq=self._next_seq,
                kind=kind,
                payload=payload,
                timestamp=ensure_utc(timestamp) if timestamp else utc_now(),
            )
            line = canonical_json(record.to_dict())
            if self._fp is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._fp = open(self.path, "ab")
            self._fp.write(line + b"\n")
            self._fp.flush()
            self._next_seq += 1
            return record

    def close(self) -> None:
        with self._lock:
            if self._fp is not None:
                self._fp.close()
                self._fp = None

    def read_all(self) -> Iterator[EventRecord]:
        """Yield records in order, enforcing a gap-free 1..N sequence."""
        if not self.path.exists():
            return
        expected = 1
        with open(self.path, "rb") as fp:
            for line_no, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    record = EventRecord(
                        seq=int(raw["seq"]),
                        kind=str(raw["kind"]),
                        payload=raw["payload"],
                        timestamp=parse_instant(raw["timestamp"]),
                    )
                except (ValueError, KeyError, TypeError) as exc:
                    raise CorruptLog(f"unparseable event at line {line_no}: {exc}") from exc
                if record.seq != expected:
                    raise CorruptLog(f"sequence gap at line {line_no}: expected {expected}, got {record.seq}")
                expected += 1
                yield record
