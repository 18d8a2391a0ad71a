"""Anonymous occupant identity: a bearer token and nothing that identifies a person."""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from .errors import UnknownOccupant
from .timeutil import ensure_utc, iso, parse_instant, utc_now


@dataclass(frozen=True)
class OccupantIdentity:
    occupant_id: str  # opaque unguessable token, doubles as the bearer credential
    created_at: datetime
    display_alias: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "occupant_id": self.occupant_id,
            "created_at": iso(self.created_at),
            "display_alias": self.display_alias,
        }


def identity_from_dict(raw: dict) -> OccupantIdentity:
    return OccupantIdentity(
        occupant_id=raw["occupant_id"],
        created_at=parse_instant(raw["created_at"]),
        display_alias=raw.get("display_alias"),
    )


class IdentityRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._by_id: dict[str, OccupantIdentity] = {}

    def onboard(
        self,
        display_alias: Optional[str] = None,
        occupant_id: Optional[str] = None,
        created_at: Optional[datetime] = None,
    ) -> OccupantIdentity:
        identity = OccupantIdentity(
            occupant_id=occupant_id or secrets.token_urlsafe(16),
            created_at=ensure_utc(created_at) if created_at else utc_now(),
            display_alias=display_alias,
        )
        with self._lock:
            self._by_id[identity.occupant_id] = identity
        return identity

    def exists(self, occupant_id: str) -> bool:
        with self._lock:
            return occupant_id in self._by_id

    def get(self, occupant_id: str) -> OccupantIdentity:
        with self._lock:
            identity = self._by_id.get(occupant_id)
        if identity is None:
            raise UnknownOccupant("unknown occupant token")
        return identity

    def all_identities(self) -> list[OccupantIdentity]:
        with self._lock:
            return sorted(self._by_id.values(), key=lambda i: i.occupant_id)
