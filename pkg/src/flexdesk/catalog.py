"""Registry of buildings, zones, desks, and the QR tokens that localize feedback."""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass, replace
from typing import Optional

from .errors import (
    DuplicateDesk,
    DuplicateLabel,
    DuplicateToken,
    DuplicateZone,
    InvalidZone,
    UnknownDesk,
    UnknownToken,
    UnknownZone,
)

QR_TOKEN_LENGTH = 12


def new_qr_token() -> str:
    """URL-safe random token; the printed QR label encodes a check-in URL carrying it."""
    token = secrets.token_urlsafe(QR_TOKEN_LENGTH)[:QR_TOKEN_LENGTH]
    return token


@dataclass(frozen=True)
class Zone:
    zone_id: str
    building: str
    floor: int
    name: str
    sensor_id: str
    desk_ids: tuple[str, ...]


@dataclass(frozen=True)
class Desk:
    desk_id: str
    zone_id: str
    label: str
    qr_token: str
    attributes: Optional[dict] = None
    active: bool = True


class Catalog:
    """Read-mostly registry; writes serialized behind a single lock."""

    def __init__(self):
        self._lock = threading.RLock()
        self._zones: dict[str, Zone] = {}
        self._desks: dict[str, Desk] = {}
        self._token_index: dict[str, str] = {}  # active qr_token -> desk_id

    # -- writes ---------------------------------------------------------

    def register_zone(self, zone: Zone) -> str:
        if not zone.desk_ids:
            raise InvalidZone(f"zone {zone.zone_id} declares no desks")
        with self._lock:
            existing = self._zones.get(zone.zone_id)
            if existing is not None:
                if existing == zone:
                    return zone.zone_id  # idempotent re-registration
                raise DuplicateZone(f"zone {zone.zone_id} already registered with a different payload")
            self._zones[zone.zone_id] = zone
            return zone.zone_id

    def register_desk(self, desk: Desk) -> str:
        with self._lock:
            zone = self._zones.get(desk.zone_id)
            if zone is None:
                raise UnknownZone(f"desk {desk.desk_id} references unknown zone {desk.zone_id}")
            existing = self._desks.get(desk.desk_id)
            if existing is not None:
                if existing == desk:
                    return desk.desk_id
                raise DuplicateDesk(f"desk {desk.desk_id} already registered with a different payload")
            owner = self._token_index.get(desk.qr_token)
            if owner is not None and owner != desk.desk_id:
                raise DuplicateToken(f"qr token of desk {desk.desk_id} already owned by {owner}")
            for sibling_id in zone.desk_ids:
                sibling = self._desks.get(sibling_id)
                if sibling is not None and sibling.label == desk.label:
                    raise DuplicateLabel(f"label {desk.label!r} already used in zone {zone.zone_id}")
            self._desks[desk.desk_id] = desk
            if desk.active:
                self._token_index[desk.qr_token] = desk.desk_id
            if desk.desk_id not in zone.desk_ids:
                self._zones[zone.zone_id] = replace(zone, desk_ids=zone.desk_ids + (desk.desk_id,))
            return desk.desk_id

    def deactivate_desk(self, desk_id: str) -> Desk:
        """Soft removal: historical feedback keeps a valid desk reference."""
        with self._lock:
            desk = self._desks.get(desk_id)
            if desk is None:
                raise UnknownDesk(desk_id)
            if desk.active:
                desk = replace(desk, active=False)
                self._desks[desk_id] = desk
                self._token_index.pop(desk.qr_token, None)
            return desk

    # -- reads ------------------------------------------------------------

    def resolve_qr(self, qr_token: str) -> Desk:
        with self._lock:
            desk_id = self._token_index.get(qr_token)
            if desk_id is None:
                raise UnknownToken("token does not resolve to an active desk")
            return self._desks[desk_id]

    def get_zone(self, zone_id: str) -> Zone:
        with self._lock:
            zone = self._zones.get(zone_id)
            if zone is None:
                raise UnknownZone(zone_id)
            return zone

    def get_desk(self, desk_id: str) -> Desk:
        with self._lock:
            desk = self._desks.get(desk_id)
            if desk is None:
                raise UnknownDesk(desk_id)
            return desk

    def has_zone(self, zone_id: str) -> bool:
        with self._lock:
            return zone_id in self._zones

    def zones(self) -> list[Zone]:
        with self._lock:
            return sorted(self._zones.values(), key=lambda z: z.zone_id)

    def desks(self, zone_id: Optional[str] = None, active_only: bool = False) -> list[Desk]:
        with self._lock:
            out = [
                d
                for d in self._desks.values()
                if (zone_id is None or d.zone_id == zone_id) and (not active_only or d.active)
            ]
            return sorted(out, key=lambda d: d.desk_id)

    def validate(self) -> None:
        """Referential integrity: declared desk ids resolve and point back."""
        with self._lock:
            for zone in self._zones.values():
                for desk_id in zone.desk_ids:
                    desk = self._desks.get(desk_id)
                    if desk is None:
                        raise InvalidZone(f"zone {zone.zone_id} declares missing desk {desk_id}")
                    if desk.zone_id != zone.zone_id:
                        raise InvalidZone(
                            f"desk {desk_id} belongs to {desk.zone_id}, declared by {zone.zone_id}"
                        )
            declared = sum(len(z.desk_ids) for z in self._zones.values())
            if declared != len(self._desks):
                raise InvalidZone(f"{declared} declared desk slots vs {len(self._desks)} desks")


# -- seed file -----------------------------------------------------------

def zone_from_dict(raw: dict) -> Zone:
    return Zone(
        zone_id=raw["zone_id"],
        building=raw["building"],
        floor=int(raw["floor"]),
        name=raw["name"],
        sensor_id=raw["sensor_id"],
        desk_ids=tuple(raw["desk_ids"]),
    )


def desk_from_dict(raw: dict) -> Desk:
    return Desk(
        desk_id=raw["desk_id"],
        zone_id=raw["zone_id"],
        label=raw["label"],
        qr_token=raw["qr_token"],
        attributes=raw.get("attributes"),
        active=bool(raw.get("active", True)),
    )


def zone_to_dict(zone: Zone) -> dict:
    return {
        "zone_id": zone.zone_id,
        "building": zone.building,
        "floor": zone.floor,
        "name": zone.name,
        "sensor_id": zone.sensor_id,
        "desk_ids": list(zone.desk_ids),
    }


def desk_to_dict(desk: Desk) -> dict:
    out = {
        "desk_id": desk.desk_id,
        "zone_id": desk.zone_id,
        "label": desk.label,
        "qr_token": desk.qr_token,
        "active": desk.active,
    }
    if desk.attributes is not None:
        out["attributes"] = desk.attributes
    return out


def load_seed(catalog: Catalog, seed: dict) -> None:
    """Load a {"zones": [...], "desks": [...]} document, then integrity-check."""
    for raw in seed.get("zones", []):
        catalog.register_zone(zone_from_dict(raw))
    for raw in seed.get("desks", []):
        catalog.register_desk(desk_from_dict(raw))
    catalog.validate()
