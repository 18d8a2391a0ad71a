"""Domain error types. Each maps to a client-visible failure at the API edge."""

from __future__ import annotations


class DomainError(Exception):
    """Base class for domain-rule violations."""


# --- catalog ---------------------------------------------------------------

class DuplicateZone(DomainError):
    pass


class InvalidZone(DomainError):
    pass


class UnknownZone(DomainError):
    pass


class DuplicateDesk(DomainError):
    pass


class DuplicateToken(DomainError):
    pass


class DuplicateLabel(DomainError):
    pass


class UnknownDesk(DomainError):
    pass


class UnknownToken(DomainError):
    pass


# --- telemetry ---------------------------------------------------------------

class InvalidWindow(DomainError):
    pass


class InvalidReading(DomainError):
    pass


# --- booking -----------------------------------------------------------------

class DeskConflict(DomainError):
    pass


class PastStart(DomainError):
    pass


class OutsideOperatingHours(DomainError):
    pass


class OutsideGrace(DomainError):
    pass


class WrongDesk(DomainError):
    pass


class BadState(DomainError):
    pass


class OccupantBusy(DomainError):
    pass


class UnknownReservation(DomainError):
    pass


# --- feedback ------------------------------------------------------------------

class DuplicateDimension(DomainError):
    pass


class EmptyVotes(DomainError):
    pass


class UnknownOccupant(DomainError):
    pass


# --- profiling / matching ------------------------------------------------------

class TooFewUsers(DomainError):
    def __init__(self, message: str, degenerate: bool = False):
        super().__init__(message)
        # degenerate marks "inputs exist but carry no cluster structure"
        # (all feature vectors identical), as opposed to plain undersampling
        self.degenerate = degenerate


class NoData(DomainError):
    pass


class StaleModel(DomainError):
    pass


class Infeasible(DomainError):
    pass


# --- persistence ------------------------------------------------------------

class CorruptLog(DomainError):
    pass


# --- simgen -------------------------------------------------------------------

class InvalidSpec(DomainError):
    pass
