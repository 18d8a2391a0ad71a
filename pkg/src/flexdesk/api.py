"""HTTP facade over the service core: JSON in, JSON out, bearer-token identity."""

from __future__ import annotations

from datetime import timedelta
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import errors
from .feedback import ComfortVote, Dimension, Preference
from .matching import assign_cohort, recommend
from .service import ServiceCore
from .telemetry import reading_from_dict, reading_to_dict
from .timeutil import iso, parse_instant

# domain error -> HTTP status
_STATUS = {
    errors.UnknownZone: 404,
    errors.UnknownDesk: 404,
    errors.UnknownToken: 404,
    errors.UnknownReservation: 404,
    errors.UnknownOccupant: 404,
    errors.DeskConflict: 409,
    errors.OccupantBusy: 409,
    errors.DuplicateZone: 409,
    errors.DuplicateDesk: 409,
    errors.DuplicateToken: 409,
    errors.DuplicateLabel: 409,
}
_DEFAULT_STATUS = 422  # domain-rule violations


class ReservationRequest(BaseModel):
    desk_id: str
    start: str  # ISO 8601 with offset


class CheckinRequest(BaseModel):
    qr_token: str


class UseNowRequest(BaseModel):
    qr_token: str


class FeedbackRequest(BaseModel):
    reservation_id: str
    votes: dict[str, str]  # dimension -> decrease | comfortable | increase


class OnboardRequest(BaseModel):
    display_alias: Optional[str] = None


class AssignRequest(BaseModel):
    occupant_ids: list[str] = Field(min_length=1)
    at: Optional[str] = None


def create_app(core: ServiceCore) -> FastAPI:
    app = FastAPI(title="flexdesk", version="0.1.0")
    # the browser client may be served from another origin during development
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(errors.DomainError)
    async def domain_error_handler(_request: Request, exc: errors.DomainError):
        status = _STATUS.get(type(exc), _DEFAULT_STATUS)
        return JSONResponse(
            status_code=status, content={"error": type(exc).__name__, "detail": str(exc)}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "ValidationError", "detail": exc.errors()})

    @app.exception_handler(ValueError)
    async def value_error_handler(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValidationError", "detail": str(exc)})

    class _Unauthorized(Exception):
        pass

    @app.exception_handler(_Unauthorized)
    async def unauthorized_handler(_request: Request, _exc: _Unauthorized):
        return JSONResponse(status_code=401, content={"error": "Unauthorized"})

    def require_identity(authorization: Optional[str] = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise _Unauthorized()
        token = authorization.removeprefix("Bearer ").strip()
        if not core.identities.exists(token):
            raise _Unauthorized()
        return token

    # -- onboarding ----------------------------------------------------------

    @app.post("/occupants", status_code=201)
    def onboard(body: OnboardRequest):
        ident = core.onboard_occupant(display_alias=body.display_alias)
        return ident.to_dict()

    # -- zones & telemetry ------------------------------------------------------

    @app.get("/zones")
    def zones():
        return [
            {
                "zone_id": z.zone_id,
                "building": z.building,
                "floor": z.floor,
                "name": z.name,
                "sensor_id": z.sensor_id,
                "desk_count": len(z.desk_ids),
            }
            for z in core.catalog.zones()
        ]

    @app.get("/zones/{zone_id}/dashboard")
    def dashboard(zone_id: str):
        latest = core.telemetry.latest(zone_id)
        now = core.clock()
        # stats window is half-open; nudge the end so "now" itself counts
        window = (now - timedelta(days=14), now + timedelta(seconds=1))
        profile = core.telemetry.zone_profile(zone_id, window, core.config.operating_hours)
        stats = {}
        for channel, s in profile.stats.items():
            stats[channel] = (
                None
                if s is None
                else {"n": s.n, "mean": s.mean, "std": s.std, "quantiles": s.quantiles}
            )
        return {
            "zone_id": zone_id,
            "latest_reading": None if latest is None else reading_to_dict(latest),
            "window": [iso(window[0]), iso(window[1])],
            "stats": stats,
        }

    @app.get("/zones/{zone_id}/desks")
    def available_desks(zone_id: str, from_: str = Query(alias="from"), to: str = Query()):
        interval = (parse_instant(from_), parse_instant(to))
        return {"zone_id": zone_id, "available": core.booking.list_available(zone_id, interval)}

    @app.post("/sensor-readings", status_code=201)
    def ingest(reading: dict):
        result = core.ingest_reading(reading_from_dict(reading))
        return {"accepted": result.accepted, "reason": result.reason}

    # -- booking ---------------------------------------------------------------

    def _reservation_view(reservation, include_prompts: bool = False) -> dict:
        view = reservation.to_dict()
        view.pop("occupant_id", None)  # identity never leaves the server
        return view

    @app.post("/reservations", status_code=201)
    def reserve(body: ReservationRequest, occupant: str = Depends(require_identity)):
        reservation = core.reserve(body.desk_id, occupant, parse_instant(body.start))
        return _reservation_view(reservation)

    @app.get("/reservations/{reservation_id}")
    def get_reservation(reservation_id: str, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(reservation_id)  # do not leak existence
        return _reservation_view(reservation)

    @app.post("/reservations/{reservation_id}/checkin")
    def checkin(reservation_id: str, body: CheckinRequest, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(reservation_id)
        return _reservation_view(core.check_in(reservation_id, body.qr_token))

    @app.post("/reservations/{reservation_id}/extend")
    def extend(reservation_id: str, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(reservation_id)
        return _reservation_view(core.extend(reservation_id))

    @app.post("/reservations/{reservation_id}/cancel")
    def cancel(reservation_id: str, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(reservation_id)
        return _reservation_view(core.cancel(reservation_id))

    @app.get("/reservations/{reservation_id}/prompts")
    def prompts(reservation_id: str, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(reservation_id)
        schedule = core.booking.prompt_schedule(reservation_id)
        return {
            "reservation_id": reservation_id,
            "prompt_times": [iso(t) for t in schedule.prompt_times],
        }

    @app.post("/use-now", status_code=201)
    def use_now(body: UseNowRequest, occupant: str = Depends(require_identity)):
        return _reservation_view(core.use_now(body.qr_token, occupant))

    # -- feedback ---------------------------------------------------------------

    @app.post("/feedback", status_code=201)
    def feedback(body: FeedbackRequest, occupant: str = Depends(require_identity)):
        reservation = core.booking.get(body.reservation_id)
        if reservation.occupant_id != occupant:
            raise errors.UnknownReservation(body.reservation_id)
        votes = [
            ComfortVote(dimension=Dimension(d), value=Preference(v))
            for d, v in sorted(body.votes.items())
        ]
        point = core.submit_feedback(body.reservation_id, votes)
        return point.to_dict()

    # -- profiles & recommendations ----------------------------------------------

    @app.get("/occupants/me/profile")
    def my_profile(occupant: str = Depends(require_identity)):
        return core.occupant_profile(occupant).to_dict()

    @app.get("/recommendations")
    def recommendations(
        occupant: str = Depends(require_identity), at: Optional[str] = Query(default=None)
    ):
        t = parse_instant(at) if at else core.clock()
        if core.matrix is None:
            raise errors.StaleModel("no match matrix published yet")
        profile = core.occupant_profile(occupant)
        ranked = recommend(core.matrix, profile, core.availability_pairs(t))
        return {"at": iso(t), "recommendations": [r.to_dict() for r in ranked]}

    @app.get("/match-matrix")
    def match_matrix():
        if core.matrix is None:
            raise errors.StaleModel("no match matrix published yet")
        return core.matrix.to_dict()

    # -- admin --------------------------------------------------------------------

    @app.post("/admin/recompute")
    def admin_recompute():
        fitted = core.recompute_profiles()
        matrix = core.recompute_matrix()
        return {
            "models": {dim.value: model.to_dict() for dim, (model, _) in fitted.items()},
            "matrix": matrix.to_dict(),
        }

    @app.post("/admin/assign-cohort")
    def admin_assign(body: AssignRequest):
        if core.matrix is None:
            raise errors.StaleModel("no match matrix published yet")
        t = parse_instant(body.at) if body.at else core.clock()
        profiles = {occ: core.occupant_profile(occ) for occ in body.occupant_ids}
        assignment = assign_cohort(core.matrix, profiles, core.availability_pairs(t))
        return {"at": iso(t), "assignment": assignment}

    return app
