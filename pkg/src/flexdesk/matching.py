"""Zone-to-comfort-type matching.

A cluster's comfort band is the [p10, p90] interval of sensor values seen at
its members' "comfortable" votes. A zone's match level for that band is the
fraction of the zone's recent occupied-hours readings falling inside it: an
empirical probability that the zone will satisfy that comfort type. Levels
per dimension combine into an overall score by configured weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .catalog import Catalog
from .errors import Infeasible, NoData, StaleModel
from .feedback import DIMENSION_CHANNEL, Dimension, EnrichedFeedback, Preference
from .profiling import ComfortClusterModel, OccupantProfile, TypeLabel
from .stats import quantile_linear
from .telemetry import TelemetryStore
from .timeutil import iso

BAND_QUANTILES = (0.10, 0.90)

# canonical column order of the heat-map export
LABEL_ORDER = (
    TypeLabel.PREFER_DECREASE,
    TypeLabel.COMFORTABLE,
    TypeLabel.PREFER_INCREASE,
    TypeLabel.HARD_TO_PREDICT,
)


@dataclass(frozen=True)
class ComfortBand:
    dimension: Dimension
    lo: float
    hi: float
    cluster: Optional[int]  # None for the population band
    n: int
    fallback: bool  # True when the cluster was too thin and population values were used

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension.value,
            "lo": self.lo,
            "hi": self.hi,
            "cluster": self.cluster,
            "n": self.n,
            "fallback": self.fallback,
        }


def _comfortable_values(
    histories: Mapping[str, Sequence[EnrichedFeedback]],
    dimension: Dimension,
    occupants: Optional[set] = None,
) -> list[float]:
    values = []
    for occupant, history in histories.items():
        if occupants is not None and occupant not in occupants:
            continue
        for item in history:
            if item.base.vote_for(dimension) is not Preference.COMFORTABLE:
                continue
            value = item.snapshot_value(dimension)
            if value is not None:
                values.append(value)
    return values


def _band_from_values(
    dimension: Dimension, values: Sequence[float], cluster: Optional[int], fallback: bool
) -> ComfortBand:
    lo = quantile_linear(values, BAND_QUANTILES[0])
    hi = quantile_linear(values, BAND_QUANTILES[1])
    if lo >= hi:  # degenerate sample; keep the interval technically non-empty
        lo, hi = lo - 1e-9, hi + 1e-9
    return ComfortBand(
        dimension=dimension, lo=lo, hi=hi, cluster=cluster, n=len(values), fallback=fallback
    )


def population_band(
    histories: Mapping[str, Sequence[EnrichedFeedback]], dimension: Dimension
) -> ComfortBand:
    """[p10, p90] of all comfortable-vote conditions: the information-free prior."""
    values = _comfortable_values(histories, dimension)
    if not values:
        raise NoData(f"no comfortable {dimension.value} votes anywhere")
    return _band_from_values(dimension, values, cluster=None, fallback=True)


def comfort_band(
    model: ComfortClusterModel,
    cluster_idx: int,
    histories: Mapping[str, Sequence[EnrichedFeedback]],
    min_band_samples: int = 10,
) -> ComfortBand:
    """Band of one cluster's members; thin clusters fall back to the population."""
    if not 0 <= cluster_idx < model.k:
        raise ValueError(f"cluster {cluster_idx} not in model of k={model.k}")
    members = set(model.members(cluster_idx))
    values = _comfortable_values(histories, model.dimension, occupants=members)
    if len(values) >= min_band_samples:
        return _band_from_values(model.dimension, values, cluster=cluster_idx, fallback=False)
    pop = _comfortable_values(histories, model.dimension)
    if not pop:
        raise NoData(f"no comfortable {model.dimension.value} votes anywhere")
    return _band_from_values(model.dimension, pop, cluster=cluster_idx, fallback=True)


def match_level(samples: Sequence[float], band: ComfortBand) -> float:
    """Fraction of readings inside the band (inclusive); 0.0 with no readings."""
    if len(samples) == 0:
        return 0.0
    arr = np.asarray(samples, dtype=float)
    inside = np.count_nonzero((band.lo <= arr) & (arr <= band.hi))
    return float(inside / arr.size)


@dataclass(frozen=True)
class MatrixCell:
    level: float
    n_samples: int

    @property
    def no_data(self) -> bool:
        return self.n_samples == 0


@dataclass(frozen=True)
class MatchMatrix:
    window: tuple[datetime, datetime]
    hours_filter: tuple[int, int]
    weights: dict  # Dimension -> weight
    zone_ids: tuple[str, ...]
    labels: tuple[TypeLabel, ...]
    bands: dict  # (Dimension, TypeLabel) -> ComfortBand
    cells: dict  # (zone_id, Dimension, TypeLabel) -> MatrixCell

    def level(self, zone_id: str, dimension: Dimension, label: TypeLabel) -> float:
        return self.cells[(zone_id, dimension, label)].level

    def overall(self, zone_id: str, labels_by_dim: Mapping[Dimension, TypeLabel]) -> float:
        """Weighted mean of per-dimension levels for one comfort-type profile."""
        # fixed summation order keeps the result bit-stable across
        # serialization round trips
        ordered = sorted(self.weights.items(), key=lambda kv: kv[0].value)
        total_w = 0.0
        acc = 0.0
        for dimension, weight in ordered:
            label = labels_by_dim.get(dimension, TypeLabel.HARD_TO_PREDICT)
            acc += weight * self.level(zone_id, dimension, label)
            total_w += weight
        return acc / total_w

    def overall_uniform(self, zone_id: str, label: TypeLabel) -> float:
        return self.overall(zone_id, {dim: label for dim in self.weights})

    def to_dict(self) -> dict:
        return {
            "window": [iso(self.window[0]), iso(self.window[1])],
            "hours_filter": list(self.hours_filter),
            "weights": {d.value: w for d, w in sorted(self.weights.items(), key=lambda kv: kv[0].value)},
            "zones": list(self.zone_ids),
            "labels": [lbl.value for lbl in self.labels],
            "bands": {
                f"{dim.value}:{lbl.value}": self.bands[(dim, lbl)].to_dict()
                for (dim, lbl) in sorted(self.bands, key=lambda k: (k[0].value, k[1].value))
            },
            "cells": {
                f"{zone}:{dim.value}:{lbl.value}": {
                    "level": cell.level,
                    "n_samples": cell.n_samples,
                }
                for (zone, dim, lbl), cell in sorted(
                    self.cells.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2].value)
                )
            },
            "overall": {
                f"{zone}:{lbl.value}": self.overall_uniform(zone, lbl)
                for zone in self.zone_ids
                for lbl in self.labels
            },
        }

    def to_csv_rows(self) -> list[list]:
        rows = [["zone_id", "cluster_label", "dimension", "level", "overall"]]
        for zone in self.zone_ids:
            for label in self.labels:
                overall = self.overall_uniform(zone, label)
                for dimension in sorted(self.weights, key=lambda d: d.value):
                    rows.append(
                        [zone, label.value, dimension.value, self.level(zone, dimension, label), overall]
                    )
        return rows


def matrix_from_dict(raw: dict) -> MatchMatrix:
    from .timeutil import parse_instant

    weights = {Dimension(d): float(w) for d, w in raw["weights"].items()}
    bands = {}
    for key, payload in raw["bands"].items():
        dim_s, lbl_s = key.split(":")
        bands[(Dimension(dim_s), TypeLabel(lbl_s))] = ComfortBand(
            dimension=Dimension(payload["dimension"]),
            lo=float(payload["lo"]),
            hi=float(payload["hi"]),
            cluster=payload.get("cluster"),
            n=int(payload["n"]),
            fallback=bool(payload["fallback"]),
        )
    cells = {}
    for key, payload in raw["cells"].items():
        zone, dim_s, lbl_s = key.split(":")
        cells[(zone, Dimension(dim_s), TypeLabel(lbl_s))] = MatrixCell(
            level=float(payload["level"]), n_samples=int(payload["n_samples"])
        )
    return MatchMatrix(
        window=(parse_instant(raw["window"][0]), parse_instant(raw["window"][1])),
        hours_filter=(int(raw["hours_filter"][0]), int(raw["hours_filter"][1])),
        weights=weights,
        zone_ids=tuple(raw["zones"]),
        labels=tuple(TypeLabel(v) for v in raw["labels"]),
        bands=bands,
        cells=cells,
    )


def compute_matrix(
    catalog: Catalog,
    telemetry: TelemetryStore,
    models: Mapping[Dimension, ComfortClusterModel],
    histories: Mapping[str, Sequence[EnrichedFeedback]],
    window: tuple[datetime, datetime],
    weights: Mapping[Dimension, float],
    hours_filter: tuple[int, int] = (8, 18),
) -> MatchMatrix:
    """Zone x comfort-type grid of match levels over one evaluation window.

    Hard-to-predict columns use the population band, the widest prior we can
    justify without per-type evidence; so do type labels that a dimension's
    model never produced.
    """
    missing = [d.value for d in weights if d not in models]
    if missing:
        raise StaleModel(f"no published model for: {', '.join(sorted(missing))}")

    present = set()
    for model in models.values():
        present.update(model.labels.values())
    labels = tuple(lbl for lbl in LABEL_ORDER if lbl in present or lbl is TypeLabel.HARD_TO_PREDICT)

    bands: dict = {}
    for dimension, model in models.items():
        pop = population_band(histories, dimension)
        for label in labels:
            if label is TypeLabel.HARD_TO_PREDICT:
                bands[(dimension, label)] = pop
                continue
            member_clusters = [idx for idx, lbl in model.labels.items() if lbl is label]
            if not member_clusters:
                bands[(dimension, label)] = pop
                continue
            members = set()
            for idx in member_clusters:
                members.update(model.members(idx))
            values = _comfortable_values(histories, dimension, occupants=members)
            if len(values) >= 10:
                bands[(dimension, label)] = _band_from_values(
                    dimension, values, cluster=min(member_clusters), fallback=False
                )
            else:
                bands[(dimension, label)] = _band_from_values(
                    dimension,
                    _comfortable_values(histories, dimension),
                    cluster=min(member_clusters),
                    fallback=True,
                )

    zone_ids = tuple(z.zone_id for z in catalog.zones())
    cells: dict = {}
    for zone_id in zone_ids:
        for dimension in models:
            samples = telemetry.channel_samples(
                zone_id, window, DIMENSION_CHANNEL[dimension], hours_filter
            )
            for label in labels:
                band = bands[(dimension, label)]
                cells[(zone_id, dimension, label)] = MatrixCell(
                    level=match_level(samples, band), n_samples=len(samples)
                )
    return MatchMatrix(
        window=window,
        hours_filter=hours_filter,
        weights=dict(weights),
        zone_ids=zone_ids,
        labels=labels,
        bands=bands,
        cells=cells,
    )


@dataclass(frozen=True)
class Recommendation:
    desk_id: str
    zone_id: str
    overall: float
    levels: dict  # Dimension -> level

    def to_dict(self) -> dict:
        return {
            "desk_id": self.desk_id,
            "zone_id": self.zone_id,
            "overall": self.overall,
            "levels": {d.value: v for d, v in sorted(self.levels.items(), key=lambda kv: kv[0].value)},
        }


def recommend(
    matrix: MatchMatrix,
    profile: OccupantProfile,
    available: Sequence[tuple[str, str]],  # (zone_id, desk_id)
) -> list[Recommendation]:
    """Rank available desks for one occupant; ties go to lower zone, then desk id."""
    labels_by_dim = {dim: profile.label_for(dim) for dim in matrix.weights}
    per_zone: dict = {}
    for zone_id, _ in available:
        if zone_id in per_zone:
            continue
        per_zone[zone_id] = (
            matrix.overall(zone_id, labels_by_dim),
            {dim: matrix.level(zone_id, dim, labels_by_dim[dim]) for dim in matrix.weights},
        )
    entries = [
        Recommendation(
            desk_id=desk_id,
            zone_id=zone_id,
            overall=per_zone[zone_id][0],
            levels=per_zone[zone_id][1],
        )
        for zone_id, desk_id in available
    ]
    entries.sort(key=lambda e: (-e.overall, e.zone_id, e.desk_id))
    return entries


def assign_cohort(
    matrix: MatchMatrix,
    profiles: Mapping[str, OccupantProfile],
    available: Sequence[tuple[str, str]],
) -> dict:
    """Exact maximum-total-match assignment of occupants to available desks.

    Among equally good assignments the lexicographically smallest one wins:
    the lowest occupant id takes the lowest desk id it can hold without
    sacrificing total score, then the next occupant, and so on.
    """
    occupants = sorted(profiles)
    desks = sorted(available, key=lambda zd: zd[1])
    if len(occupants) > len(desks):
        raise Infeasible(f"{len(occupants)} occupants for {len(desks)} free desks")
    if not occupants:
        return {}
    scores = np.zeros((len(occupants), len(desks)))
    for i, occupant in enumerate(occupants):
        labels_by_dim = {dim: profiles[occupant].label_for(dim) for dim in matrix.weights}
        for j, (zone_id, _) in enumerate(desks):
            scores[i, j] = matrix.overall(zone_id, labels_by_dim)

    def best_total(sub: np.ndarray) -> float:
        if sub.size == 0 or sub.shape[0] == 0:
            return 0.0
        rows, cols = linear_sum_assignment(sub, maximize=True)
        return float(sub[rows, cols].sum())

    optimum = best_total(scores)
    eps = 1e-9
    remaining = list(range(len(desks)))
    fixed_sum = 0.0
    assignment: dict = {}
    for i, occupant in enumerate(occupants):
        for j in remaining:
            rest_cols = [c for c in remaining if c != j]
            rest = scores[np.ix_(range(i + 1, len(occupants)), rest_cols)]
            if fixed_sum + scores[i, j] + best_total(rest) >= optimum - eps:
                assignment[occupant] = desks[j][1]
                fixed_sum += scores[i, j]
                remaining.remove(j)
                break
    return assignment
