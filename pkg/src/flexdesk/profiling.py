"""Per-occupant preference features and per-dimension comfort-type models.

An occupant's feature in one dimension is the triple of vote fractions
(decrease / comfortable / increase) plus the mean sensor value at their
"comfortable" votes, z-scored against every enriched vote in that dimension.
Occupants with too few usable votes are excluded from fitting and reported
as hard to predict. Fitted models are versioned and immutable once published.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .clustering import kmeans_fit, silhouette_mean
from .config import K_SEARCH_MAX
from .errors import TooFewUsers
from .feedback import Dimension, EnrichedFeedback, Preference
from .stats import entropy_nats

MAX_ENTROPY = math.log(3.0)

# labeling rule: centroids this even (or this undecided) are unpredictable
HARD_ENTROPY_FRACTION = 0.9
HARD_MAX_FRACTION = 0.5


class TypeLabel(str, Enum):
    PREFER_DECREASE = "prefer-decrease"
    PREFER_INCREASE = "prefer-increase"
    COMFORTABLE = "generally-comfortable"
    HARD_TO_PREDICT = "hard-to-predict"


LABEL_TEXT = {
    (Dimension.THERMAL, TypeLabel.PREFER_DECREASE): "prefer cooler",
    (Dimension.THERMAL, TypeLabel.PREFER_INCREASE): "prefer warmer",
    (Dimension.VISUAL, TypeLabel.PREFER_DECREASE): "prefer dimmer",
    (Dimension.VISUAL, TypeLabel.PREFER_INCREASE): "prefer brighter",
    (Dimension.AURAL, TypeLabel.PREFER_DECREASE): "prefer quieter",
    (Dimension.AURAL, TypeLabel.PREFER_INCREASE): "prefer louder",
}


def label_text(dimension: Dimension, label: TypeLabel) -> str:
    if label is TypeLabel.COMFORTABLE:
        return "generally comfortable"
    if label is TypeLabel.HARD_TO_PREDICT:
        return "hard to predict"
    return LABEL_TEXT[(dimension, label)]


@dataclass(frozen=True)
class PreferenceFeature:
    occupant_id: str
    dimension: Dimension
    n: int
    f_dec: float
    f_comf: float
    f_inc: float
    mu_comf_z: Optional[float]  # None when the occupant never voted comfortable
    entropy: float

    def vector(self) -> np.ndarray:
        absent = self.mu_comf_z is None
        return np.array(
            [self.f_dec, self.f_inc, 0.0 if absent else self.mu_comf_z, 1.0 if absent else 0.0]
        )


@dataclass(frozen=True)
class FeatureBuild:
    dimension: Dimension
    features: tuple[PreferenceFeature, ...]
    excluded: tuple[str, ...]  # occupants under the vote threshold
    population_mean: Optional[float]
    population_std: Optional[float]


def _dimension_samples(
    history: Sequence[EnrichedFeedback], dimension: Dimension
) -> list[tuple[Preference, float]]:
    """(vote, sensor value) pairs for votes that carry a usable snapshot."""
    out = []
    for item in history:
        vote = item.base.vote_for(dimension)
        if vote is None:
            continue
        value = item.snapshot_value(dimension)
        if value is None:
            continue
        out.append((vote, value))
    return out


def build_features(
    histories: Mapping[str, Sequence[EnrichedFeedback]],
    dimension: Dimension,
    min_votes: int = 6,
    population: Optional[tuple[float, float]] = None,
) -> FeatureBuild:
    """One feature per occupant with at least `min_votes` usable votes.

    `population` fixes the z-scoring statistics; pass the ones stored on a
    fitted model to embed a new occupant into that model's feature space.
    """
    if min_votes < 1:
        raise ValueError("min_votes must be >= 1")
    per_occupant = {
        occupant: _dimension_samples(history, dimension) for occupant, history in histories.items()
    }
    if population is None:
        all_values = [v for samples in per_occupant.values() for _, v in samples]
        if all_values:
            pop_mean = float(np.mean(all_values))
            pop_std = float(np.std(all_values))
        else:
            pop_mean = pop_std = None
    else:
        pop_mean, pop_std = population

    features = []
    excluded = []
    for occupant in sorted(per_occupant):
        samples = per_occupant[occupant]
        n = len(samples)
        if n < min_votes:
            excluded.append(occupant)
            continue
        counts = {Preference.DECREASE: 0, Preference.COMFORTABLE: 0, Preference.INCREASE: 0}
        comf_values = []
        for vote, value in samples:
            counts[vote] += 1
            if vote is Preference.COMFORTABLE:
                comf_values.append(value)
        f_dec = counts[Preference.DECREASE] / n
        f_comf = counts[Preference.COMFORTABLE] / n
        f_inc = counts[Preference.INCREASE] / n
        mu_comf_z = None
        if comf_values:
            mu = float(np.mean(comf_values))
            if pop_std and pop_std > 0:
                mu_comf_z = (mu - pop_mean) / pop_std
            else:
                mu_comf_z = 0.0  # degenerate population: no scale information
        features.append(
            PreferenceFeature(
                occupant_id=occupant,
                dimension=dimension,
                n=n,
                f_dec=f_dec,
                f_comf=f_comf,
                f_inc=f_inc,
                mu_comf_z=mu_comf_z,
                entropy=entropy_nats((f_dec, f_comf, f_inc)),
            )
        )
    return FeatureBuild(
        dimension=dimension,
        features=tuple(features),
        excluded=tuple(excluded),
        population_mean=pop_mean,
        population_std=pop_std,
    )


@dataclass(frozen=True)
class ComfortClusterModel:
    dimension: Dimension
    k: int
    centroids: tuple[tuple[float, ...], ...]
    assignments: dict  # occupant_id -> cluster index
    labels: dict  # cluster index -> TypeLabel
    seed: int
    restarts: int
    inertia: float
    min_votes: int
    population_mean: Optional[float]
    population_std: Optional[float]
    degenerate: bool = False  # k=1 fallback for structureless features

    def centroid_fractions(self, idx: int) -> tuple[float, float, float]:
        f_dec, f_inc = self.centroids[idx][0], self.centroids[idx][1]
        f_comf = max(0.0, 1.0 - f_dec - f_inc)
        return f_dec, f_comf, f_inc

    def members(self, idx: int) -> list[str]:
        return sorted(o for o, c in self.assignments.items() if c == idx)

    def nearest_cluster(self, vector: np.ndarray) -> int:
        d2 = [float(np.sum((np.array(c) - vector) ** 2)) for c in self.centroids]
        return int(np.argmin(d2))

    def config_hash(self) -> str:
        blob = json.dumps(
            {
                "dimension": self.dimension.value,
                "k": self.k,
                "seed": self.seed,
                "restarts": self.restarts,
                "min_votes": self.min_votes,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension.value,
            "k": self.k,
            "centroids": [list(c) for c in self.centroids],
            "assignments": dict(sorted(self.assignments.items())),
            "labels": {str(i): lbl.value for i, lbl in sorted(self.labels.items())},
            "seed": self.seed,
            "restarts": self.restarts,
            "inertia": self.inertia,
            "min_votes": self.min_votes,
            "population_mean": self.population_mean,
            "population_std": self.population_std,
            "degenerate": self.degenerate,
            "config_hash": self.config_hash(),
        }


def model_from_dict(raw: dict) -> ComfortClusterModel:
    return ComfortClusterModel(
        dimension=Dimension(raw["dimension"]),
        k=int(raw["k"]),
        centroids=tuple(tuple(float(x) for x in c) for c in raw["centroids"]),
        assignments={o: int(c) for o, c in raw["assignments"].items()},
        labels={int(i): TypeLabel(v) for i, v in raw["labels"].items()},
        seed=int(raw["seed"]),
        restarts=int(raw["restarts"]),
        inertia=float(raw["inertia"]),
        min_votes=int(raw["min_votes"]),
        population_mean=raw.get("population_mean"),
        population_std=raw.get("population_std"),
        degenerate=bool(raw.get("degenerate", False)),
    )


def cluster(
    features: Sequence[PreferenceFeature],
    k: int,
    seed: int,
    restarts: int = 50,
    population: Optional[tuple[Optional[float], Optional[float]]] = None,
    min_votes: int = 6,
) -> ComfortClusterModel:
    """Fit k-means over feature vectors; deterministic given (features, k, seed, restarts)."""
    if k > len(features):
        raise TooFewUsers(f"k={k} exceeds {len(features)} profiled occupants")
    if k < 1:
        raise ValueError("k must be >= 1")
    ordered = sorted(features, key=lambda f: f.occupant_id)
    X = np.stack([f.vector() for f in ordered])
    centroids, labels, inertia = kmeans_fit(X, k, seed=seed, restarts=restarts)
    pop_mean, pop_std = population if population is not None else (None, None)
    return ComfortClusterModel(
        dimension=ordered[0].dimension,
        k=k,
        centroids=tuple(tuple(float(x) for x in c) for c in centroids),
        assignments={f.occupant_id: int(c) for f, c in zip(ordered, labels)},
        labels={},
        seed=seed,
        restarts=restarts,
        inertia=inertia,
        min_votes=min_votes,
        population_mean=pop_mean,
        population_std=pop_std,
    )


def select_k(
    features: Sequence[PreferenceFeature],
    k_range: Sequence[int],
    seed: int,
    restarts: int = 50,
) -> int:
    """k maximizing mean silhouette; ties break to the smallest k."""
    n = len(features)
    ks = sorted(set(k_range))
    if not ks or ks[0] < 2 or ks[-1] > n - 1:
        raise TooFewUsers(f"k range {ks} not within [2, {n - 1}]")
    ordered = sorted(features, key=lambda f: f.occupant_id)
    X = np.stack([f.vector() for f in ordered])
    if np.allclose(X, X[0], atol=0.0):
        raise TooFewUsers("all feature vectors identical: silhouette undefined", degenerate=True)
    best_k = None
    best_score = -math.inf
    for k in ks:
        _, labels, _ = kmeans_fit(X, k, seed=seed, restarts=restarts)
        score = silhouette_mean(X, labels)
        if score > best_score:
            best_k, best_score = k, score
    return best_k


def label_centroid(fractions: tuple[float, float, float]) -> TypeLabel:
    """Pure in the centroid's vote fractions."""
    f_dec, f_comf, f_inc = fractions
    if entropy_nats((f_dec, f_comf, f_inc)) >= HARD_ENTROPY_FRACTION * MAX_ENTROPY:
        return TypeLabel.HARD_TO_PREDICT
    if max(f_dec, f_comf, f_inc) < HARD_MAX_FRACTION:
        return TypeLabel.HARD_TO_PREDICT
    winner = int(np.argmax([f_dec, f_comf, f_inc]))  # tie -> decrease, comfortable, increase
    return (TypeLabel.PREFER_DECREASE, TypeLabel.COMFORTABLE, TypeLabel.PREFER_INCREASE)[winner]


def label_clusters(model: ComfortClusterModel) -> ComfortClusterModel:
    labels = {idx: label_centroid(model.centroid_fractions(idx)) for idx in range(model.k)}
    return ComfortClusterModel(
        dimension=model.dimension,
        k=model.k,
        centroids=model.centroids,
        assignments=model.assignments,
        labels=labels,
        seed=model.seed,
        restarts=model.restarts,
        inertia=model.inertia,
        min_votes=model.min_votes,
        population_mean=model.population_mean,
        population_std=model.population_std,
        degenerate=model.degenerate,
    )


def fit_dimension(
    histories: Mapping[str, Sequence[EnrichedFeedback]],
    dimension: Dimension,
    seed: int,
    restarts: int = 50,
    min_votes: int = 6,
    k: Optional[int] = None,
) -> tuple[ComfortClusterModel, FeatureBuild]:
    """Full per-dimension pipeline: features -> (select k) -> fit -> label.

    With structureless features (every profiled occupant identical) the model
    degrades to a single generally-comfortable cluster instead of failing.
    """
    build = build_features(histories, dimension, min_votes=min_votes)
    if not build.features:
        raise TooFewUsers(f"no occupant reaches {min_votes} usable {dimension.value} votes")
    population = (build.population_mean, build.population_std)
    degenerate = False
    if k is None:
        upper = min(K_SEARCH_MAX, len(build.features) - 1)
        try:
            k = select_k(build.features, range(2, upper + 1), seed=seed, restarts=restarts)
        except TooFewUsers as exc:
            if not exc.degenerate and len(build.features) > 1:
                raise
            k = 1
            degenerate = True
    model = cluster(
        build.features, k, seed=seed, restarts=restarts, population=population, min_votes=min_votes
    )
    if degenerate:
        model = ComfortClusterModel(
            dimension=model.dimension,
            k=model.k,
            centroids=model.centroids,
            assignments=model.assignments,
            labels={idx: TypeLabel.COMFORTABLE for idx in range(model.k)},
            seed=model.seed,
            restarts=model.restarts,
            inertia=model.inertia,
            min_votes=model.min_votes,
            population_mean=model.population_mean,
            population_std=model.population_std,
            degenerate=True,
        )
        return model, build
    return label_clusters(model), build


@dataclass(frozen=True)
class DimensionProfile:
    label: TypeLabel
    text: str
    cluster: Optional[int]  # None when under-sampled
    n_votes: int


@dataclass(frozen=True)
class OccupantProfile:
    occupant_id: str
    dimensions: dict  # Dimension -> DimensionProfile

    def label_for(self, dimension: Dimension) -> TypeLabel:
        entry = self.dimensions.get(dimension)
        return entry.label if entry else TypeLabel.HARD_TO_PREDICT

    def to_dict(self) -> dict:
        return {
            "occupant_id": self.occupant_id,
            "dimensions": {
                dim.value: {
                    "label": prof.label.value,
                    "text": prof.text,
                    "cluster": prof.cluster,
                    "n_votes": prof.n_votes,
                }
                for dim, prof in sorted(self.dimensions.items(), key=lambda kv: kv[0].value)
            },
        }


class ModelRegistry:
    """Published, immutable model versions; readers always see the latest."""

    def __init__(self):
        self._lock = threading.Lock()
        self._versions: dict[Dimension, list[ComfortClusterModel]] = {}

    def publish(self, model: ComfortClusterModel) -> int:
        with self._lock:
            versions = self._versions.setdefault(model.dimension, [])
            versions.append(model)
            return len(versions)

    def latest(self, dimension: Dimension) -> Optional[ComfortClusterModel]:
        with self._lock:
            versions = self._versions.get(dimension, [])
            return versions[-1] if versions else None

    def latest_all(self) -> dict:
        return {dim: self.latest(dim) for dim in Dimension if self.latest(dim) is not None}


def profile_occupant(
    occupant_id: str,
    history: Sequence[EnrichedFeedback],
    registry: ModelRegistry,
) -> OccupantProfile:
    """Per-dimension label from the latest published models.

    Occupants missing from a model but with enough votes are embedded at the
    nearest centroid without refitting; under-sampled dimensions are hard to
    predict by definition.
    """
    dims: dict = {}
    for dimension in Dimension:
        model = registry.latest(dimension)
        n_votes = len(_dimension_samples(history, dimension))
        if model is None:
            dims[dimension] = DimensionProfile(
                label=TypeLabel.HARD_TO_PREDICT,
                text=label_text(dimension, TypeLabel.HARD_TO_PREDICT),
                cluster=None,
                n_votes=n_votes,
            )
            continue
        cluster_idx: Optional[int] = model.assignments.get(occupant_id)
        if cluster_idx is None and n_votes >= model.min_votes:
            build = build_features(
                {occupant_id: history},
                dimension,
                min_votes=model.min_votes,
                population=(model.population_mean, model.population_std),
            )
            if build.features:
                cluster_idx = model.nearest_cluster(build.features[0].vector())
        if cluster_idx is None:
            label = TypeLabel.HARD_TO_PREDICT
        else:
            label = model.labels.get(cluster_idx, TypeLabel.HARD_TO_PREDICT)
        dims[dimension] = DimensionProfile(
            label=label,
            text=label_text(dimension, label),
            cluster=cluster_idx,
            n_votes=n_votes,
        )
    return OccupantProfile(occupant_id=occupant_id, dimensions=dims)
