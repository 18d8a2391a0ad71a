"""Small numeric helpers shared by telemetry, profiling, and matching."""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def quantile_linear(values: Sequence[float], q: float) -> float:
    """Quantile by linear interpolation between the two closest order statistics.

    With n samples the q-quantile sits at fractional rank (n - 1) * q in the
    sorted sample; the value is interpolated between the flooring and ceiling
    ranks. Deterministic and cheap to check against a sort-and-index oracle.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile fraction out of range: {q}")
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        raise ValueError("quantile of empty sample")
    if n == 1:
        return float(xs[0])
    pos = (n - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return float(xs[lo])
    frac = pos - lo
    return float(xs[lo] + (xs[hi] - xs[lo]) * frac)


def mean(values: Sequence[float]) -> float:
    return float(sum(values) / len(values))


def pstdev(values: Sequence[float]) -> float:
    """Population standard deviation (ddof = 0)."""
    m = mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / len(values))


def entropy_nats(probs: Iterable[float]) -> float:
    """Shannon entropy in nats; zero-probability terms contribute nothing."""
    h = 0.0
    for p in probs:
        if p < 0:
            raise ValueError(f"negative probability: {p}")
        if p > 0:
            h -= p * math.log(p)
    return h
