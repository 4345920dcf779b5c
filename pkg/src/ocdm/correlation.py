"""Symmetric dependence score between two attribute value samples.

The score is normalized mutual information I(X;Y) / max(H(X), H(Y)) over
the empirical contingency table, computed as H(X) + H(Y) - H(X,Y).
Numeric samples are discretized into equal-frequency bins
(min(10, ceil(sqrt(n))) bins); booleans and strings are treated as
categories.  The score is 0 for a constant marginal and 1 for a bijective
deterministic relation, which is what the mining thresholds assume.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


class CorrelationError(Exception):
    pass


class LengthMismatch(CorrelationError):
    pass


class TooFewSamples(CorrelationError):
    pass


def _is_numeric(values: Sequence[object]) -> bool:
    return all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    )


def bin_count(n: int) -> int:
    return min(10, math.ceil(math.sqrt(n)))


def discretize(values: Sequence[object]) -> list[int]:
    """Map a sample to dense integer codes."""
    if _is_numeric(values):
        data = np.asarray(values, dtype=float)
        k = bin_count(len(data))
        # Equal-frequency bin edges; ties collapse onto the same bin.
        edges = np.quantile(data, [i / k for i in range(1, k)])
        return [int(c) for c in np.searchsorted(edges, data, side="left")]
    seen: dict[object, int] = {}
    codes: list[int] = []
    for v in values:
        key = (type(v).__name__, v)
        if key not in seen:
            seen[key] = len(seen)
        codes.append(seen[key])
    return codes


def _entropy(counts: Sequence[int], total: int) -> float:
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log(p)
    return h


def correlate(x: Sequence[object], y: Sequence[object]) -> float:
    """Normalized mutual information of two equally long value samples."""
    if len(x) != len(y):
        raise LengthMismatch(f"samples differ in length: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise TooFewSamples("need at least 2 paired samples")

    cx = discretize(x)
    cy = discretize(y)
    n = len(cx)
    joint: dict[tuple[int, int], int] = {}
    mx: dict[int, int] = {}
    my: dict[int, int] = {}
    for a, b in zip(cx, cy):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        mx[a] = mx.get(a, 0) + 1
        my[b] = my.get(b, 0) + 1

    hx = _entropy(list(mx.values()), n)
    hy = _entropy(list(my.values()), n)
    if hx == 0.0 or hy == 0.0:
        return 0.0
    hxy = _entropy(list(joint.values()), n)
    mi = hx + hy - hxy
    return min(1.0, max(0.0, mi / max(hx, hy)))
