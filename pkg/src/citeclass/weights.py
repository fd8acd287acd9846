"""Sparse category-weight vectors, represented as dict[str, float].

All helpers return plain dicts with keys in sorted order; entries below
PRUNE_EPS are dropped so vectors stay sparse.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .corpus import Scheme, ValidationError

CategoryVector = dict[str, float]

# weights at or above this count toward support size
SUPPORT_EPS = 1e-9
# entries below this are dropped from stored vectors
PRUNE_EPS = 1e-12


def vector_sum(vec: Mapping[str, float]) -> float:
    return math.fsum(vec.values())


def normalize(vec: Mapping[str, float]) -> CategoryVector:
    """Scale to unit sum, prune, return keys sorted. Errors on empty or
    non-positive total."""
    total = math.fsum(vec.values())
    if not vec or total <= 0.0:
        raise ValidationError([f"cannot normalize vector with total {total}"])
    out = {k: v / total for k, v in sorted(vec.items()) if v / total >= PRUNE_EPS}
    if not out:
        raise ValidationError(["normalization left an empty vector"])
    return out


def sorted_vector(vec: Mapping[str, float]) -> CategoryVector:
    return dict(sorted(vec.items()))


def mean_of(vectors: Iterable[Mapping[str, float]]) -> CategoryVector:
    """Arithmetic mean of the given vectors (absent keys count as zero)."""
    acc: dict[str, float] = {}
    n = 0
    for vec in vectors:
        n += 1
        for k, v in vec.items():
            acc[k] = acc.get(k, 0.0) + v
    if n == 0:
        return {}
    return {k: acc[k] / n for k in sorted(acc)}


def collapse_to_areas(vec: Mapping[str, float], scheme: Scheme) -> CategoryVector:
    """Sum category weights into their areas."""
    acc: dict[str, float] = {}
    for code, w in vec.items():
        area = scheme.cat_to_area.get(code)
        if area is None:
            raise ValidationError([f"unknown category code {code!r}"])
        acc[area] = acc.get(area, 0.0) + w
    return dict(sorted(acc.items()))


def support(vec: Mapping[str, float], eps: float = SUPPORT_EPS) -> list[str]:
    return sorted(k for k, v in vec.items() if v > eps)
