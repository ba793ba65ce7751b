"""Outer-inner contrastive loss: forward, analytic backward, and variants.

All activation lookups happen at rounded (integer) snippet coordinates on the
zero-padded grid [0, T+1]; "integrals" are inclusive discrete sums with
inclusive lengths (x2 - x1 + 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import round_boundary
from .cas import Cas
from .errors import DegenerateOuterError, InputError


@dataclass(frozen=True)
class SegmentHypothesis:
    """Inner boundary [x1, x2], outer boundary [X1, X2], class k (1-based)."""

    x1: float
    x2: float
    X1: float
    X2: float
    k: int

    def __post_init__(self):
        if not (self.X1 <= self.x1 <= self.x2 <= self.X2):
            raise InputError(
                f"need X1 <= x1 <= x2 <= X2, got ({self.X1}, {self.x1}, {self.x2}, {self.X2})"
            )


@dataclass(frozen=True)
class OicBreakdown:
    a_outer: float
    a_inner: float
    loss: float


@dataclass(frozen=True)
class BoundaryGradients:
    d_x1: float
    d_x2: float
    d_X1: float
    d_X2: float


@dataclass(frozen=True)
class _RoundedAreas:
    rx1: int
    rx2: int
    rX1: int
    rX2: int
    inner_len: int
    ring_len: int
    a_inner: float
    a_outer: float


def _rounded_areas(cas: Cas, h: SegmentHypothesis) -> _RoundedAreas:
    T = cas.num_snippets
    rx1, rx2 = round_boundary(h.x1), round_boundary(h.x2)
    rX1, rX2 = round_boundary(h.X1), round_boundary(h.X2)
    if rX1 < 0 or rX2 > T + 1:
        raise InputError(
            f"rounded outer boundary [{rX1}, {rX2}] outside padded grid [0, {T + 1}]"
        )
    inner_len = rx2 - rx1 + 1
    outer_len = rX2 - rX1 + 1
    ring_len = outer_len - inner_len
    if inner_len < 1:
        raise InputError(f"rounded inner boundary [{rx1}, {rx2}] is empty")
    if ring_len <= 0:
        raise DegenerateOuterError(
            f"rounded outer [{rX1}, {rX2}] does not strictly contain inner [{rx1}, {rx2}]"
        )
    row = cas.padded_row(h.k)  # index == snippet position on [0, T+1]
    inner_sum = float(row[rx1 : rx2 + 1].sum())
    ring_sum = float(row[rX1 : rX2 + 1].sum()) - inner_sum
    return _RoundedAreas(
        rx1, rx2, rX1, rX2, inner_len, ring_len, inner_sum / inner_len, ring_sum / ring_len
    )


def oic_forward(cas: Cas, h: SegmentHypothesis) -> OicBreakdown:
    """Average outer-ring activation minus average inner activation."""
    a = _rounded_areas(cas, h)
    return OicBreakdown(a.a_outer, a.a_inner, a.a_outer - a.a_inner)


def oic_backward(cas: Cas, h: SegmentHypothesis) -> BoundaryGradients:
    """Analytic partials of the loss w.r.t. the four boundary coordinates."""
    a = _rounded_areas(cas, h)
    f_x1 = cas.activation(h.k, a.rx1)
    f_x2 = cas.activation(h.k, a.rx2)
    f_X1 = cas.activation(h.k, a.rX1)
    f_X2 = cas.activation(h.k, a.rX2)
    d_x1 = (f_x1 - a.a_outer) / a.ring_len - (a.a_inner - f_x1) / a.inner_len
    d_x2 = (a.a_outer - f_x2) / a.ring_len - (f_x2 - a.a_inner) / a.inner_len
    d_X1 = (a.a_outer - f_X1) / a.ring_len
    d_X2 = (f_X2 - a.a_outer) / a.ring_len
    return BoundaryGradients(d_x1, d_x2, d_X1, d_X2)


def _inner_stats(cas: Cas, h: SegmentHypothesis) -> tuple[int, int, int, float]:
    T = cas.num_snippets
    rx1, rx2 = round_boundary(h.x1), round_boundary(h.x2)
    if rx1 < 0 or rx2 > T + 1:
        raise InputError(f"rounded inner [{rx1}, {rx2}] outside padded grid")
    inner_len = rx2 - rx1 + 1
    if inner_len < 1:
        raise InputError(f"rounded inner boundary [{rx1}, {rx2}] is empty")
    row = cas.padded_row(h.k)
    return rx1, rx2, inner_len, float(row[rx1 : rx2 + 1].sum()) / inner_len


def inner_only_forward(cas: Cas, h: SegmentHypothesis) -> float:
    """Negated average inner activation; the outer boundary is ignored."""
    return -_inner_stats(cas, h)[3]


def inner_only_backward(cas: Cas, h: SegmentHypothesis) -> tuple[float, float]:
    rx1, rx2, inner_len, a_inner = _inner_stats(cas, h)
    f_x1 = cas.activation(h.k, rx1)
    f_x2 = cas.activation(h.k, rx2)
    d_x1 = -(a_inner - f_x1) / inner_len
    d_x2 = -(f_x2 - a_inner) / inner_len
    return d_x1, d_x2


def step_filter_weights(h: SegmentHypothesis, T: int) -> tuple[int, np.ndarray, float]:
    """Signed step-filter profile over [round(X1), round(X2)].

    Returns (start index, weights, norm). The weights are integer-valued
    (+inner_len on the outer ring, -ring_len on the inner area) so they sum
    to exactly zero in float arithmetic; dividing the dot product of the
    weights with the padded activation row by norm = inner_len * ring_len
    reproduces the loss.
    """
    rx1, rx2 = round_boundary(h.x1), round_boundary(h.x2)
    rX1, rX2 = round_boundary(h.X1), round_boundary(h.X2)
    if rX1 < 0 or rX2 > T + 1:
        raise InputError(f"rounded outer [{rX1}, {rX2}] outside padded grid [0, {T + 1}]")
    inner_len = rx2 - rx1 + 1
    ring_len = (rX2 - rX1 + 1) - inner_len
    if inner_len < 1:
        raise InputError("rounded inner boundary is empty")
    if ring_len <= 0:
        raise DegenerateOuterError("rounded outer does not strictly contain inner")
    weights = np.full(rX2 - rX1 + 1, float(inner_len))
    weights[rx1 - rX1 : rx2 - rX1 + 1] = -float(ring_len)
    return rX1, weights, float(inner_len * ring_len)
