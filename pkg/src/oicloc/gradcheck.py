"""Finite-difference verification of every analytic gradient path.

Three suites: (1) boundary-coordinate gradients of the contrastive loss
against +-1-snippet symmetric differences, (2) the transform chain rule
against central differences of a smooth surrogate loss, and (3) the network
backward pass against central differences of a scalar projection loss.

The surrogate in (2) extends the rounded-coordinate loss linearly inside each
rounding cell (first-order expansion around the rounded snippet), so its
derivative equals the analytic formulas as long as no coordinate crosses a
cell edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oic
from .boundary import RegressionPair, inflate, regress_anchor, round_boundary, transform_backward, ClipState
from .cas import Cas
from .oic import SegmentHypothesis
from .regressor import NetworkB


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_err <= self.tol


def smooth_loss(cas: Cas, k: int, x1: float, x2: float, X1: float, X2: float) -> float:
    """In-cell linear extension of the rounded-coordinate contrastive loss."""
    row = cas.padded_row(k)

    def area(a: float, b: float) -> tuple[float, float]:
        ra, rb = round_boundary(a), round_boundary(b)
        total = float(row[ra : rb + 1].sum())
        total += -row[ra] * (a - ra) + row[rb] * (b - rb)
        return total, b - a + 1.0

    inner, inner_len = area(x1, x2)
    outer, outer_len = area(X1, X2)
    return (outer - inner) / (outer_len - inner_len) - inner / inner_len


def _random_hypothesis(rng, T: int, min_inner: int, min_ring: int) -> tuple[int, int, int, int]:
    inner_len = int(rng.integers(min_inner, min_inner + 15))
    left_ring = int(rng.integers(max(1, min_ring // 2), min_ring + 8))
    right_ring = int(rng.integers(max(1, min_ring // 2), min_ring + 8))
    while left_ring + right_ring < min_ring:
        right_ring += 1
    span = inner_len + left_ring + right_ring
    if span > T:
        raise ValueError("hypothesis does not fit the video")
    X1 = int(rng.integers(1, T - span + 2))
    x1 = X1 + left_ring
    x2 = x1 + inner_len - 1
    X2 = x2 + right_ring
    return x1, x2, X1, X2


def check_oic_discrete(seed: int = 0, cases: int = 1000, T: int = 80) -> CheckResult:
    """Analytic boundary partials vs +-1-snippet symmetric differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        cas = Cas(rng.uniform(0.0, 1.0, size=(1, T)))
        x1, x2, X1, X2 = _random_hypothesis(rng, T, min_inner=10, min_ring=10)
        h = SegmentHypothesis(float(x1), float(x2), float(X1), float(X2), 1)
        g = oic.oic_backward(cas, h)
        inner_len = x2 - x1 + 1
        ring_len = (X2 - X1 + 1) - inner_len
        tol = 3.0 / min(inner_len, ring_len)

        def loss(a, b, A, B):
            return oic.oic_forward(cas, SegmentHypothesis(a, b, A, B, 1)).loss

        fd = {
            "d_x1": (loss(x1 + 1, x2, X1, X2) - loss(x1 - 1, x2, X1, X2)) / 2.0,
            "d_x2": (loss(x1, x2 + 1, X1, X2) - loss(x1, x2 - 1, X1, X2)) / 2.0,
            "d_X1": (loss(x1, x2, X1 + 1, X2) - loss(x1, x2, max(X1 - 1, 0), X2))
            / (2.0 if X1 >= 1 else 1.0),
            "d_X2": (loss(x1, x2, X1, X2 + 1) - loss(x1, x2, X1, X2 - 1)) / 2.0
            if X2 + 1 <= T + 1
            else (loss(x1, x2, X1, X2) - loss(x1, x2, X1, X2 - 1)),
        }
        for name, approx in fd.items():
            err = abs(getattr(g, name) - approx) / tol
            worst = max(worst, err)
    # errors are reported relative to the per-case tolerance 3/min(len)
    return CheckResult("oic-discrete-differences", worst, 1.0)


_TRANSFORM_SETUPS = [
    # (w_a, t_x, t_w target length) -- all chosen so coordinates land on integers
    (8.0, 0.0, 8.0),
    (8.0, 0.25, 12.0),
    (8.0, -0.25, 16.0),
    (12.0, 0.25, 8.0),
    (2.0, 0.5, 2.0),  # minimum-offset regime (w * alpha < 1)
    (2.0, 0.0, 2.0),
]


def check_transform_fd(seed: int = 0, cases: int = 200, T: int = 60,
                       alpha: float = 0.25, step: float = 1e-4) -> CheckResult:
    """transform_backward vs central differences of the surrogate loss."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(cases):
        cas = Cas(rng.uniform(0.05, 0.95, size=(1, T)))
        w_a, t_x, w_target = _TRANSFORM_SETUPS[i % len(_TRANSFORM_SETUPS)]
        t_w = math.log(w_target / w_a)
        s_x = float(rng.integers(22, T - 22))

        def end_to_end(tx: float, tw: float) -> float:
            x1, x2 = regress_anchor(s_x, w_a, RegressionPair(tx, tw))
            w = x2 - x1
            X1, X2 = inflate(x1, x2, w, alpha, T)
            return smooth_loss(cas, 1, x1, x2, X1, X2)

        x1, x2 = regress_anchor(s_x, w_a, RegressionPair(t_x, t_w))
        g = oic.oic_backward(
            cas,
            SegmentHypothesis(x1, x2, *inflate(x1, x2, x2 - x1, alpha, T), 1),
        )
        clip_state = ClipState(min_offset=(x2 - x1) * alpha < 1.0)
        d_tx, d_tw = transform_backward(g, s_x, w_a, RegressionPair(t_x, t_w), alpha, clip_state)
        fd_tx = (end_to_end(t_x + step, t_w) - end_to_end(t_x - step, t_w)) / (2 * step)
        fd_tw = (end_to_end(t_x, t_w + step) - end_to_end(t_x, t_w - step)) / (2 * step)
        for analytic, approx in ((d_tx, fd_tx), (d_tw, fd_tw)):
            err = abs(analytic - approx) / max(abs(analytic), abs(approx), 1e-6)
            worst = max(worst, err)
    return CheckResult("transform-finite-differences", worst, 1e-4)


def check_network_fd(seed: int = 0, T: int = 7, step: float = 1e-4) -> CheckResult:
    """Network backward vs central differences of a projection loss."""
    rng = np.random.default_rng(seed)
    net = NetworkB(feature_dim=3, anchor_count=2, hidden=4, seed=seed)
    assert net.num_parameters() <= 1000
    # randomize everything (incl. the zero-initialized pred layer) so no
    # gradient path is trivially zero
    for name, p in net.params.items():
        net.params[name] = p + 0.3 * rng.standard_normal(p.shape)
    feat = rng.standard_normal((3, T))
    grad_proj = rng.standard_normal((4, T))

    def scalar_loss() -> float:
        out, _ = net.forward(feat, mode="train")
        return float((out * grad_proj).sum())

    _, cache = net.forward(feat, mode="train")
    grads = net.backward(cache, grad_proj)
    worst = 0.0
    for name, p in net.params.items():
        g = grads[name]
        flat = p.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + step
            up = scalar_loss()
            flat[idx] = orig - step
            down = scalar_loss()
            flat[idx] = orig
            approx = (up - down) / (2 * step)
            analytic = g.ravel()[idx]
            err = abs(analytic - approx) / max(abs(analytic), abs(approx), 1e-4)
            worst = max(worst, err)
    return CheckResult("network-finite-differences", worst, 1e-4)


def run_all(seed: int = 0) -> list[CheckResult]:
    return [
        check_oic_discrete(seed),
        check_transform_fd(seed),
        check_network_fd(seed),
    ]
