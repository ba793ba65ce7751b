"""Candidate grid, per-position anchor choice, loss gating, NMS, predictions.

Implements the selection layer: positions below the activation floor are
discarded, each surviving position keeps its lowest-loss anchor, kept
hypotheses must beat the loss ceiling, and per-class NMS (ranked by
score = 1 - loss) removes overlapping survivors. All tie-breaking is
deterministic: equal losses prefer the smaller anchor index, equal NMS
scores prefer the earlier start.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oic
from .boundary import (
    AnchorConfig,
    ClipState,
    RegressionPair,
    clip_zero_pad,
    inflate,
    regress_anchor,
    round_boundary,
)
from .cas import SNIPPET_FRAMES, Cas
from .errors import InputError
from .oic import SegmentHypothesis


def snippet_to_time(x: float, fps: float) -> float:
    """Continuous snippet coordinate to seconds; snippet 1 starts at 0 s."""
    if fps <= 0:
        raise InputError("fps must be positive")
    return (x - 1.0) * SNIPPET_FRAMES / fps


@dataclass(frozen=True)
class Prediction:
    """One detection; score is 1 minus the selection loss."""

    class_id: int
    start_s: float
    end_s: float
    score: float
    x1: float = 0.0
    x2: float = 0.0
    X1: float = 0.0
    X2: float = 0.0
    video_id: str = ""


@dataclass(frozen=True)
class CandidateCell:
    """One anchor hypothesis at one position, with its transform provenance."""

    t: int
    m: int
    s_x: float
    w_a: float
    r: RegressionPair
    w: float
    x1: float
    x2: float
    X1: float
    X2: float
    clip_state: ClipState
    valid: bool

    def hypothesis(self, k: int) -> SegmentHypothesis:
        return SegmentHypothesis(self.x1, self.x2, self.X1, self.X2, k)


def build_candidates(
    reg_map: np.ndarray, anchors: AnchorConfig, T: int, alpha: float
) -> list[list[CandidateCell]]:
    """Regress, clip and inflate every (position, anchor) pair into a T x M grid."""
    M = anchors.count
    reg_map = np.asarray(reg_map, dtype=np.float64)
    if reg_map.shape != (2 * M, T):
        raise InputError(f"regression map must be {2 * M} x {T}, got {reg_map.shape}")
    grid: list[list[CandidateCell]] = []
    for t in range(1, T + 1):
        row = []
        for m, w_a in enumerate(anchors.scales):
            r = RegressionPair(reg_map[2 * m, t - 1], reg_map[2 * m + 1, t - 1])
            raw_x1, raw_x2 = regress_anchor(float(t), w_a, r)
            x1, x2 = clip_zero_pad(raw_x1, raw_x2, T)
            w = raw_x2 - raw_x1
            X1, X2 = inflate(x1, x2, w, alpha, T)
            clip_state = ClipState(
                x1_clipped=x1 != raw_x1,
                x2_clipped=x2 != raw_x2,
                min_offset=w * alpha < 1.0,
                X1_clipped=X1 > min(x1 - w * alpha, x1 - 1.0),
                X2_clipped=X2 < max(x2 + w * alpha, x2 + 1.0),
            )
            rx1, rx2 = round_boundary(x1), round_boundary(x2)
            rX1, rX2 = round_boundary(X1), round_boundary(X2)
            ring = (rX2 - rX1) - (rx2 - rx1)
            valid = ring >= 1 and 0 <= rX1 and rX2 <= T + 1
            row.append(
                CandidateCell(t, m, float(t), w_a, r, w, x1, x2, X1, X2, clip_state, valid)
            )
        grid.append(row)
    return grid


def interval_iou(a1: float, a2: float, b1: float, b2: float) -> float:
    """IoU of two real intervals; 0 when disjoint or degenerate."""
    inter = min(a2, b2) - max(a1, b1)
    if inter <= 0:
        return 0.0
    union = max(a2, b2) - min(a1, b1)
    return inter / union if union > 0 else 0.0


def nms(preds: list[Prediction], iou_thresh: float) -> list[Prediction]:
    """Greedy same-class suppression: keep the best score, drop IoU > thresh."""
    remaining = sorted(preds, key=lambda p: (-p.score, p.start_s, p.end_s))
    kept: list[Prediction] = []
    while remaining:
        head = remaining.pop(0)
        kept.append(head)
        remaining = [
            p
            for p in remaining
            if interval_iou(head.start_s, head.end_s, p.start_s, p.end_s) <= iou_thresh
        ]
    return kept


def _candidate_loss(cas: Cas, cell: CandidateCell, k: int, loss: str) -> float:
    h = cell.hypothesis(k)
    if loss == "oic":
        return oic.oic_forward(cas, h).loss
    if loss == "inner":
        return oic.inner_only_forward(cas, h)
    raise InputError(f"unknown loss variant {loss!r}")


def select(
    cas: Cas,
    grid: list[list[CandidateCell]],
    classes,
    act_min: float = 0.1,
    loss_max: float = -0.3,
    nms_iou: float = 0.4,
    fps: float = 30.0,
    loss: str = "oic",
    video_id: str = "",
) -> tuple[np.ndarray, list[tuple[Prediction, CandidateCell]]]:
    """Run the selection layer for the given class set.

    Training passes the video's label set; testing passes all classes.
    Returns the K x T x M keep mask and the surviving (prediction, cell)
    pairs sorted by descending score.
    """
    K, T = cas.num_classes, cas.num_snippets
    if len(grid) != T:
        raise InputError(f"grid has {len(grid)} positions for a T={T} video")
    M = len(grid[0]) if grid else 0
    mask = np.zeros((K, T, M), dtype=bool)
    survivors: list[tuple[Prediction, CandidateCell]] = []
    for k in sorted(set(int(c) for c in classes)):
        per_class: list[tuple[Prediction, CandidateCell, int]] = []
        for t in range(1, T + 1):
            if cas.activation(k, t) < act_min:
                continue
            best_m, best_loss = None, None
            for m, cell in enumerate(grid[t - 1]):
                if not cell.valid:
                    continue
                value = _candidate_loss(cas, cell, k, loss)
                if best_loss is None or value < best_loss:
                    best_m, best_loss = m, value
            if best_m is None or best_loss > loss_max:
                continue
            cell = grid[t - 1][best_m]
            pred = Prediction(
                class_id=k,
                start_s=snippet_to_time(cell.x1, fps),
                end_s=snippet_to_time(cell.x2, fps),
                score=1.0 - best_loss,
                x1=cell.x1,
                x2=cell.x2,
                X1=cell.X1,
                X2=cell.X2,
                video_id=video_id,
            )
            per_class.append((pred, cell, best_m))
        kept = _nms_with_cells(per_class, nms_iou)
        for pred, cell, m in kept:
            mask[k - 1, cell.t - 1, m] = True
            survivors.append((pred, cell))
    survivors.sort(key=lambda pc: (-pc[0].score, pc[0].start_s, pc[0].class_id))
    return mask, survivors


def _nms_with_cells(items, iou_thresh):
    remaining = sorted(items, key=lambda it: (-it[0].score, it[0].x1, it[0].x2))
    kept = []
    while remaining:
        head = remaining.pop(0)
        kept.append(head)
        remaining = [
            it
            for it in remaining
            if interval_iou(head[0].x1, head[0].x2, it[0].x1, it[0].x2) <= iou_thresh
        ]
    return kept


def training_loss(
    cas: Cas,
    grid: list[list[CandidateCell]],
    mask: np.ndarray,
    alpha: float,
    loss: str = "oic",
) -> tuple[float, np.ndarray]:
    """Sum of kept losses plus the gradients scattered to regression slots."""
    from .boundary import transform_backward

    K, T = cas.num_classes, cas.num_snippets
    M = len(grid[0]) if grid else 0
    if mask.shape != (K, T, M):
        raise InputError(f"mask shape {mask.shape} does not match (K, T, M)")
    total = 0.0
    grad_out = np.zeros((2 * M, T))
    for k, t, m in zip(*np.nonzero(mask)):
        cell = grid[t][m]
        h = cell.hypothesis(int(k) + 1)
        if loss == "oic":
            total += oic.oic_forward(cas, h).loss
            g = oic.oic_backward(cas, h)
        elif loss == "inner":
            total += oic.inner_only_forward(cas, h)
            d_x1, d_x2 = oic.inner_only_backward(cas, h)
            g = oic.BoundaryGradients(d_x1, d_x2, 0.0, 0.0)
        else:
            raise InputError(f"unknown loss variant {loss!r}")
        d_tx, d_tw = transform_backward(g, cell.s_x, cell.w_a, cell.r, alpha, cell.clip_state)
        grad_out[2 * m, t] += d_tx
        grad_out[2 * m + 1, t] += d_tw
    return total, grad_out
