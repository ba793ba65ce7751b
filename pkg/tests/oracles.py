"""Independent straight-line reference implementations used as test oracles.

Everything here is written in the most literal way possible -- explicit
loops, no shared helpers from the package under test beyond plain data
access -- so that agreement with the package is meaningful.
"""
from __future__ import annotations

import math

import numpy as np


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def padded_value(act_row: np.ndarray, x: int) -> float:
    """Activation at integer snippet x with zero padding at 0 and T+1."""
    T = len(act_row)
    if x == 0 or x == T + 1:
        return 0.0
    return float(act_row[x - 1])


def brute_force_loss(act_row: np.ndarray, x1: float, x2: float, X1: float, X2: float) -> float:
    """Contrastive loss by explicit per-snippet summation."""
    rx1, rx2 = round_half_away(x1), round_half_away(x2)
    rX1, rX2 = round_half_away(X1), round_half_away(X2)
    inner_sum = 0.0
    for x in range(rx1, rx2 + 1):
        inner_sum += padded_value(act_row, x)
    outer_sum = 0.0
    for x in range(rX1, rX2 + 1):
        outer_sum += padded_value(act_row, x)
    inner_len = rx2 - rx1 + 1
    ring_len = (rX2 - rX1 + 1) - inner_len
    return (outer_sum - inner_sum) / ring_len - inner_sum / inner_len


def brute_force_inner_loss(act_row: np.ndarray, x1: float, x2: float) -> float:
    rx1, rx2 = round_half_away(x1), round_half_away(x2)
    total = 0.0
    for x in range(rx1, rx2 + 1):
        total += padded_value(act_row, x)
    return -total / (rx2 - rx1 + 1)


def conv1d_loops(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Same-padded temporal convolution by four explicit loops."""
    out_ch, in_ch, ksz = w.shape
    T = x.shape[1]
    pad = (ksz - 1) // 2
    out = np.zeros((out_ch, T))
    for o in range(out_ch):
        for t in range(T):
            acc = b[o]
            for c in range(in_ch):
                for dk in range(ksz):
                    src = t + dk - pad
                    if 0 <= src < T:
                        acc += w[o, c, dk] * x[c, src]
            out[o, t] = acc
    return out


def selection_oracle(act, reg_map, anchors, classes, alpha, act_min, loss_max, nms_iou):
    """Straight-line re-statement of the candidate selection algorithm.

    act: K x T activation matrix; reg_map: 2M x T regression outputs;
    anchors: list of anchor lengths. Returns the kept (k, t, m) triples and
    the per-candidate inner boundaries, mirroring the selection layer but
    built independently from first principles.
    """
    K, T = act.shape
    M = len(anchors)
    kept = []
    for k in classes:
        row = act[k - 1]
        stage = []  # (loss, x1, x2, t, m)
        for t in range(1, T + 1):
            if row[t - 1] < act_min:
                continue
            best = None
            for m in range(M):
                w_a = float(anchors[m])
                t_x = reg_map[2 * m, t - 1]
                t_w = reg_map[2 * m + 1, t - 1]
                c_x = t + w_a * t_x
                w = w_a * math.exp(t_w)
                x1, x2 = c_x - w / 2.0, c_x + w / 2.0
                # clip into the padded grid
                x1 = min(max(x1, 0.0), float(T + 1))
                x2 = min(max(x2, 0.0), float(T + 1))
                X1 = min(x1 - w * alpha, x1 - 1.0)
                X2 = max(x2 + w * alpha, x2 + 1.0)
                X1 = min(max(X1, 0.0), float(T + 1))
                X2 = min(max(X2, 0.0), float(T + 1))
                rx1, rx2 = round_half_away(x1), round_half_away(x2)
                rX1, rX2 = round_half_away(X1), round_half_away(X2)
                ring = (rX2 - rX1) - (rx2 - rx1)
                if ring < 1 or rX1 < 0 or rX2 > T + 1:
                    continue
                loss = brute_force_loss(row, x1, x2, X1, X2)
                if best is None or loss < best[0]:
                    best = (loss, x1, x2, t, m)
            if best is None or best[0] > loss_max:
                continue
            stage.append(best)
        # greedy NMS on inner boundaries, lowest loss first, earlier start ties
        stage.sort(key=lambda it: (it[0], it[1], it[2]))
        while stage:
            head = stage.pop(0)
            kept.append((k, head[3], head[4]))
            survivors = []
            for it in stage:
                inter = min(head[2], it[2]) - max(head[1], it[1])
                if inter <= 0:
                    ov = 0.0
                else:
                    union = max(head[2], it[2]) - min(head[1], it[1])
                    ov = inter / union if union > 0 else 0.0
                if ov <= nms_iou:
                    survivors.append(it)
            stage = survivors
    return sorted(kept)


def enumeration_oracle(act_row, k, T, alpha, loss_max, nms_iou):
    """All integer segments, loss-filtered then greedily suppressed."""
    stage = []
    for x1 in range(1, T + 1):
        for x2 in range(x1, T + 1):
            w = float(x2 - x1 + 1)
            X1 = min(x1 - w * alpha, x1 - 1.0)
            X2 = max(x2 + w * alpha, x2 + 1.0)
            X1 = min(max(X1, 0.0), float(T + 1))
            X2 = min(max(X2, 0.0), float(T + 1))
            loss = brute_force_loss(act_row, float(x1), float(x2), X1, X2)
            if loss <= loss_max:
                stage.append((loss, float(x1), float(x2)))
    stage.sort(key=lambda it: (it[0], it[1], it[2]))
    kept = []
    while stage:
        head = stage.pop(0)
        kept.append((head[1], head[2]))
        survivors = []
        for it in stage:
            inter = min(head[2], it[2]) - max(head[1], it[1])
            if inter <= 0:
                ov = 0.0
            else:
                union = max(head[2], it[2]) - min(head[1], it[1])
                ov = inter / union if union > 0 else 0.0
            if ov <= nms_iou:
                survivors.append(it)
        stage = survivors
    return sorted(kept)
