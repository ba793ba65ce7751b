"""Class activation sequences and the surrounding data model.

A CAS is a K x T matrix of per-class, per-snippet activations in [0, 1].
Snippet indices are 1-based everywhere; positions 0 and T+1 are virtual
zero-padded snippets used by the boundary machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

SNIPPET_FRAMES = 15


def _as_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"expected a K x T matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix contains non-finite entries")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ClassScores:
    """Raw per-snippet classification scores, K classes by T snippets."""

    scores: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scores", _as_matrix(self.scores))

    @property
    def num_classes(self) -> int:
        return self.scores.shape[0]

    @property
    def num_snippets(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class AttentionSeq:
    """Per-snippet attention scores (scale taken as given)."""

    att: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.att, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise InputError(f"expected a length-T vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("attention contains non-finite entries")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "att", arr)


@dataclass(frozen=True)
class Cas:
    """Gated activation matrix; every entry lies in [0, 1]."""

    act: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.act)
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise InputError("activations must lie in [0, 1]")
        object.__setattr__(self, "act", arr)

    @property
    def num_classes(self) -> int:
        return self.act.shape[0]

    @property
    def num_snippets(self) -> int:
        return self.act.shape[1]

    def activation(self, k: int, x: int) -> float:
        """Activation of class k at integer snippet x; 0 on the pad."""
        T = self.num_snippets
        if not 1 <= k <= self.num_classes:
            raise InputError(f"class index {k} outside 1..{self.num_classes}")
        if x == 0 or x == T + 1:
            return 0.0
        if not 1 <= x <= T:
            raise InputError(f"snippet index {x} outside padded grid [0, {T + 1}]")
        return float(self.act[k - 1, x - 1])

    def padded_row(self, k: int) -> np.ndarray:
        """Length T+2 activation row with the zero pad at both ends."""
        if not 1 <= k <= self.num_classes:
            raise InputError(f"class index {k} outside 1..{self.num_classes}")
        return np.pad(self.act[k - 1], 1)


@dataclass(frozen=True)
class GroundTruthSegment:
    class_id: int
    start_s: float
    end_s: float

    def __post_init__(self):
        if not (0.0 <= self.start_s < self.end_s):
            raise InputError(
                f"ground truth needs 0 <= start < end, got [{self.start_s}, {self.end_s}]"
            )


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    cas: Cas
    labels: tuple[int, ...]
    fps: float
    gt: tuple[GroundTruthSegment, ...] | None = None

    def __post_init__(self):
        if self.fps <= 0:
            raise InputError("fps must be positive")
        labels = tuple(sorted(set(int(k) for k in self.labels)))
        if labels and not (1 <= labels[0] and labels[-1] <= self.cas.num_classes):
            raise InputError(f"labels {labels} outside 1..{self.cas.num_classes}")
        object.__setattr__(self, "labels", labels)
        if self.gt is not None:
            object.__setattr__(self, "gt", tuple(self.gt))


def gate_attention(scores: ClassScores, att: AttentionSeq, att_threshold: float) -> Cas:
    """Zero out all class scores of snippets whose attention is below threshold."""
    if att.att.shape[0] != scores.num_snippets:
        raise InputError(
            f"attention length {att.att.shape[0]} != snippet count {scores.num_snippets}"
        )
    if math.isnan(att_threshold):
        raise InputError("att_threshold must not be NaN")
    gated = np.clip(scores.scores, 0.0, 1.0)
    gated = np.where(att.att >= att_threshold, gated, 0.0)
    return Cas(gated)
