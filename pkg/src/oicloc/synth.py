"""Synthetic benchmark corpora with planted action instances.

Videos are plateaus over a low background, optionally perturbed with the two
failure modes simple thresholding trips over: a deep narrow notch inside an
instance (over-segmentation bait) and an elevated bridge between two adjacent
instances of the same class (merge bait). Instance levels jitter so that no
single global threshold separates action from context in every video.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .cas import Cas, GroundTruthSegment, VideoRecord
from .errors import InputError
from .selection import snippet_to_time


@dataclass(frozen=True)
class SynthSpec:
    num_classes: int
    t_range: tuple[int, int]
    instances_range: tuple[int, int]
    base_activation: float = 0.9
    noise_amp: float = 0.0
    dip_prob: float = 0.0
    bridge_prob: float = 0.0
    instance_len_range: tuple[int, int] = (6, 20)
    gap_range: tuple[int, int] = (4, 12)
    background: float = 0.03
    level_jitter: float = 0.0
    dip_level: float = 0.05
    dip_width_range: tuple[int, int] = (1, 2)
    dip_central: bool = False  # confine the notch to the middle third
    bridge_level: float = 0.5
    fps: float = 30.0

    def __post_init__(self):
        for name in ("t_range", "instances_range", "instance_len_range",
                     "gap_range", "dip_width_range"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < (0 if name == "instances_range" else 1):
                raise InputError(f"empty or invalid range {name}={lo, hi}")
        if self.num_classes < 1:
            raise InputError("need at least one class")
        if not (0.0 < self.base_activation <= 1.0):
            raise InputError("base_activation must lie in (0, 1]")
        if self.instance_len_range[0] < 3:
            raise InputError("instances must be at least 3 snippets long")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown synth spec keys: {sorted(unknown)}")
        kwargs = dict(data)
        for name in ("t_range", "instances_range", "instance_len_range",
                     "gap_range", "dip_width_range"):
            if name in kwargs:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def _place_instances(rng, spec: SynthSpec, T: int, count: int) -> list[tuple[int, int]]:
    """Lay out non-overlapping [start, end] snippet spans left to right."""
    spans = []
    cursor = 1 + int(rng.integers(1, spec.gap_range[0] + 1))
    for _ in range(count):
        length = int(rng.integers(spec.instance_len_range[0], spec.instance_len_range[1] + 1))
        if cursor + length - 1 > T - 1:
            break
        spans.append((cursor, cursor + length - 1))
        cursor += length + int(rng.integers(spec.gap_range[0], spec.gap_range[1] + 1))
    return spans


def synth_corpus(spec: SynthSpec, seed: int, count: int, prefix: str = "video") -> list[VideoRecord]:
    """Generate `count` videos; byte-identical for the same (spec, seed)."""
    rng = np.random.default_rng(seed)
    videos = []
    for i in range(count):
        T = int(rng.integers(spec.t_range[0], spec.t_range[1] + 1))
        n_target = int(rng.integers(spec.instances_range[0], spec.instances_range[1] + 1))
        k = int(rng.integers(1, spec.num_classes + 1))
        spans = _place_instances(rng, spec, T, n_target)
        act = np.full((spec.num_classes, T), spec.background)
        gt = []
        for s, e in spans:
            level = spec.base_activation - float(rng.uniform(0.0, spec.level_jitter))
            act[k - 1, s - 1 : e] = level
            if rng.uniform() < spec.dip_prob:
                width = int(rng.integers(spec.dip_width_range[0], spec.dip_width_range[1] + 1))
                width = min(width, e - s - 1)  # keep the notch strictly interior
                if spec.dip_central:
                    length = e - s + 1
                    lo = max(s + 1, s + length // 3)
                    hi = min(e - width, e - length // 3 - width + 1)
                else:
                    lo = s + 1
                    hi = e - width  # notch start so the notch ends before e
                if hi < lo:
                    lo = hi = max(s + 1, min(e - width, s + (e - s) // 2))
                d0 = int(rng.integers(lo, hi + 1)) if hi >= lo else lo
                act[k - 1, d0 - 1 : d0 - 1 + width] = spec.dip_level
            gt.append(GroundTruthSegment(k, snippet_to_time(s, spec.fps),
                                         snippet_to_time(e, spec.fps)))
        for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
            if rng.uniform() < spec.bridge_prob:
                act[k - 1, e1 : s2 - 1] = spec.bridge_level
        if spec.noise_amp > 0:
            act = act + rng.normal(0.0, spec.noise_amp, size=act.shape)
        act = np.clip(act, 0.0, 1.0)
        videos.append(
            VideoRecord(
                video_id=f"{prefix}_{i:04d}",
                cas=Cas(act),
                labels=(k,),
                fps=spec.fps,
                gt=tuple(gt),
            )
        )
    return videos
