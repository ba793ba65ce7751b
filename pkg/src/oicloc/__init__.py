"""Weakly-supervised temporal interval localization on class activation
sequences, trained with an outer-inner contrastive loss."""

from .boundary import AnchorConfig, ClipState, RegressionPair, round_boundary
from .cas import AttentionSeq, Cas, ClassScores, GroundTruthSegment, VideoRecord, gate_attention
from .config import PROFILES, RunConfig, load_config
from .evaluation import EvalReport, average_precision, iou, map_report
from .oic import BoundaryGradients, OicBreakdown, SegmentHypothesis
from .regressor import NetworkB
from .selection import Prediction, build_candidates, nms, select, snippet_to_time
from .synth import SynthSpec, synth_corpus

__all__ = [
    "AnchorConfig", "AttentionSeq", "BoundaryGradients", "Cas", "ClassScores",
    "ClipState", "EvalReport", "GroundTruthSegment", "NetworkB", "OicBreakdown",
    "PROFILES", "Prediction", "RegressionPair", "RunConfig", "SegmentHypothesis",
    "SynthSpec", "VideoRecord", "average_precision", "build_candidates",
    "gate_attention", "iou", "load_config", "map_report", "nms",
    "round_boundary", "select", "snippet_to_time", "synth_corpus",
]
