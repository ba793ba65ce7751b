"""Training loop (one video per optimizer step) and inference helpers."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .cas import VideoRecord
from .config import RunConfig
from .features import cas_to_features
from .regressor import NetworkB, SgdConfig, SgdState, sgd_step
from .selection import Prediction, build_candidates, select, training_loss

log = logging.getLogger("oicloc")


@dataclass
class TrainResult:
    net: NetworkB
    losses: list[float] = field(default_factory=list)


def new_network(cfg: RunConfig, seed: int) -> NetworkB:
    return NetworkB(
        cfg.feature_dim, cfg.anchor_config().count, hidden=cfg.hidden, seed=seed
    )


def train_network(
    corpus: list[VideoRecord],
    cfg: RunConfig,
    seed: int = 0,
    loss: str = "oic",
    net: NetworkB | None = None,
    start_iteration: int = 0,
) -> TrainResult:
    """Train the boundary regressor on a corpus with the selection-layer loss."""
    if not corpus:
        raise ValueError("training requires at least one video")
    if net is None:
        net = new_network(cfg, seed)
    anchors = cfg.anchor_config()
    opt = SgdConfig(cfg.lr, cfg.lr_step, cfg.momentum, cfg.weight_decay)
    state = SgdState()
    result = TrainResult(net)
    iteration = start_iteration
    for epoch in range(cfg.epochs):
        for video in corpus:
            step_loss = train_step(net, video, cfg, anchors, opt, state, iteration, loss)
            result.losses.append(step_loss)
            iteration += 1
        log.info("epoch %d done, last loss %.4f", epoch, result.losses[-1])
    return result


def train_step(net, video, cfg, anchors, opt, state, iteration, loss="oic") -> float:
    feat = cas_to_features(video.cas, cfg.feature_dim)
    reg_map, cache = net.forward(feat, mode="train")
    grid = build_candidates(reg_map, anchors, video.cas.num_snippets, cfg.alpha)
    mask, _ = select(
        video.cas,
        grid,
        classes=video.labels,
        act_min=cfg.act_min,
        loss_max=cfg.loss_max,
        nms_iou=cfg.nms_iou,
        fps=video.fps,
        loss=loss,
    )
    total, grad_out = training_loss(video.cas, grid, mask, cfg.alpha, loss=loss)
    grads = net.backward(cache, grad_out)
    sgd_step(net, grads, opt, state, iteration)
    return total


def predict_video(
    net: NetworkB, video: VideoRecord, cfg: RunConfig, loss: str = "oic"
) -> list[Prediction]:
    """Frozen-network inference over all classes."""
    feat = cas_to_features(video.cas, cfg.feature_dim)
    reg_map = net.forward(feat, mode="infer")
    grid = build_candidates(reg_map, cfg.anchor_config(), video.cas.num_snippets, cfg.alpha)
    _, survivors = select(
        video.cas,
        grid,
        classes=range(1, video.cas.num_classes + 1),
        act_min=cfg.act_min,
        loss_max=cfg.loss_max,
        nms_iou=cfg.nms_iou,
        fps=video.fps,
        loss=loss,
        video_id=video.video_id,
    )
    return [pred for pred, _ in survivors]
