"""Command-line surface: train / predict / eval / synth / gradcheck / ablate."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import baselines, evaluation, io, synth
from .config import PROFILES, RunConfig, load_config
from .errors import ConfigError
from .gradcheck import run_all
from .regressor import NetworkB
from .train import predict_video, train_network

log = logging.getLogger("oicloc")


def _setup_logging() -> None:
    level = os.environ.get("OICLOC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_run(config_path: str) -> tuple[RunConfig, list]:
    cfg = load_config(config_path)
    if cfg.manifest is None:
        raise ConfigError(f"{config_path}: config must name a manifest")
    manifest = Path(config_path).parent / cfg.manifest
    videos = io.read_manifest(manifest)
    if not videos:
        raise ConfigError(f"{manifest}: manifest lists no videos")
    return cfg, videos


def cmd_synth(args) -> int:
    spec = synth.SynthSpec.from_dict(json.loads(Path(args.spec).read_text()))
    videos = synth.synth_corpus(spec, args.seed, args.count, prefix=args.prefix)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_manifest(out / "manifest.json", videos, cas_dir="cas")
    print(f"wrote {len(videos)} videos to {out}")
    return 0


def cmd_train(args) -> int:
    cfg, videos = _load_run(args.config)
    result = train_network(videos, cfg, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.net.save(out / "checkpoint.json")
    with open(out / "loss.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "loss"])
        for i, value in enumerate(result.losses):
            writer.writerow([i, repr(value)])
    print(f"trained {len(result.losses)} iterations; checkpoint at {out / 'checkpoint.json'}")
    return 0


def _predict_corpus(mode, videos, cfg, checkpoint, seed, workers):
    if mode in ("full", "inner_only"):
        if checkpoint is None:
            raise ConfigError(f"mode {mode} requires --checkpoint")
        net = NetworkB.load(checkpoint)
        loss = "oic" if mode == "full" else "inner"
        fn = lambda v: predict_video(net, v, cfg, loss=loss)
    elif mode == "threshold":
        fn = lambda v: [
            p
            for k in range(1, v.cas.num_classes + 1)
            for p in baselines.threshold_localize(v.cas, k, cfg.act_min, v.fps, v.video_id)
        ]
    elif mode == "oic_select":
        fn = lambda v: [
            p
            for k in range(1, v.cas.num_classes + 1)
            for p in baselines.oic_selection_enumerate(
                v.cas, k, alpha=cfg.alpha, loss_max=cfg.loss_max,
                nms_iou=cfg.nms_iou, fps=v.fps, video_id=v.video_id,
            )
        ]
    elif mode == "direct_opt":
        fn = lambda v: baselines.direct_optimize(v, cfg, seed=seed)
    else:
        raise ConfigError(f"unknown prediction mode {mode!r}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_video = list(pool.map(fn, videos))
    else:
        per_video = [fn(v) for v in videos]
    return [p for preds in per_video for p in preds]


def cmd_predict(args) -> int:
    cfg, videos = _load_run(args.config)
    preds = _predict_corpus(args.mode, videos, cfg, args.checkpoint, args.seed, args.workers)
    io.write_predictions_jsonl(args.out, preds)
    print(f"wrote {len(preds)} predictions to {args.out}")
    return 0


def cmd_eval(args) -> int:
    preds = io.read_predictions_jsonl(args.pred)
    videos = io.read_manifest(args.manifest)
    thresholds = (
        evaluation.THUMOS_THRESHOLDS
        if args.profile == "thumos"
        else evaluation.ACTIVITYNET_THRESHOLDS
    )
    report = evaluation.map_report(preds, evaluation.gt_instances(videos), thresholds)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_json())
    report.to_csv(out.with_suffix(".csv"))
    for thr in thresholds:
        print(f"mAP@{thr}: {report.map_at(thr):.4f}")
    print(f"avg mAP: {report.avg_map:.4f}")
    return 0


def cmd_gradcheck(args) -> int:
    results = run_all(args.seed)
    failed = False
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: max_err={r.max_err:.3e} tol={r.tol:.1e}")
        failed = failed or not r.passed
    return 1 if failed else 0


def cmd_ablate(args) -> int:
    from dataclasses import replace

    cfg, videos = _load_run(args.config)
    if args.test_config:
        _, test_videos = _load_run(args.test_config)
    else:
        test_videos = videos
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    gts = evaluation.gt_instances(test_videos)
    rows = []

    def evaluate(name, preds):
        report = evaluation.map_report(preds, gts, (0.5,))
        rows.append((name, report.map_at(0.5)))
        io.write_predictions_jsonl(out / f"preds_{name}.jsonl", preds)
        print(f"{name}: mAP@0.5 = {report.map_at(0.5):.4f}")

    result = train_network(videos, cfg, seed=args.seed)
    evaluate("full", [p for v in test_videos for p in predict_video(result.net, v, cfg)])
    evaluate("direct_opt", _predict_corpus("direct_opt", test_videos, cfg, None, args.seed, args.workers))
    evaluate("oic_select", _predict_corpus("oic_select", test_videos, cfg, None, args.seed, args.workers))
    inner_net = baselines.train_inner_only(videos, cfg, seed=args.seed)
    evaluate("inner_only", [p for v in test_videos for p in predict_video(inner_net, v, cfg, loss="inner")])
    for alpha in (0.125, 0.25, 0.5):
        alpha_cfg = replace(cfg, alpha=alpha)
        alpha_net = train_network(videos, alpha_cfg, seed=args.seed).net
        evaluate(
            f"full_alpha_{alpha}",
            [p for v in test_videos for p in predict_video(alpha_net, v, alpha_cfg)],
        )
    with open(out / "ablation.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "map_at_0.5"])
        writer.writerows(rows)
    _write_plot_data(out / "plot_data", test_videos, io.read_predictions_jsonl(out / "preds_full.jsonl"))
    print(f"ablation table at {out / 'ablation.csv'}")
    return 0


def _write_plot_data(dirpath: Path, videos, preds) -> None:
    """Per-video CSV of activations plus predicted and gt interval overlays."""
    dirpath.mkdir(parents=True, exist_ok=True)
    by_video = {}
    for p in preds:
        by_video.setdefault(p.video_id, []).append(p)
    for v in videos:
        with open(dirpath / f"{v.video_id}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "class", "start_s", "end_s", "value"])
            step = 15.0 / v.fps
            for k in range(1, v.cas.num_classes + 1):
                for t in range(1, v.cas.num_snippets + 1):
                    writer.writerow(["cas", k, (t - 1) * step, t * step, v.cas.act[k - 1, t - 1]])
            for g in v.gt or ():
                writer.writerow(["gt", g.class_id, g.start_s, g.end_s, 1.0])
            for p in by_video.get(v.video_id, ()):
                writer.writerow(["pred", p.class_id, p.start_s, p.end_s, p.score])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oicloc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--prefix", default="video")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the boundary regressor")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="run a detector over a manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--checkpoint")
    p.add_argument(
        "--mode",
        default="full",
        choices=["full", "threshold", "oic_select", "direct_opt", "inner_only"],
    )
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score predictions against a manifest")
    p.add_argument("--pred", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--profile", default="thumos", choices=["thumos", "activitynet"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference verification suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("ablate", help="variant comparison on one corpus")
    p.add_argument("--config", required=True)
    p.add_argument("--test-config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
