"""File formats: CAS/score/attention CSV, manifests, predictions, reports."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .cas import AttentionSeq, Cas, ClassScores, GroundTruthSegment, VideoRecord
from .errors import InputError
from .selection import Prediction


def write_cas_csv(path: str | Path, cas: Cas) -> None:
    K, T = cas.num_classes, cas.num_snippets
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snippet"] + [f"class_{k}" for k in range(1, K + 1)])
        for t in range(1, T + 1):
            writer.writerow([t] + [repr(float(v)) for v in cas.act[:, t - 1]])


def _read_matrix_csv(path: str | Path) -> np.ndarray:
    """Read a snippet,class_1..class_K CSV into a K x T matrix."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InputError(f"{path}: empty CSV")
    header = rows[0]
    if header[0] != "snippet" or any(
        name != f"class_{i + 1}" for i, name in enumerate(header[1:])
    ):
        raise InputError(f"{path}: expected header snippet,class_1,...,class_K")
    K = len(header) - 1
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != K + 1:
            raise InputError(f"{path}:{lineno}: expected {K + 1} columns")
        if int(row[0]) != lineno - 1:
            raise InputError(f"{path}:{lineno}: snippet indices must run 1..T")
        values.append([float(v) for v in row[1:]])
    return np.array(values).T


def read_cas_csv(path: str | Path) -> Cas:
    return Cas(_read_matrix_csv(path))


def read_scores_csv(path: str | Path) -> ClassScores:
    return ClassScores(_read_matrix_csv(path))


def read_attention_csv(path: str | Path) -> AttentionSeq:
    """Single-column CSV with header snippet,class_1."""
    mat = _read_matrix_csv(path)
    if mat.shape[0] != 1:
        raise InputError(f"{path}: attention CSV must have a single value column")
    return AttentionSeq(mat[0])


def write_manifest(path: str | Path, videos: list[VideoRecord], cas_dir: str = ".") -> None:
    """Write the JSON manifest and one CAS CSV per video next to it."""
    path = Path(path)
    base = path.parent / cas_dir
    base.mkdir(parents=True, exist_ok=True)
    entries = []
    for v in videos:
        cas_path = f"{cas_dir}/{v.video_id}.csv" if cas_dir != "." else f"{v.video_id}.csv"
        write_cas_csv(path.parent / cas_path, v.cas)
        entry = {
            "video_id": v.video_id,
            "cas_path": cas_path,
            "labels": list(v.labels),
            "fps": v.fps,
        }
        if v.gt is not None:
            entry["gt"] = [
                {"class": g.class_id, "start_s": g.start_s, "end_s": g.end_s} for g in v.gt
            ]
        entries.append(entry)
    path.write_text(json.dumps(entries, indent=1))


def read_manifest(path: str | Path) -> list[VideoRecord]:
    path = Path(path)
    try:
        entries = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not isinstance(entries, list):
        raise InputError(f"{path}: manifest must be a JSON array")
    videos = []
    for entry in entries:
        extra = set(entry) - {"video_id", "cas_path", "labels", "fps", "gt"}
        if extra:
            raise InputError(f"{path}: unknown manifest keys {sorted(extra)}")
        gt = None
        if "gt" in entry:
            gt = tuple(
                GroundTruthSegment(g["class"], g["start_s"], g["end_s"]) for g in entry["gt"]
            )
        videos.append(
            VideoRecord(
                video_id=entry["video_id"],
                cas=read_cas_csv(path.parent / entry["cas_path"]),
                labels=tuple(entry["labels"]),
                fps=entry["fps"],
                gt=gt,
            )
        )
    return videos


def write_predictions_jsonl(path: str | Path, preds: list[Prediction]) -> None:
    """JSON lines sorted by descending score."""
    ordered = sorted(preds, key=lambda p: (-p.score, p.video_id, p.start_s, p.class_id))
    with open(path, "w") as fh:
        for p in ordered:
            fh.write(
                json.dumps(
                    {
                        "video_id": p.video_id,
                        "class": p.class_id,
                        "start_s": p.start_s,
                        "end_s": p.end_s,
                        "score": p.score,
                    }
                )
                + "\n"
            )


def read_predictions_jsonl(path: str | Path) -> list[Prediction]:
    preds = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                preds.append(
                    Prediction(
                        class_id=obj["class"],
                        start_s=obj["start_s"],
                        end_s=obj["end_s"],
                        score=obj["score"],
                        video_id=obj["video_id"],
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise InputError(f"{path}:{lineno}: bad prediction line: {exc}") from exc
    return preds
