"""结果 CSV 与元数据文件读写。"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path
from typing import List

from .campaign import CampaignError, CampaignResult, PointResult
from .constants import CSV_COLUMNS, format_float

_INT_COLUMNS = {"iters", "ns", "frames", "frame_errors", "bit_errors_pre", "bit_errors_post"}
_STR_COLUMNS = {"sampler"}


def metadata_path(out: str) -> str:
    return str(Path(out).with_suffix(".meta.json"))


def _format(column: str, value: object) -> str:
    if column in _INT_COLUMNS or column in _STR_COLUMNS:
        return str(value)
    return format_float(float(value))  # type: ignore[arg-type]


def write_results_csv(path: str, result: CampaignResult) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for point in result.points:
                writer.writerow([_format(column, getattr(point, column)) for column in CSV_COLUMNS])
    except OSError as exc:
        raise CampaignError(f"无法写入结果文件 {path}: {exc}") from exc


def read_results_csv(path: str) -> List[PointResult]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_COLUMNS:
            raise CampaignError(f"CSV 表头与预期不一致: {reader.fieldnames}")
        points = []
        for row in reader:
            values = {}
            for column in CSV_COLUMNS:
                raw = row[column]
                if column in _INT_COLUMNS:
                    values[column] = int(raw)
                elif column in _STR_COLUMNS:
                    values[column] = raw
                else:
                    values[column] = float(raw)
            points.append(PointResult(**values))
    return points


def write_metadata(out: str, result: CampaignResult) -> None:
    """写出运行配置与说明，便于复现。"""
    cfg = result.config
    notes = []
    if cfg.sampler.sampler_kind == "uniform":
        notes.append("uniform 检测器有放回地独立抽取符号向量")
    if cfg.sampler.sampler_kind != "rwma":
        notes.append("mean_acceptance_ratio 仅对 rwma 有意义，其余检测器记为 0")
    if not cfg.record_timing:
        notes.append("未记录耗时，seconds 列为 0")
    data = {
        "config": cfg.to_dict(),
        "frame_cap": cfg.frames,
        "target_frame_errors": cfg.target_frame_errors,
        "frames_run": {format_float(p.snr_db): p.frames for p in result.points},
        "channel_uses_per_frame": cfg.channel_uses,
        "notes": notes,
    }
    path = metadata_path(out)
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
    except OSError as exc:
        raise CampaignError(f"无法写入元数据文件 {path}: {exc}") from exc
