"""MIMO RWMA 仿真命令行入口。"""

from __future__ import annotations

import argparse
import importlib
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

yaml = None
try:
    yaml = importlib.import_module("yaml")
except ImportError:  # pragma: no cover - 运行时检测
    pass

from .campaign import CampaignConfig, CampaignError, run_campaign
from .coding import CodeConfig
from .constants import CHAIN_INITS, DEFAULTS, MODULATIONS, SAMPLERS
from .detector import DetectorError, SamplerConfig
from .log import logger, setup_logging
from .parser import (
    ConfigError,
    parse_bool,
    parse_choice,
    parse_float,
    parse_int,
    parse_snr_list,
)

DEFAULT_CONFIG_TEMPLATE = """# MIMO RWMA 仿真配置模板
# 命令行参数优先于本文件中的同名配置

# 发射/接收天线数（接收天线数不少于发射天线数）
tx: 3
rx: 3

# 调制方式，可选值：qam16、qpsk
modulation: "qam16"

# Eb/N0 扫描点（dB），可写列表或逗号分隔字符串
snr_db: [0, 2, 4, 6, 8, 10, 12, 14]

# 每个信噪比点的最大帧数
frames: 300

# 达到该误帧数后提前结束当前信噪比点，0 表示跑满 frames 帧
target_frame_errors: 50

# 检测器，可选值：rwma、uniform、exact
sampler: "rwma"

# Metropolis 迭代次数 R（uniform 为抽样次数）
iters: 200

# 显著项数 Ns，1 对应 max-log-MAP；exact 可填 0 表示完整求和
ns: 1

# 采样温度相对环境噪声的倍数
temp_scale: 10

# 马尔可夫链起点，可选值：zero_forcing（量化最小二乘解）、random、matched_filter
init: "zero_forcing"

# 每帧信息字节数
info_bytes: 64

# 主随机种子
seed: 2024

# 并行进程数，结果与并行度无关
workers: 1

# 结果 CSV 路径，元数据写入同名 .meta.json
out: "results.csv"

# 是否记录耗时；关闭后 seconds 列为 0，便于逐字节比对
record_timing: true

# 固定噪声方差（调试用），留空则由 Eb/N0 换算
sigma2_override:
"""

# 命令行参数名到配置键的映射
_FLAG_KEYS = {
    "tx": "tx",
    "rx": "rx",
    "mod": "modulation",
    "snr": "snr_db",
    "frames": "frames",
    "sampler": "sampler",
    "iters": "iters",
    "ns": "ns",
    "temp_scale": "temp_scale",
    "seed": "seed",
    "out": "out",
    "info_bytes": "info_bytes",
    "workers": "workers",
    "target_errors": "target_frame_errors",
    "sigma2": "sigma2_override",
    "init": "init",
    "exact_cap": "exact_cap",
}


def _load_yaml_config(path: Path) -> dict[str, Any]:
    if yaml is None:
        raise RuntimeError("未安装 PyYAML，请执行 pip install PyYAML")
    if not path.exists():
        raise ConfigError(f"配置文件不存在: {path}")
    with path.open("r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件格式错误: {path}")
    return data


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimo_rwma",
        description="基于随机游走 Metropolis 采样的软输出 MIMO 检测链路级仿真",
    )
    parser.add_argument("--config", help="YAML 配置文件路径")
    parser.add_argument("--init-config", metavar="PATH", help="写出默认配置模板后退出")
    parser.add_argument("--tx", help="发射天线数 M")
    parser.add_argument("--rx", help="接收天线数 N")
    parser.add_argument("--mod", help=f"调制方式: {', '.join(MODULATIONS)}")
    parser.add_argument("--snr", help='Eb/N0 列表 (dB)，例如 "0,2,4"')
    parser.add_argument("--frames", help="每个信噪比点的最大帧数")
    parser.add_argument("--sampler", help=f"检测器: {', '.join(SAMPLERS)}")
    parser.add_argument("--iters", help="迭代次数 R")
    parser.add_argument("--ns", help="显著项数 Ns")
    parser.add_argument("--temp-scale", dest="temp_scale", help="采样温度倍数 T")
    parser.add_argument("--seed", help="主随机种子")
    parser.add_argument("--out", help="结果 CSV 路径")
    parser.add_argument("--info-bytes", dest="info_bytes", help="每帧信息字节数")
    parser.add_argument("--workers", help="并行进程数")
    parser.add_argument("--target-errors", dest="target_errors", help="提前结束所需误帧数")
    parser.add_argument("--sigma2", help="固定噪声方差，覆盖 Eb/N0 换算")
    parser.add_argument("--init", help=f"链初始化方式: {', '.join(CHAIN_INITS)}")
    parser.add_argument("--exact-cap", dest="exact_cap", help="精确检测器允许的最大格点数")
    parser.add_argument("--no-timing", action="store_true", help="不记录耗时（seconds 列为 0）")
    parser.add_argument("--log-level", default="INFO", help="日志级别")
    return parser


def _merge_settings(args: argparse.Namespace) -> Dict[str, Any]:
    settings: Dict[str, Any] = dict(DEFAULTS)
    if args.config:
        settings.update(_load_yaml_config(Path(args.config)))
    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            settings[key] = value
    if args.no_timing:
        settings["record_timing"] = False
    return settings


def build_config(settings: Dict[str, Any]) -> CampaignConfig:
    """把合并后的配置字典转换为校验过的 CampaignConfig。"""
    sampler_kind = parse_choice(settings.get("sampler"), "sampler", SAMPLERS, DEFAULTS["sampler"])
    try:
        sampler = SamplerConfig(
            iterations=parse_int(settings.get("iters"), "iters", DEFAULTS["iters"], min_value=1),
            significant_terms=parse_int(
                settings.get("ns"), "ns", DEFAULTS["ns"], min_value=0 if sampler_kind == "exact" else 1
            ),
            temperature_scale=parse_float(settings.get("temp_scale"), "temp-scale", DEFAULTS["temp_scale"], min_value=1.0),
            sampler_kind=sampler_kind,
            init=parse_choice(settings.get("init"), "init", CHAIN_INITS, DEFAULTS["init"]),
            exact_cap=parse_int(settings.get("exact_cap"), "exact-cap", DEFAULTS["exact_cap"], min_value=1),
        )
    except DetectorError as exc:
        raise ConfigError(str(exc)) from exc

    cfg = CampaignConfig(
        tx=parse_int(settings.get("tx"), "tx", DEFAULTS["tx"], min_value=1),
        rx=parse_int(settings.get("rx"), "rx", DEFAULTS["rx"], min_value=1),
        modulation=parse_choice(settings.get("modulation"), "mod", MODULATIONS, DEFAULTS["modulation"]),
        code=CodeConfig(),
        info_bytes=parse_int(settings.get("info_bytes"), "info-bytes", DEFAULTS["info_bytes"], min_value=1),
        snr_db=tuple(parse_snr_list(settings.get("snr_db"), "snr")),
        frames=parse_int(settings.get("frames"), "frames", DEFAULTS["frames"], min_value=1),
        sampler=sampler,
        seed=parse_int(settings.get("seed"), "seed", DEFAULTS["seed"], min_value=0),
        out=str(settings.get("out") or DEFAULTS["out"]),
        workers=parse_int(settings.get("workers"), "workers", DEFAULTS["workers"], min_value=1),
        target_frame_errors=parse_int(
            settings.get("target_frame_errors"), "target-errors", DEFAULTS["target_frame_errors"], min_value=0
        ),
        sigma2_override=parse_float(settings.get("sigma2_override"), "sigma2", None, min_value=0.0),
        record_timing=parse_bool(settings.get("record_timing"), "record_timing", default=True),
    )
    cfg.validate()
    ignored = sampler.temperature_scale != DEFAULTS["temp_scale"] or sampler.init != DEFAULTS["init"]
    if sampler_kind != "rwma" and ignored:
        logger.warning(f"检测器 {sampler_kind} 不使用温度与初始化设置，已忽略")
    if sampler_kind == "exact" and sampler.iterations != DEFAULTS["iters"]:
        logger.warning("exact 检测器不使用迭代次数，已忽略")
    return cfg


def _write_template(path: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(DEFAULT_CONFIG_TEMPLATE, encoding="utf-8")
    logger.info(f"已创建默认配置文件: {target}")


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        if args.init_config:
            _write_template(args.init_config)
            return 0
        cfg = build_config(_merge_settings(args))
        run_campaign(cfg)
    except (ConfigError, CampaignError) as exc:
        print(f"错误: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.error(f"仿真异常: {exc}", exc_info=True)
        return 1
    return 0
