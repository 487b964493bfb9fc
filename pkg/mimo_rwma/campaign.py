"""端到端帧仿真流程与信噪比扫描。"""

from __future__ import annotations

import asyncio
import math
import os
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .channel import ebn0_to_sigma2, sample_channel, transmit
from .coding import (
    CodeConfig,
    build_bit_frame,
    deinterleave,
    interleave,
    pad_bits,
    pin_and_strip_pad,
    viterbi_decode,
)
from .constants import EFFICIENT_ACCEPTANCE_BAND, L_MAX, MODULATIONS, bits_per_symbol, round_float
from .constellation import bits_to_symbol_vector, build_constellation
from .detector import SamplerConfig, detect
from .log import logger
from .numerics import RngStream
from .parser import ConfigError
from .queue_manager import FrameQueue

# 随机流标签：帧流 (0, snr, frame)，交织器流 (1, frame)
_FRAME_STREAM = 0
_INTERLEAVER_STREAM = 1
# 帧内子流
_INFO, _CHANNEL, _NOISE, _DETECTOR = range(4)


class CampaignError(RuntimeError):
    """仿真运行错误。"""


@dataclass(frozen=True)
class CampaignConfig:
    tx: int = 3
    rx: int = 3
    modulation: str = "qam16"
    code: CodeConfig = field(default_factory=CodeConfig)
    info_bytes: int = 64
    snr_db: Sequence[float] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0)
    frames: int = 300
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    seed: int = 2024
    out: str = "results.csv"
    workers: int = 1
    target_frame_errors: int = 50
    sigma2_override: Optional[float] = None
    record_timing: bool = True

    def validate(self) -> None:
        if self.frames < 1:
            raise CampaignError("每个信噪比点的帧数必须大于0，拒绝输出空统计")
        if self.tx < 1 or self.rx < 1:
            raise ConfigError("天线数必须大于0")
        if self.rx < self.tx:
            raise ConfigError(f"接收天线数 {self.rx} 不能少于发射天线数 {self.tx}")
        if self.modulation not in MODULATIONS:
            raise ConfigError(f"不支持的调制方式: {self.modulation}")
        if self.info_bytes < 1:
            raise ConfigError("信息字节数必须大于0")
        if not self.snr_db:
            raise ConfigError("信噪比列表不能为空")
        if self.seed < 0:
            raise ConfigError("随机种子不能为负数")
        if self.workers < 1:
            raise ConfigError("并行度必须大于0")
        if self.target_frame_errors < 0:
            raise ConfigError("目标误帧数不能为负数")
        if self.sigma2_override is not None and self.sigma2_override <= 0:
            raise ConfigError("噪声方差覆盖值必须大于0")

    @property
    def info_bits(self) -> int:
        return 8 * self.info_bytes

    @property
    def bits_per_use(self) -> int:
        return self.tx * bits_per_symbol(self.modulation)

    @property
    def coded_bits(self) -> int:
        return self.code.coded_length(self.info_bits)

    @property
    def channel_uses(self) -> int:
        return math.ceil(self.coded_bits / self.bits_per_use)

    def sigma2(self, snr_index: int) -> float:
        if self.sigma2_override is not None:
            return self.sigma2_override
        return ebn0_to_sigma2(
            self.snr_db[snr_index], self.tx, bits_per_symbol(self.modulation), self.code.rate
        )

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["snr_db"] = list(self.snr_db)
        data["code"]["generators"] = [oct(g) for g in self.code.generators]
        return data


@dataclass(frozen=True)
class FrameRecord:
    snr_index: int
    frame_index: int
    frame_error: bool
    bit_errors_pre: int
    coded_bits: int
    bit_errors_post: int
    info_bits: int
    acceptance_ratio: float
    channel_uses: int


@dataclass(frozen=True)
class PointResult:
    """单个信噪比点的统计，浮点字段已舍入到 6 位有效数字。"""

    snr_db: float
    sampler: str
    iters: int
    ns: int
    temp_scale: float
    frames: int
    frame_errors: int
    fer: float
    bit_errors_pre: int
    ber_pre: float
    bit_errors_post: int
    ber_post: float
    mean_acceptance_ratio: float
    seconds: float

    @classmethod
    def from_records(
        cls,
        cfg: CampaignConfig,
        snr_db: float,
        records: Sequence[FrameRecord],
        seconds: float,
    ) -> "PointResult":
        if not records:
            raise CampaignError("没有可统计的帧")
        frames = len(records)
        frame_errors = sum(1 for r in records if r.frame_error)
        pre = sum(r.bit_errors_pre for r in records)
        post = sum(r.bit_errors_post for r in records)
        coded_total = sum(r.coded_bits for r in records)
        info_total = sum(r.info_bits for r in records)
        acceptance = sum(r.acceptance_ratio for r in records) / frames
        return cls(
            snr_db=round_float(snr_db),
            sampler=cfg.sampler.sampler_kind,
            iters=cfg.sampler.iterations,
            ns=cfg.sampler.significant_terms,
            temp_scale=round_float(cfg.sampler.temperature_scale),
            frames=frames,
            frame_errors=frame_errors,
            fer=round_float(frame_errors / frames),
            bit_errors_pre=pre,
            ber_pre=round_float(pre / coded_total),
            bit_errors_post=post,
            ber_post=round_float(post / info_total),
            mean_acceptance_ratio=round_float(acceptance),
            seconds=round_float(seconds) if cfg.record_timing else 0.0,
        )


@dataclass
class CampaignResult:
    config: CampaignConfig
    points: List[PointResult] = field(default_factory=list)


def _frame_stream(cfg: CampaignConfig, snr_index: int, frame_index: int) -> RngStream:
    return RngStream(cfg.seed, (_FRAME_STREAM, snr_index, frame_index))


def run_frame(cfg: CampaignConfig, frame_index: int, snr_index: int = 0) -> FrameRecord:
    """
    仿真一帧

    随机信息比特 → 卷积编码 → 交织 → 补零 → 每次信道使用映射 M·K 比特并重新
    抽取信道 → 检测 → 去补零 → 解交织 → 维特比译码 → 与信息比特比较。
    结果只由 (seed, snr_index, frame_index) 决定。
    """
    cfg.validate()
    if not 0 <= snr_index < len(cfg.snr_db):
        raise ConfigError(f"信噪比序号 {snr_index} 超出范围")
    c = build_constellation(cfg.modulation)
    sigma2 = cfg.sigma2(snr_index)
    stream = _frame_stream(cfg, snr_index, frame_index)
    channel_rng = stream.child(_CHANNEL)
    noise_rng = stream.child(_NOISE)
    detector_rng = stream.child(_DETECTOR)

    info = stream.child(_INFO).integers(2, size=cfg.info_bits).astype(np.int8)
    frame = build_bit_frame(cfg.code, info, RngStream(cfg.seed, (_INTERLEAVER_STREAM, frame_index)))
    sent = interleave(frame)
    padded, n_pad = pad_bits(sent, cfg.bits_per_use)

    width = cfg.bits_per_use
    llrs = np.empty(padded.size, dtype=np.float64)
    acceptance = []
    uses = padded.size // width
    for u in range(uses):
        chunk = padded[u * width : (u + 1) * width]
        H = sample_channel(channel_rng, cfg.rx, cfg.tx)
        use = transmit(c, bits_to_symbol_vector(c, chunk), H, sigma2, noise_rng)
        result = detect(use, c, cfg.sampler, detector_rng)
        llrs[u * width : (u + 1) * width] = result.llr.reshape(-1)
        acceptance.append(result.acceptance_ratio)

    received = pin_and_strip_pad(llrs, n_pad)
    bit_errors_pre = int(np.count_nonzero((received > 0).astype(np.int8) != sent))
    # 译码器输入饱和到 ±L_MAX，避免个别过度自信的 LLR 压过码的自由距离
    decoded = viterbi_decode(cfg.code, np.clip(deinterleave(received, frame.permutation), -L_MAX, L_MAX))
    bit_errors_post = int(np.count_nonzero(decoded != info))

    record = FrameRecord(
        snr_index=snr_index,
        frame_index=frame_index,
        frame_error=bit_errors_post > 0,
        bit_errors_pre=bit_errors_pre,
        coded_bits=int(sent.size),
        bit_errors_post=bit_errors_post,
        info_bits=int(info.size),
        acceptance_ratio=float(np.mean(acceptance)),
        channel_uses=uses,
    )
    logger.debug(
        f"帧 {frame_index} (SNR 序号 {snr_index}): 译码前误比特 {bit_errors_pre}，译码后误比特 {bit_errors_post}"
    )
    return record


async def _run_frames(
    cfg: CampaignConfig,
    snr_index: int,
    indices: Sequence[int],
    executor: Optional[Executor],
) -> List[FrameRecord]:
    loop = asyncio.get_running_loop()
    results: Dict[int, FrameRecord] = {}
    failures: List[Exception] = []

    async def _handle(frame_index: int) -> None:
        if executor is None:
            results[frame_index] = run_frame(cfg, frame_index, snr_index)
        else:
            results[frame_index] = await loop.run_in_executor(executor, run_frame, cfg, frame_index, snr_index)

    async def _on_error(exc: Exception, frame_index: int) -> None:
        logger.error(f"帧 {frame_index} 仿真失败: {exc}", exc_info=exc)
        failures.append(exc)

    queue = FrameQueue(_handle, workers=cfg.workers, error_handler=_on_error)
    await queue.start()
    for frame_index in indices:
        await queue.enqueue(frame_index)
    await queue.join()
    await queue.stop()

    if failures:
        raise CampaignError(f"{len(failures)} 个帧仿真失败: {failures[0]}") from failures[0]
    return [results[i] for i in indices]


def _run_point(cfg: CampaignConfig, snr_index: int, executor: Optional[Executor]) -> List[FrameRecord]:
    """
    运行单个信噪比点

    设置了 target_frame_errors 时，在累计误帧数首次达到目标的帧处截止；
    按帧序号判定，与并行度无关。
    """
    batch = max(16, 4 * cfg.workers)
    records: List[FrameRecord] = []
    frame_errors = 0
    start = 0
    while start < cfg.frames:
        indices = list(range(start, min(start + batch, cfg.frames)))
        for record in asyncio.run(_run_frames(cfg, snr_index, indices, executor)):
            records.append(record)
            frame_errors += int(record.frame_error)
            if cfg.target_frame_errors and frame_errors >= cfg.target_frame_errors:
                logger.debug(f"SNR 序号 {snr_index} 在第 {record.frame_index} 帧达到目标误帧数")
                return records
        start += batch
    return records


def _ensure_output_writable(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as exc:
        raise CampaignError(f"无法创建输出目录 {directory}: {exc}") from exc
    if not os.access(directory, os.W_OK) or os.path.isdir(path):
        raise CampaignError(f"输出路径不可写: {path}")


def run_campaign(cfg: CampaignConfig) -> CampaignResult:
    """按配置扫描全部信噪比点，写出 CSV 与元数据文件。"""
    from .report import write_metadata, write_results_csv

    cfg.validate()
    _ensure_output_writable(cfg.out)
    logger.info(
        f"开始仿真: {cfg.tx}x{cfg.rx} {cfg.modulation}，检测器 {cfg.sampler.sampler_kind}，"
        f"R={cfg.sampler.iterations}，Ns={cfg.sampler.significant_terms}，T={cfg.sampler.temperature_scale}，"
        f"{len(cfg.snr_db)} 个信噪比点，每点最多 {cfg.frames} 帧"
    )

    result = CampaignResult(config=cfg)
    executor: Optional[Executor] = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    if executor is not None:
        logger.debug(f"已启动 {cfg.workers} 个仿真进程")
    try:
        for snr_index, snr_db in enumerate(cfg.snr_db):
            started = time.perf_counter()
            records = _run_point(cfg, snr_index, executor)
            point = PointResult.from_records(cfg, snr_db, records, time.perf_counter() - started)
            result.points.append(point)
            logger.info(
                f"SNR {point.snr_db} dB: {point.frames} 帧，FER {point.fer}，"
                f"BER(译码前) {point.ber_pre}，BER(译码后) {point.ber_post}，"
                f"接受率 {point.mean_acceptance_ratio}，耗时 {point.seconds}s"
            )
            low, high = EFFICIENT_ACCEPTANCE_BAND
            if cfg.sampler.sampler_kind == "rwma" and not low <= point.mean_acceptance_ratio <= high:
                logger.warning(f"SNR {point.snr_db} dB 的平均接受率 {point.mean_acceptance_ratio} 不在 {low}-{high} 区间")
    finally:
        if executor is not None:
            executor.shutdown()
            logger.debug("仿真进程已关闭")

    write_results_csv(cfg.out, result)
    write_metadata(cfg.out, result)
    logger.info(f"仿真完成，结果已写入 {cfg.out}")
    return result
