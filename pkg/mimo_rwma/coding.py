"""码率 1/2 卷积编码、交织与软输入维特比译码。"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from .constants import CODE_GENERATORS, CONSTRAINT_LENGTH, L_MAX
from .numerics import RngStream

Bits = npt.NDArray[np.int8]


class CodingError(ValueError):
    """编码或译码参数错误。"""


@dataclass(frozen=True)
class CodeConfig:
    generators: Tuple[int, int] = CODE_GENERATORS
    constraint_length: int = CONSTRAINT_LENGTH
    terminated: bool = True

    def __post_init__(self) -> None:
        if len(self.generators) != 2:
            raise CodingError("只支持码率 1/2（两个生成多项式）")
        limit = 1 << self.constraint_length
        for g in self.generators:
            if not 0 < g < limit:
                raise CodingError(f"生成多项式 {oct(g)} 超出约束长度 {self.constraint_length}")

    @property
    def rate(self) -> float:
        return 0.5

    @property
    def memory(self) -> int:
        return self.constraint_length - 1

    def coded_length(self, info_length: int) -> int:
        tail = self.memory if self.terminated else 0
        return 2 * (info_length + tail)


@dataclass(frozen=True, eq=False)
class BitFrame:
    info_bits: Bits
    coded_bits: Bits
    permutation: npt.NDArray[np.int64] = field(repr=False)


def _parity(value: int) -> int:
    return bin(value).count("1") & 1


def _trellis(cfg: CodeConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    预计算网格

    移位寄存器 reg = (输入 << memory) | state，当前输入占生成多项式最高位，
    下一状态为 reg >> 1。返回 outputs[state, bit, j] 与 next_state[state, bit]。
    """
    memory = cfg.memory
    n_states = 1 << memory
    outputs = np.zeros((n_states, 2, 2), dtype=np.int8)
    next_state = np.zeros((n_states, 2), dtype=np.int64)
    for state in range(n_states):
        for bit in (0, 1):
            reg = (bit << memory) | state
            for j, g in enumerate(cfg.generators):
                outputs[state, bit, j] = _parity(reg & g)
            next_state[state, bit] = reg >> 1
    return outputs, next_state


def _as_bits(bits: Sequence[int]) -> Bits:
    arr = np.asarray(bits, dtype=np.int8).ravel()
    if np.any((arr != 0) & (arr != 1)):
        raise CodingError("比特序列只能包含 0 或 1")
    return arr


def conv_encode(cfg: CodeConfig, info: Sequence[int]) -> Bits:
    """前馈卷积编码，每个输入比特依次输出 g0、g1 两位；终止时追加 memory 个 0。"""
    data = _as_bits(info)
    if data.size == 0:
        raise CodingError("信息比特不能为空")
    if cfg.terminated:
        data = np.concatenate([data, np.zeros(cfg.memory, dtype=np.int8)])
    outputs, next_state = _trellis(cfg)
    coded = np.empty(2 * data.size, dtype=np.int8)
    state = 0
    for t, bit in enumerate(data):
        coded[2 * t : 2 * t + 2] = outputs[state, bit]
        state = int(next_state[state, bit])
    return coded


def interleaver_permutation(length: int, seed: Union[RngStream, int]) -> npt.NDArray[np.int64]:
    """按种子生成均匀随机置换；同一种子结果可复现。"""
    if length < 1:
        raise CodingError("交织长度必须大于0")
    rng = seed if isinstance(seed, RngStream) else RngStream(int(seed))
    return rng.generator.permutation(length).astype(np.int64)


def build_bit_frame(cfg: CodeConfig, info: Sequence[int], seed: Union[RngStream, int]) -> BitFrame:
    info_bits = _as_bits(info)
    coded = conv_encode(cfg, info_bits)
    return BitFrame(
        info_bits=info_bits,
        coded_bits=coded,
        permutation=interleaver_permutation(coded.size, seed),
    )


def _check_permutation(permutation: np.ndarray, length: int) -> None:
    if permutation.size != length:
        raise CodingError(f"置换长度 {permutation.size} 与数据长度 {length} 不一致")
    if not np.array_equal(np.sort(permutation), np.arange(length)):
        raise CodingError("置换不是双射")


def interleave(frame: BitFrame) -> Bits:
    """交织后第 t 位为 coded[permutation[t]]。"""
    _check_permutation(frame.permutation, frame.coded_bits.size)
    return frame.coded_bits[frame.permutation]


def deinterleave(llrs: Sequence[float], permutation: npt.NDArray[np.int64]) -> npt.NDArray[np.float64]:
    values = np.asarray(llrs, dtype=np.float64)
    _check_permutation(np.asarray(permutation), values.size)
    restored = np.empty_like(values)
    restored[permutation] = values
    return restored


def pad_bits(bits: Sequence[int], multiple: int) -> Tuple[Bits, int]:
    """补零到 multiple 的整数倍，返回 (补齐后的比特, 补零个数)。"""
    data = _as_bits(bits)
    n_pad = (-data.size) % multiple
    return np.concatenate([data, np.zeros(n_pad, dtype=np.int8)]), n_pad


def pin_and_strip_pad(llrs: Sequence[float], n_pad: int) -> npt.NDArray[np.float64]:
    """接收端已知补零位：先把对应 LLR 固定为 -L_MAX，再去掉。"""
    values = np.array(llrs, dtype=np.float64)
    if n_pad < 0 or n_pad > values.size:
        raise CodingError(f"补零个数 {n_pad} 无效")
    if n_pad:
        values[values.size - n_pad :] = -L_MAX
    return values[: values.size - n_pad]


def viterbi_decode(cfg: CodeConfig, llrs: Sequence[float]) -> Bits:
    """
    最大对数度量维特比译码

    Args:
        cfg: 编码配置
        llrs: 编码比特的 LLR，L > 0 表示比特 1 更可能

    Returns:
        信息比特（已去掉尾比特）

    分支度量为 sum (2c - 1)·L/2，取最大路径。度量相等时保留被移出最低位为 0 的前驱
    （pred0，序号较小者），不终止时末状态取序号最小者；终止码从全零状态回溯。
    """
    values = np.asarray(llrs, dtype=np.float64).ravel()
    if values.size == 0 or values.size % 2:
        raise CodingError(f"LLR 长度 {values.size} 不是正偶数")
    steps = values.size // 2
    tail = cfg.memory if cfg.terminated else 0
    if steps <= tail:
        raise CodingError("LLR 长度不足以包含尾比特")

    memory = cfg.memory
    n_states = 1 << memory
    outputs, _ = _trellis(cfg)

    # 每个下一状态 ns 的输入比特为其最高位，两个前驱只差被移出的最低位
    ns = np.arange(n_states)
    in_bit = ns >> (memory - 1)
    pred0 = (ns << 1) & (n_states - 1)
    pred1 = pred0 | 1
    signs0 = 2.0 * outputs[pred0, in_bit] - 1.0  # (n_states, 2)
    signs1 = 2.0 * outputs[pred1, in_bit] - 1.0

    pairs = values.reshape(steps, 2) / 2.0
    metric = np.full(n_states, -np.inf)
    metric[0] = 0.0
    choose1 = np.zeros((steps, n_states), dtype=bool)
    for t in range(steps):
        cand0 = metric[pred0] + signs0 @ pairs[t]
        cand1 = metric[pred1] + signs1 @ pairs[t]
        pick = cand1 > cand0
        choose1[t] = pick
        metric = np.where(pick, cand1, cand0)

    state = 0 if cfg.terminated else int(np.argmax(metric))
    decoded = np.empty(steps, dtype=np.int8)
    for t in range(steps - 1, -1, -1):
        decoded[t] = state >> (memory - 1)
        state = int(pred1[state] if choose1[t, state] else pred0[state])
    return decoded[: steps - tail]
