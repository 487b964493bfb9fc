"""i.i.d. 瑞利平坦衰落 MIMO 信道、加性噪声与信噪比换算。"""

from __future__ import annotations

from dataclasses import dataclass

from .constellation import Constellation, SymbolVector, symbol_vector_to_signal
from .numerics import (
    ComplexMat,
    ComplexVec,
    NumericsError,
    RngStream,
    mat_vec_mul,
    sample_complex_gaussian,
)


class ChannelError(ValueError):
    """信道参数错误。"""


@dataclass(frozen=True, eq=False)
class ChannelUse:
    """一次信道使用的观测 (y, H, sigma2)，truth 仅用于统计。"""

    y: ComplexVec
    H: ComplexMat
    sigma2: float
    truth: SymbolVector

    @property
    def rx(self) -> int:
        return self.H.shape[0]

    @property
    def tx(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True)
class SnrPoint:
    ebn0_db: float
    sigma2: float

    @classmethod
    def from_ebn0(cls, ebn0_db: float, tx: int, bits_per_symbol: int, code_rate: float) -> "SnrPoint":
        return cls(ebn0_db=ebn0_db, sigma2=ebn0_to_sigma2(ebn0_db, tx, bits_per_symbol, code_rate))


def sample_channel(rng: RngStream, rx: int, tx: int) -> ComplexMat:
    """每次信道使用重新抽取 N×M 信道，元素 E|h|^2 = 1。"""
    if rx < 1 or tx < 1:
        raise ChannelError("天线数必须大于0")
    return sample_complex_gaussian(rng, 1.0, size=(rx, tx))


def transmit(
    c: Constellation,
    s: SymbolVector,
    H: ComplexMat,
    sigma2: float,
    rng: RngStream,
) -> ChannelUse:
    """y = H·signal(s) + n。"""
    if sigma2 < 0:
        raise ChannelError("噪声方差不能为负数")
    try:
        clean = mat_vec_mul(H, symbol_vector_to_signal(c, s))
    except NumericsError as exc:
        raise ChannelError(f"信道维度不匹配: {exc}") from exc
    noise = sample_complex_gaussian(rng, sigma2, size=clean.shape[0])
    return ChannelUse(y=clean + noise, H=H, sigma2=float(sigma2), truth=s)


def ebn0_to_sigma2(ebn0_db: float, tx: int, bits_per_symbol: int, code_rate: float) -> float:
    """
    Eb/N0 (dB) 换算为噪声方差

    每根接收天线的信号功率为 M（单位能量符号、单位方差信道），
    每条数据流 Eb = Es / (code_rate·K)，故 sigma2 = M / (code_rate·K·10^(dB/10))。
    """
    if tx < 1 or bits_per_symbol < 1:
        raise ChannelError("天线数与每符号比特数必须大于0")
    if not 0 < code_rate <= 1:
        raise ChannelError(f"码率必须在 (0, 1] 内，实际为 {code_rate}")
    return tx / (code_rate * bits_per_symbol * 10.0 ** (ebn0_db / 10.0))
