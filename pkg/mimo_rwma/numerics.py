"""复数向量/矩阵运算与可复现随机源。"""

from __future__ import annotations

from typing import Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

ComplexVec = npt.NDArray[np.complex128]
ComplexMat = npt.NDArray[np.complex128]


class NumericsError(ValueError):
    """数值运算参数错误。"""


class RngStream:
    """按 (seed, stream_id) 确定的随机流。

    底层使用计数器型 Philox 生成器，同一 (seed, stream_id) 在任意进程、
    任意并行度下都产生相同序列。stream_id 可以是整数或整数元组。
    """

    def __init__(self, seed: int, stream_id: Union[int, Tuple[int, ...]] = 0) -> None:
        if seed < 0:
            raise NumericsError("随机种子不能为负数")
        key = stream_id if isinstance(stream_id, tuple) else (stream_id,)
        if any(part < 0 for part in key):
            raise NumericsError("stream_id 不能为负数")
        self.seed = int(seed)
        self.stream_id: Tuple[int, ...] = tuple(int(part) for part in key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream_id)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def child(self, *key: int) -> "RngStream":
        """派生一个独立子流，用于帧内的不同用途。"""
        return RngStream(self.seed, self.stream_id + tuple(key))

    def random(self) -> float:
        return float(self.generator.random())

    def integers(self, high: int, size: Optional[int] = None):
        return self.generator.integers(0, high, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def as_complex_vec(values) -> ComplexVec:
    vec = np.asarray(values, dtype=np.complex128)
    if vec.ndim != 1:
        raise NumericsError(f"需要一维复向量，实际维度为 {vec.ndim}")
    return vec


def as_complex_mat(values) -> ComplexMat:
    mat = np.asarray(values, dtype=np.complex128)
    if mat.ndim != 2:
        raise NumericsError(f"需要二维复矩阵，实际维度为 {mat.ndim}")
    return mat


def mat_vec_mul(H: ComplexMat, s: ComplexVec) -> ComplexVec:
    """计算 Hs，列数与向量长度不一致时报错。"""
    H = as_complex_mat(H)
    s = as_complex_vec(s)
    if H.shape[1] != s.shape[0]:
        raise NumericsError(f"矩阵列数 {H.shape[1]} 与向量长度 {s.shape[0]} 不一致")
    return H @ s


def squared_norm(v) -> float:
    """返回 sum |v_i|^2。"""
    arr = np.asarray(v, dtype=np.complex128)
    return float(np.sum(arr.real**2 + arr.imag**2))


def sample_complex_gaussian(rng: RngStream, variance: float, size=None):
    """
    采样圆对称复高斯变量

    Args:
        rng: 随机流
        variance: E|z|^2，实部与虚部各占一半
        size: None 返回单个复数，否则返回对应形状的数组

    Returns:
        复数或复数组
    """
    if variance < 0:
        raise NumericsError("方差不能为负数")
    scale = np.sqrt(variance / 2.0)
    real = rng.generator.standard_normal(size)
    imag = rng.generator.standard_normal(size)
    z = scale * (real + 1j * imag)
    if size is None:
        return complex(z)
    return np.asarray(z, dtype=np.complex128)
