"""格雷映射 QAM 星座与符号格点几何。"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .constants import MODULATIONS
from .numerics import ComplexVec, RngStream

Coord = Tuple[int, int]


class ConstellationError(ValueError):
    """星座或符号向量参数错误。"""


@dataclass(frozen=True, eq=False)
class Constellation:
    """正方形格雷映射星座。

    points[i, q] 为格点 (i, q) 的复幅度，labels[i, q] 为其 K 比特标签。
    标签前半部分按格雷序选择 I 轴，后半部分选择 Q 轴，k=0 为最高位。
    """

    name: str
    order: int
    bits_per_symbol: int
    side: int
    points: npt.NDArray[np.complex128]
    labels: npt.NDArray[np.int8]
    scale: float

    def point(self, coord: Coord) -> complex:
        return complex(self.points[coord[0], coord[1]])

    def label(self, coord: Coord) -> Tuple[int, ...]:
        return tuple(int(b) for b in self.labels[coord[0], coord[1]])

    def coords(self) -> Iterator[Coord]:
        return itertools.product(range(self.side), range(self.side))


@dataclass(frozen=True)
class SymbolVector:
    """M 根发射天线上的格点坐标。"""

    coords: Tuple[Coord, ...]

    @classmethod
    def of(cls, coords: Sequence[Sequence[int]]) -> "SymbolVector":
        return cls(tuple((int(i), int(q)) for i, q in coords))

    @property
    def antennas(self) -> int:
        return len(self.coords)

    def replace(self, m: int, coord: Coord) -> "SymbolVector":
        items = list(self.coords)
        items[m] = coord
        return SymbolVector(tuple(items))


def _gray_bits(index: int, width: int) -> List[int]:
    gray = index ^ (index >> 1)
    return [(gray >> (width - 1 - pos)) & 1 for pos in range(width)]


def build_constellation(name: str) -> Constellation:
    """构建归一化（平均能量为 1）的格雷映射星座。"""
    if name not in MODULATIONS:
        raise ConstellationError(f"不支持的调制方式: {name}")
    order = {"qam16": 16, "qpsk": 4}[name]
    side = int(round(np.sqrt(order)))
    bits = int(np.log2(order))
    half = bits // 2

    # 每轴平均能量 (side^2 - 1) / 3，两轴相加
    scale = float(np.sqrt(2.0 * (side * side - 1) / 3.0))
    amplitudes = (2.0 * np.arange(side) - (side - 1)) / scale

    points = amplitudes[:, None] + 1j * amplitudes[None, :]
    labels = np.zeros((side, side, bits), dtype=np.int8)
    for i, q in itertools.product(range(side), range(side)):
        labels[i, q] = _gray_bits(i, half) + _gray_bits(q, half)

    points.setflags(write=False)
    labels.setflags(write=False)
    return Constellation(
        name=name,
        order=order,
        bits_per_symbol=bits,
        side=side,
        points=points,
        labels=labels,
        scale=scale,
    )


def _check_label(c: Constellation, bits: Sequence[int]) -> Tuple[int, ...]:
    label = tuple(int(b) for b in bits)
    if len(label) != c.bits_per_symbol:
        raise ConstellationError(f"标签长度应为 {c.bits_per_symbol}，实际为 {len(label)}")
    if any(b not in (0, 1) for b in label):
        raise ConstellationError("标签只能包含 0 或 1")
    return label


def coord_of_label(c: Constellation, bits: Sequence[int]) -> Coord:
    """标签到格点坐标的逆映射。"""
    label = _check_label(c, bits)
    half = c.bits_per_symbol // 2

    def _axis(part: Sequence[int]) -> int:
        gray = 0
        for b in part:
            gray = (gray << 1) | b
        index = 0
        while gray:
            index ^= gray
            gray >>= 1
        return index

    return (_axis(label[:half]), _axis(label[half:]))


def bits_to_symbol(c: Constellation, bits: Sequence[int]) -> complex:
    return c.point(coord_of_label(c, bits))


def check_symbol_vector(c: Constellation, s: SymbolVector) -> None:
    """坐标必须落在 [0, side) 内，否则抛出 ConstellationError。"""
    for i, q in s.coords:
        if not (0 <= i < c.side and 0 <= q < c.side):
            raise ConstellationError(f"坐标 ({i}, {q}) 超出格点范围 [0, {c.side})")


def neighbors(c: Constellation, s: SymbolVector) -> List[SymbolVector]:
    """
    返回 s 的所有最近邻（周期边界）

    每根天线的 I 或 Q 坐标 ±1 (mod side)。side >= 3 时共 4M 个；
    QPSK 的 side=2 时 ±1 重合，去重后每根天线只有 2 个。
    """
    check_symbol_vector(c, s)
    result: List[SymbolVector] = []
    seen = set()
    for m, (i, q) in enumerate(s.coords):
        for coord in (
            ((i + 1) % c.side, q),
            ((i - 1) % c.side, q),
            (i, (q + 1) % c.side),
            (i, (q - 1) % c.side),
        ):
            candidate = s.replace(m, coord)
            if candidate in seen:
                continue
            seen.add(candidate)
            result.append(candidate)
    return result


def random_neighbor(c: Constellation, s: SymbolVector, rng: RngStream) -> Tuple[int, SymbolVector]:
    """在 neighbors(c, s) 上均匀抽取一个邻居，返回 (改变的天线, 新向量)。

    与对 neighbors 列表均匀取样同分布，但不构造整个列表。
    """
    steps = 4 if c.side >= 3 else 2
    draw = int(rng.integers(s.antennas * steps))
    m, move = divmod(draw, steps)
    i, q = s.coords[m]
    if steps == 2:
        coord = ((i + 1) % c.side, q) if move == 0 else (i, (q + 1) % c.side)
    elif move == 0:
        coord = ((i + 1) % c.side, q)
    elif move == 1:
        coord = ((i - 1) % c.side, q)
    elif move == 2:
        coord = (i, (q + 1) % c.side)
    else:
        coord = (i, (q - 1) % c.side)
    return m, s.replace(m, coord)


def random_symbol_vector(c: Constellation, antennas: int, rng: RngStream) -> SymbolVector:
    raw = rng.integers(c.side, size=(antennas, 2))
    return SymbolVector.of(raw.tolist())


def all_symbol_vectors(c: Constellation, antennas: int) -> List[SymbolVector]:
    """按字典序枚举全部 order^M 个符号向量。"""
    coords = list(c.coords())
    return [SymbolVector(combo) for combo in itertools.product(coords, repeat=antennas)]


def symbol_vector_to_signal(c: Constellation, s: SymbolVector) -> ComplexVec:
    check_symbol_vector(c, s)
    return np.array([c.points[i, q] for i, q in s.coords], dtype=np.complex128)


def symbol_vector_bits(c: Constellation, s: SymbolVector) -> npt.NDArray[np.int8]:
    """返回 M×K 的比特矩阵。"""
    return np.array([c.labels[i, q] for i, q in s.coords], dtype=np.int8)


def bit_of_symbol(c: Constellation, s: SymbolVector, m: int, k: int) -> int:
    if not 0 <= m < s.antennas:
        raise ConstellationError(f"天线序号 {m} 超出范围")
    if not 0 <= k < c.bits_per_symbol:
        raise ConstellationError(f"比特序号 {k} 超出范围")
    i, q = s.coords[m]
    return int(c.labels[i, q, k])


def bits_to_symbol_vector(c: Constellation, bits: Sequence[int]) -> SymbolVector:
    """把 M·K 个比特按天线顺序映射为符号向量。"""
    K = c.bits_per_symbol
    if len(bits) % K:
        raise ConstellationError(f"比特数 {len(bits)} 不是 {K} 的整数倍")
    return SymbolVector(tuple(coord_of_label(c, bits[pos : pos + K]) for pos in range(0, len(bits), K)))
