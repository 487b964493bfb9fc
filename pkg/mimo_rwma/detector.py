"""
软输出 MIMO 检测器

核心为符号格点上的随机游走 Metropolis 采样（RWMA）：链在最近邻之间游走，
访问过的不同假设按比特取值分组保留似然最大的 Ns 项，用于计算 LLR。
另提供均匀采样基线、穷举精确检测器，以及测试规模的转移矩阵构造。
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp, softmax

from .channel import ChannelUse
from .constants import (
    CHAIN_INITS,
    EXACT_CAP,
    L_MAX,
    SAMPLERS,
    SAMPLING_FLOOR_FRACTION,
    TRANSITION_MATRIX_CAP,
)
from .constellation import (
    Constellation,
    SymbolVector,
    all_symbol_vectors,
    neighbors,
    random_neighbor,
    random_symbol_vector,
    symbol_vector_bits,
    symbol_vector_to_signal,
)
from .log import logger
from .numerics import ComplexVec, RngStream, squared_norm


class DetectorError(ValueError):
    """检测器参数错误。"""


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int = 200
    significant_terms: int = 1
    temperature_scale: float = 10.0
    sampler_kind: str = "rwma"
    init: str = "zero_forcing"
    exact_cap: int = EXACT_CAP

    def __post_init__(self) -> None:
        if self.sampler_kind not in SAMPLERS:
            raise DetectorError(f"不支持的检测器: {self.sampler_kind}")
        if self.iterations < 1:
            raise DetectorError("迭代次数必须大于0")
        # Ns = 0 仅对精确检测器有意义，表示对全部项求和
        min_terms = 0 if self.sampler_kind == "exact" else 1
        if self.significant_terms < min_terms:
            raise DetectorError(f"显著项数不能小于{min_terms}")
        if self.temperature_scale < 1:
            raise DetectorError("温度系数不能小于1")
        if self.init not in CHAIN_INITS:
            raise DetectorError(f"不支持的初始化方式: {self.init}")


@dataclass
class ChainState:
    """马尔可夫链状态，缓存当前残差 y - H·signal(current) 与温度化对数目标。"""

    current: SymbolVector
    current_log_target: float
    residual: ComplexVec
    accept_count: int = 0
    step_count: int = 0

    def check_consistency(self, use: ChannelUse, c: Constellation, temperature: float) -> None:
        expected = log_target(use, self.current, c, temperature)
        if not math.isclose(self.current_log_target, expected, rel_tol=1e-9, abs_tol=1e-9):
            raise DetectorError(
                f"链缓存不一致: 缓存 {self.current_log_target}，重新计算 {expected}"
            )


class BestList:
    """
    显著项列表

    对每个 (m, k, b) 保存比特 b_{m,k} = b 的不同已访问假设中似然最大的 Ns 项，
    降序排列。存储的是未温度化的对数似然。ns = 0 表示保留全部项。
    """

    def __init__(self, antennas: int, bits_per_symbol: int, ns: int) -> None:
        self.antennas = antennas
        self.bits_per_symbol = bits_per_symbol
        self.ns = ns
        self._seen: Dict[SymbolVector, int] = {}
        self._ll: List[float] = []
        self._bits: List[npt.NDArray[np.int8]] = []
        self._terms: Optional[Dict[Tuple[int, int, int], Tuple[float, ...]]] = None

    @classmethod
    def from_arrays(cls, ll: np.ndarray, bits: np.ndarray, ns: int) -> "BestList":
        """由全部假设的对数似然 (V,) 与比特 (V, M, K) 直接构造。"""
        best = cls(bits.shape[1], bits.shape[2], ns)
        best._terms = best._build_terms(np.asarray(ll, dtype=np.float64), bits)
        return best

    @classmethod
    def from_terms(
        cls,
        terms: Dict[Tuple[int, int, int], Tuple[float, ...]],
        antennas: int,
        bits_per_symbol: int,
        ns: int,
    ) -> "BestList":
        best = cls(antennas, bits_per_symbol, ns)
        best._terms = {
            (m, k, b): tuple(sorted(terms.get((m, k, b), ()), reverse=True)[: ns or None])
            for m in range(antennas)
            for k in range(bits_per_symbol)
            for b in (0, 1)
        }
        return best

    @property
    def visited_distinct(self) -> int:
        return len(self._seen)

    def __contains__(self, s: SymbolVector) -> bool:
        return s in self._seen

    def offer(self, s: SymbolVector, ll: float, bits: npt.NDArray[np.int8]) -> bool:
        """登记一个已访问假设，重复访问只计一次。返回是否为新假设。"""
        if s in self._seen:
            return False
        self._seen[s] = len(self._ll)
        self._ll.append(float(ll))
        self._bits.append(bits)
        self._terms = None
        return True

    def terms(self, m: int, k: int, b: int) -> Tuple[float, ...]:
        if self._terms is None:
            if self._ll:
                self._terms = self._build_terms(np.array(self._ll), np.stack(self._bits))
            else:
                self._terms = self._build_terms(
                    np.zeros(0), np.zeros((0, self.antennas, self.bits_per_symbol), dtype=np.int8)
                )
        return self._terms[(m, k, b)]

    def _build_terms(self, ll: np.ndarray, bits: np.ndarray) -> Dict[Tuple[int, int, int], Tuple[float, ...]]:
        order = np.argsort(-ll, kind="stable")
        ll_sorted = ll[order]
        bits_sorted = bits[order]
        limit = self.ns or None
        terms: Dict[Tuple[int, int, int], Tuple[float, ...]] = {}
        for m in range(self.antennas):
            for k in range(self.bits_per_symbol):
                column = bits_sorted[:, m, k]
                for b in (0, 1):
                    terms[(m, k, b)] = tuple(ll_sorted[column == b][:limit].tolist())
        return terms


@dataclass(frozen=True, eq=False)
class LlrFrame:
    llr: npt.NDArray[np.float64]
    acceptance_ratio: float
    visited_distinct: int
    sampler: str = "rwma"

    def hard_bits(self) -> npt.NDArray[np.int8]:
        return (self.llr > 0).astype(np.int8)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LlrFrame):
            return NotImplemented
        return (
            np.array_equal(self.llr, other.llr)
            and self.acceptance_ratio == other.acceptance_ratio
            and self.visited_distinct == other.visited_distinct
            and self.sampler == other.sampler
        )


def log_likelihood(use: ChannelUse, s: SymbolVector, c: Constellation) -> float:
    """-||y - H·signal(s)||^2 / sigma2，省略常数项。"""
    residual = use.y - use.H @ symbol_vector_to_signal(c, s)
    return -squared_norm(residual) / use.sigma2


def sampling_variance(use: ChannelUse, c: Constellation, temperature: float) -> float:
    """
    采样用的噪声方差 T·max(sigma2, 下限)

    下限为最强一列上单步最近邻移动的能量乘以 SAMPLING_FLOOR_FRACTION，
    与信道整体缩放无关。sigma2 趋于 0 时链仍以有限概率离开当前状态。
    """
    if temperature < 1:
        raise DetectorError("温度系数不能小于1")
    spacing = 2.0 / c.scale
    column_energy = float(np.max(np.sum(np.abs(use.H) ** 2, axis=0), initial=0.0))
    floor = SAMPLING_FLOOR_FRACTION * spacing**2 * column_energy
    return temperature * max(use.sigma2, floor)


def log_target(use: ChannelUse, s: SymbolVector, c: Constellation, temperature: float) -> float:
    """温度化目标：-||y - H·signal(s)||^2 / sampling_variance，下限未生效时即 log_likelihood / T。"""
    variance = sampling_variance(use, c, temperature)
    residual = use.y - use.H @ symbol_vector_to_signal(c, s)
    return -squared_norm(residual) / variance


def _check_use(use: ChannelUse, c: Constellation) -> None:
    if use.sigma2 <= 0:
        raise DetectorError("检测要求噪声方差大于0")
    if use.y.shape[0] != use.H.shape[0]:
        raise DetectorError(f"接收向量长度 {use.y.shape[0]} 与信道行数 {use.H.shape[0]} 不一致")


def _slice_to_lattice(c: Constellation, estimate: ComplexVec) -> SymbolVector:
    """把每根天线的复数估计就近量化到格点坐标，越界时取边缘点。"""

    def _slice(value: float) -> int:
        index = int(np.rint((value * c.scale + (c.side - 1)) / 2.0))
        return min(max(index, 0), c.side - 1)

    return SymbolVector(tuple((_slice(x.real), _slice(x.imag)) for x in estimate))


def _matched_filter_start(use: ChannelUse, c: Constellation) -> SymbolVector:
    """对 H^H y 按天线归一化后就近量化到格点，不求逆。"""
    z = use.H.conj().T @ use.y
    gains = np.sum(np.abs(use.H) ** 2, axis=0)
    return _slice_to_lattice(c, z / np.where(gains > 0, gains, 1.0))


def _zero_forcing_start(use: ChannelUse, c: Constellation) -> SymbolVector:
    """最小二乘解 argmin ||y - Hx|| 就近量化到格点；N < M 时取最小范数解。"""
    estimate, *_ = np.linalg.lstsq(use.H, use.y, rcond=None)
    return _slice_to_lattice(c, estimate)


_STARTS: Dict[str, Callable[[ChannelUse, Constellation], SymbolVector]] = {
    "zero_forcing": _zero_forcing_start,
    "matched_filter": _matched_filter_start,
}


def init_chain(use: ChannelUse, c: Constellation, temperature: float, start: SymbolVector) -> ChainState:
    residual = use.y - use.H @ symbol_vector_to_signal(c, start)
    return ChainState(
        current=start,
        current_log_target=-squared_norm(residual) / sampling_variance(use, c, temperature),
        residual=residual,
    )


def metropolis_step(
    chain: ChainState,
    use: ChannelUse,
    c: Constellation,
    temperature: float,
    rng: RngStream,
    best: Optional[BestList] = None,
) -> ChainState:
    """
    执行一步 Metropolis 更新（原地修改并返回 chain）

    从当前状态的最近邻中均匀抽取 S'，以 min(1, exp(log_target(S') - log_target(S)))
    接受。只有被改动的天线参与残差更新，复杂度 O(N)。
    被评估过的 S'（无论接受与否）以未温度化的似然登记到 best。
    """
    m, proposal = random_neighbor(c, chain.current, rng)
    old = c.points[chain.current.coords[m]]
    new = c.points[proposal.coords[m]]
    residual = chain.residual - use.H[:, m] * (new - old)
    proposal_target = -squared_norm(residual) / sampling_variance(use, c, temperature)

    delta = proposal_target - chain.current_log_target
    accepted = delta >= 0 or rng.random() < math.exp(delta)
    if accepted:
        chain.current = proposal
        chain.current_log_target = proposal_target
        chain.residual = residual
        chain.accept_count += 1
    chain.step_count += 1

    if best is not None and proposal not in best:
        best.offer(proposal, log_likelihood(use, proposal, c), symbol_vector_bits(c, proposal))
    return chain


def compute_llr(best: BestList, ns: int) -> npt.NDArray[np.float64]:
    """
    由显著项计算 M×K 的 LLR

    L = logsumexp(b=1 的前 Ns 项) - logsumexp(b=0 的前 Ns 项)；Ns = 1 即 max-log-MAP。
    一侧为空时截断为 ±L_MAX，两侧都为空时为 0。
    """
    limit = ns or None
    llr = np.zeros((best.antennas, best.bits_per_symbol), dtype=np.float64)
    for m in range(best.antennas):
        for k in range(best.bits_per_symbol):
            ones = best.terms(m, k, 1)[:limit]
            zeros = best.terms(m, k, 0)[:limit]
            if ones and zeros:
                llr[m, k] = float(logsumexp(ones) - logsumexp(zeros))
            elif ones:
                llr[m, k] = L_MAX
            elif zeros:
                llr[m, k] = -L_MAX
    return llr


def run_rwma(
    use: ChannelUse,
    c: Constellation,
    cfg: SamplerConfig,
    rng: RngStream,
    *,
    check: bool = False,
) -> LlrFrame:
    """
    随机游走 Metropolis 检测；check=True 时每步校验链缓存。

    起点由 cfg.init 决定，默认为量化后的最小二乘解；random 为均匀随机格点。
    起点与每个被评估的提议都进入显著项列表。
    """
    if cfg.sampler_kind != "rwma":
        raise DetectorError(f"run_rwma 不接受检测器类型 {cfg.sampler_kind}")
    _check_use(use, c)
    temperature = cfg.temperature_scale
    start_of = _STARTS.get(cfg.init)
    start = start_of(use, c) if start_of else random_symbol_vector(c, use.tx, rng)

    best = BestList(use.tx, c.bits_per_symbol, cfg.significant_terms)
    chain = init_chain(use, c, temperature, start)
    best.offer(start, log_likelihood(use, start, c), symbol_vector_bits(c, start))
    for _ in range(cfg.iterations):
        metropolis_step(chain, use, c, temperature, rng, best)
        if check:
            chain.check_consistency(use, c, temperature)

    return LlrFrame(
        llr=compute_llr(best, cfg.significant_terms),
        acceptance_ratio=chain.accept_count / cfg.iterations,
        visited_distinct=best.visited_distinct,
        sampler="rwma",
    )


def run_uniform(use: ChannelUse, c: Constellation, cfg: SamplerConfig, rng: RngStream) -> LlrFrame:
    """均匀采样基线：有放回地抽取 R 个独立均匀符号向量。"""
    if cfg.sampler_kind != "uniform":
        raise DetectorError(f"run_uniform 不接受检测器类型 {cfg.sampler_kind}")
    _check_use(use, c)
    best = BestList(use.tx, c.bits_per_symbol, cfg.significant_terms)
    for _ in range(cfg.iterations):
        s = random_symbol_vector(c, use.tx, rng)
        if s not in best:
            best.offer(s, log_likelihood(use, s, c), symbol_vector_bits(c, s))
    return LlrFrame(
        llr=compute_llr(best, cfg.significant_terms),
        acceptance_ratio=0.0,
        visited_distinct=best.visited_distinct,
        sampler="uniform",
    )


def _lattice_arrays(c: Constellation, antennas: int) -> Tuple[np.ndarray, np.ndarray]:
    """按 all_symbol_vectors 的顺序返回 (信号 (V, M), 比特 (V, M, K))。"""
    index = np.array(np.meshgrid(*[np.arange(c.order)] * antennas, indexing="ij")).reshape(antennas, -1).T
    flat_points = c.points.reshape(-1)
    flat_labels = c.labels.reshape(c.order, c.bits_per_symbol)
    return flat_points[index], flat_labels[index]


def _lattice_squared_residuals(use: ChannelUse, signals: np.ndarray) -> np.ndarray:
    residual = use.y[None, :] - signals @ use.H.T
    return np.sum(residual.real**2 + residual.imag**2, axis=1)


def _lattice_log_likelihood(use: ChannelUse, signals: np.ndarray) -> np.ndarray:
    return -_lattice_squared_residuals(use, signals) / use.sigma2


def _lattice_log_target(use: ChannelUse, c: Constellation, signals: np.ndarray, temperature: float) -> np.ndarray:
    return -_lattice_squared_residuals(use, signals) / sampling_variance(use, c, temperature)


def run_exact(use: ChannelUse, c: Constellation, ns: int, *, cap: int = EXACT_CAP) -> LlrFrame:
    """
    穷举全部 order^M 个假设

    ns = 0 时对全部项求和（完整 MAP），否则取每组前 ns 项。
    格点规模超过 cap 时拒绝执行。
    """
    _check_use(use, c)
    if ns < 0:
        raise DetectorError("显著项数不能为负数")
    size = c.order**use.tx
    if size > cap:
        raise DetectorError(f"格点规模 {size} 超过上限 {cap}，拒绝穷举")
    signals, bits = _lattice_arrays(c, use.tx)
    best = BestList.from_arrays(_lattice_log_likelihood(use, signals), bits, ns)
    return LlrFrame(
        llr=compute_llr(best, ns),
        acceptance_ratio=0.0,
        visited_distinct=size,
        sampler="exact",
    )


def tempered_target(use: ChannelUse, c: Constellation, temperature: float) -> npt.NDArray[np.float64]:
    """按 all_symbol_vectors 顺序返回归一化的温度化目标分布。"""
    signals, _ = _lattice_arrays(c, use.tx)
    return softmax(_lattice_log_target(use, c, signals, temperature))


def build_transition_matrix(use: ChannelUse, c: Constellation, temperature: float) -> npt.NDArray[np.float64]:
    """
    构造 RWMA 的显式转移矩阵 Q

    Q[i, j] = min(1, rho_j / rho_i) / |neighbors| （j 为 i 的邻居），
    对角元为 1 - 行和。仅用于测试规模。
    """
    size = c.order**use.tx
    if size > TRANSITION_MATRIX_CAP:
        raise DetectorError(f"格点规模 {size} 超过转移矩阵上限 {TRANSITION_MATRIX_CAP}")
    states = all_symbol_vectors(c, use.tx)
    index = {s: pos for pos, s in enumerate(states)}
    signals, _ = _lattice_arrays(c, use.tx)
    target = _lattice_log_target(use, c, signals, temperature)

    Q = np.zeros((size, size), dtype=np.float64)
    for i, s in enumerate(states):
        nbrs = neighbors(c, s)
        for nb in nbrs:
            j = index[nb]
            Q[i, j] = math.exp(min(0.0, target[j] - target[i])) / len(nbrs)
        Q[i, i] = 1.0 - Q[i].sum()
    return Q


def _run_exact_with_config(use: ChannelUse, c: Constellation, cfg: SamplerConfig, rng: RngStream) -> LlrFrame:
    return run_exact(use, c, cfg.significant_terms, cap=cfg.exact_cap)


_DETECTORS: Dict[str, Callable[[ChannelUse, Constellation, SamplerConfig, RngStream], LlrFrame]] = {
    "rwma": run_rwma,
    "uniform": run_uniform,
    "exact": _run_exact_with_config,
}


def detect(use: ChannelUse, c: Constellation, cfg: SamplerConfig, rng: RngStream) -> LlrFrame:
    detector = _DETECTORS.get(cfg.sampler_kind)
    if not detector:
        raise DetectorError(f"不支持的检测器: {cfg.sampler_kind}")
    frame = detector(use, c, cfg, rng)
    logger.debug(
        f"{cfg.sampler_kind} 检测完成: 接受率 {frame.acceptance_ratio:.3f}，不同假设 {frame.visited_distinct}"
    )
    return frame
