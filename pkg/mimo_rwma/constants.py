"""
MIMO 仿真常量定义
包含调制方式、检测器、编码及输出格式等常量
"""

# 支持的调制方式
MODULATIONS = ["qam16", "qpsk"]

# 检测器类型
SAMPLERS = ["rwma", "uniform", "exact"]

# 马尔可夫链初始化方式
CHAIN_INITS = ["zero_forcing", "random", "matched_filter"]

# 缺失假设时的 LLR 截断值（自然对数单位）
L_MAX = 30.0

# 精确检测器允许枚举的最大格点数
EXACT_CAP = 65536

# 采样噪声方差下限：最强一列上单步移动能量的比例
SAMPLING_FLOOR_FRACTION = 0.1

# 转移矩阵构造只用于测试规模
TRANSITION_MATRIX_CAP = 4096

# 卷积码参数 G = [133, 171]（八进制）
CODE_GENERATORS = (0o133, 0o171)
CONSTRAINT_LENGTH = 7

# 效率较高的接受率区间
EFFICIENT_ACCEPTANCE_BAND = (0.4, 0.7)

# 仿真默认值
DEFAULTS = {
    "tx": 3,
    "rx": 3,
    "modulation": "qam16",
    "snr_db": [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
    "frames": 300,
    "sampler": "rwma",
    "iters": 200,
    "ns": 1,
    "temp_scale": 10.0,
    "seed": 2024,
    "out": "results.csv",
    "info_bytes": 64,
    "workers": 1,
    "target_frame_errors": 50,
    "sigma2_override": None,
    "init": "zero_forcing",
    "record_timing": True,
    "exact_cap": EXACT_CAP,
}

# 结果 CSV 列顺序
CSV_COLUMNS = [
    "snr_db",
    "sampler",
    "iters",
    "ns",
    "temp_scale",
    "frames",
    "frame_errors",
    "fer",
    "bit_errors_pre",
    "ber_pre",
    "bit_errors_post",
    "ber_post",
    "mean_acceptance_ratio",
    "seconds",
]


def bits_per_symbol(modulation: str) -> int:
    """获取调制方式每个符号承载的比特数"""
    return {"qam16": 4, "qpsk": 2}.get(modulation, 0)


def format_float(value: float) -> str:
    """按 6 位有效数字输出浮点数"""
    return f"{value:.6g}"


def round_float(value: float) -> float:
    """将浮点数舍入到 6 位有效数字，保证 CSV 往返一致"""
    return float(format_float(value))
