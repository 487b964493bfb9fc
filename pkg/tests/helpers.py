"""测试用的信道构造工具。"""

import numpy as np

from mimo_rwma.channel import ChannelUse, transmit
from mimo_rwma.constellation import random_symbol_vector
from mimo_rwma.numerics import RngStream, sample_complex_gaussian


def random_use(c, tx, rx, sigma2, seed, stream=0) -> ChannelUse:
    """随机瑞利信道上的一次传输。"""
    rng = RngStream(seed, stream)
    s = random_symbol_vector(c, tx, rng)
    H = sample_complex_gaussian(rng, 1.0, size=(rx, tx))
    return transmit(c, s, H, sigma2, rng)


def unitary_use(c, tx, sigma2, seed) -> ChannelUse:
    """列正交信道：似然沿每个坐标轴单峰，爬山必达全局最优。"""
    rng = RngStream(seed)
    G = sample_complex_gaussian(rng, 1.0, size=(tx, tx))
    Q, _ = np.linalg.qr(G)
    s = random_symbol_vector(c, tx, rng)
    return transmit(c, s, Q, sigma2, rng)
