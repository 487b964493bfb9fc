"""基于随机游走 Metropolis 采样的软输出 MIMO 检测仿真工具包。"""

from .campaign import CampaignConfig, CampaignResult, PointResult, run_campaign, run_frame
from .channel import ChannelUse, SnrPoint, ebn0_to_sigma2, sample_channel, transmit
from .coding import BitFrame, CodeConfig, conv_encode, deinterleave, interleave, viterbi_decode
from .constellation import Constellation, SymbolVector, build_constellation, neighbors
from .detector import (
    BestList,
    ChainState,
    LlrFrame,
    SamplerConfig,
    build_transition_matrix,
    compute_llr,
    detect,
    run_exact,
    run_rwma,
    run_uniform,
)
from .numerics import RngStream

__version__ = "1.0.0"

__all__ = [
    "BestList",
    "BitFrame",
    "CampaignConfig",
    "CampaignResult",
    "ChainState",
    "ChannelUse",
    "CodeConfig",
    "Constellation",
    "LlrFrame",
    "PointResult",
    "RngStream",
    "SamplerConfig",
    "SnrPoint",
    "SymbolVector",
    "build_constellation",
    "build_transition_matrix",
    "compute_llr",
    "conv_encode",
    "deinterleave",
    "detect",
    "ebn0_to_sigma2",
    "interleave",
    "neighbors",
    "run_campaign",
    "run_exact",
    "run_frame",
    "run_rwma",
    "run_uniform",
    "sample_channel",
    "transmit",
    "viterbi_decode",
]
