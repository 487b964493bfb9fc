import numpy as np
import pytest

from mimo_rwma.coding import (
    BitFrame,
    CodeConfig,
    CodingError,
    build_bit_frame,
    conv_encode,
    deinterleave,
    interleave,
    interleaver_permutation,
    pad_bits,
    pin_and_strip_pad,
    viterbi_decode,
)

CODE = CodeConfig()


def _clean_llrs(coded, magnitude=20.0):
    return (2.0 * coded - 1.0) * magnitude


def test_code_config():
    assert CODE.generators == (0o133, 0o171)
    assert CODE.rate == 0.5
    assert CODE.coded_length(512) == 1036
    with pytest.raises(CodingError):
        CodeConfig(generators=(0o133, 0o371))


def test_zero_input_encodes_to_zero():
    coded = conv_encode(CODE, np.zeros(40, dtype=np.int8))
    assert coded.size == 2 * (40 + 6)
    assert not coded.any()


def test_impulse_response_traces_generators():
    coded = conv_encode(CODE, [1])
    assert coded.size == 14
    np.testing.assert_array_equal(coded[0::2], [1, 0, 1, 1, 0, 1, 1])
    np.testing.assert_array_equal(coded[1::2], [1, 1, 1, 1, 0, 0, 1])


def test_encoder_is_linear():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = rng.integers(0, 2, 100)
        b = rng.integers(0, 2, 100)
        np.testing.assert_array_equal(conv_encode(CODE, a ^ b), conv_encode(CODE, a) ^ conv_encode(CODE, b))


def test_encode_rejects_empty_and_non_binary():
    with pytest.raises(CodingError):
        conv_encode(CODE, [])
    with pytest.raises(CodingError):
        conv_encode(CODE, [0, 2, 1])


def test_noiseless_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(20):
        info = rng.integers(0, 2, 512).astype(np.int8)
        decoded = viterbi_decode(CODE, _clean_llrs(conv_encode(CODE, info)))
        np.testing.assert_array_equal(decoded, info)


def test_single_sign_flip_is_corrected():
    rng = np.random.default_rng(2)
    info = rng.integers(0, 2, 128).astype(np.int8)
    llrs = _clean_llrs(conv_encode(CODE, info))
    for pos in range(llrs.size):
        flipped = llrs.copy()
        flipped[pos] = -flipped[pos]
        np.testing.assert_array_equal(viterbi_decode(CODE, flipped), info)


def test_all_zero_llrs_decode_without_error():
    decoded = viterbi_decode(CODE, np.zeros(CODE.coded_length(64)))
    assert decoded.shape == (64,)
    assert set(np.unique(decoded)) <= {0, 1}


def test_ties_keep_predecessor_with_low_bit_zero():
    # 全零 LLR 时每一步两条入径度量相等，幸存路径始终来自低位为 0 的前驱
    np.testing.assert_array_equal(viterbi_decode(CODE, np.zeros(CODE.coded_length(64))), np.zeros(64))
    open_code = CodeConfig(terminated=False)
    np.testing.assert_array_equal(viterbi_decode(open_code, np.zeros(open_code.coded_length(20))), np.zeros(20))


def test_viterbi_length_errors():
    with pytest.raises(CodingError):
        viterbi_decode(CODE, np.zeros(7))
    with pytest.raises(CodingError):
        viterbi_decode(CODE, np.zeros(12))


def test_noisy_soft_decoding():
    rng = np.random.default_rng(3)
    info = rng.integers(0, 2, 512).astype(np.int8)
    coded = conv_encode(CODE, info)
    # BPSK 经 AWGN 后的 LLR，Eb/N0 = 4 dB
    sigma2 = 1.0 / (2 * 0.5 * 10 ** 0.4)
    rx = (2.0 * coded - 1.0) + np.sqrt(sigma2) * rng.standard_normal(coded.size)
    decoded = viterbi_decode(CODE, 2.0 * rx / sigma2)
    assert np.mean(decoded != info) < 0.01


def test_interleaver_inverse_pair():
    rng = np.random.default_rng(4)
    frame = build_bit_frame(CODE, rng.integers(0, 2, 64), 17)
    sent = interleave(frame)
    restored = deinterleave(sent.astype(np.float64), frame.permutation)
    np.testing.assert_array_equal(restored, frame.coded_bits)


def test_identity_permutation_leaves_bits_unchanged():
    info = np.array([1, 0, 1, 1], dtype=np.int8)
    coded = conv_encode(CODE, info)
    frame = BitFrame(info_bits=info, coded_bits=coded, permutation=np.arange(coded.size))
    np.testing.assert_array_equal(interleave(frame), coded)


def test_interleaver_reproducible_and_bijective():
    a = interleaver_permutation(1036, 99)
    b = interleaver_permutation(1036, 99)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(np.sort(a), np.arange(1036))
    assert not np.array_equal(a, interleaver_permutation(1036, 100))


def test_deinterleave_length_mismatch():
    with pytest.raises(CodingError):
        deinterleave(np.zeros(5), np.arange(6))
    with pytest.raises(CodingError):
        deinterleave(np.zeros(3), np.array([0, 0, 1]))


def test_pad_and_pin():
    padded, n_pad = pad_bits(np.ones(1036, dtype=np.int8), 12)
    assert padded.size == 1044
    assert n_pad == 8
    assert not padded[1036:].any()

    llrs = np.full(1044, 5.0)
    stripped = pin_and_strip_pad(llrs, n_pad)
    assert stripped.size == 1036
    assert np.all(stripped == 5.0)
    assert np.all(llrs == 5.0)

    _, none = pad_bits(np.ones(24, dtype=np.int8), 12)
    assert none == 0
    assert pin_and_strip_pad(np.zeros(24), 0).size == 24
    with pytest.raises(CodingError):
        pin_and_strip_pad(np.zeros(4), 5)


@pytest.mark.slow
def test_round_trip_many_frames():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        info = rng.integers(0, 2, 512).astype(np.int8)
        np.testing.assert_array_equal(viterbi_decode(CODE, _clean_llrs(conv_encode(CODE, info))), info)
