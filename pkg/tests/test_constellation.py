import itertools
from collections import Counter

import numpy as np
import pytest

from mimo_rwma.constellation import (
    ConstellationError,
    SymbolVector,
    all_symbol_vectors,
    bit_of_symbol,
    bits_to_symbol,
    bits_to_symbol_vector,
    build_constellation,
    coord_of_label,
    neighbors,
    random_neighbor,
    random_symbol_vector,
    symbol_vector_bits,
    symbol_vector_to_signal,
)
from mimo_rwma.numerics import RngStream


def test_qam16_points(qam16):
    assert qam16.order == 16
    assert qam16.bits_per_symbol == 4
    amplitudes = np.array([-3, -1, 1, 3]) / np.sqrt(10)
    np.testing.assert_allclose(np.unique(qam16.points.real), amplitudes, atol=1e-15)
    np.testing.assert_allclose(np.unique(qam16.points.imag), amplitudes, atol=1e-15)
    assert abs(np.mean(np.abs(qam16.points) ** 2) - 1.0) < 1e-12


def test_qpsk_points(qpsk):
    expected = {complex(a, b) / np.sqrt(2) for a in (-1, 1) for b in (-1, 1)}
    got = {complex(p) for p in qpsk.points.reshape(-1)}
    assert len(got) == 4
    for p in got:
        assert min(abs(p - e) for e in expected) < 1e-15
    assert abs(np.mean(np.abs(qpsk.points) ** 2) - 1.0) < 1e-12


def test_unknown_modulation():
    with pytest.raises(ConstellationError):
        build_constellation("qam64")


def test_bits_to_symbol_examples(qam16, qpsk):
    assert abs(bits_to_symbol(qam16, [0, 0, 0, 0]) - (-3 - 3j) / np.sqrt(10)) < 1e-15
    assert abs(bits_to_symbol(qpsk, [0, 0]) - (-1 - 1j) / np.sqrt(2)) < 1e-15
    points = {bits_to_symbol(qam16, bits) for bits in itertools.product((0, 1), repeat=4)}
    assert len(points) == 16


def test_bits_to_symbol_wrong_length(qam16):
    with pytest.raises(ConstellationError):
        bits_to_symbol(qam16, [0, 1, 0])
    with pytest.raises(ConstellationError):
        bits_to_symbol(qam16, [0, 1, 2, 0])


def test_label_round_trip(qam16, qpsk):
    for c in (qam16, qpsk):
        for coord in c.coords():
            assert coord_of_label(c, c.label(coord)) == coord


def test_gray_adjacency(qam16):
    for i, q in qam16.coords():
        if i + 1 < qam16.side:
            diff = np.sum(qam16.labels[i, q] != qam16.labels[i + 1, q])
            assert diff == 1
        if q + 1 < qam16.side:
            diff = np.sum(qam16.labels[i, q] != qam16.labels[i, q + 1])
            assert diff == 1


def test_bits_are_balanced(qam16):
    for k in range(4):
        assert int(qam16.labels[:, :, k].sum()) == 8


def test_bit_of_symbol(qam16):
    coord = coord_of_label(qam16, [1, 0, 1, 1])
    s = SymbolVector.of([(0, 0), coord])
    assert bit_of_symbol(qam16, s, 1, 0) == 1
    assert [bit_of_symbol(qam16, s, 1, k) for k in range(4)] == [1, 0, 1, 1]
    with pytest.raises(ConstellationError):
        bit_of_symbol(qam16, s, 2, 0)
    with pytest.raises(ConstellationError):
        bit_of_symbol(qam16, s, 0, 4)


def test_symbol_vector_to_signal(qam16, qpsk):
    np.testing.assert_allclose(
        symbol_vector_to_signal(qam16, SymbolVector.of([(0, 0)])), [(-3 - 3j) / np.sqrt(10)]
    )
    np.testing.assert_allclose(
        symbol_vector_to_signal(qpsk, SymbolVector.of([(1, 1)])), [(1 + 1j) / np.sqrt(2)]
    )


@pytest.mark.parametrize("coords", [[(4, 0)], [(0, -1)], [(1, 1), (2, 7)]])
def test_out_of_range_symbol_vector_refused(qam16, coords):
    s = SymbolVector.of(coords)
    with pytest.raises(ConstellationError):
        symbol_vector_to_signal(qam16, s)
    with pytest.raises(ConstellationError):
        neighbors(qam16, s)


def test_qpsk_coordinate_two_refused(qpsk):
    with pytest.raises(ConstellationError):
        symbol_vector_to_signal(qpsk, SymbolVector.of([(2, 0)]))


def test_neighbors_count_and_distinct(qam16):
    rng = RngStream(11)
    for _ in range(20):
        s = random_symbol_vector(qam16, 3, rng)
        nbrs = neighbors(qam16, s)
        assert len(nbrs) == 12
        assert len(set(nbrs)) == 12
        assert s not in nbrs


def test_neighbors_wrap_around(qam16):
    s = SymbolVector.of([(0, 2)])
    nbrs = neighbors(qam16, s)
    assert SymbolVector.of([(3, 2)]) in nbrs
    assert set(nbrs) == {
        SymbolVector.of([(1, 2)]),
        SymbolVector.of([(3, 2)]),
        SymbolVector.of([(0, 3)]),
        SymbolVector.of([(0, 1)]),
    }


def test_neighbors_symmetric(qam16):
    for s in all_symbol_vectors(qam16, 1):
        for nb in neighbors(qam16, s):
            assert s in neighbors(qam16, nb)


def test_qpsk_neighbors_deduplicated(qpsk):
    s = SymbolVector.of([(0, 0), (1, 0)])
    nbrs = neighbors(qpsk, s)
    assert len(nbrs) == 4
    assert len(set(nbrs)) == 4
    assert s not in nbrs


def test_random_neighbor_uniform_over_neighbors(qam16):
    rng = RngStream(5)
    s = SymbolVector.of([(0, 1), (2, 3), (3, 0)])
    allowed = set(neighbors(qam16, s))
    counts = Counter()
    for _ in range(12000):
        m, nb = random_neighbor(qam16, s, rng)
        assert nb in allowed
        assert nb.coords[m] != s.coords[m]
        counts[nb] += 1
    assert set(counts) == allowed
    assert all(abs(n - 1000) < 150 for n in counts.values())


def test_bits_to_symbol_vector(qam16):
    rng = RngStream(9)
    s = random_symbol_vector(qam16, 3, rng)
    bits = symbol_vector_bits(qam16, s).reshape(-1)
    assert bits_to_symbol_vector(qam16, bits) == s
    with pytest.raises(ConstellationError):
        bits_to_symbol_vector(qam16, bits[:-1])


def test_all_symbol_vectors(qpsk):
    states = all_symbol_vectors(qpsk, 2)
    assert len(states) == 16
    assert len(set(states)) == 16
