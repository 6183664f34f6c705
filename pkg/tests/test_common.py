import numpy as np
import pytest
from numpy.testing import assert_array_equal

from brodylab.common.errors import InvalidParameterError
from brodylab.common.parallel import THREADS_ENV, map_ordered, ordered_sum, row_blocks, thread_count
from brodylab.common.rng import AUX_BLOCK, SampleStream, coordinate_block


def test_streams_are_reproducible():
    a = SampleStream(5, 3).generator(AUX_BLOCK).uniform(size=4)
    b = SampleStream(5, 3).generator(AUX_BLOCK).uniform(size=4)
    assert_array_equal(a, b)
    assert not np.array_equal(a, SampleStream(5, 4).generator(AUX_BLOCK).uniform(size=4))


def test_coefficients_do_not_depend_on_the_window():
    stream = SampleStream(1, 0)
    small = stream.lattice_disk_coefficients(2, 2.0)
    large = SampleStream(1, 0).lattice_disk_coefficients(4, 2.0)
    assert_array_equal(large[2:7, 2:7], small)
    assert np.all(np.abs(large - 2.0) <= 1.0)


def test_coordinate_blocks_are_distinct():
    blocks = {coordinate_block(m, n) for m in range(-6, 7) for n in range(-6, 7)}
    assert len(blocks) == 13 * 13
    assert min(blocks) > AUX_BLOCK


@pytest.mark.parametrize('seed, index', [(-1, 0), (2 ** 64, 0), (0, -1)])
def test_stream_rejects_bad_keys(seed, index):
    with pytest.raises(InvalidParameterError):
        SampleStream(seed, index)


def test_uniform_square_stays_inside():
    z = SampleStream(9, 9).uniform_square(0, 3.0)
    assert 0 <= z.real <= 3.0 and 0 <= z.imag <= 3.0


def test_thread_count_reads_the_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '3')
    assert thread_count() == 3
    monkeypatch.setenv(THREADS_ENV, 'many')
    assert thread_count() == 1
    monkeypatch.setenv(THREADS_ENV, '0')
    assert thread_count() == 1
    monkeypatch.delenv(THREADS_ENV)
    assert thread_count() >= 1


@pytest.mark.parametrize('threads', ['1', '4'])
def test_map_keeps_the_input_order(monkeypatch, threads):
    monkeypatch.setenv(THREADS_ENV, threads)
    assert map_ordered(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_row_blocks_cover_every_row():
    blocks = row_blocks(130, 64)
    assert [(b.start, b.stop) for b in blocks] == [(0, 64), (64, 128), (128, 130)]
    assert row_blocks(0) == []


def test_ordered_sum():
    assert ordered_sum([]) == 0.0
    assert ordered_sum([np.float64(1.5), 2.5]) == 4.0
