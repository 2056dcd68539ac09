import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordesc.errors import InvalidPartitionError, UndefinedRatioError
from coordesc.numeric import FlopCounter, cf_ratio, make_block_partition, spectral_norm_sq


def test_partition_equal_split():
    p = make_block_partition(6, 3)
    assert [list(range(6))[p.block(i)] for i in range(3)] == [[0, 1], [2, 3], [4, 5]]


def test_partition_remainder_goes_to_earlier_blocks():
    p = make_block_partition(5, 2)
    assert [list(range(5))[p.block(i)] for i in range(2)] == [[0, 1, 2], [3, 4]]


def test_partition_more_blocks_than_entries():
    with pytest.raises(InvalidPartitionError):
        make_block_partition(3, 4)


@given(n=st.integers(1, 200), data=st.data())
def test_partition_covers_disjointly(n, data):
    s = data.draw(st.integers(1, n))
    p = make_block_partition(n, s)
    seen = []
    for i in range(p.n_blocks):
        idx = list(range(n))[p.block(i)]
        assert idx
        seen.extend(idx)
    assert seen == list(range(n))


@pytest.mark.parametrize("A, expected", [
    (np.eye(2), 1.0),
    (np.diag([3.0, 1.0]), 9.0),
    # eigenvalues of [[10,14],[14,20]]: 15 +- sqrt(221)
    (np.array([[1.0, 2.0], [3.0, 4.0]]), 15.0 + np.sqrt(221.0)),
])
def test_spectral_norm_sq_examples(A, expected):
    assert spectral_norm_sq(A) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=30)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 10_000))
def test_spectral_norm_sq_matches_svd(p, n, seed):
    A = np.random.default_rng(seed).standard_normal((p, n))
    assert spectral_norm_sq(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0] ** 2, rel=1e-7)


def _counter(n):
    c = FlopCounter()
    if n:
        c.scalar(n)
    return c


def test_cf_ratio_examples():
    assert cf_ratio(_counter(10), _counter(1000)) == pytest.approx(0.01)
    assert cf_ratio(_counter(0), _counter(5)) == 0.0
    with pytest.raises(UndefinedRatioError):
        cf_ratio(_counter(5), _counter(0))


def test_flop_counter_shapes_and_arithmetic():
    c = FlopCounter()
    c.matvec(3, 4)        # 3 * 7
    c.dot(5)              # 9
    c.axpy(5)             # 10
    before = c.copy()
    c.transcendental(2)
    assert before.total == 21 + 9 + 10
    assert (c - before).total == 2
    c.reset()
    assert c.total == 0
    with pytest.raises(ValueError):
        c.add("scalar", -1)
    with pytest.raises(KeyError):
        c.add("bogus", 1)


def test_power_iteration_fallback(monkeypatch):
    import coordesc.numeric as numeric
    monkeypatch.setattr(numeric, "EXACT_SPECTRAL_LIMIT", 0)
    A = np.diag([5.0, 1.0, 0.5])   # well separated spectrum
    assert numeric.spectral_norm_sq(A) == pytest.approx(25.0, rel=1e-9)
    assert numeric.spectral_norm_sq(np.zeros((3, 2))) == 0.0
