import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import jv

from pdante.bessel import jn, jn_symmetric, jn_table


def test_table_matches_scipy():
    x = np.concatenate([np.linspace(-60, 60, 601), [1e-9, 0.0, 250.0]])
    ref = np.array([jv(n, x) for n in range(81)])
    assert np.abs(jn_table(80, x) - ref).max() < 1e-13


@given(st.integers(-40, 40), st.floats(-100, 100, allow_nan=False))
def test_single_order_matches_scipy(n, x):
    assert jn(n, x) == pytest.approx(jv(n, x), abs=1e-13)


def test_at_zero():
    t = jn_table(5, np.array(0.0))
    assert t[0] == 1.0 and np.all(t[1:] == 0.0)


@pytest.mark.parametrize("n, x, expected", [(1, 1.35, 0.5325), (0, -2.3046, 0.053)])
def test_quoted_values(n, x, expected):
    assert abs(jn(n, x)) == pytest.approx(expected, abs=5e-4)


def test_symmetric_layout():
    x = np.array([0.5, 3.0])
    s = jn_symmetric(4, x)
    assert s.shape == (9, 2)
    for i, n in enumerate(range(-4, 5)):
        assert np.allclose(s[i], jv(n, x), atol=1e-15)


def test_sum_rule():
    x = np.linspace(-30, 30, 61)
    s = jn_symmetric(80, x)
    assert np.allclose(s.sum(axis=0), 1.0, atol=1e-14)
    assert np.allclose((s**2).sum(axis=0), 1.0, atol=1e-14)


def test_negative_nmax_rejected():
    with pytest.raises(ValueError):
        jn_table(-1, 1.0)
