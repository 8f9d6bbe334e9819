import numpy as np
import pytest

from specreg import InvalidArgumentError, WindowingForm, build_design, stacked_designs
from tests.conftest import random_dataset

ALL_FORMS = list(WindowingForm)


def padded_sample(y, t):
    """Sample y_t for 1-based t, zero outside 1..N."""
    return y[t - 1] if 1 <= t <= len(y) else 0.0


def test_non_windowed_example():
    pair = build_design(np.array([1, 2j, -1]), 1, WindowingForm.NON_WINDOWED)
    assert np.array_equal(pair.yvec, np.array([2j, -1]))
    assert np.array_equal(pair.ymat, np.array([[1], [2j]]))


def test_double_windowed_example():
    pair = build_design(np.array([1, 2j, -1]), 1, WindowingForm.DOUBLE_WINDOWED)
    assert pair.rows == 4
    assert np.array_equal(pair.yvec, np.array([1, 2j, -1, 0]))
    assert np.array_equal(pair.ymat, np.array([[0], [1], [2j], [-1]]))


def test_single_row_at_maximal_order():
    pair = build_design(np.arange(1, 9, dtype=complex), 7, WindowingForm.NON_WINDOWED)
    assert pair.rows == 1
    assert pair.yvec[0] == 8
    assert np.array_equal(pair.ymat[0], np.arange(7, 0, -1))


@pytest.mark.parametrize("form", ALL_FORMS)
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_row_shift_property_exhaustive(form, n, p, rng):
    if p > n - 1:
        pytest.skip("order out of range")
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    pair = build_design(y, p, form)
    expected_rows = {
        WindowingForm.NON_WINDOWED: n - p,
        WindowingForm.PRE_WINDOWED: n,
        WindowingForm.POST_WINDOWED: n,
        WindowingForm.DOUBLE_WINDOWED: n + p,
    }[form]
    assert pair.rows == expected_rows == form.row_count(n, p)
    first_t = 1 if form in (WindowingForm.PRE_WINDOWED, WindowingForm.DOUBLE_WINDOWED) else p + 1
    for i in range(pair.rows):
        t = first_t + i
        assert pair.yvec[i] == padded_sample(y, t)
        for lag in range(1, p + 1):
            assert pair.ymat[i, lag - 1] == padded_sample(y, t - lag)
    if form is WindowingForm.NON_WINDOWED:
        # no zero-padded entries may appear: every index is an observed sample
        used = [t - lag for t in range(p + 1, n + 1) for lag in range(1, p + 1)]
        assert min(used) >= 1 and max(used) <= n


def test_prediction_residual_matches_recursion(rng):
    # yvec - ymat @ a is the AR prediction error under the padding convention
    y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    pair = build_design(y, 2, WindowingForm.PRE_WINDOWED)
    resid = pair.yvec - pair.ymat @ a
    manual = [
        padded_sample(y, t) - sum(a[lag - 1] * padded_sample(y, t - lag) for lag in (1, 2))
        for t in range(1, 7)
    ]
    assert np.allclose(resid, manual)


@pytest.mark.parametrize("bad_order", [0, -1, 3, 7])
def test_order_out_of_range_rejected(bad_order):
    with pytest.raises(InvalidArgumentError):
        build_design(np.ones(3, dtype=complex), bad_order, WindowingForm.NON_WINDOWED)


def test_stacked_designs_layout(rng):
    data = random_dataset(rng, 4, 6)
    ymat, yvec = stacked_designs(data, 2, WindowingForm.POST_WINDOWED)
    assert ymat.shape == (4, 6, 2) and yvec.shape == (4, 6)
    pair = build_design(data.bins[2], 2, WindowingForm.POST_WINDOWED)
    assert np.array_equal(ymat[2], pair.ymat)
    assert np.array_equal(yvec[2], pair.yvec)
