import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qal.acquire import (
    MODES,
    confidence_bound,
    ei_max,
    ei_min,
    exploit,
    norm_cdf,
    score,
    select_batch,
)


def ei_reference(T, sigma):
    """High-precision ``T Phi(T/s) + s phi(T/s)``."""
    mpmath.mp.dps = 50
    T, s = mpmath.mpf(T), mpmath.mpf(sigma)
    z = T / s
    return float(T * mpmath.ncdf(z) + s * mpmath.npdf(z))


# --- expected improvement ---

def test_ei_at_incumbent():
    assert math.isclose(ei_min(0.0, 1.0, 0.0), 1 / math.sqrt(2 * math.pi), rel_tol=1e-15)
    assert math.isclose(ei_max(0.0, 1.0, 0.0), 1 / math.sqrt(2 * math.pi), rel_tol=1e-15)


@pytest.mark.parametrize("mu,sigma,f", [(0.3, 0.2, 0.5), (2.0, 0.5, 0.0), (-1.0, 3.0, 1.0), (10.0, 0.5, 0.0)])
def test_ei_min_matches_high_precision(mu, sigma, f):
    ref = ei_reference(f - mu, sigma)
    assert abs(ei_min(mu, sigma, f) - ref) <= 1e-12 * max(1.0, ref) + 1e-300


def test_ei_deep_tail_is_positive_and_accurate():
    ref = ei_reference(-8.0, 1.0)
    got = ei_min(8.0, 1.0, 0.0)
    assert got > 0
    assert abs(got - ref) / ref < 1e-8


def test_ei_zero_sigma_limit():
    assert ei_min(1.0, 0.0, 3.0) == 2.0
    assert ei_min(3.0, 0.0, 1.0) == 0.0
    assert ei_max(3.0, 0.0, 1.0) == 2.0
    assert abs(ei_min(1.0, 1e-9, 3.0) - 2.0) < 1e-9


def test_ei_reflection():
    mu, sigma = np.array([0.1, 0.9, -2.0]), np.array([0.3, 0.01, 1.5])
    assert np.allclose(ei_max(mu, sigma, 0.4), ei_min(-mu, sigma, -0.4), rtol=0, atol=1e-15)


def test_ei_increases_with_sigma():
    s = np.linspace(0.01, 5, 50)
    e = ei_min(np.full(50, 1.0), s, 0.0)
    assert np.all(np.diff(e) > 0)


def test_ei_input_errors():
    with pytest.raises(ValueError):
        ei_min(0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        ei_min(np.nan, 1.0, 0.0)


def test_norm_cdf_lower_tail():
    assert norm_cdf(-37.0) > 0
    assert math.isclose(norm_cdf(-10.0), float(mpmath.ncdf(-10)), rel_tol=1e-12)


# --- other modes ---

def test_confidence_bounds():
    assert confidence_bound(1.0, 0.5, 2.0, "maximize") == 2.0
    assert confidence_bound(1.0, 0.5, 2.0, "minimize") == 0.0
    with pytest.raises(ValueError):
        confidence_bound(1.0, 0.5, -1.0)
    with pytest.raises(ValueError):
        confidence_bound(1.0, 0.5, 1.0, "sideways")


def test_exploit_orientation():
    mu = np.array([3.0, 1.0, 2.0])
    assert select_batch(exploit(mu, "minimize"), 1)[0] == 1
    assert select_batch(exploit(mu, "maximize"), 1)[0] == 0


@pytest.mark.parametrize("mode", MODES)
def test_score_all_modes(mode):
    s = score(mode, [0.1, 0.5], [0.2, 0.1], incumbent=0.3)
    assert s.scores.shape == (2,) and s.mode == mode


def test_score_unknown_mode():
    with pytest.raises(ValueError):
        score("thompson", [0.0])


# --- batch selection ---

def test_select_batch_ties_to_smaller_index():
    assert list(select_batch([1.0, 3.0, 3.0, 2.0, 3.0], 3)) == [1, 2, 4]


def test_select_batch_all_zero_scores():
    assert list(select_batch(np.zeros(5), 2)) == [0, 1]


def test_select_batch_bounds():
    with pytest.raises(ValueError):
        select_batch([], 1)
    with pytest.raises(ValueError):
        select_batch([1.0, 2.0], 3)
    with pytest.raises(ValueError):
        select_batch([1.0, 2.0], 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=30), st.data())
def test_property_selected_are_top_k(values, data):
    k = data.draw(st.integers(1, len(values)))
    idx = select_batch(values, k)
    assert len(set(idx.tolist())) == k
    chosen = min(values[i] for i in idx)
    rest = [v for i, v in enumerate(values) if i not in set(idx.tolist())]
    assert all(v <= chosen for v in rest)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(0, 5), st.floats(-5, 5))
def test_property_ei_nonnegative_and_above_plain_improvement(mu, sigma, f):
    e = ei_min(mu, sigma, f)
    assert e >= 0
    assert e >= max(f - mu, 0.0) - 1e-12
