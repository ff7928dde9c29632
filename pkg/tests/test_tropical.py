"""
热带半环标量运算测试
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rapid_apsp.graph.tropical import (
    INF,
    as_distance_matrix,
    saturating_add,
    saturating_add3,
    tropical_identity,
    tropical_min,
)
from rapid_apsp.kernels.min_plus import min_plus_product
from rapid_apsp.utils.error_handling import ArgumentError

distances = st.integers(min_value=0, max_value=INF)
# 偏向小值与饱和边界附近
entries = st.one_of(
    st.integers(min_value=0, max_value=1000),
    st.sampled_from([INF - 2, INF - 1, INF]),
    distances,
)
side = st.integers(min_value=1, max_value=6)

semiring_cases = settings(max_examples=10_000, deadline=None)


def matrices(rows, cols):
    return hnp.arrays(np.uint32, (rows, cols), elements=entries)


@st.composite
def product_chain(draw):
    r, k, j, c = (draw(side) for _ in range(4))
    return draw(matrices(r, k)), draw(matrices(k, j)), draw(matrices(j, c))


@st.composite
def any_matrix(draw):
    return draw(matrices(draw(side), draw(side)))


class TestSaturatingAdd:
    """饱和加法"""

    def test_small_integers(self):
        assert saturating_add(3, 4) == 7

    def test_infinity_absorbs(self):
        assert saturating_add(INF, 5) == INF
        assert saturating_add(0, INF) == INF

    def test_saturation_boundary(self):
        assert saturating_add(2**32 - 6, 5) == INF
        assert saturating_add(2**32 - 7, 5) == INF - 1

    def test_arrays_keep_uint32(self):
        a = np.array([1, INF, 2**31], dtype=np.uint32)
        out = saturating_add(a, np.array([2, 1, 2**31], dtype=np.uint32))
        assert out.dtype == np.uint32
        assert out.tolist() == [3, INF, INF]

    @semiring_cases
    @given(distances, distances)
    def test_commutative(self, a, b):
        assert saturating_add(a, b) == saturating_add(b, a)

    @semiring_cases
    @given(distances, distances, distances)
    def test_associative(self, a, b, c):
        assert saturating_add(saturating_add(a, b), c) == saturating_add(a, saturating_add(b, c))
        assert saturating_add3(a, b, c) == saturating_add(a, saturating_add(b, c))

    @semiring_cases
    @given(distances)
    def test_identities(self, a):
        assert saturating_add(a, 0) == a
        assert tropical_min(a, INF) == a

    @semiring_cases
    @given(distances, distances, distances)
    def test_distributes_over_min(self, a, b, c):
        left = saturating_add(a, tropical_min(b, c))
        right = tropical_min(saturating_add(a, b), saturating_add(a, c))
        assert left == right

    @semiring_cases
    @given(distances, distances)
    def test_scalar_matches_array(self, a, b):
        arr = saturating_add(np.array([a], dtype=np.uint32), np.array([b], dtype=np.uint32))
        assert int(arr[0]) == saturating_add(a, b)


class TestMatrices:
    def test_identity(self):
        eye = tropical_identity(3)
        assert np.diagonal(eye).tolist() == [0, 0, 0]
        assert eye[0, 1] == INF

    def test_rejects_negative(self):
        with pytest.raises(ArgumentError):
            as_distance_matrix([[0, -1], [2, 0]])


class TestProductProperties:
    """min-plus 乘积的半环性质"""

    @semiring_cases
    @given(product_chain())
    def test_associative(self, chain):
        a, b, c = chain
        left = min_plus_product(min_plus_product(a, b), c)
        right = min_plus_product(a, min_plus_product(b, c))
        assert np.array_equal(left, right)

    @semiring_cases
    @given(any_matrix())
    def test_identity_both_sides(self, a):
        rows, cols = a.shape
        assert np.array_equal(min_plus_product(tropical_identity(rows), a), a)
        assert np.array_equal(min_plus_product(a, tropical_identity(cols)), a)
