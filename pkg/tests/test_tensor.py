import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combtn.tensor import (
    INT64_MAX,
    AxisPairing,
    CountOverflowError,
    StepCost,
    Tensor,
    contract_pair,
    random_tensor,
    transpose,
)


def loop_contract(a: Tensor, b: Tensor, pairs) -> np.ndarray:
    """Reference contraction by explicit summation; independent of numpy's
    tensordot path."""
    a_axes = [ia for ia, _ in pairs]
    b_axes = [ib for _, ib in pairs]
    out_a = [i for i in range(len(a.shape)) if i not in a_axes]
    out_b = [i for i in range(len(b.shape)) if i not in b_axes]
    out_shape = tuple(a.shape[i] for i in out_a) + tuple(b.shape[i] for i in out_b)
    result = np.zeros(out_shape)
    contracted_ranges = [range(a.shape[i]) for i in a_axes]
    for out_idx in itertools.product(*(range(e) for e in out_shape)):
        total = 0.0
        for summed in itertools.product(*contracted_ranges):
            ia = [0] * len(a.shape)
            ib = [0] * len(b.shape)
            for pos, axis in enumerate(out_a):
                ia[axis] = out_idx[pos]
            for pos, axis in enumerate(out_b):
                ib[axis] = out_idx[len(out_a) + pos]
            for (axis_a, axis_b), value in zip(pairs, summed):
                ia[axis_a] = value
                ib[axis_b] = value
            total += a.array[tuple(ia)] * b.array[tuple(ib)]
        result[out_idx] = total
    return result


def convention_cost(a_shape, b_shape, pairs) -> int:
    """Independent recomputation of the counting convention from shapes."""
    a_axes = {ia for ia, _ in pairs}
    b_axes = {ib for _, ib in pairs}
    out = math.prod(e for i, e in enumerate(a_shape) if i not in a_axes)
    out *= math.prod(e for i, e in enumerate(b_shape) if i not in b_axes)
    contracted = math.prod(a_shape[ia] for ia, _ in pairs)
    return out * contracted


class TestContractPair:
    def test_vector_matrix(self):
        v = random_tensor((3,), seed=1)
        m = random_tensor((3, 3), seed=2)
        out, cost = contract_pair(v, m, AxisPairing([(0, 0)]))
        assert out.shape == (3,)
        assert cost.multiplications == 9

    def test_rank3_vector(self):
        t = random_tensor((2, 3, 2), seed=3)
        v = random_tensor((3,), seed=4)
        out, cost = contract_pair(t, v, AxisPairing([(1, 0)]))
        assert out.shape == (2, 2)
        assert cost.multiplications == 12

    def test_scalar_outer_product(self):
        s = Tensor(np.array(2.5))
        v = Tensor(np.arange(5.0))
        out, cost = contract_pair(s, v, AxisPairing())
        assert out.shape == (5,)
        assert cost.multiplications == 5
        assert np.allclose(out.array, 2.5 * np.arange(5.0))

    def test_matches_loop_reference(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            ndim_a = int(rng.integers(1, 4))
            ndim_b = int(rng.integers(1, 4))
            a = random_tensor(tuple(rng.integers(1, 5, ndim_a)), seed=int(rng.integers(1 << 30)))
            b_shape = list(rng.integers(1, 5, ndim_b))
            n_pairs = int(rng.integers(0, min(ndim_a, ndim_b) + 1))
            a_axes = list(rng.choice(ndim_a, n_pairs, replace=False))
            b_axes = list(rng.choice(ndim_b, n_pairs, replace=False))
            for ia, ib in zip(a_axes, b_axes):
                b_shape[ib] = a.shape[ia]
            b = random_tensor(tuple(b_shape), seed=int(rng.integers(1 << 30)))
            pairs = list(zip(a_axes, b_axes))
            out, cost = contract_pair(a, b, AxisPairing(pairs))
            reference = loop_contract(a, b, pairs)
            assert out.shape == reference.shape
            assert np.allclose(out.array, reference, rtol=1e-12, atol=1e-14)
            assert cost.multiplications == convention_cost(a.shape, b.shape, pairs)

    def test_identity_leaves_values_unchanged(self):
        t = random_tensor((2, 3, 4), seed=11)
        eye = Tensor(np.eye(3))
        out, _ = contract_pair(t, eye, AxisPairing([(1, 0)]))
        # identity lands the contracted axis last
        assert np.allclose(out.array, np.moveaxis(t.array, 1, 2))

    def test_extent_mismatch(self):
        a = random_tensor((2, 3), seed=1)
        b = random_tensor((4,), seed=2)
        with pytest.raises(ValueError, match="paired extents differ"):
            contract_pair(a, b, AxisPairing([(1, 0)]))

    def test_duplicate_axis(self):
        a = random_tensor((2, 2), seed=1)
        b = random_tensor((2, 2), seed=2)
        with pytest.raises(ValueError, match="reuses an axis"):
            contract_pair(a, b, AxisPairing([(0, 0), (0, 1)]))

    def test_axis_out_of_range(self):
        a = random_tensor((2,), seed=1)
        b = random_tensor((2,), seed=2)
        with pytest.raises(ValueError, match="out of range"):
            contract_pair(a, b, AxisPairing([(1, 0)]))


@st.composite
def contraction_cases(draw):
    ndim_a = draw(st.integers(1, 3))
    ndim_b = draw(st.integers(1, 3))
    a_shape = draw(st.lists(st.integers(1, 4), min_size=ndim_a, max_size=ndim_a))
    b_shape = draw(st.lists(st.integers(1, 4), min_size=ndim_b, max_size=ndim_b))
    n_pairs = draw(st.integers(0, min(ndim_a, ndim_b)))
    a_axes = draw(st.permutations(range(ndim_a)))[:n_pairs]
    b_axes = draw(st.permutations(range(ndim_b)))[:n_pairs]
    for ia, ib in zip(a_axes, b_axes):
        b_shape[ib] = a_shape[ia]
    return tuple(a_shape), tuple(b_shape), tuple(zip(a_axes, b_axes))


@settings(max_examples=60, deadline=None)
@given(contraction_cases(), st.integers(0, 2**31))
def test_cost_convention_property(case, seed):
    a_shape, b_shape, pairs = case
    a = random_tensor(a_shape, seed=seed)
    b = random_tensor(b_shape, seed=seed + 1)
    out, cost = contract_pair(a, b, AxisPairing(pairs))
    assert cost.multiplications == convention_cost(a_shape, b_shape, pairs)
    out_a = [e for i, e in enumerate(a_shape) if i not in {ia for ia, _ in pairs}]
    out_b = [e for i, e in enumerate(b_shape) if i not in {ib for _, ib in pairs}]
    assert out.shape == tuple(out_a) + tuple(out_b)
    assert np.allclose(out.array, loop_contract(a, b, pairs), rtol=1e-12, atol=1e-14)


class TestTranspose:
    def test_identity_permutation(self):
        t = random_tensor((2, 3), seed=5)
        assert transpose(t, (0, 1)) == t

    def test_matrix_transpose(self):
        t = random_tensor((2, 3), seed=6)
        out = transpose(t, (1, 0))
        assert out.shape == (3, 2)
        assert np.array_equal(out.array, t.array.T)

    def test_involution(self):
        t = random_tensor((2, 3, 4), seed=8)
        perm = (2, 0, 1)
        inverse = tuple(np.argsort(perm))
        assert transpose(transpose(t, perm), inverse) == t

    def test_invalid_permutation(self):
        t = random_tensor((2, 3), seed=9)
        with pytest.raises(ValueError, match="not a permutation"):
            transpose(t, (0, 0))


class TestRandomTensor:
    def test_deterministic(self):
        assert random_tensor((4, 2), seed=123) == random_tensor((4, 2), seed=123)

    def test_seed_sensitive(self):
        assert random_tensor((4,), seed=1) != random_tensor((4,), seed=2)

    def test_sample_mean_near_zero(self):
        values = [random_tensor((1,), seed=s).array[0] for s in range(100_000)]
        assert abs(np.mean(values)) < 0.02

    def test_std_scales_samples(self):
        wide = random_tensor((1000,), seed=3, std=1.0)
        narrow = random_tensor((1000,), seed=3, std=0.1)
        assert np.allclose(narrow.array, wide.array * 0.1)


class TestTensorInvariants:
    def test_zero_extent_rejected(self):
        with pytest.raises(ValueError, match="extent"):
            Tensor(np.zeros((2, 0)))

    def test_immutable(self):
        t = random_tensor((3,), seed=1)
        with pytest.raises(ValueError):
            t.array[0] = 1.0

    def test_from_flat_round_trip(self):
        t = Tensor.from_flat((2, 3), range(6))
        assert t.shape == (2, 3)
        assert list(t.elements) == [0, 1, 2, 3, 4, 5]

    def test_from_flat_size_mismatch(self):
        with pytest.raises(ValueError, match="elements"):
            Tensor.from_flat((2, 3), range(5))

    def test_step_cost_bounds(self):
        with pytest.raises(ValueError):
            StepCost(-1)
        with pytest.raises(CountOverflowError):
            StepCost(INT64_MAX + 1)
        assert StepCost(INT64_MAX).multiplications == INT64_MAX
