import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codedmm.errors import InsufficientWorkers, InvalidParameter, RecoveryThresholdNotMet, DuplicatePoint
from codedmm.field_poly import interpolation_count, reset_interpolation_count
from codedmm.matdot import (MatDot, matdot_decode, matdot_encode, matdot_threshold, matdot_worker,
                            systematic_decode, systematic_encode)
from codedmm.matrix_core import FieldMatrix, matmul_oracle, split_columns, split_rows


@pytest.fixture
def ab11():
    return FieldMatrix([[1, 2], [3, 4]], 11), FieldMatrix([[5, 6], [7, 1]], 11)


def test_thresholds():
    assert [matdot_threshold(m) for m in (1, 2, 5)] == [1, 3, 9]
    with pytest.raises(InvalidParameter):
        matdot_threshold(0)


def test_too_few_workers():
    with pytest.raises(InsufficientWorkers):
        MatDot(3, 4)


def test_hand_evaluated_share(gf11, ab11):
    spec = MatDot(2, 4, field=gf11, points=[2, 1, 3, 4])
    share = matdot_encode(*ab11, spec)[0]
    assert share.x == 2
    assert share.a_part.tolist() == [[5], [0]]
    # 2*[5 6] + [7 1] = [17 13]; B splits into 1x2 row-blocks
    assert share.b_part.tolist() == [[6, 2]]


def test_share_at_zero(gf11, ab11):
    a, b = ab11
    spec = MatDot(2, 3, field=gf11, points=[0, 1, 2])
    share = spec.encode((a, b))[0]
    assert share.a_part == split_columns(a, 2)[0]
    assert share.b_part == split_rows(b, 2)[1]


def test_m1_is_uncoded(rng):
    spec = MatDot(1, 2)
    a, b = spec.random_inputs(4, rng)
    shares = spec.encode((a, b))
    assert all(s.a_part == a and s.b_part == b for s in shares)
    res = matdot_worker(shares[1])
    assert res.product == matmul_oracle(a, b)
    assert matdot_decode([res], spec) == matmul_oracle(a, b)


def test_worker_output_expansion(gf11, ab11):
    a, b = ab11
    spec = MatDot(2, 4, field=gf11)
    (a0, a1), (b0, b1) = split_columns(a, 2), split_rows(b, 2)
    for share in spec.encode((a, b)):
        x = share.x
        expected = (matmul_oracle(a0, b1) + (matmul_oracle(a0, b0) + matmul_oracle(a1, b1)).scale(x)
                    + matmul_oracle(a1, b0).scale(x * x))
        assert matdot_worker(share).product == expected


def test_zero_share_gives_zero_product(gf11):
    spec = MatDot(2, 3, field=gf11)
    z = FieldMatrix.zeros(2, 2, 11)
    assert spec.worker(spec.encode((z, z))[0]).product.is_zero()


def test_any_three_of_four(gf11, ab11):
    spec = MatDot(2, 4, field=gf11)
    results = [spec.worker(s) for s in spec.encode(ab11)]
    for subset in itertools.combinations(results, 3):
        assert spec.decode(list(subset)).tolist() == [[8, 8], [10, 0]]
    with pytest.raises(RecoveryThresholdNotMet) as exc:
        spec.decode(results[:2])
    assert (exc.value.needed, exc.value.got) == (3, 2)
    with pytest.raises(DuplicatePoint):
        spec.decode([results[0], results[0], results[1]])


def test_linearity_in_a(rng):
    spec = MatDot(3, 6)
    a, a2, b = (FieldMatrix.random(6, 6, rng=rng) for _ in range(3))
    s1, s2, s3 = spec.encode((a, b)), spec.encode((a2, b)), spec.encode((a + a2, b))
    for x, y, z in zip(s1, s2, s3):
        assert z.a_part == x.a_part + y.a_part


def test_padding_for_indivisible_n(rng):
    spec = MatDot(3, 5, N=7)
    a, b = spec.random_inputs(7, rng)
    res = [spec.worker(s) for s in spec.encode((a, b))]
    assert spec.decode(res) == matmul_oracle(a, b)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_decode_random_subset(m, n, seed):
    rng = np.random.default_rng(seed)
    P = 2 * m + 3
    spec = MatDot(m, P)
    a, b = spec.random_inputs(n, rng)
    results = [spec.worker(s) for s in spec.encode((a, b))]
    idx = rng.permutation(P)[: 2 * m - 1]
    assert spec.decode([results[i] for i in idx], n) == matmul_oracle(a, b)


class TestSystematic:
    def test_lagrange_basis(self):
        spec = MatDot(3, 6, systematic=True)
        for r, x in enumerate(spec.points.xs[:3]):
            assert spec.lagrange_at(x) == [int(i == r) for i in range(3)]

    def test_systematic_outputs(self, gf11, ab11):
        a, b = ab11
        spec = MatDot(2, 4, systematic=True, field=gf11)
        res = [spec.worker(s) for s in systematic_encode(a, b, spec)]
        blocks = spec.uncoded_blocks(a, b)
        assert res[0].product == blocks[0] and res[1].product == blocks[1]
        assert (res[0].product + res[1].product) == matmul_oracle(a, b)

    def test_fast_path_no_interpolation(self, gf11, ab11):
        spec = MatDot(2, 4, systematic=True, field=gf11)
        res = [spec.worker(s) for s in spec.encode(ab11)]
        reset_interpolation_count()
        assert systematic_decode([res[1], res[0]], spec).tolist() == [[8, 8], [10, 0]]
        assert interpolation_count() == 0

    def test_slow_path(self, gf11, ab11):
        spec = MatDot(2, 4, systematic=True, field=gf11)
        res = [spec.worker(s) for s in spec.encode(ab11)]
        reset_interpolation_count()
        assert spec.decode([res[0], res[2], res[3]]).tolist() == [[8, 8], [10, 0]]
        assert interpolation_count() == 1

    def test_not_enough(self, gf11, ab11):
        spec = MatDot(2, 4, systematic=True, field=gf11)
        res = [spec.worker(s) for s in spec.encode(ab11)]
        with pytest.raises(RecoveryThresholdNotMet):
            spec.decode([res[0], res[2]])

    def test_m1(self, rng):
        spec = MatDot(1, 3, systematic=True)
        a, b = spec.random_inputs(3, rng)
        share = spec.encode((a, b))[0]
        assert share.a_part == a and share.b_part == b
        assert spec.decode([spec.worker(share)]) == matmul_oracle(a, b)

    def test_general_path_agrees(self, rng):
        plain = MatDot(3, 8, systematic=True)
        a, b = plain.random_inputs(6, rng)
        res = [plain.worker(s) for s in plain.encode((a, b))]
        fast = plain.decode(res)
        slow = plain.decode(res[3:])
        assert fast == slow == matmul_oracle(a, b)

    def test_rejects_plain_spec(self, ab11, gf11):
        with pytest.raises(InvalidParameter):
            systematic_encode(*ab11, MatDot(2, 3, field=gf11))


def test_costs():
    c = MatDot(3, 7).costs(12)
    assert c.per_worker_in_symbols == 2 * 12 * 4
    assert c.per_worker_out_symbols == 144
    assert c.fusion_in_symbols == 5 * 144
    assert c.master_out_symbols == 7 * 96
    assert c.worker_mult_count == 12 * 4 * 12
