import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codedmm.errors import InvalidParameter, RecoveryThresholdNotMet, ShapeError
from codedmm.matdot import MatDot
from codedmm.matrix_core import FieldMatrix, chain_product, matmul, split_columns, split_rows
from codedmm.multilinear import association_plan, plan_mults
from codedmm.nmatrix import (VARIANTS, NMatrix, alternating_radices, basic_threshold_formula,
                             closed_form, from_mixed_radix, generalized_threshold_formula,
                             generalized_threshold_in_m, heterogeneous_grids,
                             heterogeneous_layout, heterogeneous_threshold_formula,
                             improved_threshold_formula, mixed_radix_digits, nmat_decode,
                             nmat_encode, nmat_threshold, nmat_worker, variant_layout,
                             verify_coefficient_isolation, weights_from_grids)
from codedmm.polydot import polydot_threshold


# -- an independent oracle: multiply matrix polynomials coefficient by coefficient

def poly_matmul(P, Q):
    out = [None] * (len(P) + len(Q) - 1)
    for i, a in enumerate(P):
        for j, b in enumerate(Q):
            term = matmul(a, b)
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return out


def stretch(coeffs, power):
    """``p(x) -> p(x**power)`` on coefficient lists."""
    zero = FieldMatrix.zeros(*coeffs[0].shape, coeffs[0].p)
    out = [zero] * ((len(coeffs) - 1) * power + 1)
    for i, c in enumerate(coeffs):
        out[i * power] = c
    return out


def basic_chain_polys(chain, m):
    """Coefficient lists of p_{A(i)}(x^{m^{i-1}}) and p_{B(i)}(x^{m^{i-1}})."""
    polys = []
    for f, mat in enumerate(chain):
        power = m ** (f // 2)
        if f % 2 == 0:
            blocks = split_columns(mat, m)
        else:
            blocks = split_rows(mat, m)[::-1]
        polys.append(stretch(blocks, power))
    return polys


def product_coefficients(polys):
    acc = polys[0]
    for q in polys[1:]:
        acc = poly_matmul(acc, q)
    return acc


def evaluate(coeffs, x, p):
    out = None
    for d, c in enumerate(coeffs):
        if c is None:
            continue
        term = c.scale(pow(x, d, p))
        out = term if out is None else out + term
    return out


class TestThresholds:
    def test_examples(self):
        assert NMatrix(4, 7, m=2).threshold == 7
        assert NMatrix(3, 5, m=2).threshold == 5
        assert nmat_threshold(NMatrix(4, 9, m=2)) == 7

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_basic_two_matrices_is_matdot(self, m):
        assert NMatrix(2, 2 * m - 1, m=m).threshold == 2 * m - 1

    @pytest.mark.parametrize("n", range(2, 7))
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_odd_alternative_form(self, n, m):
        if n % 2:
            assert basic_threshold_formula(n, m) == m ** ((n + 1) // 2) + m ** ((n - 1) // 2) - 1

    @pytest.mark.parametrize("n", range(2, 7))
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_generalized_reduces_to_basic(self, n, m):
        assert generalized_threshold_formula(n, m, 1) == basic_threshold_formula(n, m)
        assert variant_layout("generalized", n, m, 1).threshold == basic_threshold_formula(n, m)

    @pytest.mark.parametrize("n", range(2, 7))
    @pytest.mark.parametrize("s,t", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (2, 3), (3, 3)])
    def test_map_matches_closed_forms(self, n, s, t):
        for v in ("generalized", "improved"):
            assert variant_layout(v, n, s, t).threshold == closed_form(v, n, s, t)
        assert generalized_threshold_in_m(n, s * t, t) == generalized_threshold_formula(n, s, t)
        gen = generalized_threshold_formula(n, s, t)
        imp = improved_threshold_formula(n, s, t)
        assert imp <= gen

    @pytest.mark.parametrize("s,t", [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1)])
    def test_improved_n2_is_two_matrix_improved(self, s, t):
        assert NMatrix(2, 100, variant="improved", s=s, t=t).threshold == s * t * t + s - 1
        assert improved_threshold_formula(2, s, t) == polydot_threshold(s, t, "improved")

    def test_spot_values(self):
        assert improved_threshold_formula(4, 2, 2) == 39
        assert improved_threshold_formula(3, 2, 2) == 19
        assert generalized_threshold_formula(3, 2, 2) == 22


class TestSpecValidation:
    def test_st_must_equal_m(self):
        with pytest.raises(InvalidParameter):
            NMatrix(3, 100, variant="generalized", m=4, s=3, t=2)

    def test_n_too_small(self):
        with pytest.raises(InvalidParameter):
            NMatrix(1, 10, m=2)

    def test_unknown_variant(self):
        with pytest.raises(InvalidParameter):
            NMatrix(3, 10, variant="fancy", m=2)

    def test_input_count(self, rng):
        spec = NMatrix(3, 5, m=2)
        with pytest.raises(InvalidParameter):
            spec.encode([FieldMatrix.zeros(2, 2)] * 2)

    def test_input_shapes(self):
        spec = NMatrix(3, 5, m=2)
        with pytest.raises(ShapeError):
            spec.encode([FieldMatrix.zeros(2, 2), FieldMatrix.zeros(2, 2), FieldMatrix.zeros(3, 3)])


class TestBasicConstruction:
    def test_n3_shares(self, rng):
        m = 2
        spec = NMatrix(3, 5, m=m)
        chain = spec.random_inputs(4, rng)
        polys = basic_chain_polys(chain, m)
        for share in nmat_encode(chain, spec):
            for blk, coeffs in zip(share.blocks, polys):
                assert blk == evaluate(coeffs, share.x, spec.p)
        # the third factor is evaluated at x^2
        a2 = split_columns(chain[2], 2)
        sh = spec.encode(chain)[2]
        assert sh.blocks[2] == a2[0] + a2[1].scale(sh.x ** 2)

    def test_n2_matches_matdot(self, rng):
        nm, md = NMatrix(2, 6, m=3), MatDot(3, 6)
        a, b = md.random_inputs(6, rng)
        s1, s2 = nm.encode((a, b)), md.encode((a, b))
        for x, y in zip(s1, s2):
            assert x.blocks == (y.a_part, y.b_part)
            assert nm.worker(x).product == md.worker(y).product
        r1 = [nm.worker(s) for s in s1]
        r2 = [md.worker(s) for s in s2]
        assert nm.decode(r1[1:]) == md.decode(r2[1:])

    @pytest.mark.parametrize("n", [3, 4])
    def test_worker_matches_polynomial_expansion(self, n, rng):
        m = 2
        spec = NMatrix(n, basic_threshold_formula(n, m), m=m)
        chain = spec.random_inputs(4, rng)
        coeffs = product_coefficients(basic_chain_polys(chain, m))
        assert len(coeffs) == spec.threshold
        for share in spec.encode(chain):
            assert nmat_worker(share, spec).product == evaluate(coeffs, share.x, spec.p)

    def test_n3_wanted_coefficients(self, rng):
        spec = NMatrix(3, 5, m=2)
        a1, b1, a2 = spec.random_inputs(4, rng)
        res = [spec.worker(s) for s in spec.encode((a1, b1, a2))]
        coeffs = spec.coefficients(res)
        ab = matmul(a1, b1)
        a2_0, a2_1 = split_columns(a2, 2)
        assert coeffs[1] == matmul(ab, a2_0)
        assert coeffs[3] == matmul(ab, a2_1)

    def test_m1_is_plain_chain(self, rng):
        spec = NMatrix(4, 1, m=1)
        chain = spec.random_inputs(3, rng)
        sh = spec.encode(chain)[0]
        assert sh.blocks == tuple(chain)
        assert spec.worker(sh).product == chain_product(chain)

    def test_zero_chain(self):
        spec = NMatrix(3, 5, m=2)
        z = FieldMatrix.zeros(4, 4)
        assert all(b.is_zero() for s in spec.encode((z, z, z)) for b in s.blocks)

    @pytest.mark.parametrize("n", [3, 4])
    def test_every_k_subset(self, n, rng):
        k = basic_threshold_formula(n, 2)
        spec = NMatrix(n, k + 2, m=2)
        chain = spec.random_inputs(4, rng)
        res = [spec.worker(s) for s in spec.encode(chain)]
        want = chain_product(chain)
        for sub in itertools.combinations(range(k + 2), k):
            assert nmat_decode([res[i] for i in sub], spec) == want
        with pytest.raises(RecoveryThresholdNotMet):
            spec.decode(res[: k - 1])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(VARIANTS), st.integers(2, 5), st.sampled_from([(2, 1), (1, 2), (3, 1), (1, 3)]),
       st.integers(0, 2**32 - 1))
def test_decode_any_subset(variant, n, st_pair, seed):
    s, t = st_pair
    rng = np.random.default_rng(seed)
    k = closed_form(variant, n, s, t)
    if variant == "basic":
        spec = NMatrix(n, k + 2, m=s * t)
    else:
        spec = NMatrix(n, k + 2, variant=variant, s=s, t=t)
    N = int(rng.integers(1, 9))
    chain = spec.random_inputs(N, rng)
    res = [spec.worker(sh) for sh in spec.encode(chain)]
    order = rng.permutation(k + 2)
    assert spec.decode([res[i] for i in order[:k]], N) == chain_product(chain)
    with pytest.raises(RecoveryThresholdNotMet):
        spec.decode([res[i] for i in order[: k - 1]], N)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("variant", ["generalized", "improved"])
def test_grid_variants_decode_2x2(n, variant, rng):
    spec = NMatrix(n, closed_form(variant, n, 2, 2), variant=variant, s=2, t=2)
    chain = spec.random_inputs(4, rng)
    assert spec.run(chain) == chain_product(chain)


class TestIsolation:
    def test_example_cross_terms(self):
        lay = variant_layout("basic", 4, m=2)
        rep = verify_coefficient_isolation(lay)
        assert rep.ok and rep.wanted == {(0, 0): 3}
        # A(1)_i x^i, B(1)_j x^(1-j), A(2)_k x^(2k), B(2)_l x^(2(1-l)):
        # exactly the four terms with i = j and k = l land on x^3
        hits = [(i, j, k, l) for i, j, k, l in itertools.product(range(2), repeat=4)
                if i + (1 - j) + 2 * k + 2 * (1 - l) == 3]
        assert sorted(hits) == sorted((i, i, k, k) for i in range(2) for k in range(2))
        assert lay.weights == (1, 1, 2, 2, 4)

    def test_n2_is_matdot(self):
        rep = verify_coefficient_isolation(NMatrix(2, 5, m=3))
        assert rep.ok and rep.wanted == {(0, 0): 2}

    @pytest.mark.parametrize("n", range(2, 6))
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_basic_grid(self, n, m):
        assert verify_coefficient_isolation(variant_layout("basic", n, m=m)).ok

    @pytest.mark.parametrize("n", range(2, 5))
    @pytest.mark.parametrize("s,t", list(itertools.product(range(1, 4), repeat=2)))
    @pytest.mark.parametrize("variant", ["generalized", "improved"])
    def test_grid_variants(self, n, s, t, variant):
        rep = verify_coefficient_isolation(variant_layout(variant, n, s, t))
        assert rep.ok, rep.violations[:3]


class TestMixedRadix:
    def test_round_trip(self):
        radices = alternating_radices(4, 2, 2)
        assert radices == (2,) * 6
        seen = set()
        for d in range(2**3 * 2**3):
            digits = mixed_radix_digits(d, radices)
            assert from_mixed_radix(digits, radices) == d
            seen.add(digits)
        assert len(seen) == 64
        with pytest.raises(InvalidParameter):
            mixed_radix_digits(64, radices)

    def test_uneven_radices(self):
        radices = alternating_radices(4, 3, 2)
        assert radices == (2, 3, 2, 3, 2, 3)
        for d in range(0, 216, 7):
            assert from_mixed_radix(mixed_radix_digits(d, radices), radices) == d

    def test_wanted_exponent_digits(self):
        # generalized n=4, s=t=2: C_{i,j} lives at digits (i, s-1, t-1, s-1, j, 0)
        s = t = 2
        lay = variant_layout("generalized", 4, s, t)
        radices = alternating_radices(4, s, t)
        for (i, j), e in lay.wanted_exponents().items():
            assert e < s**3 * t**3
            assert mixed_radix_digits(e, radices) == (i, s - 1, t - 1, s - 1, j, 0)

    def test_bad_digit(self):
        with pytest.raises(InvalidParameter):
            from_mixed_radix((2,), (2,))


class TestHeterogeneous:
    def test_grid_shapes(self):
        assert heterogeneous_grids((2, 3), (1, 2, 4), 4) == ((1, 2), (2, 2), (2, 3), (3, 4))
        with pytest.raises(InvalidParameter):
            heterogeneous_grids((2,), (1, 2), 4)

    def test_uniform_weights_agree(self):
        for n in range(2, 7):
            for s, t in [(2, 2), (3, 2), (2, 3)]:
                grids = variant_layout("generalized", n, s, t).grids
                for v in ("generalized", "improved"):
                    assert weights_from_grids(grids, v) == variant_layout(v, n, s, t).weights

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_corrected_formula_matches_map(self, n):
        for s in itertools.product((1, 2, 3), repeat=(n + 1) // 2):
            for t in itertools.product((1, 2, 3), repeat=n // 2 + 1):
                lay = heterogeneous_layout(s, t, n)
                assert heterogeneous_threshold_formula(s, t, n, literal=False) == lay.threshold

    def test_literal_formula_differs(self):
        s, t = (2, 2), (2, 2, 2)
        assert heterogeneous_layout(s, t, 4).threshold == 39
        assert heterogeneous_threshold_formula(s, t, 4) == 23
        assert heterogeneous_threshold_formula(s, t, 4, literal=False) == 39

    def test_literal_odd_agrees_for_equal_t(self):
        s, t = (2, 3), (2, 2)
        assert heterogeneous_threshold_formula(s, t, 3) == heterogeneous_layout(s, t, 3).threshold

    def test_isolation_and_decode(self, rng):
        lay = heterogeneous_layout((2, 1), (1, 2, 2), 4)
        assert verify_coefficient_isolation(lay).ok
        spec = NMatrix(4, lay.threshold, layout=lay)
        chain = spec.random_inputs(4, rng)
        assert spec.run(chain) == chain_product(chain)


class TestWorkerCosts:
    def test_plans(self):
        assert association_plan(2) == (0, 1)
        assert association_plan(3) == (0, (1, 2))
        assert association_plan(4) == ((0, (1, 2)), 3)
        assert association_plan(5) == (0, ((1, 2), (3, 4)))
        assert association_plan(6) == ((0, ((1, 2), (3, 4))), 5)

    def test_basic_mult_count(self):
        # N=12, m=3: inner B.A products are (4x12)(12x4), then outer factors
        N, m = 12, 3
        c = NMatrix(4, 100, m=m).costs(N)
        inner = (N // m) * N * (N // m)
        chain = N * (N // m) * (N // m)
        outer = N * (N // m) * N
        assert c.worker_mult_count == inner + chain + outer

    def test_plan_mults_shape(self):
        shape, mults = plan_mults(association_plan(3), [(2, 3), (3, 4), (4, 5)])
        assert shape == (2, 5) and mults == 3 * 4 * 5 + 2 * 3 * 5

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    @pytest.mark.parametrize("variant,s,t", [("basic", 2, 1), ("generalized", 2, 2),
                                             ("improved", 3, 2), ("improved", 2, 3)])
    def test_symbol_counts(self, n, variant, s, t):
        N = 12
        kw = {"m": s * t} if variant == "basic" else {"s": s, "t": t}
        spec = NMatrix(n, 10**4, variant=variant, **kw)
        c = spec.costs(N)
        m = s * t
        assert c.per_worker_in_symbols == n * N * N // m
        if n % 2 == 0:
            assert c.per_worker_out_symbols == N * N // (t * t)
        else:
            assert c.per_worker_out_symbols == N * N // m
        assert c.fusion_in_symbols == spec.threshold * c.per_worker_out_symbols
        assert c.master_out_symbols == spec.P * c.per_worker_in_symbols
