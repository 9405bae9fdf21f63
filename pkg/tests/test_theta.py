"""Representation numbers and the theta expansion engines."""

import numpy as np
import pytest

import stable_theta as st
from stable_theta.expansion import trace_of_flat, tri_len
from conftest import ambient_glue_vectors, ambient_norm, sigma


def coeff_by_trace(E):
    """Genus-1 helper: {trace: coefficient}."""
    assert E.genus == 1
    return {trace_of_flat(k, 1): v for k, v in E.terms.items()}


class TestRepresentationCount:
    def test_zero_index(self, e8):
        assert st.representation_count(e8, st.HalfIntegralMatrix([[0]])) == 1

    def test_roots(self, e8):
        assert st.representation_count(e8, st.HalfIntegralMatrix([[2]])) == 240

    def test_rank_one(self):
        L = st.EvenLattice([[2]])
        assert st.representation_count(L, st.HalfIntegralMatrix([[2]])) == 2
        assert st.representation_count(L, st.HalfIntegralMatrix([[6]])) == 0

    def test_infeasible_or_non_psd(self, e8):
        assert st.representation_count(e8, st.HalfIntegralMatrix([[2, 3], [3, 2]])) == 0

    def test_zero_diagonal_forces_zero_column(self, e8):
        T = st.HalfIntegralMatrix([[2, 0], [0, 0]])
        assert st.representation_count(e8, T) == 240

    def test_genus2_pair_oracle(self, e8):
        # double loop over ambient roots, independent of the count engine
        roots = [v for v in ambient_glue_vectors(8, 2)]
        assert len(roots) == 240
        def dot(a, b):
            return sum(x * y for x, y in zip(a, b)) // 4
        for t in (1, 0, 2):
            cnt = sum(1 for a in roots for b in roots if dot(a, b) == t)
            T = st.HalfIntegralMatrix([[2, t], [t, 2]])
            assert st.representation_count(e8, T) == cnt

    def test_root_pair_product_one(self, e8):
        # 240 roots times 56 neighbours at product 1
        T = st.HalfIntegralMatrix([[2, 1], [1, 2]])
        assert st.representation_count(e8, T) == 13440

    def test_gl_invariance(self, e8):
        # conjugating by a unimodular matrix permutes the tuples counted
        U = np.array([[1, 1], [0, 1]])
        for t2 in ([[2, 1], [1, 2]], [[2, 0], [0, 4]], [[4, 2], [2, 4]]):
            A = np.array(t2)
            B = U.T @ A @ U
            a = st.representation_count(e8, st.HalfIntegralMatrix(t2))
            b = st.representation_count(
                e8, st.HalfIntegralMatrix([[int(x) for x in r] for r in B]))
            assert a == b

    def test_matches_expansion(self, e8):
        E = st.siegel_theta(e8, 2, 2)
        for key, c in E.terms.items():
            T = st.HalfIntegralMatrix.from_flat(key, 2)
            assert st.representation_count(e8, T) == c


class TestSiegelTheta:
    def test_e8_genus1(self, e8):
        E = st.siegel_theta(e8, 1, 5)
        assert coeff_by_trace(E) == {0: 1, 1: 240, 2: 2160, 3: 6720,
                                     4: 17520, 5: 30240}
        for n in range(1, 6):
            assert coeff_by_trace(E)[n] == 240 * sigma(3, n)

    def test_genus1_naive_oracle(self, e8):
        # recount the coefficients from the ambient model
        counts = {}
        for v in ambient_glue_vectors(8, 6):
            counts[ambient_norm(v) // 2] = counts.get(ambient_norm(v) // 2, 0) + 1
        E = st.siegel_theta(e8, 1, 3)
        table = coeff_by_trace(E)
        assert {n: c for n, c in table.items() if n > 0} == counts

    def test_rank16_genus1(self, e8e8, d16):
        for L in (e8e8, d16):
            E = st.siegel_theta(L, 1, 3)
            assert coeff_by_trace(E) == {0: 1, 1: 480, 2: 61920, 3: 1050240}

    def test_genus0(self, e8):
        E = st.siegel_theta(e8, 0, 5)
        assert E.terms == {(): 1}
        assert E.weight == 4

    def test_bound0(self, e8):
        E = st.siegel_theta(e8, 2, 0)
        assert E.terms == {(0,) * 3: 1}

    def test_constant_term_and_psd(self, e8):
        E = st.siegel_theta(e8, 2, 2)
        assert E.terms[(0, 0, 0)] == 1
        for key in E.terms:
            T = st.HalfIntegralMatrix.from_flat(key, 2)
            assert st.is_psd_half_integral(T)
            assert T.trace() <= 2

    def test_direct_sum_fast_path_consistency(self, e8):
        # the convolution route must agree with plain dense enumeration
        plain = st.EvenLattice(st.catalog_lattice("E8+E8").gram)
        for g, bound in ((1, 2), (2, 2)):
            a = st.siegel_theta(st.catalog_lattice("E8+E8"), g, bound)
            b = st.siegel_theta(plain, g, bound)
            assert a == b

    def test_odd_rank_rejected(self):
        with pytest.raises(st.ShapeError):
            st.siegel_theta(st.EvenLattice([[2]]), 1, 2)

    def test_dense_table_marginals(self, e8, d16):
        # summing a dense table over the off-diagonal entries must give the
        # product of the norm counts: no tuple lost, none double counted
        from stable_theta.theta import dense_tables
        for L in (e8, d16):
            tabs = dense_tables(L, 3, 6)
            counts = st.norm_series(L, 6)
            marg2 = {}
            for (a, t, b), c in tabs[2].items():
                marg2[(a, b)] = marg2.get((a, b), 0) + c
            for (a, b), total in marg2.items():
                assert total == counts[a] * counts[b], (L.name, a, b)
            marg3 = sum(c for key, c in tabs[3].items()
                        if (key[0], key[2], key[5]) == (2, 2, 2))
            assert marg3 == counts[2] ** 3, L.name

    def test_non_unimodular_lattice_brute_force(self):
        # counts for diag(2, 4): x^2 + 2 y^2 = n solutions, doubled scale
        L = st.EvenLattice([[2, 0], [0, 4]])
        E = st.siegel_theta(L, 1, 6)
        expect = {}
        for x in range(-4, 5):
            for y in range(-3, 4):
                n = 2 * x * x + 4 * y * y
                if n <= 12:
                    expect[n // 2] = expect.get(n // 2, 0) + 1
        assert coeff_by_trace(E) == expect
        assert E.weight == 1
        # the genus-2 table agrees with fixed-index recounts
        E2 = st.siegel_theta(L, 2, 3)
        for key, c in E2.terms.items():
            T = st.HalfIntegralMatrix.from_flat(key, 2)
            assert st.representation_count(L, T) == c

    def test_budget_guard(self, d16):
        fresh = st.EvenLattice(d16.gram)
        with pytest.raises(st.BudgetExceededError):
            st.siegel_theta(fresh, 2, 3, budget=1000)


class TestJacobiTheta:
    def test_constant(self, e8):
        F = st.jacobi_theta(e8, 1, 1)
        assert F.coefficient(st.HalfIntegralMatrix([[0]]), [[0] * 8]) == 1
        assert F.weight == 4 and F.width == 8

    def test_trace1_count(self, e8):
        F = st.jacobi_theta(e8, 1, 1)
        ones = [k for k in F.terms if trace_of_flat(k[:1], 1) == 1]
        assert len(ones) == 240

    def test_zero_genus(self, e8):
        F = st.jacobi_theta(e8, 0, 3)
        assert F.terms == {(): 1}

    def test_coefficients_zero_one_and_reconstruction(self, e8):
        F = st.jacobi_theta(e8, 2, 2)
        assert set(F.terms.values()) == {1}
        inv = np.array(F.index.doubled_inverse())
        G = np.array(F.index.doubled)
        for key in F.terms:
            t2 = np.array([[key[0], key[1]], [key[1], key[2]]])
            R = np.array(key[3:]).reshape(2, 8)
            lam = inv @ R.T
            assert np.array_equal(lam.T @ G @ lam, t2)

    def test_r_determines_lambda_injective(self, e8):
        F = st.jacobi_theta(e8, 1, 2)
        rs = {k[tri_len(1):] for k in F.terms}
        assert len(rs) == len(F.terms)

    def test_block_condition_holds(self, e8):
        F = st.jacobi_theta(e8, 1, 2)
        for key in F.terms:
            T = st.HalfIntegralMatrix.from_flat(key[:1], 1)
            R = [key[1:]]
            assert st.block_psd(T, R, F.index)

    def test_term_count_is_lambda_count(self, e8):
        # independent count of 8x2 integer matrices with bounded column norms
        F = st.jacobi_theta(e8, 2, 1)
        full = {0: 1, 2: 240}
        expect = sum(full[a] * full[b] for a in full for b in full if a + b <= 2)
        assert len(F.terms) == expect

    def test_odd_width_rejected(self):
        with pytest.raises(st.ShapeError):
            st.jacobi_theta(st.EvenLattice([[2]]), 1, 1)


class TestThetaSc:
    def test_identity_characteristic(self, e8):
        ident = [[int(i == j) for j in range(8)] for i in range(8)]
        for g, bound in ((0, 2), (1, 2), (2, 1)):
            assert st.theta_sc(e8, ident, g, bound) == st.jacobi_theta(e8, g, bound)

    def test_degenerate_index_rejected(self, e8):
        with pytest.raises(st.UnsupportedError):
            st.theta_sc(e8, [[0]] * 8, 1, 1)

    def test_non_unimodular_s_rejected(self):
        L = st.EvenLattice([[2, 0], [0, 2]])
        with pytest.raises(st.ShapeError):
            st.theta_sc(L, [[1], [0]], 1, 1)

    def test_block_condition_random_c(self, e8):
        rng = np.random.default_rng(17)
        built = 0
        while built < 3:
            c = rng.integers(-1, 2, size=(8, 2))
            try:
                F = st.theta_sc(e8, [[int(x) for x in r] for r in c], 1, 2)
            except st.UnsupportedError:
                continue
            built += 1
            for key in F.terms:
                T = st.HalfIntegralMatrix.from_flat(key[:1], 1)
                R = [key[1:]]
                assert st.block_psd(T, R, F.index)

    def test_index_and_weight(self, e8):
        c = [[1, 0], [0, 1]] + [[0, 0]] * 6
        F = st.theta_sc(e8, c, 1, 1)
        assert F.weight == 4
        expect = [[e8.gram[i][j] for j in range(2)] for i in range(2)]
        assert [list(r) for r in F.index.doubled] == expect
