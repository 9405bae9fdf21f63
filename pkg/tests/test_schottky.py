"""Theta differences, the rank-16 family, pair conditions, candidates."""

import warnings

import pytest

import stable_theta as st


class TestIgusaForm:
    def test_genus0(self):
        assert st.igusa_form(0, 4).is_zero()

    def test_vanishes_low_genus(self):
        for g in (1, 2):
            E = st.igusa_form(g, 3)
            assert E.is_zero()
            assert E.weight == 8

    def test_phi_chain(self):
        for g in (1, 2, 3):
            hi = st.igusa_form(g, 2)
            assert st.siegel_phi(hi) == st.igusa_form(g - 1, 2)

    def test_genus4_trace3_slice_vanishes(self):
        # the genus-4 member is a cusp form: nothing survives below trace 4,
        # so the N=3 truncation is zero and lowers to the zero genus-3 member
        hi = st.igusa_form(4, 3)
        assert hi.is_zero()
        assert st.siegel_phi(hi) == st.igusa_form(3, 3)

    def test_same_as_theta_difference(self):
        a = st.igusa_form(2, 2)
        b = st.theta_difference(st.catalog_lattice("E8+E8"),
                                st.catalog_lattice("D16plus"), 2, 2)
        assert a == b


class TestGenus4Witness:
    def test_first_discrepancy_frozen_values(self):
        T, c_e8e8, c_d16 = st.igusa_genus4_witness()
        assert T.doubled == ((2, 0, 0, 0), (0, 2, 0, 0),
                             (0, 0, 2, 0), (0, 0, 0, 2))
        # counts of ordered quadruples of pairwise orthogonal roots,
        # cross-checked against an independent combinatorial assembly below
        assert c_e8e8 == 9064742400
        assert c_d16 == 8858304000
        assert c_e8e8 - c_d16 == 206438400

    def test_e8e8_count_assembles_from_single_factor(self, e8, e8e8):
        # orthogonal k-tuples in a direct sum split by support, so the
        # rank-16 count must assemble from the rank-8 counts
        from math import comb
        o = {0: 1}
        for k in (1, 2, 3, 4):
            t2 = [[2 if i == j else 0 for j in range(k)] for i in range(k)]
            o[k] = st.representation_count(e8, st.HalfIntegralMatrix(t2))
        assert (o[1], o[2], o[3]) == (240, 30240, 1814400)
        assembled = sum(comb(4, s) * o[s] * o[4 - s] for s in range(5))
        t2 = [[2 if i == j else 0 for j in range(4)] for i in range(4)]
        direct = st.representation_count(e8e8, st.HalfIntegralMatrix(t2))
        assert direct == assembled == 9064742400


class TestThetaDifference:
    def test_rank_mismatch(self, e8, d16):
        with pytest.raises(st.ShapeError):
            st.theta_difference(e8, d16, 1, 2)

    def test_identical_pair(self, e8):
        assert st.theta_difference(e8, e8, 2, 2).is_zero()

    def test_rank24_pair_low_genus(self):
        a = st.catalog_lattice("E8+E8+E8")
        b = st.catalog_lattice("D16plus+E8")
        for g in (1, 2):
            assert st.theta_difference(a, b, g, 2).is_zero()


class TestPairConditions:
    def test_mu_condition_rank16(self, e8e8, d16):
        ok, detail = st.mu_condition(e8e8, d16)
        assert ok
        assert detail.rank == 16 and detail.mu_p == detail.mu_q == 2

    def test_mu_condition_e8(self, e8):
        ok, _ = st.mu_condition(e8, e8)
        assert ok  # 8/2 = 4

    def test_mu_condition_rank24_fails(self):
        a = st.catalog_lattice("E8+E8+E8")
        b = st.catalog_lattice("D16plus+E8")
        ok, detail = st.mu_condition(a, b)
        assert not ok  # 24/2 = 12
        assert detail.vanishing_case == 1

    def test_case1_counts(self):
        a = st.catalog_lattice("E8+E8+E8")
        b = st.catalog_lattice("D16plus+E8")
        detail = st.pair_condition(a, b)
        assert detail.profile_p[2] == detail.profile_q[2] == 720
        assert st.pair_vanishing_case(a, b) == 1

    def test_rank16_no_case(self, e8e8, d16):
        assert st.pair_vanishing_case(e8e8, d16) is None

    def test_identical_rank24(self):
        a = st.catalog_lattice("E8+E8+E8")
        assert st.pair_vanishing_case(a, a) == 1

    def test_symmetry(self, e8e8, d16):
        a = st.pair_condition(e8e8, d16)
        b = st.pair_condition(d16, e8e8)
        assert a.mu_ok == b.mu_ok and a.vanishing_case == b.vanishing_case

    def test_rank_mismatch(self, e8, d16):
        with pytest.raises(st.ShapeError):
            st.mu_condition(e8, d16)


class TestCandidate:
    def test_flagship_family(self, e8, e8e8, d16):
        fam = []
        for g in range(3):
            F = st.schottky_jacobi_candidate(e8e8, d16, e8, g, 2)
            assert F.is_zero() and F.weight == 12
            fam.append(F)
        rep = st.verify_stable(fam, "jacobi")
        assert rep.all_pass

    def test_equals_generic_product(self, e8, e8e8, d16):
        for g in (1, 2):
            F = st.schottky_jacobi_candidate(e8e8, d16, e8, g, 2)
            diff = st.theta_difference(d16, e8e8, g, 2)
            G = st.shimura_product(diff, st.jacobi_theta(e8, g, 2))
            assert F == G

    def test_p_equals_q(self, e8, e8e8):
        F = st.schottky_jacobi_candidate(e8e8, e8e8, e8, 1, 2)
        assert F.is_zero()

    def test_warns_when_hypothesis_fails(self, e8):
        a = st.catalog_lattice("E8+E8+E8")
        b = st.catalog_lattice("D16plus+E8")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            F = st.schottky_jacobi_candidate(a, b, e8, 1, 1)
        assert len(caught) == 1
        assert F.is_zero() and F.weight == 16

    def test_index_must_be_unimodular(self, e8e8, d16):
        with pytest.raises(st.ShapeError):
            st.schottky_jacobi_candidate(e8e8, d16, st.EvenLattice([[2, 0], [0, 2]]), 1, 1)
