"""Degree-lowering operators, the series product, family verification."""

import pytest

import stable_theta as st
from stable_theta.expansion import trace_of_flat


class TestPhi:
    def test_theta_chain(self, e8):
        for g in (1, 2, 3):
            hi = st.siegel_theta(e8, g, 2)
            lo = st.siegel_theta(e8, g - 1, 2)
            assert st.siegel_phi(hi) == lo

    def test_constant(self):
        one = st.SiegelExpansion.constant_one(1, 4, 3)
        img = st.siegel_phi(one)
        assert img.genus == 0 and img.terms == {(): 1}

    def test_genus0_rejected(self):
        with pytest.raises(st.ShapeError):
            st.siegel_phi(st.SiegelExpansion.constant_one(0, 4, 1))

    def test_linearity(self, e8, d16):
        a = st.siegel_theta(st.catalog_lattice("E8+E8"), 2, 2)
        b = st.siegel_theta(d16, 2, 2)
        lhs = st.siegel_phi(st.linear_combine([3, -2], [a, b]))
        rhs = st.linear_combine([3, -2], [st.siegel_phi(a), st.siegel_phi(b)])
        assert lhs == rhs


class TestPsi:
    def test_theta_chain(self, e8):
        for g in (1, 2, 3):
            hi = st.jacobi_theta(e8, g, 2)
            lo = st.jacobi_theta(e8, g - 1, 2)
            assert st.siegel_jacobi_psi(hi) == lo

    def test_zero(self, e8):
        z = st.JacobiExpansion.zero(2, 8, st.JacobiIndex(e8.gram), 4, 2)
        img = st.siegel_jacobi_psi(z)
        assert img.is_zero() and img.genus == 1

    def test_theta_sc_chain(self, e8):
        c = [[1, 0], [0, 1]] + [[0, 0]] * 6
        hi = st.theta_sc(e8, c, 2, 2)
        lo = st.theta_sc(e8, c, 1, 2)
        assert st.siegel_jacobi_psi(hi) == lo

    def test_preserves_singular_support(self, e8):
        F = st.jacobi_theta(e8, 2, 2)
        assert st.singular_support_check(F).all_singular
        img = st.siegel_jacobi_psi(F)
        assert st.singular_support_check(img).all_singular

    def test_linearity(self, e8):
        a = st.jacobi_theta(e8, 2, 2)
        lhs = st.siegel_jacobi_psi(st.linear_combine([5], [a]))
        rhs = st.linear_combine([5], [st.siegel_jacobi_psi(a)])
        assert lhs == rhs


class TestProduct:
    def test_constant_times_f(self, e8):
        F = st.jacobi_theta(e8, 1, 2)
        one = st.SiegelExpansion.constant_one(1, 0, 2)
        assert st.shimura_product(one, F) == st.JacobiExpansion(
            1, 8, F.index, F.weight, 2, F.terms)

    def test_weights_add(self, e8, e8e8):
        f = st.siegel_theta(e8e8, 1, 2)       # weight 8
        F = st.jacobi_theta(e8, 1, 2)         # weight 4
        assert st.shimura_product(f, F).weight == 12

    def test_genus1_spot_value(self, e8):
        f = st.siegel_theta(e8, 1, 2)
        F = st.jacobi_theta(e8, 1, 2)
        pr = st.shimura_product(f, F)
        got = pr.coefficient(st.HalfIntegralMatrix([[2]]), [[0] * 8])
        assert got == 240

    def test_hand_convolution(self, e8):
        # recompute every product coefficient by a dictionary convolution
        f = st.siegel_theta(e8, 1, 2)
        F = st.jacobi_theta(e8, 1, 2)
        pr = st.shimura_product(f, F)
        expect = {}
        for k1, c1 in f.terms.items():
            for k2, c2 in F.terms.items():
                if trace_of_flat(k1, 1) + trace_of_flat(k2[:1], 1) <= 2:
                    key = (k1[0] + k2[0],) + k2[1:]
                    expect[key] = expect.get(key, 0) + c1 * c2
        expect = {k: v for k, v in expect.items() if v}
        assert pr.terms == expect

    def test_bound_is_min_and_complete(self, e8):
        f2 = st.siegel_theta(e8, 1, 2)
        F3 = st.jacobi_theta(e8, 1, 3)
        F2 = st.jacobi_theta(e8, 1, 2)
        a = st.shimura_product(f2, F3)
        b = st.shimura_product(f2, F2)
        assert a.bound == 2 and a == b

    def test_genus_mismatch(self, e8):
        with pytest.raises(st.ShapeError):
            st.shimura_product(st.siegel_theta(e8, 2, 2),
                               st.jacobi_theta(e8, 1, 2))

    def test_intertwining(self, e8, e8e8):
        for g in (1, 2):
            f = st.siegel_theta(e8e8, g, 2)
            F = st.jacobi_theta(e8, g, 2)
            lhs = st.siegel_jacobi_psi(st.shimura_product(f, F))
            rhs = st.shimura_product(st.siegel_phi(f), st.siegel_jacobi_psi(F))
            assert lhs == rhs

    def test_intertwining_full_range(self, e8, d16):
        # the stated range: catalog factors, genus <= 2, bound <= 3
        for g in (1, 2):
            for bound in (1, 3):
                f = st.siegel_theta(d16, g, bound)
                F = st.jacobi_theta(e8, g, bound)
                lhs = st.siegel_jacobi_psi(st.shimura_product(f, F))
                rhs = st.shimura_product(st.siegel_phi(f),
                                         st.siegel_jacobi_psi(F))
                assert lhs == rhs, (g, bound)


class TestVerifyStable:
    def test_siegel_family(self, e8):
        fam = [st.siegel_theta(e8, g, 2) for g in range(4)]
        rep = st.verify_stable(fam, "siegel")
        assert rep.all_pass
        assert rep.genera == [0, 1, 2, 3]
        d = rep.as_dict()
        assert d["steps"][0] == {"from": 1, "to": 0, "pass": True, "witness": None}

    def test_jacobi_family(self, e8):
        fam = [st.jacobi_theta(e8, g, 2) for g in range(3)]
        assert st.verify_stable(fam, "jacobi").all_pass

    def test_constructed_failure(self, e8):
        theta1 = st.siegel_theta(e8, 1, 2)
        fake2 = st.SiegelExpansion.zero(2, 4, 2)
        rep = st.verify_stable([st.siegel_theta(e8, 0, 2), theta1, fake2],
                               "siegel")
        assert not rep.all_pass
        bad = [s for s in rep.steps if not s.passed]
        assert [(s.from_genus, s.to_genus) for s in bad] == [(2, 1)]
        # the canonically first discrepant index is the constant term
        assert bad[0].witness == "+00000"

    def test_constructed_failure_nontrivial_witness(self, e8):
        # replace genus 2 by the constant: first discrepancy at doubled (2)
        theta1 = st.siegel_theta(e8, 1, 2)
        const2 = st.SiegelExpansion.constant_one(2, 4, 2)
        rep = st.verify_stable([st.siegel_theta(e8, 0, 2), theta1, const2],
                               "siegel")
        bad = [s for s in rep.steps if not s.passed]
        assert bad and bad[0].witness == "+00002"

    def test_metadata_errors(self, e8):
        with pytest.raises(st.ShapeError):
            st.verify_stable([st.siegel_theta(e8, 0, 2),
                              st.siegel_theta(e8, 2, 2)], "siegel")
        with pytest.raises(st.ShapeError):
            st.verify_stable([st.siegel_theta(e8, 0, 2),
                              st.siegel_theta(e8, 1, 3)], "siegel")
        with pytest.raises(st.ShapeError):
            st.verify_stable([], "siegel")
        with pytest.raises(st.ShapeError):
            st.verify_stable([st.jacobi_theta(e8, 0, 2)], "nope")
