import math
import warnings

import numpy as np
import pytest

from holorep import circled as cc
from holorep import kernelop as ko
from holorep import multiindex as mi
from holorep.domains import ReinhardtDomain, delta, eta_radii
from holorep.series import PowerSeries, dilate, random_polynomial, sup_norm

from conftest import coeff_diff

POLY = ReinhardtDomain.polydisc([1.0, 1.0])
BALL = ReinhardtDomain.ball(1.0, 2)
PELL = ReinhardtDomain.pellipsoid([1.0, 1.0], [2.0, 4.0])
F = PowerSeries(2, 6, {(2, 4): 1, (1, 1): 1, (3, 0): 1})


def test_projection_family():
    fam = cc.ProjectionFamily(BALL, 4)
    assert fam.primitives == mi.enumerate_primitives(2, 4)
    for k in fam.primitives:
        assert np.array_equal(fam.deltas[k], eta_radii(BALL, k))


def test_project_examples():
    assert cc.project(F, (1, 2)) == PowerSeries(2, 6, {(2, 4): 1})
    assert cc.project(F, (1, 0)) == PowerSeries(2, 6, {(3, 0): 1})
    assert cc.project(F, (2, 1)).is_zero()
    with pytest.raises(ValueError):
        cc.project(F, (2, 2))


def test_project_zero_examples(rng):
    assert cc.project_zero(PowerSeries(2, 1, {(0, 0): 3, (1, 0): 1})) == 3
    assert cc.project_zero(PowerSeries.monomial((1, 1))) == 0
    g = random_polynomial(2, 4, rng)
    assert cc.project_zero(dilate(g, 0.3)) == g[(0, 0)]


def test_idempotence_orthogonality(rng):
    for n in (1, 2, 3):
        f = random_polynomial(n, 6, rng)
        ks = mi.enumerate_primitives(n, 5)
        for k in ks:
            pk = cc.project(f, k)
            assert cc.project(pk, k) == pk
            for k2 in ks:
                if k2 != k:
                    assert cc.project(pk, k2).is_zero()


def test_completeness_of_grouping(rng):
    for n, N in ((1, 7), (2, 6), (3, 4)):
        f = random_polynomial(n, N, rng)
        total = PowerSeries(n, N, {(0,) * n: cc.project_zero(f)})
        for k in mi.enumerate_primitives(n, N):
            total = total + cc.project(f, k)
        assert total == f


class TestProjectQuadrature:
    def test_polydisc_example(self):
        f = PowerSeries(2, 4, {(1, 1): 1, (2, 2): 1})
        p = cc.project_quadrature(f, (1, 1), POLY, 0.9)
        assert abs(p[(1, 1)] - 1) < 1e-10 and abs(p[(2, 2)] - 1) < 1e-10

    def test_ball_example(self):
        p = cc.project_quadrature(PowerSeries.monomial((1, 1), trunc=4), (1, 1), BALL, 0.9)
        assert abs(p[(1, 1)] - 1) < 1e-8

    def test_ball_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            cc.project_quadrature(F, (1, 0), BALL, 0.9)

    def test_agrees_with_coefficient_filter(self, rng):
        f = random_polynomial(2, 10, rng)
        for k in mi.enumerate_primitives(2, 4):
            assert coeff_diff(cc.project_quadrature(f, k, POLY, 0.9), cc.project(f, k)) < 1e-8
            if all(k):
                assert coeff_diff(cc.project_quadrature(f, k, BALL, 0.9), cc.project(f, k)) < 1e-8

    def test_callable_needs_truncation(self):
        with pytest.raises(ValueError):
            cc.project_quadrature(lambda w: w[:, 0], (1, 0), POLY, 0.9)
        p = cc.project_quadrature(lambda w: np.exp(w[:, 0] * w[:, 1]), (1, 1), POLY, 0.9, trunc=8)
        assert abs(p[(3, 3)] - 1 / 6) < 1e-10

    def test_value_form(self, rng):
        # value form: z^k (2 pi i)^-n oint f / (zeta^k - z^k) dzeta / zeta
        f = random_polynomial(2, 6, rng)
        z = np.array([[0.3, 0.2j], [-0.1, 0.4]])
        for k in [(1, 1), (1, 2)]:
            want = cc.project(f, k).evaluate(z)
            got = cc.project_value_quadrature(f, k, POLY, 0.9, z)
            assert np.max(np.abs(got - want)) < 1e-9


class TestDecompose:
    def test_example_exact(self):
        f = PowerSeries(2, 4, {(0, 0): 3, (1, 1): 1, (2, 2): 1})
        d = cc.decompose(f, POLY, 2)
        assert d.p0 == 3
        assert d.parts[(1, 1)] == PowerSeries(2, 4, {(1, 1): 1, (2, 2): 1})
        assert all(p.is_zero() for k, p in d.parts.items() if k != (1, 1))
        assert d.residual.is_zero()

    def test_example_missing_term(self):
        f = PowerSeries(2, 2, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
        d = cc.decompose(f, POLY, 1)
        assert d.parts[(1, 0)] == PowerSeries(2, 2, {(1, 0): 1})
        assert d.parts[(0, 1)] == PowerSeries(2, 2, {(0, 1): 1})
        assert d.residual == PowerSeries(2, 2, {(1, 1): 1})

    def test_random_polynomial_exact(self, rng):
        f = random_polynomial(2, 5, rng)
        d = cc.decompose(f, BALL, 5)
        assert d.residual.is_zero()
        assert d.reconstruction(2, 5) == f

    def test_residual_bound(self, rng):
        f = random_polynomial(2, 8, rng)
        d = cc.decompose(f, PELL, 3, r=0.3, s=0.9)
        assert sup_norm(d.residual, PELL, 0.3)[1] <= d.residual_bound
        theta = 0.3 / 0.9
        want = 2 * sup_norm(f, PELL, 0.9)[1] * sum(mi.count_degree(2, m) * theta**m for m in range(3, 400))
        assert d.residual_bound == pytest.approx(want, rel=1e-12)


def test_tail_sum():
    assert cc.tail_sum(1, 0, 0.5) == pytest.approx(2.0)
    assert cc.tail_sum(2, 3, 0.5) == pytest.approx(sum((m + 1) * 0.5**m for m in range(3, 300)))
    with pytest.raises(ValueError):
        cc.tail_sum(2, 1, 1.0)


CONFIGS = [(0.5, 0.8), (0.3, 0.9), (0.25, 0.5)]


class TestBounds:
    def test_monomial_slack(self):
        for G in (POLY, BALL, PELL):
            for k in [(1, 1), (1, 2), (3, 1)]:
                chk = cc.projection_bound_check(PowerSeries.monomial(k), k, G, 0.5, 0.8)
                assert chk.ok
                assert chk.lhs == pytest.approx(0.5 ** sum(k) * G.monomial_max(k))

    def test_zero_projection(self):
        chk = cc.projection_bound_check(PowerSeries.monomial((1, 0), trunc=3), (1, 1), POLY, 0.5, 0.8)
        assert chk.lhs == 0 and chk.ok

    def test_random_polynomials_polydisc(self, rng):
        for _ in range(100):
            assert cc.projection_bound_check(random_polynomial(2, 6, rng), (1, 1), POLY, 0.5, 0.8).ok

    def test_scales_validated(self):
        with pytest.raises(ValueError):
            cc.projection_bound_check(F, (1, 1), POLY, 0.8, 0.5)

    def test_topology_examples(self):
        k = (1, 2)
        assert cc.topology_compare(PowerSeries.monomial(k), k, BALL, 0.4, 0.8).ok
        zero = cc.topology_compare(PowerSeries(2, 3, {}), k, BALL, 0.4, 0.8)
        assert zero.lhs == 0 and zero.ok
        f = PowerSeries(2, 12, {mi.scale(k, l): 1 for l in range(1, 5)})
        assert cc.topology_compare(f, k, POLY, 0.3, 0.6).ok
        with pytest.raises(ValueError):
            cc.topology_compare(F, k, POLY, 0.3, 0.6)

    def test_monomial_topology_closed_form(self):
        # lhs = r^|k| m(k); rhs = s^|k| m(k) t / (1 - t), t = (r/s)^|k|
        k, r, s = (2, 1), 0.4, 0.8
        chk = cc.topology_compare(PowerSeries.monomial(k), k, BALL, r, s)
        m = BALL.monomial_max(k)
        t = (r / s) ** 3
        assert chk.lhs == pytest.approx(r**3 * m)
        assert chk.rhs == pytest.approx(s**3 * m * t / (1 - t))

    def test_identity_decomposition_examples(self, rng):
        f = random_polynomial(2, 3, rng)
        assert cc.identity_decomposition_check(f, POLY, 0.3, 0.9, 4).error_norm == 0
        ones = PowerSeries.from_function(2, 8, lambda m: 1.0)
        errs = []
        for N in (2, 3, 4, 5):
            chk = cc.identity_decomposition_check(ones, POLY, 0.3, 0.9, N)
            assert chk.ok
            errs.append(chk.error_norm)
        assert all(b < a for a, b in zip(errs, errs[1:]))
        with pytest.raises(ValueError):
            cc.identity_decomposition_check(f, POLY, 0.8, 0.9, 1)


class TestGrowth:
    def test_geometric(self):
        parts = {k: PowerSeries.monomial(k, 0.5 ** sum(k)) for k in mi.enumerate_primitives(2, 8)}
        fit = cc.growth_criterion(parts, POLY, 1.0)
        assert fit.ok and abs(fit.theta - 0.5) < 1e-9
        norms = [sup_norm(p, POLY, 1.0)[1] for p in parts.values()]
        assert all(nm <= fit.C * fit.theta ** sum(k) * (1 + 1e-6) for nm, k in zip(norms, parts))

    def test_constant_rejected(self):
        parts = {k: PowerSeries.monomial(k) for k in mi.enumerate_primitives(2, 8)}
        fit = cc.growth_criterion(parts, POLY, 1.0)
        assert not fit.ok and abs(fit.theta - 1) < 1e-9

    def test_polynomial_parts_accepted(self, rng):
        f = random_polynomial(2, 4, rng)
        assert cc.growth_criterion(cc.decompose(f, POLY, 6).parts, POLY, 0.5).ok

    def test_product_series_parts(self):
        f = PowerSeries.from_function(2, 14, lambda m: 0.5 ** sum(m))
        d = cc.decompose(f, POLY, 8)
        fit = cc.growth_criterion(d.parts, POLY, 0.5)
        measured = max(sup_norm(p, POLY, 0.5)[1] ** (1 / sum(k)) for k, p in d.parts.items())
        assert fit.ok and fit.theta <= measured < 1

    def test_empty(self):
        with pytest.raises(ValueError):
            cc.growth_criterion({}, POLY, 1.0)


class TestBlocks:
    def test_identity_blocks(self):
        A = ko.matrix_of("identity", 2, 4)
        fam = cc.extract_blocks(A, POLY, POLY)
        for k, B in fam.blocks.items():
            assert B.entries == {(a, a): 1 for a in mi.indices_up_to(2, 4) if any(a) and mi.is_multiple_of(a, k)}
        assert fam.witnesses_ok
        assert fam.C == pytest.approx(0.5 / (fam.eps * 0.3))
        assert np.allclose(fam.carrier((1, 1)), 0.8 * delta(POLY, (1, 1)))

    def test_hadamard_and_euler_blocks(self):
        lam = ko.HADAMARD_RULES["pow2"]
        H = cc.extract_blocks(ko.matrix_of("hadamard:pow2", 2, 5), BALL, BALL)
        E = cc.extract_blocks(ko.matrix_of("euler", 2, 5), BALL, BALL)
        for k in H.blocks:
            for l in range(1, 5 // sum(k) + 1):
                a = mi.scale(k, l)
                assert H.blocks[k].entries[(a, a)] == lam(a)
                assert E.blocks[k].entries[(a, a)] == sum(k) * l

    @pytest.mark.parametrize("G", [POLY, BALL, PELL])
    def test_round_trip_zoo(self, G):
        for op in ko.zoo(2):
            A = ko.matrix_of(op, 2, 6)
            fam = cc.extract_blocks(A, G, G)
            assert cc.assemble(fam, A.column((0, 0))) == A
            assert fam.witnesses_ok

    def test_assemble_examples(self):
        ident = ko.matrix_of("identity", 2, 4)
        fam = cc.extract_blocks(ident, POLY, POLY)
        assert cc.assemble(fam, PowerSeries.constant(2)) == ident
        no_const = cc.assemble(fam)
        assert ((0, 0), (0, 0)) not in no_const.entries
        had = ko.matrix_of("hadamard:pow2", 2, 4)
        assert cc.assemble(cc.extract_blocks(had, BALL, BALL), PowerSeries.constant(2)) == had
        empty = cc.BlockFamily(2, 2, 4, 4, {k: ko.OperatorMatrix(2, 2, 4, 4, {}) for k in mi.enumerate_primitives(2, 4)},
                               1.0, 0.8)
        assert cc.assemble(empty).entries == {}

    def test_malformed_block(self):
        fam = cc.extract_blocks(ko.matrix_of("identity", 2, 3), POLY, POLY)
        bad = dict(fam.blocks)
        bad[(1, 1)] = ko.OperatorMatrix(2, 2, 3, 3, {((1, 0), (1, 0)): 1.0})
        fam.blocks = bad
        with pytest.raises(ValueError, match="malformed"):
            cc.assemble(fam)

    def test_uniform_bound_warning(self):
        fam = cc.extract_blocks(ko.matrix_of("identity", 2, 3), POLY, POLY)
        fam.C = 1e-6
        with pytest.warns(cc.UniformBoundWarning):
            cc.assemble(fam)

    def test_mixed_dimensions(self):
        A = ko.OperatorMatrix(2, 1, 3, 3, {((1,), (1, 0)): 1.0, ((2,), (1, 1)): -2.0, ((0,), (0, 0)): 4.0})
        fam = cc.extract_blocks(A, BALL, ReinhardtDomain.polydisc([1.0]))
        assert cc.assemble(fam, A.column((0, 0))) == A
        assert fam.witnesses_ok

    def test_json_round_trip(self):
        A = ko.matrix_of("partial:1", 2, 4)
        fam = cc.extract_blocks(A, BALL, BALL)
        back = cc.BlockFamily.from_json(fam.to_json())
        assert back.blocks == fam.blocks and back.C == pytest.approx(fam.C)
        assert back.domain_in == BALL and back.constant == fam.constant
        d = fam.to_json()
        assert set(d) >= {"domain", "s", "C", "blocks"}
