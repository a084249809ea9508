"""Property suites behind ``holorep verify``.

Each suite takes a seeded generator and a quadrature spec and returns
report rows. Values are measured errors (or failure counts), bounds are
the tolerances they are held to.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import circled as cc
from . import kernelop as ko
from . import multiindex as mi
from .domains import (Contour, CylindricalDomain, PlanarFactor, ReinhardtDomain,
                      eta_kkt_residual)
from .quadrature import (QuadratureSpec, boundary_component_split, cauchy_transform,
                         contour_integral, reconstruct, taylor_coeffs)
from .report import Row
from .rng import SplitMix64
from .series import (LaurentSeries, PowerSeries, multiply, random_polynomial, series_from_json,
                     sup_norm)


def _row(name, value, bound, ok=None) -> Row:
    value = float(value)
    bound = float(bound)
    return Row(name, value, bound, value <= bound if ok is None else bool(ok))


def _coeff_diff(f, g) -> float:
    keys = set(f.coeffs) | set(g.coeffs)
    return max((abs(f[m] - g[m]) for m in keys), default=0.0)


def interior_points(rng: SplitMix64, n: int, count: int, radius: float) -> np.ndarray:
    """Points with every coordinate uniformly placed in the disc of ``radius``."""
    pts = np.empty((count, n), dtype=np.complex128)
    for i in range(count):
        for j in range(n):
            rho = radius * math.sqrt(rng.uniform())
            pts[i, j] = rho * np.exp(2j * np.pi * rng.uniform())
    return pts


def reinhardt_zoo(n: int = 2) -> list[ReinhardtDomain]:
    doms = [ReinhardtDomain.polydisc([1.0] * n), ReinhardtDomain.ball(1.0, n)]
    if n == 2:
        doms.append(ReinhardtDomain.pellipsoid([1.0, 1.0], [2.0, 4.0]))
    return doms


def eta_grid_oracle(G: ReinhardtDomain, k, step: float = 1e-6) -> np.ndarray:
    """Maximize ``log rho^k`` over boundary profiles ``(t, 1 - t)`` on a grid (n = 2)."""
    t = np.arange(0.0, 1.0 + step / 2, step)
    u = np.stack([t, 1.0 - t], axis=1)
    rho = np.asarray(G.radii) * np.power(u, 1.0 / np.asarray(G.p))
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(np.asarray(k) > 0, np.log(rho) * np.asarray(k), 0.0).sum(axis=1)
    return rho[int(np.argmax(logs))]


# --- suites ----------------------------------------------------------------

def suite_multiindex(rng: SplitMix64, q: QuadratureSpec) -> list[Row]:
    rows = []
    bad = 0
    for n in (1, 2, 3):
        for m in mi.indices_up_to(n, 12)[1:]:
            hits = [(k, l) for l in range(1, sum(m) + 1)
                    if all(e % l == 0 for e in m)
                    for k in [tuple(e // l for e in m)] if mi.is_primitive(k)]
            bad += len(hits) != 1 or hits[0] != mi.primitive_factor(m)
    rows.append(_row("primitive_factor unique (n<=3, |m|<=12)", bad, 0))
    bad = 0
    for n in (1, 2, 3):
        brute = tuple(m for m in mi.indices_up_to(n, 8) if any(m) and mi.content(m) == 1)
        bad += brute != mi.enumerate_primitives(n, 8)
    rows.append(_row("enumerate_primitives = brute filter", bad, 0))
    bad = sum(mi.count_degree(n, d) != len(list(mi.indices_of_degree(n, d)))
              for n in (1, 2, 3, 4) for d in range(9))
    rows.append(_row("count_degree = enumeration", bad, 0))
    idx = mi.indices_up_to(3, 6)
    rows.append(_row("graded-lex order", int(list(idx) != sorted(idx, key=mi.grlex_key)), 0))
    return rows


def suite_series(rng: SplitMix64, q: QuadratureSpec) -> list[Row]:
    rows = []
    pts = interior_points(rng, 2, 20, 0.9)
    err_mul = err_add = err_dil = 0.0
    for _ in range(5):
        f = random_polynomial(2, 5, rng)
        g = random_polynomial(2, 5, rng)
        err_mul = max(err_mul, np.max(np.abs(multiply(f, g, 10).evaluate(pts) - f.evaluate(pts) * g.evaluate(pts))))
        err_add = max(err_add, np.max(np.abs((f + g).evaluate(pts) - f.evaluate(pts) - g.evaluate(pts))))
        err_dil = max(err_dil, np.max(np.abs(f.dilate(0.7).evaluate(pts) - f.evaluate(0.7 * pts))))
    rows += [_row("multiply = pointwise product", err_mul, 1e-10),
             _row("add = pointwise sum", err_add, 1e-12),
             _row("dilate f_r(z) = f(rz)", err_dil, 1e-12)]
    bad = 0
    for G in reinhardt_zoo(2):
        for _ in range(3):
            f = random_polynomial(2, 4, rng)
            lo, hi = sup_norm(f, G)
            bad += not (0 <= lo <= hi)
            bad += series_from_json(f.to_json()) != f
        for m in [(1, 0), (2, 3), (0, 4)]:
            lo, hi = sup_norm(PowerSeries.monomial(m, 2.0), G)
            bad += lo != hi or not math.isclose(hi, 2.0 * G.monomial_max(m), rel_tol=1e-12)
    rows.append(_row("sup_norm brackets and JSON round trip", bad, 0))
    ball = ReinhardtDomain.ball(1.0, 2)
    rows.append(_row("ball eta(1,1) = (0.70711, 0.70711)",
                     np.max(np.abs(ball.eta_radii((1, 1)) - math.sqrt(0.5))), 1e-4))
    rows.append(_row("ball monomial_max(1,1) = 0.5", abs(ball.monomial_max((1, 1)) - 0.5), 1e-6))
    worst = kkt = 0.0
    for G in reinhardt_zoo(2)[1:]:
        for k in [(1, 1), (1, 2), (3, 1), (2, 3)]:
            worst = max(worst, np.max(np.abs(G.eta_radii(k) - eta_grid_oracle(G, k, 1e-5))))
            kkt = max(kkt, eta_kkt_residual(G, k))
    rows.append(_row("eta_radii vs grid oracle", worst, 1e-4))
    rows.append(_row("eta_radii KKT residual", kkt, 1e-10))
    return rows


def suite_quadrature(rng: SplitMix64, q: QuadratureSpec) -> list[Row]:
    rows = []
    C = Contour.centered([1.0, 1.0])
    err = 0.0
    for _ in range(5):
        f = random_polynomial(2, 8, rng)
        z = interior_points(rng, 2, 10, 0.7)
        err = max(err, np.max(np.abs(cauchy_transform(f.evaluate, C, z, q) - f.evaluate(z))))
    rows.append(_row("Cauchy transform reproduces polynomials", err, 1e-9))
    f = random_polynomial(2, 6, rng)
    idx = mi.indices_up_to(2, 6)
    tc = taylor_coeffs(f.evaluate, C, idx, q)
    rows.append(_row("Taylor coefficients of a polynomial",
                     max(abs(v - f[m]) for m, v in zip(idx, tc)), 1e-10))

    A1 = CylindricalDomain((PlanarFactor.annulus(0j, 0.5, 2.0),))
    fun1 = lambda w: w[:, 0] ** 3 + 2.0 / w[:, 0] + np.exp(w[:, 0]) + 1.0 / w[:, 0] ** 3
    z1 = np.asarray([[0.6 + 0.3j], [-1.2], [0.2 + 0.9j], [1.5j]])
    rows.append(_row("annulus split sums to f (n=1)",
                     np.max(np.abs(reconstruct(fun1, A1, z1, q) - fun1(z1))), 1e-8))
    A2 = CylindricalDomain((PlanarFactor.annulus(0j, 0.5, 2.0), PlanarFactor.annulus(0.5, 0.4, 1.5)))
    fun2 = lambda w: (w[:, 0] + 1 / w[:, 0]) * ((w[:, 1] - 0.5) ** 2 + 1 / (w[:, 1] - 0.5)) + np.exp(w[:, 0] * w[:, 1] / 4)
    z2 = np.asarray([[0.9 + 0.2j, 0.5 + 0.8j], [-1.1j, 1.2], [1.3, -0.2 + 0.3j]])
    rows.append(_row("annulus split sums to f (n=2)",
                     np.max(np.abs(reconstruct(fun2, A2, z2, q) - fun2(z2))), 1e-8))
    A0 = CylindricalDomain((PlanarFactor.annulus(0j, 0.5, 2.0), PlanarFactor.annulus(0j, 0.5, 2.0)))
    bad = 0
    for e in [(2, -1), (-2, -3), (0, 1), (-1, 0)]:
        mono = lambda w, e=e: w[:, 0] ** e[0] * w[:, 1] ** e[1]
        comps = boundary_component_split(mono, A0, 4, q)
        want = tuple("outer" if x >= 0 else "inner" for x in e)
        key = tuple(x if x >= 0 else -x - 1 for x in e)
        for sel, comp in comps.items():
            for m, c in comp.coeffs.items():
                target = 1.0 if (sel == want and m == key) else 0.0
                bad += abs(c - target) > 1e-10
    rows.append(_row("Laurent classification of monomials", bad, 0))
    return rows


def gram_matrix(n: int, D: int, q: QuadratureSpec, radius: float = 1.0) -> np.ndarray:
    """Pairing of ``lam^-(a+1)`` (as dual kernels) against ``z^b``, by quadrature."""
    idx = mi.indices_up_to(n, D)
    exps = np.asarray(idx, dtype=np.int64)
    C = Contour.centered([radius] * n)
    G = np.empty((len(idx), len(idx)), dtype=np.complex128)
    sign = (-1) ** n
    for i, a in enumerate(idx):
        ut = LaurentSeries(n, D, {a: sign})

        def integrand(w, ut=ut):
            mons = np.prod(w[:, None, :] ** exps[None, :, :], axis=2)
            return ut.evaluate(w)[:, None] * mons

        G[i] = np.atleast_1d(contour_integral(integrand, C, q)) * sign / (2j * np.pi) ** n
    return G


def suite_kernelop(rng: SplitMix64, q: QuadratureSpec) -> list[Row]:
    rows = []
    bad = 0
    dev = 0.0
    for n in (1, 2):
        C = Contour.centered([0.9] * n)
        for op in ko.zoo(n):
            A = ko.matrix_of(op, n, 6)
            a = ko.phi_forward(A)
            bad += ko.matrix_from_kernel(a) != A or ko.phi_forward(ko.matrix_from_kernel(a)) != a
            for _ in range(2):
                f = random_polynomial(n, 6, rng)
                dev = max(dev, _coeff_diff(ko.phi_inverse(a, f, C, q), A.apply(f)))
    rows.append(_row("Phi bijection on the zoo", bad, 0))
    rows.append(_row("phi_inverse = matrix oracle", dev, 1e-9))

    a = ko.phi_forward(ko.matrix_of("identity", 2, 12))
    zeta = np.asarray([[2.0, 2.0j], [-2.0, 2.0 * np.exp(1j)], [2.5j, -3.0]])
    z = np.asarray([[0.5, 0.1j], [-0.3 + 0.2j, 0.5j], [0.0, -0.4]])
    closed = 1.0 / np.prod(z - zeta, axis=1)
    tail = 0.25 * cc.tail_sum(2, 13, 0.25)
    rows.append(_row("identity kernel = prod 1/(z - zeta)",
                     np.max(np.abs(ko.kernel_eval(a, zeta, z) - closed)), tail))

    worst = 0.0
    for n in (1, 2):
        G = gram_matrix(n, 4, q)
        worst = max(worst, np.max(np.abs(G - np.eye(G.shape[0]))))
    rows.append(_row("duality Gram matrix = identity", worst, 1e-10))
    dev = 0.0
    for n in (1, 2):
        C = Contour.centered([1.0] * n)
        for _ in range(3):
            ut = LaurentSeries(n, 5, dict(zip(mi.indices_up_to(n, 5), rng.complex_normals(len(mi.indices_up_to(n, 5))))))
            f = random_polynomial(n, 5, rng)
            dev = max(dev, abs(ko.dual_pair(ut, f, C, q) - ko.dual_pair_exact(ut, f)))
    rows.append(_row("dual_pair quadrature = coefficient sum", dev, 1e-8))
    rep = ko.dual_growth_demo(1, 200, (2, 4, 8, 16))
    rows.append(_row("dual growth ratios strictly increase", rep.ratios[-1], rep.ratios[0],
                     ok=rep.increasing))

    bad = 0
    for op in ko.zoo(2):
        A = ko.matrix_of(op, 2, 5)
        a = ko.phi_forward(A)
        C = Contour.centered([1.0, 1.0])
        for _ in range(2):
            f = random_polynomial(2, 5, rng)
            lhs = sup_norm(A.apply(f), [0.5, 0.5])[0]
            rhs = ko.inverse_bound(a, C, [0.5, 0.5]) * sup_norm(f, [1.0, 1.0])[1]
            bad += lhs > rhs * (1 + 1e-12)
    rows.append(_row("estimate (inverse 2) holds", bad, 0))
    unit = ReinhardtDomain.polydisc([1.0, 1.0])
    est = ko.operator_norm_estimate(ko.matrix_of("identity", 2, 4), unit, unit, 0.8, 0.8, trials=3, rng=rng.spawn())
    rows.append(_row("identity norm estimate >= 1", 1.0 - est, 1e-6))
    return rows


def suite_circled(rng: SplitMix64, q: QuadratureSpec) -> list[Row]:
    rows = []
    poly, ball = ReinhardtDomain.polydisc([1.0, 1.0]), ReinhardtDomain.ball(1.0, 2)
    f = random_polynomial(2, 8, rng)
    dev = 0.0
    for k in mi.enumerate_primitives(2, 4):
        dev = max(dev, _coeff_diff(cc.project_quadrature(f, k, poly, 0.9, q), cc.project(f, k)))
    for k in [k for k in mi.enumerate_primitives(2, 4) if all(k)]:
        dev = max(dev, _coeff_diff(cc.project_quadrature(f, k, ball, 0.9, q), cc.project(f, k)))
    rows.append(_row("project_quadrature = project", dev, 1e-8))

    bad = 0
    ks = mi.enumerate_primitives(2, 5)
    for k in ks:
        pk = cc.project(f, k)
        bad += cc.project(pk, k) != pk
        bad += sum(not cc.project(pk, k2).is_zero() for k2 in ks if k2 != k)
    rows.append(_row("idempotence and orthogonality", bad, 0))
    dec = cc.decompose(f, poly, 8)
    rows.append(_row("decompose reconstructs degree-N polynomial",
                     _coeff_diff(dec.reconstruction(2, 8), f), 0.0))

    bad = 0
    for G in reinhardt_zoo(2):
        for r, s in [(0.5, 0.8), (0.3, 0.9), (0.25, 0.5)]:
            for _ in range(4):
                g = random_polynomial(2, 6, rng)
                for k in [(1, 1), (1, 2)]:
                    bad += not cc.projection_bound_check(g, k, G, r, s).ok
                    bad += not cc.topology_compare(cc.project(g, k), k, G, r, s).ok
                bad += not cc.identity_decomposition_check(g, G, r, s, 4).ok
    rows.append(_row("projection, topology and decomposition bounds", bad, 0))

    bad = 0
    for G in (poly, ball):
        for op in ko.zoo(2):
            A = ko.matrix_of(op, 2, 5)
            fam = cc.extract_blocks(A, G, G, probes=2, rng=rng.spawn(), trials=3)
            bad += cc.assemble(fam, A.column((0, 0))) != A
            bad += not fam.witnesses_ok
    rows.append(_row("extract/assemble round trip with witnesses", bad, 0))

    parts = {k: PowerSeries.monomial(k, 0.6 ** sum(k)) for k in mi.enumerate_primitives(2, 8)}
    fit = cc.growth_criterion(parts, poly, 1.0)
    rows.append(_row("growth criterion fits theta = 0.6", abs(fit.theta - 0.6), 0.02, ok=fit.ok and abs(fit.theta - 0.6) <= 0.02))
    flat = {k: PowerSeries.monomial(k) for k in mi.enumerate_primitives(2, 8)}
    rows.append(_row("constant-norm family rejected", cc.growth_criterion(flat, poly, 1.0).theta, 1.0,
                     ok=not cc.growth_criterion(flat, poly, 1.0).ok))
    return rows


SUITES: dict[str, Callable[[SplitMix64, QuadratureSpec], list[Row]]] = {
    "multiindex": suite_multiindex,
    "series": suite_series,
    "quadrature": suite_quadrature,
    "kernelop": suite_kernelop,
    "circled": suite_circled,
}


def run_suite(name: str, seed: int = 0, q: QuadratureSpec = QuadratureSpec()) -> list[Row]:
    """Rows of one suite, or of every suite for ``"all"`` (prefixed by suite)."""
    if name == "all":
        rows = []
        for key in SUITES:
            rows += [Row(f"{key}: {r.name}", r.value, r.bound, r.ok) for r in run_suite(key, seed, q)]
        return rows
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](SplitMix64(seed), q)
