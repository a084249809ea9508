"""Projections onto the subspaces ``H_k`` on complete Reinhardt domains.

``P_k`` keeps the Taylor coefficients on positive multiples of the
primitive index ``k``; ``P_0`` keeps the constant. Together they resolve
the identity, and an operator splits into the blocks ``A o P_k``, each of
which only sees the polydisc ``Delta(k)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import multiindex as mi
from .domains import Contour, ReinhardtDomain, delta
from .kernelop import OperatorMatrix, operator_norm_estimate
from .quadrature import DEFAULT_SPEC, QuadratureSpec, contour_integral, taylor_coeffs
from .rng import SplitMix64
from .series import PowerSeries, random_polynomial, sup_norm

SLACK = 1e-9


class UniformBoundWarning(UserWarning):
    """A block family failed the uniform bound on a probe."""


def _leq(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + SLACK * max(1.0, abs(rhs))


def _check_scales(r: float, s: float):
    if not 0 < r < s < 1:
        raise ValueError("need 0 < r < s < 1")


@dataclass
class ProjectionFamily:
    """Primitive indices up to degree N with their polydiscs."""

    domain: ReinhardtDomain
    N: int
    primitives: tuple = ()
    deltas: dict = field(default_factory=dict)

    def __post_init__(self):
        self.primitives = mi.enumerate_primitives(self.domain.dim, self.N)
        self.deltas = {k: delta(self.domain, k) for k in self.primitives}


# --- projections -----------------------------------------------------------

def project(f: PowerSeries, k: Sequence[int]) -> PowerSeries:
    """Coefficient filter onto ``span{z^(l k) : l >= 1}``."""
    k = mi.as_index(k)
    if not mi.is_primitive(k):
        raise ValueError(f"{k} is not primitive")
    return PowerSeries(f.dim, f.trunc,
                       {m: c for m, c in f.coeffs.items() if mi.is_multiple_of(m, k)})


def project_zero(f: PowerSeries) -> complex:
    return f[(0,) * f.dim]


def _contour_for(domain: ReinhardtDomain, k, s: float) -> Contour:
    radii = s * np.asarray(delta(domain, k))
    if np.any(radii <= 0):
        raise ValueError("degenerate Δ(k); use coefficient form")
    return Contour.centered(radii)


def project_quadrature(f, k: Sequence[int], domain: ReinhardtDomain, s: float,
                       q: QuadratureSpec = DEFAULT_SPEC, trunc: int | None = None) -> PowerSeries:
    """``P_k f`` from contour integrals over ``s * boundary_0 Delta(k)``.

    ``f`` is a PowerSeries or a vectorized callable (then ``trunc`` is
    required).
    """
    k = mi.as_index(k)
    C = _contour_for(domain, k, s)
    if isinstance(f, PowerSeries):
        trunc = f.trunc if trunc is None else trunc
        fun = f.evaluate
    else:
        if trunc is None:
            raise ValueError("callable integrands need an explicit truncation")
        fun = f
    alphas = [mi.scale(k, l) for l in range(1, trunc // sum(k) + 1)]
    if not alphas:
        return PowerSeries(len(k), trunc, {})
    vals = taylor_coeffs(fun, C, alphas, q)
    return PowerSeries(len(k), trunc, {a: complex(v) for a, v in zip(alphas, vals)})


def project_value_quadrature(f, k: Sequence[int], domain: ReinhardtDomain, s: float, z,
                             q: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """``z^k (2 pi i)^-n oint f(zeta) / (zeta^k - z^k) dzeta / zeta`` pointwise.

    Requires ``|z^k| < |zeta^k|`` on the contour.
    """
    k = mi.as_index(k)
    C = _contour_for(domain, k, s)
    fun = f.evaluate if isinstance(f, PowerSeries) else f
    z = np.asarray(z, dtype=np.complex128).reshape(-1, len(k))
    zk = np.prod(z ** np.asarray(k), axis=1)
    if np.any(np.abs(zk) >= math.prod(r**e for r, e in zip(C.radii, k))):
        raise ValueError("need |z^k| below its contour value")

    def integrand(w):
        wk = np.prod(w ** np.asarray(k), axis=1)
        return (fun(w) / np.prod(w, axis=1))[:, None] / (wk[:, None] - zk[None, :])

    vals = np.atleast_1d(contour_integral(integrand, C, q))
    return zk * vals / (2j * np.pi) ** len(k)


# --- decomposition and estimates -------------------------------------------

def tail_sum(n: int, N: int, theta: float) -> float:
    """``sum_{m >= N} C(n + m - 1, n - 1) theta^m`` summed to convergence."""
    if not 0 <= theta < 1:
        raise ValueError("need 0 <= theta < 1")
    if theta == 0:
        return 1.0 if N == 0 else 0.0
    terms, m = [], N
    while True:
        t = mi.count_degree(n, m) * theta**m
        terms.append(t)
        if m > N + n and t <= 1e-18 * math.fsum(terms):
            break
        m += 1
    return math.fsum(terms)


@dataclass
class Decomposition:
    p0: complex
    parts: dict
    residual: PowerSeries
    residual_bound: float

    def reconstruction(self, dim: int, trunc: int) -> PowerSeries:
        out = PowerSeries(dim, trunc, {(0,) * dim: self.p0})
        for part in self.parts.values():
            out = out + part
        return out


def decompose(f: PowerSeries, domain: ReinhardtDomain, N: int,
              r: float = 0.5, s: float = 0.9) -> Decomposition:
    """``f = P_0 f + sum_{|k| <= N} P_k f + residual``.

    The bound is ``c ||f||_{sG} sum_{m >= N} C(n+m-1, n-1) theta^m`` with
    ``theta = r/s`` and ``c = 2`` when ``theta^N <= 1/2`` (``1/(1 - theta^N)``
    otherwise), a bound for ``||residual||_{rG}``.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    _check_scales(r, s)
    parts = {k: project(f, k) for k in mi.enumerate_primitives(f.dim, N)}
    p0 = project_zero(f)
    kept = set()
    for part in parts.values():
        kept.update(part.coeffs)
    residual = PowerSeries(f.dim, f.trunc,
                           {m: c for m, c in f.coeffs.items() if any(m) and m not in kept})
    theta = r / s
    factor = 2.0 if theta**N <= 0.5 else 1.0 / (1.0 - theta**N)
    bound = factor * sup_norm(f, domain, s)[1] * tail_sum(f.dim, N, theta)
    return Decomposition(p0, parts, residual, bound)


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    ok: bool


def projection_bound_check(f: PowerSeries, k: Sequence[int], domain: ReinhardtDomain,
                           r: float, s: float) -> BoundCheck:
    """``||P_k f||_{r Delta(k)} <= r^|k| / (s^|k| - r^|k|) ||f||_{s Delta(k)}``."""
    _check_scales(r, s)
    k = mi.as_index(k)
    dk = delta(domain, k)
    d = sum(k)
    lhs = sup_norm(project(f, k), dk, r)[0]
    rhs = r**d / (s**d - r**d) * sup_norm(f, dk, s)[1]
    return BoundCheck(lhs, rhs, _leq(lhs, rhs))


def topology_compare(f: PowerSeries, k: Sequence[int], domain: ReinhardtDomain,
                     r: float, s: float) -> BoundCheck:
    """``||f||_{rG} <= ||f||_{s Delta(k)} * t / (1 - t)``, ``t = (r/s)^|k|``, on ``H_k``."""
    _check_scales(r, s)
    k = mi.as_index(k)
    if any(not mi.is_multiple_of(m, k) for m in f.coeffs):
        raise ValueError(f"series is not supported on multiples of {k}")
    t = (r / s) ** sum(k)
    lhs = sup_norm(f, domain, r)[0]
    rhs = sup_norm(f, delta(domain, k), s)[1] * t / (1.0 - t)
    return BoundCheck(lhs, rhs, _leq(lhs, rhs))


@dataclass
class GrowthFit:
    C: float
    theta: float
    ok: bool
    finite_support: bool = False


def growth_criterion(parts: Mapping, domain: ReinhardtDomain, r: float,
                     theta_margin: float = 1e-6) -> GrowthFit:
    """Fit ``||Q_k||_{rG} <= C theta^|k|``.

    ``theta`` comes from a least-squares fit of ``log ||Q_k||`` against
    ``|k|`` over the nonzero parts and ``C`` is the smallest constant
    covering every part. A family whose nonzero parts stop below its
    largest degree is finitely supported and accepted (any theta < 1 fits).
    """
    if not parts:
        raise ValueError("empty family")
    degs, logs = [], []
    top = 0
    for k, Q in parts.items():
        top = max(top, sum(k))
        nrm = sup_norm(Q, domain, r)[1]
        if nrm > 0:
            degs.append(sum(k))
            logs.append(math.log(nrm))
    if not degs:
        return GrowthFit(0.0, 0.0, True, True)
    finite = max(degs) < top
    if len(set(degs)) > 1:
        slope = np.polyfit(np.asarray(degs, float), np.asarray(logs), 1)[0]
        theta = float(math.exp(slope))
    else:
        theta = 0.5
    if finite and theta >= 1:
        theta = 0.5
    C = max(math.exp(lg) / theta**d for d, lg in zip(degs, logs))
    ok = finite or theta < 1 - theta_margin
    return GrowthFit(C, theta, ok, finite)


@dataclass
class DecompositionCheck:
    error_norm: float
    tail_bound: float
    ok: bool


def identity_decomposition_check(f: PowerSeries, domain: ReinhardtDomain, r: float, s: float,
                                 N: int) -> DecompositionCheck:
    """``||f - P_0 f - sum_{|k| < N} P_k f||_{rG} <= 2 ||f||_{sG} sum_{m >= N} C(n+m-1, n-1) theta^m``."""
    _check_scales(r, s)
    theta = r / s
    if N < 1 or theta**N > 0.5:
        raise ValueError("need N >= 1 with (r/s)^N <= 1/2")
    kept = set()
    if N > 1:
        for k in mi.enumerate_primitives(f.dim, N - 1):
            kept.update(project(f, k).coeffs)
    rem = PowerSeries(f.dim, f.trunc, {m: c for m, c in f.coeffs.items() if any(m) and m not in kept})
    err = sup_norm(rem, domain, r)[0]
    bound = 2.0 * sup_norm(f, domain, s)[1] * tail_sum(f.dim, N, theta)
    return DecompositionCheck(err, bound, _leq(err, bound))


# --- block extraction and assembly -----------------------------------------

@dataclass
class Witness:
    k: tuple
    lhs: float
    rhs: float
    ok: bool


@dataclass
class BlockFamily:
    """Blocks ``A o P_k`` with the constants of the uniform estimate."""

    dim_in: int
    dim_out: int
    trunc_in: int
    trunc_out: int
    blocks: dict
    C: float
    s: float
    r: float = 0.5
    t: float = 0.5
    eps: float = math.inf
    domain_in: ReinhardtDomain | None = None
    domain_out: ReinhardtDomain | None = None
    constant: PowerSeries | None = None
    witnesses: list = field(default_factory=list)

    def carrier(self, k) -> np.ndarray:
        """Radii of ``L_k = s * Delta(k)``."""
        return self.s * np.asarray(delta(self.domain_in, k))

    @property
    def witnesses_ok(self) -> bool:
        return all(w.ok for w in self.witnesses)

    def to_json(self) -> dict:
        out = {
            "domain": self.domain_in.to_json() if self.domain_in else None,
            "domain_out": self.domain_out.to_json() if self.domain_out else None,
            "dim_in": self.dim_in, "dim_out": self.dim_out,
            "trunc_in": self.trunc_in, "trunc_out": self.trunc_out,
            "s": self.s, "r": self.r, "t": self.t,
            "C": self.C if math.isfinite(self.C) else None,
            "eps": self.eps if math.isfinite(self.eps) else None,
            "blocks": [{"k": list(k), "matrix": m.to_json()} for k, m in self.blocks.items()],
        }
        if self.constant is not None:
            out["constant"] = self.constant.to_json()
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> "BlockFamily":
        from .domains import domain_from_json
        from .series import series_from_json
        blocks = {tuple(b["k"]): OperatorMatrix.from_json(b["matrix"]) for b in d.get("blocks", [])}
        dom = domain_from_json(d["domain"]) if d.get("domain") else None
        dom_out = domain_from_json(d["domain_out"]) if d.get("domain_out") else None
        dim_in = d.get("dim_in") or (dom.dim if dom else None)
        if dim_in is None:
            raise ValueError("block family needs dim_in or a domain")
        dim_out = d.get("dim_out", dim_in)
        const = series_from_json(d["constant"]) if d.get("constant") else None
        C = d.get("C")
        eps = d.get("eps")
        return cls(int(dim_in), int(dim_out), int(d.get("trunc_in", 0)), int(d.get("trunc_out", 0)),
                   blocks, math.inf if C is None else float(C), float(d.get("s", 0.8)),
                   float(d.get("r", 0.5)), float(d.get("t", 0.5)),
                   math.inf if eps is None else float(eps), dom, dom_out, const)


def _restrict_columns(A: OperatorMatrix, k: tuple) -> OperatorMatrix:
    return OperatorMatrix(A.dim_in, A.dim_out, A.trunc_in, A.trunc_out,
                          {(b, a): v for (b, a), v in A.entries.items() if mi.is_multiple_of(a, k)})


def extract_blocks(A: OperatorMatrix, G1: ReinhardtDomain, G2: ReinhardtDomain,
                   N: int | None = None, r: float = 0.5, s: float = 0.8, t: float = 0.5,
                   eps: float | None = None, probes: int = 3,
                   rng: SplitMix64 | int = 0, trials: int = 10) -> BlockFamily:
    """Split A into the blocks ``A o P_k`` for primitive ``|k| <= N``.

    Unless given, ``eps`` is the reciprocal of ``operator_norm_estimate(A,
    G1, G2, t, r)``. Each block is checked on random probes against
    ``||A P_k f||_{tG2} <= r^|k| / (eps (s^|k| - r^|k|)) ||f||_{s Delta(k)}``.
    """
    _check_scales(r, s)
    if not 0 < t < 1:
        raise ValueError("need 0 < t < 1")
    if G1.dim != A.dim_in or G2.dim != A.dim_out:
        raise ValueError("domain dimensions do not match the operator")
    rng = SplitMix64(rng) if isinstance(rng, int) else rng
    N = A.trunc_in if N is None else N
    if eps is None:
        est = operator_norm_estimate(A, G1, G2, t, r, trials=trials, rng=rng.spawn())
        eps = 1.0 / est if est > 0 else math.inf
    blocks = {k: _restrict_columns(A, k) for k in mi.enumerate_primitives(A.dim_in, N)} if N >= 1 else {}
    C = r / (eps * (s - r)) if math.isfinite(eps) else 0.0
    fam = BlockFamily(A.dim_in, A.dim_out, A.trunc_in, A.trunc_out, blocks, C, s, r, t, eps,
                      G1, G2, A.column((0,) * A.dim_in))
    for k, B in blocks.items():
        d = sum(k)
        const = r**d / (eps * (s**d - r**d)) if math.isfinite(eps) else 0.0
        dk = delta(G1, k)
        for _ in range(probes):
            f = random_polynomial(A.dim_in, A.trunc_in, rng)
            lhs = sup_norm(B.apply(f), G2, t)[0]
            rhs = const * sup_norm(f, dk, s)[1]
            fam.witnesses.append(Witness(k, lhs, rhs, _leq(lhs, rhs)))
    return fam


def assemble(family: BlockFamily, constant_part: PowerSeries | None = None,
             G1: ReinhardtDomain | None = None, G2: ReinhardtDomain | None = None,
             probes: int = 2, rng: SplitMix64 | int = 1) -> OperatorMatrix:
    """``A = constant_part o P_0 + sum_k A_k o P_k`` as one matrix.

    ``constant_part`` is the image of the constant 1 (zero by default, so
    the result kills constants). Blocks with entries outside their own
    columns ``l k`` are rejected. With domains available, the uniform
    bound ``||A_k f||_{tG2} <= C ||f||_{s Delta(k)}`` is probed and a
    ``UniformBoundWarning`` is issued when it fails.
    """
    trunc_in, trunc_out = family.trunc_in, family.trunc_out
    entries: dict = {}
    for k, B in family.blocks.items():
        if B.dim_in != family.dim_in or B.dim_out != family.dim_out:
            raise ValueError(f"block {k} has the wrong dimensions")
        for (b, a), v in B.entries.items():
            if not mi.is_multiple_of(a, k):
                raise ValueError(f"malformed block {k}: entry in column {a}")
            entries[(b, a)] = v
        trunc_in = max(trunc_in, B.trunc_in)
        trunc_out = max(trunc_out, B.trunc_out)
    if constant_part is not None:
        if constant_part.dim != family.dim_out:
            raise ValueError("constant part has the wrong dimension")
        zero = (0,) * family.dim_in
        for b, v in constant_part.coeffs.items():
            entries[(b, zero)] = v
        trunc_out = max(trunc_out, constant_part.trunc)
    A = OperatorMatrix(family.dim_in, family.dim_out, trunc_in, trunc_out, entries)

    G1 = G1 or family.domain_in
    G2 = G2 or family.domain_out
    rng = SplitMix64(rng) if isinstance(rng, int) else rng
    for k, B in family.blocks.items():
        for _ in range(probes):
            f = random_polynomial(family.dim_in, B.trunc_in, rng)
            g = project(f, k)
            if A.apply(g).coeffs != B.apply(g).coeffs:
                raise AssertionError(f"assembled operator disagrees with block {k} on H_k")
            if G1 is not None and G2 is not None and math.isfinite(family.C):
                lhs = sup_norm(B.apply(f), G2, family.t)[0]
                rhs = family.C * sup_norm(f, delta(G1, k), family.s)[1]
                if not _leq(lhs, rhs):
                    warnings.warn(f"block {k} violates the uniform bound ({lhs:.3e} > {rhs:.3e})",
                                  UniformBoundWarning, stacklevel=2)
    return A
