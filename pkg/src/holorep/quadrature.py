"""Tensor trapezoid rules over products of circles.

Integrands are vectorized callables: they receive an ``(M, n)`` complex
array of nodes and return ``(M,)`` values, or ``(M, K)`` for K integrands
sharing the same nodes. Node counts are equal on every circle and are
doubled globally until two successive results agree.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _core
from . import multiindex as mi
from .domains import Contour, CylindricalDomain

_POINTS_PER_CHUNK = 1 << 16


class QuadratureError(ArithmeticError):
    """Raised when doubling stops short of the tolerance."""

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last


@dataclass(frozen=True)
class QuadratureSpec:
    """Trapezoid settings.

    Convergence is declared when ``|I_2N - I_N| <= tol * max(1, S)``,
    where ``S`` is the trapezoid sum of ``|integrand * dw|`` (the integral's
    natural roundoff scale).
    """

    nodes: int = 16
    tol: float = 1e-13
    max_doublings: int = 6

    def __post_init__(self):
        if self.nodes < 8 or self.nodes & (self.nodes - 1):
            raise ValueError("nodes per circle must be a power of two >= 8")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.max_doublings < 1:
            raise ValueError("need at least one doubling")


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class QuadratureResult:
    value: complex | np.ndarray
    nodes: int
    history: list = field(default_factory=list)


def _circle(center: complex, radius: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    e = np.exp(2j * np.pi * np.arange(N) / N)
    return center + radius * e, 1j * radius * e * (2 * np.pi / N)


def _trapezoid(f: Callable, C: Contour, N: int) -> tuple[np.ndarray, float]:
    n = C.dim
    pieces = [_circle(c, r, N) for c, r in zip(C.centers, C.radii)]
    if n > 1:
        rest_nodes = np.stack(
            [g.ravel() for g in np.meshgrid(*[p[0] for p in pieces[1:]], indexing="ij")], axis=1)
        rest_w = np.ones(rest_nodes.shape[0], dtype=np.complex128)
        for g in np.meshgrid(*[p[1] for p in pieces[1:]], indexing="ij"):
            rest_w = rest_w * g.ravel()
    else:
        rest_nodes = np.zeros((1, 0), dtype=np.complex128)
        rest_w = np.ones(1, dtype=np.complex128)
    block = max(1, _POINTS_PER_CHUNK // rest_nodes.shape[0])
    first_nodes, first_w = pieces[0]
    partial, scales = [], []
    for lo in range(0, N, block):
        fn = first_nodes[lo:lo + block]
        pts = np.concatenate(
            [np.repeat(fn, rest_nodes.shape[0])[:, None],
             np.tile(rest_nodes, (fn.size, 1))], axis=1)
        w = np.repeat(first_w[lo:lo + block], rest_w.size) * np.tile(rest_w, fn.size)
        vals = np.asarray(f(pts), dtype=np.complex128)
        weighted = vals * (w if vals.ndim == 1 else w[:, None])
        partial.append(weighted.sum(axis=0))
        scales.append(np.abs(weighted).sum(axis=0))
    return np.sum(np.asarray(partial), axis=0), float(np.max(np.sum(np.asarray(scales), axis=0)))


def integrate(f: Callable, C: Contour, q: QuadratureSpec = DEFAULT_SPEC) -> QuadratureResult:
    """Doubling trapezoid rule; keeps the full history of (N, value)."""
    N = q.nodes
    prev, _ = _trapezoid(f, C, N)
    history = [(N, prev)]
    for _ in range(q.max_doublings):
        N *= 2
        cur, scale = _trapezoid(f, C, N)
        history.append((N, cur))
        if np.max(np.abs(cur - prev)) <= q.tol * max(1.0, scale):
            return QuadratureResult(_unwrap(cur), N, history)
        prev = cur
    raise QuadratureError(
        f"trapezoid rule did not converge within {q.max_doublings} doublings "
        f"(N={N}, last change {np.max(np.abs(cur - history[-2][1])):.3e})",
        _unwrap(history[-2][1]), _unwrap(cur))


def _unwrap(v):
    v = np.asarray(v)
    return complex(v) if v.ndim == 0 else v


def contour_integral(f: Callable, C: Contour, q: QuadratureSpec = DEFAULT_SPEC):
    """``oint_C f(w) dw`` over the product of circles (positive orientation)."""
    return integrate(f, C, q).value


def _inside(C: Contour, z: np.ndarray) -> bool:
    d = np.abs(z - np.asarray(C.centers))
    return bool(np.all(d < np.asarray(C.radii)))


def cauchy_transform(f: Callable, C: Contour, z, q: QuadratureSpec = DEFAULT_SPEC):
    """``(2 pi i)^-n oint f(w) / prod (w_j - z_j) dw`` at one or many points."""
    z = np.asarray(z, dtype=np.complex128)
    single = z.ndim == 1
    z = z.reshape(-1, C.dim)
    if not _inside(C, z):
        raise ValueError("evaluation point must lie strictly inside the contour polydisc")

    def integrand(w):
        fw = np.asarray(f(w), dtype=np.complex128)
        den = np.ones((w.shape[0], z.shape[0]), dtype=np.complex128)
        for j in range(C.dim):
            den = den * (w[:, j, None] - z[None, :, j])
        return fw[:, None] / den

    val = np.atleast_1d(contour_integral(integrand, C, q)) / (2j * np.pi) ** C.dim
    return complex(val[0]) if single else val


def taylor_coeffs(f: Callable, C: Contour, alphas: Sequence[Sequence[int]],
                  q: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Taylor coefficients ``c_a`` for every ``a`` in ``alphas``."""
    if not C.is_centered:
        raise ValueError("Taylor coefficients need circles centered at the origin")
    exps = np.asarray([mi.as_index(a) for a in alphas], dtype=np.int64).reshape(-1, C.dim)

    def integrand(w):
        fw = np.asarray(f(w), dtype=np.complex128)
        inv = 1.0 / w
        powers = np.ones((w.shape[0], exps.shape[0]), dtype=np.complex128)
        for j in range(C.dim):
            powers = powers * inv[:, j, None] ** (exps[None, :, j] + 1)
        return fw[:, None] * powers

    return np.atleast_1d(contour_integral(integrand, C, q)) / (2j * np.pi) ** C.dim


def taylor_coeff(f: Callable, C: Contour, alpha: Sequence[int],
                 q: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """``(2 pi i)^-n oint f(w) w^-a dw / w``."""
    return complex(taylor_coeffs(f, C, [alpha], q)[0])


def series_integrand(series) -> Callable:
    """Adapt a series object with ``.evaluate`` to the integrand protocol."""
    return series.evaluate


# --- boundary component split ----------------------------------------------

@dataclass(frozen=True)
class SplitComponent:
    """One boundary component of a function on a product of annuli.

    ``selector[j]`` is ``"outer"`` or ``"inner"``. With ``u = z - center``
    the component is ``sum c_e prod_j u_j^{s_j(e_j)}`` where
    ``s_j(e) = e`` on outer coordinates and ``-(e + 1)`` on inner ones.
    """

    selector: tuple[str, ...]
    centers: tuple[complex, ...]
    trunc: int
    coeffs: dict

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128).reshape(-1, len(self.selector))
        u = z - np.asarray(self.centers)
        if not self.coeffs:
            return np.zeros(z.shape[0], dtype=np.complex128)
        exps = np.asarray(list(self.coeffs), dtype=np.int64)
        vals = np.asarray(list(self.coeffs.values()), dtype=np.complex128)
        inner = np.asarray([s == "inner" for s in self.selector])
        with np.errstate(divide="ignore", invalid="ignore"):
            pts = np.where(inner, 1.0 / u, u)
        return _core.eval_terms(pts, exps + inner.astype(np.int64), vals)

    def is_zero(self, atol: float = 0.0) -> bool:
        return all(abs(c) <= atol for c in self.coeffs.values())

    def to_series(self):
        """PowerSeries (all outer) or LaurentSeries (all inner), centered at 0."""
        from .series import LaurentSeries, PowerSeries
        if any(c != 0 for c in self.centers):
            raise ValueError("only centered components convert to stored series")
        n = len(self.selector)
        if all(s == "outer" for s in self.selector):
            return PowerSeries(n, self.trunc, self.coeffs)
        if all(s == "inner" for s in self.selector):
            return LaurentSeries(n, self.trunc, self.coeffs)
        raise ValueError("mixed components have no stored series type")


def _selectors(A: CylindricalDomain) -> list[tuple[str, ...]]:
    opts = [("outer",) if f.kind == "disc" else ("outer", "inner") for f in A.factors]
    return list(itertools.product(*opts))


def _selected_circles(A: CylindricalDomain, selector) -> tuple[Contour, int]:
    centers, radii, sign = [], [], 1
    for f, s in zip(A.factors, selector):
        centers.append(f.center)
        if s == "outer":
            radii.append(f.radius if f.kind == "disc" else f.outer)
        else:
            if f.kind != "annulus":
                raise ValueError("only annuli have inner boundary circles")
            radii.append(f.inner)
            sign = -sign
    return Contour(tuple(centers), tuple(radii)), sign


def boundary_component_split(f: Callable, A: CylindricalDomain, trunc: int,
                             q: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Split f over the boundary-circle combinations of a product of annuli.

    Returns ``{selector: SplitComponent}``; the components sum to f on A
    (up to the truncation degree of the stored expansions).
    """
    n = A.dim
    idx = mi.indices_up_to(n, trunc)
    exps = np.asarray(idx, dtype=np.int64).reshape(-1, n)
    out = {}
    for sel in _selectors(A):
        C, _ = _selected_circles(A, sel)
        inner = np.asarray([s == "inner" for s in sel])
        # power of (w - a) in the integrand: -(e + 1) outer, e inner
        powers_exp = np.where(inner[None, :], exps, -(exps + 1))
        centers = np.asarray(C.centers)

        def integrand(w, powers_exp=powers_exp, centers=centers):
            fw = np.asarray(f(w), dtype=np.complex128)
            u = w - centers
            acc = np.ones((w.shape[0], powers_exp.shape[0]), dtype=np.complex128)
            for j in range(n):
                acc = acc * u[:, j, None] ** powers_exp[None, :, j]
            return fw[:, None] * acc

        vals = np.atleast_1d(contour_integral(integrand, C, q)) / (2j * np.pi) ** n
        out[sel] = SplitComponent(sel, C.centers, trunc, {m: complex(v) for m, v in zip(idx, vals)})
    return out


def component_value(f: Callable, A: CylindricalDomain, selector, z,
                    q: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Evaluate one component directly from its defining Cauchy integral."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1, A.dim)
    C, sign = _selected_circles(A, tuple(selector))

    def integrand(w):
        fw = np.asarray(f(w), dtype=np.complex128)
        den = np.ones((w.shape[0], z.shape[0]), dtype=np.complex128)
        for j in range(A.dim):
            den = den * (w[:, j, None] - z[None, :, j])
        return fw[:, None] / den

    return sign * np.atleast_1d(contour_integral(integrand, C, q)) / (2j * np.pi) ** A.dim


def reconstruct(f: Callable, A: CylindricalDomain, z, q: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Sum of all boundary components at z (should equal f on A)."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1, A.dim)
    total = np.zeros(z.shape[0], dtype=np.complex128)
    for sel in _selectors(A):
        total = total + component_value(f, A, sel, z, q)
    return total


def boundary_lengths(C: Contour) -> float:
    return math.prod(C.lengths())
