"""Truncated multivariate power series and their complement-side
(Laurent) counterparts.

Coefficients are stored sparsely in graded-lex order; a missing index is
an exact zero. Truncation is by total degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _core
from . import multiindex as mi
from .domains import ReinhardtDomain


def _normalize(dim: int, trunc: int, coeffs: Mapping) -> dict:
    acc: dict = {}
    for m, c in coeffs.items():
        idx = mi.as_index(m)
        if len(idx) != dim:
            raise ValueError(f"index {idx} does not have length {dim}")
        if sum(idx) > trunc:
            raise ValueError(f"index {idx} exceeds truncation degree {trunc}")
        acc[idx] = acc.get(idx, 0j) + complex(c)
    return {m: acc[m] for m in sorted(acc, key=mi.grlex_key) if acc[m] != 0}


@dataclass(frozen=True, eq=True)
class _SparseSeries:
    dim: int
    trunc: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        if self.trunc < 0:
            raise ValueError("truncation degree must be >= 0")
        object.__setattr__(self, "coeffs", _normalize(self.dim, self.trunc, self.coeffs))

    def __getitem__(self, m) -> complex:
        return self.coeffs.get(tuple(m), 0j)

    def terms(self) -> list[tuple[tuple[int, ...], complex]]:
        return list(self.coeffs.items())

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.coeffs:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0, dtype=np.complex128)
        exps = np.array(list(self.coeffs), dtype=np.int64).reshape(-1, self.dim)
        vals = np.array(list(self.coeffs.values()), dtype=np.complex128)
        return exps, vals

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list[tuple[int, ...]]:
        return list(self.coeffs)

    def to_json(self) -> dict:
        return {
            "kind": self.KIND,
            "dim": self.dim,
            "trunc": self.trunc,
            "terms": [{"idx": list(m), "re": c.real, "im": c.imag} for m, c in self.coeffs.items()],
        }


class PowerSeries(_SparseSeries):
    """``f(z) = sum c_m z^m`` over ``|m| <= trunc``."""

    KIND = "power"

    @classmethod
    def constant(cls, dim: int, value: complex = 1.0, trunc: int = 0) -> "PowerSeries":
        return cls(dim, trunc, {(0,) * dim: value})

    @classmethod
    def monomial(cls, m: Sequence[int], coeff: complex = 1.0, trunc: int | None = None) -> "PowerSeries":
        m = mi.as_index(m)
        return cls(len(m), sum(m) if trunc is None else trunc, {m: coeff})

    @classmethod
    def from_function(cls, dim: int, trunc: int, rule: Callable) -> "PowerSeries":
        """Coefficients ``rule(m)`` for every ``|m| <= trunc``."""
        return cls(dim, trunc, {m: rule(m) for m in mi.indices_up_to(dim, trunc)})

    def __call__(self, point: Sequence[complex]) -> complex:
        point = np.asarray(point, dtype=np.complex128).reshape(1, self.dim)
        return complex(self.evaluate(point)[0])

    def evaluate(self, points) -> np.ndarray:
        """Values at an ``(M, dim)`` array of points."""
        points = np.asarray(points, dtype=np.complex128).reshape(-1, self.dim)
        exps, vals = self._arrays
        return _core.eval_terms(points, exps, vals)

    def max_degree(self) -> int:
        return max((sum(m) for m in self.coeffs), default=0)

    def with_trunc(self, trunc: int) -> "PowerSeries":
        """Re-truncate (dropping terms above ``trunc``)."""
        return PowerSeries(self.dim, trunc, {m: c for m, c in self.coeffs.items() if sum(m) <= trunc})

    def dilate(self, r: float) -> "PowerSeries":
        return dilate(self, r)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        return add(self, other)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(self.dim, self.trunc, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return add(self, -other)

    def scale(self, a: complex) -> "PowerSeries":
        return PowerSeries(self.dim, self.trunc, {m: a * c for m, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return multiply(self, other, max(self.trunc, other.trunc))
        return self.scale(other)

    __rmul__ = __mul__


class LaurentSeries(_SparseSeries):
    """``g(lam) = sum d_a lam^-(a + 1)``: vanishes as any ``|lam_j| -> oo``."""

    KIND = "laurent"

    def __call__(self, point: Sequence[complex]) -> complex:
        return complex(self.evaluate(np.asarray(point, dtype=np.complex128).reshape(1, self.dim))[0])

    def evaluate(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=np.complex128).reshape(-1, self.dim)
        zero = np.nonzero(points == 0)
        if zero[0].size:
            raise ZeroDivisionError(f"pole at coordinate {int(zero[1][0]) + 1}")
        exps, vals = self._arrays
        return _core.eval_terms(1.0 / points, exps + 1, vals)


def series_from_json(d: Mapping) -> PowerSeries | LaurentSeries:
    kind = d.get("kind", "power")
    cls = {"power": PowerSeries, "laurent": LaurentSeries}.get(kind)
    if cls is None:
        raise ValueError(f"unknown series kind {kind!r}")
    coeffs: dict = {}
    for t in d["terms"]:
        idx = tuple(int(e) for e in t["idx"])
        coeffs[idx] = coeffs.get(idx, 0j) + complex(t.get("re", 0.0), t.get("im", 0.0))
    return cls(int(d["dim"]), int(d["trunc"]), coeffs)


# --- arithmetic ------------------------------------------------------------

def _check_dims(f: _SparseSeries, g: _SparseSeries):
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")


def add(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    _check_dims(f, g)
    out = dict(f.coeffs)
    for m, c in g.coeffs.items():
        out[m] = out.get(m, 0j) + c
    return PowerSeries(f.dim, max(f.trunc, g.trunc), out)


def multiply(f: PowerSeries, g: PowerSeries, D: int) -> PowerSeries:
    """Cauchy product truncated at total degree D."""
    _check_dims(f, g)
    out: dict = {}
    for m1, c1 in f.coeffs.items():
        d1 = sum(m1)
        if d1 > D:
            continue
        for m2, c2 in g.coeffs.items():
            if d1 + sum(m2) > D:
                continue
            m = mi.add(m1, m2)
            out[m] = out.get(m, 0j) + c1 * c2
    return PowerSeries(f.dim, D, out)


def dilate(f: PowerSeries, r: float) -> PowerSeries:
    """``f_r(z) = f(r z)``."""
    if not r > 0:
        raise ValueError("dilation factor must be positive")
    return PowerSeries(f.dim, f.trunc, {m: c * r ** sum(m) for m, c in f.coeffs.items()})


def cauchy_kernel_series(zeta: Sequence[complex], D: int) -> PowerSeries:
    """Taylor coefficients in w of ``prod_j 1 / (w_j - zeta_j)``.

    ``(-1)^n sum_a w^a zeta^-(a + 1)`` truncated at ``|a| <= D``.
    """
    zeta = [complex(x) for x in zeta]
    for j, x in enumerate(zeta):
        if x == 0:
            raise ZeroDivisionError(f"pole at coordinate {j + 1}")
    n = len(zeta)
    sign = (-1) ** n
    inv = [1 / x for x in zeta]
    coeffs = {}
    for a in mi.indices_up_to(n, D):
        c = complex(sign)
        for x, e in zip(inv, a):
            c *= x ** (e + 1)
        coeffs[a] = c
    return PowerSeries(n, D, coeffs)


def random_polynomial(n: int, D: int, rng, scale: float = 1.0) -> PowerSeries:
    """Standard complex Gaussian coefficients on every ``|m| <= D``."""
    idx = mi.indices_up_to(n, D)
    vals = rng.complex_normals(len(idx))
    return PowerSeries(n, D, {m: scale * v for m, v in zip(idx, vals)})


# --- sup-norm brackets -----------------------------------------------------

@dataclass(frozen=True)
class Sampling:
    """Deterministic boundary sample used for sup-norm lower bounds.

    ``phases[n]`` equispaced phases per coordinate (including phase 0),
    ``profiles[n]`` simplex resolution of the modulus-profile grid.
    """

    phases: Mapping[int, int] = field(default_factory=lambda: {1: 512, 2: 48, 3: 12, 4: 6})
    profiles: Mapping[int, int] = field(default_factory=lambda: {1: 1, 2: 48, 3: 10, 4: 5})

    def n_phases(self, n: int) -> int:
        return self.phases.get(n, 4)

    def n_profiles(self, n: int) -> int:
        return self.profiles.get(n, 3)


DEFAULT_SAMPLING = Sampling()


def _phase_grid(n: int, q: int) -> np.ndarray:
    t = np.exp(2j * np.pi * np.arange(q) / q)
    grids = np.meshgrid(*([t] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _monomial_sup(radii: np.ndarray, m: Sequence[int]) -> float:
    out = 1.0
    for r, e in zip(radii, m):
        if e:
            out *= float(r) ** e
    return out


def sup_norm(f: PowerSeries, domain, r: float = 1.0,
             sampling: Sampling = DEFAULT_SAMPLING) -> tuple[float, float]:
    """Bracket ``sup |f|`` over ``r * domain``.

    ``domain`` is a ``ReinhardtDomain`` or a radius vector of a (possibly
    degenerate) centered polydisc. The lower value is the largest ``|f|``
    on a tensor grid of phases times boundary modulus profiles (the grid
    always contains the maximizing profile of every stored monomial); the
    upper value is ``sum |c_m| sup |z^m|``.
    """
    if not r > 0:
        raise ValueError("scale must be positive")
    if f.is_zero():
        return 0.0, 0.0
    n = f.dim
    if isinstance(domain, ReinhardtDomain):
        if domain.dim != n:
            raise ValueError("domain dimension does not match series")
        mono = {m: r ** sum(m) * domain.monomial_max(m) for m in f.coeffs}
        profiles = [domain.boundary_profiles(sampling.n_profiles(n))]
        if domain.kind != "polydisc":
            extra = {tuple(domain.eta_radii(m)) for m in f.coeffs if any(m)}
            if extra:
                profiles.append(np.asarray(sorted(extra)))
        profiles = r * np.concatenate(profiles, axis=0)
    else:
        radii = np.asarray(domain, dtype=float).reshape(-1)
        if radii.size != n or np.any(radii < 0):
            raise ValueError("polydisc radii must be nonnegative and match the series dimension")
        mono = {m: _monomial_sup(r * radii, m) for m in f.coeffs}
        profiles = (r * radii).reshape(1, n)

    upper = math.fsum(abs(c) * mono[m] for m, c in f.coeffs.items())
    if len(f.coeffs) == 1:
        return upper, upper

    phases = _phase_grid(n, sampling.n_phases(n))
    exps, vals = f._arrays
    pts = (profiles[:, None, :] * phases[None, :, :]).reshape(-1, n)
    lower = _core.max_abs_terms(pts, exps, vals)
    # roundoff only: the sampled points lie in the closure
    return min(lower, upper), upper
