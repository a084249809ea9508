"""Domain descriptors: cylindrical domains built from discs and annuli,
bounded complete Reinhardt domains, and circle contours.

The geometry of the projection family lives here too: the maximizers of
``|z^k|`` on the boundary of a Reinhardt domain and the polydiscs they
span.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import multiindex as mi

_KKT_TOL = 1e-10


# --- planar pieces and cylinders -------------------------------------------

@dataclass(frozen=True)
class PlanarFactor:
    """An open disc or annulus in the plane."""

    kind: str
    center: complex = 0j
    radius: float = 0.0
    inner: float = 0.0
    outer: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.kind == "disc":
            if not self.radius > 0:
                raise ValueError("disc radius must be positive")
        elif self.kind == "annulus":
            if not 0 < self.inner < self.outer:
                raise ValueError("annulus needs 0 < inner < outer")
        else:
            raise ValueError(f"unknown planar factor kind {self.kind!r}")

    @classmethod
    def disc(cls, center=0j, radius=1.0) -> "PlanarFactor":
        return cls("disc", center, radius=float(radius))

    @classmethod
    def annulus(cls, center=0j, inner=0.5, outer=1.0) -> "PlanarFactor":
        return cls("annulus", center, inner=float(inner), outer=float(outer))

    def contains(self, z) -> bool:
        if _is_infinite(z):
            return False
        d = abs(complex(z) - self.center)
        if self.kind == "disc":
            return d < self.radius
        return self.inner < d < self.outer

    def circles(self) -> list[tuple[complex, float, int]]:
        """Boundary circles as (center, radius, orientation)."""
        if self.kind == "disc":
            return [(self.center, self.radius, 1)]
        return [(self.center, self.outer, 1), (self.center, self.inner, -1)]

    def to_json(self) -> dict:
        c = [self.center.real, self.center.imag]
        if self.kind == "disc":
            return {"kind": "disc", "center": c, "radius": self.radius}
        return {"kind": "annulus", "center": c, "inner": self.inner, "outer": self.outer}


def _is_infinite(z) -> bool:
    return z is None or cmath.isinf(complex(z))


@dataclass(frozen=True)
class ComplementFactor:
    """Complement of a planar factor in the Riemann sphere (closed set)."""

    base: PlanarFactor

    def components(self) -> list[str]:
        return ["exterior"] if self.base.kind == "disc" else ["inner", "exterior"]

    def contains(self, lam) -> bool:
        if _is_infinite(lam):
            return True
        d = abs(complex(lam) - self.base.center)
        if self.base.kind == "disc":
            return d >= self.base.radius
        return d <= self.base.inner or d >= self.base.outer

    def component_of(self, lam) -> str | None:
        if not self.contains(lam):
            return None
        if _is_infinite(lam):
            return "exterior"
        d = abs(complex(lam) - self.base.center)
        if self.base.kind == "annulus" and d <= self.base.inner:
            return "inner"
        return "exterior"


@dataclass(frozen=True)
class ComplementCylinder:
    factors: tuple[ComplementFactor, ...]

    @property
    def dim(self) -> int:
        return len(self.factors)

    def contains(self, lam: Sequence) -> bool:
        if len(lam) != self.dim:
            raise ValueError("dimension mismatch")
        return all(f.contains(x) for f, x in zip(self.factors, lam))


@dataclass(frozen=True)
class CylindricalDomain:
    """Product of discs and annuli."""

    factors: tuple[PlanarFactor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("cylindrical domain needs at least one factor")

    @property
    def dim(self) -> int:
        return len(self.factors)

    def contains(self, z: Sequence) -> bool:
        if len(z) != self.dim:
            raise ValueError("dimension mismatch")
        return all(f.contains(x) for f, x in zip(self.factors, z))

    def to_json(self) -> dict:
        return {"kind": "cylinder", "factors": [f.to_json() for f in self.factors]}


def complement_cylinder(E: CylindricalDomain) -> ComplementCylinder:
    """The product of the factorwise complements in the Riemann sphere."""
    return ComplementCylinder(tuple(ComplementFactor(f) for f in E.factors))


# --- Reinhardt domains -----------------------------------------------------

@dataclass(frozen=True)
class ReinhardtDomain:
    """Bounded complete Reinhardt domain.

    ``kind`` is ``"polydisc"``, ``"ball"`` or ``"pellipsoid"``. A ball is
    stored with equal radii and exponents 2; the p-ellipsoid is
    ``{z : sum (|z_j| / r_j)**p_j < 1}``.
    """

    kind: str
    radii: tuple[float, ...]
    p: tuple[float, ...] = field(default=())

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii or any(not r > 0 for r in radii):
            raise ValueError("radii must be positive")
        if self.kind == "ball":
            if len(set(radii)) != 1:
                raise ValueError("ball needs equal radii")
            object.__setattr__(self, "p", (2.0,) * len(radii))
        elif self.kind == "pellipsoid":
            p = tuple(float(x) for x in self.p)
            if len(p) != len(radii) or any(not x > 0 for x in p):
                raise ValueError("p-ellipsoid needs one positive exponent per radius")
            object.__setattr__(self, "p", p)
        elif self.kind == "polydisc":
            object.__setattr__(self, "p", ())
        else:
            raise ValueError(f"unknown Reinhardt domain kind {self.kind!r}")

    @classmethod
    def polydisc(cls, radii: Sequence[float]) -> "ReinhardtDomain":
        return cls("polydisc", tuple(radii))

    @classmethod
    def ball(cls, radius: float = 1.0, n: int = 2) -> "ReinhardtDomain":
        return cls("ball", (float(radius),) * n)

    @classmethod
    def pellipsoid(cls, radii: Sequence[float], p: Sequence[float]) -> "ReinhardtDomain":
        return cls("pellipsoid", tuple(radii), tuple(p))

    @property
    def dim(self) -> int:
        return len(self.radii)

    def scaled(self, c: float) -> "ReinhardtDomain":
        if not c > 0:
            raise ValueError("scale must be positive")
        return ReinhardtDomain(self.kind, tuple(c * r for r in self.radii), self.p)

    def gauge(self, rho: Sequence[float]) -> float:
        """Minkowski-type gauge of a modulus vector: < 1 inside, = 1 on the boundary."""
        rho = np.abs(np.asarray(rho, dtype=float))
        r = np.asarray(self.radii)
        if self.kind == "polydisc":
            return float(np.max(rho / r))
        return float(np.sum((rho / r) ** np.asarray(self.p)))

    def contains(self, z: Sequence) -> bool:
        return self.gauge(np.abs(np.asarray(z, dtype=complex))) < 1.0

    def profile(self, u: Sequence[float]) -> np.ndarray:
        """Boundary modulus vector for simplex weights ``u`` (sum 1)."""
        u = np.asarray(u, dtype=float)
        r = np.asarray(self.radii)
        if self.kind == "polydisc":
            return r.copy()
        return r * np.power(u, 1.0 / np.asarray(self.p))

    def boundary_profiles(self, resolution: int) -> np.ndarray:
        """Deterministic sample of modulus vectors on the outer boundary."""
        if self.kind == "polydisc":
            return np.asarray([self.radii])
        grid = [np.asarray(m, dtype=float) / resolution
                for m in mi.indices_of_degree(self.dim, resolution)]
        return np.asarray([self.profile(u) for u in grid])

    def eta_radii(self, k: Sequence[int]) -> np.ndarray:
        return np.asarray(_eta_radii(self, mi.as_index(k)))

    def monomial_max(self, k: Sequence[int]) -> float:
        return monomial_max(self, k)

    def to_json(self) -> dict:
        if self.kind == "polydisc":
            return {"kind": "polydisc", "radii": list(self.radii)}
        if self.kind == "ball":
            return {"kind": "ball", "radius": self.radii[0], "dim": self.dim}
        return {"kind": "pellipsoid", "radii": list(self.radii), "p": list(self.p)}


def polydisc(radii: Sequence[float]) -> ReinhardtDomain:
    return ReinhardtDomain.polydisc(radii)


# --- monomial maximization -------------------------------------------------

@lru_cache(maxsize=4096)
def _eta_radii(G: ReinhardtDomain, k: tuple[int, ...]) -> tuple[float, ...]:
    if len(k) != G.dim:
        raise ValueError("multi-index length does not match domain dimension")
    if not any(k):
        raise ValueError("eta_radii needs a nonzero index")
    if G.kind == "polydisc":
        # |z^k| is nondecreasing in every radius; the tie-break takes full radii
        return G.radii
    # Lagrange solve of max sum k_j log rho_j on sum u_j = 1, u_j = (rho_j/r_j)^p_j:
    # u_j is proportional to k_j / p_j, zero where k_j = 0
    w = np.array([kj / pj for kj, pj in zip(k, G.p)])
    u = w / w.sum()
    rho = G.profile(u)
    res = _kkt_residual(G, k, rho)
    if res > _KKT_TOL:
        raise ArithmeticError(f"monomial maximizer failed KKT check (residual {res:.2e})")
    return tuple(float(x) for x in rho)


def _kkt_residual(G: ReinhardtDomain, k: Sequence[int], rho: np.ndarray) -> float:
    r = np.asarray(G.radii)
    p = np.asarray(G.p)
    u = (rho / r) ** p
    active = np.asarray(k) > 0
    kk = np.asarray(k, dtype=float)
    # stationarity k_j = mu p_j u_j on the active set, with one common mu
    mu = kk[active].sum() / (p[active] * u[active]).sum()
    stat = np.abs(kk[active] - mu * p[active] * u[active]) / kk[active].sum()
    return float(max(stat.max(initial=0.0), abs(u.sum() - 1.0)))


def eta_kkt_residual(G: ReinhardtDomain, k: Sequence[int]) -> float:
    """KKT residual of the returned maximizer (0 for polydiscs)."""
    if G.kind == "polydisc":
        return 0.0
    return _kkt_residual(G, k, G.eta_radii(k))


def eta_radii(G: ReinhardtDomain, k: Sequence[int]) -> np.ndarray:
    """Modulus vector of a maximizer of ``|z^k|`` on the boundary of G.

    Closed form for every supported kind; coordinates with ``k_j = 0``
    are zero for balls and p-ellipsoids (the maximizer is unique there)
    and full for polydiscs.
    """
    return G.eta_radii(k)


def monomial_max(G: ReinhardtDomain, k: Sequence[int]) -> float:
    """``max |z^k|`` over the closure of G, with ``0**0 = 1``."""
    k = mi.as_index(k)
    if not any(k):
        return 1.0
    rho = G.eta_radii(k)
    out = 1.0
    for r, e in zip(rho, k):
        if e:
            out *= r**e
    return out


def delta(G: ReinhardtDomain, k: Sequence[int]) -> np.ndarray:
    """Radii of the polydisc spanned by the maximizer for k.

    Returned as a plain radius array since it may be degenerate (zero
    radii), which ``ReinhardtDomain`` does not allow.
    """
    return G.eta_radii(k)


def delta_zero(G: ReinhardtDomain) -> np.ndarray:
    """Half the largest equal-radius polydisc inscribed in G."""
    n = G.dim
    if G.kind == "polydisc":
        rho = min(G.radii)
    elif G.kind == "ball":
        rho = G.radii[0] / math.sqrt(n)
    else:
        hi = min(G.radii)
        rho = brentq(lambda x: G.gauge([x] * n) - 1.0, 0.0, hi, xtol=1e-15, rtol=1e-15)
    return np.full(n, 0.5 * rho)


# --- exhaustions -----------------------------------------------------------

def exhaustion_factor(level: int) -> float:
    if level < 0:
        raise ValueError("exhaustion level must be >= 0")
    return 1.0 - 2.0 ** -(level + 1)


def exhaustion(D, level: int):
    """Level-``level`` member of the standard exhaustion of D."""
    c = exhaustion_factor(level)
    if isinstance(D, ReinhardtDomain):
        return D.scaled(c)
    if isinstance(D, CylindricalDomain):
        out = []
        for f in D.factors:
            if f.kind == "disc":
                out.append(PlanarFactor.disc(f.center, f.radius * c))
            else:
                lo, hi = f.inner / c, f.outer * c
                if not lo < hi:
                    raise ValueError("exhaustion exhausted")
                out.append(PlanarFactor.annulus(f.center, lo, hi))
        return CylindricalDomain(tuple(out))
    raise TypeError(f"cannot exhaust {type(D).__name__}")


# --- contours --------------------------------------------------------------

@dataclass(frozen=True)
class Contour:
    """Product of positively oriented circles."""

    centers: tuple[complex, ...]
    radii: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(complex(c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.centers) != len(self.radii) or not self.radii:
            raise ValueError("contour needs one center per radius")
        if any(not r > 0 for r in self.radii):
            raise ValueError("contour radii must be positive")

    @classmethod
    def centered(cls, radii: Sequence[float]) -> "Contour":
        radii = tuple(float(r) for r in radii)
        return cls((0j,) * len(radii), radii)

    @property
    def dim(self) -> int:
        return len(self.radii)

    @property
    def is_centered(self) -> bool:
        return all(c == 0 for c in self.centers)

    def lengths(self) -> tuple[float, ...]:
        return tuple(2 * math.pi * r for r in self.radii)


# --- JSON ------------------------------------------------------------------

def _center(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


def domain_from_json(d: dict):
    kind = d.get("kind")
    if kind == "polydisc":
        return ReinhardtDomain.polydisc(d["radii"])
    if kind == "ball":
        return ReinhardtDomain.ball(d["radius"], int(d.get("dim", 2)))
    if kind == "pellipsoid":
        return ReinhardtDomain.pellipsoid(d["radii"], d["p"])
    if kind == "cylinder":
        factors = []
        for f in d["factors"]:
            c = _center(f.get("center", 0.0))
            if f["kind"] == "disc":
                factors.append(PlanarFactor.disc(c, f["radius"]))
            elif f["kind"] == "annulus":
                factors.append(PlanarFactor.annulus(c, f["inner"], f["outer"]))
            else:
                raise ValueError(f"unknown planar factor kind {f['kind']!r}")
        return CylindricalDomain(tuple(factors))
    raise ValueError(f"unknown domain kind {kind!r}")
