"""Operators between spaces of holomorphic functions and their kernels.

An operator is held as its coefficient matrix ``M[beta, alpha]`` with
``A(w^alpha) = sum_beta M[beta, alpha] z^beta``. Its kernel
``a(zeta, z) = A(prod_j 1/(w_j - zeta_j))(z)`` is stored by the
coefficients of ``zeta^-(alpha + 1) z^beta``; expanding the Cauchy factor
gives ``c[alpha, beta] = (-1)^n M[beta, alpha]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _core
from . import multiindex as mi
from .domains import Contour, ReinhardtDomain
from .quadrature import DEFAULT_SPEC, QuadratureSpec, contour_integral
from .rng import SplitMix64
from .series import LaurentSeries, PowerSeries, random_polynomial, sup_norm


def _pair_key(key):
    return (mi.grlex_key(key[1]), mi.grlex_key(key[0]))


@dataclass(frozen=True)
class OperatorMatrix:
    """Column-finite coefficient matrix; ``entries[(beta, alpha)]``."""

    dim_in: int
    dim_out: int
    trunc_in: int
    trunc_out: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (beta, alpha), v in self.entries.items():
            beta, alpha = mi.as_index(beta), mi.as_index(alpha)
            if len(alpha) != self.dim_in or len(beta) != self.dim_out:
                raise ValueError(f"entry {(beta, alpha)} has the wrong dimensions")
            if sum(alpha) > self.trunc_in or sum(beta) > self.trunc_out:
                raise ValueError(f"entry {(beta, alpha)} exceeds the truncation")
            v = complex(v)
            if v != 0:
                clean[(beta, alpha)] = clean.get((beta, alpha), 0j) + v
        ordered = {k: clean[k] for k in sorted(clean, key=_pair_key) if clean[k] != 0}
        object.__setattr__(self, "entries", ordered)

    def columns(self) -> dict:
        cols: dict = {}
        for (beta, alpha), v in self.entries.items():
            cols.setdefault(alpha, {})[beta] = v
        return cols

    def column(self, alpha: Sequence[int]) -> PowerSeries:
        alpha = tuple(alpha)
        return PowerSeries(self.dim_out, self.trunc_out,
                           {b: v for (b, a), v in self.entries.items() if a == alpha})

    def apply(self, f: PowerSeries) -> PowerSeries:
        """Exact matrix-vector product on coefficients."""
        if f.dim != self.dim_in:
            raise ValueError(f"operator acts on dimension {self.dim_in}, got {f.dim}")
        if f.max_degree() > self.trunc_in and not f.is_zero():
            raise ValueError("series degree exceeds the operator's input truncation")
        out: dict = {}
        for (beta, alpha), v in self.entries.items():
            c = f.coeffs.get(alpha)
            if c is not None:
                out[beta] = out.get(beta, 0j) + v * c
        return PowerSeries(self.dim_out, self.trunc_out, out)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.dim_in != other.dim_out:
            raise ValueError("dimension mismatch in composition")
        out: dict = {}
        mine = self.columns()
        for (mid, alpha), v in other.entries.items():
            for beta, w in mine.get(mid, {}).items():
                out[(beta, alpha)] = out.get((beta, alpha), 0j) + w * v
        return OperatorMatrix(other.dim_in, self.dim_out, other.trunc_in, self.trunc_out, out)

    def to_json(self) -> dict:
        return {
            "dim_in": self.dim_in, "dim_out": self.dim_out,
            "trunc_in": self.trunc_in, "trunc_out": self.trunc_out,
            "entries": [{"beta": list(b), "alpha": list(a), "re": v.real, "im": v.imag}
                        for (b, a), v in self.entries.items()],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "OperatorMatrix":
        ent: dict = {}
        for e in d["entries"]:
            key = (tuple(e["beta"]), tuple(e["alpha"]))
            ent[key] = ent.get(key, 0j) + complex(e.get("re", 0.0), e.get("im", 0.0))
        trunc_in = d.get("trunc_in", max((sum(a) for _, a in ent), default=0))
        trunc_out = d.get("trunc_out", max((sum(b) for b, _ in ent), default=0))
        return cls(int(d["dim_in"]), int(d["dim_out"]), int(trunc_in), int(trunc_out), ent)


@dataclass(frozen=True)
class KernelCoefficients:
    """``a(zeta, z) = sum c[alpha, beta] zeta^-(alpha + 1) z^beta``."""

    dim_zeta: int
    dim_z: int
    trunc_zeta: int
    trunc_z: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (alpha, beta), v in self.entries.items():
            alpha, beta = mi.as_index(alpha), mi.as_index(beta)
            if len(alpha) != self.dim_zeta or len(beta) != self.dim_z:
                raise ValueError(f"entry {(alpha, beta)} has the wrong dimensions")
            if sum(alpha) > self.trunc_zeta or sum(beta) > self.trunc_z:
                raise ValueError(f"entry {(alpha, beta)} exceeds the truncation")
            v = complex(v)
            if v != 0:
                clean[(alpha, beta)] = clean.get((alpha, beta), 0j) + v
        order = sorted(clean, key=lambda k: (mi.grlex_key(k[0]), mi.grlex_key(k[1])))
        object.__setattr__(self, "entries", {k: clean[k] for k in order if clean[k] != 0})

    def max_abs(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def to_json(self) -> dict:
        return {
            "kind": "kernel",
            "dim_zeta": self.dim_zeta, "dim_z": self.dim_z,
            "trunc_zeta": self.trunc_zeta, "trunc_z": self.trunc_z,
            "entries": [{"alpha": list(a), "beta": list(b), "re": v.real, "im": v.imag}
                        for (a, b), v in self.entries.items()],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "KernelCoefficients":
        ent: dict = {}
        for e in d["entries"]:
            key = (tuple(e["alpha"]), tuple(e["beta"]))
            ent[key] = ent.get(key, 0j) + complex(e.get("re", 0.0), e.get("im", 0.0))
        return cls(int(d["dim_zeta"]), int(d["dim_z"]), int(d["trunc_zeta"]),
                   int(d["trunc_z"]), ent)


# --- named operators -------------------------------------------------------

HADAMARD_RULES: dict[str, Callable[[tuple], complex]] = {
    "pow2": lambda a: 2.0 ** -sum(a),
    "factorial": lambda a: 1.0 / math.prod(math.factorial(e) for e in a),
    "shift": lambda a: sum(a) + 1.0,
}


@dataclass(frozen=True)
class NamedOperator:
    """Test operators with exact matrices.

    ``param`` is the coordinate (1-based) for ``partial``, the rule (name
    or callable) for ``hadamard``, the factor for ``dilation`` and the
    exponent shift for ``multiplier``.
    """

    kind: str
    param: object = None

    def __str__(self):
        if self.param is None:
            return self.kind
        p = self.param
        if isinstance(p, tuple):
            p = ",".join(str(x) for x in p)
        elif callable(p):
            p = getattr(p, "__name__", "custom")
        return f"{self.kind}:{p}"


def parse_operator(spec: str) -> NamedOperator:
    """Parse CLI strings such as ``partial:1``, ``hadamard:pow2``, ``multiplier:1,0``."""
    kind, _, arg = spec.strip().partition(":")
    if kind in ("identity", "euler"):
        if arg:
            raise ValueError(f"{kind} takes no parameter")
        return NamedOperator(kind)
    if kind == "partial":
        j = int(arg or 1)
        if j < 1:
            raise ValueError("partial derivative coordinate is 1-based")
        return NamedOperator("partial", j)
    if kind == "hadamard":
        if arg.startswith("geom="):
            return NamedOperator("hadamard", f"geom={float(arg[5:])!r}")
        if arg not in HADAMARD_RULES:
            raise ValueError(f"unknown Hadamard rule {arg!r}")
        return NamedOperator("hadamard", arg)
    if kind == "dilation":
        return NamedOperator("dilation", float(arg))
    if kind == "multiplier":
        return NamedOperator("multiplier", tuple(int(x) for x in arg.split(",")))
    raise ValueError(f"unknown operator {spec!r}")


def _hadamard_rule(param) -> Callable[[tuple], complex]:
    if callable(param):
        return param
    if isinstance(param, str) and param.startswith("geom="):
        c = float(param[5:])
        return lambda a: c ** sum(a)
    return HADAMARD_RULES[param]


def zoo(n: int) -> list[NamedOperator]:
    """The six reference operators in dimension n."""
    return [
        NamedOperator("identity"),
        NamedOperator("partial", 1),
        NamedOperator("euler"),
        NamedOperator("hadamard", "pow2"),
        NamedOperator("dilation", 0.5),
        NamedOperator("multiplier", mi.unit(n, 0)),
    ]


def matrix_of(op: NamedOperator | str, n: int, D: int) -> OperatorMatrix:
    if isinstance(op, str):
        op = parse_operator(op)
    if D < 0:
        raise ValueError("truncation degree must be >= 0")
    ent: dict = {}
    trunc_out = D
    for a in mi.indices_up_to(n, D):
        if op.kind == "identity":
            ent[(a, a)] = 1.0
        elif op.kind == "partial":
            j = op.param - 1
            if not 0 <= j < n:
                raise ValueError("partial derivative coordinate out of range")
            if a[j]:
                b = tuple(e - (i == j) for i, e in enumerate(a))
                ent[(b, a)] = float(a[j])
        elif op.kind == "euler":
            ent[(a, a)] = float(sum(a))
        elif op.kind == "hadamard":
            ent[(a, a)] = _hadamard_rule(op.param)(a)
        elif op.kind == "dilation":
            ent[(a, a)] = op.param ** sum(a)
        elif op.kind == "multiplier":
            g = tuple(op.param)
            if len(g) != n:
                raise ValueError("multiplier exponent has the wrong length")
            trunc_out = D + sum(g)
            ent[(mi.add(a, g), a)] = 1.0
        else:
            raise ValueError(f"unknown operator kind {op.kind!r}")
    return OperatorMatrix(n, n, D, trunc_out, ent)


# --- the kernel correspondence ---------------------------------------------

def phi_forward(A: OperatorMatrix) -> KernelCoefficients:
    sign = (-1) ** A.dim_in
    return KernelCoefficients(A.dim_in, A.dim_out, A.trunc_in, A.trunc_out,
                              {(a, b): sign * v for (b, a), v in A.entries.items()})


def matrix_from_kernel(a: KernelCoefficients) -> OperatorMatrix:
    sign = (-1) ** a.dim_zeta
    return OperatorMatrix(a.dim_zeta, a.dim_z, a.trunc_zeta, a.trunc_z,
                          {(b, al): sign * v for (al, b), v in a.entries.items()})


def kernel_eval(a: KernelCoefficients, zeta, z) -> complex | np.ndarray:
    """Evaluate the truncated kernel at one pair or at matching rows of pairs."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    single = zeta.ndim == 1
    zeta = zeta.reshape(-1, a.dim_zeta)
    z = z.reshape(-1, a.dim_z)
    if zeta.shape[0] != z.shape[0]:
        raise ValueError("need as many zeta points as z points")
    hit = np.nonzero(zeta == 0)
    if hit[0].size:
        raise ZeroDivisionError(f"pole at coordinate {int(hit[1][0]) + 1}")
    if not a.entries:
        out = np.zeros(zeta.shape[0], dtype=np.complex128)
    else:
        keys = list(a.entries)
        exps = np.asarray([al + b for al, b in keys], dtype=np.int64)
        exps[:, :a.dim_zeta] += 1
        vals = np.asarray(list(a.entries.values()), dtype=np.complex128)
        out = _core.eval_terms(np.concatenate([1.0 / zeta, z], axis=1), exps, vals)
    return complex(out[0]) if single else out


def phi_inverse(a: KernelCoefficients, f: PowerSeries, C: Contour,
                q: QuadratureSpec = DEFAULT_SPEC) -> PowerSeries:
    """Apply the operator of kernel ``a`` to f by contour integration.

    ``Af(z) = (-1)^n (2 pi i)^-n oint_C f(w) a(w, z) dw``; the z-expansion
    of the kernel is carried through, so the integral is computed for
    every output coefficient at once.
    """
    n = a.dim_zeta
    if f.dim != n or C.dim != n:
        raise ValueError("kernel, series and contour dimensions must agree")
    if not C.is_centered:
        raise ValueError("the kernel's zeta-expansion is about the origin; use a centered contour")
    if f.max_degree() > a.trunc_zeta and not f.is_zero():
        raise ValueError("series degree exceeds the kernel's zeta truncation")
    alphas = sorted({al for al, _ in a.entries}, key=mi.grlex_key)
    betas = sorted({b for _, b in a.entries}, key=mi.grlex_key)
    if not alphas or f.is_zero():
        return PowerSeries(a.dim_z, a.trunc_z, {})
    ai = {al: i for i, al in enumerate(alphas)}
    bi = {b: i for i, b in enumerate(betas)}
    cmat = np.zeros((len(alphas), len(betas)), dtype=np.complex128)
    for (al, b), v in a.entries.items():
        cmat[ai[al], bi[b]] = v
    lexps = np.asarray(alphas, dtype=np.int64) + 1

    def integrand(w):
        inv = 1.0 / w
        lp = np.ones((w.shape[0], len(alphas)), dtype=np.complex128)
        for j in range(n):
            lp = lp * inv[:, j, None] ** lexps[None, :, j]
        return f.evaluate(w)[:, None] * (lp @ cmat)

    vals = np.atleast_1d(contour_integral(integrand, C, q))
    vals = vals * (-1) ** n / (2j * np.pi) ** n
    return PowerSeries(a.dim_z, a.trunc_z, dict(zip(betas, (complex(v) for v in vals))))


def inverse_bound(a: KernelCoefficients, C: Contour, G2_radii: Sequence[float]) -> float:
    """Bound on ``sup |Af|`` over the polydisc ``G2_radii`` for ``sup_C |f| <= 1``.

    ``(2 pi)^-n * sup |a| * prod lengths`` with ``sup |a|`` bounded
    termwise on the contour times the closed polydisc.
    """
    sup_a = 0.0
    for (al, b), v in a.entries.items():
        term = abs(v)
        for r, e in zip(C.radii, al):
            term *= r ** -(e + 1)
        for r, e in zip(G2_radii, b):
            term *= r**e
        sup_a += term
    return sup_a * math.prod(C.lengths()) / (2 * math.pi) ** a.dim_zeta


# --- duality ---------------------------------------------------------------

def dual_kernel_from_functional(u, n: int, D: int) -> LaurentSeries:
    """``u~(lam) = u(1/(z - lam))``: coefficients ``(-1)^n u(z^a)``."""
    sign = (-1) ** n
    moment = u if callable(u) else (lambda a: u.get(a, 0.0))
    return LaurentSeries(n, D, {a: sign * complex(moment(a)) for a in mi.indices_up_to(n, D)})


def dual_pair(ut: LaurentSeries, f: PowerSeries, C: Contour,
              q: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """``u(f) = (-1)^n (2 pi i)^-n oint u~(lam) f(lam) dlam``."""
    if ut.dim != f.dim or C.dim != f.dim:
        raise ValueError("dimension mismatch")
    val = contour_integral(lambda w: ut.evaluate(w) * f.evaluate(w), C, q)
    return complex(val * (-1) ** f.dim / (2j * np.pi) ** f.dim)


def dual_pair_exact(ut: LaurentSeries, f: PowerSeries) -> complex:
    """Coefficient form of the pairing, ``(-1)^n sum d_a c_a``."""
    if ut.dim != f.dim:
        raise ValueError("dimension mismatch")
    acc = 0j
    for a, d in ut.coeffs.items():
        c = f.coeffs.get(a)
        if c is not None:
            acc += d * c
    return complex((-1) ** f.dim * acc)


MOMENTS: dict[str, Callable[[tuple], complex]] = {
    "eval0": lambda a: 1.0 if not any(a) else 0.0,
    "ones": lambda a: 1.0,
    "degree": lambda a: float(sum(a)),
    "growth": lambda a: float(math.prod(e + 1 for e in a)),
}


def parse_moments(spec: str) -> Callable[[tuple], complex]:
    kind, _, arg = spec.partition(":")
    if kind == "coeff":
        gamma = tuple(int(x) for x in arg.split(","))
        return lambda a: 1.0 if tuple(a) == gamma else 0.0
    if kind in MOMENTS:
        return MOMENTS[kind]
    raise ValueError(f"unknown moment sequence {spec!r}")


@dataclass
class GrowthReport:
    Ns: list
    values: list
    norms: list
    ratios: list

    @property
    def increasing(self) -> bool:
        return all(b > a for a, b in zip(self.ratios, self.ratios[1:]))

    @property
    def nondecreasing(self) -> bool:
        return all(b >= a for a, b in zip(self.ratios, self.ratios[1:]))


def dual_growth_demo(n: int = 1, D: int = 200, Ns: Sequence[int] = (1, 2, 4, 8, 16)) -> GrowthReport:
    """Pair the moments ``prod (a_j + 1)`` with ``prod 1/(1 - q z_j)``, ``q = 1 - 1/N``.

    The ratio ``|u(f_N)| / ||f_N||`` on the unit polydisc grows without
    bound, so no bounded functional has these moments.
    """
    ut = dual_kernel_from_functional(MOMENTS["growth"], n, D)
    unit = ReinhardtDomain.polydisc([1.0] * n)
    values, norms, ratios = [], [], []
    for N in Ns:
        q = 1.0 - 1.0 / N
        f = PowerSeries.from_function(n, D, lambda a, q=q: q ** sum(a))
        val = abs(dual_pair_exact(ut, f))
        nrm = sup_norm(f, unit)[1]
        values.append(val)
        norms.append(nrm)
        ratios.append(val / nrm)
    return GrowthReport(list(Ns), values, norms, ratios)


# --- norm estimates --------------------------------------------------------

def operator_norm_estimate(A: OperatorMatrix, G1: ReinhardtDomain, G2: ReinhardtDomain,
                           r: float, s: float, trials: int = 20,
                           rng: SplitMix64 | int = 0, monomials: bool = True) -> float:
    """Lower estimate of ``sup ||Af||_{r G2} / ||f||_{s G1}``.

    Probes are ``trials`` random polynomials of degree ``A.trunc_in`` plus,
    unless disabled, every monomial of degree ``<= A.trunc_in``.
    """
    if not (0 < r <= 1 and 0 < s <= 1):
        raise ValueError("scales must lie in (0, 1]")
    rng = SplitMix64(rng) if isinstance(rng, int) else rng
    best = 0.0
    if monomials:
        for a in mi.indices_up_to(A.dim_in, A.trunc_in):
            img = A.apply(PowerSeries.monomial(a, trunc=A.trunc_in))
            if img.is_zero():
                continue
            den = s ** sum(a) * G1.monomial_max(a)
            best = max(best, sup_norm(img, G2, r)[0] / den)
    for _ in range(trials):
        f = random_polynomial(A.dim_in, A.trunc_in, rng)
        den = sup_norm(f, G1, s)[1]
        if den > 0:
            best = max(best, sup_norm(A.apply(f), G2, r)[0] / den)
    return best
