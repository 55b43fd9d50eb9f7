"""Self-contained special-function and quadrature kernel.

Pure math, no model state: the Gauss hypergeometric function restricted to
the non-positive real axis, the complementary error function (plain and
scaled), Chebyshev-Gauss quadrature rules, and the exponential-type
approximation of the normalized Gamma CDF together with its constant.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpecFunDomainError",
    "SpecFunConvergenceError",
    "QuadratureRule",
    "gauss_2f1",
    "hyp2f1_neg",
    "hyp2f1_neg_with_terms",
    "erfc",
    "erfcx",
    "chebyshev_gauss",
    "alzer_eta",
    "gamma_cdf_alzer_approx",
]

_SERIES_TOL = 1e-16
_MAX_TERMS = 100_000
# Below this z the Pfaff series needs too many terms; switch to the 1/z
# connection formula (DLMF 15.8.2).
_TRANSFORM_CUTOFF = -64.0
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SQRT_PI = math.sqrt(math.pi)


class SpecFunDomainError(ValueError):
    """Argument outside the supported domain of a kernel function."""


class SpecFunConvergenceError(ArithmeticError):
    """Series did not converge within the term budget.

    Carries the partial value and the number of terms consumed.
    """

    def __init__(self, message: str, partial_value: float, terms: int):
        super().__init__(message)
        self.partial_value = partial_value
        self.terms = terms


def _is_nonpositive_integer(x: float, tol: float = 1e-12) -> bool:
    return x <= tol and abs(x - round(x)) < tol


# ---------------------------------------------------------------------------
# Gauss hypergeometric function on z <= 0
# ---------------------------------------------------------------------------

def _direct_series(a: float, b: float, c: float, z: np.ndarray) -> tuple[np.ndarray, int]:
    """Maclaurin series of 2F1. Reliable only for z in (-1, 0]."""
    term = np.ones_like(z)
    total = np.ones_like(z)
    n = 0
    while n < _MAX_TERMS:
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1.0))) * z
        total = total + term
        n += 1
        if np.all(np.abs(term) <= _SERIES_TOL * np.abs(total)):
            return total, n
    raise SpecFunConvergenceError(
        f"2F1 Maclaurin series exceeded {_MAX_TERMS} terms",
        float(np.max(total)), n,
    )


def _pfaff_series(a: float, b: float, c: float, z: np.ndarray) -> tuple[np.ndarray, int]:
    """2F1 via the Pfaff map w = z/(z-1), stable for all z <= 0.

    For z <= 0 the mapped argument lies in [0, 1) and every series term is
    positive when c > a and b, c > 0, so there is no cancellation.
    """
    w = z / (z - 1.0)
    ap = c - a
    term = np.ones_like(w)
    total = np.ones_like(w)
    n = 0
    while n < _MAX_TERMS:
        term = term * ((ap + n) * (b + n) / ((c + n) * (n + 1.0))) * w
        total = total + term
        n += 1
        if np.all(np.abs(term) <= _SERIES_TOL * np.abs(total)):
            return np.power(1.0 - z, -b) * total, n
    raise SpecFunConvergenceError(
        f"2F1 Pfaff series exceeded {_MAX_TERMS} terms",
        float(np.max(np.power(1.0 - z, -b) * total)), n,
    )


def _inversion_transform(a: float, b: float, c: float, z: np.ndarray) -> tuple[np.ndarray, int]:
    """2F1 via the z -> 1/z connection formula, for large negative z.

    Requires a - b not an integer (the two branches would collide).
    """
    big_s = -z
    coef1 = math.gamma(c) * math.gamma(b - a) / (math.gamma(b) * math.gamma(c - a))
    coef2 = math.gamma(c) * math.gamma(a - b) / (math.gamma(a) * math.gamma(c - b))
    inv = 1.0 / z
    f1, n1 = _direct_series(a, a - c + 1.0, a - b + 1.0, inv)
    f2, n2 = _direct_series(b, b - c + 1.0, b - a + 1.0, inv)
    value = coef1 * np.power(big_s, -a) * f1 + coef2 * np.power(big_s, -b) * f2
    return value, max(n1, n2)


def hyp2f1_neg_with_terms(a: float, b: float, c: float, z) -> tuple[np.ndarray, int]:
    """Vectorized 2F1(a, b; c; z) for arrays of z <= 0, plus the maximum
    series length consumed (a diagnostics hook).

    Dispatch: exact 1 at z = 0, Pfaff series on [-64, 0), and the 1/z
    connection formula below that (falling back to Pfaff when a - b is
    an integer and the connection formula is unusable).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z > 0):
        raise SpecFunDomainError("hyp2f1_neg requires z <= 0")
    if _is_nonpositive_integer(c):
        raise SpecFunDomainError(f"2F1 undefined: c={c} is a non-positive integer")
    out = np.ones_like(z)
    terms = 0
    mid = (z < 0) & (z >= _TRANSFORM_CUTOFF)
    far = z < _TRANSFORM_CUTOFF
    if np.any(mid):
        out[mid], terms = _pfaff_series(a, b, c, z[mid])
    if np.any(far):
        if abs((a - b) - round(a - b)) > 1e-8:
            vals, n = _inversion_transform(a, b, c, z[far])
        else:
            vals, n = _pfaff_series(a, b, c, z[far])
        out[far] = vals
        terms = max(terms, n)
    return out, terms


def hyp2f1_neg(a: float, b: float, c: float, z) -> np.ndarray:
    """Vectorized 2F1(a, b; c; z) for arrays of z <= 0."""
    return hyp2f1_neg_with_terms(a, b, c, z)[0]


def gauss_2f1(a: float, b: float, c: float, z: float, method: str = "auto") -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 0.

    ``method`` selects the evaluation route: "auto" dispatches as in
    :func:`hyp2f1_neg`; "series", "pfaff" and "transform" force one route
    (mainly for cross-validation in tests).
    """
    if z > 0:
        raise SpecFunDomainError(f"gauss_2f1 supports z <= 0 only, got z={z}")
    if _is_nonpositive_integer(c):
        raise SpecFunDomainError(f"2F1 undefined: c={c} is a non-positive integer")
    if z == 0.0:
        return 1.0
    zarr = np.asarray([float(z)])
    if method == "auto":
        return float(hyp2f1_neg(a, b, c, zarr)[0])
    if method == "series":
        return float(_direct_series(a, b, c, zarr)[0][0])
    if method == "pfaff":
        return float(_pfaff_series(a, b, c, zarr)[0][0])
    if method == "transform":
        return float(_inversion_transform(a, b, c, zarr)[0][0])
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Complementary error function
# ---------------------------------------------------------------------------

def _erf_series(x: np.ndarray) -> np.ndarray:
    """erf on [0, 2) via the all-positive confluent series."""
    x2 = x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    n = 1
    while n < 400:
        term = term * (2.0 * x2 / (2.0 * n + 1.0))
        total = total + term
        n += 1
        if np.all(term <= 1e-18 * total):
            break
    return _TWO_OVER_SQRT_PI * x * np.exp(-x2) * total


def _erfcx_cf(x: np.ndarray, iters: int = 120) -> np.ndarray:
    """Scaled complementary error function for x >= 2, by the Laplace
    continued fraction (modified Lentz)."""
    tiny = 1e-300
    f = np.where(x == 0.0, tiny, x).astype(float)
    cc = f.copy()
    dd = np.zeros_like(f)
    for i in range(1, iters):
        an = i / 2.0
        dd = x + an * dd
        dd = np.where(dd == 0.0, tiny, dd)
        cc = x + an / cc
        cc = np.where(cc == 0.0, tiny, cc)
        dd = 1.0 / dd
        delta = cc * dd
        f = f * delta
        if np.all(np.abs(delta - 1.0) < 1e-17):
            break
    return 1.0 / (_SQRT_PI * f)


def _erfcx_array(x: np.ndarray) -> np.ndarray:
    """erfcx on x >= 0 (array), series below 2 and continued fraction above."""
    out = np.empty_like(x)
    lo = x < 2.0
    if np.any(lo):
        xs = x[lo]
        out[lo] = np.exp(xs * xs) * (1.0 - _erf_series(xs))
    if np.any(~lo):
        out[~lo] = _erfcx_cf(x[~lo])
    return out


def erfcx(x) -> float | np.ndarray:
    """Scaled complementary error function exp(x^2) * erfc(x), x >= 0."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr < 0):
        raise SpecFunDomainError("erfcx implemented for x >= 0 only")
    out = _erfcx_array(arr)
    return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out


def erfc(x) -> float | np.ndarray:
    """Complementary error function for any finite real argument."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(arr)
    neg = arr < 0
    pos = ~neg
    if np.any(pos):
        xp = arr[pos]
        small = xp < 2.0
        res = np.empty_like(xp)
        if np.any(small):
            res[small] = 1.0 - _erf_series(xp[small])
        if np.any(~small):
            xl = xp[~small]
            # exp(-x^2) underflows to 0 beyond ~27; the product is then 0,
            # which is correct to far below 1e-300.
            res[~small] = _erfcx_cf(xl) * np.exp(-xl * xl)
        out[pos] = res
    if np.any(neg):
        out[neg] = 2.0 - np.asarray(erfc(-arr[neg]))
    return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Chebyshev-Gauss quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """First-kind Chebyshev-Gauss rule: nodes cos((2i-1)pi/(2K)), weights pi/K.

    Exact for integrals of p(x)/sqrt(1-x^2) with deg p < 2*order; a plain
    integral over [-1, 1] is recovered by multiplying each evaluation by
    sqrt(1 - node^2).
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.order < 1:
            raise SpecFunDomainError("quadrature order must be >= 1")
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValueError("rule arrays inconsistent with order")
        if np.any(np.abs(self.nodes) >= 1.0):
            raise ValueError("nodes must lie strictly inside (-1, 1)")
        if np.any(np.diff(self.nodes) >= 0):
            raise ValueError("nodes must be strictly decreasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")


def chebyshev_gauss(order: int) -> QuadratureRule:
    """Build the K-point first-kind Chebyshev-Gauss rule."""
    if order < 1:
        raise SpecFunDomainError(f"order must be >= 1, got {order}")
    i = np.arange(1, order + 1, dtype=float)
    nodes = np.cos((2.0 * i - 1.0) * np.pi / (2.0 * order))
    weights = np.full(order, np.pi / order)
    return QuadratureRule(order=order, nodes=nodes, weights=weights)


# ---------------------------------------------------------------------------
# Normalized-Gamma CDF approximation
# ---------------------------------------------------------------------------

def alzer_eta(m: int) -> float:
    """Constant eta = m * (m!)^(-1/m) of the Gamma-CDF approximation.

    Computed through log-Gamma so it stays exact-to-double for m well past
    the overflow point of m!.
    """
    if m < 1 or int(m) != m:
        raise SpecFunDomainError(f"m must be a positive integer, got {m}")
    return m * math.exp(-math.lgamma(m + 1.0) / m)


def gamma_cdf_alzer_approx(x, m: int):
    """(1 - exp(-x * eta))^m, the exponential-type bound on the CDF of a
    unit-mean Gamma(m, 1/m) variable. Exact for m = 1."""
    eta = alzer_eta(m)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise SpecFunDomainError("gamma_cdf_alzer_approx requires x >= 0")
    out = np.power(-np.expm1(-arr * eta), m)
    return float(out) if np.ndim(x) == 0 else out
