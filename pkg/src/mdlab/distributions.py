"""Continuous distribution catalog with log-domain tail evaluators.

Every member exposes cdf/sf/pdf plus log_cdf/log_sf/log_pdf, a quantile,
and an inverse survival function. The log forms are first-class citizens:
they stay finite and strictly monotone far beyond the point where the
plain survival function underflows, which is what the tail probes need.

Catalog members are continuous, so F(x-) = F(x) everywhere and survival
statements can use -log sf directly. Atoms are out of scope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, gammainc, gammaincc, gammaln, log_ndtr, ndtr, ndtri

from .estimators import stable_log_complement

__all__ = [
    "Distribution",
    "SpecParseError",
    "exponential",
    "uniform01",
    "weibull",
    "gamma",
    "std_normal",
    "logistic",
    "lognormal",
    "parse_dist_spec",
    "render_dist_spec",
    "quantile_values",
    "isf_values",
]

_LOG_2PI = math.log(2.0 * math.pi)


class SpecParseError(ValueError):
    """A distribution/family/scaling specifier string could not be parsed."""


@dataclass(frozen=True)
class Distribution:
    """One continuous distribution.

    The private callables are the raw formulas on the interior of the
    support; the public methods add the boundary conventions (below the
    support: cdf 0, sf 1; above it: cdf 1, sf 0). Raw quantile/isf
    callables are vectorized closed forms when available and None
    otherwise, in which case bracketed bisection takes over.
    """

    name: str
    params: tuple
    support: tuple
    cdf_slope_at_zero: Optional[float] = None
    _cdf: Callable = field(default=None, repr=False)
    _sf: Callable = field(default=None, repr=False)
    _log_cdf: Callable = field(default=None, repr=False)
    _log_sf: Callable = field(default=None, repr=False)
    _log_pdf: Callable = field(default=None, repr=False)
    _quantile: Callable = field(default=None, repr=False)
    _isf: Callable = field(default=None, repr=False)

    # boundary-aware scalar evaluators

    def cdf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo:
            return 0.0
        if x >= hi:
            return 1.0
        if self._cdf is not None:
            return float(self._cdf(x))
        return 1.0 - self.sf(x)

    def sf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo:
            return 1.0
        if x >= hi:
            return 0.0
        if self._sf is not None:
            return float(self._sf(x))
        return math.exp(self.log_sf(x))

    def pdf(self, x: float) -> float:
        lp = self.log_pdf(x)
        if lp == math.inf:
            return math.inf
        return math.exp(lp)

    def log_cdf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo:
            return -math.inf
        if x >= hi:
            return 0.0
        if self._log_cdf is not None:
            return float(self._log_cdf(x))
        sf = self.sf(x)
        if sf < 0.5:
            return math.log1p(-sf)
        return math.log(self.cdf(x))

    def log_sf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo:
            return 0.0
        if x >= hi:
            return -math.inf
        return float(self._log_sf(x))

    def log_pdf(self, x: float) -> float:
        lo, hi = self.support
        if x < lo or x > hi:
            return -math.inf
        return float(self._log_pdf(x))

    def quantile(self, p: float) -> float:
        """Smallest x with cdf(x) >= p, to within 1e-13 on the p scale."""
        if math.isnan(p) or not 0.0 <= p <= 1.0:
            raise ValueError(f"quantile needs p in [0, 1], got {p}")
        lo, hi = self.support
        if p == 0.0:
            return lo
        if p == 1.0:
            return hi
        if self._quantile is not None:
            return float(self._quantile(p))
        return _bisect_increasing(self.cdf, p, self.support)

    def isf(self, q: float) -> float:
        """Inverse survival: x with sf(x) = q, accurate for tiny q.

        Closed forms where the catalog has them, otherwise bisection on
        log_sf so that levels far below double-precision sf still invert.
        """
        if math.isnan(q) or not 0.0 <= q <= 1.0:
            raise ValueError(f"isf needs q in [0, 1], got {q}")
        lo, hi = self.support
        if q == 0.0:
            return hi
        if q == 1.0:
            return lo
        if self._isf is not None:
            return float(self._isf(q))
        return _bisect_decreasing(self.log_sf, math.log(q), self.support)


def _bisect_increasing(f, target, support, iters=200, tol=1e-13):
    # bracket expansion from the support midpoint (or lower+1 when the
    # upper end is infinite), then plain bisection
    lo, hi = support
    if math.isinf(lo) and math.isinf(hi):
        a, b = -1.0, 1.0
    elif math.isinf(hi):
        a, b = lo, lo + 1.0
    elif math.isinf(lo):
        a, b = hi - 1.0, hi
    else:
        mid = 0.5 * (lo + hi)
        a, b = lo, mid
    step = max(1.0, abs(b - a))
    while f(b) < target:
        a = b
        b = b + step
        step *= 2.0
        if b > 1e308:
            break
    while f(a) > target:
        b = a
        a = a - step
        step *= 2.0
        if a < -1e308:
            break
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if abs(fm - target) <= tol:
            return m
        if fm < target:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _bisect_decreasing(f, target, support, iters=200):
    lo, hi = support
    a = lo if not math.isinf(lo) else -1.0
    b = a + 1.0
    step = 1.0
    while f(b) > target:
        a = b
        b = b + step
        step *= 2.0
        if b > 1e308:
            break
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if f(m) > target:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


# catalog constructors


def exponential(rate: float) -> Distribution:
    """Exponential with the given rate; sf(x) = e^{-rate x}."""
    if not rate > 0 or not math.isfinite(rate):
        raise SpecParseError(f"exponential rate must be positive, got {rate}")
    lam = float(rate)
    return Distribution(
        name="exponential",
        params=(lam,),
        support=(0.0, math.inf),
        cdf_slope_at_zero=lam,
        _cdf=lambda x: -np.expm1(-lam * x),
        _sf=lambda x: np.exp(-lam * x),
        _log_cdf=lambda x: stable_log_complement(-lam * x),
        _log_sf=lambda x: -lam * x,
        _log_pdf=lambda x: math.log(lam) - lam * x,
        _quantile=lambda p: -np.log1p(-p) / lam,
        _isf=lambda q: -np.log(q) / lam,
    )


def uniform01() -> Distribution:
    """Uniform on the unit interval."""
    return Distribution(
        name="uniform01",
        params=(),
        support=(0.0, 1.0),
        cdf_slope_at_zero=1.0,
        _cdf=lambda x: x,
        _sf=lambda x: 1.0 - x,
        _log_cdf=np.log,
        _log_sf=lambda x: np.log1p(-x),
        _log_pdf=lambda x: 0.0,
        _quantile=lambda p: p,
        _isf=lambda q: 1.0 - q,
    )


def weibull(shape: float) -> Distribution:
    """Weibull with sf(x) = e^{-x^shape} on x >= 0."""
    if not shape > 0 or not math.isfinite(shape):
        raise SpecParseError(f"weibull shape must be positive, got {shape}")
    a = float(shape)
    if a == 1.0:
        slope = 1.0
    elif a > 1.0:
        slope = 0.0
    else:
        slope = math.inf
    return Distribution(
        name="weibull",
        params=(a,),
        support=(0.0, math.inf),
        cdf_slope_at_zero=slope,
        _cdf=lambda x: -np.expm1(-np.power(x, a)),
        _sf=lambda x: np.exp(-np.power(x, a)),
        _log_cdf=lambda x: stable_log_complement(-float(np.power(x, a))),
        _log_sf=lambda x: -np.power(x, a),
        _log_pdf=lambda x: math.log(a) + (a - 1.0) * np.log(x) - np.power(x, a),
        _quantile=lambda p: np.power(-np.log1p(-p), 1.0 / a),
        _isf=lambda q: np.power(-np.log(q), 1.0 / a),
    )


def _gamma_log_sf_cf(a: float, x: float) -> float:
    # log of the regularized upper incomplete gamma via the Lentz
    # continued fraction; valid (and only used) well into the x > a + 1
    # regime where the direct gammaincc underflows
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return -x + a * math.log(x) - gammaln(a) + math.log(h)


def gamma(shape: float) -> Distribution:
    """Gamma with unit scale. Tail log_sf switches to a continued
    fraction once the direct survival function nears the underflow floor."""
    if not shape > 0 or not math.isfinite(shape):
        raise SpecParseError(f"gamma shape must be positive, got {shape}")
    a = float(shape)

    def log_sf(x):
        s = gammaincc(a, x)
        if s > 1e-280:
            return math.log(s)
        return _gamma_log_sf_cf(a, float(x))

    if a == 1.0:
        slope = 1.0
    elif a > 1.0:
        slope = 0.0
    else:
        slope = math.inf
    return Distribution(
        name="gamma",
        params=(a,),
        support=(0.0, math.inf),
        cdf_slope_at_zero=slope,
        _cdf=lambda x: gammainc(a, x),
        _sf=lambda x: gammaincc(a, x),
        _log_sf=log_sf,
        _log_pdf=lambda x: (a - 1.0) * np.log(x) - x - gammaln(a),
    )


def std_normal() -> Distribution:
    """Standard normal. log_sf rides scipy's log_ndtr, which stays
    accurate far past x = 40."""
    return Distribution(
        name="std_normal",
        params=(),
        support=(-math.inf, math.inf),
        cdf_slope_at_zero=None,
        _cdf=ndtr,
        _sf=lambda x: ndtr(-x),
        _log_cdf=log_ndtr,
        _log_sf=lambda x: log_ndtr(-x),
        _log_pdf=lambda x: -0.5 * x * x - 0.5 * _LOG_2PI,
        _quantile=ndtri,
        _isf=lambda q: -ndtri(q),
    )


def logistic() -> Distribution:
    """Standard logistic; sf(x) = 1/(1 + e^x)."""

    def log_sf(x):
        if x > 0:
            return -(x + np.log1p(np.exp(-x)))
        return -np.log1p(np.exp(x))

    return Distribution(
        name="logistic",
        params=(),
        support=(-math.inf, math.inf),
        cdf_slope_at_zero=None,
        _cdf=expit,
        _sf=lambda x: expit(-x),
        _log_cdf=lambda x: log_sf(-x),
        _log_sf=log_sf,
        _log_pdf=lambda x: -abs(x) - 2.0 * np.log1p(np.exp(-abs(x))),
        _quantile=lambda p: np.log(p) - np.log1p(-p),
        _isf=lambda q: np.log1p(-q) - np.log(q),
    )


def lognormal() -> Distribution:
    """Lognormal exp(N(0,1)). Included as the canonical profile that the
    max-domain machinery must reject (its tail index degenerates to 0)."""
    return Distribution(
        name="lognormal",
        params=(),
        support=(0.0, math.inf),
        cdf_slope_at_zero=0.0,
        _cdf=lambda x: ndtr(np.log(x)),
        _sf=lambda x: ndtr(-np.log(x)),
        _log_cdf=lambda x: log_ndtr(np.log(x)),
        _log_sf=lambda x: log_ndtr(-np.log(x)),
        _log_pdf=lambda x: -np.log(x) - 0.5 * np.log(x) ** 2 - 0.5 * _LOG_2PI,
        _quantile=lambda p: np.exp(ndtri(p)),
        _isf=lambda q: np.exp(-ndtri(q)),
    )


_CATALOG: dict[str, tuple[Callable, int]] = {
    "exponential": (exponential, 1),
    "uniform01": (uniform01, 0),
    "weibull": (weibull, 1),
    "gamma": (gamma, 1),
    "std_normal": (std_normal, 0),
    "logistic": (logistic, 0),
    "lognormal": (lognormal, 0),
}


def parse_dist_spec(spec: str) -> Distribution:
    """Build a catalog member from 'name' or 'name:param[,param]'."""
    spec = spec.strip()
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name not in _CATALOG:
        raise SpecParseError(
            f"unknown distribution {name!r}; catalog: {', '.join(sorted(_CATALOG))}"
        )
    ctor, arity = _CATALOG[name]
    if rest:
        try:
            args = tuple(float(tok) for tok in rest.split(","))
        except ValueError as exc:
            raise SpecParseError(f"bad parameter in {spec!r}: {exc}") from None
    else:
        args = ()
    if len(args) != arity:
        raise SpecParseError(
            f"{name} takes {arity} parameter(s), got {len(args)} in {spec!r}"
        )
    return ctor(*args)


def render_dist_spec(dist: Distribution) -> str:
    """Canonical specifier string; parse(render(d)) reproduces d."""
    if not dist.params:
        return dist.name
    return dist.name + ":" + ",".join(repr(p) for p in dist.params)


def quantile_values(dist: Distribution, p: np.ndarray) -> np.ndarray:
    """Vectorized quantile; falls back to a scalar loop when the member
    has no closed form (gamma)."""
    p = np.asarray(p, dtype=float)
    if dist._quantile is not None:
        return np.asarray(dist._quantile(p), dtype=float)
    return np.array([dist.quantile(v) for v in p.ravel()]).reshape(p.shape)


def isf_values(dist: Distribution, q: np.ndarray) -> np.ndarray:
    """Vectorized inverse survival, same fallback policy as quantile_values."""
    q = np.asarray(q, dtype=float)
    if dist._isf is not None:
        return np.asarray(dist._isf(q), dtype=float)
    return np.array([dist.isf(v) for v in q.ravel()]).reshape(q.shape)
