"""Quadrature over spectral measures with square-root endpoint behaviour."""
from __future__ import annotations

import warnings
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import QuadratureDivergenceUndecided, QuadratureFailure

Interval = Tuple[float, float]

DIVERGE_RATIO = 1.8
CONVERGE_RATIO = 0.6


def _quad(f, a, b, epsrel=1e-11, limit=400):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit)
    if not np.isfinite(val):
        raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
    return val


def _piece(fun: Callable, a: float, b: float, epsrel: float) -> float:
    """Integrate on [a, b] with t = end +/- u^2 near each finite end."""
    if a == b:
        return 0.0
    if np.isinf(a) and np.isinf(b):
        return _piece(fun, a, 0.0, epsrel) + _piece(fun, 0.0, b, epsrel)
    if np.isinf(b):
        return _quad(lambda u: 2.0 * u * fun(a + u * u), 0.0, np.inf, epsrel)
    if np.isinf(a):
        return _quad(lambda u: 2.0 * u * fun(b - u * u), 0.0, np.inf, epsrel)
    m = 0.5 * (a + b)
    h = np.sqrt(m - a)
    left = _quad(lambda u: 2.0 * u * fun(a + u * u), 0.0, h, epsrel)
    right = _quad(lambda u: 2.0 * u * fun(b - u * u), 0.0, h, epsrel)
    return left + right


def _subtract_window(intervals: Sequence[Interval], c: float, r: float) -> List[Interval]:
    out = []
    for lo, hi in intervals:
        if hi <= c - r or lo >= c + r:
            out.append((lo, hi))
            continue
        if lo < c - r:
            out.append((lo, c - r))
        if hi > c + r:
            out.append((c + r, hi))
    return out


def ac_integral(density: Callable, support: Sequence[Interval], g: Callable,
                window: Optional[Tuple[float, float]] = None, epsrel: float = 1e-11) -> complex:
    """Integral of g(t) * density(t) dt over the support, minus an optional window (c, r)."""
    pieces = list(support)
    if window is not None:
        pieces = _subtract_window(pieces, *window)

    def f_re(t):
        return float(np.real(g(t)) * density(t))

    def f_im(t):
        return float(np.imag(g(t)) * density(t))

    re = sum(_piece(f_re, a, b, epsrel) for a, b in pieces)
    im = sum(_piece(f_im, a, b, epsrel) for a, b in pieces)
    return complex(re, im)


def divergence_test(partial: Callable[[float], float], delta0: float, levels: int = 4) -> str:
    """Classify lim_{d->0} partial(d) as 'finite' or 'infinite' from decade refinements.

    Returns 'finite' when successive increments shrink by <= 0.6 per decade,
    'infinite' when they grow by >= 1.8, and raises otherwise.
    """
    d = delta0 * 10.0 ** -np.arange(levels + 1)
    vals = np.array([partial(x) for x in d])
    inc = np.abs(np.diff(vals))
    if np.all(inc <= 1e-14 * max(1.0, abs(vals[-1]))):
        return "finite"
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = inc[1:] / inc[:-1]
    if np.all(ratio >= DIVERGE_RATIO):
        return "infinite"
    if np.all(ratio <= CONVERGE_RATIO):
        return "finite"
    raise QuadratureDivergenceUndecided(f"increment ratios {np.round(ratio, 3).tolist()}")
