"""Square-root branches and the raw finite-zone Weyl evaluators.

``*`` evaluators give the continuation of M+ / M- from the upper half-plane
across the real axis: their cuts run vertically downward from the band edges
(from the reflected edges for M-). On the real axis they return boundary
values from above.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def _clean(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    # adding +0.0 turns a signed -0.0 imaginary part into +0.0
    return z.real + 1j * (z.imag + 0.0)


def sqrt_branch(z, lo: float):
    """Square root with arg(z) taken in ``[lo, lo + 2*pi)``."""
    z = _clean(z)
    th = np.angle(z)
    th = lo + np.mod(th - lo, TWO_PI)
    out = np.sqrt(np.abs(z)) * np.exp(0.5j * th)
    return out if out.ndim else out[()]


def sqrt_cut(z):
    """Branch with cut along the positive half-line, sqrt(-1) = i.

    Points on the cut take the value from above, so ``sqrt_cut(4) == 2``.
    """
    return sqrt_branch(z, 0.0)


def h_plus(edges, lam):
    lam = _clean(lam)
    out = np.ones_like(lam)
    for e in edges:
        out = out * sqrt_branch(lam - e, -0.5 * np.pi)
    return out


def h_minus(edges, lam):
    lam = _clean(lam)
    out = -np.ones_like(lam)
    for e in edges:
        out = out * sqrt_branch(-lam - e, -1.5 * np.pi)
    return out


def _pick(num1, den1, num2, den2):
    a1 = np.abs(den1) / (np.abs(num1) + np.abs(den1) + 1e-300)
    a2 = np.abs(den2) / (np.abs(num2) + np.abs(den2) + 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        v1 = num1 / den1
        v2 = num2 / den2
    out = np.where(a1 >= a2, v1, v2)
    return out


def fz_star(P, Q, S, edges, lam, side: str):
    """M+* or M-* for finite-zone data (vectorized)."""
    lam = _clean(lam)
    if side == "+":
        x = lam
        ih = 1j * h_plus(edges, lam)
    else:
        x = -lam
        ih = -1j * h_minus(edges, lam)
    q = Q(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = _pick(q + ih, S(x), P(x), q - ih)
    return out if np.ndim(out) else complex(out)


def reflect_eval(star, lam):
    """Herglotz function from its upper-half-plane formula: f(conj z) = conj f(z)."""
    lam = _clean(lam)
    low = lam.imag < 0
    arg = np.where(low, np.conj(lam), lam)
    v = np.asarray(star(arg), dtype=complex)
    out = np.where(low, np.conj(v), v)
    return out if out.ndim else complex(out)
