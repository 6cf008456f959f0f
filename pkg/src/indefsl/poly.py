"""Real polynomials with ascending coefficients and a simultaneous root finder."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import NonConvergence

__all__ = ["RealPoly", "poly_eval", "poly_roots", "NonConvergence"]


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float).ravel()
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1)
    return c[: nz[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class RealPoly:
    """Polynomial ``sum coeffs[k] * lam**k`` with real coefficients.

    Trailing zeros are stripped so that ``degree`` is the index of the last
    nonzero coefficient. The zero polynomial has degree -1.
    """

    coeffs: np.ndarray

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(np.asarray(coeffs, dtype=float)))
        self.coeffs.setflags(write=False)

    # construction helpers
    @classmethod
    def from_roots(cls, roots: Sequence[float]) -> "RealPoly":
        c = np.array([1.0])
        for r in roots:
            c = np.convolve(c, [-float(r), 1.0])
        return cls(c)

    @classmethod
    def const(cls, v: float) -> "RealPoly":
        return cls([v])

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0.0:
            return -1
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    @property
    def lead(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, z):
        """Horner evaluation; accepts scalars or arrays, real or complex."""
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=np.result_type(z, float)) + self.coeffs[-1]
        for a in self.coeffs[-2::-1]:
            out = out * z + a
        return out if out.ndim else out[()]

    # arithmetic
    def _coerce(self, other) -> "RealPoly":
        return other if isinstance(other, RealPoly) else RealPoly([float(other)])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(self.coeffs.size, o.coeffs.size)
        return RealPoly(np.pad(self.coeffs, (0, n - self.coeffs.size)) + np.pad(o.coeffs, (0, n - o.coeffs.size)))

    __radd__ = __add__

    def __neg__(self):
        return RealPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RealPoly(np.convolve(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RealPoly([1.0])
        for _ in range(int(n)):
            out = out * self
        return out

    def divmod(self, d: "RealPoly") -> Tuple["RealPoly", "RealPoly"]:
        """Synthetic long division ``self = q*d + r`` with ``deg r < deg d``."""
        if d.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        num = self.coeffs.astype(float).copy()
        dd = d.coeffs
        m = d.degree
        if self.degree < m:
            return RealPoly([0.0]), RealPoly(num)
        q = np.zeros(self.degree - m + 1)
        for k in range(self.degree - m, -1, -1):
            q[k] = num[k + m] / dd[-1]
            num[k: k + m + 1] -= q[k] * dd
        return RealPoly(q), RealPoly(num[:m] if m > 0 else [0.0])

    def deriv(self, n: int = 1) -> "RealPoly":
        c = self.coeffs
        for _ in range(n):
            if c.size <= 1:
                return RealPoly([0.0])
            c = c[1:] * np.arange(1, c.size)
        return RealPoly(c)

    def reflect(self) -> "RealPoly":
        """Return ``p(-lam)``."""
        c = self.coeffs.copy()
        c[1::2] *= -1
        return RealPoly(c)

    def norm1(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def norm_inf(self) -> float:
        return float(np.abs(self.coeffs).max())

    def tolist(self) -> List[float]:
        return [float(v) for v in self.coeffs]

    def __repr__(self):
        return f"RealPoly({self.tolist()})"


def poly_eval(p: RealPoly, z):
    """Evaluate ``p`` at ``z`` by Horner's rule."""
    return p(z)


def _aberth(c: np.ndarray, maxiter: int) -> np.ndarray:
    """Aberth-Ehrlich iteration on a monic polynomial with ascending coefficients."""
    n = c.size - 1
    dc = c[1:] * np.arange(1, n + 1)
    # start on a circle sized by the Fujiwara bound, rotated off the real axis
    rad = 2.0 * np.max(np.abs(c[:-1][::-1]) ** (1.0 / np.arange(1, n + 1)))
    rad = max(rad, 1e-3)
    z = 0.5 * rad * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    done = np.zeros(n, bool)
    for it in range(maxiter):
        pv = np.polyval(c[::-1], z)
        dv = np.polyval(dc[::-1], z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = (1.0 / diff).sum(axis=1) - 1.0
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        w[done] = 0.0
        z = z - w
        done |= np.abs(w) <= 1e-15 * (1.0 + np.abs(z))
        if done.all():
            return z
    return z


def _polish(c: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    """A few Newton steps per root; steps that increase the residual are rejected."""
    dc = c[1:] * np.arange(1, c.size)
    for _ in range(steps):
        pv = np.polyval(c[::-1], z)
        dv = np.polyval(dc[::-1], z)
        with np.errstate(divide="ignore", invalid="ignore"):
            zn = z - pv / dv
        ok = np.isfinite(zn) & (np.abs(np.polyval(c[::-1], zn)) < np.abs(pv))
        z = np.where(ok, zn, z)
    return z


def poly_roots(p: RealPoly, maxiter: int = 200, cluster_tol: float = 1e-6,
               real_tol: float = 1e-9) -> List[Tuple[complex, int]]:
    """All roots of ``p`` as ``(root, multiplicity)`` pairs.

    Roots closer than ``cluster_tol*(1+|r|)`` are merged; roots with
    ``|Im r| <= real_tol*(1+|r|)`` are snapped to the real axis; complex roots
    come in conjugate pairs. Raises ``NonConvergence`` when the backward error
    after ``maxiter`` sweeps is still large.
    """
    if p.degree < 1:
        raise ValueError("poly_roots needs degree >= 1")
    c = p.coeffs / p.lead
    # factor out exact zero roots
    nzero = int(np.argmax(c != 0.0))
    c = c[nzero:]
    raw: List[complex] = [0j] * nzero
    if c.size > 1:
        z = _aberth(c, maxiter)
        z = _polish(c, z)
        scale = np.polyval(np.abs(c[::-1]), np.abs(z))
        back = np.abs(np.polyval(c[::-1], z)) / scale
        if not np.all(np.isfinite(z)) or np.max(back) > 1e-6:
            raise NonConvergence(f"Aberth iteration stalled; backward error {np.max(back):.2e}")
        raw.extend(z.tolist())
    return _cluster(np.array(raw, dtype=complex), cluster_tol, real_tol)


def _cluster(z: np.ndarray, cluster_tol: float, real_tol: float) -> List[Tuple[complex, int]]:
    order = np.argsort(z.real)
    z = z[order]
    used = np.zeros(z.size, bool)
    groups: List[Tuple[complex, int]] = []
    for i in range(z.size):
        if used[i]:
            continue
        members = [i]
        used[i] = True
        # transitive single-linkage merge
        k = 0
        while k < len(members):
            r = z[members[k]]
            close = (~used) & (np.abs(z - r) <= cluster_tol * (1.0 + abs(r)))
            idx = np.nonzero(close)[0]
            used[idx] = True
            members.extend(idx.tolist())
            k += 1
        groups.append((complex(np.mean(z[members])), len(members)))
    out: List[Tuple[complex, int]] = []
    for r, m in groups:
        if abs(r.imag) <= real_tol * (1.0 + abs(r)) or abs(r.imag) <= cluster_tol * (1.0 + abs(r)) and m > 1:
            r = complex(r.real, 0.0)
        out.append((r, m))
    # enforce conjugate pairing: rebuild the lower half from the upper half
    reals = [(r, m) for r, m in out if r.imag == 0.0]
    upper = [(r, m) for r, m in out if r.imag > 0.0]
    lower = [(r, m) for r, m in out if r.imag < 0.0]
    if sum(m for _, m in upper) == sum(m for _, m in lower):
        lower = [(r.conjugate(), m) for r, m in upper]
    res = reals + upper + lower
    res.sort(key=lambda t: (t[0].real, t[0].imag))
    return res


def roots_flat(p: RealPoly, **kw) -> np.ndarray:
    """Roots repeated according to multiplicity."""
    out = []
    for r, m in poly_roots(p, **kw):
        out.extend([r] * m)
    return np.array(out, dtype=complex)
