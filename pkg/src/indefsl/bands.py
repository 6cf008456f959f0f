"""Band structures and the finite-zone quadruple (P, Q, R, S) with PS - Q^2 = R."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ._branch import fz_star, h_minus, h_plus
from .errors import (ComplexResidue, DivisionRemainder, InvalidBands, NotHerglotz,
                     TauOutOfGap)
from .poly import RealPoly, poly_roots

Interval = Tuple[float, float]


@dataclass(frozen=True)
class BandStructure:
    """Spectrum of L: [mu_r[0], mu_l[0]] U [mu_r[1], mu_l[1]] U ... U [mu_r[N], inf).

    ``mu_l[j-1]`` and ``mu_r[j]`` bound the j-th gap; ``xi[j-1]`` lies in its
    closure and ``signs[j-1]`` picks the sheet of the divisor point.
    """

    mu_r: Tuple[float, ...]
    mu_l: Tuple[float, ...] = ()
    xi: Tuple[float, ...] = ()
    signs: Tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("mu_r", "mu_l", "xi", "signs"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = len(self.mu_l)
        if len(self.mu_r) != n + 1:
            raise InvalidBands(f"need len(mu_r) = len(mu_l) + 1, got {len(self.mu_r)} and {n}")
        if len(self.xi) != n:
            raise InvalidBands(f"need {n} divisor points, got {len(self.xi)}")
        if len(self.signs) not in (0, n):
            raise InvalidBands(f"need {n} signs, got {len(self.signs)}")
        if not self.signs:
            object.__setattr__(self, "signs", tuple([1.0] * n))
        e = self.edges
        if not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0):
            raise InvalidBands(f"edges must interlace strictly: {list(e)}")
        for j, x in enumerate(self.xi):
            if not (self.mu_l[j] <= x <= self.mu_r[j + 1]):
                raise InvalidBands(f"xi_{j + 1} = {x} outside gap [{self.mu_l[j]}, {self.mu_r[j + 1]}]")

    @property
    def N(self) -> int:
        return len(self.mu_l)

    @property
    def edges(self) -> np.ndarray:
        out = [self.mu_r[0]]
        for l, r in zip(self.mu_l, self.mu_r[1:]):
            out += [l, r]
        return np.array(out)

    @property
    def bands(self) -> List[Interval]:
        lo = list(self.mu_r)
        hi = list(self.mu_l) + [np.inf]
        return list(zip(lo, hi))

    @property
    def gaps(self) -> List[Interval]:
        return list(zip(self.mu_l, self.mu_r[1:]))

    @property
    def scale(self) -> float:
        e = self.edges
        return float(max(1.0, e.max() - e.min(), np.abs(e).max()))

    def to_dict(self) -> dict:
        return {"mu_r": list(self.mu_r), "mu_l": list(self.mu_l), "xi": list(self.xi),
                "signs": list(self.signs)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BandStructure":
        unknown = set(d) - {"mu_r", "mu_l", "xi", "signs"}
        if unknown:
            raise InvalidBands(f"unknown keys {sorted(unknown)}")
        return cls(d["mu_r"], d.get("mu_l", ()), d.get("xi", ()), d.get("signs", ()))

    @classmethod
    def from_json(cls, text: str) -> "BandStructure":
        return cls.from_dict(json.loads(text))


def _prod_eval(roots, x):
    x = np.asarray(x)
    out = np.ones(x.shape, dtype=np.result_type(x, float))
    for r in roots:
        out = out * (x - r)
    return out if out.ndim else out[()]


@dataclass(frozen=True, eq=False)
class FiniteZoneData:
    """Validated quadruple with the band data it came from."""

    P: RealPoly
    Q: RealPoly
    R: RealPoly
    S: RealPoly
    tau: Tuple[float, ...]
    bands: BandStructure

    @property
    def edges(self) -> np.ndarray:
        return self.bands.edges

    @property
    def scale(self) -> float:
        return self.bands.scale

    # product forms avoid the cancellation of expanded coefficients near clustered roots
    def P_eval(self, x):
        return _prod_eval(self.bands.xi, x)

    def R_eval(self, x):
        return _prod_eval(self.edges, x)

    def S_eval(self, x):
        return _prod_eval(self.tau, x)

    def m_star(self, lam, side: str = "+"):
        return fz_star(self.P_eval, self.Q, self.S_eval, self.edges, lam, side)

    def identity_residual(self) -> float:
        res = self.P * self.S - self.Q * self.Q - self.R
        return res.norm_inf() / self.R.norm_inf()


@dataclass
class MeasurePair:
    """Spectral measures dSigma+ and dSigma-: a.c. densities plus point masses."""

    density_plus: Callable
    density_minus: Callable
    atoms_plus: List[Tuple[float, float]] = field(default_factory=list)
    atoms_minus: List[Tuple[float, float]] = field(default_factory=list)
    support_plus: List[Interval] = field(default_factory=list)
    support_minus: List[Interval] = field(default_factory=list)
    # edges where the density blows up like |t - t0|^(-1/2)
    singular_plus: List[float] = field(default_factory=list)
    singular_minus: List[float] = field(default_factory=list)

    def density(self, side: str):
        return self.density_plus if side == "+" else self.density_minus

    def atoms(self, side: str):
        return self.atoms_plus if side == "+" else self.atoms_minus

    def support(self, side: str):
        return self.support_plus if side == "+" else self.support_minus


def build_PR(b: BandStructure) -> Tuple[RealPoly, RealPoly]:
    """P = prod (lam - xi_j), R = (lam - mu_r0) prod (lam - mu_lj)(lam - mu_rj)."""
    return RealPoly.from_roots(b.xi), RealPoly.from_roots(b.edges)


def _edge_tol(scale: float) -> float:
    return 1e-12 * scale


def solve_QS(P: RealPoly, R: RealPoly, signs: Sequence[float],
             bands: Optional[BandStructure] = None) -> Tuple[RealPoly, RealPoly]:
    """Q by Lagrange interpolation through (xi_j, s_j sqrt(-R(xi_j))), then S = (R + Q^2)/P.

    Sign entries must be +1 or -1 for interior divisor points; anything else
    has no Herglotz realization and raises ``NotHerglotz``.
    """
    N = P.degree
    if len(signs) != N:
        raise InvalidBands(f"need {N} signs, got {len(signs)}")
    if bands is not None:
        xi = np.array(bands.xi)
        edges = bands.edges
        scale = bands.scale
    else:
        xi = np.sort(np.array([r.real for r, m in poly_roots(P) for _ in range(m)])) if N else np.array([])
        edges = np.sort(np.array([r.real for r, m in poly_roots(R) for _ in range(m)]))
        scale = float(max(1.0, np.ptp(edges), np.abs(edges).max()))
    if N and np.min(np.diff(np.sort(xi)), initial=np.inf) <= 1e-12 * scale:
        raise InvalidBands("repeated divisor points are not supported")
    y = np.zeros(N)
    rn = R.norm_inf()
    for j in range(N):
        on_edge = np.min(np.abs(edges - xi[j])) <= _edge_tol(scale)
        v = -float(np.prod(xi[j] - edges))
        if on_edge:
            continue
        if v < -1e-12 * rn * scale ** (2 * N + 1):
            raise InvalidBands(f"-R(xi_{j + 1}) = {v} < 0: divisor point inside a band")
        s = float(signs[j])
        if s not in (1.0, -1.0):
            raise NotHerglotz(f"sign {s} at interior divisor xi_{j + 1} = {xi[j]}: "
                              "Q(xi)^2 = -R(xi) forces a sign of +1 or -1")
        y[j] = s * np.sqrt(max(v, 0.0))
    Q = RealPoly([0.0])
    for j in range(N):
        if y[j] == 0.0:
            continue
        others = np.delete(xi, j)
        basis = RealPoly.from_roots(others) * (1.0 / np.prod(xi[j] - others))
        Q = Q + basis * y[j]
    num = R + Q * Q
    S, rem = num.divmod(P)
    if rem.norm_inf() > 1e-9 * num.norm_inf():
        raise DivisionRemainder(f"relative remainder {rem.norm_inf() / num.norm_inf():.2e}")
    return Q, S


def herglotz_grid(scale: float, n_rad: int = 200, n_arg: int = 8) -> np.ndarray:
    r = np.logspace(-3, 3, n_rad) * scale
    a = np.pi * np.arange(1, n_arg + 1) / (n_arg + 1)
    return (r[:, None] * np.exp(1j * a[None, :])).ravel()


def validate(d: FiniteZoneData) -> None:
    """Check the identity, the placement of the roots of S, and the Herglotz screen."""
    b = d.bands
    res = d.identity_residual()
    if res > 1e-10:
        raise DivisionRemainder(f"identity residual {res:.2e}")
    tol = 1e-9 * b.scale
    tau = np.array(d.tau)
    if tau[0] > b.mu_r[0] + tol:
        raise TauOutOfGap(f"tau_0 = {tau[0]} exceeds mu_r0 = {b.mu_r[0]}")
    for j, (l, r) in enumerate(b.gaps, start=1):
        if not (l - tol <= tau[j] <= r + tol):
            raise TauOutOfGap(f"tau_{j} = {tau[j]} outside gap [{l}, {r}]")
    lam = herglotz_grid(b.scale)
    for side in "+-":
        im = np.imag(d.m_star(lam, side))
        bad = ~(im > 0)
        if bad.any():
            k = int(np.argmax(bad))
            raise NotHerglotz(f"Im M{side}({lam[k]:.4g}) = {im[k]:.3g} <= 0")


def _roots_of_S(S: RealPoly, scale: float) -> Tuple[float, ...]:
    if S.degree < 1:
        return ()
    rts = [r for r, m in poly_roots(S) for _ in range(m)]
    if any(abs(r.imag) > 1e-7 * scale for r in rts):
        raise TauOutOfGap(f"S has nonreal roots {rts}")
    return tuple(sorted(float(r.real) for r in rts))


def finite_zone(b: BandStructure) -> FiniteZoneData:
    """Build and validate the quadruple for a band structure."""
    P, R = build_PR(b)
    Q, S = solve_QS(P, R, b.signs, bands=b)
    d = FiniteZoneData(P, Q, R, S, _roots_of_S(S, b.scale), b)
    validate(d)
    return d


def _in_bands(b: BandStructure, s, closed: bool):
    s = np.asarray(s, dtype=float)
    out = np.zeros(s.shape, bool)
    for lo, hi in b.bands:
        out |= (s >= lo) & (s <= hi) if closed else (s > lo) & (s < hi)
    return out


def spectral_density(d: FiniteZoneData, side: str, t):
    """Absolutely continuous density (1/pi) sqrt|R(s)| / |S(s)|, s = +t or -t.

    Zero off the bands; ``inf`` at an edge where S vanishes too.
    """
    t = np.asarray(t, dtype=float)
    s = t if side == "+" else -t
    inside = _in_bands(d.bands, s, closed=False)
    Rv = np.abs(d.R_eval(s))
    Sv = np.abs(d.S_eval(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sqrt(Rv) / Sv / np.pi
    out = np.where(inside, val, 0.0)
    tol = 1e-12 * d.scale
    for e in d.edges:
        if min((abs(e - x) for x in d.tau), default=np.inf) <= tol:
            out = np.where(np.abs(s - e) <= tol, np.inf, out)
    return out if out.ndim else float(out)


def discrete_masses(d: FiniteZoneData, side: str) -> List[Tuple[float, float]]:
    """Point masses (theta, m) of dSigma+/-; m = minus the residue of M+/- at theta."""
    out = []
    tol = 1e-10 * d.scale
    dS = d.S.deriv()
    for tau in d.tau:
        if np.min(np.abs(d.edges - tau)) <= tol:
            continue
        q = float(d.Q(tau))
        if side == "+":
            ih = 1j * h_plus(d.edges, complex(tau))
        else:
            ih = -1j * h_minus(d.edges, complex(-tau))
        pole, other = q + ih, q - ih
        if abs(pole) <= abs(other):
            continue
        m = complex(-pole / dS(tau)) if side == "+" else complex(pole / dS(tau))
        if abs(m.imag) > 1e-8 * max(abs(m), 1e-300):
            raise ComplexResidue(f"mass {m} at theta = {tau}")
        if m.real <= 0:
            raise NotHerglotz(f"negative mass {m.real} at theta = {tau}")
        out.append((tau if side == "+" else -tau, m.real))
    return sorted(out)


def measure_pair(d: FiniteZoneData) -> MeasurePair:
    b = d.bands
    sup_p = [(lo, hi) for lo, hi in b.bands]
    sup_m = sorted((-hi, -lo) for lo, hi in b.bands)
    tol = 1e-12 * d.scale
    sing = [float(e) for e in d.edges if min((abs(e - x) for x in d.tau), default=np.inf) <= tol]
    return MeasurePair(
        density_plus=lambda t: spectral_density(d, "+", t),
        density_minus=lambda t: spectral_density(d, "-", t),
        atoms_plus=discrete_masses(d, "+"),
        atoms_minus=discrete_masses(d, "-"),
        support_plus=sup_p,
        support_minus=sup_m,
        singular_plus=sing,
        singular_minus=[-e for e in sing],
    )
