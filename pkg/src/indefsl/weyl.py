"""Weyl functions M+/M-, their difference D = M+ - M-, and asymptotic diagnostics.

A ``WeylPair`` is either built from finite-zone data or from one of the
closed forms (constant potential, the two one-zone elliptic families). All
closed forms carry equivalent finite-zone data so the spectral machinery can
run on them; the closed formula itself is what ``m_star`` evaluates.
"""
from __future__ import annotations

from functools import cached_property
from typing import Dict, List, Optional

import numpy as np

from ._branch import reflect_eval, sqrt_branch, sqrt_cut
from .bands import BandStructure, FiniteZoneData, MeasurePair, finite_zone, measure_pair
from .errors import NotHerglotz, PoleHit

__all__ = ["WeylPair", "sqrt_cut", "sqrt_branch", "eval_M", "eval_D", "asymptotics_check"]

_LO_P = -0.5 * np.pi
_LO_M = -1.5 * np.pi

KINDS = ("finite_zone", "const", "example1", "example2")


def _sb(z):
    return sqrt_branch(z, _LO_P)


class WeylPair:
    """Evaluator for (M+, M-).

    ``literal=True`` evaluates the one-zone closed forms with the linear
    numerator factor, and ``minus_reading="literal"`` (second family only)
    takes M- = -M+. Neither variant is an R-function pair, so they support
    evaluation and diagnostics only.
    """

    def __init__(self, fz: Optional[FiniteZoneData], kind: str = "finite_zone",
                 params: Optional[Dict[str, float]] = None, literal: bool = False,
                 minus_reading: str = "reflect"):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        if minus_reading not in ("reflect", "literal"):
            raise ValueError("minus_reading must be 'reflect' or 'literal'")
        if minus_reading == "literal" and kind != "example2":
            raise ValueError("the literal minus reading only applies to example2")
        self.fz = fz
        self.kind = kind
        self.params = dict(params or {})
        self.literal = bool(literal)
        self.minus_reading = minus_reading

    # constructors
    @classmethod
    def from_bands(cls, b: BandStructure) -> "WeylPair":
        return cls(finite_zone(b))

    @classmethod
    def const(cls, a: float) -> "WeylPair":
        return cls(finite_zone(BandStructure([a])), "const", {"a": float(a)})

    @classmethod
    def example1(cls, xi: float, k2: float, literal: bool = False) -> "WeylPair":
        _check_k2(k2)
        b = BandStructure([xi, xi + 1.0], [xi + k2], [xi + 1.0], [1.0])
        return cls(finite_zone(b), "example1", {"xi": float(xi), "k2": float(k2)}, literal)

    @classmethod
    def example2(cls, xi: float, k2: float, literal: bool = False,
                 minus_reading: str = "reflect") -> "WeylPair":
        _check_k2(k2)
        b = BandStructure([xi, xi + 1.0], [xi + k2], [xi + k2], [1.0])
        return cls(finite_zone(b), "example2", {"xi": float(xi), "k2": float(k2)}, literal,
                   minus_reading)

    @classmethod
    def from_spec(cls, spec: dict) -> "WeylPair":
        """Build from ``{"kind": ..., "xi": .., "k2": .., "a": ..}`` or band JSON."""
        if "mu_r" in spec:
            return cls.from_bands(BandStructure.from_dict(spec))
        kind = spec.get("kind")
        if kind == "const":
            return cls.const(float(spec["a"]))
        if kind == "example1":
            return cls.example1(float(spec["xi"]), float(spec["k2"]), bool(spec.get("literal", False)))
        if kind == "example2":
            return cls.example2(float(spec["xi"]), float(spec["k2"]), bool(spec.get("literal", False)),
                                spec.get("minus_reading", "reflect"))
        raise ValueError(f"unknown closed-form kind {kind!r}")

    def to_spec(self) -> dict:
        if self.kind == "finite_zone":
            return self.fz.bands.to_dict()
        out = {"kind": self.kind, **self.params}
        if self.literal:
            out["literal"] = True
        if self.minus_reading != "reflect":
            out["minus_reading"] = self.minus_reading
        return out

    def __repr__(self):
        return f"WeylPair({self.to_spec()})"

    # structural data
    @property
    def is_herglotz(self) -> bool:
        return not self.literal and self.minus_reading == "reflect"

    def require_herglotz(self) -> FiniteZoneData:
        if not self.is_herglotz:
            raise NotHerglotz("literal closed forms are not R-functions; spectral analysis refused")
        return self.fz

    @property
    def bands(self) -> BandStructure:
        return self.fz.bands

    @property
    def edges(self) -> np.ndarray:
        return self.fz.edges

    @property
    def tau(self):
        return self.fz.tau

    @property
    def scale(self) -> float:
        return self.fz.scale

    @cached_property
    def measures(self) -> MeasurePair:
        return measure_pair(self.require_herglotz())

    def poles(self, side: str) -> List[float]:
        return [t for t, _ in self.measures.atoms(side)]

    # evaluation
    def _closed_plus(self, lam):
        p = self.params
        if self.kind == "const":
            return 1j / _sb(lam - p["a"])
        xi, k2 = p["xi"], p["k2"]
        a, b, c = xi, xi + k2, xi + 1.0
        if self.kind == "example2":
            b, c = c, b
        # (a, b) are the square-root factors of the denominator, c the numerator root
        if self.literal:
            return 1j * (lam - c) / sqrt_cut((lam - a) * (lam - b))
        return 1j * _sb(lam - c) / (_sb(lam - a) * _sb(lam - b))

    def m_star(self, lam, side: str = "+"):
        """Continuation of M+/M- from the upper half-plane (boundary values from above)."""
        lam = np.asarray(lam, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._m_star(lam, side)
        out = np.asarray(out)
        return out if out.ndim else complex(out)

    def _m_star(self, lam, side):
        if self.kind == "finite_zone":
            out = self.fz.m_star(lam, side)
        elif side == "+":
            out = self._closed_plus(lam)
        elif self.kind == "const":
            out = 1j / sqrt_branch(-lam - self.params["a"], _LO_M)
        elif self.minus_reading == "literal":
            out = -self._closed_plus(lam)
        elif self.literal:
            out = -self._closed_plus(-lam)
        else:
            out = -np.conj(self._closed_plus(-np.conj(lam)))
        return out

    def m(self, lam, side: str = "+"):
        """M+/M- as functions on C+ U C- (conjugate-symmetric); real points from above."""
        if not self.is_herglotz:
            return self.m_star(lam, side)
        return reflect_eval(lambda z: self.m_star(z, side), lam)

    def d_star(self, lam):
        return self.m_star(lam, "+") - self.m_star(lam, "-")

    def d(self, lam):
        return self.m(lam, "+") - self.m(lam, "-")

    def essential_bands(self, side: str = "+"):
        """Closed support intervals of the a.c. spectrum of +L (side '+') or -L."""
        b = self.bands.bands
        if side == "+":
            return list(b)
        return sorted((-hi, -lo) for lo, hi in b)


def _check_k2(k2):
    if not 0.0 < k2 < 1.0:
        raise ValueError("k2 must lie in (0, 1)")


def _pole_check(w: WeylPair, side: str, lam: complex):
    if not w.is_herglotz or lam.imag != 0.0:
        return
    tol = 1e-12 * w.scale
    for theta, mass in w.measures.atoms(side):
        if abs(lam.real - theta) <= tol * max(1.0, abs(theta)):
            raise PoleHit(theta, side, mass)


def eval_M(w: WeylPair, side: str, lam) -> complex:
    """M+(lam) or M-(lam); raises ``PoleHit`` at a real pole."""
    lam = complex(lam)
    _pole_check(w, side, lam)
    return complex(w.m(lam, side))


def eval_D(w: WeylPair, lam) -> complex:
    lam = complex(lam)
    _pole_check(w, "+", lam)
    _pole_check(w, "-", lam)
    return complex(w.d(lam))


def asymptotics_check(w: WeylPair, radii=(1e2, 1e4, 1e6),
                      angles=(0.25 * np.pi, 0.5 * np.pi, 0.75 * np.pi), tol: float = 0.05) -> dict:
    """Fit |M(lam)| ~ C |lam|^p along rays and compare with M+ ~ i/sqrt(lam), M- ~ -i/sqrt(-lam)."""
    r = np.asarray(radii, float)
    report = {"rays": [], "mismatch": False}
    for phi in angles:
        lam = r * np.exp(1j * phi)
        for side in "+-":
            v = np.asarray(w.m(lam, side))
            slope = float(np.polyfit(np.log(r), np.log(np.abs(v)), 1)[0])
            if side == "+":
                const = v[-1] * sqrt_cut(lam[-1])
            else:
                const = -v[-1] * sqrt_cut(-lam[-1])
            bad = abs(slope + 0.5) > tol
            report["rays"].append({"side": side, "arg": float(phi), "exponent": slope,
                                   "constant": [float(const.real), float(const.imag)],
                                   "status": "MISMATCH" if bad else "OK"})
            report["mismatch"] |= bad
    report["status"] = "MISMATCH" if report["mismatch"] else "OK"
    return report
