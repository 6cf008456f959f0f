"""Essential spectrum, eigenvalues with multiplicities, and definitizability."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .bands import MeasurePair
from .errors import WindingMismatch
from .poly import RealPoly, poly_roots
from .quad import ac_integral, divergence_test
from .weyl import WeylPair

Interval = Tuple[float, float]

__all__ = ["Eigenvalue", "SpectrumResult", "essential_spectrum", "eigenvalues",
           "atom_multiplicity", "AtomVerdict", "definitizable", "Definitizability",
           "winding_number", "zero_order", "rationalized_D", "supports"]


# intervals

def merge_intervals(iv: Sequence[Interval]) -> List[Interval]:
    out: List[List[float]] = []
    for a, b in sorted(iv):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(float(a), float(b)) for a, b in out]


def essential_spectrum(w: WeylPair) -> List[Interval]:
    """sigma(L) united with its reflection -sigma(L), merged."""
    return merge_intervals(w.essential_bands("+") + w.essential_bands("-"))


def in_intervals(x: float, iv: Sequence[Interval], tol: float = 0.0, open_: bool = False) -> bool:
    for a, b in iv:
        if open_:
            if a + tol < x < b - tol:
                return True
        elif a - tol <= x <= b + tol:
            return True
    return False


# contour tools

def winding_number(f: Callable, path: Callable, n0: int = 2048, max_points: int = 400_000,
                   max_step: float = np.pi / 4) -> float:
    """Total change of arg f along the closed path s -> path(s), s in [0, 1], over 2*pi.

    Starts from ``n0`` nodes and bisects any step whose phase jump exceeds
    ``max_step`` until the phase track is resolved.
    """
    s = np.linspace(0.0, 1.0, n0 + 1)
    v = np.asarray(f(path(s)), dtype=complex)
    while True:
        with np.errstate(divide="ignore", invalid="ignore"):
            dphi = np.angle(v[1:] / v[:-1])
        bad = ~np.isfinite(dphi) | (np.abs(dphi) > max_step)
        if not bad.any() or s.size > max_points:
            break
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (s[idx] + s[idx + 1])
        vm = np.asarray(f(path(mids)), dtype=complex)
        s = np.insert(s, idx + 1, mids)
        v = np.insert(v, idx + 1, vm)
    dphi = np.nan_to_num(dphi)
    return float(dphi.sum() / (2.0 * np.pi))


def rect_path(x0: float, x1: float, y0: float, y1: float) -> Callable:
    corners = np.array([x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x0 + 1j * y0])
    seg = np.abs(np.diff(corners))
    cum = np.concatenate([[0.0], np.cumsum(seg)]) / seg.sum()

    def path(s):
        s = np.asarray(s, float)
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, 3)
        loc = (s - cum[k]) / (cum[k + 1] - cum[k])
        return corners[k] + loc * (corners[k + 1] - corners[k])

    return path


def zero_order(f: Callable, center: complex, r: float, n_side: int = 512) -> float:
    """Winding of f around the square of half-side r centred at ``center``."""
    c = complex(center)
    return winding_number(f, rect_path(c.real - r, c.real + r, c.imag - r, c.imag + r), n0=4 * n_side)


def _newton(f: Callable, z: complex, scale: float, iters: int = 40) -> Tuple[complex, bool]:
    for _ in range(iters):
        h = 1e-6 * max(abs(z), 1e-2 * scale)
        fz = complex(f(z))
        df = (complex(f(z + h)) - complex(f(z - h))) / (2 * h)
        if not np.isfinite(fz) or not np.isfinite(df) or df == 0:
            return z, False
        step = fz / df
        z = z - step
        if abs(step) <= 1e-14 * max(abs(z), scale):
            return z, True
    return z, abs(step) <= 1e-9 * max(abs(z), scale)


# rationalization

def rationalized_D(w: WeylPair) -> RealPoly:
    """Polynomial vanishing at every zero of M+ - M- where both are finite.

    With u = P(-l) h+(l), v = P(l) h-(l) and a = P(l)Q(-l) - P(-l)Q(l), the
    equation a = -i(u + v) squares twice to (a^2 + U + V)^2 = 4UV; when a == 0
    it reduces to U = V.
    """
    fz = w.require_herglotz()
    P, Q, R = fz.P, fz.Q, fz.R
    Pm, Qm, Rm = P.reflect(), Q.reflect(), R.reflect()
    a = P * Qm - Pm * Q
    U = Pm * Pm * R
    V = P * P * Rm
    if a.norm_inf() <= 1e-13 * max(1.0, P.norm_inf() * max(Q.norm_inf(), 1e-300)) or Q.is_zero:
        return U - V
    t = a * a + U + V
    return t * t - U * V * 4.0


@dataclass
class Eigenvalue:
    value: complex
    alg_mult: int
    geo_mult: int = 1
    kind: str = "nonreal"

    def to_dict(self):
        return {"re": float(self.value.real), "im": float(self.value.imag), "mult": int(self.alg_mult),
                "kind": self.kind}


@dataclass
class SpectrumResult:
    essential: List[Interval]
    eigenvalues: List[Eigenvalue] = field(default_factory=list)
    # real zeros of the boundary values of M+ - M- inside the essential spectrum
    ess_zeros: List[float] = field(default_factory=list)
    winding_check: Optional[dict] = None

    def to_dict(self):
        def enc(x):
            return None if not np.isfinite(x) else float(x)
        return {"essential": [[enc(a), enc(b)] for a, b in self.essential],
                "eigenvalues": [e.to_dict() for e in self.eigenvalues]}


def special_points(w: WeylPair) -> np.ndarray:
    e = list(w.edges) + [-x for x in w.edges] + w.poles("+") + w.poles("-")
    return np.array(sorted(set(float(x) for x in e)))


def _dedupe(zs: List[complex], tol: float) -> List[complex]:
    out: List[complex] = []
    for z in zs:
        if all(abs(z - o) > tol for o in out):
            out.append(z)
    return out


def eigenvalues(w: WeylPair, verify: bool = True) -> SpectrumResult:
    """Eigenvalues of the indefinite operator from the zeros of D = M+ - M-.

    Candidates from the rationalized polynomial are polished by Newton on D,
    filtered by the residual of D, and assigned multiplicities by the
    argument principle. Common poles of M+ and M- are eigenvalues whose
    multiplicity is the zero order of 1/M+ - 1/M-.
    """
    fz = w.require_herglotz()
    scale = w.scale
    ess = essential_spectrum(w)
    spec = special_points(w)
    F = rationalized_D(w)
    raw = [r for r, _ in poly_roots(F)] if F.degree >= 1 else []
    tol_im = 1e-9 * scale

    zeros: List[complex] = []
    for r in raw:
        if r.imag < -1e-6 * scale:
            continue
        z0 = complex(r.real, max(r.imag, 0.0))
        z, ok = _newton(w.d_star, z0, scale)
        if not ok or z.imag < -tol_im or abs(z - z0) > 1e-3 * scale:
            z = z0
        if abs(z.imag) <= tol_im:
            z = complex(z.real, 0.0)
        if abs(z.real) <= 1e-14 * scale:
            z = complex(0.0, z.imag)
        mp, mm = w.m_star(z, "+"), w.m_star(z, "-")
        if not (np.isfinite(mp) and np.isfinite(mm)):
            continue
        if abs(mp - mm) > 1e-8 * (abs(mp) + abs(mm) + 1e-300):
            continue
        zeros.append(z)
    zeros = _dedupe(zeros, 1e-7 * scale)

    res = SpectrumResult(essential=ess)
    etol = 1e-9 * scale
    for z in zeros:
        if z.imag > 0:
            others = [abs(z - o) for o in zeros if o != z] + [abs(z - s) for s in spec] + [z.imag]
            r = 0.3 * min(others + [0.1 * scale])
            k = int(round(zero_order(w.d_star, z, r)))
            if k >= 1:
                res.eigenvalues.append(Eigenvalue(z, k, 1, "nonreal"))
                res.eigenvalues.append(Eigenvalue(z.conjugate(), k, 1, "nonreal"))
            continue
        t = z.real
        if spec.size and np.min(np.abs(spec - t)) <= etol:
            if in_intervals(t, ess, etol):
                res.ess_zeros.append(t)
            continue
        if in_intervals(t, ess, etol):
            res.ess_zeros.append(t)
            continue
        others = [abs(t - o) for o in zeros if o != z] + [abs(t - s) for s in spec]
        r = 0.3 * min(others + [0.1 * scale])
        k = int(round(zero_order(w.d_star, t, r)))
        if k >= 1:
            res.eigenvalues.append(Eigenvalue(complex(t, 0.0), k, 1, "real"))

    # common poles
    pp, pm = w.poles("+"), w.poles("-")
    for th in pp:
        if any(abs(th - x) <= etol for x in pm):
            r = 0.3 * min([abs(th - s) for s in spec if abs(th - s) > etol] + [0.1 * scale])

            def g(z):
                return 1.0 / w.m_star(z, "+") - 1.0 / w.m_star(z, "-")

            k = int(round(zero_order(g, th, r)))
            res.eigenvalues.append(Eigenvalue(complex(th, 0.0), max(k, 1), 1, "common_pole"))

    res.eigenvalues.sort(key=lambda e: (e.value.real, e.value.imag))
    res.ess_zeros.sort()
    if verify:
        res.winding_check = _global_winding(w, res)
    return res


def _global_winding(w: WeylPair, res: SpectrumResult) -> dict:
    scale = w.scale
    upper = [e for e in res.eigenvalues if e.value.imag > 0]
    big = max([abs(e.value) for e in res.eigenvalues] + [abs(x) for x in w.edges] + [scale])
    B = 2.0 * (big + 1.0)
    delta = min([0.5 * e.value.imag for e in upper] + [1e-3 * scale])
    n = winding_number(w.d_star, rect_path(-B, B, delta, B), n0=4 * 512)
    expected = sum(e.alg_mult for e in upper)
    out = {"count": n, "expected": expected, "box": [-B, B, delta, B]}
    if abs(n - expected) > 0.25:
        raise WindingMismatch(f"argument principle gives {n:.3f} zeros in C+, polynomial route {expected}")
    return out


# point-mass classification

@dataclass
class AtomVerdict:
    eigenvalue: bool
    multiplicity: Optional[int] = None
    capped: bool = False
    case: str = ""

    def __str__(self):
        if not self.eigenvalue:
            return "NotEigenvalue"
        return f"Eigenvalue({'>=' if self.capped else ''}{self.multiplicity})"


class _MeasureOps:
    def __init__(self, mp: MeasurePair, lam0: complex, scale: float):
        self.mp = mp
        self.lam0 = complex(lam0)
        self.scale = scale
        self.atol = 1e-10 * scale

    def mass_at(self, side) -> float:
        if abs(self.lam0.imag) > 0:
            return 0.0
        for th, m in self.mp.atoms(side):
            if abs(th - self.lam0.real) <= self.atol:
                return m
        return 0.0

    def dist_to_ac(self, side) -> float:
        if self.lam0.imag != 0:
            return abs(self.lam0.imag)
        x = self.lam0.real
        d = np.inf
        for a, b in self.mp.support(side):
            d = min(d, 0.0 if a <= x <= b else min(abs(x - a), abs(x - b)))
        return d

    def finite_power(self, side, p: int) -> bool:
        """Whether the integral of |t - lam0|^(-p) dSigma over R minus {lam0} is finite."""
        if self.dist_to_ac(side) > 0:
            return True
        x = self.lam0.real
        dens = self.mp.density(side)
        sup = self.mp.support(side)

        def partial(delta):
            return ac_integral(dens, sup, lambda t: abs(t - x) ** -p, window=(x, delta)).real

        return divergence_test(partial, 1e-2 * self.scale) == "finite"

    def moment(self, side, n: int) -> complex:
        """Integral of (t - lam0)^(-n) dSigma over R minus {lam0}."""
        z = self.lam0
        val = ac_integral(self.mp.density(side), self.mp.support(side), lambda t: (t - z) ** -n)
        for th, m in self.mp.atoms(side):
            if abs(th - z) > self.atol:
                val += m / (th - z) ** n
        return val


def _equal(a: complex, b: complex, rtol: float = 1e-7) -> bool:
    return abs(a - b) <= rtol * (abs(a) + abs(b)) + 1e-12


def atom_multiplicity(mp: MeasurePair, lam0, k_max: int = 8, scale: float = 1.0) -> AtomVerdict:
    """Eigenvalue test and algebraic multiplicity from the two spectral measures."""
    ops = _MeasureOps(mp, lam0, scale)
    mass = {s: ops.mass_at(s) for s in "+-"}
    cls = {}
    for s in "+-":
        if mass[s] > 0:
            cls[s] = "p"
        else:
            cls[s] = "r" if ops.finite_power(s, 2) else "0"
    if "0" in cls.values():
        return AtomVerdict(False, case="continuous")
    if cls["+"] != cls["-"]:
        return AtomVerdict(False, case="mixed")
    if cls["+"] == "p":
        if not _equal(mass["+"], mass["-"], 1e-9):
            return AtomVerdict(True, 1, case="atoms")
        k = 2
        while k < k_max:
            j = k
            if not (ops.finite_power("+", 2 * j) and ops.finite_power("-", 2 * j)):
                break
            if not _equal(ops.moment("+", j - 1), ops.moment("-", j - 1)):
                break
            k += 1
        return AtomVerdict(True, k, capped=k >= k_max, case="atoms")
    if not _equal(ops.moment("+", 1), ops.moment("-", 1)):
        return AtomVerdict(False, case="regular")
    k = 1
    while k < k_max:
        j = k + 1
        if not (ops.finite_power("+", 2 * j) and ops.finite_power("-", 2 * j)):
            break
        if not _equal(ops.moment("+", j), ops.moment("-", j)):
            break
        k = j
    return AtomVerdict(True, k, capped=k >= k_max, case="regular")


# definitizability

@dataclass
class Definitizability:
    definitizable: bool
    alphas: List[float] = field(default_factory=list)
    witness: Optional[Interval] = None

    def to_dict(self):
        def enc(x):
            return None if x is None or not np.isfinite(x) else float(x)
        return {"definitizable": self.definitizable, "alphas": [enc(a) for a in self.alphas],
                "witness": None if self.witness is None else [enc(self.witness[0]), enc(self.witness[1])]}


def supports(w: WeylPair) -> Tuple[List[Interval], List[Interval]]:
    """Closed supports of dSigma+ and dSigma-: bands plus atom locations."""
    mp = w.measures
    sp = list(mp.support_plus) + [(t, t) for t, _ in mp.atoms_plus]
    sm = list(mp.support_minus) + [(t, t) for t, _ in mp.atoms_minus]
    return sp, sm


def definitizable(supports_plus: Sequence[Interval], supports_minus: Sequence[Interval],
                  tol: float = 1e-12) -> Definitizability:
    """Separate supp dSigma- (left pieces) from supp dSigma+ (right pieces) by finitely many points.

    Fails exactly when the supports overlap on an interval of positive length;
    that interval is returned as the witness.
    """
    P = merge_intervals(supports_plus)
    M = merge_intervals(supports_minus)
    for a, b in P:
        for c, d in M:
            lo, hi = max(a, c), min(b, d)
            if hi - lo > tol:
                return Definitizability(False, witness=(lo, hi))
    pts = sorted(set([x for iv in P + M for x in iv if np.isfinite(x)]))

    def label(lo, hi):
        return {s for s, ivs in (("+", P), ("-", M)) for a, b in ivs if a <= lo and hi <= b}

    # alternate closed pieces: points and the open segments between them
    tokens = []
    edges = [-np.inf] + pts + [np.inf]
    for i, p in enumerate(pts):
        if i == 0:
            tokens.append((-np.inf, label(-np.inf, p - 0.0) if np.isinf(edges[0]) else set()))
        tokens.append((p, label(p, p)))
        tokens.append((p, label(p, edges[i + 2]) if i + 1 < len(pts) else label(p, np.inf)))
    alphas: List[float] = []
    cur = "-"
    for pos, lab in tokens:
        if not lab or cur in lab and len(lab) == 1:
            continue
        if len(lab) == 2 or cur not in lab:
            alphas.append(pos)
            cur = "+" if cur == "-" else "-"
    if cur == "-":
        alphas.append(pts[-1] if pts else 0.0)
    return Definitizability(True, alphas)
