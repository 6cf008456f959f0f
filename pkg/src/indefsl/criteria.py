"""Abstract similarity criteria evaluated as grid surrogates, and the 2x2 characteristic function.

All sup-type conditions are sampled on fixed grids and probed for divergence by
refinement toward special points. Reports are evidence, not certificates.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .classify import candidate_points
from .errors import DegenerateD, QuadratureFailure, TailDivergence
from .spectrum import eigenvalues
from .weyl import WeylPair

__all__ = ["necessary_ratio", "sufficient_sum_ratio", "a2_check", "muckenhoupt_pair_scan",
           "char_function", "dissipative_part_check", "poisson_condition", "poisson_integral", "CriterionReport",
           "CharFunction", "J"]

J = np.array([[0.0, -1j], [1j, 0.0]])

GROWTH = 3.0


@dataclass
class CriterionReport:
    name: str
    value: float
    status: str
    witness: object = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        wit = self.witness
        if isinstance(wit, complex):
            wit = [wit.real, wit.imag]
        elif isinstance(wit, tuple):
            wit = list(wit)
        return {"value": None if not np.isfinite(self.value) else float(self.value),
                "status": self.status, "witness": wit, "notes": self.notes}


def _grows(seq, factor=GROWTH, steps=3) -> bool:
    seq = np.asarray(seq, float)
    if np.any(np.isinf(seq[-steps:])):
        return True
    with np.errstate(divide="ignore", invalid="ignore"):
        g = seq[1:] / seq[:-1]
    tail = g[-steps:]
    return bool(np.all(np.isfinite(tail)) and np.all(tail >= factor))


def _real_grid(w: WeylPair, n: int = 4001) -> np.ndarray:
    B = 4.0 * (w.scale + 1.0)
    return np.linspace(-B, B, n)


def _refine_points(w: WeylPair) -> List[complex]:
    """Real candidate points plus real or upper-half-plane eigenvalues."""
    pts: List[complex] = [complex(p) for p in candidate_points(w)]
    if w.is_herglotz:
        for e in eigenvalues(w, verify=False).eigenvalues:
            if e.value.imag >= 0:
                pts.append(e.value)
    return pts


def necessary_ratio(w: WeylPair, grid: Optional[np.ndarray] = None) -> CriterionReport:
    """sup over the real axis of |Im M(t) / (M+(t) - M-(t))| for both signs."""
    t = _real_grid(w) if grid is None else np.asarray(grid, float)
    poles = np.array(w.poles("+") + w.poles("-")) if w.is_herglotz else np.array([])
    if poles.size:
        t = t[np.min(np.abs(t[:, None] - poles[None, :]), axis=1) > 1e-9 * w.scale]
    notes = []
    if t.size == 0:
        notes.append("empty admissible grid")
        return CriterionReport("necessary_ratio", 0.0, "BOUNDED", None, notes)

    def ratio(x):
        x = np.asarray(x, float)
        xc = x.astype(complex)
        mp, mm = np.asarray(w.m(xc, "+")), np.asarray(w.m(xc, "-"))
        if w.is_herglotz:
            # a.c. densities vanish exactly in gaps, unlike roundoff in Im M
            ip = np.pi * np.asarray(w.measures.density("+")(x), float)
            im = np.pi * np.asarray(w.measures.density("-")(x), float)
        else:
            ip, im = np.abs(mp.imag), np.abs(mm.imag)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.maximum(ip, im) / np.abs(mp - mm)
        return np.where(np.isnan(r), 0.0, r)

    r = ratio(t)
    i = int(np.argmax(r))
    best, arg = float(r[i]), float(t[i])
    d = 10.0 ** -np.arange(2, 8, dtype=float) * w.scale
    for p in [q.real for q in _refine_points(w) if q.imag == 0] + [arg]:
        for side in (-1.0, 1.0):
            seq = ratio(p + side * d)
            if _grows(seq):
                return CriterionReport("necessary_ratio", float("inf"), "UNBOUNDED", float(p), notes)
            if np.max(seq) > best:
                best, arg = float(np.max(seq)), float(p + side * d[np.argmax(seq)])
    return CriterionReport("necessary_ratio", best, "BOUNDED", arg, notes)


def _log_polar_grid(r0=1e-4, r1=1e4, n_rad=81, n_ang=32, lower=False) -> np.ndarray:
    r = np.logspace(np.log10(r0), np.log10(r1), n_rad)
    a = (np.arange(n_ang) + 0.5) * np.pi / n_ang
    z = (r[:, None] * np.exp(1j * a[None, :])).ravel()
    return np.conj(z) if lower else z


def sufficient_sum_ratio(w: WeylPair, grid: Optional[np.ndarray] = None) -> CriterionReport:
    """sup over C+ of |M+ + M-| / |M+ - M-|; a finite sup is sufficient for selfadjoint similarity."""
    z = _log_polar_grid() if grid is None else np.asarray(grid, complex)
    if grid is None:
        z = np.concatenate([z, _real_grid(w, 2001) + 1e-6j])

    def ratio(x):
        mp, mm = np.asarray(w.m(x, "+")), np.asarray(w.m(x, "-"))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.abs(mp + mm) / np.abs(mp - mm)
        return np.where(np.isnan(r), np.inf, r)

    r = ratio(z)
    i = int(np.argmax(r))
    best, arg = float(r[i]), complex(z[i])
    note = "sufficient condition only; its failure does not exclude similarity"
    d = 10.0 ** -np.arange(2, 8, dtype=float) * w.scale
    for p in _refine_points(w) + [complex(arg.real, 0.0)]:
        seq = ratio(p + 1j * d)
        if _grows(seq):
            return CriterionReport("sufficient_sum_ratio", float("inf"), "UNBOUNDED", p, [note])
        if np.max(seq) > best:
            best, arg = float(np.max(seq)), complex(p + 1j * d[np.argmax(seq)])
    status = "SUFFICIENT-HOLDS" if np.isfinite(best) else "UNBOUNDED"
    return CriterionReport("sufficient_sum_ratio", best, status, arg, [note])


# weights

def _quad(f, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        pts = None if points is None else [p for p in points if a < p < b] or None
        val, _ = integrate.quad(f, a, b, points=pts, limit=400, epsabs=0.0, epsrel=1e-10)
    return val


def _quad_iv(f, a, b, points):
    """scipy quad on a possibly infinite interval, splitting at breakpoints."""
    pts = sorted(p for p in points if a < p < b)
    if np.isinf(a) or np.isinf(b):
        inner = [p for p in pts] or [0.0 if a < 0.0 < b else (b - 1.0 if np.isinf(a) else a + 1.0)]
        lo = inner[0] if np.isinf(a) else a
        hi = inner[-1] if np.isinf(b) else b
        total = _quad(f, lo, hi, pts) if hi > lo else 0.0
        if np.isinf(a):
            total += _quad(f, a, lo)
        if np.isinf(b):
            total += _quad(f, hi, b)
        return total
    return _quad(f, a, b, pts)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _gl_pieces(f: Callable, pieces, brk, n_sub: int = 1) -> float:
    """Vectorized Gauss-Legendre on finite pieces split at breakpoints.

    Each subinterval uses t = a + (b - a)(1 - cos th)/2, which absorbs
    square-root endpoint behaviour.
    """
    total = 0.0
    th = 0.5 * np.pi * (_GL_X + 1.0)
    for lo, hi in pieces:
        inner = sorted(p for p in brk if lo < p < hi)
        if np.isinf(lo) or np.isinf(hi):
            anchor = inner or [0.0 if lo < 0.0 < hi else (hi - 1.0 if np.isinf(lo) else lo + 1.0)]
            if np.isinf(lo):
                total += _gl_tail(f, anchor[0], -1.0)
                lo = anchor[0]
            if np.isinf(hi):
                total += _gl_tail(f, anchor[-1], 1.0)
                hi = anchor[-1]
            inner = [p for p in inner if lo < p < hi]
            if hi <= lo:
                continue
        cuts = [lo] + inner + [hi]
        for a, b in zip(cuts[:-1], cuts[1:]):
            t = a + 0.5 * (b - a) * (1.0 - np.cos(th))
            jac = 0.5 * (b - a) * np.sin(th) * 0.5 * np.pi
            total += float(np.sum(_GL_W * jac * f(t)))
    return total


def _gl_tail(f: Callable, a: float, sign: float) -> float:
    """Integral of f from a to sign*infinity via t = a + sign*s/(1-s)."""
    th = 0.5 * np.pi * (_GL_X + 1.0)
    s = 0.5 * (1.0 - np.cos(th))
    jac = 0.5 * np.sin(th) * 0.5 * np.pi
    t = a + sign * s / (1.0 - s)
    vals = f(t) / (1.0 - s) ** 2
    return float(np.sum(_GL_W * jac * np.where(np.isfinite(vals), vals, 0.0)))


def _w1_vec(w: WeylPair, dens: Callable) -> Callable:
    """t -> Im M(t) / |M+(t) - M-(t)|^2 on the real axis, vectorized."""
    def f(t):
        t = np.asarray(t, float)
        rho = np.asarray(dens(t), float)
        dd = np.abs(np.asarray(w.d(t.astype(complex))))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(rho > 0, np.pi * rho / dd ** 2, 0.0)
        return out
    return f


def _locally_integrable(f: Callable, s: float, r: float) -> bool:
    """Decide whether f is integrable near s by shrinking an exclusion window."""
    def part(delta):
        return _quad(f, s - r, s - delta) + _quad(f, s + delta, s + r)

    d = r * 10.0 ** -np.arange(1, 6, dtype=float)
    vals = np.array([part(x) for x in d])
    inc = np.abs(np.diff(vals))
    if np.all(inc <= 1e-13 * max(1.0, abs(vals[-1]))):
        return True
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = inc[1:] / inc[:-1]
    # a logarithmic divergence keeps the increments constant, a power one grows them
    return bool(np.all(ratio[-2:] <= 0.6))


@dataclass
class A2Result:
    status: str
    bound: Optional[float] = None
    witness: Optional[Tuple[float, float]] = None
    method: str = "scan"
    reason: str = ""

    def to_dict(self):
        return {"status": self.status, "bound": self.bound,
                "witness": None if self.witness is None else list(self.witness),
                "method": self.method, "reason": self.reason}


def _a2_products(weight, centers, ms, singular):
    out = np.empty((len(centers), len(ms)))
    for i, c in enumerate(centers):
        for j, m in enumerate(ms):
            L = 2.0 ** m
            a, b = c - 0.5 * L, c + 0.5 * L
            aw = _quad(weight, a, b, singular) / L
            ai = _quad(lambda t: 1.0 / weight(t), a, b, singular) / L
            out[i, j] = aw * ai
    return out


def a2_check(weight: Callable[[float], float], centers: Optional[Sequence[float]] = None,
             m_range: Tuple[int, int] = (-20, 20), singular_points: Sequence[float] = (),
             exponents: Optional[dict] = None) -> A2Result:
    """(A2) test for a weight: sup over intervals of (avg w)(avg 1/w).

    ``exponents={"alpha_inf": a, "local": [(t_j, alpha_j), ...]}`` enables the
    analytic shortcut for weights with power behaviour at finitely many points
    and at infinity: all exponents in (-1, 1) gives a PASS directly.
    """
    if exponents is not None:
        alphas = [exponents.get("alpha_inf", 0.0)] + [a for _, a in exponents.get("local", [])]
        if all(-1.0 < a < 1.0 for a in alphas):
            return A2Result("A2-PASS", None, None, "exponent")
    centers = list(np.linspace(-8.0, 8.0, 17) if centers is None else centers)
    sing = set(float(s) for s in singular_points)
    for c in centers:
        v = weight(c)
        if v == 0 or not np.isfinite(v):
            sing.add(float(c))
    sing = sorted(sing)
    for s in sing:
        for f in (weight, lambda t: 1.0 / weight(t)):
            if not _locally_integrable(f, s, 1.0):
                return A2Result("A2-FAIL", None, (s - 0.5, s + 0.5), "scan", "NonIntegrable")
    centers = sorted(set(centers) | set(sing))
    ms = np.arange(m_range[0], m_range[1] + 1)
    prod = _a2_products(weight, centers, ms, sing)
    for i, c in enumerate(centers):
        for seq in (prod[i], prod[i][::-1]):
            if _grows(seq, 2.0):
                m = ms[-1] if seq is prod[i] else ms[0]
                L = 2.0 ** m
                return A2Result("A2-FAIL", None, (c - L / 2, c + L / 2), "scan", "growth")
    sup = float(prod.max())
    # one refinement: extra length on each end and midpoints between centers
    mids = [0.5 * (a + b) for a, b in zip(centers[:-1], centers[1:])]
    ms2 = np.array([m_range[0] - 1, m_range[1] + 1])
    extra = _a2_products(weight, centers + mids, ms2, sing)
    sup2 = max(sup, float(extra.max()))
    if sup2 >= 2.0 * sup:
        i, j = np.unravel_index(np.argmax(extra), extra.shape)
        c, L = (centers + mids)[i], 2.0 ** ms2[j]
        return A2Result("A2-FAIL", sup2, (c - L / 2, c + L / 2), "scan", "refinement growth")
    return A2Result("A2-PASS", sup2, None, "scan")


def _clip(support, T):
    out = []
    for lo, hi in support:
        lo, hi = max(lo, -T), min(hi, T)
        if hi > lo:
            out.append((lo, hi))
    return out


def _len_inter(iv, support):
    a, b = iv
    return sum(max(0.0, min(b, hi) - max(a, lo)) for lo, hi in support)


def muckenhoupt_pair_scan(w: WeylPair, m_range: Tuple[int, int] = (-12, 6),
                          centers: Optional[Sequence[float]] = None) -> CriterionReport:
    """sup over intervals I of (|I^E|^-1 int_I Im M/|D|^2)(|I^E|^-1 int_I Im M), both signs."""
    w.require_herglotz()
    mp = w.measures
    scale = w.scale
    cand = candidate_points(w)
    base = list(np.linspace(-4 * scale, 4 * scale, 9)) if centers is None else list(centers)
    cs = sorted(set(base) | set(cand))
    best, wit = 0.0, None
    for side in "+-":
        dens = mp.density(side)
        sup_iv = mp.support(side)

        def imm(t, dens=dens):
            return np.pi * np.asarray(dens(np.asarray(t, float)), float)

        w1v = _w1_vec(w, dens)

        def w1(t, w1v=w1v):
            return float(w1v(np.array([t]))[0])

        inner = [p for p in cand if any(lo - 1e-12 <= p <= hi + 1e-12 for lo, hi in sup_iv)]
        for p in inner:
            if not _locally_integrable(w1, p, 1e-2 * scale):
                return CriterionReport("muckenhoupt_pair_scan", float("inf"), "DIVERGENT",
                                       {"side": side, "interval": [p - 1e-2 * scale, p + 1e-2 * scale]},
                                       ["necessary condition fails: not similar to a selfadjoint operator"])
        brk = sorted(set(cand) | {e for iv in sup_iv for e in iv if np.isfinite(e)})
        for c in cs:
            for m in range(m_range[0], m_range[1] + 1):
                L = 2.0 ** m * scale
                iv = (c - L / 2, c + L / 2)
                le = _len_inter(iv, sup_iv)
                if le <= 1e-14 * L:
                    continue
                pieces = _clip([(max(lo, iv[0]), min(hi, iv[1])) for lo, hi in sup_iv], np.inf)
                a1 = _gl_pieces(w1v, pieces, brk) / le
                a2 = _gl_pieces(imm, pieces, brk) / le
                val = a1 * a2
                if not np.isfinite(val):
                    return CriterionReport("muckenhoupt_pair_scan", float("inf"), "DIVERGENT",
                                           {"side": side, "interval": list(iv)})
                if val > best:
                    best, wit = val, {"side": side, "interval": list(iv)}
    return CriterionReport("muckenhoupt_pair_scan", best, "FINITE", wit)


@dataclass
class CharFunction:
    theta: np.ndarray
    omega: np.ndarray
    omega_star: np.ndarray
    conds: dict

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.theta))


def char_function(w: WeylPair, lam: complex) -> CharFunction:
    """theta_A(lam), its two J-forms, and the scalar sufficient-condition quantities at lam."""
    lam = complex(lam)
    mp, mm = complex(w.m(lam, "+")), complex(w.m(lam, "-"))
    d = mp - mm
    if abs(d) <= 1e-12 * max(abs(mp), abs(mm), 1e-300):
        raise DegenerateD(f"|M+ - M-| vanishes at {lam}")
    s = mp + mm
    theta = np.array([[s, 2.0 * mp * mm], [2.0, s]]) / (mm - mp)
    th_h = theta.conj().T
    omega = J - theta @ J @ th_h
    omega_star = J - th_h @ J @ theta
    ad = abs(d) ** 2
    conds = {
        "im_trace_ratio": ((mp + mm).imag + abs(mp) ** 2 * mm.imag + abs(mm) ** 2 * mp.imag) / ad,
        "im_product_ratio": mp.imag * mm.imag / ad,
        "entry_bound": max(abs(s) / abs(d), 1.0 / abs(d), abs(mp * mm) / abs(d)),
    }
    return CharFunction(theta, omega, omega_star, conds)


def dissipative_part_check(w: WeylPair, grid: Optional[np.ndarray] = None,
                           threshold: float = 1e-3) -> CriterionReport:
    """inf over C- of |1 - i Phi| with Phi = 2 (1/M- - M+)^-1."""
    z = _log_polar_grid(lower=True) if grid is None else np.asarray(grid, complex)
    skipped = 0

    def vals(x):
        nonlocal skipped
        x = np.asarray(x, complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = 2.0 / (1.0 / np.asarray(w.m(x, "-")) - np.asarray(w.m(x, "+")))
            v = np.abs(1.0 - 1j * phi)
        bad = ~np.isfinite(v)
        skipped += int(bad.sum())
        return np.where(bad, np.inf, v)

    v = vals(z)
    i = int(np.argmin(v))
    inf0, arg = float(v[i]), complex(z[i])
    d = 10.0 ** -np.arange(2, 8, dtype=float) * w.scale
    decay = False
    for p in _refine_points(w) + [complex(arg.real, 0.0)]:
        p = complex(p.real, -abs(p.imag))
        seq = vals(p - 1j * d)
        if _grows(1.0 / seq):
            decay = True
            arg, inf0 = complex(p - 1j * d[-1]), min(inf0, float(seq[-1]))
        elif float(seq.min()) < inf0:
            inf0, arg = float(seq.min()), complex(p - 1j * d[np.argmin(seq)])
    notes = [f"{skipped} grid points skipped"] if skipped else []
    status = "NOT-BOUNDED-AWAY" if decay or inf0 <= threshold else "BOUNDED-AWAY"
    return CriterionReport("dissipative_part_check", inf0, status, arg, notes)


def _tail_ok(f: Callable, sign: float, T: float) -> bool:
    """f(t) / (1 + t^2) must decay faster than 1/t along the infinite end."""
    ts = sign * T * np.array([1.0, 1e2, 1e4])
    g = np.array([abs(t) * f(t) / (1.0 + t * t) for t in ts])
    return bool(np.all(np.isfinite(g)) and (g[-1] <= 0.7 * g[0] or g[-1] < 1e-12))


def poisson_integral(f: Callable, x: float, y: float, support=((-np.inf, np.inf),),
                     breaks: Sequence[float] = ()) -> float:
    """Harmonic extension (y/pi) int f(t) / ((x - t)^2 + y^2) dt of a vectorized f."""
    def pk(t):
        return y / (np.pi * ((x - t) ** 2 + y * y))
    # geometric breakpoints resolve the kernel peak of width y
    peak = [x + sg * y * 4.0 ** k for sg in (-1.0, 1.0) for k in range(0, 12)]
    return _gl_pieces(lambda t: pk(t) * f(t), support, sorted(list(breaks) + [x] + peak))


def poisson_condition(w: WeylPair, xs: Optional[Sequence[float]] = None,
                      ys: Optional[Sequence[float]] = None) -> CriterionReport:
    """sup over x+iy of P_lam(w1) * Im M_ac(lam), w1 = Im M / |M+ - M-|^2, both signs."""
    w.require_herglotz()
    mp = w.measures
    scale = w.scale
    cand = candidate_points(w)
    xs = sorted(set(cand) | set(np.linspace(-2 * scale, 2 * scale, 5))) if xs is None else list(xs)
    ys = list(scale * np.logspace(1, -3, 5)) if ys is None else list(ys)
    best, wit = 0.0, None
    for side in "+-":
        dens, sup_iv = mp.density(side), mp.support(side)

        w1v = _w1_vec(w, dens)

        def w1(t, w1v=w1v):
            return float(w1v(np.array([t]))[0])

        for p in cand:
            if any(lo - 1e-12 <= p <= hi + 1e-12 for lo, hi in sup_iv):
                if not _locally_integrable(w1, p, 1e-2 * scale):
                    return CriterionReport("poisson_condition", float("inf"), "UNBOUNDED",
                                           {"side": side, "point": p},
                                           ["w1 is not locally integrable there"])
        for lo, hi in sup_iv:
            for end, sg in ((lo, -1.0), (hi, 1.0)):
                if np.isinf(end) and not _tail_ok(w1, sg, 1e3 * scale):
                    raise TailDivergence("w1 fails the 1/(1+t^2) tail envelope")
        brk = sorted(set(cand) | {e for iv in sup_iv for e in iv if np.isfinite(e)})
        trend = []
        for y in ys:
            row = 0.0
            for x in xs:
                pw = poisson_integral(w1v, x, y, sup_iv, brk)
                pm = poisson_integral(lambda t: np.pi * np.asarray(dens(t), float), x, y, sup_iv, brk)
                v = pw * pm
                if not np.isfinite(v):
                    raise QuadratureFailure(f"non-finite Poisson integral at {x}+{y}i")
                row = max(row, v)
                if v > best:
                    best, wit = v, {"side": side, "lambda": [x, y]}
            trend.append(row)
        if _grows(trend):
            return CriterionReport("poisson_condition", float("inf"), "UNBOUNDED", wit,
                                   [f"sup grows as Im lambda decreases: {np.round(trend, 4).tolist()}"])
    return CriterionReport("poisson_condition", best, "BOUNDED", wit)
