"""Strong spectral singularities, generalized orders at band edges, and similarity verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ._branch import _pick, sqrt_branch
from .errors import OrderUnresolved
from .poly import poly_roots
from .spectrum import (SpectrumResult, definitizable, eigenvalues, essential_spectrum,
                       in_intervals, rationalized_D, supports)
from .weyl import WeylPair

__all__ = ["local_order", "puiseux_order", "strong_singularities", "check_condition_iii",
           "classify_similarity", "SingularityReport", "Verdict", "OrderResult"]

INF = float("inf")


@dataclass
class OrderResult:
    order: float
    slope: float
    residual: float

    def __float__(self):
        return self.order


def local_order(f: Callable, t0: float, direction: complex = 1j, scale: float = 1.0,
                deltas: Optional[np.ndarray] = None) -> OrderResult:
    """Half-integer exponent p with |f(t0 + d*direction)| ~ d^p, from a log-log fit.

    Zeros give p > 0 and poles p < 0. Raises ``OrderUnresolved`` when the fit
    residual exceeds 0.1 or the slope is more than 0.15 from a half-integer.
    """
    d = np.logspace(-8, -3, 12) * scale if deltas is None else np.asarray(deltas)
    direction = complex(direction) / abs(direction)
    v = np.abs(np.asarray(f(t0 + d * direction), dtype=complex))
    if np.any(~np.isfinite(v)) or np.any(v == 0):
        raise OrderUnresolved(f"non-finite or zero samples near {t0}")
    x, y = np.log(d), np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - slope * x - icpt) ** 2)))
    order = round(2.0 * slope) / 2.0
    if resid > 0.1 or abs(slope - order) > 0.15:
        raise OrderUnresolved(f"slope {slope:.3f}, residual {resid:.3f} at {t0}")
    return OrderResult(order, float(slope), resid)


def _d_puiseux(w: WeylPair, t0: float, tol: float) -> Callable:
    """s -> D(t0 + s^2) continued analytically through the branch point at t0."""
    fz = w.require_herglotz()
    edges = np.asarray(w.edges)

    def g(s):
        s = np.asarray(s, dtype=complex)
        lam = t0 + s * s
        hp = np.ones_like(lam)
        hm = -np.ones_like(lam)
        for e in edges:
            hp = hp * (s if abs(e - t0) <= tol else sqrt_branch(lam - e, -0.5 * np.pi))
            hm = hm * (-1j * s if abs(-e - t0) <= tol else sqrt_branch(-lam - e, -1.5 * np.pi))
        with np.errstate(divide="ignore", invalid="ignore"):
            qp, qm = fz.Q(lam), fz.Q(-lam)
            mp = _pick(qp + 1j * hp, fz.S_eval(lam), fz.P_eval(lam), qp - 1j * hp)
            mm = _pick(qm - 1j * hm, fz.S_eval(-lam), fz.P_eval(-lam), qm + 1j * hm)
        return mp - mm

    return g


def puiseux_order(w: WeylPair, t0: float, n: int = 128) -> float:
    """Exact generalized order of D = M+ - M- at a real point, as a multiple of 1/2.

    Samples D(t0 + s^2) on a small circle in s and reads the leading Laurent
    index k from an FFT; the order is k/2.
    """
    scale = w.scale
    tol = 1e-12 * scale
    pts = np.concatenate([w.edges, -w.edges, w.tau, -np.asarray(w.tau),
                          w.poles("+"), w.poles("-")]) if w.is_herglotz else w.edges
    dist = [abs(p - t0) for p in pts if abs(p - t0) > tol]
    # small radius keeps FFT aliasing far below the detection threshold
    rho = np.sqrt(0.02 * min(dist + [scale]))
    g = _d_puiseux(w, t0, tol)
    phi = 2.0 * np.pi * np.arange(n) / n
    vals = g(rho * np.exp(1j * phi))
    c = np.fft.fft(vals) / n
    j = np.fft.fftfreq(n, 1.0 / n).astype(int)
    mag = np.abs(c)
    keep = np.abs(j) <= n // 4
    order = np.argsort(j[keep])
    j, mag = j[keep][order], mag[keep][order]
    big = mag.max()
    if big == 0 or not np.isfinite(big):
        raise OrderUnresolved(f"degenerate samples at {t0}")
    k = int(j[np.nonzero(mag > 1e-9 * big)[0][0]])
    return k / 2.0


@dataclass
class SingularityReport:
    point: float
    kind: str
    estimated_order: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"point": "inf" if self.point == INF else float(self.point), "kind": self.kind,
                "order": self.estimated_order, "diagnostics": self.diagnostics}


def _ratio(w: WeylPair, t):
    """max over signs of Sigma'_ac(t) / |D(t)| on the real axis."""
    t = np.asarray(t, dtype=float).astype(complex)
    mp = np.asarray(w.m_star(t, "+"))
    mm = np.asarray(w.m_star(t, "-"))
    # outside the bands the density vanishes; the imaginary part there is roundoff
    ip = np.where(_inside(t.real, w.essential_bands("+")), np.abs(mp.imag), 0.0)
    im = np.where(_inside(t.real, w.essential_bands("-")), np.abs(mm.imag), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.maximum(ip, im) / (np.pi * np.abs(mp - mm))
    return r


def _inside(t: np.ndarray, bands) -> np.ndarray:
    out = np.zeros(t.shape, bool)
    for lo, hi in bands:
        out |= (t > lo) & (t < hi)
    return out


def _growth(seq: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return seq[1:] / seq[:-1]


def _unbounded(ratios: np.ndarray, factor: float = 3.0, decades: int = 3) -> bool:
    if np.any(np.isinf(ratios[-decades:])):
        return True
    g = _growth(ratios)
    tail = g[-decades:]
    return bool(np.all(np.isfinite(tail)) and np.all(tail >= factor))


def candidate_points(w: WeylPair, spec: Optional[SpectrumResult] = None) -> List[float]:
    ess = essential_spectrum(w)
    scale = w.scale
    tol = 1e-9 * scale
    pts = set()
    F = rationalized_D(w)
    if F.degree >= 1:
        for r, _ in poly_roots(F):
            if abs(r.imag) <= 1e-7 * scale and in_intervals(r.real, ess, tol):
                pts.add(float(r.real))
    if spec is not None:
        pts.update(spec.ess_zeros)
    pts.update(float(e) for e in w.edges)
    pts.update(float(-e) for e in w.edges)
    out: List[float] = []
    for p in sorted(pts):
        if not out or abs(p - out[-1]) > 1e-7 * scale:
            out.append(0.0 if abs(p) <= tol else p)
    return out


def strong_singularities(w: WeylPair, spec: Optional[SpectrumResult] = None,
                         m_range=(2, 7), factor: float = 3.0, decades: int = 3) -> List[SingularityReport]:
    """Points of the essential spectrum (and infinity) near which Sigma'/|D| is unbounded."""
    w.require_herglotz()
    scale = w.scale
    ms = np.arange(m_range[0], m_range[1] + 1)
    d = 10.0 ** (-ms.astype(float)) * scale
    out: List[SingularityReport] = []
    for t0 in candidate_points(w, spec):
        left, right = _ratio(w, t0 - d), _ratio(w, t0 + d)
        sing = _unbounded(left, factor, decades) or _unbounded(right, factor, decades)
        try:
            order = puiseux_order(w, t0)
        except OrderUnresolved:
            order = None
        diag = {"growth_left": np.round(_growth(left), 3).tolist(),
                "growth_right": np.round(_growth(right), 3).tolist()}
        if sing:
            out.append(SingularityReport(t0, "StrongSingularity", order, diag))
    far = 10.0 ** ms.astype(float) * scale
    for sgn in (1.0, -1.0):
        r = _ratio(w, sgn * far)
        if _unbounded(r, factor, decades):
            out.append(SingularityReport(INF, "StrongSingularity", None,
                                         {"growth": np.round(_growth(r), 3).tolist()}))
            break
    return out


@dataclass
class ConditionReport:
    holds: bool
    entries: List[dict] = field(default_factory=list)
    undecided: bool = False


def check_condition_iii(w: WeylPair, spec: Optional[SpectrumResult] = None) -> ConditionReport:
    """Order conditions on D at band edges and the absence of zeros inside the bands.

    * no generalized zero of D in the open bands of L or -L;
    * at band edges outside {+tau, -tau}: order of zero at most 1/2;
    * at band edges in {+tau, -tau}: a generalized pole of order at least 1/2.
    """
    w.require_herglotz()
    scale = w.scale
    tol = 1e-9 * scale
    bands_p, bands_m = w.essential_bands("+"), w.essential_bands("-")
    edge_set = sorted(set([float(e) for e in w.edges] + [float(-e) for e in w.edges]))
    tau_set = list(w.tau) + [-t for t in w.tau]
    rep = ConditionReport(True)
    for t0 in candidate_points(w, spec):
        is_edge = any(abs(t0 - e) <= tol for e in edge_set)
        interior = in_intervals(t0, bands_p, tol, open_=True) or in_intervals(t0, bands_m, tol, open_=True)
        if not is_edge and not interior:
            continue
        try:
            order = puiseux_order(w, t0)
        except OrderUnresolved as exc:
            rep.undecided = True
            rep.entries.append({"point": t0, "status": "UNDECIDED", "reason": str(exc)})
            continue
        entry = {"point": t0, "order": order}
        ok = True
        if interior and order > 0:
            ok, entry["clause"] = False, "zero inside a band"
        if is_edge:
            if any(abs(t0 - t) <= tol for t in tau_set):
                if order > -0.5:
                    ok, entry["clause"] = False, "edge in tau without a pole of order >= 1/2"
            elif order > 0.5:
                ok, entry["clause"] = False, "edge zero of order > 1/2"
        entry["status"] = "OK" if ok else "FAIL"
        rep.entries.append(entry)
        rep.holds &= ok
    return rep


@dataclass
class Verdict:
    overall: str
    ess_similar_selfadjoint: Optional[bool]
    all_eigenvalues_simple: bool
    singularities: List[SingularityReport]
    spectrum: SpectrumResult
    definitizable: Optional[dict] = None
    boundary: bool = False
    boundary_reasons: List[str] = field(default_factory=list)
    condition_iii: Optional[ConditionReport] = None

    @property
    def short(self) -> str:
        return {"SimilarSelfadjoint": "S-A", "SimilarNormal": "Norm", "NotSimilar": "NonSim"}.get(
            self.overall, self.overall)

    def to_dict(self):
        return {"overall": self.overall,
                "ess_similar_selfadjoint": self.ess_similar_selfadjoint,
                "all_eigenvalues_simple": self.all_eigenvalues_simple,
                "singularities": [s.to_dict() for s in self.singularities],
                "eigenvalues": [e.to_dict() for e in self.spectrum.eigenvalues],
                "essential": self.spectrum.to_dict()["essential"],
                "definitizable": None if self.definitizable is None else self.definitizable["definitizable"],
                "definitizability": self.definitizable,
                "boundary": self.boundary,
                "boundary_reasons": self.boundary_reasons,
                "condition_iii": None if self.condition_iii is None else {
                    "holds": self.condition_iii.holds, "entries": self.condition_iii.entries}}


def _boundary_flags(w: WeylPair, spec: SpectrumResult, sings: List[SingularityReport],
                    btol: float) -> List[str]:
    """Reasons why a small parameter change could move the verdict to a neighbouring row."""
    scale = w.scale
    edge_set = np.array(sorted(set([float(e) for e in w.edges] + [float(-e) for e in w.edges])))
    out = []
    for e in spec.eigenvalues:
        z = e.value
        if 0 < abs(z.imag) < btol * scale:
            out.append(f"eigenvalue {z:.6g} within {btol:g} of the real axis")
        dist = np.min(np.abs(edge_set - z))
        if dist < btol * scale:
            out.append(f"eigenvalue {z:.6g} within {btol:g} of a band edge")
    for s in sings:
        if s.point == INF:
            continue
        dist = np.abs(edge_set - s.point)
        near = dist[(dist > 1e-9 * scale) & (dist < btol * scale)]
        if near.size:
            out.append(f"singularity {s.point:.6g} within {btol:g} of a band edge")
    for t in spec.ess_zeros:
        dist = np.abs(edge_set - t)
        if np.any((dist > 1e-9 * scale) & (dist < btol * scale)):
            out.append(f"real zero {t:.6g} within {btol:g} of a band edge")
    return sorted(set(out))


def classify_similarity(w: WeylPair, boundary_tol: float = 1e-2, with_definitizability: bool = True,
                        m_range=(2, 7), decades: int = 3) -> Verdict:
    """Similarity verdict: to a selfadjoint operator, to a normal one, or neither."""
    spec = eigenvalues(w)
    sings = strong_singularities(w, spec, m_range=m_range, decades=decades)
    cond = check_condition_iii(w, spec)
    simple = all(e.alg_mult == 1 for e in spec.eigenvalues)
    route_a = len(sings) == 0
    if cond.undecided or cond.holds != route_a:
        overall, ess_ok = "Undecided", None
    else:
        ess_ok = route_a
        if not ess_ok or not simple:
            overall = "NotSimilar"
        elif all(e.value.imag == 0 for e in spec.eigenvalues):
            overall = "SimilarSelfadjoint"
        else:
            overall = "SimilarNormal"
    defin = None
    if with_definitizability:
        sp, sm = supports(w)
        defin = definitizable(sp, sm).to_dict()
    reasons = _boundary_flags(w, spec, sings, boundary_tol)
    return Verdict(overall, ess_ok, simple, sings, spec, defin, bool(reasons), reasons, cond)
