import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from indefsl.errors import ModulusOutOfRange, SolveFailure, TailDivergence
from indefsl.harness import (FDOperator, TestFunction, bump_family, elliptic_K, evidence_flag, hilbert_pv,
                             jacobi_sn, model_integral_check, q1, q2, resolvent_integral, two_weight_test)
from indefsl.weyl import WeylPair

BOX = ((-1.0, 1.0),)


def _one(t):
    return 1.0


def _pv_brute(f, x, L=1000.0, n=5 * 10 ** 6):
    # trapezoid on symmetric pairs x -/+ u, with the continuous u = 0 limit as the end term
    h = L / n
    u = np.arange(1, n + 1) * h
    g = (f(x - u) - f(x + u)) / u
    g0 = (f(x - 1e-6) - f(x + 1e-6)) / 1e-6
    return (h * (0.5 * g0 + np.sum(g) - 0.5 * g[-1])) / np.pi


def test_hilbert_interval_outside():
    assert hilbert_pv(_one, 2.0, BOX) == pytest.approx(np.log(3.0) / np.pi, abs=1e-10)
    assert np.log(3.0) / np.pi == pytest.approx(0.34970, abs=1e-5)


def test_hilbert_interval_center():
    assert hilbert_pv(_one, 0.0, BOX) == pytest.approx(0.0, abs=1e-12)


def test_hilbert_lorentzian_brute_force():
    f = lambda t: 1.0 / (1.0 + t * t)  # noqa: E731
    val = hilbert_pv(f, 1.0)
    assert val == pytest.approx(_pv_brute(f, 1.0), abs=1e-6)
    assert val == pytest.approx(0.5, abs=1e-8)


def test_hilbert_tail_divergence():
    with pytest.raises(TailDivergence):
        hilbert_pv(_one, 0.5)


def test_hilbert_antisymmetry():
    f = lambda t: np.exp(-4 * (t - 0.3) ** 2) * (abs(t - 0.3) < 1.5)  # noqa: E731
    g = lambda t: (1 - t * t) ** 2 * (abs(t) < 1)  # noqa: E731
    sf, sg = ((-1.2, 1.8),), ((-1.0, 1.0),)
    x, wts = np.polynomial.legendre.leggauss(60)

    def pair(F, suppF, G, a, b):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        return 0.5 * (b - a) * sum(wi * hilbert_pv(F, ti, suppF) * G(ti) for ti, wi in zip(t, wts))

    s = pair(f, sf, g, -1.0, 1.0) + pair(g, sg, f, -1.2, 1.8)
    assert abs(s) < 1e-5


def test_two_weight_const_positive_stable():
    w = WeylPair.const(1.0)
    rep = two_weight_test(w, concentrate_at=2.0)
    assert np.all(np.isfinite(rep.ratios)) and not rep.unbounded
    assert max(rep.growth) < 1.5
    fam = two_weight_test(w)
    assert len(fam.ratios) == 30 and np.isfinite(fam.max_ratio)


def test_two_weight_const_negative_grows():
    rep = two_weight_test(WeylPair.const(-1.0), concentrate_at=0.0)
    assert rep.unbounded and min(rep.growth) >= 3.0


def test_two_weight_zero_function():
    z = TestFunction(lambda t: 0 * t, 2.0, 3.0, [2.0, 3.0])
    assert two_weight_test(WeylPair.const(1.0), [z]).max_ratio == 0.0


def test_model_integral():
    g = TestFunction(lambda t: np.exp(-0.5 * ((t - 2) / 0.2) ** 2), 0.8, 3.2, [0.8, 3.2])
    assert model_integral_check(WeylPair.const(1.0), g, eps_grid=(1, 0.1, 0.01, 0.001))["bounded"]
    b = bump_family(0.0, [0.05])[0]
    assert not model_integral_check(WeylPair.const(-1.0), b, eps_grid=(1, 0.1, 0.01, 0.001))["bounded"]
    z = TestFunction(lambda t: 0 * t, 2.0, 3.0, [2.0, 3.0])
    rows = model_integral_check(WeylPair.const(1.0), z)["rows"]
    assert all(r["lhs"] == 0.0 for r in rows)


def test_resolvent_diagonal():
    val = resolvent_integral(np.diag([1.0, 2.0, 3.0]), np.array([1.0, 0, 0]), 0.1)
    assert val == pytest.approx(np.pi, abs=1e-3)


def test_resolvent_methods_agree():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(12, 12))
    A = np.diag(np.sign(rng.normal(size=12))) @ (A + A.T)
    f = rng.normal(size=12)
    for eps in (1.0, 0.1):
        q = resolvent_integral(A, f, eps, "quadrature")
        s = resolvent_integral(A, f, eps, "spectral")
        assert q == pytest.approx(s, rel=1e-6)


def test_resolvent_rejects_nonpositive_eps():
    with pytest.raises(SolveFailure):
        resolvent_integral(np.eye(2), np.ones(2), 0.0)


def test_fd_j_selfadjoint():
    op = FDOperator(10.0, 0.1, lambda x: q1(x, -0.75, np.sqrt(0.5)))
    assert op.j_asymmetry() < 1e-12


def test_fd_eigenvalue_surrogate():
    op = FDOperator(60.0, 0.025, lambda x: q1(x, -0.75, np.sqrt(0.5)))
    z = op.eigenvalues_near(0.66j, 1)[0]
    assert abs(z - 1j * np.sqrt(0.4375)) < 5e-2


def test_fd_truncation_drift():
    q = lambda x: q1(x, -0.75, np.sqrt(0.5))  # noqa: E731
    a = FDOperator(30.0, 0.05, q).eigenvalues_near(0.66j, 1)[0]
    b = FDOperator(60.0, 0.05, q).eigenvalues_near(0.66j, 1)[0]
    assert abs(a - b) < 1e-3


def test_sn_special_values():
    for k in (0.0, 0.3, 0.9):
        assert jacobi_sn(0.0, k) == 0.0
        assert jacobi_sn(elliptic_K(k), k) == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(-3, 3, 13)
    assert np.allclose(jacobi_sn(x, 0.0), np.sin(x), atol=1e-14)


def test_sn_against_mpmath():
    rng = np.random.default_rng(9)
    for x, k in zip(rng.uniform(-5, 5, 20), rng.uniform(0, 0.99, 20)):
        want = float(mp.ellipfun("sn", x, m=k * k))
        assert jacobi_sn(x, k) == pytest.approx(want, abs=1e-12)
    assert elliptic_K(0.5) == pytest.approx(float(mp.ellipk(0.25)), abs=1e-13)


def test_potentials_at_origin():
    for k in (0.2, 0.7):
        assert q1(0.0, 0.4, k) == pytest.approx(-(1 - k * k) + 0.4)
        assert q2(0.0, 0.4, k) == pytest.approx(-2 * k * k + 1 + k * k + 0.4)


def test_modulus_range():
    with pytest.raises(ModulusOutOfRange):
        jacobi_sn(0.1, 1.0)
    with pytest.raises(ModulusOutOfRange):
        q1(0.1, 0.0, -0.1)


def test_evidence_flag():
    assert evidence_flag("SimilarSelfadjoint", True) == "CONSISTENT"
    assert evidence_flag("NotSimilar", True) == "INCONSISTENT"
    assert evidence_flag("NotSimilar", False) == "CONSISTENT"
    assert evidence_flag("Undecided", False) == "UNDECIDED"


def test_density_quadrature_reference():
    # the interval indicator integral used as calibration elsewhere
    val, _ = integrate.quad(lambda t: 1.0 / (2.0 - t), -1.0, 1.0)
    assert hilbert_pv(_one, 2.0, BOX) == pytest.approx(val / np.pi, abs=1e-12)
