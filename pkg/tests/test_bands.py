import numpy as np
import pytest
import sympy as sp
from scipy import integrate

from indefsl.bands import (BandStructure, build_PR, discrete_masses, finite_zone, measure_pair, solve_QS,
                           spectral_density)
from indefsl.errors import InvalidBands, NotHerglotz
from indefsl.poly import RealPoly
from indefsl.weyl import WeylPair

N1 = BandStructure([0.0, 1.0], [0.5], [0.75], [1.0])
lam = sp.Symbol("lam")


def test_build_PR_one_gap():
    P, R = build_PR(N1)
    assert np.allclose(P.coeffs, [-0.75, 1.0])
    assert np.allclose(R.coeffs, RealPoly.from_roots([0.0, 0.5, 1.0]).coeffs)


def test_build_PR_no_gap():
    P, R = build_PR(BandStructure([0.3]))
    assert P.degree == 0 and P(5.0) == 1.0
    assert np.allclose(R.coeffs, [-0.3, 1.0])


def test_build_PR_two_gaps_degrees():
    b = BandStructure([0.0, 1.0, 3.0], [0.5, 2.0], [0.75, 2.5], [1.0, 1.0])
    P, R = build_PR(b)
    assert (P.degree, R.degree) == (2, 5)


def test_interlacing_enforced():
    with pytest.raises(InvalidBands):
        BandStructure([0.0, 1.0], [1.5], [1.2], [1.0])
    with pytest.raises(InvalidBands):
        BandStructure([0.0, 1.0], [0.5], [0.2], [1.0])


def test_solve_QS_one_gap_against_symbolic_division():
    P, R = build_PR(N1)
    Q, S = solve_QS(P, R, [1.0])
    q0 = sp.sqrt(sp.Rational(3, 64))  # -R(3/4) = 3/64
    assert Q.degree == 0 and Q(0.0) == pytest.approx(float(q0), abs=1e-14)
    assert float(q0) == pytest.approx(0.21651, abs=1e-5)
    Rs = lam * (lam - sp.Rational(1, 2)) * (lam - 1)
    Ssym, rem = sp.div(sp.expand(Rs + q0 ** 2), lam - sp.Rational(3, 4), lam)
    assert rem == 0
    want = [float(c) for c in reversed(sp.Poly(Ssym, lam).all_coeffs())]
    assert np.allclose(S.coeffs, want, atol=1e-14)
    assert S.degree == 2 and S.lead == 1.0
    x = np.random.default_rng(0).uniform(-3, 3, 20)
    assert np.max(np.abs(P(x) * S(x) - Q(x) ** 2 - R(x))) < 1e-12


def test_solve_QS_gapless():
    P, R = build_PR(BandStructure([-0.4]))
    Q, S = solve_QS(P, R, [])
    assert Q.is_zero
    assert np.allclose(S.coeffs, [0.4, 1.0])


def test_solve_QS_edge_divisor():
    P, R = build_PR(BandStructure([0.0, 1.0], [0.5], [0.5], [1.0]))
    Q, S = solve_QS(P, R, [1.0])
    assert Q.is_zero
    q, r = R.divmod(P)
    assert np.allclose(S.coeffs, q.coeffs) and r.norm_inf() < 1e-14


def test_sign_flip_gives_other_valid_Q():
    a = finite_zone(N1)
    b = finite_zone(BandStructure([0.0, 1.0], [0.5], [0.75], [-1.0]))
    assert a.Q(0.0) == pytest.approx(-b.Q(0.0))
    assert a.identity_residual() < 1e-10 and b.identity_residual() < 1e-10


def test_non_unit_sign_rejected():
    with pytest.raises(NotHerglotz):
        finite_zone(BandStructure([0.0, 1.0], [0.5], [0.75], [0.5]))


def test_tau_placement():
    d = finite_zone(N1)
    assert d.tau[0] <= 0.0 and 0.5 <= d.tau[1] <= 1.0


def test_density_constant_potential():
    d = finite_zone(BandStructure([0.0]))
    t = np.array([0.1, 1.0, 7.0])
    assert np.allclose(spectral_density(d, "+", t), 1.0 / (np.pi * np.sqrt(t)), rtol=1e-14)
    assert spectral_density(d, "+", -2.0) == 0.0


def test_density_one_gap_matches_weyl_boundary():
    d = finite_zone(N1)
    val = spectral_density(d, "+", 0.25)
    assert val == pytest.approx(np.sqrt(0.25 * 0.25 * 0.75) / abs(d.S(0.25)) / np.pi, rel=1e-14)
    w = WeylPair.from_bands(N1)
    assert val == pytest.approx(w.m(0.25 + 1e-8j, "+").imag / np.pi, rel=1e-6)
    assert spectral_density(d, "+", 0.7) == 0.0


def test_density_reflection_and_positivity():
    d = finite_zone(BandStructure([0.0, 1.0, 3.0], [0.5, 2.0], [0.75, 2.5], [1.0, -1.0]))
    t = np.linspace(-6, 6, 2001)
    dp, dm = spectral_density(d, "+", t), spectral_density(d, "-", -t)
    assert np.all(dp >= 0) and np.array_equal(dp, dm)
    val, _ = integrate.quad(lambda s: spectral_density(d, "+", s), 0.0, 0.5)
    assert np.isfinite(val) and val > 0


def test_masses_gapless_empty():
    d = finite_zone(BandStructure([1.0]))
    assert discrete_masses(d, "+") == [] and discrete_masses(d, "-") == []


def test_mass_matches_contour_integral():
    b = BandStructure([0.0, 1.0], [0.5], [0.75], [-1.0])
    d = finite_zone(b)
    atoms = discrete_masses(d, "+")
    gap_atoms = [(th, m) for th, m in atoms if 0.5 < th < 1.0]
    assert len(gap_atoms) == 1
    th, m = gap_atoms[0]
    w = WeylPair.from_bands(b)
    r = 0.05
    phi = 2 * np.pi * np.arange(512) / 512
    z = th + r * np.exp(1j * phi)
    res = np.mean(w.m_star(z, "+") * r * np.exp(1j * phi))
    assert m == pytest.approx(-res.real, rel=1e-10)
    assert abs(res.imag) < 1e-10


def test_edge_tau_has_no_mass():
    d = finite_zone(BandStructure([0.0, 1.0], [0.5], [1.0], [1.0]))
    assert all(np.min(np.abs(d.edges - t)) < 1e-12 for t in d.tau)
    assert discrete_masses(d, "+") == [] and discrete_masses(d, "-") == []


def test_measure_pair_supports():
    mp = measure_pair(finite_zone(N1))
    assert mp.support("+") == [(0.0, 0.5), (1.0, np.inf)]
    assert mp.support("-") == [(-np.inf, -1.0), (-0.5, 0.0)]


def test_json_roundtrip():
    assert BandStructure.from_json(N1.to_json()) == N1
