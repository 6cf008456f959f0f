import numpy as np
import pytest

from indefsl.bands import BandStructure, MeasurePair
from indefsl.spectrum import (atom_multiplicity, definitizable, eigenvalues, essential_spectrum, supports,
                              winding_number, rect_path)
from indefsl.weyl import WeylPair

INF = np.inf


def _box(lo, hi):
    return lambda t: np.where((np.asarray(t) >= lo) & (np.asarray(t) <= hi), 1.0, 0.0)


def test_essential_const():
    assert essential_spectrum(WeylPair.const(1.0)) == [(-INF, -1.0), (1.0, INF)]
    assert essential_spectrum(WeylPair.const(-1.0)) == [(-INF, INF)]


def test_essential_example():
    ess = essential_spectrum(WeylPair.example1(0.0, 0.5))
    assert ess == [(-INF, -1.0), (-0.5, 0.5), (1.0, INF)]


def test_eigenvalues_example_real():
    res = eigenvalues(WeylPair.example1(0.0, 0.5))
    vals = [e.value for e in res.eigenvalues]
    assert np.allclose(vals, [-np.sqrt(0.5), np.sqrt(0.5)], atol=1e-10)
    assert all(e.alg_mult == 1 and e.geo_mult == 1 for e in res.eigenvalues)


def test_eigenvalues_example_nonreal():
    res = eigenvalues(WeylPair.example1(-1.0, 0.5))
    vals = sorted((e.value for e in res.eigenvalues), key=lambda z: z.imag)
    assert np.allclose(vals, [-1j / np.sqrt(2), 1j / np.sqrt(2)], atol=1e-10)
    assert res.winding_check["count"] == pytest.approx(1, abs=0.05)


@pytest.mark.parametrize("xi", [0.5, 0.0, -0.3, -0.75, -1.0, -1.5])
def test_second_family_quarter_has_no_eigenvalues(xi):
    assert eigenvalues(WeylPair.example2(xi, 0.25)).eigenvalues == []


def test_eigenvalue_formula_across_grid():
    for xi in np.linspace(-2.0, 1.0, 31):
        res = eigenvalues(WeylPair.example1(xi, 0.5))
        ess = essential_spectrum(WeylPair.example1(xi, 0.5))
        lam = np.sqrt(complex((xi + 1) ** 2 - 0.5))
        want = [z for z in (lam, -lam) if not (z.imag == 0 and any(a <= z.real <= b for a, b in ess))]
        got = sorted((e.value for e in res.eigenvalues), key=lambda z: (z.real, z.imag))
        want = sorted(want, key=lambda z: (z.real, z.imag))
        if abs(lam) < 1e-9:
            continue
        assert len(got) == len(want), xi
        assert np.allclose(got, want, atol=1e-8), xi


def test_no_eigenvalue_inside_essential_spectrum():
    for xi in np.linspace(-2.0, 1.0, 13):
        w = WeylPair.example1(xi, 0.5)
        res = eigenvalues(w)
        for e in res.eigenvalues:
            if e.value.imag == 0:
                assert not any(a < e.value.real < b for a, b in res.essential)


def test_winding_counts_simple_zero():
    n = winding_number(lambda z: z - 0.3j, rect_path(-1, 1, 0.1, 1))
    assert n == pytest.approx(1.0, abs=1e-6)


def test_atoms_unequal_masses():
    mp = MeasurePair(_box(1, 2), _box(-2, -1), [(0.0, 1.0)], [(0.0, 2.0)], [(1, 2)], [(-2, -1)])
    v = atom_multiplicity(mp, 0.0)
    assert v.eigenvalue and v.multiplicity == 1


def test_atoms_equal_masses_unequal_first_moments():
    mp = MeasurePair(_box(1, 2), _box(-2, -1), [(0.0, 1.0)], [(0.0, 1.0)], [(1, 2)], [(-2, -1)])
    v = atom_multiplicity(mp, 0.0)
    assert v.eigenvalue and v.multiplicity == 2


def test_identical_measures_hit_the_cap():
    mp = MeasurePair(_box(1, 2), _box(1, 2), [(0.0, 1.0)], [(0.0, 1.0)], [(1, 2)], [(1, 2)])
    v = atom_multiplicity(mp, 0.0, k_max=8)
    assert v.eigenvalue and v.capped and str(v) == "Eigenvalue(>=8)"


def test_atom_on_one_side_only():
    mp = MeasurePair(_box(1, 2), _box(-2, -1), [(0.0, 1.0)], [], [(1, 2)], [(-2, -1)])
    assert not atom_multiplicity(mp, 0.0).eigenvalue


def test_definitizable_half_lines():
    d = definitizable([(0.0, INF)], [(-INF, 0.0)])
    assert d.definitizable and d.alphas == [0.0]


def test_definitizable_example_overlap():
    w = WeylPair.example1(-0.75, 0.5)
    d = definitizable(*supports(w))
    assert not d.definitizable
    assert d.witness == pytest.approx((-0.75, -0.25))


def test_definitizable_const():
    assert definitizable(*supports(WeylPair.const(1.0))).definitizable


def _random_bands(rng, n_gaps, nonneg):
    lo = 0.0 if nonneg else rng.uniform(-3, 1)
    pts = lo + np.cumsum(rng.uniform(0.2, 1.0, 2 * n_gaps + 1)) - (0.0 if not nonneg else 0.19)
    pts[0] = max(pts[0], 0.0) if nonneg else pts[0]
    mu_r = [pts[0]] + list(pts[2::2])
    mu_l = list(pts[1::2])
    xi = [rng.uniform(a, b) for a, b in zip(mu_l, mu_r[1:])]
    signs = list(rng.choice([-1.0, 1.0], n_gaps))
    return BandStructure(mu_r, mu_l, xi, signs)


def test_symmetry_and_nonnegative_spectrum_random():
    rng = np.random.default_rng(7)
    for i in range(40):
        b = _random_bands(rng, 1 + i % 2, nonneg=(i % 2 == 0))
        w = WeylPair.from_bands(b)
        res = eigenvalues(w)
        vals = np.array([e.value for e in res.eigenvalues])
        assert np.allclose(np.sort_complex(vals), np.sort_complex(np.conj(vals)), atol=1e-8)
        if min(b.mu_r[0], 0.0) == 0.0 and b.mu_r[0] >= 0:
            assert np.all(np.abs(vals.imag) < 1e-9)
