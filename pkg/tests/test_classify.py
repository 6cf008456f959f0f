import numpy as np
import pytest

from indefsl.bands import BandStructure
from indefsl.classify import (check_condition_iii, classify_similarity, local_order, puiseux_order,
                              strong_singularities)
from indefsl.errors import OrderUnresolved
from indefsl.weyl import WeylPair


def _points(sings):
    return sorted(s.point for s in sings)


def test_order_half_power():
    assert local_order(lambda z: np.sqrt(z - 1.0), 1.0).order == 0.5


def test_order_simple_pole():
    assert local_order(lambda z: 1.0 / (z - 2.0), 2.0).order == -1.0


def test_order_unresolved_for_quarter_power():
    with pytest.raises(OrderUnresolved):
        local_order(lambda z: (z - 1.0) ** 0.25, 1.0)


def test_const_negative_zero_of_D_beats_density():
    w = WeylPair.const(-1.0)
    d_order = local_order(w.d, 0.0).order
    im_order = local_order(lambda z: np.imag(w.m(z, "+")), 0.0).order
    assert d_order > im_order
    assert puiseux_order(w, 0.0) == d_order


def test_puiseux_matches_fit_at_edges():
    w = WeylPair.example1(0.3, 0.5)
    for e in list(w.edges) + [-e for e in w.edges]:
        direct = local_order(w.d_star, e).order
        assert puiseux_order(w, e) == direct


def test_singularity_at_origin():
    assert _points(strong_singularities(WeylPair.example1(-0.1, 0.5))) == [0.0]


def test_singularities_pair():
    s = _points(strong_singularities(WeylPair.example2(-0.75, 0.25)))
    r = np.sqrt((-0.75 + 0.25) ** 2 + 0.25 * 0.75)
    assert np.allclose(s, [-r, r], atol=1e-6)
    assert r == pytest.approx(0.66144, abs=1e-5)


def test_no_singularities_selfadjoint_row():
    assert strong_singularities(WeylPair.example1(0.3, 0.5)) == []


def test_condition_iii_examples():
    assert check_condition_iii(WeylPair.example1(0.3, 0.5)).holds
    assert not check_condition_iii(WeylPair.example1(-0.2929, 0.5)).holds
    assert check_condition_iii(WeylPair.const(1.0)).holds


def test_classify_normal_nondefinitizable():
    v = classify_similarity(WeylPair.example1(-0.75, 0.5))
    assert v.overall == "SimilarNormal"
    got = sorted(e.value.imag for e in v.spectrum.eigenvalues)
    assert np.allclose(got, [-np.sqrt(0.4375), np.sqrt(0.4375)], atol=1e-8)
    assert v.definitizable["definitizable"] is False


def test_classify_second_family_selfadjoint():
    assert classify_similarity(WeylPair.example2(-0.4, 0.25)).overall == "SimilarSelfadjoint"


def test_classify_second_family_not_similar():
    v = classify_similarity(WeylPair.example2(-0.25, 0.75))
    assert v.overall == "NotSimilar" and _points(v.singularities) == [0.0]


def test_verdict_json_fields():
    d = classify_similarity(WeylPair.const(-1.0)).to_dict()
    assert d["overall"] == "NotSimilar"
    assert {"overall", "singularities", "eigenvalues", "definitizable"} <= set(d)
    assert d["singularities"][0]["point"] == 0.0


def test_nonnegative_operators_are_selfadjoint_similar():
    rng = np.random.default_rng(11)
    for _ in range(15):
        pts = np.cumsum(rng.uniform(0.2, 1.0, 3))
        b = BandStructure([pts[0], pts[2]], [pts[1]], [rng.uniform(pts[1], pts[2])], [rng.choice([-1.0, 1.0])])
        assert classify_similarity(WeylPair.from_bands(b)).overall == "SimilarSelfadjoint"


FAMILY = ([("ex1", 0.5, x) for x in (0.3, -0.1, -0.28, -0.6, -1.1, -2.0)]
          + [("ex2", 0.25, x) for x in (0.0, -0.1, -0.4, -0.75, -1.5)]
          + [("ex2", 0.75, x) for x in (0.5, -0.25, -0.6, -1.0)])


def _pair(fam, k2, xi):
    return (WeylPair.example1 if fam == "ex1" else WeylPair.example2)(xi, k2)


@pytest.mark.parametrize("fam,k2,xi", FAMILY)
def test_routes_agree_and_window_shift_is_stable(fam, k2, xi):
    w = _pair(fam, k2, xi)
    assert check_condition_iii(w).holds == (strong_singularities(w) == [])
    a = classify_similarity(w)
    b = classify_similarity(w, m_range=(3, 8))
    assert a.overall == b.overall
    assert _points(a.singularities) == _points(b.singularities)
