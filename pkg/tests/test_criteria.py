import numpy as np
import pytest

from indefsl.criteria import (J, a2_check, char_function, dissipative_part_check, muckenhoupt_pair_scan,
                              necessary_ratio, poisson_condition, poisson_integral, sufficient_sum_ratio)
from indefsl.errors import DegenerateD
from indefsl.weyl import WeylPair

EX = WeylPair.example1(0.3, 0.5)
PAIRS = [WeylPair.const(0.0), WeylPair.const(1.0), EX]


def _upper(n, seed):
    rng = np.random.default_rng(seed)
    return rng.uniform(-3, 3, n) + 1j * 10 ** rng.uniform(-2, 1, n)


def test_necessary_ratio():
    r = necessary_ratio(WeylPair.const(1.0))
    assert r.status == "BOUNDED" and np.isfinite(r.value)
    # on t > 1 the ratio is 1 / sqrt(1 + (t - 1)/(t + 1)); its sup 1 is approached at the edge
    t = np.linspace(1 + 1e-9, 50, 2001)
    assert r.value == pytest.approx(np.max(1 / np.sqrt(1 + (t - 1) / (t + 1))), abs=1e-6)
    r = necessary_ratio(WeylPair.const(-1.0))
    assert r.status == "UNBOUNDED" and r.witness == 0.0
    assert necessary_ratio(EX).status == "BOUNDED"


def test_sufficient_ratio():
    assert sufficient_sum_ratio(WeylPair.const(1.0)).status == "SUFFICIENT-HOLDS"
    r = sufficient_sum_ratio(EX)
    lam = np.sqrt(1.3 ** 2 - 0.5)
    assert r.status == "UNBOUNDED" and abs(abs(r.witness.real) - lam) < 1e-6
    assert any("sufficient" in n for n in r.notes)


def test_sufficient_ratio_const_zero_closed_form():
    # for lam in C+: M+ = i/sqrt(lam), M- = -1/sqrt(lam), so the ratio is |i - 1| / |i + 1| = 1
    r = sufficient_sum_ratio(WeylPair.const(0.0))
    assert r.status == "SUFFICIENT-HOLDS"
    assert r.value == pytest.approx(1.0, abs=1e-9)


def test_a2_half_power_shortcut():
    r = a2_check(lambda t: abs(t) ** 0.5, exponents={"alpha_inf": 0.5, "local": [(0.0, 0.5)]})
    assert r.status == "A2-PASS" and r.method == "exponent"


def test_a2_half_power_scan():
    assert a2_check(lambda t: abs(t) ** 0.5, m_range=(-8, 8)).status == "A2-PASS"


def test_a2_linear_weight_fails():
    r = a2_check(lambda t: abs(t))
    assert r.status == "A2-FAIL" and r.reason == "NonIntegrable"
    assert r.witness[0] < 0.0 < r.witness[1]


def test_a2_constant_weight():
    r = a2_check(lambda t: 1.0, m_range=(-4, 4))
    assert r.status == "A2-PASS" and r.bound == pytest.approx(1.0, abs=1e-12)


def test_muckenhoupt_scan():
    assert muckenhoupt_pair_scan(WeylPair.const(1.0)).status == "FINITE"
    assert muckenhoupt_pair_scan(WeylPair.const(-1.0)).status == "DIVERGENT"
    assert muckenhoupt_pair_scan(EX).status == "FINITE"


def test_char_function_const_zero_at_i():
    cf = char_function(WeylPair.const(0.0), 1j)
    sq = np.exp(0.25j * np.pi)  # sqrt(i)
    sq_minus = 1j * sq          # sqrt(-i) on the sheet where sqrt(-lam) = i sqrt(lam)
    want = np.array([[-1j, (1j - 1) / sq_minus], [(1j - 1) * sq, -1j]])
    assert np.allclose(cf.theta, want, atol=1e-14)
    assert cf.det == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("w", PAIRS)
def test_determinant_one(w):
    for lam in _upper(100, 1):
        assert char_function(w, lam).det == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("w", PAIRS)
def test_j_properties(w):
    for lam in _upper(100, 2):
        assert np.linalg.eigvalsh(char_function(w, lam).omega).min() >= -1e-9
        assert np.linalg.eigvalsh(char_function(w, np.conj(lam)).omega).max() <= 1e-9


def test_omega_entry_identity():
    for lam in _upper(20, 3):
        cf = char_function(EX, lam)
        m = J - cf.omega  # theta J theta^*
        mp, mm = EX.m(lam, "+"), EX.m(lam, "-")
        want = 1 + 8 * mp.imag * mm.imag / abs(mp - mm) ** 2
        assert (m[1, 0] - m[0, 1]) / 2j == pytest.approx(want, rel=1e-10)


def test_char_function_condition_values():
    lam = 0.4 + 0.9j
    cf = char_function(EX, lam)
    mp, mm = EX.m(lam, "+"), EX.m(lam, "-")
    d2 = abs(mp - mm) ** 2
    assert cf.conds["im_product_ratio"] == pytest.approx(mp.imag * mm.imag / d2)
    assert cf.conds["entry_bound"] >= 1.0 / abs(mp - mm)


def test_degenerate_D():
    w = WeylPair.example1(-1.0, 0.5)
    with pytest.raises(DegenerateD):
        char_function(w, 1j / np.sqrt(2))


def test_dissipative_part():
    assert dissipative_part_check(WeylPair.const(1.0)).status == "BOUNDED-AWAY"
    assert dissipative_part_check(WeylPair.const(-1.0)).status == "NOT-BOUNDED-AWAY"


def test_dissipative_pointwise_positive():
    w = WeylPair.const(0.5)
    z = np.conj(_upper(200, 4))
    phi = 2.0 / (1.0 / w.m(z, "-") - w.m(z, "+"))
    assert np.all(np.abs(1 - 1j * phi) > 0)


def test_poisson_kernel_normalization():
    for x, y in [(0.0, 1.0), (3.0, 1e-3), (-2.0, 50.0)]:
        assert poisson_integral(lambda t: np.ones_like(t), x, y) == pytest.approx(1.0, abs=1e-6)


def test_poisson_condition():
    assert poisson_condition(WeylPair.const(1.0)).status == "BOUNDED"
    assert poisson_condition(WeylPair.const(-1.0)).status == "UNBOUNDED"


def test_implication_chain_on_examples():
    from indefsl.classify import classify_similarity
    for w in (WeylPair.const(1.0), WeylPair.const(-1.0), EX, WeylPair.example1(-0.1, 0.5)):
        v = classify_similarity(w).overall
        if sufficient_sum_ratio(w).status == "SUFFICIENT-HOLDS":
            assert v == "SimilarSelfadjoint"
        if necessary_ratio(w).status == "UNBOUNDED":
            assert v == "NotSimilar"
