import math

import mpmath as mp
import numpy as np
import pytest

from sectorroots.errors import PoleError
from sectorroots.modular import dilation, rotation, translation
from sectorroots.selberg import (
    H_n,
    LorentzianSum,
    SpectralTestFunction,
    Q_of,
    bound_window,
    build_phi_table,
    calibrate_C,
    default_roots,
    forward_transform,
    fourier_invert,
    hejhal_x,
    lorentzian_family,
    phi_of,
    point_pair_k,
    point_pair_kn,
    positivity_certificate,
    positivity_pairs,
    puiseux_exact,
    puiseux_fit,
    puiseux_halfinteger_coeffs,
    q_recovery,
    rho,
    rho_X,
    single_term_coefficient,
    solve_quartic_power_sums,
)
from sectorroots.modular import iwasawa

# independent high-precision solution of the power-sum system (mpmath.findroot)
ROOTS_ORACLE = (0.47973211728267934841, 6.8717466811105599699, 16.48217180600955685, 24.916349395597203832)


def single(f):
    return LorentzianSum((1.0,), (f,))


def test_quartic_against_findroot_oracle():
    with mp.workdps(40):
        targets = [sum(j ** (2 * k) for j in range(1, 6)) - mp.mpf("6.25") ** k for k in range(1, 5)]
        sol = mp.findroot(lambda *u: [sum(v ** k for v in u) - targets[k - 1] for k in range(1, 5)],
                          (0.5, 6.9, 16.5, 24.9))
        oracle = sorted(float(v) for v in sol)
    roots = solve_quartic_power_sums()
    assert list(roots.squares()) == pytest.approx(oracle, rel=1e-14)
    assert list(roots.squares()) == pytest.approx(ROOTS_ORACLE, rel=1e-14)
    assert np.all(np.abs(roots.residuals()) <= 1e-12)
    assert list(roots.squares()) == sorted(roots.squares())


def test_quartic_displayed_values_b_c_d():
    r = solve_quartic_power_sums()
    assert round(r.b2, 4) == pytest.approx(6.8717, abs=1e-12) and abs(r.b2 - 6.87175) < 5e-5
    assert abs(r.c2 - 16.4822) < 5e-5
    assert abs(r.d2 - 24.9163) < 5e-5


def test_power_sums_of_scales():
    r = default_roots()
    u = list(r.squares()) + [6.25]
    for k, target in zip(range(1, 5), (55, 979, 20515, 462979)):
        assert sum(v ** k for v in u) == pytest.approx(target, rel=1e-13)


def test_rho_X_at_zero():
    r = default_roots()
    X = 100.0
    expected = (sum(1 / v for v in r.squares()) + 1 / 6.25 - sum(1 / j ** 2 for j in range(1, 6))) / X ** 2
    assert rho_X(0.0, X) == pytest.approx(expected, rel=1e-13)
    assert expected > 0


def test_rho_X_decay_and_far_field():
    assert abs(rho_X(1e6, 100.0)) <= 1e-10
    fam = lorentzian_family(100.0)
    # the far-field series agrees with the direct sum where both are accurate
    t = 2100.0
    with mp.workdps(50):
        exact = sum(mp.mpf(s) / (mp.mpf(t) ** 2 + mp.mpf(f) ** 2) for s, f in zip(fam.signs, fam.f))
    direct_roots = [mp.sqrt(v) * 100 for v in default_roots().exact] + [250]
    with mp.workdps(50):
        exact = sum(1 / (mp.mpf(t) ** 2 + f ** 2) for f in direct_roots) - sum(
            1 / (mp.mpf(t) ** 2 + (100 * j) ** 2) for j in range(1, 6))
    assert fam(t) == pytest.approx(float(exact), rel=1e-6)


def test_rho_X_positive_on_imaginary_segment():
    for tp in np.linspace(0, 0.499, 50):
        value = rho_X(1j * tp, 100.0)
        assert value.real > 0 and abs(value.imag) <= 1e-20


def test_rho_X_pole():
    a = math.sqrt(default_roots().a2)
    with pytest.raises(PoleError):
        rho_X(1j * a * 100.0, 100.0)


def test_rho_rules():
    assert rho(3.0, 1) == 0
    assert rho(2.0, 0) == rho_X(2.0, 100.0)
    ratio = rho(5.0, 2) / rho(5.0, 4)
    expected = (4 ** 10 + 1) / (2 ** 10 + 1) * rho_X(5.0, 400.0) / rho_X(5.0, 600.0)
    assert ratio == pytest.approx(expected, rel=1e-13)


def test_rho_positive_on_grid():
    spectral = SpectralTestFunction()
    t = np.concatenate([np.linspace(0, 60, 121), np.geomspace(60, 1e7, 40)])
    for n in range(0, 52, 2):
        assert np.all(spectral(t, n) > 0)
        assert np.all(np.real(spectral(1j * np.linspace(0, 0.499, 20), n)) > 0)


def test_bound_window_finite():
    A, B = bound_window()
    assert math.isfinite(A) and math.isfinite(B) and A > 0 and B > 0


def test_fourier_invert_single_lorentzian():
    assert fourier_invert(single(1.0), 0.0) == pytest.approx(math.pi)
    assert fourier_invert(single(3.0), 0.7) == pytest.approx(math.pi / 3 * math.exp(-2.1))


def test_fourier_invert_closed_form_vs_quadrature():
    fam = lorentzian_family(100.0)
    closed = fourier_invert(fam, 0.01)
    numeric = fourier_invert(lambda t: fam(t), 0.01)
    assert numeric == pytest.approx(closed, rel=1e-9)


def test_Q_single_lorentzian():
    f, x = 2.3, 0.37
    fam = single(f)
    expected = math.pi / f * (1 + x / 2 + math.sqrt(x) * math.sqrt(x + 4) / 2) ** (-f)
    assert fam.Q(x) == pytest.approx(expected, rel=1e-14)
    assert Q_of(fam.g, x) == pytest.approx(expected, rel=1e-14)
    assert fam.Q(0.0) == pytest.approx(math.pi / f)
    with pytest.raises(ValueError):
        Q_of(fam.g, -1.0)


@pytest.mark.parametrize("f", [0.5, 1.0, 3.7])
def test_single_term_puiseux(f):
    assert single_term_coefficient(f, 0.0) == pytest.approx(1 / f)
    assert single_term_coefficient(f, 0.5) == pytest.approx(-1.0)
    assert single_term_coefficient(f, 1.0) == pytest.approx(f / 2)
    assert single_term_coefficient(f, 1.5) == pytest.approx((1 - 4 * f * f) / 24)


def test_puiseux_fit_matches_exact_series():
    fit, exact = puiseux_fit(), puiseux_exact()
    for order in (0.0, 1.0, 2.0, 3.0):
        assert fit[order] == pytest.approx(exact[order], rel=1e-10)


def test_puiseux_half_integer_cancellation():
    report = puiseux_halfinteger_coeffs()
    assert report.max_relative <= 1e-6
    # the first surviving half-integer order is 11/2
    assert abs(puiseux_exact()[5.5]) > 1e-4


def test_Q_prime_matches_derivative():
    fam = lorentzian_family(1.0)
    for x in (1e-6, 0.01, 0.5, 3.0):
        with mp.workdps(30):
            d = mp.diff(lambda v: sum(s * mp.pi / f * mp.e ** (-f * 2 * mp.asinh(mp.sqrt(v) / 2))
                                      for s, f in zip(fam.signs, fam.f)), x)
        assert float(fam.Q_prime(x)[0]) == pytest.approx(float(d), rel=1e-8)


def mp_phi(fam, n, x):
    """Defining integral over the whole line with the original power-of-ratio factor."""
    with mp.workdps(30):
        def qp(v):
            A = 2 * mp.asinh(mp.sqrt(v) / 2)
            return -mp.pi * sum(s * mp.e ** (-f * A) for s, f in zip(fam.signs, fam.f)) / mp.sqrt(v * (v + 4))

        def integrand(r):
            root = mp.sqrt(x + 4 + r * r)
            # (root - r)/(root + r) written without cancellation on either side
            ratio = (root - r) ** 2 / (x + 4) if r < 0 else (x + 4) / (root + r) ** 2
            return qp(x + r * r) * ratio ** (mp.mpf(n) / 2)

        return float(-mp.quad(integrand, [-mp.inf, -1, 0, 1, mp.inf]) / mp.pi)


@pytest.mark.parametrize("n,x", [(0, 0.3), (2, 0.05), (4, 1.0), (6, 2.5)])
def test_phi_against_mpmath(n, x):
    fam = lorentzian_family(10.0)
    assert phi_of(fam, n, x) == pytest.approx(mp_phi(fam, n, x), rel=1e-8)


def test_phi_divergent_scale_rejected():
    from sectorroots.errors import QuadratureError

    with pytest.raises(QuadratureError):
        lorentzian_family(1.0).phi(4, 0.5)


def test_phi_decay():
    for n, X in ((0, 100.0), (2, 400.0), (4, 600.0)):
        fam = lorentzian_family(X)
        assert abs(fam.phi(n, 1e6 / X ** 2)) <= 1e-8 * abs(fam.phi(n, 0.0))


@pytest.mark.parametrize("n,X", [(0, 100.0), (2, 400.0), (6, 10.0)])
def test_q_recovery(n, X):
    fam = lorentzian_family(X)
    assert q_recovery(fam, n) == pytest.approx(float(fam.Q(0.0)), rel=1e-6)


def test_table_decay_invariant_and_csv():
    table = build_phi_table(lorentzian_family(100.0), 2, 256)
    v = np.abs(table.values)
    sign_changes = np.flatnonzero(np.diff(np.sign(table.values)) != 0)
    start = sign_changes[-1] + 1 if sign_changes.size else 0
    assert np.all(np.diff(v[start:]) <= 0)
    lines = table.to_csv().splitlines()
    assert lines[:2] == ["# schema: sectorroots.phi_table/1", "n,u,phi"]
    assert table(0.0) == pytest.approx(table.values[0])


def test_forward_linearity_and_round_trip():
    fam = lorentzian_family(100.0)
    table = build_phi_table(fam, 0, 512)
    a = forward_transform(table, 0, 0.0)
    b = forward_transform(table.scaled(2.0), 0, 0.0)
    assert b == pytest.approx(2 * a, rel=1e-12)
    assert a.real / fam(0.0) == pytest.approx(1.0, abs=1e-3)
    table2 = build_phi_table(lorentzian_family(400.0), 2, 512)
    assert forward_transform(table2, 2, 1.0).real == pytest.approx(rho_X(1.0, 400.0), rel=1e-3)


def random_frame(rng):
    return translation(rng.uniform(-2, 2)) @ dilation(math.exp(rng.uniform(-1, 1))) @ rotation(rng.uniform(0, 6.3))


def test_kernel_invariance():
    rng = np.random.default_rng(11)
    fam = lorentzian_family(10.0)
    for n in (2, 4):
        phi = lambda x, n=n: fam.phi(n, x)
        for _ in range(50):
            g, h, s = random_frame(rng), random_frame(rng), random_frame(rng)
            assert point_pair_kn(s @ g, s @ h, n, phi) == pytest.approx(point_pair_kn(g, h, n, phi), abs=1e-10)


def test_H_unit_modulus():
    rng = np.random.default_rng(3)
    for _ in range(100):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        w = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        assert abs(H_n(z, w, int(rng.integers(-20, 21)))) == pytest.approx(1.0)


def test_coincident_points():
    g = random_frame(np.random.default_rng(4))
    assert hejhal_x(iwasawa(g).z, iwasawa(g).z) == 0
    k = point_pair_k(g, g, 10)
    assert k.k0 == pytest.approx(lorentzian_family(100.0).phi(0, 0.0))
    assert k.tail > 0 and k.margin > 0


def test_kernel_sum_is_real():
    pairs = positivity_pairs(12, seed=5)
    for g, h in pairs:
        k = point_pair_k(g, h, 20)
        assert abs(k.imag_sum) <= 1e-10 * abs(k.real_sum)


def test_calibration_and_certificate():
    pairs = positivity_pairs(12, seed=9)
    report = calibrate_C(pairs, 10)
    assert 0 < report.C <= 1
    assert report.min_margin > 0
    zero = positivity_certificate(pairs, 0.0, 10)
    assert np.all(zero.margin == zero.k0) and zero.min_margin > 0
