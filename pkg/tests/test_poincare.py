import cmath
import io
import math

import numpy as np
import pytest

from sectorroots.bump import RadialCutoff, build_F, build_G
from sectorroots.errors import HypothesisViolatedError
from sectorroots.lattice import SectorWindow
from sectorroots.modular import (
    IwasawaCoords,
    Mat2,
    complete_row,
    from_iwasawa,
    iwasawa,
    random_sl2z,
)
from sectorroots.poincare import (
    BOUND_SCHEMA,
    bound_report,
    bound_rhs,
    default_tau_grid,
    eval_P,
    smooth_linear_form,
    write_bound_csv,
)
from sectorroots.weyl import smooth_linear_sum

SECTOR = SectorWindow(0.1, 1.2, 0.2)


def brute_P(g, q, h, F, G):
    """Loop over bottom rows (c, d), building sigma g and its Iwasawa coordinates directly."""
    z0 = iwasawa(g).z
    lo = F.support[0]
    s_max = 4.0 * math.pi * abs(h) * z0.imag / lo * 1.01
    c_max = int(math.sqrt(s_max) / z0.imag) + 1
    total = 0j
    for c in range(-c_max, c_max + 1):
        if c % q:
            continue
        centre = -c * z0.real
        span = int(math.sqrt(s_max)) + 2
        for d in range(int(centre) - span, int(centre) + span + 1):
            if math.gcd(c, d) != 1 or abs(c * z0 + d) ** 2 > s_max:
                continue
            sg = iwasawa(complete_row(c, d) @ g)
            w = float(F(4.0 * math.pi * abs(h) * sg.y)) * float(G(sg.theta))
            if w:
                total += w * cmath.exp(2j * math.pi * h * sg.x)
    return total


def sample_points():
    rng = np.random.default_rng(3)
    pts = [random_sl2z(rng, steps=5) for _ in range(2)]
    pts.append(from_iwasawa(IwasawaCoords(0.37, 0.81, 2.2)))
    pts.append(from_iwasawa(IwasawaCoords(-0.2, 1.7, 0.4)))
    return pts


@pytest.mark.parametrize("q", [1, 2, 5])
@pytest.mark.parametrize("h", [1, -2])
def test_eval_matches_brute_force(q, h):
    F, G = build_F(abs(h), 150.0), build_G(SECTOR)
    for g in sample_points():
        got = eval_P(g, q, h, F, G).value
        want = brute_P(g, q, h, F, G)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_gamma0_invariance():
    rng = np.random.default_rng(17)
    q, h = 3, 1
    F, G = build_F(h, 200.0), build_G(SECTOR)
    g = from_iwasawa(IwasawaCoords(0.31, 0.9, 1.1))
    base = eval_P(g, q, h, F, G).value
    assert abs(base) > 1e-3
    for _ in range(20):
        gamma = random_sl2z(rng, steps=4, q=q)
        assert int(gamma.c) % q == 0
        moved = eval_P(gamma @ g, q, h, F, G).value
        assert abs(moved - base) <= 1e-9 * abs(base)


def test_integral_and_float_paths_agree():
    rng = np.random.default_rng(5)
    F, G = build_F(1, 200.0), build_G(SECTOR)
    for _ in range(5):
        g = random_sl2z(rng, steps=5)
        as_float = Mat2(*(float(v) for v in (g.a, g.b, g.c, g.d)))
        assert not as_float.is_integral()
        a, b = eval_P(g, 1, 1, F, G).value, eval_P(as_float, 1, 1, F, G).value
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_negative_h_conjugates():
    F, G = build_F(2, 300.0), build_G(SECTOR)
    g = from_iwasawa(IwasawaCoords(0.12, 0.6, 0.9))
    assert eval_P(g, 2, -2, F, G).value == pytest.approx(eval_P(g, 2, 2, F, G).value.conjugate(), abs=1e-12)


def test_evenness_under_minus_identity():
    F, G = build_F(1, 300.0), build_G(SECTOR)
    g = from_iwasawa(IwasawaCoords(0.44, 1.3, 2.0))
    a = eval_P(g, 1, 1, F, G).value
    b = eval_P(-g, 1, 1, F, G).value
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@pytest.mark.parametrize("q", [1, 2, 5, 13])
@pytest.mark.parametrize("h", [1, 3])
def test_linear_form_matches_lattice_sum(q, h):
    F, G = build_F(h, 400.0), build_G(SECTOR)
    a = smooth_linear_form(q, h, 400.0, F, G)
    b = smooth_linear_sum(q, h, 400.0, F, G)
    assert abs(a - b) <= 1e-11 * max(1.0, abs(b))


def test_no_cosets_in_support_gives_zero():
    # support far above any 4 pi y reachable from y0 <= 1
    F = RadialCutoff(Y=1e3, h=1, N=0.0)
    res = eval_P(Mat2(1, 0, 0, 1), 1, 1, F, build_G(SECTOR))
    assert res.value == 0 and res.contributing_cosets == 0


def test_input_validation():
    F, G = build_F(1, 200.0), build_G(SECTOR)
    with pytest.raises(ValueError):
        eval_P(Mat2(1, 0, 0, 1), 0, 1, F, G)
    with pytest.raises(ValueError):
        eval_P(Mat2(1, 0, 0, 1), 1, 0, F, G)


def test_bound_report_shape_and_csv():
    tau = default_tau_grid(count=4)
    rows = bound_report(tau, 1, 2, 2000.0, 0.2, 0.1)
    assert [r.tau_id for r in rows] == [0, 1, 2, 3]
    assert all(math.isfinite(r.ratio) and r.absP >= 0 for r in rows)
    text = write_bound_csv(rows)
    lines = text.splitlines()
    assert lines[0] == BOUND_SCHEMA
    assert lines[1] == "tau_id,absP,rhs,ratio"
    assert len(lines) == 6
    buf = io.StringIO()
    write_bound_csv(rows, buf)
    assert buf.getvalue() == text


def test_bound_rhs_formula():
    h, q, N, Z, delta = 3, 6, 1e4, 0.3, 0.1
    Y = 4 * math.pi * h / N
    tau_hq = 6  # 1, 2, 3, 6, 9, 18
    inner = 1 + math.sqrt(h) * math.log(Y) ** 2 * math.sqrt(Y + 1 / Y) / q * math.sqrt(3) * tau_hq
    assert bound_rhs(h, q, N, Z, delta) == pytest.approx(h * Z ** -19 * Y ** (-1 - 2 * delta) * inner, rel=1e-14)
    assert bound_rhs(h, q, N, Z / 2, delta) == pytest.approx(2 ** 19 * bound_rhs(h, q, N, Z, delta), rel=1e-12)


def test_bound_report_hypotheses():
    tau = default_tau_grid(count=1)
    with pytest.raises(HypothesisViolatedError):
        bound_report(tau, 1, 10, 1000.0, 0.2, 0.1)
    for delta in (0.0, 0.25, -0.1):
        with pytest.raises(ValueError):
            bound_report(tau, 1, 1, 1000.0, 0.2, delta)
