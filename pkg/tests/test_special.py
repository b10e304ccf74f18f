import cmath
import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville.errors import LiouvilleError, PoleError
from liouville.special import (
    ConformalWeight,
    LiouvilleParams,
    conformal_weight,
    dozz,
    dozz_log_prefactor,
    ell,
    log_gamma,
    log_upsilon,
    upsilon,
    upsilon_is_zero,
    upsilon_prime_zero,
)

GAMMAS = [0.6, 1.0, 1.4]


def mp_upsilon(z, gamma, dps=40):
    """Direct quadrature of the integral representation in the strip."""
    with mp.workdps(dps):
        Q = mp.mpf(2) / gamma + mp.mpf(gamma) / 2
        a = Q / 2 - mp.mpc(z)

        def f(t):
            return (a**2 * mp.exp(-t) - mp.sinh(a * t / 2) ** 2 / (mp.sinh(t * gamma / 4) * mp.sinh(t / gamma))) / t

        return complex(mp.exp(mp.quad(f, [0, 1, 10, mp.inf])))


def test_params_derived_quantities():
    p = LiouvilleParams(1.0)
    assert p.Q == 2.5
    assert p.cL == 1 + 6 * 6.25
    assert p.delta(1.0) == pytest.approx(0.5 * (2.5 - 0.5))


@pytest.mark.parametrize("gamma", [0.0, 2.0, -1.0, 3.0])
def test_params_reject_gamma_outside_range(gamma):
    with pytest.raises(LiouvilleError):
        LiouvilleParams(gamma)


def test_params_reject_nonpositive_mu():
    with pytest.raises(LiouvilleError):
        LiouvilleParams(1.0, 0.0)


def test_spectral_weight_is_real():
    p = LiouvilleParams(0.8)
    w = ConformalWeight.spectral(1.3, p)
    assert w.delta.imag == 0
    assert w.delta.real == pytest.approx(conformal_weight(complex(p.Q, 1.3), p.Q).real)


@pytest.mark.parametrize("z", [0.3, 2.7 + 0.4j, -1.5 + 2j, 11.2 - 3j])
def test_log_gamma_matches_mpmath(z):
    assert log_gamma(z) == pytest.approx(complex(mp.loggamma(z)), rel=1e-13)


@pytest.mark.parametrize("z", [0, -1, -7])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError) as info:
        log_gamma(z)
    assert info.value.location == z


@pytest.mark.parametrize("z", [0.3, -2.5, 3.7 + 1.1j, 0.5j])
def test_ell_matches_mpmath(z):
    ref = complex(mp.gamma(z) / mp.gamma(1 - mp.mpc(z)))
    assert ell(z) == pytest.approx(ref, rel=1e-12)


def test_ell_zeros_and_poles():
    assert ell(1) == 0
    assert ell(4) == 0
    with pytest.raises(PoleError):
        ell(-2)


@pytest.mark.parametrize("gamma", GAMMAS)
@pytest.mark.parametrize("z", [0.4, 1.0 + 0.5j, 0.2 - 1.5j])
def test_upsilon_matches_integral_oracle(gamma, z):
    p = LiouvilleParams(gamma)
    if not 0 < z.real < p.Q if isinstance(z, complex) else not 0 < z < p.Q:
        pytest.skip("outside strip")
    assert upsilon(z, p) == pytest.approx(mp_upsilon(z, gamma), rel=1e-10)


def test_upsilon_oracle_large_imaginary_part():
    p = LiouvilleParams(1.0)
    z = 0.5 + 8j
    assert upsilon(z, p) == pytest.approx(mp_upsilon(z, 1.0, dps=50), rel=1e-8)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_upsilon_half_q_is_one(gamma):
    p = LiouvilleParams(gamma)
    assert abs(upsilon(p.Q / 2, p) - 1) < 1e-12


@pytest.mark.parametrize("gamma", GAMMAS)
def test_upsilon_reflection(gamma):
    p = LiouvilleParams(gamma)
    for z in [0.3, -1.2 + 0.7j, 4.1 - 2j, 0.05 + 3j]:
        assert upsilon(z, p) == pytest.approx(upsilon(p.Q - z, p), rel=1e-9)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_upsilon_shift_relations(gamma):
    p = LiouvilleParams(gamma)
    g = gamma
    for z in [0.37, -2.3 + 0.4j, 3.3 - 1.1j, 1.7 + 2.2j]:
        u = upsilon(z, p)
        assert upsilon(z + g / 2, p) == pytest.approx(ell(g * z / 2) * (g / 2) ** (1 - g * z) * u, rel=1e-9)
        assert upsilon(z + 2 / g, p) == pytest.approx(ell(2 * z / g) * (g / 2) ** (4 * z / g - 1) * u, rel=1e-9)


def test_upsilon_real_on_real_axis():
    p = LiouvilleParams(1.2)
    for x in [-3.1, 0.2, 1.9, 5.5]:
        assert upsilon(x, p).imag == 0.0


@pytest.mark.parametrize("gamma", [0.8, 1.0, 1.5])
def test_upsilon_zero_lattice(gamma):
    p = LiouvilleParams(gamma)
    zeros = [0.0, -gamma / 2, -2 / gamma, -gamma - 2 / gamma, p.Q, p.Q + gamma / 2, p.Q + 4 / gamma]
    for z in zeros:
        assert upsilon_is_zero(z, p)
        assert upsilon(z, p) == 0
        with pytest.raises(PoleError):
            log_upsilon(z, p)
    assert not upsilon_is_zero(0.5 * p.Q, p)
    assert not upsilon_is_zero(-gamma / 4 + 0.01, p)


@pytest.mark.parametrize("gamma", GAMMAS)
def test_upsilon_prime_at_zero(gamma):
    p = LiouvilleParams(gamma)
    h = 1e-5
    deriv = (upsilon(h, p) - upsilon(-h, p)) / (2 * h)
    assert deriv.real == pytest.approx(upsilon_prime_zero(p), rel=1e-8)


def test_dozz_permutation_symmetry_is_exact():
    p = LiouvilleParams(1.0, 1.3)
    a = (1.1 + 0.2j, 1.7, 0.9 - 0.4j)
    base = dozz(*a, p)
    for perm in itertools.permutations(a):
        assert dozz(*perm, p) == base


@pytest.mark.parametrize("gamma", GAMMAS)
def test_dozz_mu_scaling(gamma):
    p = LiouvilleParams(gamma)
    a = (0.6 * p.Q, 0.7 * p.Q + 0.3j, 0.8 * p.Q)
    ratio = dozz(*a, p.with_mu(2.0)) / dozz(*a, p)
    expected = 2.0 ** ((2 * p.Q - sum(a)) / gamma)
    assert abs(ratio / expected - 1) < 1e-12


def test_dozz_prefactor_formula():
    p = LiouvilleParams(1.0, 2.0)
    g = 1.0
    base = math.pi * 2.0 * ell(g * g / 4).real * (g / 2) ** (2 - g * g / 2)
    s = 2.7
    assert dozz_log_prefactor(s, p) == pytest.approx((2 * p.Q - s) / g * math.log(base))


def test_dozz_against_direct_upsilon_formula():
    p = LiouvilleParams(0.9, 1.0)
    a1, a2, a3 = 1.2, 1.6 + 0.3j, 2.0
    abar = a1 + a2 + a3
    Q = p.Q
    g = p.gamma
    pref = (math.pi * ell(g * g / 4) * (g / 2) ** (2 - g * g / 2)) ** ((2 * Q - abar) / g)
    num = upsilon_prime_zero(p) * upsilon(a1, p) * upsilon(a2, p) * upsilon(a3, p)
    den = upsilon(abar / 2 - Q, p) * upsilon(abar / 2 - a1, p) * upsilon(abar / 2 - a2, p) * upsilon(abar / 2 - a3, p)
    assert dozz(a1, a2, a3, p) == pytest.approx(pref * num / den, rel=1e-10)


def test_dozz_pole_reports_location():
    p = LiouvilleParams(1.0)
    with pytest.raises(PoleError) as info:
        dozz(2.0, 2.0, 1.0, p)  # abar/2 - Q = 0
    assert info.value.location == 0


def test_dozz_vanishes_at_upsilon_zero():
    p = LiouvilleParams(1.0)
    assert dozz(0.0, 1.0, 1.5, p) == 0


def test_dozz_real_for_real_momenta():
    p = LiouvilleParams(1.0)
    assert dozz(1.2, 1.4, 1.6, p).imag == 0.0


def test_dozz_reflection_pair_is_conjugate_on_spectrum_line():
    # C(a1, a2, Q - iP) and C(Q + iP, a1, a2) are complex conjugates for real a1, a2
    p = LiouvilleParams(1.0)
    P = 1.7
    x = dozz(1.6, 1.4, complex(p.Q, -P), p)
    y = dozz(complex(p.Q, P), 1.6, 1.4, p)
    assert x == pytest.approx(y.conjugate(), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.5, 1.6),
    st.floats(-3.0, 3.0),
    st.floats(-2.0, 2.0),
)
def test_property_reflection_and_conjugation(gamma, x, y):
    p = LiouvilleParams(gamma)
    z = complex(x, y)
    if upsilon_is_zero(z, p, tol=1e-3) or upsilon_is_zero(p.Q - z, p, tol=1e-3):
        return
    u = upsilon(z, p)
    assert cmath.isclose(u, upsilon(p.Q - z, p), rel_tol=1e-8, abs_tol=1e-300)
    assert cmath.isclose(upsilon(z.conjugate(), p), u.conjugate(), rel_tol=1e-8, abs_tol=1e-300)


def test_upsilon_is_vectorisable_via_numpy():
    p = LiouvilleParams(1.0)
    vals = np.vectorize(lambda z: upsilon(z, p))(np.array([0.5, 1.0, 1.5]))
    assert vals.shape == (3,)
