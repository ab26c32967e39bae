import cmath
import random

import pytest

from elliptica.elliptic import (
    EllipticParams,
    PoleError,
    TRANSLATIONS,
    halfperiod_headroom,
    phi,
    phi_exact,
    phi_numeric,
    phi_translate_check,
)
from elliptica.qseries import Substitution, ps_substitute_t
from elliptica.ring import RationalFunctionQi

RF = RationalFunctionQi
ONE = RF.one()
S = RF.var()


def test_low_order_coefficients_against_hand_expansion():
    # oracle: expand the defining product to order q^{1/2} by hand:
    # pref * (1 + p^2 s^2)(1 + p^2 s^-2) + O(p^4)
    ser = phi_exact(1, 2)
    pref = S / (ONE - S * S)
    assert ser.coeffs[0] == pref
    assert ser.coeffs[1] == RF.zero()
    assert ser.coeffs[2] == (S * S + RF.monomial(-2)) * pref


def test_phi1_is_odd_every_order():
    for order in (0, 4, 12):
        ser = phi_exact(1, order)
        flipped = ps_substitute_t(ser, Substitution.inv_s())
        assert flipped == -ser


def test_translation_identities_exact_small_order():
    params = EllipticParams(truncation_order=24)
    for which in TRANSLATIONS:
        rep = phi_translate_check(which, params)
        assert rep.passed, (which, rep.first_failing_exponent)


def test_translation_z_plus_one_at_order_zero():
    rep = phi_translate_check("z+1", EllipticParams(truncation_order=0))
    assert rep.passed


def test_halfperiod_headroom_is_sufficient():
    # doubling the input depth must not change the regraded series
    order = 16
    a = ps_substitute_t(
        phi_exact(1, halfperiod_headroom(order)), Substitution.p_shift(1)
    ).truncate(order)
    b = ps_substitute_t(
        phi_exact(1, 2 * halfperiod_headroom(order)), Substitution.p_shift(1)
    ).truncate(order)
    assert a == b


def test_numeric_value_at_standard_point():
    # leading term i/(2 sin(0.3 pi)), corrected by the product factors
    params = EllipticParams(tau=1j)
    val = phi_numeric(1, params, 0.3)
    lead = 1j / (2.0 * cmath.sin(0.3 * cmath.pi).real)
    assert abs(val - lead) / abs(lead) < 0.05  # q = e^{-2 pi} correction ~2.6%
    ser = phi_exact(1, 80)
    s0 = cmath.exp(1j * cmath.pi * 0.3)
    p0 = cmath.exp(0.5j * cmath.pi * 1j)
    assert abs(val - ser.evaluate(s0, p0)) < 1e-10


def test_cross_backend_agreement_random():
    rng = random.Random(5)
    for _ in range(50):
        tau = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.5, 2.0))
        z = complex(rng.uniform(0.05, 0.45), rng.uniform(-0.1, 0.1))
        params = EllipticParams(tau=tau)
        i = rng.randint(1, 4)
        try:
            val = phi_numeric(i, params, z)
        except PoleError:
            continue
        ser = phi_exact(i, 80)
        s0 = cmath.exp(1j * cmath.pi * z)
        p0 = cmath.exp(0.5j * cmath.pi * tau)
        exact_val = ser.evaluate(s0, p0)
        assert abs(val - exact_val) / max(abs(val), 1e-30) < 1e-9


def test_numeric_tail_bound_doubling():
    params = EllipticParams(tau=0.1 + 0.5j)
    doubled = EllipticParams(tau=0.1 + 0.5j,
                             product_cutoff=2 * params.cutoff(1.0))
    for i in (1, 2, 3, 4):
        for z in (0.21, 0.37 + 0.05j):
            a = phi_numeric(i, params, z)
            b = phi_numeric(i, doubled, z)
            assert abs(a - b) / abs(b) < 1e-12


def test_pole_guard():
    params = EllipticParams(tau=1j)
    with pytest.raises(PoleError):
        phi_numeric(1, params, 1.0 + 1j * 1e-12)  # on the lattice
    with pytest.raises(PoleError):
        phi_numeric(2, params, 0.5)
    with pytest.raises(PoleError):
        phi_numeric(3, params, 0.5j)  # tau/2 at tau = i
    with pytest.raises(PoleError):
        phi_numeric(4, params, 0.5 + 0.5j)


def test_numeric_translations_spot_check():
    params = EllipticParams(tau=0.2 + 0.9j)
    q4 = cmath.exp(0.5j * cmath.pi * params.tau)
    z = 0.17 + 0.06j
    f1 = phi_numeric(1, params, z)
    assert abs(phi_numeric(1, params, z + 1) + f1) < 1e-12 * abs(f1)
    assert abs(phi_numeric(1, params, z + params.tau) + f1) < 1e-10 * abs(f1)
    assert abs(phi_numeric(1, params, z + 0.5) - 1j * phi_numeric(2, params, z)) \
        < 1e-10 * abs(f1)
    lhs = phi_numeric(1, params, z + params.tau / 2)
    assert abs(lhs - q4 * phi_numeric(3, params, z)) < 1e-10 * abs(lhs)
    lhs = phi_numeric(1, params, z + 0.5 + params.tau / 2)
    assert abs(lhs - 1j * q4 * phi_numeric(4, params, z)) < 1e-10 * abs(lhs)


def test_numeric_translations_near_branch_wrap():
    # Re tau close to 1/2: half-powers of q must come from tau, not from a
    # principal-branch root of q
    params = EllipticParams(tau=0.49 + 0.8j)
    q4 = cmath.exp(0.5j * cmath.pi * params.tau)
    z = 0.19 + 0.03j
    lhs = phi_numeric(1, params, z + params.tau / 2)
    rhs = q4 * phi_numeric(3, params, z)
    assert abs(lhs - rhs) < 1e-10 * abs(lhs)


def test_phi_dispatcher():
    params = EllipticParams(tau=1j, truncation_order=4)
    assert phi(1, "exact", params) == phi_exact(1, 4)
    assert phi(1, "numeric", params, 0.3) == phi_numeric(1, params, 0.3)
    with pytest.raises(ValueError):
        phi(1, "numeric", params)


def test_params_validation():
    with pytest.raises(ValueError):
        EllipticParams(tau=1.0 - 0.5j)
    with pytest.raises(ValueError):
        EllipticParams(truncation_order=-1)
