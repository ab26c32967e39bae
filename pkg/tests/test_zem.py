import cmath
import math
import random

import pytest

from elliptica.elliptic import EllipticParams, phi_numeric
from elliptica.qseries import Substitution, ps_substitute_t
from elliptica.ring import RationalFunctionQi
from elliptica.spinchar import CyclicAction, RotationData, spinor_trace, v_sign
from elliptica.witten import witten_char
from elliptica.zem import (
    AdaptedKError,
    BothEvenError,
    DegenerateDrawError,
    LatticeElement,
    SUITE_NAMES,
    SpecialCollisionError,
    ZemError,
    adapted_k,
    degenerate_reduction_check,
    em_eps,
    em_fun,
    identity_check,
    z_fun,
)

RF = RationalFunctionQi
TAU = 0.21 + 1.05j
PARAMS = EllipticParams(tau=TAU)


def offsets(*vals, sign=1):
    return RotationData(tuple(vals), sign)


def test_lattice_element_basics():
    g = LatticeElement.torsion(1, 1, 2)
    assert g.is_torsion and g.order == 2
    assert abs(g.value(TAU) - (1 + TAU) / 2) < 1e-15
    assert g.translate(1, 0).alpha == 3
    assert g.same_point(g.translate(1, 0))
    with pytest.raises(ZemError):
        LatticeElement.torsion(2, 0, 4)  # not reduced
    free = LatticeElement.free_point(0.3 + 0.1j)
    assert not free.is_torsion and free.order is None


def test_z_fun_single_factor_is_phi1():
    # one plane: the product is a single phi_1 value
    gamma = LatticeElement.free_point(0.21 + 0.09j)
    j = RotationData((2,), 1)
    r = offsets(0.07 - 0.02j)
    got = z_fun(gamma, j, r, PARAMS)
    want = phi_numeric(1, PARAMS, 2 * gamma.free + 0.07 - 0.02j)
    assert abs(got - want) < 1e-14 * abs(want)
    flipped = z_fun(gamma, RotationData((2,), -1), r, PARAMS)
    assert abs(flipped + got) < 1e-14 * abs(got)


def test_z_fun_gamma_zero_matches_character_definition():
    # at gamma = 0 the function is chi * C_1 evaluated on the offsets
    gamma = LatticeElement.free_point(0.0)
    j = RotationData((1, 3), 1)
    r = offsets(0.11 + 0.01j, 0.19 - 0.03j)
    got = z_fun(gamma, j, r, PARAMS, strict=False)
    angles = RotationData(tuple(2 * math.pi * x for x in r.entries), 1)
    eigs = []
    for x in r.entries:
        e = cmath.exp(2j * cmath.pi * x)
        eigs.extend((e, 1 / e))
    want = witten_char(1, eigs, PARAMS) / spinor_trace("str", angles)
    assert abs(got - want) < 1e-12 * abs(want)


def test_z_fun_shift_property():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 3)
        j = RotationData(tuple(rng.choice([1, -1, 2, 3]) for _ in range(n)), 1)
        gamma = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2))
        y = complex(rng.uniform(-0.15, 0.15), rng.uniform(-0.1, 0.1))
        r = offsets(*[complex(rng.uniform(0.03, 0.4), rng.uniform(-0.03, 0.03))
                      for _ in range(n)])
        shifted = offsets(*[r.entries[i] + j.entries[i] * y for i in range(n)])
        from elliptica.elliptic import PoleError

        try:
            lhs = z_fun(gamma, j, shifted, PARAMS)
            rhs = z_fun(gamma + y, j, r, PARAMS)
        except (SpecialCollisionError, PoleError):
            continue
        assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), abs(rhs))


def test_z_fun_collision_error_names_rotation_number():
    gamma = LatticeElement.torsion(1, 0, 2)
    j = RotationData((2,), 1)
    with pytest.raises(SpecialCollisionError) as err:
        z_fun(gamma, j, offsets(0.1), PARAMS)
    assert err.value.rotation_number == 2
    # non-strict evaluation goes through (the offset keeps it off the pole)
    val = z_fun(gamma, j, offsets(0.1), PARAMS, strict=False)
    assert abs(val) > 0


def test_z_fun_exact_formal_series():
    params = EllipticParams(truncation_order=8)
    ser = z_fun(None, RotationData((1,), 1), None, params, backend="exact")
    from elliptica.elliptic import phi_exact

    assert ser == phi_exact(1, 8)
    with pytest.raises(ZemError):
        z_fun(LatticeElement.free_point(0.1), RotationData((1,), 1), None,
              params, backend="exact")


def test_em_eps_dim2_case_alpha_odd():
    # R = 0: Tr(1, S_N) = 2 and the value is c2 * C_2(0) / 2
    gamma = LatticeElement.torsion(1, 0, 2)
    r0 = offsets(0.0)
    got = em_eps(gamma, r0, PARAMS)
    c2 = 1j * (-1.0) ** 0  # i^{dim N/2}, (alpha+beta-1) dim N/4 = 0
    want = c2 * witten_char(2, [1.0, 1.0], PARAMS) / 2.0
    assert abs(got - want) < 1e-13 * abs(want)


def test_em_eps_rejects_both_even():
    gamma = LatticeElement.torsion(1, 1, 2)
    shifted = LatticeElement(free=None, alpha=2, beta=2, k=2)  # unreduced
    with pytest.raises(BothEvenError):
        em_eps(shifted, offsets(0.1), PARAMS)
    with pytest.raises(ZemError):
        em_eps(LatticeElement.torsion(1, 0, 3), offsets(0.1), PARAMS)  # odd k


def test_em_eps_exact_q_prefactor():
    # the (even, odd) case is divisible by p^{dim N/2}: one p per plane
    gamma = LatticeElement.torsion(0, 1, 2)
    params = EllipticParams(truncation_order=8)
    ser = em_eps(gamma, RotationData((1,), 1), params, backend="exact")
    assert not ser.coeffs[0]
    assert any(ser.coeffs)
    gamma2 = LatticeElement.torsion(1, 1, 2)
    ser2 = em_eps(gamma2, RotationData((1, 2), 1), params, backend="exact")
    assert not ser2.coeffs[0] and not ser2.coeffs[1]


def test_em_eps_exact_matches_numeric():
    for alpha, beta in ((1, 0), (0, 1), (1, 1)):
        gamma = LatticeElement.torsion(alpha, beta, 2)
        ser = em_eps(gamma, RotationData((1,), 1),
                     EllipticParams(truncation_order=60), backend="exact")
        z = 0.13 + 0.02j
        s0 = cmath.exp(1j * cmath.pi * z)
        p0 = cmath.exp(0.5j * cmath.pi * TAU)
        num = em_eps(gamma, offsets(z), PARAMS)
        assert abs(ser.evaluate(s0, p0) - num) < 1e-10 * abs(num)


def test_adapted_k_examples():
    assert adapted_k(CyclicAction(4, (1,))).entries == (1,)
    assert adapted_k(CyclicAction(3, (1, 2))).entries == (1, 2)
    assert adapted_k(CyclicAction(5, (7, -1))).entries == (2, 4)
    with pytest.raises(AdaptedKError):
        adapted_k(CyclicAction(4, (2,)))
    with pytest.raises(AdaptedKError):
        adapted_k(CyclicAction(4, (4,)))


def test_em_fun_reduces_to_z_without_minus_one():
    gamma = LatticeElement.torsion(1, 1, 5)
    zeta = CyclicAction(5, (1, 2))
    r = offsets(0.08, 0.15 - 0.02j)
    got = em_fun(gamma, zeta, r, PARAMS)
    k = adapted_k(zeta)
    from elliptica.spinchar import os_sign

    os_k = os_sign(k.scaled(2 * math.pi / 5))
    want = (os_k ** 2) * z_fun(gamma, k, RotationData(r.entries, 1), PARAMS)
    assert abs(got - want) < 1e-13 * abs(want)


def test_em_fun_adapted_choice_independence():
    gamma = LatticeElement.torsion(1, 2, 5)
    r = offsets(0.08, 0.15 - 0.02j)
    base = em_fun(gamma, CyclicAction(5, (1, 2)), r, PARAMS)
    from elliptica.spinchar import os_sign

    for shifts in ((1, 0), (0, -1), (2, 1)):
        j = RotationData((1 + 5 * shifts[0], 2 + 5 * shifts[1]), 1)
        os_j = os_sign(j.scaled(2 * math.pi / 5)) ** 3
        alt = os_j * z_fun(gamma, j, RotationData(r.entries, 1), PARAMS)
        assert abs(alt - base) < 1e-9 * abs(base)


def test_em_fun_periodicity_with_v_sign():
    rng = random.Random(17)
    for _ in range(20):
        k = rng.randint(2, 6)
        n = rng.randint(1, 3)
        residues = tuple(rng.randint(1, k - 1) for _ in range(n))
        sig = 1 if rng.random() < 0.5 else -1
        for _try in range(40):
            alpha = rng.randint(-k, k)
            beta = rng.randint(-k, k)
            from math import gcd
            if gcd(gcd(abs(alpha), abs(beta)), k) == 1:
                break
        gamma = LatticeElement.torsion(alpha, beta, k)
        r = RotationData(
            tuple(complex(rng.uniform(0.03, 0.4), rng.uniform(-0.03, 0.03))
                  for _ in range(n)),
            sig,
        )
        zeta = CyclicAction(k, residues)
        v = v_sign(zeta, sig)
        base = em_fun(gamma, zeta, r, PARAMS)
        plus1 = em_fun(gamma.translate(1, 0), zeta, r, PARAMS)
        plustau = em_fun(gamma.translate(0, 1), zeta, r, PARAMS)
        assert abs(plus1 - v * base) < 1e-9 * abs(base)
        assert abs(plustau - v * base) < 1e-9 * abs(base)


def test_em_fun_requires_no_eigenvalue_one():
    gamma = LatticeElement.torsion(1, 0, 3)
    with pytest.raises(ZemError):
        em_fun(gamma, CyclicAction(3, (3,)), offsets(0.1), PARAMS)


@pytest.mark.parametrize("suite", SUITE_NAMES)
def test_identity_suites_quick(suite):
    rep = identity_check(suite, trials=20, dims=8, seed=5, tol=1e-8)
    assert rep.passed, rep.failures[:1]
    assert rep.max_residual < 1e-8
    if rep.exact_checks is not None:
        assert rep.exact_checks["passed"]


def test_identity_check_unknown_suite():
    with pytest.raises(ValueError):
        identity_check("nosuch", trials=1)


def test_identity_check_deterministic_and_parallel_safe():
    a = identity_check("K-transfer", trials=12, seed=9)
    b = identity_check("K-transfer", trials=12, seed=9)
    c = identity_check("K-transfer", trials=12, seed=9, workers=4)
    assert a.to_json() == b.to_json() == c.to_json()


def test_degenerate_reduction_quick():
    rep = degenerate_reduction_check(trials=20, dims=8, seed=1, tol=1e-10)
    assert rep.passed, rep.failures[:1]


def test_exact_z_periodicity_component():
    rep = identity_check("Z-periodicity", trials=2, seed=0)
    ec = rep.exact_checks
    assert ec["gamma_plus_one_first_diff"] is None
    assert ec["gamma_plus_tau_ok"]


def test_report_json_shape():
    rep = identity_check("allW", trials=5, seed=3)
    js = rep.to_json()
    assert set(js) >= {"suite", "trials", "seed", "max_residual", "failures",
                       "passed"}
    assert js["suite"] == "allW" and js["trials"] == 5
