import cmath
import random

import pytest

from elliptica.elliptic import EllipticParams
from elliptica.ring import RationalFunctionQi
from elliptica.witten import WittenDenominatorError, witten_char

RF = RationalFunctionQi


def test_dimension_series_rank_one():
    # 1 + q^{1/2} + q + 2 q^{3/2} + ... : p-orders 0, 2, 4, 6
    ser = witten_char(1, [0], EllipticParams(truncation_order=6), backend="exact")
    vals = [c.constant_value().re if c else 0 for c in ser.coeffs]
    assert vals == [1, 0, 1, 0, 1, 0, 2]


def test_empty_space_is_one():
    ser = witten_char(2, [], EllipticParams(truncation_order=4), backend="exact")
    assert ser.coeffs[0] == RF.one()
    assert not any(ser.coeffs[1:])
    assert witten_char(3, [], EllipticParams(tau=1j)) == 1


def test_rank_two_is_square_of_rank_one():
    prm = EllipticParams(truncation_order=12)
    one = witten_char(1, [0], prm, backend="exact")
    two = witten_char(1, [0, 0], prm, backend="exact")
    assert two == one * one


def test_multiplicativity_exact():
    prm = EllipticParams(truncation_order=10)
    for i in (1, 2, 3, 4):
        a = witten_char(i, [1, -1], prm, backend="exact")
        b = witten_char(i, [2], prm, backend="exact")
        ab = witten_char(i, [1, -1, 2], prm, backend="exact")
        assert ab == a * b


def test_constant_terms():
    prm = EllipticParams(truncation_order=8)
    for i in (1, 2, 3, 4):
        ser = witten_char(i, [1, -1, 3], prm, backend="exact")
        assert ser.coeffs[0] == RF.one()


def test_permutation_invariance():
    prm = EllipticParams(tau=0.2 + 0.8j)
    xs = [1.2 + 0.1j, 0.4 - 0.2j, 2.0]
    for i in (1, 2, 3, 4):
        a = witten_char(i, xs, prm)
        b = witten_char(i, xs[::-1], prm)
        assert abs(a - b) < 1e-13 * abs(a)


def test_exact_numeric_agreement():
    rng = random.Random(6)
    for i in (1, 2, 3, 4):
        tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.7, 1.4))
        z = complex(rng.uniform(0.05, 0.4), rng.uniform(-0.05, 0.05))
        weights = [1, -1, 2]
        ser = witten_char(
            i, weights, EllipticParams(truncation_order=60), backend="exact"
        )
        s0 = cmath.exp(1j * cmath.pi * z)
        p0 = cmath.exp(0.5j * cmath.pi * tau)
        xs = [cmath.exp(2j * cmath.pi * w * z) for w in weights]
        num = witten_char(i, xs, EllipticParams(tau=tau))
        assert abs(ser.evaluate(s0, p0) - num) / abs(num) < 1e-10


def test_exact_numeric_agreement_near_branch_wrap():
    # Re tau close to 1/2: the q^{n-1/2} factors must use e^{i pi tau},
    # not a principal-branch square root of q
    tau = 0.49 + 0.9j
    z = 0.21 + 0.04j
    ser = witten_char(1, [1, -1], EllipticParams(truncation_order=60),
                      backend="exact")
    s0 = cmath.exp(1j * cmath.pi * z)
    p0 = cmath.exp(0.5j * cmath.pi * tau)
    xs = [cmath.exp(2j * cmath.pi * w * z) for w in (1, -1)]
    num = witten_char(1, xs, EllipticParams(tau=tau))
    assert abs(ser.evaluate(s0, p0) - num) / abs(num) < 1e-10


def test_vanishing_denominator_names_factor():
    # eigenvalue exactly q^{-1} makes the n = 1 denominator of W_1 vanish
    tau = 1j
    q = cmath.exp(2j * cmath.pi * tau)
    with pytest.raises(WittenDenominatorError) as err:
        witten_char(1, [1.0 / q], EllipticParams(tau=tau))
    assert err.value.n == 1


def test_exact_requires_integer_weights():
    with pytest.raises(ValueError):
        witten_char(1, [0.5], EllipticParams(truncation_order=4), backend="exact")
