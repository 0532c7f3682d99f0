from fractions import Fraction

import pytest

from robbalab.coefficients import CoeffRing, padic_log
from robbalab.characters import Character, delta_of_pair
from robbalab.errors import RobbaLabError

P = 5
R = CoeffRing(P, prec=24)
DUAL = CoeffRing(P, prec=24, variant="dual", e=2)


def test_cyclotomic_at_p():
    chi = Character.cyclotomic(R)
    assert chi(P).as_fraction() == 1      # chi(p) = p * p^{-1}
    assert chi(2).as_fraction() == 2      # chi = x on units
    assert chi.weight.as_fraction() == 1


def test_x_square():
    d = Character.x_power(R, 2)
    assert d(P).as_fraction() == P * P
    assert d(3).as_fraction() == 9
    assert d(Fraction(1, 2)).as_fraction() == Fraction(1, 4)


def test_weight_arithmetic():
    assert Character.x_power(R, 3).weight.as_fraction() == 3
    chi_x2 = Character.cyclotomic(R) * Character.x_power(R, 2)
    assert chi_x2.weight.as_fraction() == 3
    x = Character.x_power(R, 1)
    triv = x.inverse() * x
    assert triv.weight.is_exact_zero() and triv.tame == 0
    assert triv.value_at_p.eq_certified(R(1))


def test_eval_multiplicative():
    d = Character.from_weight(R, Fraction(1, 2), value_at_p=Fraction(1 + P))
    for u, v in ((2, 3), (7, Fraction(1, 3))):
        lhs = d(Fraction(u) * Fraction(v))
        rhs = d(u) * d(v)
        assert (lhs - rhs).is_zero()
        assert (lhs - rhs).valuation() >= 18


def test_first_order_exp_expansion_dual():
    # weight kappa = 1 + eps over dual numbers at u = 1+p:
    # delta(1+p) = (1+p) * (1 + eps log(1+p))
    kappa = DUAL(1) + DUAL.gen()
    d = Character.from_weight(DUAL, kappa, tame=1)
    got = d(1 + P)
    lg = padic_log(R(1 + P).coords[0], 24)
    expect = DUAL(1 + P) * (DUAL(1) + DUAL.gen() * lg)
    assert (got - expect).is_zero()
    assert min(v for v in (got - expect).coordinate_valuations()) >= 18


def test_regularity_verdicts():
    ok, _ = Character.x_power(R, 2).is_regular(10)
    assert ok
    bad, wit = Character.trivial(R).is_regular(10)
    assert not bad and wit == {"i": 0, "form": "x^-0", "point": "base"}
    bad, wit = Character.cyclotomic(R).is_regular(10)
    assert not bad and wit["form"] == "chi*x^0"
    bad, wit = Character.x_power(R, -3).is_regular(10)
    assert not bad and wit["i"] == 3
    ok, _ = Character.unramified(R, Fraction(1 + P)).is_regular(10)
    assert ok


def test_regularity_weight_shortcut():
    d = Character.from_weight(R, Fraction(1, 2))
    ok, _ = d.is_regular(10)
    assert ok


def test_regularity_pointwise_dual():
    # an eps-deformation of the trivial character still fails at the point
    kappa = DUAL.gen()  # weight eps, reduction has weight 0
    d = Character.from_weight(DUAL, kappa)
    ok, wit = d.is_regular(5)
    assert not ok and wit["point"] == "reduction"
    # an eps-deformation of a regular character stays regular
    d2 = Character.from_weight(DUAL, DUAL(2) + DUAL.gen(), tame=2,
                               value_at_p=DUAL(P ** 2))
    ok, _ = d2.is_regular(5)
    assert ok


def test_delta_of_pair():
    d1 = Character.x_power(R, 1)
    d2 = Character.trivial(R)
    delta = delta_of_pair(d1, d2)  # x * chi^{-1}: trivial on units, p at p
    assert delta.weight.is_exact_zero()
    assert delta.tame == 0
    assert delta.value_at_p.as_fraction() == P


def test_integer_weight_consistency():
    # for integer weight k, delta(a)/tame-part = a^k * (1-unit)
    d = Character.x_power(R, 3)
    a = 1 + P
    assert d(a).as_fraction() == Fraction(a) ** 3


def test_domain_guard():
    d = Character.x_power(R, 1).restrict_units()
    with pytest.raises(RobbaLabError):
        d(P)
