import random
from fractions import Fraction

from robbalab.coefficients import INF, CoeffRing
from robbalab import robba as rb
from robbalab.dictionary import (
    Distribution,
    LocPolyFn,
    amice,
    amice_inverse,
    colmez,
    indicator,
    pair,
    pair_moments,
    psi_fn,
)

P = 5
R = CoeffRing(P, prec=24)
NM = 24


def test_amice_dirac():
    d0 = Distribution.dirac(R, 0, NM)
    assert rb.defect_valuation(amice(d0), rb.one(R)) == INF
    d1 = Distribution.dirac(R, 1, NM)
    u = rb.rb_add(rb.one(R), rb.monomial(R, 1))
    assert rb.defect_valuation(amice(d1), u) == INF


def test_amice_x_times_dirac():
    # x * delta_1 = delta_1 as a functional, and partial(1+T) = 1+T
    d1 = Distribution.dirac(R, 1, NM)
    lhs = amice(d1.times_x())
    rhs = rb.rb_partial(amice(d1))
    # compare on the shared moment range
    assert rb.defect_valuation(rb.rb_sub(lhs, rhs)) == INF or all(
        (lhs.coeffs.get(n, R(0)) - rhs.coeffs.get(n, R(0))).is_zero()
        for n in range(NM - 1))


def test_amice_roundtrip():
    rng = random.Random(11)
    mu = Distribution(R, [Fraction(rng.randint(-9, 9)) for _ in range(12)])
    assert rb.defect_valuation(amice(amice_inverse(amice(mu))), amice(mu)) == INF


def test_amice_inverse_examples():
    assert amice_inverse(rb.one(R)).moments[0].as_fraction() == 1
    u2 = rb.rb_pow(rb.rb_add(rb.one(R), rb.monomial(R, 1)), 2)
    mom = [m.as_fraction() for m in amice_inverse(u2).moments]
    assert mom == [1, 2, 1]
    t_mom = [m.as_fraction() for m in amice_inverse(rb.monomial(R, 1)).moments]
    assert t_mom == [0, 1]


def test_colmez_examples():
    # f = T^{-1} -> constant 1
    f = colmez(rb.monomial(R, -1))
    assert f.evaluate(7).as_fraction() == 1
    # plus parts die
    assert colmez(rb.monomial(R, 3)).is_zero()
    # f = T^{-2} -> -x-1
    g = colmez(rb.monomial(R, -2))
    assert [c.as_fraction() for c in g.pieces[0]] == [-1, -1]


def test_partial_intertwines_colmez():
    # phi_{partial f}(x) = x phi_f(x)
    rng = random.Random(12)
    f = rb.RobbaElement(R, {-n: Fraction(rng.randint(-9, 9)) for n in range(1, 7)})
    lhs = colmez(rb.rb_partial(f))
    rhs = colmez(f).times_x()
    for x in (0, 1, 2, 7, Fraction(1, 2)):
        assert (lhs.evaluate(x) - rhs.evaluate(x)).is_zero()


def test_partial_amice_x_mu():
    rng = random.Random(13)
    mu = Distribution(R, [Fraction(rng.randint(-9, 9)) for _ in range(14)])
    lhs = rb.rb_partial(amice(mu))
    rhs = amice(mu.times_x())
    for n in range(13):
        assert (lhs.coeffs.get(n, R(0)) - rhs.coeffs.get(n, R(0))).is_zero()


def test_pair_examples():
    d1 = Distribution.dirac(R, 1, NM)
    assert pair(d1, rb.monomial(R, -1)).as_fraction() == 1
    d0 = Distribution.dirac(R, 0, NM)
    assert pair(d0, rb.monomial(R, 4)).is_exact_zero()
    for a in (2, 3):
        da = Distribution.dirac(R, a, NM)
        assert pair(da, rb.monomial(R, -2)).as_fraction() == -a - 1


def test_pair_identity_grid():
    # res_0(sigma_{-1}(A_mu) f dt) = integral of phi_f against mu
    for a in range(5):
        mu = Distribution.dirac(R, a, NM)
        for k in range(1, 6):
            f = rb.monomial(R, -k)
            assert (pair(mu, f) - pair_moments(mu, f)).is_zero()


def test_psi_fn_examples():
    c1 = LocPolyFn.constant(R, 1)
    assert psi_fn(c1).evaluate(3).as_fraction() == 1
    idx = LocPolyFn.global_poly(R, [0, 1])
    assert psi_fn(idx).evaluate(3).as_fraction() == 3 * P
    # psi kills Zp^x-supported functions
    f = indicator(R, 1, 1).times_x()
    g = psi_fn(f)
    assert g.is_zero() or all(
        g.evaluate(x).is_zero() for x in range(0, 10))


def test_psi_fn_vs_rb_psi():
    # phi_{psi(f)} = psi(phi_f) for a random Laurent window
    rng = random.Random(14)
    f = rb.RobbaElement(R, {n: Fraction(rng.randint(-9, 9))
                            for n in range(-8, 5)})
    lhs = colmez(rb.rb_psi(f))
    rhs = psi_fn(colmez(f))
    for x in (0, 1, 2, 3, 9):
        assert (lhs.evaluate(x) - rhs.evaluate(x)).is_zero()


def test_exactness_at_finite_level():
    # split + colmez realizes 0 -> D -> R -> LA x chi^{-1} -> 0 on windows
    rng = random.Random(15)
    f = rb.RobbaElement(R, {n: Fraction(rng.randint(-9, 9))
                            for n in range(-6, 7)})
    plus, minus = rb.rb_split(f)
    assert colmez(plus).is_zero()
    # onto degree-D truncations: phi_{T^{-n-1}} has exact degree n
    for n in range(4):
        g = colmez(rb.monomial(R, -n - 1))
        assert g.degree == n and not g.pieces[0][n].is_zero()


def test_dirac_evaluation_against_moments():
    # integrate x^2 against dirac at a
    for a in (0, 1, 4):
        mu = Distribution.dirac(R, a, NM)
        got = mu.integrate_poly([R(0), R(0), R(1)])
        assert got.as_fraction() == a * a
