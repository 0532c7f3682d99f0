from fractions import Fraction

import pytest

from robbalab.coefficients import CoeffRing
from robbalab.characters import Character
from robbalab import linalg as la
from robbalab.complexes import (
    ChainComplex,
    build_aplus,
    build_aplus_lie,
    build_aplus_twisted,
    build_koszul,
    build_lie,
    cohomology,
    dims,
    koszul_lie_consistency,
    module_quotient,
    restriction_rank,
)
from robbalab.errors import ModelError, PivotAmbiguityError
from robbalab.finite_models import LocPolyModule, PolDualModule

P = 5
R = CoeffRing(P, prec=24)
DUAL = CoeffRing(P, prec=24, variant="dual", e=2)
X = Character.x_power
TRIV = Character.trivial(R)


def test_d_squared_zero_everywhere():
    M = PolDualModule(3, X(R, -1), TRIV)
    for builder in (build_koszul, build_aplus, build_aplus_twisted,
                    build_aplus_lie, build_lie):
        builder(M)  # constructor checks d o d = 0 exactly


def test_koszul_ranks_and_euler():
    M = PolDualModule(4, TRIV, TRIV)
    C = build_koszul(M)
    n = M.dim
    assert C.ranks == [n, 3 * n, 3 * n, n]
    assert C.euler_characteristic() == 0
    ds = dims(C)
    assert ds[0] - ds[1] + ds[2] - ds[3] == 0


def test_koszul_h0_examples():
    # trivial ratio: H^0 = L t^0
    M = PolDualModule(4, TRIV, TRIV)
    h0 = cohomology(build_koszul(M))[0]
    assert h0.dim == 1
    rep = h0.representatives[0]
    assert not rep[0].is_zero() and all(x.is_zero() for x in rep[1:])
    # ratio x^{-1}: H^0 spanned by t^1
    M2 = PolDualModule(4, X(R, -1), TRIV)
    h0 = cohomology(build_koszul(M2))[0]
    assert h0.dim == 1
    rep = h0.representatives[0]
    assert not rep[1].is_zero()
    assert all(x.is_zero() for i, x in enumerate(rep) if i != 1)


def test_koszul_dimension_table():
    gen = Character.unramified(R, Fraction(1 + P))
    expected = {
        "x^-1": [1, 3, 3, 1],
        "x^-2": [1, 3, 3, 1],
        "x^2": [0, 0, 0, 0],
        "generic": [0, 0, 0, 0],
        # finite-model value; see the test below for the chi-obstruction
        "trivial": [1, 2, 1, 0],
    }
    chars = {"x^-1": X(R, -1), "x^-2": X(R, -2), "x^2": X(R, 2),
             "generic": gen, "trivial": TRIV}
    for name, d1 in chars.items():
        M = PolDualModule(6, d1, TRIV)
        assert dims(build_koszul(M)) == expected[name], name


def test_trivial_character_euler_obstruction():
    # (1,1,1,0) is impossible on a finite module: chi must vanish
    M = PolDualModule(6, TRIV, TRIV)
    ds = dims(build_koszul(M))
    assert sum((-1) ** i * d for i, d in enumerate(ds)) == 0
    assert ds != [1, 1, 1, 0]


@pytest.mark.parametrize("name,d1", [
    ("trivial", TRIV), ("x^-1", X(R, -1)), ("x^-2", X(R, -2)),
    ("x^2", X(R, 2)),
])
def test_koszul_lie_consistency(name, d1):
    M = PolDualModule(5, d1, TRIV)
    kos, inv = koszul_lie_consistency(M)
    assert kos == inv, name


def test_lie_h3_generator_for_x_minus_one():
    # H^3 invariants generated by the [t^0]-class (i - 1 = 0)
    M = PolDualModule(4, X(R, -1), TRIV)
    from robbalab.complexes import lie_group_actions, ptilde_invariants
    C = build_lie(M)
    hs = cohomology(C)
    inv3 = ptilde_invariants(hs[3], M, C)
    assert inv3.dim == 1
    rep = inv3.representatives[0]
    assert not rep[0].is_zero()


def test_aplus_building_blocks():
    # C_{phi,gamma} on a generic-unit module: all cohomology vanishes
    gen = Character.unramified(R, Fraction(1 + P))
    M = PolDualModule(4, gen, TRIV)
    assert dims(build_aplus(M)) == [0, 0, 0]
    # ratio x^{-1}: H^0 is the t^1-line
    M2 = PolDualModule(4, X(R, -1), TRIV)
    h = cohomology(build_aplus(M2))
    assert h[0].dim == 1 and not h[0].representatives[0][1].is_zero()


def test_twisted_kernel_finite():
    M = PolDualModule(4, X(R, -1), TRIV)
    C = build_aplus_twisted(M)
    # (1 - phi delta_p) has finite kernel and cokernel: just check builds
    # and that H^* are finite-dimensional (trivially true) and computed
    assert all(d >= 0 for d in dims(C))


def test_restriction_rank_regular():
    gen = Character.unramified(R, Fraction(1 + P))
    M = PolDualModule(4, gen, TRIV)
    out = restriction_rank(M)
    assert out["h1_koszul"] == 0 and out["h1_aplus"] == 0 and out["rank"] == 0


def test_restriction_rank_x_minus_one():
    M = PolDualModule(6, X(R, -1), TRIV)
    out = restriction_rank(M)
    # corrected table: dim 3 upstairs, dim 2 downstairs, surjective not injective
    assert out["h1_koszul"] == 3
    assert out["h1_aplus"] == 2
    assert out["rank"] == 2 and out["cokernel"] == 0 and out["kernel"] == 1


def test_restriction_rank_dual_free_match():
    # eps-deformation of a regular point: free ranks match across the map
    gen = Character.unramified(DUAL, DUAL(1 + P) + DUAL.gen())
    triv = Character.trivial(DUAL)
    M = PolDualModule(3, gen, triv)
    out = restriction_rank(M)
    assert out["h1_koszul"] == out["h1_aplus"] == (0, 0, 0)


def test_lie_on_locpoly():
    # H^0_Lie = 0 for generic delta(p) (1 - delta(p) phi injective)
    gen = Character.unramified(R, Fraction(1 + P))
    M = LocPolyModule(1, 2, gen, TRIV)
    C = build_lie(M)
    assert cohomology(C)[0].dim == 0


def test_cohomology_dual_path():
    # Koszul over Qp[eps]/(eps^2) with a rational character: pure base change
    d1 = Character.x_power(DUAL, -1)
    d2 = Character.trivial(DUAL)
    M = PolDualModule(4, d1, d2)
    hs = cohomology(build_koszul(M))
    assert [(h.free_rank, h.torsion) for h in hs] == [(1, 0), (3, 0), (3, 0), (1, 0)]


def test_module_quotient():
    eps = DUAL.gen()
    assert module_quotient([[R(3)]], R) == 0
    assert module_quotient([[R(0)]], R) == 1
    q, r, t = module_quotient([[eps]], DUAL)
    assert (q, r, t) == (1, 0, 1)


def test_padic_pivot_threshold():
    from robbalab.coefficients import PAdic, CoeffElement
    ring = CoeffRing(P, prec=10)
    big = CoeffElement(ring, [PAdic.approx_from_rational(P, Fraction(1), 10)])
    tiny = CoeffElement(ring, [PAdic.inexact_zero(P, 10)])
    ker = la.kernel_basis([[big, tiny], [tiny, tiny]], ring)
    assert len(ker) == 1  # the below-precision column is treated as zero


def test_bad_complex_rejected():
    M = PolDualModule(2, TRIV, TRIV)
    n = M.dim
    bad = la.identity(R, n)
    with pytest.raises(ModelError):
        ChainComplex(R, [bad, bad])
