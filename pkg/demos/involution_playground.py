"""Character twists, the involution w_*, and the projective-line gluing.

m_delta is computed two ways: the convergent double series on windows, and
diagonal multiplication on the exact Dirac model; w_* transports point
masses through x -> 1/x.  The last section glues a rank-1 module over P^1
and fuzzes a couple of GL_2(Qp) relations.
"""

import random
from fractions import Fraction

from robbalab.coefficients import CoeffRing
from robbalab.characters import Character
from robbalab import robba as rb
from robbalab import twists as tw
from robbalab import sheaf as sh

P = 5
R = CoeffRing(P, prec=24)
CAP = 60

print("m_delta: series route == diagonal route on point masses")
combo = tw.DiracCombo(R, {(0, Fraction(2)): R(3), (0, Fraction(7)): R(-1)})
z = tw.PsiZeroElement.from_combo(combo)
d = Character.x_power(R, 2).restrict_units()
series = tw.m_delta(d, z.window(cap=CAP), cap=CAP)
diagonal = tw.m_delta_dirac(d, z).window(cap=CAP)
print("  agreement valuation:", rb.defect_valuation(series, diagonal))

print()
print("m_(x^k) = partial^k on a random psi = 0 window:")
rng = random.Random(7)
cu = {n: R(rng.randint(-9, 9)) for n in range(1, 10) if n % P}
f = rb.from_u_coeffs(R, cu)
for k in (1, 2):
    got = tw.m_delta(Character.x_power(R, k).restrict_units(), f, cap=CAP)
    want = f
    for _ in range(k):
        want = rb.rb_partial(want)
    print(f"  k = {k}:", rb.defect_valuation(got, want))

print()
print("w_* inverts Dirac points: w_*((1+T)^a|units) = (1+T)^(1/a)")
za = tw.PsiZeroElement.from_combo(tw.DiracCombo.dirac(R, 3))
print("  w_*(u^3) terms:", dict(tw.w_star(za).combo.terms))
print("  w_*^2 = id:", rb.defect_valuation(
    tw.w_star(tw.w_star(za)).window(cap=CAP), za.window(cap=CAP)))

print()
print("iota^2 = id for the pair (x^2, trivial):")
d1, d2 = Character.x_power(R, 2), Character.trivial(R)
zz = tw.PsiZeroElement.from_window(f)
twice = tw.iota(d1, d2, tw.iota(d1, d2, zz))
print("  agreement valuation:",
      rb.defect_valuation(twice.window(cap=CAP), zz.window(cap=CAP)))

print()
print("Gluing over P^1 and fuzzing GL_2(Qp) relations (exact):")
space = sh.SheafSpace(d1, d2)
for name, lhs, rhs in [
        ("w^2 = 1", [("w",), ("w",)], []),
        ("diag(2)diag(3) = diag(6)",
         [("diag_unit", 2), ("diag_unit", 3)], [("diag_unit", 6)]),
        ("upper(p)^2 = upper(2p)",
         [("upper", P), ("upper", P)], [("upper", 2 * P)])]:
    worst = sh.check_relation(space, lhs, rhs, samples=6, seed=1)
    print(f"  {name}: min defect valuation {worst}")
print("  pairing invariance under diag(p,1):",
      sh.pairing_invariance(space, ("diag_p",), samples=3, seed=2))
