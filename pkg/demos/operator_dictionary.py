"""The p-adic functional-analysis dictionary, end to end.

Distributions on Zp (binomial moments) <-> power series via the Amice
transform; window elements -> locally polynomial functions via the Colmez
transform; the residue pairing computed along two independent routes.
"""

from fractions import Fraction

from robbalab.coefficients import CoeffRing
from robbalab import robba as rb
from robbalab.dictionary import (
    Distribution, amice, amice_inverse, colmez, pair, pair_moments, psi_fn)

P = 5
R = CoeffRing(P, prec=24)

print("Dirac masses and the Amice transform")
for b in (0, 1, 2):
    mu = Distribution.dirac(R, b, 8)
    print(f"  A(delta_{b}) =", amice(mu))

print()
print("Colmez transform reads the principal part:")
for k in (1, 2, 3):
    f = rb.monomial(R, -k)
    phi_f = colmez(f)
    vals = [phi_f.evaluate(x).as_fraction() for x in range(4)]
    print(f"  phi_(T^-{k})(x) on x=0..3:", vals)

print()
print("The pairing { , }: res_0(sigma_-1(A_mu) f dT/(1+T)) versus the")
print("moment-side integral of phi_f against mu (independent routes):")
for a in range(3):
    mu = Distribution.dirac(R, a, 12)
    for k in (1, 2):
        f = rb.monomial(R, -k)
        lhs, rhs = pair(mu, f), pair_moments(mu, f)
        print(f"  mu = delta_{a}, f = T^-{k}:  {lhs}  ==  {rhs}:",
              lhs.eq_certified(rhs))

print()
print("psi and the residue-class projectors:")
f = rb.RobbaElement(R, {n: Fraction(n * n - 3) for n in range(-3, 7)})
total = rb.zero(R)
for i in range(P):
    total = rb.rb_add(total, rb.rb_restrict(i, 1, f, cap=48))
print("  sum_i Res_(i+pZp) f  == f :", rb.defect_valuation(total, f))
print("  psi(phi(f)) == f (plus part):",
      rb.defect_valuation(rb.rb_psi(rb.rb_phi(rb.rb_split(f)[0])),
                          rb.rb_split(f)[0]))
print("  psi on functions: (psi phi)(x) = phi(p x):",
      psi_fn(colmez(rb.monomial(R, -2))).evaluate(1).as_fraction(),
      "= phi_f(p) =", colmez(rb.monomial(R, -2)).evaluate(P).as_fraction())
