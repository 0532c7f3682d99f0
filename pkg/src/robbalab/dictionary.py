"""The p-adic functional-analysis dictionary at finite level.

Distributions on Zp are stored through their binomial moments
m_n = integral of binom(x, n); the Amice transform is then literally
sum m_n T^n.  Locally analytic functions are level-h families of degree-D
polynomials on the classes i + p^h Zp; the Colmez transform of a window
element lands in the level-0 part via
phi_f(x) = res_0((1+T)^{-x} f dT/(1+T)) = sum_n a_{-n-1} binom(-x-1, n),
an exact polynomial once the principal part of f is finite.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .coefficients import CoeffElement, CoeffRing
from .errors import RingMismatchError, RobbaLabError, WindowOverflowError
from .robba import (
    RobbaElement,
    rb_mul,
    rb_res0_dt,
    rb_sigma,
    u_power_series,
)


class Distribution:
    """Finite model of a distribution on Zp: binomial moments m_0..m_N."""

    __slots__ = ("ring", "moments")

    def __init__(self, ring: CoeffRing, moments):
        self.ring = ring
        self.moments = [m if isinstance(m, CoeffElement) else ring(m)
                        for m in moments]

    @classmethod
    def dirac(cls, ring, b, n_moments):
        """Dirac mass at b (rational, p-integral)."""
        from .robba import _binomial
        return cls(ring, [_binomial(Fraction(b), n) for n in range(n_moments + 1)])

    def __add__(self, other):
        if other.ring != self.ring:
            raise RingMismatchError("distributions over different rings")
        n = max(len(self.moments), len(other.moments))
        a = self.moments + [self.ring.zero()] * (n - len(self.moments))
        b = other.moments + [self.ring.zero()] * (n - len(other.moments))
        return Distribution(self.ring, [x + y for x, y in zip(a, b)])

    def scale(self, s):
        return Distribution(self.ring, [m * s for m in self.moments])

    def times_x(self):
        """The distribution x * mu: moments (n+1) m_{n+1} + n m_n.

        Truncation note: the top moment of x*mu needs m_{N+1}, so the output
        is one moment shorter.
        """
        out = []
        for n in range(len(self.moments) - 1):
            out.append(self.moments[n + 1] * (n + 1) + self.moments[n] * n)
        return Distribution(self.ring, out)

    def integrate_poly(self, coeffs):
        """Integrate a polynomial sum c_k x^k against the distribution."""
        # convert to the binomial basis by forward differences at 0..deg
        deg = len(coeffs) - 1
        if deg >= len(self.moments):
            raise WindowOverflowError("not enough moments for this degree")
        values = []
        for j in range(deg + 1):
            acc = self.ring.zero()
            for k, c in enumerate(coeffs):
                term = c * Fraction(j) ** k if k else c
                acc = acc + term
            values.append(acc)
        acc = self.ring.zero()
        # Delta^n P(0) = sum_k (-1)^(n-k) C(n,k) P(k)
        for n in range(deg + 1):
            dn = self.ring.zero()
            for k in range(n + 1):
                sign = 1 if (n - k) % 2 == 0 else -1
                dn = dn + values[k] * (sign * math.comb(n, k))
            acc = acc + dn * self.moments[n]
        return acc

    def to_json(self):
        return {"moments": [m.to_json() for m in self.moments]}


class LocPolyFn:
    """Degree-<=D polynomial on each class i + p^h Zp, in the global variable.

    ``chi_twist`` tags the chi^{-1}-twist carried by Colmez-transform images;
    it only matters for group actions, never for plain evaluation.
    """

    __slots__ = ("ring", "level", "degree", "pieces", "chi_twist")

    def __init__(self, ring, level, degree, pieces, chi_twist=False):
        self.ring = ring
        self.level = level
        self.degree = degree
        p = ring.p
        n_classes = p ** level
        self.pieces = {}
        for i in range(n_classes):
            coeffs = pieces.get(i, [])
            coeffs = [c if isinstance(c, CoeffElement) else ring(c)
                      for c in coeffs]
            coeffs += [ring.zero()] * (degree + 1 - len(coeffs))
            self.pieces[i] = coeffs[: degree + 1]
        self.chi_twist = chi_twist

    @classmethod
    def constant(cls, ring, value=1):
        return cls(ring, 0, 0, {0: [value]})

    @classmethod
    def global_poly(cls, ring, coeffs):
        return cls(ring, 0, len(coeffs) - 1, {0: list(coeffs)})

    def evaluate(self, x):
        """Value at x in Zp (rational with p-coprime denominator)."""
        x = Fraction(x)
        p = self.ring.p
        m = p ** self.level
        if self.level:
            num = x.numerator % (m * x.denominator)
            i = (x.numerator * pow(x.denominator, -1, m)) % m
        else:
            i = 0
        acc = self.ring.zero()
        xp = Fraction(1)
        for c in self.pieces[i]:
            acc = acc + c * xp
            xp *= x
        return acc

    def refine(self, level):
        """The same function written at a deeper level (no data loss)."""
        if level < self.level:
            raise RobbaLabError("refinement cannot lower the level")
        p = self.ring.p
        pieces = {}
        for i in range(p ** level):
            pieces[i] = list(self.pieces[i % p ** self.level])
        return LocPolyFn(self.ring, level, self.degree, pieces, self.chi_twist)

    def __add__(self, other):
        if other.ring != self.ring:
            raise RingMismatchError("functions over different rings")
        lvl = max(self.level, other.level)
        a, b = self.refine(lvl), other.refine(lvl)
        deg = max(self.degree, other.degree)
        pieces = {}
        for i in range(self.ring.p ** lvl):
            ca = a.pieces[i] + [self.ring.zero()] * (deg + 1 - len(a.pieces[i]))
            cb = b.pieces[i] + [self.ring.zero()] * (deg + 1 - len(b.pieces[i]))
            pieces[i] = [x + y for x, y in zip(ca, cb)]
        return LocPolyFn(self.ring, lvl, deg, pieces,
                         self.chi_twist or other.chi_twist)

    def scale(self, s):
        return LocPolyFn(self.ring, self.level, self.degree,
                         {i: [c * s for c in cs] for i, cs in self.pieces.items()},
                         self.chi_twist)

    def is_zero(self):
        return all(c.is_zero() for cs in self.pieces.values() for c in cs)

    def times_x(self):
        pieces = {i: [self.ring.zero()] + cs for i, cs in self.pieces.items()}
        return LocPolyFn(self.ring, self.level, self.degree + 1, pieces,
                         self.chi_twist)

    def to_json(self):
        return {
            "level": self.level,
            "degree": self.degree,
            "chi_twist": self.chi_twist,
            "pieces": {str(i): [c.to_json() for c in cs]
                       for i, cs in sorted(self.pieces.items())},
        }


# -- the four dictionary arrows ----------------------------------------

def amice(mu: Distribution) -> RobbaElement:
    """A_mu = sum_n m_n T^n, a plus-part window element."""
    return RobbaElement(mu.ring, dict(enumerate(mu.moments)))


def amice_inverse(f: RobbaElement) -> Distribution:
    if f.lo < 0:
        raise WindowOverflowError("amice_inverse needs a plus part")
    n = f.hi
    return Distribution(f.ring, [f.coeffs.get(k, f.ring.zero())
                                 for k in range(n + 1)])


def colmez(f: RobbaElement) -> LocPolyFn:
    """phi_f(x) = sum_{n>=0} a_{-n-1} binom(-x-1, n), exact polynomial in x.

    Vanishes on plus parts; the output carries the chi^{-1}-twist tag.
    """
    ring = f.ring
    depth = f.depth()
    if depth == 0:
        return LocPolyFn(ring, 0, 0, {0: [ring.zero()]}, chi_twist=True)
    # binom(-x-1, n) = prod_{i=0}^{n-1} (-x-1-i) / n!  as poly in x
    coeffs = [ring.zero()] * depth
    poly = [Fraction(1)]  # running binom(-x-1, n)
    for n in range(depth):
        a = f.coeffs.get(-n - 1)
        if a is not None:
            for k, c in enumerate(poly):
                coeffs[k] = coeffs[k] + a * c
        # multiply poly by (-x - 1 - n)/(n+1)
        new = [Fraction(0)] * (len(poly) + 1)
        for k, c in enumerate(poly):
            new[k] += c * Fraction(-1 - n, n + 1)
            new[k + 1] += c * Fraction(-1, n + 1)
        poly = new
    return LocPolyFn(ring, 0, depth - 1, {0: coeffs}, chi_twist=True)


def pair(mu: Distribution, f: RobbaElement) -> CoeffElement:
    """res_0(sigma_{-1}(A_mu) f dT/(1+T)); equals the moment-side integral."""
    a_mu = amice(mu)
    depth = f.depth()
    cap = max(2 * depth + 4, 8)
    twisted = rb_sigma(a_mu, -1, cap=cap)
    prod = rb_mul(twisted, f)
    return rb_res0_dt(prod)


def pair_moments(mu: Distribution, f: RobbaElement) -> CoeffElement:
    """Independent route: integrate phi_f against mu via the moments."""
    phi_f = colmez(f)
    return mu.integrate_poly(phi_f.pieces[0])


def psi_fn(phi: LocPolyFn) -> LocPolyFn:
    """(psi phi)(x) = phi(p x); drops the level by one."""
    ring = phi.ring
    p = ring.p
    new_level = max(phi.level - 1, 0)
    pieces = {}
    for j in range(p ** new_level):
        src = phi.pieces[(p * j) % (p ** phi.level)] if phi.level else phi.pieces[0]
        pieces[j] = [c * Fraction(p) ** k for k, c in enumerate(src)]
    return LocPolyFn(ring, new_level, phi.degree, pieces, phi.chi_twist)


def indicator(ring, i, level) -> LocPolyFn:
    """1_{i + p^level Zp} as a LocPolyFn."""
    return LocPolyFn(ring, level, 0, {i % ring.p ** level: [ring.one()]})
