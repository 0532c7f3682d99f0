"""Capped-precision p-adic scalars and the supported coefficient rings.

A scalar is either an exact rational (the fast path: characters x^k, matrix
entries of the finite modules, ...) or a capped-relative p-adic value
u * p^v + O(p^(v+P)).  Exactness is contagious downwards only: any operation
mixing an exact and an approximate operand produces an approximate result.

Three coefficient rings are supported: Qp itself, a finite extension
Qp[y]/(g) with g monic irreducible, and the dual numbers Qp[eps]/(eps^e).
Elements are coordinate vectors in the canonical basis.  p = 2 is rejected.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import NonUnitError, PrecisionError, RingMismatchError, RobbaLabError

INF = math.inf

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    i = 41
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def rational_valuation(x: Fraction, p: int):
    """p-adic valuation of a rational number; +inf for 0."""
    if x == 0:
        return INF
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class PAdic:
    """One p-adic scalar: exact Fraction, or (valuation, unit, rel. precision).

    ``unit == 0`` with ``exact is None`` encodes an inexact zero O(p^val):
    nothing is known below absolute precision ``val``.
    """

    __slots__ = ("p", "exact", "val", "unit", "prec")

    def __init__(self, p, exact=None, val=0, unit=0, prec=0):
        self.p = p
        self.exact = exact
        if exact is None:
            if unit:
                unit %= p ** prec
                if unit % p == 0 or prec <= 0:
                    raise PrecisionError("approximate unit must be prime to p")
            self.val = val
            self.unit = unit
            self.prec = prec if unit else 0
        else:
            self.val = self.unit = self.prec = 0

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rational(cls, p, x):
        return cls(p, exact=Fraction(x))

    @classmethod
    def zero(cls, p):
        return cls(p, exact=Fraction(0))

    @classmethod
    def one(cls, p):
        return cls(p, exact=Fraction(1))

    @classmethod
    def inexact_zero(cls, p, abs_prec):
        return cls(p, exact=None, val=abs_prec, unit=0, prec=0)

    @classmethod
    def approx_from_rational(cls, p, x, abs_prec):
        """Cap an exact rational at absolute precision ``abs_prec``."""
        x = Fraction(x)
        if x == 0:
            return cls.inexact_zero(p, abs_prec)
        v = rational_valuation(x, p)
        if v >= abs_prec:
            return cls.inexact_zero(p, abs_prec)
        rel = abs_prec - v
        u = x / Fraction(p) ** v
        m = p ** rel
        num = u.numerator % m
        den_inv = pow(u.denominator, -1, m)
        return cls(p, exact=None, val=v, unit=(num * den_inv) % m, prec=rel)

    # -- predicates ----------------------------------------------------
    @property
    def is_exact(self):
        return self.exact is not None

    def is_zero(self):
        """True when the value is indistinguishable from zero."""
        if self.is_exact:
            return self.exact == 0
        return self.unit == 0

    def is_exact_zero(self):
        return self.is_exact and self.exact == 0

    def abs_prec(self):
        if self.is_exact:
            return INF
        if self.unit == 0:
            return self.val
        return self.val + self.prec

    def valuation(self):
        """Valuation; for an inexact zero this is only a lower bound."""
        if self.is_exact:
            return rational_valuation(self.exact, self.p)
        return self.val

    # -- arithmetic ----------------------------------------------------
    def _as_approx(self, abs_prec):
        if self.is_exact:
            return PAdic.approx_from_rational(self.p, self.exact, abs_prec)
        return self

    def __add__(self, other):
        other = self._coerce(other)
        p = self.p
        if self.is_exact and other.is_exact:
            return PAdic(p, exact=self.exact + other.exact)
        a_prec = min(self.abs_prec(), other.abs_prec())
        a, b = self._as_approx(a_prec), other._as_approx(a_prec)
        vmin = min(a.val if not a.is_zero() else a_prec,
                   b.val if not b.is_zero() else a_prec)
        if vmin >= a_prec:
            return PAdic.inexact_zero(p, a_prec)
        m = p ** (a_prec - vmin)
        rep = 0
        if not a.is_zero():
            rep += a.unit * p ** (a.val - vmin)
        if not b.is_zero():
            rep += b.unit * p ** (b.val - vmin)
        rep %= m
        if rep == 0:
            return PAdic.inexact_zero(p, a_prec)
        extra = 0
        while rep % p == 0:
            rep //= p
            extra += 1
        val = vmin + extra
        return PAdic(p, exact=None, val=val, unit=rep, prec=a_prec - val)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return PAdic(self.p, exact=-self.exact)
        if self.unit == 0:
            return self
        return PAdic(self.p, exact=None, val=self.val,
                     unit=(-self.unit) % self.p ** self.prec, prec=self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        p = self.p
        if self.is_exact and other.is_exact:
            return PAdic(p, exact=self.exact * other.exact)
        if self.is_exact_zero() or other.is_exact_zero():
            return PAdic.zero(p)
        if self.is_zero() or other.is_zero():
            va = self.valuation() if not self.is_zero() else self.abs_prec()
            vb = other.valuation() if not other.is_zero() else other.abs_prec()
            return PAdic.inexact_zero(p, va + vb)
        rel = min(self.prec if not self.is_exact else INF,
                  other.prec if not other.is_exact else INF)
        rel = int(rel)
        a = self._as_approx(self.valuation() + rel)
        b = other._as_approx(other.valuation() + rel)
        m = p ** rel
        return PAdic(p, exact=None, val=a.val + b.val,
                     unit=(a.unit * b.unit) % m, prec=rel)

    __rmul__ = __mul__

    def inverse(self):
        p = self.p
        if self.is_exact:
            if self.exact == 0:
                raise NonUnitError("division by exact zero")
            return PAdic(p, exact=1 / self.exact)
        if self.unit == 0:
            raise NonUnitError("division by a value indistinguishable from 0")
        m = p ** self.prec
        return PAdic(p, exact=None, val=-self.val,
                     unit=pow(self.unit, -1, m), prec=self.prec)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = PAdic.one(self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def _coerce(self, other):
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise RingMismatchError("different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PAdic(self.p, exact=Fraction(other))
        return NotImplemented

    # -- comparisons / io ----------------------------------------------
    def eq_certified(self, other):
        """True when (self - other) is indistinguishable from zero."""
        return (self - self._coerce(other)).is_zero()

    def __repr__(self):
        if self.is_exact:
            return f"{self.exact}"
        if self.unit == 0:
            return f"O({self.p}^{self.val})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.val + self.prec})"

    def to_json(self):
        if self.is_exact:
            return {"exact": [self.exact.numerator, self.exact.denominator]}
        return {"val": self.val, "unit": self.unit, "prec": self.prec}


# -- transcendental helpers (capped precision) -------------------------

def padic_log(x: PAdic, prec: int) -> PAdic:
    """log of x with x = 1 mod p, via the usual series, to ~prec digits."""
    p = x.p
    z = x - 1
    if z.is_exact_zero():
        return PAdic.zero(p)
    vz = z.valuation()
    if vz < 1:
        raise PrecisionError("padic_log needs x = 1 mod p")
    acc = PAdic.inexact_zero(p, prec + 2)
    zn = PAdic.one(p)
    n = 1
    while (n * vz - rational_valuation(Fraction(n), p)) < prec + 2:
        zn = zn * z
        term = zn * Fraction((-1) ** (n + 1), n)
        acc = acc + term
        n += 1
    return acc


def padic_exp(x: PAdic, prec: int) -> PAdic:
    """exp of x with v(x) >= 1 (p odd), to ~prec digits."""
    p = x.p
    if x.is_exact_zero():
        return PAdic.one(p)
    vx = x.valuation()
    if vx < 1:
        raise PrecisionError("padic_exp needs v(x) >= 1")
    acc = PAdic.one(p) + PAdic.inexact_zero(p, prec + 2)
    xn = PAdic.one(p)
    fact = Fraction(1)
    n = 1
    while True:
        v_term = n * vx - rational_valuation(Fraction(math.factorial(n)), p)
        if v_term >= prec + 2:
            break
        xn = xn * x
        fact *= n
        acc = acc + xn * (1 / fact)
        n += 1
    return acc


def teichmuller(u, p: int, prec: int) -> PAdic:
    """Teichmuller representative of the unit u, to prec digits."""
    u = Fraction(u)
    if rational_valuation(u, p) != 0:
        raise NonUnitError("teichmuller needs a unit")
    m = p ** prec
    t = (u.numerator * pow(u.denominator, -1, m)) % m
    for _ in range(prec + 1):
        t = pow(t, p, m)
    return PAdic(p, exact=None, val=0, unit=t, prec=prec)


# -- coefficient rings ------------------------------------------------

class CoeffRing:
    """Descriptor of the coefficient ring A.

    variant: "Qp" | "ext" | "dual".  For "ext", ``modulus`` holds the monic
    defining polynomial as a list of Fractions [c0, ..., c_{d-1}, 1].  For
    "dual", ``e`` is the nilpotence exponent of eps.
    """

    def __init__(self, p, prec=20, variant="Qp", modulus=None, e=None):
        if not _is_prime(p):
            raise RobbaLabError(f"{p} is not prime")
        if p == 2:
            raise RobbaLabError("p = 2 is excluded (odd p assumed throughout)")
        self.p = p
        self.prec = prec
        self.variant = variant
        self.modulus = None
        self.e = None
        if variant == "Qp":
            self.dim = 1
        elif variant == "ext":
            mod = [Fraction(c) for c in modulus]
            if mod[-1] != 1:
                raise RobbaLabError("defining polynomial must be monic")
            _check_irreducible(mod, p)
            self.modulus = mod
            self.dim = len(mod) - 1
        elif variant == "dual":
            if e is None or e < 2:
                raise RobbaLabError("dual numbers need nilpotence exponent e >= 2")
            self.e = e
            self.dim = e
        else:
            raise RobbaLabError(f"unknown ring variant {variant!r}")

    def __eq__(self, other):
        return (isinstance(other, CoeffRing)
                and (self.p, self.variant, self.modulus, self.e)
                == (other.p, other.variant, other.modulus, other.e))

    def __hash__(self):
        mod = tuple(self.modulus) if self.modulus else None
        return hash((self.p, self.variant, mod, self.e))

    def __repr__(self):
        if self.variant == "Qp":
            return f"Q_{self.p}"
        if self.variant == "ext":
            return f"Q_{self.p}[y]/(deg {self.dim})"
        return f"Q_{self.p}[eps]/(eps^{self.e})"

    # -- element constructors ------------------------------------------
    def __call__(self, x):
        """Exact element from a rational (placed in the first coordinate)."""
        coords = [PAdic.from_rational(self.p, x)]
        coords += [PAdic.zero(self.p) for _ in range(self.dim - 1)]
        return CoeffElement(self, coords)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def from_coords(self, coords):
        out = []
        for c in coords:
            if isinstance(c, PAdic):
                out.append(c)
            else:
                out.append(PAdic.from_rational(self.p, c))
        if len(out) != self.dim:
            raise RingMismatchError("coordinate vector has wrong length")
        return CoeffElement(self, out)

    def gen(self):
        """y for an extension, eps for dual numbers."""
        if self.dim == 1:
            raise RobbaLabError("base field has no extra generator")
        coords = [Fraction(0)] * self.dim
        coords[1] = Fraction(1)
        return self.from_coords(coords)

    @property
    def reduced(self):
        """The ring modulo its nilradical (identity except for dual numbers)."""
        if self.variant == "dual":
            return CoeffRing(self.p, self.prec, "Qp")
        return self


def _check_irreducible(mod, p):
    """Certify irreducibility of a monic polynomial over Qp or raise.

    Handles Eisenstein polynomials of any degree and root-testing for
    degrees 2 and 3 (where irreducibility = no Qp-root).  Anything else is
    rejected as unverified rather than silently accepted.
    """
    deg = len(mod) - 1
    if deg < 1:
        raise RobbaLabError("degree must be >= 1")
    if deg == 1:
        raise RobbaLabError("degree-1 modulus defines the base field; use Qp")
    vals = [rational_valuation(c, p) for c in mod[:-1]]
    if all(v >= 1 for v in vals) and vals[0] == 1:
        return  # Eisenstein
    if deg > 3:
        raise RobbaLabError(
            "cannot certify irreducibility for degree > 3 non-Eisenstein modulus")
    if any(v < 0 for v in vals):
        raise RobbaLabError("modulus must have p-integral coefficients")
    # deg 2 or 3: irreducible over Qp iff no root in Qp.  A root with
    # negative valuation is impossible (monic, integral coefficients), so
    # Hensel-search integral roots.
    for r in range(p):
        f = sum(Fraction(c) * r ** i for i, c in enumerate(mod))
        fp = sum(Fraction(i) * c * r ** (i - 1) for i, c in enumerate(mod) if i)
        if rational_valuation(f, p) >= 1:
            if rational_valuation(fp, p) == 0:
                raise RobbaLabError("modulus has a Qp-root (Hensel), reducible")
            # ramified ambiguity: refine a few levels before giving up
            if _has_root_mod_pk(mod, p, r, 6):
                raise RobbaLabError(
                    "modulus root-finding ambiguous at configured depth")
    return


def _has_root_mod_pk(mod, p, r0, depth):
    candidates = [r0]
    for k in range(2, depth + 2):
        m = p ** k
        new = []
        for r in candidates:
            for lift in range(p):
                rr = r + lift * p ** (k - 1)
                f = sum(c * rr ** i for i, c in enumerate(mod))
                if f.denominator % p != 0 and f.numerator % m == 0:
                    new.append(rr)
        if not new:
            return False
        candidates = new
    return True


class CoeffElement:
    """Element of A as a coordinate vector in the canonical basis."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        self.ring = ring
        self.coords = list(coords)

    # -- helpers ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, CoeffElement):
            if isinstance(other, (int, Fraction)):
                return self.ring(other)
            if isinstance(other, PAdic):
                out = [other] + [PAdic.zero(self.ring.p)] * (self.ring.dim - 1)
                return CoeffElement(self.ring, out)
            raise RingMismatchError(f"cannot coerce {other!r}")
        if other.ring != self.ring:
            raise RingMismatchError("elements of different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CoeffElement(self.ring,
                            [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CoeffElement(self.ring, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PAdic)) and not isinstance(other, CoeffElement):
            if isinstance(other, PAdic):
                return CoeffElement(self.ring, [c * other for c in self.coords])
            return CoeffElement(self.ring,
                                [c * Fraction(other) for c in self.coords])
        other = self._check(other)
        ring = self.ring
        n = ring.dim
        if n == 1:
            return CoeffElement(ring, [self.coords[0] * other.coords[0]])
        prod = [PAdic.zero(ring.p) for _ in range(2 * n - 1)]
        for i, a in enumerate(self.coords):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coords):
                if b.is_exact_zero():
                    continue
                prod[i + j] = prod[i + j] + a * b
        if ring.variant == "dual":
            return CoeffElement(ring, prod[:n])
        # reduce modulo the monic modulus
        mod = ring.modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c.is_exact_zero():
                continue
            for i in range(n):
                prod[k - n + i] = prod[k - n + i] - c * mod[i]
            prod[k] = PAdic.zero(ring.p)
        return CoeffElement(ring, prod[:n])

    __rmul__ = __mul__

    def inverse(self):
        ring = self.ring
        if ring.variant == "Qp":
            return CoeffElement(ring, [self.coords[0].inverse()])
        if ring.variant == "dual":
            c0 = self.coords[0]
            if c0.is_zero():
                k = next((i for i, c in enumerate(self.coords) if not c.is_zero()),
                         None)
                ann = f"(eps^{ring.e - k})" if k is not None else "(1)"
                raise NonUnitError("eps-divisible element is not invertible",
                                   annihilator=ann)
            inv0 = c0.inverse()
            # (c0 + n)^-1 = c0^-1 * sum (-n/c0)^k, finite by nilpotence
            n_part = CoeffElement(ring, [PAdic.zero(ring.p)] + [
                c for c in self.coords[1:]])
            ratio = n_part * inv0
            acc = ring.one()
            power = ring.one()
            sign = 1
            for _ in range(1, ring.e):
                power = power * ratio
                sign = -sign
                acc = acc + power * Fraction(sign)
            return acc * inv0
        # finite extension: solve (self * x) = 1 by linear algebra over the
        # regular representation; entries stay exact on the exact path.
        n = ring.dim
        cols = []
        basis = [ring.from_coords([Fraction(int(i == j)) for i in range(n)])
                 for j in range(n)]
        for b in basis:
            cols.append((self * b).coords)
        # solve sum_j x_j cols[j] = e0
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        rhs = [ring.one().coords[0]] + [PAdic.zero(ring.p)] * (n - 1)
        sol = _solve_square(mat, rhs, ring.p)
        if sol is None:
            raise NonUnitError("element is not invertible in the extension")
        return CoeffElement(ring, sol)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- structure -------------------------------------------------------
    def valuation(self):
        """min over coordinates; +inf for a (certified) exact zero."""
        vals = [c.valuation() for c in self.coords]
        return min(vals)

    def coordinate_valuations(self):
        return [c.valuation() for c in self.coords]

    def is_zero(self):
        return all(c.is_zero() for c in self.coords)

    def is_exact_zero(self):
        return all(c.is_exact_zero() for c in self.coords)

    def is_exact(self):
        return all(c.is_exact for c in self.coords)

    def is_unit(self):
        ring = self.ring
        if ring.variant == "dual":
            return not self.coords[0].is_zero()
        if ring.variant == "Qp":
            return not self.coords[0].is_zero()
        try:
            self.inverse()
            return True
        except NonUnitError:
            return False

    def residue_reduce(self):
        """Image in A modulo the nilradical (first coordinate for duals)."""
        ring = self.ring
        if ring.variant == "dual":
            return CoeffElement(ring.reduced, [self.coords[0]])
        return self

    def as_fraction(self):
        """The exact rational value of a base-coordinate-only exact element."""
        if any(not c.is_exact_zero() for c in self.coords[1:]):
            raise PrecisionError("element is not scalar")
        c = self.coords[0]
        if not c.is_exact:
            raise PrecisionError("element is not exact")
        return c.exact

    def eq_certified(self, other):
        return (self - self._check(other)).is_zero()

    def __repr__(self):
        names = {"dual": "eps", "ext": "y"}
        if self.ring.dim == 1:
            return repr(self.coords[0])
        g = names[self.ring.variant]
        parts = []
        for i, c in enumerate(self.coords):
            if c.is_exact_zero():
                continue
            head = repr(c)
            parts.append(head if i == 0 else f"({head})*{g}^{i}")
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return [c.to_json() for c in self.coords]


def _solve_square(mat, rhs, p):
    """Solve a small square system over PAdic entries (exact or capped)."""
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


# -- module-level operation wrappers (the spec's operation surface) ----

def scalar_add(a: CoeffElement, b: CoeffElement) -> CoeffElement:
    return a + b


def scalar_mul(a: CoeffElement, b: CoeffElement) -> CoeffElement:
    return a * b


def scalar_inv(a: CoeffElement) -> CoeffElement:
    return a.inverse()


def scalar_valuation(a: CoeffElement):
    return a.valuation()


def residue_reduce(a: CoeffElement) -> CoeffElement:
    return a.residue_reduce()
