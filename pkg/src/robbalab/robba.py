"""Truncated Laurent-series engine for R_A, R_A^+, R_A^- and its operators.

Elements are finite-window Laurent series sum a_n T^n with CoeffElement
coefficients.  Coefficients below the support are exactly zero (finite
principal part); when ``known_hi`` is an integer the coefficients above it
are *unknown* (the element is a truncation of an infinite series), never
silently zero.  Operations propagate the trusted window and raise instead
of guessing.

Exactness notes.  phi, sigma_a (integer a >= 1), psi, partial, Res and the
binomial-basis conversions are exact on exact inputs with the following
caveat: phi, sigma and Res of an element with negative powers produce
honestly infinite ascending series, returned truncated at ``cap`` with all
retained coefficients exact.  psi is exact on every exact finite-window
element through depth reduction by f = phi(T^{-q}) * (f * phi(T)^q).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .coefficients import INF, CoeffElement, CoeffRing, PAdic
from .errors import (
    PrecisionError,
    RingMismatchError,
    RobbaLabError,
    WindowOverflowError,
)

DEFAULT_CAP = 224
MAX_ABS_INDEX = 100000


def _binomial(alpha, k: int):
    """binom(alpha, k) for alpha a Fraction, PAdic or CoeffElement."""
    if isinstance(alpha, (int, Fraction)):
        out = Fraction(1)
        for i in range(k):
            out *= Fraction(alpha) - i
        return out / math.factorial(k)
    out = None
    for i in range(k):
        factor = alpha - i
        out = factor if out is None else out * factor
    if out is None:
        if isinstance(alpha, PAdic):
            return PAdic.one(alpha.p)
        return alpha.ring.one()
    return out * Fraction(1, math.factorial(k))


class RobbaElement:
    """A window of a Laurent series over ``ring``.

    ``coeffs`` maps exponents to CoeffElement; ``known_hi`` is None when the
    series is exactly the stored Laurent polynomial and an integer H when
    coefficients above H are unknown.
    """

    __slots__ = ("ring", "coeffs", "known_hi")

    def __init__(self, ring: CoeffRing, coeffs=None, known_hi=None):
        self.ring = ring
        self.coeffs = {}
        if coeffs:
            for n, c in coeffs.items():
                if not isinstance(c, CoeffElement):
                    c = ring(c)
                if not c.is_exact_zero():
                    self.coeffs[n] = c
        self.known_hi = known_hi
        if self.coeffs:
            lo, hi = min(self.coeffs), max(self.coeffs)
            if lo < -MAX_ABS_INDEX or hi > MAX_ABS_INDEX:
                raise WindowOverflowError("window exceeds the hard index cap")
        if known_hi is not None:
            self.coeffs = {n: c for n, c in self.coeffs.items() if n <= known_hi}

    # -- basics ----------------------------------------------------------
    @property
    def lo(self):
        return min(self.coeffs) if self.coeffs else 0

    @property
    def hi(self):
        return max(self.coeffs) if self.coeffs else 0

    @property
    def is_exact(self):
        return self.known_hi is None

    def depth(self):
        """Number of strictly negative exponents in the support."""
        return max(0, -self.lo)

    def coeff(self, n):
        if self.known_hi is not None and n > self.known_hi:
            raise PrecisionError(f"coefficient {n} outside trusted window")
        return self.coeffs.get(n, self.ring.zero())

    def is_plus(self):
        return self.lo >= 0 or not self.coeffs

    def copy(self, known_hi="same"):
        kh = self.known_hi if known_hi == "same" else known_hi
        return RobbaElement(self.ring, dict(self.coeffs), kh)

    def __repr__(self):
        if not self.coeffs:
            return "0" + ("" if self.is_exact else f" (+O(T^{self.known_hi + 1}))")
        parts = []
        for n in sorted(self.coeffs)[:8]:
            parts.append(f"({self.coeffs[n]})*T^{n}")
        s = " + ".join(parts)
        if len(self.coeffs) > 8:
            s += " + ..."
        if not self.is_exact:
            s += f" + O(T^{self.known_hi + 1})"
        return s

    def to_json(self):
        return {
            "window": [self.lo, self.hi],
            "known_hi": self.known_hi,
            "coeffs": {str(n): c.to_json() for n, c in sorted(self.coeffs.items())},
        }

    @staticmethod
    def dumps(f):
        return json.dumps(f.to_json())


def zero(ring):
    return RobbaElement(ring)


def one(ring):
    return RobbaElement(ring, {0: ring.one()})


def monomial(ring, n, c=1):
    return RobbaElement(ring, {n: ring(c) if not isinstance(c, CoeffElement) else c})


def _merge_trust(*khs):
    vals = [k for k in khs if k is not None]
    return min(vals) if vals else None


def rb_add(f: RobbaElement, g: RobbaElement) -> RobbaElement:
    if f.ring != g.ring:
        raise RingMismatchError("robba elements over different rings")
    kh = _merge_trust(f.known_hi, g.known_hi)
    out = dict(f.coeffs)
    for n, c in g.coeffs.items():
        out[n] = out[n] + c if n in out else c
    return RobbaElement(f.ring, out, kh)


def rb_neg(f):
    return RobbaElement(f.ring, {n: -c for n, c in f.coeffs.items()}, f.known_hi)


def rb_sub(f, g):
    return rb_add(f, rb_neg(g))


def rb_scale(f, s):
    return RobbaElement(f.ring, {n: c * s for n, c in f.coeffs.items()}, f.known_hi)


def rb_mul(f: RobbaElement, g: RobbaElement) -> RobbaElement:
    if f.ring != g.ring:
        raise RingMismatchError("robba elements over different rings")
    kh = None
    if f.known_hi is not None:
        kh = f.known_hi + g.lo
    if g.known_hi is not None:
        kh2 = g.known_hi + f.lo
        kh = kh2 if kh is None else min(kh, kh2)
    out = {}
    for n1, c1 in f.coeffs.items():
        for n2, c2 in g.coeffs.items():
            n = n1 + n2
            if kh is not None and n > kh:
                continue
            prod = c1 * c2
            out[n] = out[n] + prod if n in out else prod
    return RobbaElement(f.ring, out, kh)


def rb_pow(f, k: int):
    if k < 0:
        raise WindowOverflowError("negative powers need explicit inversion")
    out = one(f.ring)
    base = f
    while k:
        if k & 1:
            out = rb_mul(out, base)
        base_needed = k >> 1
        if base_needed:
            base = rb_mul(base, base)
        k >>= 1
    return out


def rb_truncate(f: RobbaElement, cap: int) -> RobbaElement:
    """Forget coefficients above cap, recording the truncation honestly."""
    if f.is_exact and f.hi <= cap:
        return f
    kh = cap if f.known_hi is None else min(f.known_hi, cap)
    return RobbaElement(f.ring, {n: c for n, c in f.coeffs.items() if n <= kh},
                        kh)


def _series_inverse(f: RobbaElement, cap: int) -> RobbaElement:
    """Inverse of a series with unit constant term, truncated at cap."""
    c0 = f.coeff(0)
    if f.lo < 0:
        raise WindowOverflowError("series inverse needs a plus part")
    inv0 = c0.inverse()
    out = {0: inv0}
    for n in range(1, cap + 1):
        acc = f.ring.zero()
        for k in range(1, min(n, f.hi) + 1):
            ck = f.coeffs.get(k)
            if ck is None:
                continue
            if (n - k) in out:
                acc = acc + ck * out[n - k]
        if not acc.is_exact_zero():
            out[n] = -inv0 * acc
    kh = _merge_trust(cap, f.known_hi)
    return RobbaElement(f.ring, out, kh)


_U_POWER_CACHE = {}


def u_power_series(ring, alpha, cap: int) -> RobbaElement:
    """(1+T)^alpha truncated at cap; exact polynomial for integer alpha >= 0."""
    if isinstance(alpha, (int, Fraction)) and Fraction(alpha).denominator == 1 \
            and alpha >= 0:
        a = int(alpha)
        key = (ring, a, None)
        if key not in _U_POWER_CACHE:
            coeffs = {k: ring(_binomial(a, k)) for k in range(a + 1)}
            _U_POWER_CACHE[key] = RobbaElement(ring, coeffs)
        return _U_POWER_CACHE[key]
    key = None
    if isinstance(alpha, (int, Fraction)):
        key = (ring, Fraction(alpha), cap)
        if key in _U_POWER_CACHE:
            return _U_POWER_CACHE[key]
    coeffs = {}
    b = Fraction(1) if isinstance(alpha, (int, Fraction)) else None
    if b is not None:
        # incremental binomials: binom(a, k) = binom(a, k-1) (a-k+1)/k
        a = Fraction(alpha)
        for k in range(cap + 1):
            if k:
                b = b * (a - (k - 1)) / k
            coeffs[k] = ring(b)
    else:
        for k in range(cap + 1):
            v = _binomial(alpha, k)
            coeffs[k] = ring(v) if not isinstance(v, CoeffElement) else v
    out = RobbaElement(ring, coeffs, known_hi=cap)
    if key is not None:
        _U_POWER_CACHE[key] = out
    return out


def rb_u_mult(f: RobbaElement, alpha, cap=None) -> RobbaElement:
    """Multiplication by (1+T)^alpha."""
    cap = DEFAULT_CAP if cap is None else cap
    series = u_power_series(f.ring, alpha, max(0, cap - f.lo))
    return rb_mul(f, series)


# -- phi and sigma -----------------------------------------------------

_PHI_T_CACHE = {}


def phi_T_poly(ring, n=1):
    """phi^n(T) = (1+T)^(p^n) - 1 as an exact polynomial."""
    key = (ring, n)
    if key not in _PHI_T_CACHE:
        p = ring.p
        s = u_power_series(ring, p ** n, p ** n)
        _PHI_T_CACHE[key] = rb_sub(s, one(ring))
    return _PHI_T_CACHE[key]


def rb_phi(f: RobbaElement, cap=None, iterations=1, out_cap=None) -> RobbaElement:
    """Substitution T -> (1+T)^p - 1, applied ``iterations`` times.

    ``out_cap`` truncates the result (and every intermediate power) at that
    index; legitimate because plus-supported products are degree-triangular.
    """
    cap = DEFAULT_CAP if cap is None else cap
    ring = f.ring
    base = phi_T_poly(ring, iterations)
    out = zero(ring)
    pos_powers = {0: one(ring)}
    d = f.depth()
    inv = None
    if d:
        # phi^n(T)^{-1} = (p^n T)^{-1} V^{-1} with V a unit series
        p_n = ring.p ** iterations
        v = rb_scale(RobbaElement(ring, {k - 1: c for k, c in base.coeffs.items()}),
                     Fraction(1, p_n))
        v_inv = _series_inverse(v, cap + d + 1)
        inv_base = rb_mul(RobbaElement(ring, {-1: ring(Fraction(1, p_n))}), v_inv)
        inv = {-1: inv_base}
        for k in range(2, d + 1):
            inv[-k] = rb_mul(inv[-k + 1], inv_base)
    kh_in = f.known_hi
    for n in sorted(f.coeffs):
        c = f.coeffs[n]
        if n >= 0:
            if n not in pos_powers:
                q = max(k for k in pos_powers if k <= n)
                term = pos_powers[q]
                for _ in range(n - q):
                    term = rb_mul(term, base)
                    if out_cap is not None:
                        term = rb_truncate(term, out_cap)
                    pos_powers[q + 1] = term
                    q += 1
            term = pos_powers[n]
        else:
            term = inv[n]
            if out_cap is not None:
                term = rb_truncate(term, out_cap)
        out = rb_add(out, rb_scale(term, c))
    kh = out.known_hi
    if kh_in is not None:
        kh = _merge_trust(kh, kh_in)  # unknown input tail only affects n > kh_in
    if out_cap is not None:
        return rb_truncate(RobbaElement(f.ring, out.coeffs, kh), out_cap)
    return RobbaElement(f.ring, out.coeffs, kh)


def rb_sigma(f: RobbaElement, a, cap=None) -> RobbaElement:
    """Substitution T -> (1+T)^a - 1 for a unit a (rational or p-adic)."""
    cap = DEFAULT_CAP if cap is None else cap
    ring = f.ring
    exact_pos_int = isinstance(a, (int, Fraction)) and Fraction(a).denominator == 1 \
        and a >= 1
    if exact_pos_int and int(a) == 1:
        return f
    d = f.depth()
    top = f.hi
    series_cap = cap + d + 1
    ua = u_power_series(ring, a, series_cap if not exact_pos_int else int(a))
    base = rb_sub(ua, one(ring))  # sigma_a(T), lowest term a*T
    out = zero(ring)
    pos_powers = {0: one(ring), 1: base}
    inv = None
    if d:
        v = RobbaElement(ring, {k - 1: c for k, c in base.coeffs.items()},
                         base.known_hi - 1 if base.known_hi is not None else None)
        a_inv = Fraction(a) ** -1 if isinstance(a, (int, Fraction)) else a.inverse()
        v = rb_scale(v, a_inv)
        v_inv = _series_inverse(v, series_cap)
        inv_base = rb_mul(RobbaElement(ring, {-1: ring(a_inv)
                                              if isinstance(a_inv, Fraction)
                                              else ring.from_coords(
                                                  [a_inv] + [0] * (ring.dim - 1))}),
                          v_inv)
        inv = {-1: inv_base}
        for k in range(2, d + 1):
            inv[-k] = rb_mul(inv[-k + 1], inv_base)
    for n in sorted(f.coeffs):
        c = f.coeffs[n]
        if n >= 0:
            while n not in pos_powers:
                q = max(pos_powers)
                pos_powers[q + 1] = rb_mul(pos_powers[q], base)
            term = pos_powers[n]
        else:
            term = inv[n]
        out = rb_add(out, rb_scale(term, c))
    kh = _merge_trust(out.known_hi, f.known_hi)
    if not exact_pos_int or d:
        kh = _merge_trust(kh, cap)
    return RobbaElement(ring, out.coeffs, kh)


# -- the binomial (Dirac) basis and psi --------------------------------

def to_u_coeffs(f: RobbaElement):
    """Write an exact plus-part element as sum c_n (1+T)^n; returns dict."""
    if not f.is_exact:
        raise PrecisionError("binomial-basis conversion needs an exact window")
    if f.lo < 0:
        raise WindowOverflowError("binomial-basis conversion needs a plus part")
    out = {}
    hi = f.hi
    for n in range(0, hi + 1):
        acc = f.ring.zero()
        for k in range(n, hi + 1):
            c = f.coeffs.get(k)
            if c is None:
                continue
            sign = 1 if (k - n) % 2 == 0 else -1
            acc = acc + c * (sign * math.comb(k, n))
        if not acc.is_exact_zero():
            out[n] = acc
    return out


def from_u_coeffs(ring, cu):
    """sum c_n (1+T)^n  ->  T-basis (exact polynomial), n >= 0 integers."""
    coeffs = {}
    for n, c in cu.items():
        for k in range(n + 1):
            term = c * math.comb(n, k)
            coeffs[k] = coeffs[k] + term if k in coeffs else term
    return RobbaElement(ring, coeffs)


def rb_psi(f: RobbaElement) -> RobbaElement:
    """The left inverse of phi; exact on exact finite windows."""
    if not f.is_exact:
        raise PrecisionError("psi needs an exact window (truncated tail would "
                             "contaminate every output coefficient)")
    ring = f.ring
    p = ring.p
    if not f.coeffs:
        return zero(ring)
    d = f.depth()
    if d:
        q = (d + p - 1) // p
        h = rb_mul(f, rb_pow(phi_T_poly(ring), q))
        psi_h = rb_psi(h)  # depth of h is d - q < d
        return rb_mul(RobbaElement(ring, {-q: ring.one()}), psi_h)
    cu = to_u_coeffs(f)
    kept = {n // p: c for n, c in cu.items() if n % p == 0}
    return from_u_coeffs(ring, kept)


def rb_restrict(a: int, n: int, f: RobbaElement, cap=None) -> RobbaElement:
    """Res_{a + p^n Zp}: idempotent projector onto the residue class.

    Exact on exact plus parts; with negative powers present the result is an
    infinite ascending series, truncated at ``cap`` with exact coefficients.
    """
    cap = DEFAULT_CAP if cap is None else cap
    ring = f.ring
    p = ring.p
    if not (0 <= a < p ** n):
        raise RobbaLabError("class representative out of range")
    if not f.is_exact:
        raise PrecisionError("Res needs an exact window")
    d = f.depth()
    if d:
        base = phi_T_poly(ring, n)
        q = d  # phi^n(T)^q has T-valuation q
        h = rb_mul(f, rb_pow(base, q))
        res_h = rb_restrict(a, n, h, cap=cap)
        inv = _series_inverse(
            rb_scale(RobbaElement(ring,
                                  {k - 1: c for k, c in base.coeffs.items()}),
                     Fraction(1, p ** n)), cap + q + 1)
        inv_q = rb_pow(inv, q)
        shift = RobbaElement(ring, {-q: ring(Fraction(1, p ** (n * q)))})
        return rb_mul(rb_mul(shift, inv_q), res_h)
    cu = to_u_coeffs(f)
    kept = {m: c for m, c in cu.items() if m % (p ** n) == a}
    return from_u_coeffs(ring, kept)


def rb_restrict_units(f: RobbaElement, cap=None) -> RobbaElement:
    """Res_{Zp^x} = id - Res_{p Zp} (level 1)."""
    return rb_sub(f, rb_restrict(0, 1, f, cap=cap))


# -- differential operators --------------------------------------------

def rb_partial(f: RobbaElement) -> RobbaElement:
    """partial = (1+T) d/dT ; exact, window-preserving up to one index."""
    out = {}
    for n, c in f.coeffs.items():
        for m, factor in ((n - 1, n), (n, n)):
            if factor == 0:
                continue
            term = c * factor
            out[m] = out[m] + term if m in out else term
    kh = f.known_hi if f.known_hi is None else f.known_hi - 1
    return RobbaElement(f.ring, out, kh)


def log_one_plus_T(ring, cap: int) -> RobbaElement:
    coeffs = {n: ring(Fraction((-1) ** (n + 1), n)) for n in range(1, cap + 1)}
    return RobbaElement(ring, coeffs, known_hi=cap)


def rb_nabla(f: RobbaElement, cap=None) -> RobbaElement:
    """nabla = t * partial with t = log(1+T), truncated at cap."""
    cap = DEFAULT_CAP if cap is None else cap
    t = log_one_plus_T(f.ring, max(1, cap - f.lo + 1))
    return rb_mul(t, rb_partial(f))


def rb_res0(f: RobbaElement) -> CoeffElement:
    """res_0(f dT) = a_{-1}."""
    return f.coeff(-1)


def rb_res0_dt(f: RobbaElement) -> CoeffElement:
    """res_0(f dT/(1+T)) = res_0(f dt): coefficient of T^{-1} in f/(1+T)."""
    if f.lo >= 0:
        return f.ring.zero()
    acc = f.ring.zero()
    # (1+T)^{-1} = sum (-1)^j T^j ; need coefficient of T^{-1} of product
    for k, c in f.coeffs.items():
        if k <= -1:
            sign = 1 if (-1 - k) % 2 == 0 else -1
            acc = acc + c * sign
    return acc


def rb_split(f: RobbaElement):
    """(plus part, minus part); exact decomposition of the window."""
    plus = {n: c for n, c in f.coeffs.items() if n >= 0}
    minus = {n: c for n, c in f.coeffs.items() if n < 0}
    return (RobbaElement(f.ring, plus, f.known_hi),
            RobbaElement(f.ring, minus, None))


# -- comparison / valuations -------------------------------------------

def defect_valuation(f: RobbaElement, g=None):
    """min coefficient valuation of f - g over the common trusted window.

    +inf when the difference is certified exactly zero there.  Coefficients
    that are inexact zeros contribute their certified absolute precision.
    """
    diff = rb_sub(f, g) if g is not None else f
    best = INF
    for n, c in diff.coeffs.items():
        v = c.valuation()
        best = min(best, v)
    return best


class AnnulusValuation:
    """v^[r,s] with r <= s interpreted as v_p(T)-bounds."""

    def __init__(self, r, s):
        r, s = Fraction(r), Fraction(s)
        if not (0 < r <= s):
            raise RobbaLabError("need 0 < r <= s")
        self.r = r
        self.s = s

    def of(self, f: RobbaElement):
        best = INF
        for k, c in f.coeffs.items():
            v = c.valuation()
            if v is INF:
                continue
            best = min(best, v + self.r * k, v + self.s * k)
        return best


def r_n(p: int, n: int) -> Fraction:
    """r_n = 1 / ((p-1) p^(n-1))."""
    return Fraction(1, (p - 1) * p ** (n - 1))
