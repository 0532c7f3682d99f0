"""Character twists m_delta, the involution w_* and iota on psi = 0 elements.

Two synchronized models are used.

Window model: the truncated-series engine of :mod:`robbalab.robba`; m_delta
is implemented there by the convergent double series
    sum_i sum_j binom(kappa, j) delta(i) i^{-j} (1+T)^i p^{Nj} phi^N(d^j f_i),
with f_i = psi^N((1+T)^{-i} f) the level-N class components.

Dirac model: finite A-linear combinations of c * t^m * u^alpha, where
u^alpha = (1+T)^alpha is the Amice transform of the Dirac mass at
alpha in Zp (alpha rational, p-integral) and t^m marks the m-th derivative
of point evaluation.  Every operator in sight is exact here:
    sigma_a:  a^m t^m u^{a alpha}        phi: p^m t^m u^{p alpha}
    psi:      p^{-m} t^m u^{alpha/p} when p | alpha, else 0
    partial:  m t^{m-1} u^alpha + alpha t^m u^alpha
    m_delta:  sum_r C(m,r) delta^{(r)}(alpha) t^{m-r} u^alpha
    w_*:      chain rule through x -> 1/x (unit alpha only).
w_* is computed on the Dirac model and transported; the window model only
ever expands the result.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .characters import Character
from .coefficients import INF, CoeffElement, CoeffRing, rational_valuation
from .errors import (
    ConvergenceError,
    PrecisionError,
    RingMismatchError,
    RobbaLabError,
)
from .robba import (
    DEFAULT_CAP,
    RobbaElement,
    _binomial,
    from_u_coeffs,
    log_one_plus_T,
    phi_T_poly,
    rb_add,
    rb_mul,
    rb_partial,
    rb_phi,
    rb_pow,
    rb_psi,
    rb_scale,
    rb_sub,
    to_u_coeffs,
    u_power_series,
    zero,
)


def _frac_val(x: Fraction, p: int):
    return rational_valuation(Fraction(x), p)


class DiracCombo:
    """Finite sum of c * t^m * u^alpha with alpha in Zp rational."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoeffRing, terms=None):
        self.ring = ring
        self.terms = {}
        if terms:
            for (m, alpha), c in terms.items():
                alpha = Fraction(alpha)
                if _frac_val(alpha, ring.p) < 0:
                    raise RobbaLabError("Dirac exponent must lie in Zp")
                if not isinstance(c, CoeffElement):
                    c = ring(c)
                if not c.is_exact_zero():
                    key = (m, alpha)
                    self.terms[key] = self.terms.get(key, ring.zero()) + c

    @classmethod
    def dirac(cls, ring, alpha, coeff=1):
        return cls(ring, {(0, Fraction(alpha)): coeff})

    def __add__(self, other):
        if self.ring != other.ring:
            raise RingMismatchError("combos over different rings")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return DiracCombo(self.ring, out)

    def scale(self, s):
        return DiracCombo(self.ring, {k: c * s for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self):
        return all(c.is_zero() for c in self.terms.values())

    # -- operators -------------------------------------------------------
    def sigma(self, a):
        a = Fraction(a)
        out = {}
        for (m, alpha), c in self.terms.items():
            key = (m, a * alpha)
            val = c * a ** m
            out[key] = out.get(key, self.ring.zero()) + val
        return DiracCombo(self.ring, out)

    def phi(self):
        p = self.ring.p
        return DiracCombo(self.ring, {(m, p * alpha): c * Fraction(p) ** m
                                      for (m, alpha), c in self.terms.items()})

    def psi(self):
        p = self.ring.p
        out = {}
        for (m, alpha), c in self.terms.items():
            if _frac_val(alpha, p) >= 1:
                key = (m, alpha / p)
                out[key] = out.get(key, self.ring.zero()) + c * Fraction(1, p ** m)
        return DiracCombo(self.ring, out)

    def partial(self):
        out = {}
        for (m, alpha), c in self.terms.items():
            if m:
                key = (m - 1, alpha)
                out[key] = out.get(key, self.ring.zero()) + c * m
            key = (m, alpha)
            out[key] = out.get(key, self.ring.zero()) + c * alpha
        return DiracCombo(self.ring, out)

    def partial_inverse(self):
        """The unique X with partial(X) = self (exponents must be nonzero)."""
        out = {}
        for (m, alpha), c in self.terms.items():
            if alpha == 0:
                raise RobbaLabError("partial is not invertible at exponent 0")
            # X-part: sum_{r<=m} c_r t^r u^alpha with c_m = 1/alpha,
            # c_{r} = -(r+1) c_{r+1} / alpha
            coeffs = {m: Fraction(1, 1) / alpha}
            for r in range(m - 1, -1, -1):
                coeffs[r] = -(r + 1) * coeffs[r + 1] / alpha
            for r, q in coeffs.items():
                key = (r, alpha)
                out[key] = out.get(key, self.ring.zero()) + c * q
        return DiracCombo(self.ring, out)

    def nabla(self):
        out = {}
        for (m, alpha), c in self.terms.items():
            for key, q in (((m, alpha), Fraction(m)), ((m + 1, alpha), alpha)):
                if q:
                    out[key] = out.get(key, self.ring.zero()) + c * q
        return DiracCombo(self.ring, out)

    def u_mult(self, shift):
        shift = Fraction(shift)
        return DiracCombo(self.ring, {(m, alpha + shift): c
                                      for (m, alpha), c in self.terms.items()})

    def res_filter(self, a, n):
        """Res_{a + p^n Zp}: keep Dirac points in the class."""
        p = self.ring.p
        out = {}
        for (m, alpha), c in self.terms.items():
            if _frac_val(alpha - a, p) >= n:
                out[(m, alpha)] = c
        return DiracCombo(self.ring, out)

    def res_units(self):
        p = self.ring.p
        return DiracCombo(self.ring, {(m, alpha): c
                                      for (m, alpha), c in self.terms.items()
                                      if _frac_val(alpha, p) == 0})

    def mult_by_char(self, d: Character):
        """Multiplication by the function delta on the distribution side."""
        out = {}
        for (m, alpha), c in self.terms.items():
            if _frac_val(alpha, self.ring.p) != 0:
                raise RobbaLabError("mult_by_char needs unit support")
            qs = _char_derivative_polys(d, m)
            d_alpha = d.eval_unit(alpha)
            for r in range(m + 1):
                # delta^{(r)}(alpha) = delta(alpha) * q_r(alpha)
                q_val = _eval_laurent(qs[r], alpha, self.ring)
                coeff = c * Fraction(math.comb(m, r)) * d_alpha * q_val
                key = (m - r, alpha)
                out[key] = out.get(key, self.ring.zero()) + coeff
        return DiracCombo(self.ring, out)

    def w_star(self):
        """Transport by x -> x^{-1}; needs every Dirac point to be a unit."""
        out = {}
        for (m, alpha), c in self.terms.items():
            if _frac_val(alpha, self.ring.p) != 0:
                raise RobbaLabError("w_* needs support in the units")
            for r, q in _inversion_chain_rule(m):
                val = _eval_laurent(q, alpha, self.ring)
                key = (r, 1 / alpha)
                out[key] = out.get(key, self.ring.zero()) + c * val
        return DiracCombo(self.ring, out)

    # -- expansion ---------------------------------------------------------
    def to_window(self, cap=None) -> RobbaElement:
        cap = DEFAULT_CAP if cap is None else cap
        ring = self.ring
        acc = zero(ring)
        t_pows = {0: RobbaElement(ring, {0: ring.one()})}
        for (m, alpha), c in sorted(self.terms.items()):
            while m not in t_pows:
                k = max(t_pows)
                t_pows[k + 1] = rb_mul(t_pows[k], log_one_plus_T(ring, cap))
            term = rb_mul(t_pows[m], u_power_series(ring, alpha, cap))
            acc = rb_add(acc, rb_scale(term, c))
        # uniform trust cap: expansions of non-integer exponents stop at cap
        kh = acc.known_hi
        if any(alpha.denominator != 1 or alpha < 0 or m > 0
               for (m, alpha) in self.terms):
            kh = cap if kh is None else min(kh, cap)
        return RobbaElement(ring, acc.coeffs, kh)

    def __repr__(self):
        bits = []
        for (m, alpha), c in sorted(self.terms.items())[:6]:
            t = f"t^{m}*" if m else ""
            bits.append(f"({c})*{t}u^{alpha}")
        return " + ".join(bits) if bits else "0"


def _char_derivative_polys(d: Character, m: int):
    """q_r with delta^{(r)}(x) = delta(x) q_r(x); Laurent polys in x."""
    kappa = d.weight
    qs = [{0: d.ring.one()}]
    for _ in range(m):
        prev = qs[-1]
        new = {}
        for e, c in prev.items():
            if e:
                new[e - 1] = new.get(e - 1, d.ring.zero()) + c * e
            new[e - 1] = new.get(e - 1, d.ring.zero()) + c * kappa
        qs.append(new)
    return qs


def _eval_laurent(poly, x: Fraction, ring) -> CoeffElement:
    acc = ring.zero()
    for e, c in poly.items():
        acc = acc + c * Fraction(x) ** e
    return acc


_INV_CHAIN_CACHE = {}


def _inversion_chain_rule(m: int):
    """(d/dk)^m [phi(1/k)] = sum_r q_{m,r}(k) phi^{(r)}(1/k); q as Laurent."""
    if m in _INV_CHAIN_CACHE:
        return _INV_CHAIN_CACHE[m]
    # represent sum_r q_r(k) phi^{(r)}(1/k); differentiate in k
    state = {0: {0: Fraction(1)}}
    for _ in range(m):
        new = {}
        for r, q in state.items():
            for e, c in q.items():
                if c == 0:
                    continue
                if e:
                    slot = new.setdefault(r, {})
                    slot[e - 1] = slot.get(e - 1, Fraction(0)) + c * e
                slot = new.setdefault(r + 1, {})
                slot[e - 2] = slot.get(e - 2, Fraction(0)) - c
        state = new
    out = [(r, q) for r, q in state.items()]
    _INV_CHAIN_CACHE[m] = out
    return out


# -- psi = 0 elements ----------------------------------------------------

class PsiZeroElement:
    """An element of R_A^{psi=0} with a certified defect and, when the
    support allows it, an exact Dirac-model backing."""

    __slots__ = ("ring", "combo", "_window", "level", "psi_defect")

    def __init__(self, ring, combo=None, window=None, level=1, psi_defect=INF):
        self.ring = ring
        self.combo = combo
        self._window = window
        self.level = level
        self.psi_defect = psi_defect

    @classmethod
    def from_combo(cls, combo: DiracCombo, level=1):
        bad = [k for k in combo.terms
               if _frac_val(k[1], combo.ring.p) != 0]
        if bad:
            raise RobbaLabError("psi = 0 requires unit support")
        return cls(combo.ring, combo=combo, level=level, psi_defect=INF)

    @classmethod
    def from_window(cls, f: RobbaElement, level=1):
        """Certify psi(f) = 0 and recover the Dirac backing when possible."""
        from .robba import defect_valuation
        if not f.is_exact:
            raise PrecisionError("psi-zero analysis needs an exact window")
        defect = defect_valuation(rb_psi(f))
        combo = None
        if f.is_plus():
            cu = to_u_coeffs(f)
            if all(n % f.ring.p != 0 for n in cu):
                combo = DiracCombo(f.ring, {(0, Fraction(n)): c
                                            for n, c in cu.items()})
        return cls(f.ring, combo=combo, window=f, level=level,
                   psi_defect=defect)

    def window(self, cap=None) -> RobbaElement:
        if self._window is not None:
            return self._window
        return self.combo.to_window(cap=cap)

    def require_combo(self) -> DiracCombo:
        if self.combo is None:
            raise PrecisionError(
                "level data insufficient: no Dirac backing for this element")
        return self.combo


def class_components(f: RobbaElement, N: int, cap=None):
    """f_i = psi^N((1+T)^{-i} f) for i in (Z/p^N)^x, exactly.

    Depth is cleared first through f = phi^N(T^{-q}) (f phi^N(T)^q); the
    remaining plus part is handled in the binomial basis, where negative
    shifted exponents are legal Dirac points and expand to truncated-exact
    windows.
    """
    cap = DEFAULT_CAP if cap is None else cap
    ring = f.ring
    p = ring.p
    if not f.is_exact:
        raise PrecisionError("class decomposition needs an exact window")
    q = f.depth()
    g = f
    if q:
        g = rb_mul(f, rb_pow(phi_T_poly(ring, N), q))
    cu = to_u_coeffs(g)
    comps = {}
    for i in range(1, p ** N):
        if i % p == 0:
            continue
        kept = {}
        for m, c in cu.items():
            if (m - i) % p ** N == 0:
                kept[(m - i) // p ** N] = c
        comp = _from_u_general(ring, kept, cap)
        if q:
            comp = rb_mul(RobbaElement(ring, {-q: ring.one()}), comp)
        comps[i] = comp
    return comps


def _from_u_general(ring, cu, cap):
    """sum c_n (1+T)^n with n in Z; negative n expand truncated at cap."""
    nonneg = {n: c for n, c in cu.items() if n >= 0}
    out = from_u_coeffs(ring, nonneg)
    for n, c in cu.items():
        if n < 0:
            out = rb_add(out, rb_scale(u_power_series(ring, n, cap), c))
    return out


def class_components_from_combo(combo: DiracCombo, N: int, cap=None):
    """Exact class components of a Dirac-backed element, as windows."""
    cap = DEFAULT_CAP if cap is None else cap
    ring = combo.ring
    p = ring.p
    comps = {}
    for i in range(1, p ** N):
        if i % p == 0:
            continue
        fi = combo.u_mult(-i)
        for _ in range(N):
            fi = fi.psi()
        comps[i] = fi.to_window(cap=cap)
    return comps


def reconstruct_from_components(comps, N, ring, cap=None):
    """sum_i (1+T)^i phi^N(f_i); inverse of class_components up to trust."""
    acc = zero(ring)
    for i, fi in comps.items():
        term = rb_phi(fi, cap=cap, iterations=N)
        term = rb_mul(term, u_power_series(ring, i, i))
        acc = rb_add(acc, term)
    return acc


# -- m_delta --------------------------------------------------------------

def default_level(d: Character) -> int:
    """Smallest N with N > -C_delta + 1, C_delta = min(v(kappa), 0) - 1/(p-1)."""
    p = d.ring.p
    v = d.weight.valuation()
    c_delta = min(v, 0) - Fraction(1, p - 1)
    n = 1
    while not (n > -c_delta + 1):
        n += 1
    return n


def m_delta(d: Character, f: RobbaElement, N=None, cap=None,
            target_prec=None, jmax=60) -> RobbaElement:
    """The twist m_delta on R^{psi=0}, by the convergent double series.

    Terminates exactly when binom(kappa, j) vanishes (integer weight >= 0);
    otherwise runs until two consecutive terms fall below ``target_prec``
    and raises ConvergenceError if that never happens before ``jmax``.
    """
    ring = d.ring
    if isinstance(f, PsiZeroElement):
        if f.combo is not None:
            cap = DEFAULT_CAP if cap is None else cap
            N = default_level(d) if N is None else N
            comps = class_components_from_combo(f.combo, N, cap=cap)
            return _m_delta_series(d, comps, N, cap, target_prec, jmax)
        f = f.window()
    if ring != f.ring:
        raise RingMismatchError("character and element over different rings")
    cap = DEFAULT_CAP if cap is None else cap
    target = ring.prec if target_prec is None else target_prec
    N = default_level(d) if N is None else N
    comps = class_components(f, N, cap=cap)
    return _m_delta_series(d, comps, N, cap, target_prec, jmax)


def _m_delta_series(d, comps, N, cap, target_prec, jmax):
    from .robba import rb_truncate
    ring = d.ring
    target = ring.prec if target_prec is None else target_prec
    kappa = d.weight
    p = ring.p
    comps = {i: rb_truncate(fi, cap) for i, fi in comps.items()}
    acc = zero(ring)
    small_streak = 0
    j = 0
    binom_j = ring.one()
    derivs = {i: fi for i, fi in comps.items()}
    known = None
    while True:
        if j > 0:
            binom_j = binom_j * (kappa - (j - 1)) * Fraction(1, j)
        if binom_j.is_exact_zero():
            break  # integer weight: the series is finite and exact
        term_total = zero(ring)
        for i, fi_j in derivs.items():
            scalar = binom_j * d.eval_unit(i) * Fraction(1, i) ** j \
                * Fraction(p) ** (N * j)
            piece = rb_phi(fi_j, cap=cap, iterations=N, out_cap=cap)
            piece = rb_mul(piece, u_power_series(ring, i, i))
            term_total = rb_add(term_total, rb_scale(piece, scalar))
        acc = rb_add(acc, term_total)
        known = acc.known_hi
        tv = _term_valuation(term_total)
        if tv >= target:
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
        j += 1
        if j > jmax:
            raise ConvergenceError(
                f"m_delta did not converge below 10^-{target} digits by "
                f"j = {jmax}; last term valuation {tv}")
        derivs = {i: rb_partial(fi) for i, fi in derivs.items()}
    return RobbaElement(ring, acc.coeffs, known)


def _term_valuation(term: RobbaElement):
    best = INF
    for _, c in term.coeffs.items():
        best = min(best, c.valuation())
    return best


def m_delta_dirac(d: Character, f: PsiZeroElement) -> PsiZeroElement:
    """Exact route: multiplication by delta on the Dirac model."""
    return PsiZeroElement.from_combo(f.require_combo().mult_by_char(d),
                                     level=f.level)


# -- the involution -------------------------------------------------------

def w_star(f: PsiZeroElement) -> PsiZeroElement:
    """w_* on R^{psi=0} through the distribution model (delta_a -> delta_{1/a})."""
    return PsiZeroElement.from_combo(f.require_combo().w_star(), level=f.level)


def iota(d1: Character, d2: Character, f: PsiZeroElement) -> PsiZeroElement:
    """iota_{d1,d2} = d1(-1) . w_* o m_{delta^{-1}} with delta = d1 d2^{-1} chi^{-1}."""
    from .characters import delta_of_pair
    delta = delta_of_pair(d1, d2).restrict_units()
    sign = d1(-1)
    twisted = m_delta_dirac(delta.inverse(), f)
    flipped = w_star(twisted)
    return PsiZeroElement.from_combo(flipped.require_combo().scale(sign),
                                     level=f.level)
