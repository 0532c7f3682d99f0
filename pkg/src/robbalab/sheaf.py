"""The rank-1 module R_A(d1) glued over P^1 at finite precision.

An element is a pair (z1, z2) with Res_{Zp^x}(z1) = iota(Res_{Zp^x}(z2)).
In flat R-coordinates the generators act with the d1-twist (sigma_a acts as
d1(a) sigma_a, phi as d1(p) phi, psi as d1(p)^{-1} psi) and the gluing
involution carries the chart Jacobian of x -> 1/x:

    iota = d1(-1) . w_* o m_{(delta chi^2)^{-1}},

the unique normalization that is omega-twisted antilinear against the
twisted sigma_a and hence preserves compatibility under every generator
(it is the declared involution w_* o m_{delta^{-1}} composed with
partial^{-2}, the Jacobian).

Components carry an exact Dirac-model part plus pZp-supported tails stored
*unexpanded* as (depth, inner) = phi^depth(inner) with inner a finite exact
Laurent window.  Keeping the phi-wrap symbolic matters: the boundary-annulus
residue pairing of the duality theory evaluates against phi-images through
the trace identity

    res_0(A . phi(g) dt) = res_0(psi(A) . g dt),

which reduces every pairing to finite exact windows; expanding phi(g) as an
origin-side Laurent series would break support-orthogonality.

Generator action on pairs z = (z1, z2):
    w               (z2, z1)
    center(a)       (omega(a) z1, omega(a) z2)
    diag(a, 1)      (d1(a) sigma_a z1, omega(a) d1(a)^{-1} sigma_{1/a} z2)
    diag(p, 1)      z1' = d1(p) phi z1 + iota(Res_{Zp^x} z2'),
                    z2' = omega(p) d1(p)^{-1} psi z2
    upper(b), b in pZp:
                    z1' = (1+T)^b z1,
                    z2' = u_b(Res_{pZp} z2) + iota(Res_{Zp^x} z1')
    u_b = omega(1+b) . u^{-1} o iota o [d1-twisted sigma_{(1+b)^{-2}}, then
          u^{b/(1+b)}] o iota o u^{1/(1+b)}   (the five-fold composition)
"""

from __future__ import annotations

import random
from fractions import Fraction

from .characters import Character, delta_of_pair, omega_of_pair
from .coefficients import INF, CoeffRing
from .errors import CompatibilityViolation, PrecisionError, RobbaLabError
from . import robba as rb
from .twists import DiracCombo

PAIR_CAP = 48


class SheafSpace:
    """The ambient data: characters, omega, delta and the gluing involution."""

    def __init__(self, d1: Character, d2: Character, threshold=None):
        self.d1, self.d2 = d1, d2
        self.ring = d1.ring
        self.omega = omega_of_pair(d1, d2)
        self.delta = delta_of_pair(d1, d2)
        chi = Character.cyclotomic(self.ring)
        self.eps_char = (self.delta * chi * chi).inverse().restrict_units()
        self.sign = d1(-1)
        self.threshold = threshold if threshold is not None \
            else self.ring.prec - 4

    def dual(self) -> "SheafSpace":
        """The space pairing with this one: (chi d1^{-1}, chi d2^{-1}).

        The first slot is the character of the dual module
        R(d1)-check = R(chi d1^{-1}); this is the unique choice with central
        character omega^{-1} for which every generator's scalar factors
        cancel against the chi^{-1}-twist of the residue pairing.
        """
        chi = Character.cyclotomic(self.ring)
        return SheafSpace(chi * self.d1.inverse(), chi * self.d2.inverse(),
                          threshold=self.threshold)

    def iota(self, combo: DiracCombo) -> DiracCombo:
        if not combo.terms:
            return DiracCombo(self.ring)
        return combo.mult_by_char(self.eps_char).w_star().scale(self.sign)


class Component:
    """One coordinate of a pair: Dirac part + unexpanded phi-wrapped tails.

    ``parts`` is a list of (depth >= 1, inner window): the tail is the sum
    of phi^depth(inner), certified supported on p^depth Zp by construction.
    """

    __slots__ = ("combo", "parts")

    def __init__(self, combo: DiracCombo, parts=None):
        self.combo = combo
        self.parts = list(parts or [])
        for d, _ in self.parts:
            if d < 1:
                raise PrecisionError("tail parts need phi-wrap depth >= 1")

    def ring(self):
        return self.combo.ring

    # -- restrictions ------------------------------------------------------
    def res_units(self) -> DiracCombo:
        # tails are phi-images: their units restriction vanishes identically
        return self.combo.res_units()

    def res_pzp(self) -> "Component":
        return Component(self.combo.res_filter(0, 1), self.parts)

    # -- operators -----------------------------------------------------------
    def scale(self, s):
        return Component(self.combo.scale(s),
                         [(d, rb.rb_scale(g, s)) for d, g in self.parts])

    def add(self, other: "Component") -> "Component":
        return Component(self.combo + other.combo, self.parts + other.parts)

    def sigma(self, a):
        # sigma_a phi^d = phi^d sigma_a; inner windows truncate honestly
        return Component(self.combo.sigma(a),
                         [(d, rb.rb_sigma(g, a, cap=PAIR_CAP))
                          for d, g in self.parts])

    def phi(self):
        return Component(self.combo.phi(), [(d + 1, g) for d, g in self.parts])

    def psi(self):
        out = []
        for d, g in self.parts:
            if d <= 1:
                raise PrecisionError("psi would unwrap the last phi of a "
                                     "tail; sample deeper wraps")
            out.append((d - 1, g))
        return Component(self.combo.psi(), out)

    def u_mult(self, b: Fraction):
        """(1+T)^b for b in pZp (integer): tails need p^depth | b or rewrap."""
        b = Fraction(b)
        p = self.ring().p
        out = []
        for d, g in self.parts:
            e = 0
            bb = int(b)
            while e < d and bb % p == 0:
                bb //= p
                e += 1
            if e == d:
                out.append((d, rb.rb_u_mult(g, bb, cap=PAIR_CAP)))
            elif e >= 1:
                # u^b phi^d(g) = phi^e(u^{b/p^e} phi^{d-e}(g)): re-expand
                inner = rb.rb_phi(g, cap=PAIR_CAP, iterations=d - e)
                out.append((e, rb.rb_u_mult(inner, bb, cap=PAIR_CAP)))
            else:
                _raise_unit_translate()
        return Component(self.combo.u_mult(b), out)

    def window(self, cap=PAIR_CAP) -> rb.RobbaElement:
        out = self.combo.to_window(cap=cap)
        for d, g in self.parts:
            out = rb.rb_add(out, rb.rb_phi(g, cap=cap, iterations=d,
                                           out_cap=cap))
        return out


def _raise_unit_translate():
    raise PrecisionError("unit translate of a phi-wrapped tail is not "
                         "representable at this level")


class SheafElement:
    """A compatible pair (z1, z2) over a SheafSpace."""

    __slots__ = ("space", "z1", "z2", "defect")

    def __init__(self, space: SheafSpace, z1: Component, z2: Component,
                 check=True):
        self.space = space
        self.z1 = z1
        self.z2 = z2
        self.defect = self._compat_defect()
        if check and self.defect < space.threshold:
            raise CompatibilityViolation(
                f"Res_units(z1) != iota(Res_units(z2)) "
                f"(defect valuation {self.defect})",
                defect_valuation=self.defect)

    def _compat_defect(self):
        diff = self.z1.res_units() - self.space.iota(self.z2.res_units())
        return _combo_valuation(diff)


def _combo_valuation(combo: DiracCombo):
    best = INF
    for _, c in combo.terms.items():
        best = min(best, c.valuation())
    return best


def make_element(space, z1, z2, check=True) -> SheafElement:
    if not isinstance(z1, Component):
        z1 = Component(z1)
    if not isinstance(z2, Component):
        z2 = Component(z2)
    return SheafElement(space, z1, z2, check=check)


def element_from_z2(space, z2: Component,
                    extra_pzp: Component = None) -> SheafElement:
    """Build the compatible pair with prescribed z2 (and a free pZp part)."""
    z1 = Component(space.iota(z2.res_units()))
    if extra_pzp is not None:
        z1 = z1.add(extra_pzp)
    return SheafElement(space, z1, z2)


# -- the group action ------------------------------------------------------

def act(word, e: SheafElement) -> SheafElement:
    """Apply a word (list of generator tokens, leftmost acts last)."""
    for token in reversed(word):
        e = _act_one(token, e)
    return e


def _act_one(token, e: SheafElement) -> SheafElement:
    space = e.space
    kind = token[0]
    if kind == "w":
        return SheafElement(space, e.z2, e.z1)
    if kind == "center":
        a = Fraction(token[1])
        s = space.omega(a)
        return SheafElement(space, e.z1.scale(s), e.z2.scale(s))
    if kind == "diag_unit":
        a = Fraction(token[1])
        z1 = e.z1.sigma(a).scale(space.d1(a))
        z2 = e.z2.sigma(1 / a).scale(space.omega(a) * space.d1(1 / a))
        return SheafElement(space, z1, z2)
    if kind == "diag_p":
        p = Fraction(space.ring.p)
        z2_new = e.z2.psi().scale(space.omega(p) * space.d1(p).inverse())
        z1_new = e.z1.phi().scale(space.d1(p))
        glue = Component(space.iota(z2_new.res_units()))
        return SheafElement(space, z1_new.add(glue), z2_new)
    if kind == "upper":
        b = Fraction(token[1])
        if b.denominator != 1 or b.numerator % space.ring.p:
            raise RobbaLabError("upper(b) needs b in pZp")
        z1_new = e.z1.u_mult(b)
        pzp_part = _u_b(space, b, e.z2.res_pzp())
        z2_new = pzp_part.add(Component(space.iota(z1_new.res_units())))
        return SheafElement(space, z1_new, z2_new)
    raise RobbaLabError(f"unknown generator {token!r}")


def _u_b(space: SheafSpace, b: Fraction, y: Component) -> Component:
    """The operator u_b on sections over pZp, as the five-fold composition."""
    if y.parts:
        raise PrecisionError("u_b on window tails would need the involution "
                             "on minus parts; use Dirac-backed samples")
    c = y.combo
    c = c.u_mult(1 / (1 + b))                       # (1, (1+b)^{-1}; 0, 1)
    c = space.iota(c)
    a = (1 + b) ** -2                               # ((1+b)^{-2}, b(1+b)^{-1})
    c = c.sigma(a).scale(space.d1(a)).u_mult(b / (1 + b))
    c = space.iota(c)
    c = c.u_mult(-1)                                # (1, -1; 0, 1)
    return Component(c.scale(space.omega(1 + b)))


# -- defects and relation fuzzing ------------------------------------------

def element_defect(e1: SheafElement, e2: SheafElement, cap=PAIR_CAP):
    """min valuation of the coordinate-wise difference (combined models)."""
    best = INF
    for a, b in ((e1.z1, e2.z1), (e1.z2, e2.z2)):
        best = min(best, _combo_valuation(a.combo - b.combo))
        if a.parts or b.parts:
            wa = a.window(cap) if a.parts else rb.zero(a.ring())
            wb = b.window(cap) if b.parts else rb.zero(b.ring())
            # compare tail expansions only (combos already compared)
            ca = a.combo.to_window(cap=cap)
            cb = b.combo.to_window(cap=cap)
            best = min(best, rb.defect_valuation(
                rb.rb_sub(wa, ca), rb.rb_sub(wb, cb)))
    return best


def random_element(space: SheafSpace, rng: random.Random, with_tail=False,
                   tail_depth=2, derivatives=True) -> SheafElement:
    """Seeded random compatible pair (z2 free, z1 glued + free pZp part)."""
    ring = space.ring
    p = ring.p
    terms = {}
    for _ in range(rng.randint(2, 4)):
        alpha = rng.randint(1, p * p)
        m = rng.randint(0, 1) if derivatives else 0
        terms[(m, Fraction(alpha))] = ring(rng.randint(-9, 9))
    z2 = Component(DiracCombo(ring, terms))
    extra_terms = {(0, Fraction(p * rng.randint(0, 3))): ring(rng.randint(-9, 9))}
    inner = None
    if with_tail:
        inner = rb.RobbaElement(ring, {-k: ring(rng.randint(-9, 9))
                                       for k in range(1, tail_depth + 1)})
    extra = Component(DiracCombo(ring, extra_terms),
                      [(2, inner)] if inner is not None else [])
    return element_from_z2(space, z2, extra_pzp=extra)


def check_relation(space, lhs_word, rhs_word, samples=20, seed=0,
                   with_tail=False):
    """Apply both words to seeded samples; return the min defect valuation."""
    rng = random.Random(seed)
    worst = INF
    for _ in range(samples):
        e = random_element(space, rng, with_tail=with_tail)
        out1 = act(lhs_word, e)
        out2 = act(rhs_word, e)
        worst = min(worst, element_defect(out1, out2))
        worst = min(worst, out1.defect, out2.defect)
    return worst


# -- duality pairing over P^1 ----------------------------------------------

def _res0_dt_window(a: rb.RobbaElement, b: rb.RobbaElement):
    """res_0(a b dt) reading only the exactly-known convolution range."""
    return rb.rb_res0_dt(rb.rb_mul(a, b))


def brace(x: Component, y: Component, cap=PAIR_CAP):
    """{x, y} = res_0(sigma_{-1}(x) y dt), evaluated by the trace identity.

    Dirac x Dirac contributes 0 (plus x plus has no residue); phi-wrapped
    tails are never expanded across the pairing: each phi peels off through
    res_0(A . phi(g) dt) = res_0(psi(A) . g dt), keeping every step exact.
    """
    ring = x.ring()
    total = ring.zero()
    # Dirac(x) against tails of y: only W-coefficients below depth(g) matter
    for d, g in y.parts:
        a = x.combo.sigma(-1)
        for _ in range(d):
            a = a.psi()
        if a.terms:
            total = total + _res0_dt_window(a.to_window(cap=g.depth() + 1), g)
    # tails of x against Dirac(y): res0(phi^d(s-1 g) D dt) = res0(s-1 g psi^d D dt)
    for d, g in x.parts:
        bcombo = y.combo
        for _ in range(d):
            bcombo = bcombo.psi()
        if bcombo.terms:
            total = total + _res0_dt_window(
                rb.rb_sigma(g, -1, cap=2), bcombo.to_window(cap=g.depth() + 1))
    # tail x tail: peel common depth, then reduce the deeper side
    for d1, g1 in x.parts:
        for d2, g2 in y.parts:
            m = min(d1, d2)
            e1, e2 = d1 - m, d2 - m
            left, right = g1, g2
            if e1 > 0:
                # res0(phi^{e1}(s-1 g1) g2 dt) = res0(s-1 g1 psi^{e1} g2 dt)
                for _ in range(e1):
                    right = rb.rb_psi(right)
            if e2 > 0:
                # res0(A phi^{e2}(g2) dt) = res0(psi^{e2}(A) g2 dt) with
                # psi sigma_{-1} = sigma_{-1} psi keeping the window exact
                for _ in range(e2):
                    left = rb.rb_psi(left)
            total = total + _res0_dt_window(
                rb.rb_sigma(left, -1, cap=right.depth() + 1), right)
    return total


def p1_pairing(zcheck: SheafElement, z: SheafElement, cap=PAIR_CAP):
    """{zcheck, z}_{P1} = {Res_Zp zcheck, Res_Zp z}
                        + {Res_pZp w zcheck, Res_pZp w z}."""
    first = brace(zcheck.z1, z.z1, cap)
    second = brace(zcheck.z2.res_pzp(), z.z2.res_pzp(), cap)
    return first + second


def pairing_invariance(space: SheafSpace, token, samples=10, seed=0,
                       cap=PAIR_CAP):
    """min valuation of {g zcheck, g z} - {zcheck, z} over seeded samples."""
    dual = space.dual()
    rng = random.Random(seed)
    worst = INF
    with_tail = token[0] != "upper"
    for _ in range(samples):
        z = random_element(space, rng, with_tail=with_tail, derivatives=False)
        zc = random_element(dual, rng, with_tail=with_tail, derivatives=False)
        before = p1_pairing(zc, z, cap)
        after = p1_pairing(act([token], zc), act([token], z), cap)
        worst = min(worst, (after - before).valuation())
    return worst
