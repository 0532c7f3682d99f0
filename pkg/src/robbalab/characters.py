"""Locally analytic characters of Qp^x (or Zp^x) valued in A^x.

A character is stored as (value at p, tame index, weight): on the unit part
it acts by omega(u)^tame * <u>^kappa where omega is the Teichmuller lift and
<u> the 1-unit part.  When the weight is an integer k with tame = k mod
(p-1), the unit action is exactly u -> u^k and evaluation stays rational.
The regularity predicate (never x^{-i} nor chi x^i pointwise) drives every
dichotomy downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coefficients import (
    CoeffElement,
    CoeffRing,
    PAdic,
    padic_exp,
    padic_log,
    rational_valuation,
    teichmuller,
)
from .errors import PrecisionError, RingMismatchError, RobbaLabError


class Character:
    """delta: Qp^x -> A^x (or its restriction to Zp^x, per ``domain``)."""

    __slots__ = ("ring", "value_at_p", "tame", "weight", "domain")

    def __init__(self, ring: CoeffRing, value_at_p, tame: int, weight,
                 domain: str = "Qp*"):
        self.ring = ring
        self.value_at_p = value_at_p if isinstance(value_at_p, CoeffElement) \
            else ring(value_at_p)
        self.tame = tame % (ring.p - 1)
        self.weight = weight if isinstance(weight, CoeffElement) else ring(weight)
        if domain not in ("Qp*", "Zp*"):
            raise RobbaLabError("domain must be 'Qp*' or 'Zp*'")
        self.domain = domain
        if not self.value_at_p.is_unit():
            raise RobbaLabError("value at p must be a unit of A")

    # -- constructors ---------------------------------------------------
    @classmethod
    def trivial(cls, ring):
        return cls(ring, 1, 0, 0)

    @classmethod
    def x_power(cls, ring, k: int):
        """x -> x^k."""
        return cls(ring, Fraction(ring.p) ** k, k, k)

    @classmethod
    def cyclotomic(cls, ring):
        """chi(x) = x |x|: trivial at p, x on units, weight 1."""
        return cls(ring, 1, 1, 1)

    @classmethod
    def unramified(cls, ring, alpha):
        """Trivial on units, alpha at p."""
        return cls(ring, alpha, 0, 0)

    @classmethod
    def from_weight(cls, ring, kappa, value_at_p=1, tame=0):
        return cls(ring, value_at_p, tame, kappa)

    # -- algebra ----------------------------------------------------------
    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatchError("characters over different rings")

    def __mul__(self, other):
        self._check(other)
        dom = "Zp*" if "Zp*" in (self.domain, other.domain) else "Qp*"
        return Character(self.ring, self.value_at_p * other.value_at_p,
                         self.tame + other.tame, self.weight + other.weight, dom)

    def inverse(self):
        return Character(self.ring, self.value_at_p.inverse(), -self.tame,
                         -self.weight, self.domain)

    def restrict_units(self):
        return Character(self.ring, 1, self.tame, self.weight, "Zp*")

    # -- evaluation -------------------------------------------------------
    def is_exact_monomial_on_units(self) -> Optional[int]:
        """k when delta|Zp^x = x^k exactly (integer weight, matching tame)."""
        w = self.weight
        if not w.is_exact():
            return None
        try:
            k = w.as_fraction()
        except PrecisionError:
            return None
        if k.denominator != 1:
            return None
        k = int(k)
        if (k - self.tame) % (self.ring.p - 1) == 0:
            return k
        return None

    def eval_unit(self, u) -> CoeffElement:
        """delta(u) for u in Zp^x, rational input."""
        ring = self.ring
        p = ring.p
        u = Fraction(u)
        if rational_valuation(u, p) != 0:
            raise RobbaLabError("eval_unit needs a p-adic unit")
        if u == 1:
            return ring.one()
        if u == -1:
            # omega(-1) = -1 and <-1> = 1, so only the tame part acts
            return ring(Fraction((-1) ** self.tame))
        k = self.is_exact_monomial_on_units()
        if k is not None:
            return _scalar(ring, u ** k)
        # omega(u)^tame * exp(kappa log<u>), capped at the ring precision
        prec = ring.prec
        om = teichmuller(u, p, prec)
        tame_part = om ** self.tame
        one_unit = _scalar(ring, u) * _lift(ring, om.inverse())  # <u> = u/omega(u)
        lg = _elt_log(one_unit, prec)
        wild = _elt_exp(self.weight * lg, prec)
        return _lift(ring, tame_part) * wild

    def __call__(self, x) -> CoeffElement:
        """Evaluate at x in Qp^x (rational; p-power part uses value_at_p)."""
        x = Fraction(x)
        if x == 0:
            raise RobbaLabError("character evaluated at 0")
        if self.domain == "Zp*":
            if rational_valuation(x, self.ring.p) != 0:
                raise RobbaLabError("character of Zp^x evaluated off the units")
            return self.eval_unit(x)
        p = self.ring.p
        v = rational_valuation(x, p)
        u = x / Fraction(p) ** v
        out = self.eval_unit(u)
        if v:
            out = out * self.value_at_p ** v
        return out

    def weight_value(self) -> CoeffElement:
        return self.weight

    # -- regularity ---------------------------------------------------------
    def is_regular(self, i_max: int = 30):
        """Regular iff pointwise never x^{-i} nor chi x^i, 0 <= i <= i_max.

        Returns (True, None) or (False, witness) with witness a dict giving
        the failing i, the form, and the point ("base" or "reduction").
        """
        points = [("base", self)]
        if self.ring.variant == "dual":
            red = Character(self.ring.reduced,
                            self.value_at_p.residue_reduce(),
                            self.tame, self.weight.residue_reduce(), self.domain)
            points = [("reduction", red)]
        for label, d in points:
            w = d.weight
            if w.is_exact():
                try:
                    frac = w.as_fraction()
                except PrecisionError:
                    frac = None
                if frac is not None and (frac.denominator != 1
                                         or frac < -i_max or frac > i_max + 1):
                    continue  # weight certifies regularity at this point
            for i in range(i_max + 1):
                if d._matches(Character.x_power(d.ring, -i)):
                    return False, {"i": i, "form": f"x^-{i}", "point": label}
                chi_xi = Character.cyclotomic(d.ring) * Character.x_power(d.ring, i)
                if d._matches(chi_xi):
                    return False, {"i": i, "form": f"chi*x^{i}", "point": label}
        return True, None

    def _matches(self, other) -> bool:
        if self.tame != other.tame:
            return False
        if not (self.weight - other.weight).is_zero():
            return False
        if self.domain == "Qp*" and not (
                self.value_at_p - other.value_at_p).is_zero():
            return False
        return True

    def __repr__(self):
        return (f"Character(p->{self.value_at_p}, tame={self.tame}, "
                f"weight={self.weight}, {self.domain})")

    def to_json(self):
        return {"value_at_p": self.value_at_p.to_json(), "tame": self.tame,
                "weight": self.weight.to_json(), "domain": self.domain}


def _scalar(ring, q: Fraction) -> CoeffElement:
    return ring(q)


def _lift(ring, x: PAdic) -> CoeffElement:
    coords = [x] + [PAdic.zero(ring.p)] * (ring.dim - 1)
    return CoeffElement(ring, coords)


def _elt_log(x: CoeffElement, prec: int) -> CoeffElement:
    """log on 1-units of A, nilpotent part handled by the finite series."""
    ring = x.ring
    one = ring.one()
    z = x - one
    # split off the reduced part for the p-adic series; the nilpotent part
    # contributes the finite series log(1+n/(1+z0)).
    if ring.variant != "dual":
        if ring.variant == "ext" and any(not c.is_zero() for c in x.coords[1:]):
            raise PrecisionError("log on ramified extensions not supported")
        return _lift(ring, padic_log(_as_padic(x), prec)) if ring.dim == 1 \
            else _lift(ring, padic_log(x.coords[0], prec))
    base = x.residue_reduce()
    lg0 = padic_log(base.coords[0], prec)
    # x = x0 (1 + n') with n' nilpotent
    xinv0 = _lift(ring, base.coords[0].inverse())
    n_prime = x * xinv0 - one
    acc = _lift(ring, lg0)
    power = one
    sign = 1
    for k in range(1, ring.e):
        power = power * n_prime
        acc = acc + power * Fraction(sign, k)
        sign = -sign
    return acc


def _elt_exp(x: CoeffElement, prec: int) -> CoeffElement:
    ring = x.ring
    if ring.variant != "dual":
        return _lift(ring, padic_exp(x.coords[0], prec))
    base = padic_exp(x.coords[0], prec)
    n_part = x - _lift(ring, x.coords[0])
    acc = ring.one()
    power = ring.one()
    fact = 1
    for k in range(1, ring.e):
        power = power * n_part
        fact *= k
        acc = acc + power * Fraction(1, fact)
    return acc * _lift(ring, base)


def _as_padic(x: CoeffElement) -> PAdic:
    return x.coords[0]


# -- spec operation surface ---------------------------------------------

def char_eval(d: Character, u) -> CoeffElement:
    return d(u)


def char_weight(d: Character) -> CoeffElement:
    return d.weight_value()


def char_mul(d1: Character, d2: Character) -> Character:
    return d1 * d2


def char_inv(d: Character) -> Character:
    return d.inverse()


def char_is_regular(d: Character, i_max: int = 30):
    return d.is_regular(i_max)


def delta_of_pair(d1: Character, d2: Character) -> Character:
    """delta = d1 d2^{-1} chi^{-1}."""
    chi = Character.cyclotomic(d1.ring)
    return d1 * d2.inverse() * chi.inverse()


def omega_of_pair(d1: Character, d2: Character) -> Character:
    """omega = d1 d2 chi^{-1} (the central character)."""
    chi = Character.cyclotomic(d1.ring)
    return d1 * d2 * chi.inverse()
