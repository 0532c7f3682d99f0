"""Finite-dimensional semigroup modules carrying the exact cohomology.

PolDualModule is the degree-<=N polynomial dual inside R^+(d1, d2): basis
t^0..t^N (t = log(1+T), t^j dual to j-th derivative at 0), with

    sigma_a t^j = d1 d2^{-1}(a) a^j t^j
    phi     t^j = d1 d2^{-1}(p) p^j t^j
    tau     t^j = sum_{h<=j} (j!/h!) binom(ktau - h, j - h) p^{j-h} t^h

where ktau = -kappa(d1 d2^{-1}) - 1.  The factorial factor is forced by the
monomial basis: it is what the dual principal-series action produces, and it
is cross-checked at build time against log(tau) = p u^- and the semigroup
relations.  tau - 1 is strictly triangular, so delta_a = (tau^a - 1)/(tau - 1)
is polynomial in tau for every unit a.

LocPolyModule is the level-h, degree-<=D shadow of R^-(d1, d2) = LA(Zp)
with the group action ((a,0;b,1) f)(x) = delta(a - bx) f(x/(a - bx)) and the
Lie actions a+ = kappa(delta) - x d/dx, u- = x a+.  phi is the level-h
shadow of f -> delta(p) f(x/p) 1_{pZp}.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .characters import Character, delta_of_pair
from .coefficients import CoeffElement, CoeffRing
from .errors import ModelError, PrecisionError, RobbaLabError
from . import linalg as la


def _binom_elt(ring, top: CoeffElement, k: int) -> CoeffElement:
    out = ring.one()
    for i in range(k):
        out = out * (top - i)
    return out * Fraction(1, math.factorial(k))


def primitive_generator(p: int) -> int:
    """Smallest integer generating (Z/p^2)^x, our fixed generator of Zp^x."""
    m = p * p
    order = p * (p - 1)
    for a in range(2, m):
        if a % p == 0:
            continue
        k, x = 1, a % m
        while x != 1:
            x = (x * a) % m
            k += 1
        if k == order:
            return a
    raise RobbaLabError("no primitive generator found")


class PolDualModule:
    """Pol_{<=N}(Zp, A)^* (d1, d2) with cached generator matrices."""

    def __init__(self, N: int, d1: Character, d2: Character, a_gen=None,
                 check=True):
        if N < 0:
            raise RobbaLabError("N must be >= 0")
        self.N = N
        self.d1 = d1
        self.d2 = d2
        self.ring = d1.ring
        ring = self.ring
        self.dim = N + 1
        p = ring.p
        self.a_gen = primitive_generator(p) if a_gen is None else a_gen
        ratio = d1 * d2.inverse()
        self.ratio = ratio
        self.kw = ratio.weight                       # kappa(d1 d2^{-1})
        self.ktau = -self.kw - ring.one()            # the tau-formula weight
        self.phi_m = self._diag(ratio(Fraction(p)), p)
        self.gamma_m = self.sigma(self.a_gen)
        self.tau_m = self._tau_matrix()
        self.delta_p_m = self._delta_sum(p)
        self.delta_a_m = self._delta_sum(self.a_gen)
        self.a_plus_m = self._a_plus()
        self.u_minus_m = self._u_minus()
        if check:
            self._certify()

    # -- matrices ----------------------------------------------------------
    def _diag(self, scalar, base):
        ring = self.ring
        out = la.zeros(ring, self.dim, self.dim)
        power = ring.one()
        for j in range(self.dim):
            out[j][j] = scalar * power
            power = power * Fraction(base)
        return out

    def sigma(self, a):
        """Matrix of sigma_a for a rational unit a."""
        return self._diag(self.ratio(Fraction(a)), Fraction(a))

    def _tau_matrix(self):
        ring = self.ring
        p = ring.p
        out = la.zeros(ring, self.dim, self.dim)
        for j in range(self.dim):
            for h in range(j + 1):
                c = _binom_elt(ring, self.ktau - h, j - h) \
                    * Fraction(math.factorial(j), math.factorial(h)) \
                    * Fraction(p) ** (j - h)
                out[h][j] = c
        return out

    def _delta_sum(self, a: int):
        """delta_a = 1 + tau + ... + tau^{a-1} for a positive integer."""
        ring = self.ring
        acc = la.zeros(ring, self.dim, self.dim)
        power = la.identity(ring, self.dim)
        for _ in range(a):
            acc = la.mat_add(acc, power)
            power = la.mat_mul(power, self.tau_m)
        return acc

    def _a_plus(self):
        ring = self.ring
        out = la.zeros(ring, self.dim, self.dim)
        for j in range(self.dim):
            out[j][j] = self.kw + Fraction(j)
        return out

    def _u_minus(self):
        ring = self.ring
        out = la.zeros(ring, self.dim, self.dim)
        for j in range(1, self.dim):
            out[j - 1][j] = (-self.kw - Fraction(j)) * Fraction(j)
        return out

    # -- certification -------------------------------------------------------
    def _certify(self):
        ring = self.ring
        mm, ms = la.mat_mul, la.mat_sub
        checks = []
        # semigroup relations
        checks.append(("phi gamma = gamma phi",
                       ms(mm(self.phi_m, self.gamma_m),
                          mm(self.gamma_m, self.phi_m))))
        tau_p = la.identity(ring, self.dim)
        for _ in range(ring.p):
            tau_p = mm(tau_p, self.tau_m)
        checks.append(("phi tau^p = tau phi",
                       ms(mm(self.phi_m, tau_p), mm(self.tau_m, self.phi_m))))
        tau_ainv = la.mat_binomial_power(self.tau_m, Fraction(1, self.a_gen),
                                         ring, self.dim + 1)
        checks.append(("gamma tau = tau^(1/a) gamma",
                       ms(mm(self.gamma_m, self.tau_m),
                          mm(tau_ainv, self.gamma_m))))
        # Lie relations and the group/Lie bridge log(tau) = p u^-
        log_tau = la.mat_log_unipotent(self.tau_m, ring, self.dim + 1)
        checks.append(("log tau = p u^-",
                       ms(log_tau, la.mat_scale(self.u_minus_m, Fraction(ring.p)))))
        br = ms(mm(self.a_plus_m, self.u_minus_m),
                mm(self.u_minus_m, self.a_plus_m))
        checks.append(("[a+, u-] = -u-", la.mat_add(br, self.u_minus_m)))
        checks.append(("p phi u- = u- phi",
                       ms(la.mat_scale(mm(self.phi_m, self.u_minus_m),
                                       Fraction(ring.p)),
                          mm(self.u_minus_m, self.phi_m))))
        # cone-construction intertwinings
        one = la.identity(ring, self.dim)
        tm1 = ms(self.tau_m, one)
        checks.append(("(gamma delta_a - 1)(tau-1) = (tau-1)(gamma-1)",
                       ms(mm(ms(mm(self.gamma_m, self.delta_a_m), one), tm1),
                          mm(tm1, ms(self.gamma_m, one)))))
        checks.append(("(phi delta_p - 1)(tau-1) = (tau-1)(phi-1)",
                       ms(mm(ms(mm(self.phi_m, self.delta_p_m), one), tm1),
                          mm(tm1, ms(self.phi_m, one)))))
        checks.append(("phi delta_p gamma delta_a commute",
                       ms(mm(mm(self.phi_m, self.delta_p_m),
                             mm(self.gamma_m, self.delta_a_m)),
                          mm(mm(self.gamma_m, self.delta_a_m),
                             mm(self.phi_m, self.delta_p_m)))))
        for name, defect in checks:
            if not la.mat_is_zero(defect):
                raise ModelError(f"PolDualModule violates {name}")

    def lie_matrices(self):
        return self.a_plus_m, self.u_minus_m

    def reduce_mod_nilradical(self):
        """The same module over A/(eps) (identity unless A is dual)."""
        if self.ring.variant != "dual":
            return self
        red = self.ring.reduced
        d1r = Character(red, self.d1.value_at_p.residue_reduce(), self.d1.tame,
                        self.d1.weight.residue_reduce(), self.d1.domain)
        d2r = Character(red, self.d2.value_at_p.residue_reduce(), self.d2.tame,
                        self.d2.weight.residue_reduce(), self.d2.domain)
        return PolDualModule(self.N, d1r, d2r, a_gen=self.a_gen, check=False)

    def matrices_json(self):
        def dump(m):
            return [[x.to_json() for x in row] for row in m]
        return {
            "N": self.N, "a_gen": self.a_gen,
            "sigma_a": dump(self.gamma_m), "phi": dump(self.phi_m),
            "tau": dump(self.tau_m), "delta_p": dump(self.delta_p_m),
            "delta_a": dump(self.delta_a_m), "a_plus": dump(self.a_plus_m),
            "u_minus": dump(self.u_minus_m),
        }


def tau_matrix_oracle(N: int, d1: Character, d2: Character):
    """Independent route to the tau-matrix via the dual action.

    tau mu_j : f -> (d/dx)^j [delta'(1+px) f(x/(1+px))] at x = 0 with
    delta' = d2 d1^{-1} chi^{-1}, computed by truncated series composition
    on a generic polynomial; entries c[h][j] satisfy tau(t^j) = sum c t^h.
    """
    ring = d1.ring
    p = ring.p
    chi = Character.cyclotomic(ring)
    dprime = d2 * d1.inverse() * chi.inverse()
    kprime = dprime.weight
    deg = N
    # W(x) = (1+px)^{k'} = sum binom(k', n) p^n x^n, truncated
    W = [_binom_elt(ring, kprime, n) * Fraction(p) ** n for n in range(deg + 1)]
    # u(x) = x/(1+px) = sum (-p)^i x^{i+1}
    u = [Fraction(0)] + [Fraction(-p) ** i for i in range(deg)]
    # powers of u as polynomials (rational coefficients)
    u_pows = [[Fraction(1)] + [Fraction(0)] * deg]
    for _ in range(deg):
        prev = u_pows[-1]
        new = [Fraction(0)] * (deg + 1)
        for i, a in enumerate(prev):
            if a == 0:
                continue
            for k, b in enumerate(u):
                if b == 0 or i + k > deg:
                    continue
                new[i + k] += a * b
        u_pows.append(new)
    out = la.zeros(ring, N + 1, N + 1)
    for k in range(N + 1):      # tau(mu_k)(f) = (d/dx)^k [W f(u)] at 0
        for s in range(k + 1):  # component on mu_s: (k!/s!) [x^k](W u^s)
            acc = ring.zero()
            for m in range(k + 1):
                c = u_pows[s][m]
                if c == 0:
                    continue
                acc = acc + W[k - m] * c
            out[s][k] = acc * Fraction(math.factorial(k), math.factorial(s))
    return out


class LocPolyModule:
    """Level-h, degree-<=D shadow of R^-(d1, d2) = LA(Zp, A) x delta.

    Basis: x^k 1_{i + p^h Zp}, 0 <= k <= D_work, indexed (i, k).  The tau
    and sigma actions are exact class permutations composed with truncated
    polynomial substitution; a truncation-loss flag records dropped degrees.
    """

    def __init__(self, h: int, D: int, d1: Character, d2: Character,
                 headroom: int = 2, a_gen=None, check=True):
        if h < 1:
            raise RobbaLabError("level h >= 1 required (pZp must be visible)")
        self.h = h
        self.D = D
        self.D_work = D + headroom
        self.d1, self.d2 = d1, d2
        self.ring = d1.ring
        self.delta = delta_of_pair(d1, d2)
        p = self.ring.p
        self.a_gen = primitive_generator(p) if a_gen is None else a_gen
        self.n_classes = p ** h
        self.dim = self.n_classes * (self.D_work + 1)
        self.truncation_loss = False
        self.kd = self.delta.weight
        self.phi_m = self._phi_matrix()
        self.tau_m = self._mobius_matrix(Fraction(1), Fraction(p))
        self.gamma_m = self.sigma(self.a_gen)
        self.a_plus_m = self._a_plus()
        self.u_minus_m = self._u_minus()
        if check:
            self._certify()

    def index(self, i, k):
        return i * (self.D_work + 1) + k

    def _char_series(self, z_scale: Fraction, length: int):
        """delta(1 + z_scale * x) as a polynomial in x (v_p(z_scale) >= 1)."""
        from .coefficients import rational_valuation
        ring = self.ring
        if rational_valuation(z_scale, ring.p) < 1:
            raise PrecisionError("character series needs v_p(scale) >= 1")
        return [_binom_elt(ring, self.kd, n) * z_scale ** n
                for n in range(length)]

    def _mobius_matrix(self, a: Fraction, b: Fraction):
        """Matrix of f -> delta(a - bx) f(x/(a - bx)) (needs v_p(b/a) >= 1)."""
        ring = self.ring
        p = ring.p
        D = self.D_work
        m = p ** self.h
        out = la.zeros(ring, self.dim, self.dim)
        # delta(a - bx) = delta(a) delta(1 - (b/a) x)
        scale = self.delta(a)
        series = self._char_series(-b / a, D + 1)
        # u(x) = x / (a - bx) = (x/a) sum ((b/a) x)^i
        u = [Fraction(0)] + [Fraction(b, a) ** i / a for i in range(D + 1)]
        u_pows = [[Fraction(1)] + [Fraction(0)] * D]
        for _ in range(D):
            prev = u_pows[-1]
            new = [Fraction(0)] * (D + 1)
            for i_, c in enumerate(prev):
                if c == 0:
                    continue
                for k_, d_ in enumerate(u):
                    if d_ == 0 or i_ + k_ > D:
                        continue
                    new[i_ + k_] += c * d_
            u_pows.append(new)
        for i in range(m):
            # x in class i lands at u(i); source class j = class(i/(a - b i))
            denom = Fraction(a) - Fraction(b) * i
            j = (Fraction(i) / denom)
            j_cls = (j.numerator * pow(j.denominator, -1, m)) % m
            for k in range(D + 1):
                # image of x^k 1_{j_cls}: delta(a-bx) u(x)^k on class i
                if any(c != 0 for c in u_pows[k][D + 1:]):
                    self.truncation_loss = True
                poly = [Fraction(0)] * (D + 1)
                for s, c in enumerate(u_pows[k][: D + 1]):
                    poly[s] = c
                # multiply by the character series, truncating at D
                for target in range(D + 1):
                    acc = ring.zero()
                    for s in range(target + 1):
                        if poly[s] == 0:
                            continue
                        acc = acc + series[target - s] * poly[s]
                    if not acc.is_exact_zero():
                        out[self.index(i, target)][self.index(j_cls, k)] = \
                            out[self.index(i, target)][self.index(j_cls, k)] \
                            + acc * scale
        return out

    def sigma(self, a):
        """(sigma_a f)(x) = delta(a) f(x/a): exact class permutation."""
        ring = self.ring
        a = Fraction(a)
        m = self.ring.p ** self.h
        out = la.zeros(ring, self.dim, self.dim)
        scale = self.delta(a)
        for i in range(m):
            # x in class i: x/a lies in class i/a
            inv_a = Fraction(1) / a
            j_cls = (i * inv_a.numerator * pow(inv_a.denominator, -1, m)) % m
            for k in range(self.D_work + 1):
                out[self.index(i, k)][self.index(j_cls, k)] = \
                    scale * (inv_a ** k)
        return out

    def _phi_matrix(self):
        """Level-h shadow of (phi f)(x) = delta(p) f(x/p) 1_{pZp}."""
        ring = self.ring
        p = ring.p
        m = p ** self.h
        out = la.zeros(ring, self.dim, self.dim)
        scale = self.delta(Fraction(p))
        for j in range(m):  # source class j; image supported on class pj mod m
            i = (p * j) % m
            for k in range(self.D_work + 1):
                out[self.index(i, k)][self.index(j, k)] = \
                    out[self.index(i, k)][self.index(j, k)] \
                    + scale * Fraction(1, p ** k)
        return out

    def _a_plus(self):
        """(a+ f)(x) = kappa(delta) f - x f'."""
        ring = self.ring
        out = la.zeros(ring, self.dim, self.dim)
        m = self.ring.p ** self.h
        for i in range(m):
            for k in range(self.D_work + 1):
                out[self.index(i, k)][self.index(i, k)] = self.kd - Fraction(k)
        return out

    def _u_minus(self):
        """(u- f)(x) = kappa(delta) x f - x^2 f'; raises degree by one."""
        ring = self.ring
        out = la.zeros(ring, self.dim, self.dim)
        m = self.ring.p ** self.h
        for i in range(m):
            for k in range(self.D_work + 1):
                if k + 1 <= self.D_work:
                    out[self.index(i, k + 1)][self.index(i, k)] = \
                        self.kd - Fraction(k)
                else:
                    self.truncation_loss = True
        return out

    def _certify(self):
        ring = self.ring
        mm, ms = la.mat_mul, la.mat_sub
        br = ms(mm(self.a_plus_m, self.u_minus_m),
                mm(self.u_minus_m, self.a_plus_m))
        defect = la.mat_add(br, self.u_minus_m)
        # the top truncated degree may violate the bracket; mask it out
        if not self._zero_off_top(defect):
            raise ModelError("LocPolyModule violates [a+, u-] = -u-")
        d2 = ms(la.mat_scale(mm(self.phi_m, self.u_minus_m), Fraction(ring.p)),
                mm(self.u_minus_m, self.phi_m))
        if not self._zero_off_top(d2):
            raise ModelError("LocPolyModule violates p phi u- = u- phi")

    def _zero_off_top(self, mat):
        top = {self.index(i, self.D_work)
               for i in range(self.ring.p ** self.h)}
        for r, row in enumerate(mat):
            for x in row:
                if not x.is_zero() and r not in top:
                    return False
        return True

    def lie_matrices(self):
        return self.a_plus_m, self.u_minus_m


class Rank2Extension:
    """M + A e with phi(e) = e + c_phi, gamma(e) = e + c_gamma."""

    def __init__(self, base, c_phi, c_gamma, tolerance=None):
        self.base = base
        self.ring = base.ring
        ring = self.ring
        n = base.dim
        # cocycle condition (phi - 1) c_gamma = (gamma - 1) c_phi
        one = la.identity(ring, n)
        lhs = la.mat_vec(la.mat_sub(base.phi_m, one), c_gamma)
        rhs = la.mat_vec(la.mat_sub(base.gamma_m, one), c_phi)
        defect = min((x - y).valuation() for x, y in zip(lhs, rhs))
        limit = tolerance if tolerance is not None else ring.prec - 4
        if defect < limit:
            raise ModelError(f"cocycle condition fails (valuation {defect})")
        self.c_phi = c_phi
        self.c_gamma = c_gamma
        self.phi_m = self._block(base.phi_m, c_phi)
        self.gamma_m = self._block(base.gamma_m, c_gamma)
        comm = la.mat_sub(la.mat_mul(self.phi_m, self.gamma_m),
                          la.mat_mul(self.gamma_m, self.phi_m))
        if not la.mat_is_zero(comm):
            raise ModelError("extension blocks do not commute")
        self.dim = n + 1

    def _block(self, mat, c):
        ring = self.ring
        n = self.base.dim
        out = la.zeros(ring, n + 1, n + 1)
        for i in range(n):
            for j in range(n):
                out[i][j] = mat[i][j]
            out[i][n] = c[i]
        out[n][n] = ring.one()
        return out

    def splits(self):
        """Split iff the cocycle is a coboundary: (g-1)d = c(g) solvable."""
        ring = self.ring
        n = self.base.dim
        one = la.identity(ring, n)
        stacked = la.mat_sub(self.base.phi_m, one) \
            + la.mat_sub(self.base.gamma_m, one)
        rhs = list(self.c_phi) + list(self.c_gamma)
        sol = la.solve(stacked, rhs, ring)
        return sol is not None

    def splits_by_fixed_vector(self):
        """Independent route: a phi- and gamma-fixed lift of e exists."""
        ring = self.ring
        n1 = self.dim
        one = la.identity(ring, n1)
        stacked = la.mat_sub(self.phi_m, one) + la.mat_sub(self.gamma_m, one)
        ker = la.kernel_basis(stacked, ring)
        if ring.variant == "dual":
            # blown-up coordinates: last block is the e-coordinate
            e = ring.e
            for v in ker:
                if not v[(n1 - 1) * e].is_zero():
                    return True
            # combinations: the e-block of the kernel must contain a unit
            span = [v[(n1 - 1) * e: n1 * e] for v in ker]
            return la._span_dim(span, ring.reduced) > 0 and any(
                not v[(n1 - 1) * e].is_zero() for v in ker)
        for v in ker:
            if v[n1 - 1].is_unit():
                return True
        # a unit combination could still exist; over a field the e-coordinate
        # functional is either identically zero on ker or hits a unit basis vec
        return False


def build_pol_dual(N, d1, d2, a_gen=None) -> PolDualModule:
    return PolDualModule(N, d1, d2, a_gen=a_gen)


def build_locpoly_model(h, D, d1, d2, headroom=2) -> LocPolyModule:
    return LocPolyModule(h, D, d1, d2, headroom=headroom)


def pol_dual_lie_matrices(M: PolDualModule):
    return M.lie_matrices()


def build_extension(base, c_phi, c_gamma) -> Rank2Extension:
    return Rank2Extension(base, c_phi, c_gamma)
