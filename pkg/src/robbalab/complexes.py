"""Koszul, A+, twisted and Lie complexes with exact cohomology.

The four-term Koszul complex of the lower-triangular semigroup is

    0 -> M --X--> M^3 --Y--> M^3 --Z--> M -> 0
    X(x) = ((1-tau)x, (1-phi)x, (gamma-1)x)
    Y(x,y,z) = ((1-phi delta_p)x + (tau-1)y,
                (gamma delta_a - 1)x + (tau-1)z,
                (gamma-1)y + (phi-1)z)
    Z(x,y,z) = (gamma delta_a - 1)x + (phi delta_p - 1)y + (1-tau)z

and the Lie complex replaces (tau, phi-part twists) by (u-, a+) with the
p phi u- = u- phi and [a+, u-] = -u- corrections.  d o d = 0 is verified at
build time, exactly.

The group P~ = (units, 0; pZp, 1) acts on Lie cochains degree-wise:
sigma_a multiplies every slot containing the u--direction by a (adjoint
twist by chi), and tau acts by

    deg 1: (x, y, z) -> (tau x + p tau phi h z,  tau y - p tau z,  tau z)
    deg 2: (x, y, z) -> (tau x - p tau phi h y + p tau z,  tau y,  tau z)

with h = (tau^{1-p} - 1)/log(tau), a polynomial in the nilpotent log(tau).
These are chain maps on the nose (certified at build); the extra factor p
against the formal formula in the source material is forced by coboundary
preservation and is what makes the group/Lie comparison hold.
"""

from __future__ import annotations

from fractions import Fraction

from .coefficients import CoeffRing
from .errors import ModelError, RobbaLabError
from . import linalg as la


class ChainComplex:
    """Finite free complex: boundaries[i]: C_i -> C_{i+1} (column action)."""

    def __init__(self, ring: CoeffRing, boundaries, labels=None, check=True):
        self.ring = ring
        self.boundaries = boundaries
        self.labels = labels or [f"d{i}" for i in range(len(boundaries))]
        self.ranks = [la.mat_shape(b)[1] for b in boundaries]
        self.ranks.append(la.mat_shape(boundaries[-1])[0])
        if check:
            for i in range(len(boundaries) - 1):
                comp = la.mat_mul(boundaries[i + 1], boundaries[i])
                if not la.mat_is_zero(comp):
                    raise ModelError(
                        f"d_{i + 1} o d_{i} != 0 (defect valuation "
                        f"{la.mat_defect(comp)})")

    def euler_characteristic(self):
        return sum((-1) ** i * r for i, r in enumerate(self.ranks))


class CohomologySpace:
    """One cohomology group: dimension data plus chosen representatives."""

    def __init__(self, degree, dim, representatives, torsion=None,
                 free_rank=None):
        self.degree = degree
        self.dim = dim              # Q-dimension (or A-dimension over fields)
        self.representatives = representatives
        self.torsion = torsion      # eps-torsion count over dual numbers
        self.free_rank = free_rank  # A-free rank over dual numbers

    def __repr__(self):
        if self.torsion is None:
            return f"H^{self.degree} (dim {self.dim})"
        return (f"H^{self.degree} (q-dim {self.dim} = 2*{self.free_rank} "
                f"free + {self.torsion} torsion)")


# -- builders -------------------------------------------------------------

def _blocks(ring, n, *ops):
    """Stack n x n blocks given as (row, col, matrix) into a block matrix."""
    rows = max(r for r, _, _ in ops) + 1
    cols = max(c for _, c, _ in ops) + 1
    grid = [[la.zeros(ring, n, n) for _ in range(cols)] for _ in range(rows)]
    for r, c, m in ops:
        grid[r][c] = la.mat_add(grid[r][c], m)
    return la.block_matrix(grid)


def build_koszul(M) -> ChainComplex:
    """C_{tau, phi, gamma}(M); needs tau, phi, gamma, delta_p, delta_a."""
    ring = M.ring
    n = M.dim
    one = la.identity(ring, n)
    tau, phi, gamma = M.tau_m, M.phi_m, M.gamma_m
    phi_dp = la.mat_mul(phi, M.delta_p_m)
    gamma_da = la.mat_mul(gamma, M.delta_a_m)
    m1_tau = la.mat_sub(one, tau)
    tau_m1 = la.mat_sub(tau, one)
    X = _blocks(ring, n, (0, 0, m1_tau), (1, 0, la.mat_sub(one, phi)),
                (2, 0, la.mat_sub(gamma, one)))
    Y = _blocks(ring, n,
                (0, 0, la.mat_sub(one, phi_dp)), (0, 1, tau_m1),
                (1, 0, la.mat_sub(gamma_da, one)), (1, 2, tau_m1),
                (2, 1, la.mat_sub(gamma, one)), (2, 2, la.mat_sub(phi, one)))
    Z = _blocks(ring, n, (0, 0, la.mat_sub(gamma_da, one)),
                (0, 1, la.mat_sub(phi_dp, one)), (0, 2, m1_tau))
    return ChainComplex(ring, [X, Y, Z], labels=["X", "Y", "Z"])


def build_aplus(M) -> ChainComplex:
    """C_{phi, gamma}: x -> ((1-phi)x, (gamma-1)x); (x,y) -> (g-1)x + (phi-1)y."""
    ring = M.ring
    n = M.dim
    one = la.identity(ring, n)
    E = _blocks(ring, n, (0, 0, la.mat_sub(one, M.phi_m)),
                (1, 0, la.mat_sub(M.gamma_m, one)))
    F = _blocks(ring, n, (0, 0, la.mat_sub(M.gamma_m, one)),
                (0, 1, la.mat_sub(M.phi_m, one)))
    return ChainComplex(ring, [E, F], labels=["E'", "F'"])


def build_aplus_twisted(M) -> ChainComplex:
    """The same with phi delta_p and gamma delta_a."""
    ring = M.ring
    n = M.dim
    one = la.identity(ring, n)
    phi_dp = la.mat_mul(M.phi_m, M.delta_p_m)
    gamma_da = la.mat_mul(M.gamma_m, M.delta_a_m)
    E = _blocks(ring, n, (0, 0, la.mat_sub(one, phi_dp)),
                (1, 0, la.mat_sub(gamma_da, one)))
    F = _blocks(ring, n, (0, 0, la.mat_sub(gamma_da, one)),
                (0, 1, la.mat_sub(phi_dp, one)))
    return ChainComplex(ring, [E, F], labels=["E''", "F''"])


def build_aplus_lie(M) -> ChainComplex:
    """x -> (nabla x, (phi-1)x); (a, b) -> (phi-1)a - nabla b, nabla = a+."""
    ring = M.ring
    n = M.dim
    one = la.identity(ring, n)
    nabla = M.a_plus_m
    phim1 = la.mat_sub(M.phi_m, one)
    E = _blocks(ring, n, (0, 0, nabla), (1, 0, phim1))
    F = _blocks(ring, n, (0, 0, phim1), (0, 1, la.mat_scale(nabla, -1)))
    return ChainComplex(ring, [E, F], labels=["Lie E", "Lie F"])


def build_lie(M) -> ChainComplex:
    """C_{u-, phi, a+}(M); certifies [a+,u-] = -u- and p phi u- = u- phi."""
    ring = M.ring
    n = M.dim
    one = la.identity(ring, n)
    phi, ap, um = M.phi_m, M.a_plus_m, M.u_minus_m
    br = la.mat_add(la.mat_sub(la.mat_mul(ap, um), la.mat_mul(um, ap)), um)
    rel = la.mat_sub(la.mat_scale(la.mat_mul(phi, um), Fraction(ring.p)),
                     la.mat_mul(um, phi))
    tol_ok = la.mat_is_zero(br) and la.mat_is_zero(rel)
    if not tol_ok and not getattr(M, "truncation_loss", False):
        raise ModelError("Lie commutation relations fail on this module")
    phim1 = la.mat_sub(phi, one)
    pphim1 = la.mat_sub(la.mat_scale(phi, Fraction(ring.p)), one)
    ap1 = la.mat_add(ap, one)
    Xp = _blocks(ring, n, (0, 0, phim1), (1, 0, ap), (2, 0, um))
    Yp = _blocks(ring, n,
                 (0, 0, ap), (0, 1, la.mat_scale(phim1, -1)),
                 (1, 1, um), (1, 2, la.mat_scale(ap1, -1)),
                 (2, 0, la.mat_scale(um, -1)), (2, 2, pphim1))
    Zp = _blocks(ring, n, (0, 0, um), (0, 1, pphim1), (0, 2, ap1))
    return ChainComplex(ring, [Xp, Yp, Zp], labels=["X'", "Y'", "Z'"])


# -- cohomology ------------------------------------------------------------

def kernel_basis(mat, ring):
    return la.kernel_basis(mat, ring)


def module_quotient(presentation, ring):
    """Invariants of coker(presentation): dim over a field, (q, r, t) duals."""
    rows = la.mat_shape(presentation)[0]
    if ring.variant == "dual":
        bm = la.blow_up(presentation, ring)
        im = [v for v in la.columns(bm)]
        qring = ring.reduced
        full = [[qring.one() if i == j else qring.zero()
                 for i in range(rows * ring.e)] for j in range(rows * ring.e)]
        return la.module_invariants(full, im, rows, ring)
    return rows - la.rank(presentation, ring)


def cohomology(C: ChainComplex):
    """All cohomology groups of a (three- or four-term) complex."""
    ring = C.ring
    n_deg = len(C.boundaries) + 1
    out = []
    if ring.variant == "dual":
        blown = [la.blow_up(b, ring) for b in C.boundaries]
        for i in range(n_deg):
            dim_amb = C.ranks[i] * ring.e
            if i == 0:
                ker = la.kernel_basis(blown[0], ring.reduced) \
                    if n_deg > 1 else []
                im = []
            else:
                ker = (la.kernel_basis(blown[i], ring.reduced)
                       if i < len(blown) else _full_basis(ring.reduced, dim_amb))
                im = la.columns(blown[i - 1])
            q, r, t = la.module_invariants(ker, im, C.ranks[i], ring)
            reps = la.quotient_representatives(ker, im, ring.reduced)
            out.append(CohomologySpace(i, q, reps, torsion=t, free_rank=r))
        return out
    for i in range(n_deg):
        dim_amb = C.ranks[i]
        ker = (la.kernel_basis(C.boundaries[i], ring)
               if i < len(C.boundaries) else _full_basis(ring, dim_amb))
        im = la.columns(C.boundaries[i - 1]) if i > 0 else []
        reps = la.quotient_representatives(ker, im, ring)
        out.append(CohomologySpace(i, len(reps), reps))
    return out


def _full_basis(ring, n):
    return [[ring.one() if i == j else ring.zero() for i in range(n)]
            for j in range(n)]


def dims(C: ChainComplex):
    return [h.dim for h in cohomology(C)]


# -- the P~-action on Lie cohomology ---------------------------------------

def _h_of_tau(M):
    """h = (tau^{1-p} - 1)/log(tau) as a matrix polynomial in log(tau)."""
    ring = M.ring
    p = ring.p
    L = la.mat_log_unipotent(M.tau_m, ring, M.dim + 1)
    # (e^{sL} - 1)/L = sum_{k>=1} s^k L^{k-1} / k!  with s = 1 - p
    s = Fraction(1 - p)
    coeffs = []
    fact = 1
    for k in range(1, M.dim + 3):
        fact *= k
        coeffs.append(s ** k / fact)
    return la.mat_pow_series(L, coeffs, ring)


def lie_group_actions(M, C: ChainComplex):
    """Chain-level matrices of sigma_{a_gen} and tau on C_{u-, phi, a+}(M).

    Certified: both are chain maps (T d = d T exactly); this pins the
    correction terms, including the factor p discussed in the module doc.
    """
    ring = M.ring
    n = M.dim
    a = Fraction(M.a_gen)
    S, Tau, Phi = M.gamma_m, M.tau_m, M.phi_m
    H = _h_of_tau(M)
    aS = la.mat_scale(S, a)
    z = la.zeros(ring, n, n)
    sigma_chain = [
        S,
        la.block_matrix([[S, z, z], [z, S, z], [z, z, aS]]),
        la.block_matrix([[S, z, z], [z, aS, z], [z, z, aS]]),
        aS,
    ]
    TPH = la.mat_mul(Tau, la.mat_mul(Phi, H))
    pTPH = la.mat_scale(TPH, Fraction(ring.p))
    pT = la.mat_scale(Tau, Fraction(ring.p))
    tau_chain = [
        Tau,
        la.block_matrix([[Tau, z, pTPH], [z, Tau, la.mat_scale(pT, -1)],
                         [z, z, Tau]]),
        la.block_matrix([[Tau, la.mat_scale(pTPH, -1), pT], [z, Tau, z],
                         [z, z, Tau]]),
        Tau,
    ]
    for name, chain in (("sigma", sigma_chain), ("tau", tau_chain)):
        for i, d in enumerate(C.boundaries):
            defect = la.mat_sub(la.mat_mul(chain[i + 1], d),
                                la.mat_mul(d, chain[i]))
            if not la.mat_is_zero(defect):
                raise ModelError(
                    f"{name}-action is not a chain map in degree {i} "
                    f"(defect valuation {la.mat_defect(defect)})")
    return sigma_chain, tau_chain


def induced_action(chain_op, H: CohomologySpace, C: ChainComplex):
    """Matrix of a chain map on the chosen representatives of H^i."""
    ring = C.ring
    i = H.degree
    im = la.columns(C.boundaries[i - 1]) if i > 0 else []
    cols = []
    for rep in H.representatives:
        image = la.mat_vec(chain_op, rep)
        cols.append(la.project_to_basis(image, H.representatives, im, ring))
    # columns are images: transpose into a matrix
    k = len(H.representatives)
    return [[cols[j][i2] for j in range(k)] for i2 in range(k)]


def ptilde_invariants(H: CohomologySpace, M, C: ChainComplex,
                      actions=None) -> CohomologySpace:
    """H^0(P~, H^i_Lie): joint invariants of sigma_{a_gen} and tau."""
    ring = C.ring
    if ring.variant == "dual":
        raise RobbaLabError("P~-invariants are computed on the exact "
                            "field path only")
    if not H.representatives:
        return CohomologySpace(H.degree, 0, [])
    sigma_chain, tau_chain = actions if actions else lie_group_actions(M, C)
    k = len(H.representatives)
    rho_s = induced_action(sigma_chain[H.degree], H, C)
    rho_t = induced_action(tau_chain[H.degree], H, C)
    one = la.identity(ring, k)
    stacked = la.mat_sub(rho_s, one) + la.mat_sub(rho_t, one)
    ker = la.kernel_basis(stacked, ring)
    # check the conjugation relation gamma tau gamma^{-1} = tau^{1/a} on H
    # when the induced tau is unipotent (it is on these modules)
    try:
        tau_pow = la.mat_binomial_power(rho_t, Fraction(1, M.a_gen), ring, k + 1)
        lhs = la.mat_mul(rho_s, rho_t)
        rhs = la.mat_mul(tau_pow, rho_s)
        if not la.mat_is_zero(la.mat_sub(lhs, rhs)):
            raise ModelError("induced actions violate gamma tau gamma^{-1} "
                             "= tau^{1/a} on cohomology")
    except RobbaLabError as err:
        if isinstance(err, ModelError):
            raise
    reps = []
    for v in ker:
        vec = None
        for c, rep in zip(v, H.representatives):
            term = [c * x for x in rep]
            vec = term if vec is None else [a + b for a, b in zip(vec, term)]
        reps.append(vec)
    return CohomologySpace(H.degree, len(ker), reps)


def koszul_lie_consistency(M):
    """dims of H^i(C_koszul) versus P~-invariants of H^i_Lie; returns both."""
    kos = dims(build_koszul(M))
    lie = build_lie(M)
    actions = lie_group_actions(M, lie)
    hs = cohomology(lie)
    inv = [ptilde_invariants(h, M, lie, actions=actions).dim for h in hs]
    return kos, inv


# -- the restriction map H^1(Koszul) -> H^1(A+) ----------------------------

def restriction_rank(M):
    """Rank and kernel/cokernel data of H^1(C_{tau,phi,gamma}) -> H^1(C_{phi,gamma}).

    The map forgets the tau-slot of a 1-cocycle (x, y, z) -> (y, z).
    """
    ring = M.ring
    kos = build_koszul(M)
    apl = build_aplus(M)
    n = M.dim
    if ring.variant == "dual":
        return _restriction_dual(M, kos, apl)
    h1k = cohomology(kos)[1]
    h1a = cohomology(apl)[1]
    im_a = la.columns(apl.boundaries[0])
    images = []
    for rep in h1k.representatives:
        images.append(rep[n:])  # drop the tau-slot
    # rank of the induced map: dim of span(images + im_a) - dim im_a
    rank_map = la._span_dim(images + im_a, ring) - la._span_dim(im_a, ring)
    return {
        "h1_koszul": h1k.dim,
        "h1_aplus": h1a.dim,
        "rank": rank_map,
        "kernel": h1k.dim - rank_map,
        "cokernel": h1a.dim - rank_map,
    }


def _restriction_dual(M, kos, apl):
    ring = M.ring
    n = M.dim
    e = ring.e
    h1k = cohomology(kos)[1]
    h1a = cohomology(apl)[1]
    im_a = la.columns(la.blow_up(apl.boundaries[0], ring))
    qring = ring.reduced
    images = [rep[n * e:] for rep in h1k.representatives]
    rank_map = la._span_dim(images + im_a, qring) - la._span_dim(im_a, qring)
    return {
        "h1_koszul": (h1k.dim, h1k.free_rank, h1k.torsion),
        "h1_aplus": (h1a.dim, h1a.free_rank, h1a.torsion),
        "q_rank": rank_map,
    }
