"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with  pytest tests/test_acceptance.py -s  to see the per-criterion lines.

Criterion 1 is split: the four attainable rows pass; the trivial-character
row is implemented faithfully as pinned ((1,1,1,0)) and FAILS by design,
because no finite model can produce it: the Koszul complex of an
(N+1)-dimensional module has ranks (n, 3n, 3n, n), forcing the Euler
characteristic of its cohomology to vanish, while 1 - 1 + 1 - 0 = 1.  The
computed finite-model value is (1, 2, 1, 0), which is also what the
consistency criterion 2 reproduces from the Lie side.
"""

import random
import time
from fractions import Fraction

import pytest

from robbalab.coefficients import INF, CoeffRing, PAdic
from robbalab.characters import Character
from robbalab import linalg as la
from robbalab import robba as rb
from robbalab import sheaf as sh
from robbalab import suites
from robbalab import twists as tw
from robbalab.complexes import (
    build_koszul,
    build_lie,
    cohomology,
    dims,
    lie_group_actions,
    module_quotient,
    ptilde_invariants,
)
from robbalab.finite_models import PolDualModule

P = 5
N = 6
PRECISION = 24
THRESHOLD = PRECISION - 4
R = CoeffRing(P, prec=PRECISION)
DUAL = CoeffRing(P, prec=PRECISION, variant="dual", e=2)
X = Character.x_power
TRIV = Character.trivial(R)

CRIT1_ROWS = [
    ("x^-1", X(R, -1), [1, 3, 3, 1]),
    ("x^-2", X(R, -2), [1, 3, 3, 1]),
    ("x^2", X(R, 2), [0, 0, 0, 0]),
    ("generic 1+p", Character.unramified(R, Fraction(1 + P)), [0, 0, 0, 0]),
]
TRIVIAL_PIN = [1, 1, 1, 0]       # the R^+-table value the criterion pins
TRIVIAL_COMPUTED = [1, 2, 1, 0]  # the finite-model value (chi = 0)


def report(num, ok, detail):
    print(f"\nCRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_dimension_tables():
    t0 = time.monotonic()
    got = {}
    for name, d1, _ in CRIT1_ROWS + [("trivial", TRIV, None)]:
        M = PolDualModule(N, d1, TRIV)
        got[name] = dims(build_koszul(M))
    elapsed = time.monotonic() - t0
    ok = all(got[name] == expect for name, _, expect in CRIT1_ROWS)
    ok = ok and elapsed < 10.0
    trivial_ok = got["trivial"] == TRIVIAL_PIN
    report(1, ok and trivial_ok,
           f"dimension tables p={P}, N={N} in {elapsed:.2f}s; "
           f"x^-1,x^-2 -> (1,3,3,1), regular -> 0 rows: "
           f"{'ok' if ok else 'MISMATCH'}; trivial row computed "
           f"{got['trivial']} vs pinned {TRIVIAL_PIN}"
           + ("" if trivial_ok else " (unattainable: Euler characteristic "
              "of a finite complex vanishes; see README)"))
    assert ok, got
    assert got["trivial"] == TRIVIAL_COMPUTED  # the honest finite-model value


def test_criterion_1_trivial_row_as_stated():
    """Faithful implementation of the pinned trivial row; fails by design.

    (1,1,1,0) has Euler characteristic 1; the Koszul complex of a finite
    module has ranks (n,3n,3n,n), so chi(H) = 0.  The computed value is
    (1,2,1,0), consistent with the source's own H^1 lemma for x^{-i},
    i = 0, and with criterion 2.  Kept red on purpose: an honest mismatch
    surfaced, not reconciled.
    """
    M = PolDualModule(N, TRIV, TRIV)
    assert dims(build_koszul(M)) == TRIVIAL_PIN


def test_criterion_2_koszul_lie_consistency():
    ok = True
    detail = []
    for name, d1, _ in CRIT1_ROWS + [("trivial", TRIV, None)]:
        M = PolDualModule(N, d1, TRIV)
        kos = dims(build_koszul(M))
        lie = build_lie(M)
        actions = lie_group_actions(M, lie)
        inv = [ptilde_invariants(h, M, lie, actions=actions).dim
               for h in cohomology(lie)]
        if kos != inv:
            ok = False
        detail.append(f"{name}:{kos == inv}")
    report(2, ok, "P~-invariants of Lie cohomology reproduce Koszul dims "
           "on every instance, exactly (" + ", ".join(detail) + ")")
    assert ok


def _kernel_q_dim(mat, ring):
    return len(la.kernel_basis(mat, ring))


def test_criterion_3_aplus_building_blocks():
    ok = True
    # (a) ker/coker of (1 - alpha phi) on Pol*, exactly over Q ...
    for alpha, expect_idx in [(Fraction(1), 0), (Fraction(1, P * P), 2)]:
        M = PolDualModule(N, Character.unramified(R, alpha), TRIV)
        one = la.identity(R, M.dim)
        mat = la.mat_sub(one, M.phi_m)
        ker = la.kernel_basis(mat, R)
        per_index = [
            _kernel_q_dim([[R(1) - R(alpha * Fraction(P) ** i)]], R)
            for i in range(N + 1)]
        ok = ok and len(ker) == sum(per_index) == 1
        ok = ok and per_index[expect_idx] == 1
        ok = ok and not ker[0][expect_idx].is_zero()
        coker = module_quotient(mat, R)
        ok = ok and coker == sum(
            module_quotient([[R(1) - R(alpha * Fraction(P) ** i)]], R)
            for i in range(N + 1)) == 1
    # ... and over Qp[eps]/(eps^2) with alpha = 1 + eps (nontrivial Ann(eps))
    alpha_eps = DUAL(1) + DUAL.gen()
    M = PolDualModule(N, Character.unramified(DUAL, alpha_eps),
                      Character.trivial(DUAL))
    one = la.identity(DUAL, M.dim)
    mat = la.mat_sub(one, M.phi_m)
    ker = la.kernel_basis(mat, DUAL)  # blown-up Q-basis
    per_index = []
    for i in range(N + 1):
        entry = DUAL(1) - alpha_eps * Fraction(P) ** i
        per_index.append(len(la.kernel_basis([[entry]], DUAL)))
    ok = ok and len(ker) == sum(per_index) == 1  # Ann(eps) at i = 0 only
    q, r, t = module_quotient(mat, DUAL)
    ok = ok and (q, r, t) == (1, 0, 1)  # coker = A/(eps): pure eps-torsion
    # (b) the H^2 presentation + A/(1 - alpha p^-i, 1 - beta a^-i)
    a_gen = 2
    for d, is_power in [(TRIV, True), (X(R, 2), True),
                        (Character.unramified(R, Fraction(1 + P)), False)]:
        alpha, beta = d.value_at_p, d(Fraction(a_gen))
        total = 0
        for i in range(N + 1):
            pres = [[R(1) - alpha * Fraction(P) ** -i,
                     R(1) - beta * Fraction(a_gen) ** -i]]
            total += module_quotient(pres, R)
        ok = ok and ((total > 0) == is_power)
    report(3, ok, "ker/coker of (1 - alpha phi) match the per-index "
           "annihilator/quotient sums over Q and over Qp[eps]/(eps^2) "
           "(alpha = 1+eps); H^2 presentation nonzero exactly for x^i")
    assert ok


def _random_padic_window(rng, lo, hi):
    coeffs = {}
    for n in range(lo, hi + 1):
        unit = rng.randrange(1, P ** PRECISION)
        while unit % P == 0:
            unit = rng.randrange(1, P ** PRECISION)
        coeffs[n] = R.from_coords(
            [PAdic(P, exact=None, val=0, unit=unit, prec=PRECISION)])
    return rb.RobbaElement(R, coeffs)


def test_criterion_4_dictionary_identities():
    t0 = time.monotonic()
    rows = suites.dictionary_suite(R, seed=41, threshold=THRESHOLD)
    ok = all(r["pass"] for r in rows)
    # precision-bounded path: capped 24-digit coefficients, window [-12, 24]
    rng = random.Random(42)
    f = _random_padic_window(rng, -12, 24)
    d = f.depth()
    shifted = rb.rb_mul(f, rb.monomial(R, d))
    roundtrip = rb.rb_mul(rb.monomial(R, -d), rb.rb_psi(rb.rb_phi(shifted)))
    defect = rb.defect_valuation(roundtrip, f)
    ok = ok and defect >= THRESHOLD
    # Res partition of unity: per-coefficient precision tracking through the
    # depth-clearing path overstates the loss at depth 12, so evaluate on
    # the exact rational representatives of the capped coefficients (what
    # is stored is unit * p^v exactly); the identity is then certified
    # exactly rather than to a pessimistic bound.
    f_lift = rb.RobbaElement(R, {
        n: R(c.coords[0].unit * Fraction(P) ** c.coords[0].val)
        for n, c in f.coeffs.items()})
    total = rb.zero(R)
    for i in range(P):
        total = rb.rb_add(total, rb.rb_restrict(i, 1, f_lift, cap=72))
    defect2 = rb.defect_valuation(total, f_lift)
    ok = ok and defect2 >= THRESHOLD
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 5.0
    report(4, ok, f"psi o phi = id, sum Res = id, partial intertwinings and "
           f"the pairing grid at precision {PRECISION}, threshold "
           f"{THRESHOLD} digits, window [-12, 24], in {elapsed:.2f}s "
           f"(capped-coefficient defects {defect}, {defect2})")
    assert ok


def test_criterion_5_twist_involution_identities():
    rows = suites.twists_suite(R, seed=43, threshold=THRESHOLD)
    ok = all(r["pass"] for r in rows)
    names = {r["check"] for r in rows}
    for needed in ("m_(x^1) = partial^1", "m_(x^3) = partial^3",
                   "m_delta N-independence", "w_*^2 = id",
                   "partial w_* partial = w_*", "nabla w_* = -w_* nabla",
                   "w_* Res_a = Res_{1/a} w_*"):
        ok = ok and needed in names
    ok = ok and sum(1 for n in names if n.startswith("iota^2")) >= 2
    report(5, ok, "m_(x^k) = partial^k (k <= 3), m_delta N-independence, "
           "w_*^2 = id, partial/nabla/Res conjugations, m_delta w_* "
           "= w_* m_{delta^-1}, iota^2 = id for two pairs; threshold "
           f"{THRESHOLD} digits")
    assert ok


def test_criterion_6_sheaf_relation_fuzz():
    space = sh.SheafSpace(X(R, 2), TRIV)
    seed = 44
    samples = 20
    worst_all = INF
    ok = True
    relations = [
        ("w^2 = 1", [("w",), ("w",)], [], True),
        ("center vs w", [("center", 7), ("w",)], [("w",), ("center", 7)], True),
        ("center vs diag", [("center", 7), ("diag_unit", 2)],
         [("diag_unit", 2), ("center", 7)], True),
        ("center vs diag_p", [("center", 7), ("diag_p",)],
         [("diag_p",), ("center", 7)], False),
        ("center vs upper", [("center", 7), ("upper", P)],
         [("upper", P), ("center", 7)], False),
        ("diag multiplicativity", [("diag_unit", 2), ("diag_unit", 3)],
         [("diag_unit", 6)], True),
        ("u_b instance b=p: upper(p)^2 = upper(2p)",
         [("upper", P), ("upper", P)], [("upper", 2 * P)], False),
    ]
    for name, lhs, rhs, tails in relations:
        worst = sh.check_relation(space, lhs, rhs, samples=samples,
                                  seed=seed, with_tail=tails)
        worst_all = min(worst_all, worst)
        ok = ok and worst >= THRESHOLD
    # the diag(p,1)/psi bullet, per sample
    rng = random.Random(seed)
    p = Fraction(P)
    for _ in range(samples):
        e = sh.random_element(space, rng)
        out = sh.act([("diag_p",)], e)
        want = e.z2.psi().scale(space.omega(p) * space.d1(p).inverse())
        defect = min(sh._combo_valuation(out.z2.combo - want.combo),
                     out.defect)
        worst_all = min(worst_all, defect)
        ok = ok and defect >= THRESHOLD
    # pairing G-invariance on 10 samples
    pair_worst = INF
    for token in [("w",), ("center", 3), ("diag_unit", 2), ("diag_p",),
                  ("upper", P)]:
        worst = sh.pairing_invariance(space, token, samples=2, seed=seed)
        pair_worst = min(pair_worst, worst)
    ok = ok and pair_worst >= THRESHOLD
    report(6, ok, f"20 seeded samples per relation, min defect valuation "
           f"{worst_all}; pairing G-invariance on 10 samples, min defect "
           f"valuation {pair_worst}")
    assert ok


def test_criterion_7_extension_cocycle_correspondence():
    rows = suites.extension_suite(R, seed=45, n_samples=10)
    ok = all(r["pass"] for r in rows)
    report(7, ok, "build_extension splits iff the cocycle is a coboundary; "
           "10 random cocycles + 10 random coboundaries, two independent "
           "solve routes, zero false positives/negatives")
    assert ok


def test_criterion_8_nilpotent_base_change():
    triv_dual = Character.trivial(DUAL)
    instances = [("trivial", triv_dual), ("x^-1", X(DUAL, -1)),
                 ("x^-2", X(DUAL, -2)), ("x^2", X(DUAL, 2)),
                 ("generic 1+p", Character.unramified(DUAL, Fraction(1 + P)))]
    ok = True
    for name, d1 in instances:
        M = PolDualModule(N, d1, triv_dual)
        hs = cohomology(build_koszul(M))
        red_dims = dims(build_koszul(M.reduce_mod_nilradical()))
        for i in range(4):
            t_next = hs[i + 1].torsion if i + 1 < len(hs) else 0
            if red_dims[i] != hs[i].free_rank + hs[i].torsion + t_next:
                ok = False
    report(8, ok, "over Qp[eps]/(eps^2), dim H^i(M x A/(eps)) = "
           "free(H^i) + tors(H^i) + tors(H^{i+1}) exactly on every "
           "criterion-1 instance")
    assert ok
