"""Linear algebra over the coefficient rings.

Three paths: exact field elimination over Qp-exact or extension entries;
the dual numbers A = Qp[eps]/(eps^e), handled through the rational blow-up
(each entry becomes an e x e lower-triangular block) so kernels, images and
the (free rank, eps-torsion) invariants of subquotients stay exact; and a
capped-precision p-adic elimination with valuation pivoting, which treats
an entry as zero only when its valuation clears precision minus a guard and
aborts on pivots too close to the threshold.
"""

from __future__ import annotations

from fractions import Fraction

from .coefficients import CoeffElement, CoeffRing, PAdic
from .errors import PivotAmbiguityError, PrecisionError, RobbaLabError

PIVOT_GUARD = 2


def mat_shape(m):
    return len(m), len(m[0]) if m else 0


def identity(ring, n):
    return [[ring.one() if i == j else ring.zero() for j in range(n)]
            for i in range(n)]


def zeros(ring, rows, cols):
    return [[ring.zero() for _ in range(cols)] for _ in range(rows)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[x * s for x in row] for row in a]


def mat_mul(a, b):
    rows, inner = mat_shape(a)
    inner2, cols = mat_shape(b)
    if inner != inner2:
        raise RobbaLabError("matrix shape mismatch")
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = None
            for k in range(inner):
                term = a[i][k] * b[k][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    return [sum_list([row[k] * v[k] for k in range(len(v))]) for row in a]


def sum_list(xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = acc + x
    return acc


def mat_is_zero(a):
    return all(x.is_zero() for row in a for x in row)


def mat_defect(a):
    """min valuation over entries; +inf when all entries certified zero."""
    from .coefficients import INF
    best = INF
    for row in a:
        for x in row:
            best = min(best, x.valuation())
    return best


def block_matrix(blocks):
    """Assemble a matrix from a 2D list of equally-shaped blocks."""
    out = []
    for brow in blocks:
        rows = len(brow[0])
        for i in range(rows):
            row = []
            for blk in brow:
                row.extend(blk[i])
            out.append(row)
    return out


def mat_pow_series(mat, coeffs, ring):
    """sum coeffs[k] * mat^k (finite; for nilpotent series evaluations)."""
    n = len(mat)
    acc = zeros(ring, n, n)
    power = identity(ring, n)
    for k, c in enumerate(coeffs):
        if k:
            power = mat_mul(power, mat)
        if c == 0:
            continue
        acc = mat_add(acc, mat_scale(power, c))
    return acc


def nilpotency_index(mat, ring, bound):
    power = mat
    for k in range(1, bound + 2):
        if mat_is_zero(power):
            return k
        power = mat_mul(power, mat)
    return None


def mat_log_unipotent(mat, ring, bound):
    """log of a unipotent matrix: sum (-1)^(m+1) (M-1)^m / m."""
    n = len(mat)
    nm = mat_sub(mat, identity(ring, n))
    idx = nilpotency_index(nm, ring, bound)
    if idx is None:
        raise RobbaLabError("matrix is not unipotent within the bound")
    acc = zeros(ring, n, n)
    power = identity(ring, n)
    for m in range(1, idx + 1):
        power = mat_mul(power, nm)
        acc = mat_add(acc, mat_scale(power, Fraction((-1) ** (m + 1), m)))
    return acc


def mat_binomial_power(mat, exponent, ring, bound):
    """M^alpha = sum binom(alpha, k)(M-1)^k for unipotent M, alpha rational."""
    n = len(mat)
    nm = mat_sub(mat, identity(ring, n))
    idx = nilpotency_index(nm, ring, bound)
    if idx is None:
        raise RobbaLabError("matrix is not unipotent within the bound")
    acc = zeros(ring, n, n)
    power = identity(ring, n)
    coeff = Fraction(1)
    for k in range(idx + 1):
        if k:
            power = mat_mul(power, nm)
            coeff = coeff * (Fraction(exponent) - (k - 1)) / k
        acc = mat_add(acc, mat_scale(power, coeff))
    return acc


# -- path selection -----------------------------------------------------

def _entries_exact(mat):
    return all(x.is_exact() for row in mat for x in row)


def _path(mat, ring: CoeffRing):
    if ring.variant == "dual":
        if not _entries_exact(mat):
            raise PrecisionError("dual-number elimination needs exact entries")
        return "dual"
    if _entries_exact(mat):
        return "field"
    return "padic"


# -- exact field elimination ---------------------------------------------

def _rref(mat, ring):
    """Reduced row echelon form over a field; returns (rref, pivot cols)."""
    m = [row[:] for row in mat]
    rows, cols = mat_shape(m)
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if not m[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def _rref_padic(mat, ring):
    """Valuation-pivoted elimination with a zero threshold and guard."""
    m = [row[:] for row in mat]
    rows, cols = mat_shape(m)
    threshold = ring.prec - PIVOT_GUARD
    pivots = []
    r = 0
    for c in range(cols):
        best, best_v = None, None
        for i in range(r, rows):
            v = m[i][c].valuation()
            if best_v is None or v < best_v:
                best, best_v = i, v
        if best is None or best_v >= threshold:
            # all candidates are below precision: treated as zero
            continue
        if threshold - 1 <= best_v < threshold:
            raise PivotAmbiguityError(
                f"pivot valuation {best_v} within 1 digit of the zero "
                f"threshold {threshold}")
        m[r], m[best] = m[best], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def kernel_basis(mat, ring: CoeffRing):
    """Basis of the (right) kernel of the A-linear map given by ``mat``.

    Over the dual numbers the kernel is returned as a Q-basis of the
    eps-stable kernel subspace in blown-up coordinates of length
    e * cols; use :func:`module_invariants` for its module structure.
    """
    path = _path(mat, ring)
    if path == "dual":
        bm = blow_up(mat, ring)
        qring = ring.reduced
        return _kernel_field(bm, qring)
    if path == "padic":
        rref, pivots = _rref_padic(mat, ring)
        return _kernel_from_rref(rref, pivots, mat_shape(mat)[1], ring)
    rref, pivots = _rref(mat, ring)
    return _kernel_from_rref(rref, pivots, mat_shape(mat)[1], ring)


def _kernel_field(mat, ring):
    rref, pivots = _rref(mat, ring)
    return _kernel_from_rref(rref, pivots, mat_shape(mat)[1], ring)


def _kernel_from_rref(rref, pivots, cols, ring):
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ring.zero() for _ in range(cols)]
        v[f] = ring.one()
        for r, c in enumerate(pivots):
            v[c] = -rref[r][f]
        basis.append(v)
    return basis


def rank(mat, ring):
    path = _path(mat, ring)
    if path == "dual":
        raise RobbaLabError("rank over the dual numbers is not well defined; "
                            "use module_invariants")
    rref, pivots = (_rref_padic if path == "padic" else _rref)(mat, ring)
    return len(pivots)


def solve(mat, rhs, ring):
    """One solution of mat x = rhs, or None (exact paths and blow-up)."""
    path = _path(mat, ring)
    if path == "dual":
        bm = blow_up(mat, ring)
        brhs = []
        for x in rhs:
            brhs.extend(_coords_q(x))
        qring = ring.reduced
        sol = _solve_field(bm, [qring(c) for c in brhs], qring)
        if sol is None:
            return None
        e = ring.e
        cols = mat_shape(mat)[1]
        out = []
        for j in range(cols):
            coords = [sol[j * e + k].as_fraction() for k in range(e)]
            out.append(ring.from_coords(coords))
        return out
    solver = _solve_field
    return solver(mat, rhs, ring)


def _solve_field(mat, rhs, ring):
    rows, cols = mat_shape(mat)
    aug = [mat[i][:] + [rhs[i]] for i in range(rows)]
    rref, pivots = _rref(aug, ring)
    # inconsistent iff a pivot lands in the last column
    if cols in pivots:
        return None
    x = [ring.zero() for _ in range(cols)]
    for r, c in enumerate(pivots):
        x[c] = rref[r][cols]
    return x


# -- dual-number (eps) machinery -----------------------------------------

def _coords_q(x: CoeffElement):
    return [c.exact for c in x.coords]


def blow_up(mat, ring: CoeffRing):
    """Rational blow-up: entry sum a_k eps^k -> e x e block (shift matrix)."""
    e = ring.e
    qring = ring.reduced
    rows, cols = mat_shape(mat)
    out = zeros(qring, rows * e, cols * e)
    for i in range(rows):
        for j in range(cols):
            coords = _coords_q(mat[i][j])
            for k, a in enumerate(coords):
                if a == 0:
                    continue
                # eps^k * eps^s = eps^(k+s): block entry (k+s, s)
                for s in range(e - k):
                    out[i * e + k + s][j * e + s] = qring(a)
    return out


def eps_shift_matrix(n, ring: CoeffRing):
    """Multiplication by eps on A^n in blown-up coordinates."""
    e = ring.e
    qring = ring.reduced
    out = zeros(qring, n * e, n * e)
    for j in range(n):
        for s in range(e - 1):
            out[j * e + s + 1][j * e + s] = qring.one()
    return out


def _span_dim(vectors, ring):
    if not vectors:
        return 0
    return rank([list(col) for col in zip(*vectors)], ring)


def module_invariants(q_vectors_ker, q_vectors_im, n, ring: CoeffRing):
    """(q_dim, free rank, torsion count) of ker/im as an A-module.

    ``q_vectors_*`` are Q-bases in blown-up coordinates of length n*e; the
    quotient is H = ker/im with H = A^r + (A/eps-layers)^t; for e = 2 the
    decomposition is exactly A^r + (A/eps)^t with q_dim = 2r + t.
    """
    if ring.e != 2:
        raise RobbaLabError("module invariants implemented for e = 2")
    qring = ring.reduced
    dim_im = _span_dim(q_vectors_im, qring)
    dim_ker = _span_dim(q_vectors_ker, qring)
    q_dim = dim_ker - dim_im
    eps = eps_shift_matrix(n, ring)
    shifted = [mat_vec(eps, v) for v in q_vectors_ker]
    dim_eps = _span_dim(shifted + q_vectors_im, qring) - dim_im
    r = dim_eps
    t = q_dim - 2 * r
    if t < 0:
        raise RobbaLabError("inconsistent eps-module invariants")
    return q_dim, r, t


def columns(mat):
    rows, cols = mat_shape(mat)
    return [[mat[i][j] for i in range(rows)] for j in range(cols)]


def quotient_representatives(ker_vs, im_vs, ring):
    """Vectors from ker_vs spanning a complement of span(im_vs); field path."""
    reps = []
    current = list(im_vs)
    base = _span_dim(current, ring)
    for v in ker_vs:
        d = _span_dim(current + [v], ring)
        if d > base:
            reps.append(v)
            current.append(v)
            base = d
    return reps


def project_to_basis(vector, reps, im_vs, ring):
    """Coefficients of ``vector`` on ``reps`` modulo span(im_vs)."""
    cols = [list(v) for v in reps + im_vs]
    if not cols:
        return []
    mat = [list(row) for row in zip(*cols)]
    sol = _solve_field(mat, vector, ring)
    if sol is None:
        raise RobbaLabError("vector does not lie in the span: action does "
                            "not preserve the subquotient")
    return sol[: len(reps)]
