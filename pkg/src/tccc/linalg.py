"""Exact rational linear algebra and polyhedral feasibility.

Everything in this module is exact: entries are Python ints or
``fractions.Fraction``; no floating point is used anywhere.  Vectors are
tuples, matrices are lists of rows.  This is the arithmetic substrate for
the whole package, so the routines favour predictability over asymptotic
cleverness (instance sizes are desk scale).
"""

from fractions import Fraction
from math import gcd


# ---------------------------------------------------------------------------
# rationals and vectors


def parse_rational(value):
    """Accept int, Fraction, or a 'p/q' string and return a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def dot(u, v):
    if len(u) != len(v):
        raise ValueError("dimension mismatch in pairing")
    return sum(a * b for a, b in zip(u, v))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vneg(u):
    return tuple(-a for a in u)


def vscale(c, u):
    return tuple(c * a for a in u)


def is_zero_vector(u):
    return all(a == 0 for a in u)


def primitive(vec):
    """Scale an integer vector by 1/gcd so the entries are coprime.

    The sign is kept (the first nonzero entry keeps its sign).
    """
    ints = [int(a) for a in vec]
    if any(a != int(b) for a, b in zip(ints, vec)):
        raise ValueError("primitive() expects an integer vector")
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(a // g for a in ints)


# ---------------------------------------------------------------------------
# dense exact matrices


def mat_rank(rows):
    """Rank of a matrix (list of row sequences) by exact elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, len(m)):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for i in range(row + 1, len(m)):
            if m[i][col] != 0:
                f = Fraction(m[i][col], 1) / pv
                mi, mr = m[i], m[row]
                for j in range(col, ncols):
                    mi[j] = mi[j] - f * mr[j]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


def solve_unique(a_rows, b):
    """Solve A x = b for square A with a unique solution; None if singular."""
    n = len(a_rows)
    m = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a_rows, b)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col] / pv
                for j in range(col, n + 1):
                    m[i][j] -= f * m[col][j]
    return tuple(m[i][n] / m[i][i] for i in range(n))


def det(rows):
    """Exact determinant via fraction elimination."""
    n = len(rows)
    m = [list(map(Fraction, r)) for r in rows]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        pv = m[col][col]
        result *= pv
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = m[i][col] / pv
                for j in range(col, n):
                    m[i][j] -= f * m[col][j]
    return sign * result


def invert_square(a_rows):
    """Exact inverse of a nonsingular square matrix, as a list of row tuples."""
    n = len(a_rows)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a_rows)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            raise ValueError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [tuple(m[i][n:]) for i in range(n)]


def rational_nullspace(rows, ncols):
    """Basis of the right nullspace {x : A x = 0} over the rationals."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = None
        for i in range(row, len(m)):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        m[row] = [x / pv for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# integer lattice routines (Hermite normal form)


def hnf_rows(rows):
    """Row-style Hermite normal form of an integer matrix.

    Returns (H, pivots): H is a list of the nonzero rows, pivots the pivot
    column of each row.  Pivot entries are positive and entries above a
    pivot are reduced into [0, pivot).
    """
    m = [[int(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    row = 0
    pivots = []
    for col in range(ncols):
        # euclidean elimination below `row` in this column
        while True:
            nz = [i for i in range(row, len(m)) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][col]))
            m[row], m[i0] = m[i0], m[row]
            done = True
            for i in range(row + 1, len(m)):
                if m[i][col] != 0:
                    q = m[i][col] // m[row][col]
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if row < len(m) and m[row][col] != 0:
            if m[row][col] < 0:
                m[row] = [-a for a in m[row]]
            for i in range(row):
                q = m[i][col] // m[row][col]
                if q != 0:
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
            pivots.append(col)
            row += 1
            if row == len(m):
                break
    return [tuple(r) for r in m[:row]], pivots


def residue_mod_rowspace(h, pivots, vec):
    """Canonical representative of vec modulo the integer row space of h."""
    v = [int(x) for x in vec]
    for r, pc in enumerate(pivots):
        q = v[pc] // h[r][pc]
        if q != 0:
            v = [a - q * b for a, b in zip(v, h[r])]
    return tuple(v)


def integer_kernel(rows, ncols):
    """Basis of {x in Z^ncols : A x = 0} for an integer matrix A."""
    nrows = len(rows)
    # Work with the transpose augmented by the identity; rows whose A-part
    # vanishes after HNF give kernel vectors.
    aug = []
    for j in range(ncols):
        aug.append([int(rows[i][j]) for i in range(nrows)] + [int(i == j) for i in range(ncols)])
    m = [list(r) for r in aug]
    row = 0
    for col in range(nrows):
        while True:
            nz = [i for i in range(row, len(m)) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][col]))
            m[row], m[i0] = m[i0], m[row]
            done = True
            for i in range(row + 1, len(m)):
                if m[i][col] != 0:
                    q = m[i][col] // m[row][col]
                    m[i] = [a - q * b for a, b in zip(m[i], m[row])]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if row < len(m) and m[row][col] != 0:
            row += 1
    kernel = []
    for i in range(row, len(m)):
        if all(m[i][c] == 0 for c in range(nrows)):
            kernel.append(tuple(m[i][nrows:]))
    return kernel


# ---------------------------------------------------------------------------
# exact linear-inequality feasibility (Fourier-Motzkin)

# A constraint is (coeffs, rhs, strict) and means  <coeffs, y> >= rhs
# (strictly if strict is True).


def _eliminate_equalities(nvars, eqs, ineqs):
    """Substitute equalities away.  Returns (kept_vars, subst, new_ineqs).

    subst maps eliminated var -> (const, {kept var: coeff}) so that a point
    in the reduced space lifts to the full space.
    """
    eqs = [([Fraction(c) for c in cs], Fraction(r)) for cs, r in eqs]
    subst = {}
    used_rows = []
    for cs, rhs in eqs:
        # reduce against prior substitutions
        for var, (const, lin) in subst.items():
            c = cs[var]
            if c != 0:
                cs[var] = Fraction(0)
                rhs -= c * const
                for v2, co in lin.items():
                    cs[v2] += c * co
        piv = None
        for j in range(nvars - 1, -1, -1):
            if cs[j] != 0 and j not in subst:
                piv = j
                break
        if piv is None:
            if rhs != 0:
                return None  # inconsistent equalities
            continue
        pv = cs[piv]
        const = rhs / pv
        lin = {}
        for j in range(nvars):
            if j != piv and cs[j] != 0:
                lin[j] = -cs[j] / pv
        subst[piv] = (const, lin)
        used_rows.append(piv)
        # fold the fresh substitution into earlier ones
        for var in list(subst):
            if var == piv:
                continue
            const2, lin2 = subst[var]
            if piv in lin2:
                c = lin2.pop(piv)
                const2 += c * const
                for v2, co in lin.items():
                    lin2[v2] = lin2.get(v2, Fraction(0)) + c * co
                subst[var] = (const2, lin2)
    kept = [j for j in range(nvars) if j not in subst]
    new_ineqs = []
    for cs, rhs, strict in ineqs:
        cs = [Fraction(c) for c in cs]
        rhs = Fraction(rhs)
        for var, (const, lin) in subst.items():
            c = cs[var]
            if c != 0:
                cs[var] = Fraction(0)
                rhs -= c * const
                for v2, co in lin.items():
                    cs[v2] += c * co
        new_ineqs.append(([cs[j] for j in kept], rhs, strict))
    return kept, subst, new_ineqs


def feasible_point(nvars, ineqs, eqs=()):
    """Exact interior point of {y : eqs hold, ineqs hold}, or None.

    ineqs: iterable of (coeffs, rhs, strict) meaning <coeffs,y> >= rhs
    (> rhs when strict).  eqs: iterable of (coeffs, rhs).
    """
    prep = _eliminate_equalities(nvars, list(eqs), list(ineqs))
    if prep is None:
        return None
    kept, subst, work = prep
    d = len(kept)
    sol = _fm_solve(d, [(list(cs), rhs, strict) for cs, rhs, strict in work])
    if sol is None:
        return None
    point = [Fraction(0)] * nvars
    for idx, j in enumerate(kept):
        point[j] = sol[idx]
    for var, (const, lin) in subst.items():
        point[var] = const + sum(co * point[v2] for v2, co in lin.items())
    return tuple(point)


def _fm_solve(d, constraints):
    if d == 0:
        for cs, rhs, strict in constraints:
            val = Fraction(0)
            if (val < rhs) or (strict and val == rhs):
                return None
        return ()
    # eliminate the last variable
    lowers, uppers, keep = [], [], []
    for cs, rhs, strict in constraints:
        c = cs[d - 1]
        rest = cs[:d - 1]
        if c == 0:
            keep.append((rest, rhs, strict))
        elif c > 0:
            # y_d >= (rhs - <rest, y>) / c
            lowers.append(([x / c for x in rest], Fraction(rhs) / c, strict))
        else:
            uppers.append(([x / c for x in rest], Fraction(rhs) / c, strict))
    for lo_cs, lo_r, lo_s in lowers:
        for up_cs, up_r, up_s in uppers:
            # upper bound - lower bound >= 0 (strict if either side strict)
            cs = [u - l for u, l in zip(up_cs, lo_cs)]
            # upper: y <= up_r - <up_cs', y>; lower: y >= lo_r - <lo_cs', y>
            keep.append(([l - u for l, u in zip(lo_cs, up_cs)], lo_r - up_r, lo_s or up_s))
    sub = _fm_solve(d - 1, keep)
    if sub is None:
        return None
    lo_best = None  # (value, strict)
    for cs, rhs, strict in lowers:
        val = rhs - sum(c * y for c, y in zip(cs, sub))
        if lo_best is None or val > lo_best[0] or (val == lo_best[0] and strict):
            lo_best = (val, strict)
    up_best = None
    for cs, rhs, strict in uppers:
        val = rhs - sum(c * y for c, y in zip(cs, sub))
        if up_best is None or val < up_best[0] or (val == up_best[0] and strict):
            up_best = (val, strict)
    if lo_best is None and up_best is None:
        y = Fraction(0)
    elif lo_best is None:
        y = up_best[0] - 1
    elif up_best is None:
        y = lo_best[0] + 1
    else:
        lo, lo_s = lo_best
        up, up_s = up_best
        if lo > up or (lo == up and (lo_s or up_s)):
            return None
        y = lo if (lo == up) else (lo + up) / 2
    return sub + (y,)


def system_feasible(nvars, ineqs, eqs=()):
    return feasible_point(nvars, ineqs, eqs) is not None


# ---------------------------------------------------------------------------
# small exact convex hulls (dimension <= 2)


def convex_hull_2d(points):
    """Convex hull of exact 2-d points, counterclockwise, no duplicates."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all points equal / collinear fallback
        return pts
    return hull


def hull_inequalities(points, dim):
    """H-representation [(normal, offset)] with <x,normal> >= offset of the
    convex hull of exact points (dim 1 or 2; degenerate hulls allowed)."""
    if dim == 1:
        vals = [p[0] for p in points]
        return [((1,), min(vals)), ((-1,), -max(vals))]
    if dim != 2:
        raise ValueError("hull_inequalities supports dimension 1 and 2")
    hull = convex_hull_2d(points)
    if len(hull) == 1:
        p = hull[0]
        return [((1, 0), p[0]), ((-1, 0), -p[0]), ((0, 1), p[1]), ((0, -1), -p[1])]
    if len(hull) == 2:
        p, q = hull
        d = vsub(q, p)
        n = (-d[1], d[0])
        return [
            (d, dot(d, p)), (vneg(d), -dot(d, q)),
            (n, dot(n, p)), (vneg(n), -dot(n, p)),
        ]
    out = []
    for i, p in enumerate(hull):
        q = hull[(i + 1) % len(hull)]
        d = vsub(q, p)
        n = (-d[1], d[0])  # inward for a CCW polygon
        out.append((n, dot(n, p)))
    return out


def point_in_hull(x, hrep):
    return all(dot(x, n) >= c for n, c in hrep)


def iter_lattice_points(lo, hi):
    """Iterate integer points of a closed coordinate box (lo, hi tuples)."""
    import itertools
    ranges = []
    for a, b in zip(lo, hi):
        start = -((-Fraction(a)) // 1)  # ceil(a)
        stop = Fraction(b) // 1         # floor(b)
        if stop < start:
            return
        ranges.append(range(int(start), int(stop) + 1))
    yield from itertools.product(*ranges)
