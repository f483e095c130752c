"""Complexes of cellular sheaves and their exact linear-algebra invariants.

A cellular sheaf assigns a finite-dimensional rational vector space to each
cell of an arrangement and a structure map to each covering pair c <= d
(maps point from deeper cells to adjacent bigger ones, like generization
maps of a constructible sheaf).  Complexes of such sheaves support:

* global sections over the box (including the compactly-supported theory
  for extensions by zero, since supports are kept strictly inside),
* stalks,
* derived hom, computed from the standard resolution over the face poset:
  the chain-indexed complex  prod_{c_0<...<c_r} Hom(F(c_0), G(c_r))  with
  the usual simplicial differential, totalized over the degrees of F and G
  (chains are graded by cell dimension, so their length is at most dim+1),
* Euler-level convolution of complexes of closed convex blocks, plus a
  fully graded fiberwise convolution oracle in dimension one.

An independent route to derived hom via elementary injective resolutions
(summands supported on single-cell closures) is provided for single
sheaves and used as a cross-check; its length never exceeds the ambient
dimension.

All ranks are computed by exact sparse elimination over the rationals.
"""

from collections import defaultdict
from fractions import Fraction

from .errors import InputError, RefinementRequiredError
from .linalg import dot, feasible_point, rational_nullspace


def sign_pow(exponent):
    """(-1)**exponent for any integer exponent (negative included)."""
    return -1 if exponent % 2 else 1


# ---------------------------------------------------------------------------
# graded dimensions


class GradedDims:
    """Finitely supported map degree -> dimension; the universal output of
    stalk, cohomology, and hom computations."""

    __slots__ = ("_d",)

    def __init__(self, data=None):
        d = {}
        for k, v in (data or {}).items():
            v = int(v)
            if v < 0:
                raise InputError("negative dimension in GradedDims")
            if v:
                d[int(k)] = v
        self._d = d

    def __getitem__(self, k):
        return self._d.get(k, 0)

    def items(self):
        return sorted(self._d.items())

    def degrees(self):
        return sorted(self._d)

    def total(self):
        return sum(self._d.values())

    def euler(self):
        return sum(sign_pow(k) * v for k, v in self._d.items())

    def shift(self, k):
        """Dims of the shifted object X[k]: new degree d holds old d + k."""
        return GradedDims({d - k: v for d, v in self._d.items()})

    def is_zero(self):
        return not self._d

    def __add__(self, other):
        out = dict(self._d)
        for k, v in other._d.items():
            out[k] = out.get(k, 0) + v
        return GradedDims(out)

    def __eq__(self, other):
        if isinstance(other, dict):
            other = GradedDims(other)
        return isinstance(other, GradedDims) and self._d == other._d

    def __hash__(self):
        return hash(tuple(sorted(self._d.items())))

    def __repr__(self):
        if not self._d:
            return "GradedDims(0)"
        inner = ", ".join(f"{k}: {v}" for k, v in self.items())
        return f"GradedDims({{{inner}}})"

    def to_json(self):
        return {str(k): v for k, v in self.items()}

    @classmethod
    def from_json(cls, data):
        return cls({int(k): v for k, v in data.items()})


# ---------------------------------------------------------------------------
# matrices (tuples of row tuples; entries int or Fraction)


def mat_zero(nrows, ncols):
    return tuple((0,) * ncols for _ in range(nrows))


def mat_id(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def mat_mul(a, b):
    # a: p x q, b: q x r -> p x r
    if not a or not b:
        return tuple(() for _ in a) if a else ()
    q = len(b)
    r = len(b[0]) if b else 0
    out = []
    for row in a:
        new = [0] * r
        for k, coeff in enumerate(row):
            if coeff:
                brow = b[k]
                for j in range(r):
                    if brow[j]:
                        new[j] += coeff * brow[j]
        out.append(tuple(new))
    return tuple(out)


def mat_is_zero(m):
    return all(all(x == 0 for x in row) for row in m)


def sparse_rank(rows):
    """Rank of a sparse matrix given as a list of {col: coeff} dicts.

    Incremental echelon: each row is reduced against the registered pivot
    rows in registration order (pivot rows never contain the pivot columns
    of earlier rows, so the smallest pivot index present strictly grows and
    the reduction terminates).
    """
    from math import gcd
    pivot_cols = []   # registration order
    pivot_rows = {}   # col -> reduced row dict
    pivot_index = {}  # col -> registration index
    rank = 0
    int_rows = []
    for r in rows:
        if not r:
            continue
        if any(type(v) is not int for v in r.values()):
            # clear denominators: row scaling does not change the rank
            denom = 1
            for v in r.values():
                if type(v) is not int:
                    denom = denom * v.denominator // gcd(denom, v.denominator)
            r = {c: int(v * denom) for c, v in r.items()}
        int_rows.append(r)
    for row in sorted(int_rows, key=len):
        row = dict(row)
        while row:
            best = None
            for c in row:
                idx = pivot_index.get(c)
                if idx is not None and (best is None or idx < best):
                    best = idx
            if best is None:
                break
            prow = pivot_rows[pivot_cols[best]]
            a = row[pivot_cols[best]]
            b = prow[pivot_cols[best]]
            if a % b == 0:
                f = a // b
                for c, v in prow.items():
                    new = row.get(c, 0) - f * v
                    if new:
                        row[c] = new
                    else:
                        row.pop(c, None)
            else:
                # fraction-free update: b*row - a*prow, then strip the gcd
                for c in row:
                    row[c] *= b
                for c, v in prow.items():
                    new = row.get(c, 0) - a * v
                    if new:
                        row[c] = new
                    else:
                        row.pop(c, None)
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if g > 1:
                    for c in row:
                        row[c] //= g
        if row:
            pc = None
            for c, v in row.items():
                if v == 1 or v == -1:
                    pc = c
                    break
            if pc is None:
                pc = min(row, key=lambda c: abs(row[c]))
            pivot_index[pc] = len(pivot_cols)
            pivot_cols.append(pc)
            pivot_rows[pc] = row
            rank += 1
    return rank


def _dense_rank_of_complex(dims, mats):
    """Graded dims of a small complex given per-degree dims and matrices.

    dims: {deg: dimension}; mats: {deg: matrix deg -> deg+1}.
    """
    ranks = {}
    for d, m in mats.items():
        rows = []
        for row in m:
            entry = {j: v for j, v in enumerate(row) if v}
            if entry:
                rows.append(entry)
        ranks[d] = sparse_rank(rows)
    out = {}
    for d, n in dims.items():
        h = n - ranks.get(d, 0) - ranks.get(d - 1, 0)
        if h:
            out[d] = h
    return GradedDims(out)


# ---------------------------------------------------------------------------
# cellular sheaves


class CellularSheaf:
    """Stalk dimensions per cell plus structure maps along covering pairs.

    Functoriality (all length-2 diamonds commute) is checked at build time;
    composite maps between any comparable pair are derived and memoized.
    """

    __slots__ = ("arr", "dims", "maps", "_composites")

    def __init__(self, arr, dims, maps, validate=True):
        self.arr = arr
        self.dims = list(dims)
        if len(self.dims) != len(arr.cells):
            raise InputError("need one stalk dimension per cell")
        self.maps = {}
        for (c, d), m in maps.items():
            m = tuple(tuple(row) for row in m)
            if len(m) != self.dims[d] or (m and len(m[0]) != self.dims[c]):
                raise InputError(f"structure map {c}->{d} has wrong shape")
            self.maps[(c, d)] = m
        self._composites = {}
        if validate:
            self._check_diamonds()

    def is_zero(self):
        return all(v == 0 for v in self.dims)

    def map(self, c, d):
        """Composite structure map between comparable cells c <= d."""
        if c == d:
            return mat_id(self.dims[c])
        key = (c, d)
        cached = self._composites.get(key)
        if cached is not None:
            return cached
        if self.dims[c] == 0 or self.dims[d] == 0:
            m = mat_zero(self.dims[d], self.dims[c])
            self._composites[key] = m
            return m
        arr = self.arr
        dim_c = arr.cells[c].dim
        if arr.cells[d].dim == dim_c + 1:
            m = self.maps.get(key, mat_zero(self.dims[d], self.dims[c]))
        else:
            m = None
            for e in arr.greater_ids(c):
                if arr.cells[e].dim == dim_c + 1 and arr.leq(e, d):
                    first = self.maps.get((c, e), mat_zero(self.dims[e], self.dims[c]))
                    m = mat_mul(self.map(e, d), first)
                    break
            if m is None:
                raise InputError(f"no saturated chain from cell {c} to {d}")
        self._composites[key] = m
        return m

    def _check_diamonds(self):
        arr = self.arr
        for c in range(len(self.dims)):
            if self.dims[c] == 0:
                continue
            ups = arr.greater_ids(c)
            dim_c = arr.cells[c].dim
            mids = [e for e in ups if arr.cells[e].dim == dim_c + 1]
            tops = [e for e in ups if arr.cells[e].dim == dim_c + 2]
            for t in tops:
                composite = None
                for e in mids:
                    if not arr.leq(e, t):
                        continue
                    m1 = self.maps.get((c, e), mat_zero(self.dims[e], self.dims[c]))
                    m2 = self.maps.get((e, t), mat_zero(self.dims[t], self.dims[e]))
                    comp = mat_mul(m2, m1)
                    if composite is None:
                        composite = comp
                    elif composite != comp:
                        raise InputError(
                            f"structure maps do not commute on the diamond "
                            f"{c} <= {e} <= {t}")

    def to_json(self):
        return {
            "dims": list(self.dims),
            "maps": {f"{c}->{d}": [[str(x) for x in row] for row in m]
                     for (c, d), m in sorted(self.maps.items()) if not mat_is_zero(m)},
        }


class SheafComplex:
    """Bounded complex of cellular sheaves with cellwise differentials."""

    __slots__ = ("arr", "terms", "diffs")

    def __init__(self, arr, terms, diffs=None, validate=True):
        self.arr = arr
        self.terms = {int(k): v for k, v in terms.items() if not v.is_zero() or True}
        for sheaf in self.terms.values():
            if sheaf.arr is not arr:
                raise InputError("all terms must live on the same arrangement")
        self.diffs = {}
        diffs = diffs or {}
        for k, cellmaps in diffs.items():
            k = int(k)
            src = self.terms.get(k)
            tgt = self.terms.get(k + 1)
            if src is None or tgt is None:
                continue
            clean = {}
            for cid, m in cellmaps.items():
                m = tuple(tuple(row) for row in m)
                if len(m) != tgt.dims[cid] or (m and len(m[0]) != src.dims[cid]):
                    raise InputError(f"differential at degree {k}, cell {cid} "
                                     "has wrong shape")
                if not mat_is_zero(m):
                    clean[cid] = m
            self.diffs[k] = clean
        if validate:
            self._validate()

    def degrees(self):
        return sorted(k for k, s in self.terms.items() if not s.is_zero())

    def term(self, k):
        return self.terms.get(k)

    def diff_at(self, k, cid):
        src = self.terms.get(k)
        tgt = self.terms.get(k + 1)
        if src is None or tgt is None:
            return None
        return self.diffs.get(k, {}).get(cid, mat_zero(tgt.dims[cid], src.dims[cid]))

    def _validate(self):
        arr = self.arr
        # naturality: differentials commute with structure maps
        for k in self.diffs:
            src = self.terms[k]
            tgt = self.terms[k + 1]
            for (c, d) in src.maps:
                left = mat_mul(self.diff_at(k, d), src.maps[(c, d)])
                right = mat_mul(tgt.maps.get((c, d), mat_zero(tgt.dims[d], tgt.dims[c])),
                                self.diff_at(k, c))
                if left != right:
                    raise InputError(f"differential at degree {k} is not a "
                                     f"natural transformation at {c}<={d}")
        # d^2 = 0 cellwise
        for k in self.diffs:
            if (k + 1) in self.diffs:
                for cid in range(len(arr.cells)):
                    m1 = self.diff_at(k, cid)
                    m2 = self.diff_at(k + 1, cid)
                    if m1 is not None and m2 is not None and not mat_is_zero(mat_mul(m2, m1)):
                        raise InputError(f"d^2 != 0 at degree {k}, cell {cid}")

    def to_json(self):
        return {
            "degrees": {str(k): sheaf.to_json() for k, sheaf in sorted(self.terms.items())},
            "differentials": {
                str(k): {str(cid): [[str(x) for x in row] for row in m]
                         for cid, m in sorted(cellmaps.items())}
                for k, cellmaps in sorted(self.diffs.items())},
        }


# ---------------------------------------------------------------------------
# constructors


def constant_on_cells(arr, cells, validate=False):
    """Rank-one constant sheaf on a downward-closed set of cells."""
    cells = set(cells)
    dims = [1 if c in cells else 0 for c in range(len(arr.cells))]
    maps = {}
    for c, d in arr.covers():
        if c in cells and d in cells:
            maps[(c, d)] = ((1,),)
    return CellularSheaf(arr, dims, maps, validate=validate)


def constant_on_closed(arr, constraints):
    """Pushforward of the constant sheaf from the closed region
    {x : <x,n> >= c}: stalk C on cells inside, identity maps within."""
    cells = arr.closed_cells_of(constraints)
    return constant_on_cells(arr, cells)


def costandard_on_open(arr, constraints):
    """Extension by zero of the constant sheaf from the open region
    {x : <x,n> > c}; callers apply any shift at the complex level."""
    cells = arr.open_cells_of(constraints)
    dims = [1 if c in cells else 0 for c in range(len(arr.cells))]
    maps = {}
    for c, d in arr.covers():
        if c in cells and d in cells:
            maps[(c, d)] = ((1,),)
    return CellularSheaf(arr, dims, maps, validate=False)


def constant_complex(arr):
    """The constant sheaf on the whole box, as a one-term complex."""
    sheaf = constant_on_cells(arr, range(len(arr.cells)))
    return SheafComplex(arr, {0: sheaf}, {}, validate=False)


def as_complex(sheaf, degree=0):
    return SheafComplex(sheaf.arr, {degree: sheaf}, {}, validate=False)


def skyscraper(arr, x):
    """Skyscraper at a point: the constant sheaf on its (closed) cell."""
    cell = arr.locate(x)
    cells = {cell.id}
    if arr.cells[cell.id].dim != 0:
        # a true skyscraper needs x to sit on a zero-dimensional cell
        raise InputError("skyscraper requires the point to be a vertex cell")
    return constant_on_cells(arr, cells)


def restrict_to_open(F, open_cells):
    """j_! j^! F for an open (upward-closed) union of cells."""
    open_cells = set(open_cells)
    for c in open_cells:
        for d in F.arr.greater_ids(c):
            if d not in open_cells:
                raise InputError("cell set is not upward closed (not open)")
    return _restrict(F, open_cells)


def restrict_to_closed(F, closed_cells):
    """i_* i^* F for a closed (downward-closed) union of cells."""
    closed_cells = set(closed_cells)
    for c in closed_cells:
        for d in range(len(F.arr.cells)):
            if F.arr.leq(d, c) and d != c and d not in closed_cells:
                raise InputError("cell set is not downward closed (not closed)")
    return _restrict(F, closed_cells)


def _restrict(F, cells):
    terms = {}
    diffs = {}
    for k, sheaf in F.terms.items():
        dims = [sheaf.dims[c] if c in cells else 0 for c in range(len(F.arr.cells))]
        maps = {pair: m for pair, m in sheaf.maps.items()
                if pair[0] in cells and pair[1] in cells}
        terms[k] = CellularSheaf(F.arr, dims, maps, validate=False)
    for k, cellmaps in F.diffs.items():
        diffs[k] = {cid: m for cid, m in cellmaps.items() if cid in cells}
    return SheafComplex(F.arr, terms, diffs, validate=False)


# ---------------------------------------------------------------------------
# triangulated plumbing


def shift(F, k):
    """F[k]: degree d holds the old F^{d+k}; differentials pick up (-1)^k."""
    sign = sign_pow(k)
    terms = {d - k: sheaf for d, sheaf in F.terms.items()}
    diffs = {}
    for d, cellmaps in F.diffs.items():
        diffs[d - k] = {cid: tuple(tuple(sign * x for x in row) for row in m)
                        for cid, m in cellmaps.items()}
    return SheafComplex(F.arr, terms, diffs, validate=False)


class ChainMap:
    """Degreewise natural transformation F -> G commuting with differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components, validate=True):
        self.source = source
        self.target = target
        self.components = {int(k): {int(c): tuple(tuple(row) for row in m)
                                    for c, m in comp.items()}
                           for k, comp in components.items()}
        if validate:
            self._validate()

    def component(self, k, cid):
        src = self.source.terms.get(k)
        tgt = self.target.terms.get(k)
        sdim = src.dims[cid] if src else 0
        tdim = tgt.dims[cid] if tgt else 0
        return self.components.get(k, {}).get(cid, mat_zero(tdim, sdim))

    def _validate(self):
        F, G = self.source, self.target
        if F.arr is not G.arr:
            raise InputError("chain map endpoints live on different arrangements")
        ncells = len(F.arr.cells)
        for k in set(F.terms) | set(G.terms):
            srcF, tgtF = F.terms.get(k), G.terms.get(k)
            if srcF is None or tgtF is None:
                continue
            for (c, d) in srcF.maps:
                left = mat_mul(self.component(k, d), srcF.maps[(c, d)])
                right = mat_mul(tgtF.maps.get((c, d), mat_zero(tgtF.dims[d], tgtF.dims[c])),
                                self.component(k, c))
                if left != right:
                    raise InputError(f"chain map is not natural at degree {k}")
        for k in set(F.diffs) | set(G.diffs):
            for cid in range(ncells):
                mF = F.diff_at(k, cid)
                mG = G.diff_at(k, cid)
                if mF is None and mG is None:
                    continue
                left = mat_mul(self.component(k + 1, cid),
                               mF if mF is not None else mat_zero(0, 0))
                right = mat_mul(mG if mG is not None else mat_zero(0, 0),
                                self.component(k, cid))
                lz = mat_is_zero(left) if left else True
                rz = mat_is_zero(right) if right else True
                if (lz, rz) == (True, True):
                    continue
                if mF is None or mG is None or left != right:
                    raise InputError(f"chain map does not commute with d at degree {k}")


def cone(phi):
    """Mapping cone of a chain map: C^d = F^{d+1} (+) G^d."""
    F, G = phi.source, phi.target
    arr = F.arr
    ncells = len(arr.cells)
    degs = set(d - 1 for d in F.terms) | set(G.terms)
    terms = {}
    for d in degs:
        fF = F.terms.get(d + 1)
        fG = G.terms.get(d)
        dims = [(fF.dims[c] if fF else 0) + (fG.dims[c] if fG else 0)
                for c in range(ncells)]
        maps = {}
        for (c, e) in set((fF.maps if fF else {})) | set((fG.maps if fG else {})):
            rF, cF = (fF.dims[e], fF.dims[c]) if fF else (0, 0)
            rG, cG = (fG.dims[e], fG.dims[c]) if fG else (0, 0)
            a = (fF.maps.get((c, e)) if fF else None) or mat_zero(rF, cF)
            b = (fG.maps.get((c, e)) if fG else None) or mat_zero(rG, cG)
            maps[(c, e)] = _block_diag_shaped([(a, rF, cF), (b, rG, cG)])
        terms[d] = CellularSheaf(arr, dims, maps, validate=False)
    diffs = {}
    for d in degs:
        if d + 1 not in terms:
            continue
        cellmaps = {}
        for cid in range(ncells):
            fF1 = F.terms.get(d + 1)
            fF2 = F.terms.get(d + 2)
            fG1 = G.terms.get(d)
            fG2 = G.terms.get(d + 1)
            a = F.diff_at(d + 1, cid)
            a = a if a is not None else mat_zero(fF2.dims[cid] if fF2 else 0,
                                                 fF1.dims[cid] if fF1 else 0)
            a = tuple(tuple(-x for x in row) for row in a)
            b = G.diff_at(d, cid)
            b = b if b is not None else mat_zero(fG2.dims[cid] if fG2 else 0,
                                                 fG1.dims[cid] if fG1 else 0)
            p = phi.component(d + 1, cid)
            nF1 = fF1.dims[cid] if fF1 else 0
            nF2 = fF2.dims[cid] if fF2 else 0
            nG1 = fG1.dims[cid] if fG1 else 0
            nG2 = fG2.dims[cid] if fG2 else 0
            rows = []
            for i in range(nF2):
                rows.append(tuple(a[i]) + (0,) * nG1)
            for i in range(nG2):
                rows.append(tuple(p[i]) + tuple(b[i]))
            if rows and any(any(x for x in row) for row in rows):
                cellmaps[cid] = tuple(rows)
        diffs[d] = cellmaps
    return SheafComplex(arr, terms, diffs, validate=False)


def _block_diag(a, b):
    ra = len(a)
    rb = len(b)
    ca = len(a[0]) if a else 0
    cb = len(b[0]) if b else 0
    rows = []
    for i in range(ra):
        rows.append(tuple(a[i]) + (0,) * cb)
    for i in range(rb):
        rows.append((0,) * ca + tuple(b[i]))
    return tuple(rows)


def _block_diag_shaped(blocks):
    """Block diagonal from (matrix, nrows, ncols) triples; zero-row blocks
    still contribute their column width."""
    total_c = sum(c for _, _, c in blocks)
    rows = []
    col_off = 0
    for m, r, c in blocks:
        for i in range(r):
            row = [0] * total_c
            for j in range(c):
                row[col_off + j] = m[i][j]
            rows.append(tuple(row))
        col_off += c
    return tuple(rows)


def identity_chain_map(F):
    comps = {}
    for k, sheaf in F.terms.items():
        comps[k] = {cid: mat_id(sheaf.dims[cid])
                    for cid in range(len(F.arr.cells)) if sheaf.dims[cid]}
    return ChainMap(F, F, comps, validate=False)


def direct_sum(complexes):
    if not complexes:
        raise InputError("direct_sum needs at least one summand")
    arr = complexes[0].arr
    ncells = len(arr.cells)
    degs = set()
    for F in complexes:
        if F.arr is not arr:
            raise InputError("summands live on different arrangements")
        degs |= set(F.terms)
    terms = {}
    diffs = {}
    for d in degs:
        dims = [sum(F.terms[d].dims[c] if d in F.terms else 0 for F in complexes)
                for c in range(ncells)]
        maps = {}
        pairs = set()
        for F in complexes:
            if d in F.terms:
                pairs |= set(F.terms[d].maps)
        for pair in pairs:
            blocks = []
            for F in complexes:
                if d in F.terms:
                    sheaf = F.terms[d]
                    r, c = sheaf.dims[pair[1]], sheaf.dims[pair[0]]
                    blocks.append((sheaf.maps.get(pair, mat_zero(r, c)), r, c))
                else:
                    blocks.append(((), 0, 0))
            maps[pair] = _block_diag_shaped(blocks)
        terms[d] = CellularSheaf(arr, dims, maps, validate=False)
    for d in degs:
        if d + 1 not in degs:
            continue
        cellmaps = {}
        for cid in range(ncells):
            blocks = []
            for F in complexes:
                src = F.terms.get(d)
                tgt = F.terms.get(d + 1)
                r = tgt.dims[cid] if tgt else 0
                c = src.dims[cid] if src else 0
                m = F.diff_at(d, cid) if (src and tgt) else None
                blocks.append((m if m is not None else mat_zero(r, c), r, c))
            m = _block_diag_shaped(blocks)
            if not mat_is_zero(m):
                cellmaps[cid] = m
        diffs[d] = cellmaps
    return SheafComplex(arr, terms, diffs, validate=False)


# ---------------------------------------------------------------------------
# stalks and derived invariants


def stalk(F, x):
    """Cohomology of the degreewise stalk complex at the cell containing x."""
    cell = F.arr.locate(x)
    cid = cell.id
    dims = {}
    mats = {}
    for k, sheaf in F.terms.items():
        if sheaf.dims[cid]:
            dims[k] = sheaf.dims[cid]
    for k in F.diffs:
        m = F.diff_at(k, cid)
        if m is not None:
            mats[k] = m
    return _dense_rank_of_complex(dims, mats)


def hom_complex(F, G):
    """Graded dims of the derived hom between two complexes.

    Both complexes must live on the same arrangement; callers refine first.
    """
    per_deg, mats = hom_total_complex(F, G)
    ranks = {k: sparse_rank(rows) for k, rows in mats.items()}
    out = {}
    for k, keys in per_deg.items():
        h = len(keys) - ranks.get(k, 0) - ranks.get(k - 1, 0)
        if h:
            out[k] = h
    return GradedDims(out)


def hom_total_complex(F, G):
    """The raw total complex behind hom_complex: per-degree basis lists and
    sparse differential rows (target-indexed)."""
    if F.arr is not G.arr:
        raise RefinementRequiredError("hom_complex needs both complexes on one "
                                      "arrangement; refine first")
    arr = F.arr
    chains = arr.chains()
    chain_index = {ch: i for i, ch in enumerate(chains)}

    f_degs = [(i, sheaf) for i, sheaf in F.terms.items() if not sheaf.is_zero()]
    g_degs = [(j, sheaf) for j, sheaf in G.terms.items() if not sheaf.is_zero()]
    if not f_degs or not g_degs:
        return {}, {}

    # basis of the total complex, grouped by total degree; elements are
    # (i, chain id, a, b) with a, b stalk coordinates at the chain's ends
    per_deg = defaultdict(list)
    groups = defaultdict(list)   # k -> [(i, ci, dF, dG, first position)]
    for ci, ch in enumerate(chains):
        c0, cr = ch[0], ch[-1]
        r = len(ch) - 1
        for i, Fi in f_degs:
            dF = Fi.dims[c0]
            if not dF:
                continue
            for j, Gj in g_degs:
                dG = Gj.dims[cr]
                if not dG:
                    continue
                k = j - i + r
                bucket = per_deg[k]
                groups[k].append((i, ci, dF, dG, len(bucket)))
                for a in range(dF):
                    for b in range(dG):
                        bucket.append((i, ci, a, b))
    index = {}
    for k, keys in per_deg.items():
        index[k] = {key: pos for pos, key in enumerate(keys)}

    # rows of the degree-k differential, indexed by the degree k+1 basis
    mats = {k: [dict() for _ in per_deg.get(k + 1, [])] for k in per_deg}
    fterm = dict(f_degs)
    gterm = dict(g_degs)

    for k1, grouped in groups.items():
        k = k1 - 1
        if k not in per_deg:
            continue
        rows = mats[k]
        src_index = index[k]
        for i, ci, dF, dG, pos0 in grouped:
            ch = chains[ci]
            r = len(ch) - 1
            j = k1 - r + i
            Fi = fterm[i]
            Gj = gterm[j]
            sgn_r = sign_pow(r)
            # --- simplicial (chain-extension) terms: same i, j; r-1 source
            if r >= 1:
                sub_first = chain_index[ch[1:]]
                fmap = Fi.map(ch[0], ch[1])
                dF1 = Fi.dims[ch[1]]
                for a in range(dF):
                    for b in range(dG):
                        row = rows[pos0 + a * dG + b]
                        for a2 in range(dF1):
                            coeff = fmap[a2][a]
                            if coeff:
                                src = src_index.get((i, sub_first, a2, b))
                                if src is not None:
                                    row[src] = row.get(src, 0) + coeff
                for t in range(1, r):
                    sub = chain_index[ch[:t] + ch[t + 1:]]
                    st = sign_pow(t)
                    for a in range(dF):
                        for b in range(dG):
                            src = src_index.get((i, sub, a, b))
                            if src is not None:
                                row = rows[pos0 + a * dG + b]
                                row[src] = row.get(src, 0) + st
                sub_last = chain_index[ch[:-1]]
                gmap = Gj.map(ch[-2], ch[-1])
                dGr = Gj.dims[ch[-2]]
                for a in range(dF):
                    for b in range(dG):
                        row = rows[pos0 + a * dG + b]
                        for b2 in range(dGr):
                            coeff = gmap[b][b2]
                            if coeff:
                                src = src_index.get((i, sub_last, a, b2))
                                if src is not None:
                                    row[src] = row.get(src, 0) + sgn_r * coeff
            # --- postcomposition with d_G: same chain, source j-1
            if j - 1 in gterm:
                dg = G.diffs.get(j - 1, {}).get(ch[-1])
                if dg:
                    dGsrc = gterm[j - 1].dims[ch[-1]]
                    for a in range(dF):
                        for b in range(dG):
                            row = rows[pos0 + a * dG + b]
                            for b2 in range(dGsrc):
                                coeff = dg[b][b2]
                                if coeff:
                                    src = src_index.get((i, ci, a, b2))
                                    if src is not None:
                                        row[src] = row.get(src, 0) + sgn_r * coeff
            # --- precomposition with d_F: same chain, source i+1
            if i + 1 in fterm:
                df = F.diffs.get(i, {}).get(ch[0])
                if df:
                    dFsrc = fterm[i + 1].dims[ch[0]]
                    sgn = sign_pow(r + j)
                    for a in range(dF):
                        for b in range(dG):
                            row = rows[pos0 + a * dG + b]
                            for a2 in range(dFsrc):
                                coeff = df[a2][a]
                                if coeff:
                                    src = src_index.get((i + 1, ci, a2, b))
                                    if src is not None:
                                        row[src] = row.get(src, 0) + sgn * coeff

    for k in mats:
        for row in mats[k]:
            for src in [c for c, v in row.items() if v == 0]:
                del row[src]
    return per_deg, mats


def cohomology(F):
    """Hypercohomology over the open box: hom from the constant sheaf."""
    return hom_complex(constant_complex(F.arr), F)


def euler_sections(F):
    return cohomology(F).euler()


# ---------------------------------------------------------------------------
# elementary injective resolutions (independent route, single sheaves)


class _Injective:
    """Direct sum of closure-supported identity sheaves: [(cell, mult)]."""

    __slots__ = ("arr", "summands")

    def __init__(self, arr, summands):
        self.arr = arr
        self.summands = [(c, m) for c, m in summands if m]

    def dims_at(self, cell):
        arr = self.arr
        return sum(m for c, m in self.summands
                   if c == cell or arr.leq(cell, c))

    def blocks_at(self, cell):
        """(summand index, offset, mult) triples contributing at a cell."""
        out = []
        off = 0
        for idx, (c, m) in enumerate(self.summands):
            if c == cell or self.arr.leq(cell, c):
                out.append((idx, off, m))
                off += m
        return out

    def total(self):
        return sum(m for _, m in self.summands)


def _socle_basis(sheaf, cid):
    """Basis (as rows) of the joint kernel of the covering maps out of cid."""
    arr = sheaf.arr
    n = sheaf.dims[cid]
    if n == 0:
        return []
    rows = []
    for d in arr.greater_ids(cid):
        if arr.cells[d].dim == arr.cells[cid].dim + 1 and sheaf.dims[d]:
            m = sheaf.maps.get((cid, d))
            if m:
                rows.extend(m)
    if not rows:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return rational_nullspace(rows, n)


def _projection_onto(vectors, n):
    """A matrix p with p v_i = e_i for the given independent vectors."""
    if not vectors:
        return mat_zero(0, n)
    # solve p * [v1 .. vk | complement] = [I | *] via inverse of a basis
    basis = [list(v) for v in vectors]
    chosen = list(basis)
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        from .linalg import mat_rank
        if mat_rank(chosen + [e]) > len(chosen):
            chosen.append(e)
        if len(chosen) == n:
            break
    from .linalg import invert_square
    minv = invert_square([list(map(Fraction, r)) for r in zip(*chosen)])
    return tuple(tuple(minv[i][j] for j in range(n)) for i in range(len(vectors)))


def elementary_injective_resolution(sheaf, max_steps=None):
    """Minimal-style injective resolution 0 -> G -> J^0 -> J^1 -> ...

    Returns (injectives, deltas): deltas[k] maps J^k -> J^{k+1} given
    cellwise.  The length never exceeds the ambient dimension.
    """
    arr = sheaf.arr
    ncells = len(arr.cells)
    injectives = []
    deltas = []
    current = sheaf
    prev_proj = None  # cellwise projection J^{k-1} -> current
    step = 0
    limit = max_steps if max_steps is not None else arr.dim
    while not current.is_zero():
        if step > limit:
            raise AssertionError("injective resolution exceeded expected length")
        socles = {c: _socle_basis(current, c) for c in range(ncells)}
        summands = [(c, len(socles[c])) for c in range(ncells) if socles[c]]
        J = _Injective(arr, summands)
        injectives.append(J)
        # embedding Phi: current -> J, cellwise
        proj = {c: _projection_onto(socles[c], current.dims[c]) for c in range(ncells)}
        phi = {}
        for e in range(ncells):
            if current.dims[e] == 0:
                phi[e] = mat_zero(J.dims_at(e), current.dims[e])
                continue
            rows = []
            for idx, off, m in J.blocks_at(e):
                c = J.summands[idx][0]
                comp = mat_mul(proj[c], current.map(e, c))
                rows.extend(comp)
            phi[e] = tuple(rows)
        if prev_proj is not None:
            delta = {e: mat_mul(phi[e], prev_proj[e]) for e in range(ncells)}
            deltas.append(delta)
        # cokernel of Phi with explicit bases
        new_dims = [0] * ncells
        proj_out = {}
        sections = {}
        for e in range(ncells):
            total = J.dims_at(e)
            img = [tuple(phi[e][i][j] for i in range(total))
                   for j in range(current.dims[e])]
            pcols, qproj = _quotient_data(img, total)
            new_dims[e] = len(pcols)
            proj_out[e] = qproj
            sections[e] = pcols
        new_maps = {}
        for (c, d) in arr.covers():
            if new_dims[c] == 0 or new_dims[d] == 0:
                continue
            jm = _injective_map(J, c, d)
            sec = _cols_to_matrix(sections[c], J.dims_at(c))
            new_maps[(c, d)] = mat_mul(proj_out[d], mat_mul(jm, sec))
        current = CellularSheaf(arr, new_dims, new_maps, validate=False)
        prev_proj = proj_out
        step += 1
    return injectives, deltas


def _quotient_data(img_cols, total):
    """Quotient of C^total by the span of img_cols.

    Returns (section_cols, projection): section_cols are representative
    columns for the quotient basis; projection maps C^total onto the
    quotient coordinates (kills the image).
    """
    from .linalg import mat_rank
    span = [list(map(Fraction, col)) for col in img_cols if any(col)]
    reps = []
    for j in range(total):
        e = [Fraction(int(i == j)) for i in range(total)]
        if mat_rank(span + reps + [e]) > len(_independent(span)) + len(reps):
            reps.append(e)
    # projection: coordinates w.r.t. [span basis | reps] restricted to reps
    base = _independent(span)
    full = base + reps
    # full spans C^total
    from .linalg import invert_square
    minv = invert_square([list(r) for r in zip(*full)])
    proj = tuple(tuple(minv[len(base) + i][j] for j in range(total))
                 for i in range(len(reps)))
    sections = [tuple(r) for r in reps]
    return sections, proj


def _independent(vectors):
    from .linalg import mat_rank
    out = []
    for v in vectors:
        if mat_rank(out + [v]) > len(out):
            out.append(v)
    return out


def _cols_to_matrix(cols, nrows):
    if not cols:
        return tuple(() for _ in range(nrows))
    return tuple(tuple(col[i] for col in cols) for i in range(nrows))


def _injective_map(J, c, d):
    """Structure map J(c) -> J(d) of an injective (projection onto the
    summands still alive at d)."""
    rows = []
    blocks_c = {idx: off for idx, off, m in J.blocks_at(c)}
    for idx, off_d, m in J.blocks_at(d):
        off_c = blocks_c[idx]
        for i in range(m):
            row = [0] * J.dims_at(c)
            row[off_c + i] = 1
            rows.append(tuple(row))
    return tuple(rows)


def hom_via_injectives(F_sheaf, G_sheaf):
    """Derived hom of two single sheaves via an injective resolution of the
    target; used as an independent cross-check of hom_complex."""
    arr = F_sheaf.arr
    injectives, deltas = elementary_injective_resolution(G_sheaf)
    dims = {}
    keys = {}
    for k, J in enumerate(injectives):
        basis = []
        for idx, (c, m) in enumerate(J.summands):
            for a in range(m):
                for b in range(F_sheaf.dims[c]):
                    basis.append((idx, a, b))
        keys[k] = {key: pos for pos, key in enumerate(basis)}
        dims[k] = len(basis)
    mats = {}
    for k, delta in enumerate(deltas):
        Jk, Jk1 = injectives[k], injectives[k + 1]
        rows = [dict() for _ in range(dims.get(k + 1, 0))]
        for idx1, (c1, m1) in enumerate(Jk1.summands):
            # block of delta landing in summand idx1, read off at cell c1
            if F_sheaf.dims[c1] == 0:
                continue
            dmat = delta[c1]
            off1 = next(off for i2, off, m in Jk1.blocks_at(c1) if i2 == idx1)
            for idx0, off0, m0 in Jk.blocks_at(c1):
                c0 = Jk.summands[idx0][0]
                fmap = F_sheaf.map(c1, c0)
                for a1 in range(m1):
                    for a0 in range(m0):
                        beta = dmat[off1 + a1][off0 + a0]
                        if beta == 0:
                            continue
                        for b1 in range(F_sheaf.dims[c1]):
                            for b0 in range(F_sheaf.dims[c0]):
                                coeff = beta * fmap[b0][b1]
                                if coeff == 0:
                                    continue
                                tgt = keys[k + 1][(idx1, a1, b1)]
                                src = keys[k][(idx0, a0, b0)]
                                rows[tgt][src] = rows[tgt].get(src, 0) + coeff
        mats[k] = rows
    ranks = {k: sparse_rank(rows) for k, rows in mats.items()}
    out = {}
    for k, n in dims.items():
        h = n - ranks.get(k, 0) - ranks.get(k - 1, 0)
        if h:
            out[k] = h
    return GradedDims(out)


# ---------------------------------------------------------------------------
# convolution


class BlockComplex:
    """Complex whose terms are constant sheaves on closed convex blocks.

    terms: {degree: [constraints]} with constraints a tuple of (normal,
    offset) meaning <x, normal> >= offset (empty tuple = whole space).
    maps: {(degree, src_idx, tgt_idx): coeff} for the degree -> degree+1
    components; each map is a restriction (target block inside source).
    """

    __slots__ = ("dim", "terms", "maps")

    def __init__(self, dim, terms, maps):
        self.dim = dim
        self.terms = {int(k): [tuple((tuple(n), Fraction(c)) for n, c in blk)
                               for blk in blocks]
                      for k, blocks in terms.items()}
        self.maps = {k: v for k, v in maps.items() if v}


_REC_CACHE = {}


def _recession_class(normals, dim):
    """(is_linear, nullity) for the cone {y : <y,n> >= 0 for all n}."""
    key = (tuple(sorted(normals)), dim)
    if key in _REC_CACHE:
        return _REC_CACHE[key]
    base = [(n, Fraction(0), False) for n in normals]
    linear = True
    for n in normals:
        if feasible_point(dim, base + [(n, Fraction(0), True)]) is not None:
            linear = False
            break
    from .linalg import mat_rank
    nullity = dim - (mat_rank(list(normals)) if normals else 0)
    _REC_CACHE[key] = (linear, nullity)
    return (linear, nullity)


def euler_compact_support(constraints, dim):
    """chi_c of the closed convex set {x : <x,n> >= c}: zero when empty or
    when the recession cone is not a linear subspace, else (-1)^dim(rec)."""
    ineqs = [(n, c, False) for n, c in constraints]
    if feasible_point(dim, ineqs) is None:
        return 0
    normals = tuple(n for n, _ in constraints)
    linear, nullity = _recession_class(normals, dim)
    if not linear:
        return 0
    return sign_pow(nullity)


def _fiber_constraints(q1, q2, x):
    """Constraints on y for y in Q1 and x - y in Q2."""
    out = list(q1)
    for n, c in q2:
        out.append((tuple(-a for a in n), c - dot(x, n)))
    return out


def convolution_euler_stalk(F, G, x):
    """Euler characteristic of the convolution stalk at x, via block fibers."""
    if not isinstance(F, BlockComplex) or not isinstance(G, BlockComplex):
        raise InputError("convolution_euler_stalk expects BlockComplex inputs")
    dim = F.dim
    x = tuple(Fraction(c) for c in x)
    total = 0
    for i, blocks1 in F.terms.items():
        for j, blocks2 in G.terms.items():
            sign = sign_pow(i + j)
            for q1 in blocks1:
                for q2 in blocks2:
                    cons = _fiber_constraints(q1, q2, x)
                    total += sign * euler_compact_support(cons, dim)
    return total


def convolution_fiber_1d(F, G, x):
    """Fully graded convolution stalk in dimension one.

    Restricts every block pair to the fiber line {(a, x-a)}, builds the
    compactly-supported cellular model of the resulting complex of constant
    sheaves on closed intervals, and totalizes.  Independent of hom_complex.
    """
    if F.dim != 1 or G.dim != 1:
        raise InputError("convolution_fiber_1d works in dimension one")
    x = Fraction(x[0] if isinstance(x, (tuple, list)) else x)

    def interval(cons):
        lo, hi = None, None
        for (n,), c in cons:
            if n > 0:
                b = Fraction(c, n)
                lo = b if lo is None else max(lo, b)
            else:
                b = Fraction(c, n)
                hi = b if hi is None else min(hi, b)
        if lo is not None and hi is not None and lo > hi:
            return None
        return (lo, hi)

    pairs = {}
    for i, blocks1 in F.terms.items():
        for alpha, q1 in enumerate(blocks1):
            for j, blocks2 in G.terms.items():
                for beta, q2 in enumerate(blocks2):
                    iv = interval(_fiber_constraints(q1, q2, (x,)))
                    pairs[(i, alpha, j, beta)] = iv

    breakpoints = sorted({b for iv in pairs.values() if iv
                          for b in iv if b is not None})
    # cells along the fiber line: vertices at breakpoints, open intervals
    cells = []  # (dim, sample)
    if breakpoints:
        cells.append((1, breakpoints[0] - 1))
        for idx, b in enumerate(breakpoints):
            cells.append((0, b))
            nxt = breakpoints[idx + 1] if idx + 1 < len(breakpoints) else None
            cells.append((1, (b + nxt) / 2 if nxt is not None else b + 1))
    else:
        cells.append((1, Fraction(0)))

    def member(iv, sample):
        if iv is None:
            return False
        lo, hi = iv
        return (lo is None or sample >= lo) and (hi is None or sample <= hi)

    # basis: (pair key, cell index) with total degree i + j + cell dim
    basis = {}
    per_deg = defaultdict(list)
    for key, iv in pairs.items():
        i, alpha, j, beta = key
        for ci, (cdim, sample) in enumerate(cells):
            if member(iv, sample):
                deg = i + j + cdim
                per_deg[deg].append((key, ci))
    index = {k: {key: pos for pos, key in enumerate(keys)}
             for k, keys in per_deg.items()}
    mats = {k: [dict() for _ in per_deg.get(k + 1, [])] for k in per_deg}

    def add(k, tgt, src, coeff):
        if coeff == 0:
            return
        srcpos = index.get(k, {}).get(src)
        if srcpos is None:
            return
        row = mats[k][index[k + 1][tgt]]
        row[srcpos] = row.get(srcpos, 0) + coeff
        if row[srcpos] == 0:
            del row[srcpos]

    for k in list(per_deg):
        if k + 1 not in per_deg:
            continue
        for tgt in per_deg[k + 1]:
            (i, alpha, j, beta), ci = tgt
            cdim, sample = cells[ci]
            t = i + j
            # cellular differential within the same block pair (vertex->edge)
            if cdim == 1:
                for vi, (vdim, vsample) in enumerate(cells):
                    if vdim != 0:
                        continue
                    # vertex adjacent to this edge?
                    if ci == vi + 1 or ci == vi - 1:
                        orient = 1 if ci == vi + 1 else -1  # +1: edge right of vertex
                        add(k, tgt, ((i, alpha, j, beta), vi), sign_pow(t) * orient)
            # sheaf differential on the F side
            for (deg, src_idx, tgt_idx), coeff in F.maps.items():
                if deg == i - 1 and tgt_idx == alpha:
                    add(k, tgt, ((i - 1, src_idx, j, beta), ci), coeff)
            # sheaf differential on the G side (Koszul sign (-1)^i)
            for (deg, src_idx, tgt_idx), coeff in G.maps.items():
                if deg == j - 1 and tgt_idx == beta:
                    add(k, tgt, ((i, alpha, j - 1, src_idx), ci),
                        sign_pow(i) * coeff)

    ranks = {k: sparse_rank(rows) for k, rows in mats.items()}
    out = {}
    for k, keys in per_deg.items():
        h = len(keys) - ranks.get(k, 0) - ranks.get(k - 1, 0)
        if h:
            out[k] = h
    return GradedDims(out)
