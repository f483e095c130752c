"""Exact hyperplane-arrangement cell complexes inside a bounding box.

Cells are the nonempty sign regions of the arrangement intersected with an
open box: relatively open convex polyhedra, one per realized sign vector.
The closure partial order is sign-vector conformality (c <= d iff c's sign
agrees with d's wherever c is nonzero), which is exact for arrangements.

Dimensions 1 and 2 use direct geometric construction (sorted breakpoints,
respectively line/vertex incidence with perturbed region samples); higher
dimensions fall back to sign enumeration with exact feasibility checks.
"""

from fractions import Fraction
from math import gcd

from .errors import InputError, OutOfDomainError, RefinementRequiredError
from .linalg import dot, feasible_point, mat_rank, primitive, solve_unique


class Hyperplane:
    """The locus <x, normal> = offset with a primitive integer normal."""

    __slots__ = ("normal", "offset")

    def __init__(self, normal, offset):
        normal = tuple(int(c) for c in normal)
        if all(c == 0 for c in normal):
            raise InputError("hyperplane normal must be nonzero")
        offset = Fraction(offset)
        g = 0
        for c in normal:
            g = gcd(g, abs(c))
        normal = tuple(c // g for c in normal)
        offset = offset / g
        # canonical sign: first nonzero coordinate positive
        lead = next(c for c in normal if c != 0)
        if lead < 0:
            normal = tuple(-c for c in normal)
            offset = -offset
        self.normal = normal
        self.offset = offset

    def key(self):
        return (self.normal, self.offset)

    def eval_sign(self, x):
        v = dot(x, self.normal) - self.offset
        return (v > 0) - (v < 0)

    def __eq__(self, other):
        return isinstance(other, Hyperplane) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Hyperplane({self.normal}, {self.offset})"


class Cell:
    """Relatively open cell: sign vector, dimension, interior sample point."""

    __slots__ = ("id", "dim", "signs", "sample")

    def __init__(self, cid, dim, signs, sample):
        self.id = cid
        self.dim = dim
        self.signs = signs
        self.sample = sample

    def __repr__(self):
        return f"Cell(id={self.id}, dim={self.dim}, sample={self.sample})"


class ArrangementComplex:
    """Face poset of the cells of a hyperplane arrangement in an open box."""

    def __init__(self, dim, hyperplanes, box, cells):
        self.dim = dim
        self.hyperplanes = hyperplanes          # tuple of Hyperplane
        self.box = box                          # tuple of (lo, hi)
        self.cells = cells                      # list of Cell, id = index
        self._by_signs = {c.signs: c.id for c in cells}
        self._hp_index = {h.key(): i for i, h in enumerate(hyperplanes)}
        self._greater = None
        self._chains = None
        self._covers = None

    # -- basic queries ----------------------------------------------------

    def in_box(self, x, strict=True):
        for xi, (lo, hi) in zip(x, self.box):
            if strict and not (lo < xi < hi):
                return False
            if not strict and not (lo <= xi <= hi):
                return False
        return True

    def locate(self, x):
        x = tuple(Fraction(c) for c in x)
        if not self.in_box(x):
            raise OutOfDomainError(f"{x} is outside the open box {self.box}")
        signs = tuple(h.eval_sign(x) for h in self.hyperplanes)
        cid = self._by_signs.get(signs)
        if cid is None:
            raise OutOfDomainError(f"no cell with sign vector {signs}")
        return self.cells[cid]

    def leq(self, c, d):
        """Closure order: c <= d iff c is contained in the closure of d."""
        sc = self.cells[c].signs if isinstance(c, int) else c.signs
        sd = self.cells[d].signs if isinstance(d, int) else d.signs
        return all(a == 0 or a == b for a, b in zip(sc, sd))

    def greater_ids(self, cid):
        """Ids of cells strictly greater than cid in the closure order."""
        if self._greater is None:
            self._build_order()
        return self._greater[cid]

    def covers(self):
        """Covering pairs (c, d): c <= d with dim d = dim c + 1."""
        if self._covers is None:
            out = []
            for c in self.cells:
                for did in self.greater_ids(c.id):
                    if self.cells[did].dim == c.dim + 1:
                        out.append((c.id, did))
            self._covers = out
        return self._covers

    def _build_order(self):
        self._greater = {c.id: [] for c in self.cells}
        for c in self.cells:
            for d in self.cells:
                if c.id != d.id and self.leq(c, d):
                    self._greater[c.id].append(d.id)

    def chains(self):
        """All strictly increasing chains of cells (tuples of ids).

        Chains are graded by cell dimension, so their length is at most
        dim+1; they feed the standard resolution used for derived homs.
        """
        if self._chains is None:
            out = []
            greater = {c.id: sorted(self.greater_ids(c.id)) for c in self.cells}

            def extend(chain):
                out.append(tuple(chain))
                for nxt in greater[chain[-1]]:
                    chain.append(nxt)
                    extend(chain)
                    chain.pop()

            for c in self.cells:
                extend([c.id])
            self._chains = out
        return self._chains

    # -- region queries -----------------------------------------------------

    def closed_cells_of(self, constraints):
        """Cells whose closure lies in {x : <x,n> >= c for all (n,c)}.

        Because constraints are aligned with the arrangement (or do not
        cut the box at all), a cell satisfies a constraint iff its sample
        point does.  The result is closed downward.
        """
        keep = []
        tests = []
        for normal, offset in constraints:
            normal = tuple(normal)
            offset = Fraction(offset)
            h = Hyperplane(normal, offset)
            if h.key() not in self._hp_index and self._cuts_box(normal, offset):
                raise RefinementRequiredError(
                    f"constraint <x,{normal}> >= {offset} is not aligned with "
                    "the arrangement")
            tests.append((normal, offset))
        for cell in self.cells:
            if all(dot(cell.sample, n) >= c for n, c in tests):
                keep.append(cell.id)
        return set(keep)

    def open_cells_of(self, constraints):
        """Cells inside the open region {x : <x,n> > c for all (n,c)}."""
        tests = []
        for normal, offset in constraints:
            normal = tuple(normal)
            offset = Fraction(offset)
            h = Hyperplane(normal, offset)
            if h.key() not in self._hp_index and self._cuts_box(normal, offset):
                raise RefinementRequiredError(
                    f"constraint <x,{normal}> > {offset} is not aligned with "
                    "the arrangement")
            tests.append((normal, offset))
        return {cell.id for cell in self.cells
                if all(dot(cell.sample, n) > c for n, c in tests)}

    def _cuts_box(self, normal, offset):
        lo = hi = Fraction(0)
        for ni, (a, b) in zip(normal, self.box):
            if ni >= 0:
                lo += ni * a
                hi += ni * b
            else:
                lo += ni * b
                hi += ni * a
        return lo < offset < hi

    # -- debugging ---------------------------------------------------------

    def poset_json(self):
        from .linalg import format_rational
        return {
            "dim": self.dim,
            "box": [[format_rational(a), format_rational(b)] for a, b in self.box],
            "hyperplanes": [{"normal": list(h.normal),
                             "offset": format_rational(h.offset)}
                            for h in self.hyperplanes],
            "cells": [{"id": c.id, "dim": c.dim,
                       "sample": [format_rational(v) for v in c.sample],
                       "signs": list(c.signs)} for c in self.cells],
            "order": [[c, d] for c, d in self.covers()],
        }


# ---------------------------------------------------------------------------
# construction


def build_arrangement(hyperplanes, box):
    """Build the cell complex of a hyperplane list inside an open box.

    hyperplanes: iterable of Hyperplane or (normal, offset) pairs.
    box: tuple of (lo, hi) per coordinate, lo < hi, exact rationals.
    """
    hps = []
    seen = set()
    for h in hyperplanes:
        if not isinstance(h, Hyperplane):
            h = Hyperplane(*h)
        if h.key() not in seen:
            seen.add(h.key())
            hps.append(h)
    hps.sort(key=lambda h: h.key())
    box = tuple((Fraction(a), Fraction(b)) for a, b in box)
    if not box:
        raise InputError("empty bounding box")
    for a, b in box:
        if not a < b:
            raise InputError(f"degenerate box interval ({a}, {b})")
    dim = len(box)
    for h in hps:
        if len(h.normal) != dim:
            raise InputError("hyperplane dimension does not match the box")
    if dim == 1:
        cells = _cells_1d(hps, box)
    elif dim == 2:
        cells = _cells_2d(hps, box)
    else:
        cells = _cells_generic(hps, box, dim)
    arr = ArrangementComplex(dim, tuple(hps), box, cells)
    euler = sum((-1) ** c.dim for c in cells)
    if euler != (-1) ** dim:
        raise AssertionError(f"arrangement Euler check failed: {euler}")
    return arr


def _signs_at(hps, x):
    return tuple(h.eval_sign(x) for h in hps)


def _finish_cells(hps, samples, dim):
    """Deduplicate samples by sign vector and build Cell objects."""
    by_signs = {}
    for s in samples:
        signs = _signs_at(hps, s)
        if signs not in by_signs:
            by_signs[signs] = s
    cells = []
    normals = [h.normal for h in hps]
    items = sorted(by_signs.items())
    for signs, sample in items:
        zero_normals = [normals[i] for i, sg in enumerate(signs) if sg == 0]
        cdim = dim - (mat_rank(zero_normals) if zero_normals else 0)
        cells.append((cdim, signs, sample))
    cells.sort()
    return [Cell(i, cdim, signs, sample) for i, (cdim, signs, sample) in enumerate(cells)]


def _cells_1d(hps, box):
    (lo, hi), = box
    breaks = sorted({h.offset / h.normal[0] for h in hps if lo < h.offset / h.normal[0] < hi})
    samples = []
    prev = lo
    for b in breaks:
        samples.append(((prev + b) / 2,))
        samples.append((b,))
        prev = b
    samples.append(((prev + hi) / 2,))
    return _finish_cells(hps, samples, 1)


def _cells_2d(hps, box):
    (x_lo, x_hi), (y_lo, y_hi) = box

    def crosses_box(h):
        corners = [(x_lo, y_lo), (x_lo, y_hi), (x_hi, y_lo), (x_hi, y_hi)]
        vals = [dot(c, h.normal) for c in corners]
        return min(vals) < h.offset < max(vals)

    cutting = [h for h in hps if crosses_box(h)]
    samples = [((x_lo + x_hi) / 2, (y_lo + y_hi) / 2)]

    # vertices: pairwise intersections strictly inside the box
    vertices = set()
    for i in range(len(cutting)):
        for j in range(i + 1, len(cutting)):
            a, b = cutting[i], cutting[j]
            sol = solve_unique([a.normal, b.normal], [a.offset, b.offset])
            if sol is None:
                continue
            if x_lo < sol[0] < x_hi and y_lo < sol[1] < y_hi:
                vertices.add(sol)
    samples.extend(vertices)

    # edges: per line, split its in-box parameter interval at vertices
    edge_samples = []
    for h in cutting:
        n = h.normal
        d = (-n[1], n[0])  # direction along the line
        # base point on the line
        if n[0] != 0:
            p0 = (Fraction(h.offset, n[0]), Fraction(0))
        else:
            p0 = (Fraction(0), Fraction(h.offset, n[1]))
        # open parameter range inside the box
        t_lo, t_hi = None, None
        ok = True
        for coord, (lo, hi) in ((0, (x_lo, x_hi)), (1, (y_lo, y_hi))):
            dc = d[coord]
            pc = p0[coord]
            if dc == 0:
                if not lo < pc < hi:
                    ok = False
                    break
            else:
                a = (lo - pc) / dc
                b = (hi - pc) / dc
                a, b = (a, b) if a < b else (b, a)
                t_lo = a if t_lo is None else max(t_lo, a)
                t_hi = b if t_hi is None else min(t_hi, b)
        if not ok or t_lo is None or not t_lo < t_hi:
            continue
        ts = sorted({(dot(v, d) - dot(p0, d)) / dot(d, d) for v in vertices
                     if dot(v, n) == h.offset})
        ts = [t for t in ts if t_lo < t < t_hi]
        cuts = [t_lo] + ts + [t_hi]
        for a, b in zip(cuts, cuts[1:]):
            t = (a + b) / 2
            edge_samples.append(((p0[0] + t * d[0], p0[1] + t * d[1]), h))
    samples.extend(p for p, _ in edge_samples)

    # regions: perturb every edge sample to both sides of its line
    for (px, py), h in edge_samples:
        n = h.normal
        bound = None
        for other in cutting:
            if other is h:
                continue
            denom = dot(n, other.normal)
            if denom == 0:
                continue
            t = (other.offset - dot((px, py), other.normal)) / denom
            if t != 0:
                t = abs(t)
                bound = t if bound is None else min(bound, t)
        for coord, (lo, hi) in ((0, (x_lo, x_hi)), (1, (y_lo, y_hi))):
            if n[coord] != 0:
                for lim in (lo, hi):
                    t = (lim - (px, py)[coord]) / n[coord]
                    if t != 0:
                        t = abs(t)
                        bound = t if bound is None else min(bound, t)
        delta = (bound / 2) if bound is not None else Fraction(1)
        samples.append((px + delta * n[0], py + delta * n[1]))
        samples.append((px - delta * n[0], py - delta * n[1]))

    return _finish_cells(hps, samples, 2)


def _cells_generic(hps, box, dim):
    """Sign-vector enumeration with exact feasibility (any dimension)."""
    box_ineqs = []
    for i, (lo, hi) in enumerate(box):
        e = tuple(int(i == j) for j in range(dim))
        box_ineqs.append((e, lo, True))
        box_ineqs.append((tuple(-c for c in e), -hi, True))
    regions = [((), ((sum(pair) / 2) for pair in box))]
    regions = [((), tuple((lo + hi) / 2 for lo, hi in box))]
    for k, h in enumerate(hps):
        new_regions = []
        for signs, sample in regions:
            s0 = h.eval_sign(sample)
            new_regions.append((signs + (s0,), sample))
            for s in (-1, 0, 1):
                if s == s0:
                    continue
                eqs = []
                ineqs = list(box_ineqs)
                for idx, sg in enumerate(signs + (s,)):
                    hh = hps[idx]
                    if sg == 0:
                        eqs.append((hh.normal, hh.offset))
                    elif sg > 0:
                        ineqs.append((hh.normal, hh.offset, True))
                    else:
                        ineqs.append((tuple(-c for c in hh.normal), -hh.offset, True))
                pt = feasible_point(dim, ineqs, eqs)
                if pt is not None:
                    new_regions.append((signs + (s,), pt))
        regions = new_regions
    return _finish_cells(hps, [sample for _, sample in regions], dim)
