"""Dual lattices and smooth complete simplicial fans, in exact arithmetic.

A fan lives in N_R = R^n and is described by its primitive ray generators
and its maximal cones (index sets into the ray list).  All lower cones are
derived by taking subsets, which is correct for simplicial cones.  Fans are
immutable after construction; every predicate is a pure function, so fans
can be shared freely between threads.

The supported regime is smooth complete simplicial fans with n <= 3 (the
completeness test combines the two-cones-per-wall condition with exact
point location of all 3^n sign-pattern directions, which suffices there).
"""

import json
from fractions import Fraction
from itertools import combinations, product

from .errors import IncompleteFanError, InputError, UnsupportedConeError
from .linalg import det, dot, invert_square, primitive, solve_unique


class Cone:
    """A simplicial cone in a fan, stored as a sorted tuple of ray indices.

    The zero cone is the empty tuple.  Generators are primitive lattice
    vectors; for smooth fans the generators of every maximal cone form a
    lattice basis.
    """

    __slots__ = ("fan", "rays", "dim")

    def __init__(self, fan, ray_indices):
        self.fan = fan
        self.rays = tuple(sorted(ray_indices))
        self.dim = len(self.rays)

    @property
    def generators(self):
        return tuple(self.fan.rays[i] for i in self.rays)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.fan is other.fan and self.rays == other.rays

    def __hash__(self):
        return hash((id(self.fan), self.rays))

    def __repr__(self):
        return f"Cone{self.rays}"


class Fan:
    """A complete simplicial fan given by rays and maximal cones."""

    def __init__(self, dim, rays, max_cones, name=None, validate=True):
        self.dim = int(dim)
        if self.dim < 1:
            raise InputError("fan dimension must be >= 1")
        self.name = name
        rays = [tuple(int(c) for c in r) for r in rays]
        for r in rays:
            if len(r) != self.dim:
                raise InputError("ray dimension mismatch")
            if all(c == 0 for c in r):
                raise InputError("zero vector is not a valid ray")
            if primitive(r) != r:
                raise InputError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise InputError("duplicate rays")
        self.rays = tuple(rays)
        mc = sorted({tuple(sorted(int(i) for i in cone)) for cone in max_cones})
        for cone in mc:
            if len(cone) != self.dim or len(set(cone)) != self.dim:
                raise InputError("maximal cones of a complete simplicial fan "
                                 f"need {self.dim} distinct rays, got {cone}")
            for i in cone:
                if not 0 <= i < len(rays):
                    raise InputError(f"ray index {i} out of range")
        self.max_cones = tuple(mc)
        # derive the full face-closed cone list, graded by dimension
        by_dim = {k: set() for k in range(self.dim + 1)}
        by_dim[0].add(())
        for cone in self.max_cones:
            for k in range(1, self.dim + 1):
                for sub in combinations(cone, k):
                    by_dim[k].add(tuple(sorted(sub)))
        self._cones_by_dim = {k: tuple(sorted(v)) for k, v in by_dim.items()}
        self._max_inverse = {}
        for cone in self.max_cones:
            basis = [self.rays[i] for i in cone]
            d = det(basis)
            if d == 0:
                raise InputError(f"maximal cone {cone} is degenerate")
            self._max_inverse[cone] = invert_square(basis)
        if validate:
            self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self):
        if not is_smooth(self):
            raise UnsupportedConeError(
                "fan is not smooth: some maximal cone is not a lattice basis")
        # maximal cone interiors must be pairwise disjoint
        for c1, c2 in combinations(self.max_cones, 2):
            if self._interiors_overlap(c1, c2):
                raise InputError(f"maximal cones {c1} and {c2} overlap")
        if not is_complete(self):
            raise IncompleteFanError("fan support does not cover N_R")

    def _interiors_overlap(self, c1, c2):
        from .linalg import feasible_point
        inv1 = self._max_inverse[c1]
        inv2 = self._max_inverse[c2]
        ineqs = []
        for inv in (inv1, inv2):
            # coefficients of x in the cone basis are the columns of inv
            for j in range(self.dim):
                coeffs = tuple(inv[i][j] for i in range(self.dim))
                ineqs.append((coeffs, Fraction(0), True))
        # exclude the origin by asking for a point on the slice where the
        # cone-1 coordinates sum to 1
        total = tuple(sum(inv1[i][j] for j in range(self.dim)) for i in range(self.dim))
        return feasible_point(self.dim, ineqs, eqs=[(total, Fraction(1))]) is not None

    # -- cone access -----------------------------------------------------

    def cones(self, k=None):
        """Cones of dimension k (all cones when k is None), as Cone objects."""
        if k is None:
            out = []
            for kk in range(self.dim + 1):
                out.extend(self.cones(kk))
            return out
        return [Cone(self, rays) for rays in self._cones_by_dim.get(k, ())]

    def cone(self, ray_indices):
        rays = tuple(sorted(ray_indices))
        if rays not in self._cones_by_dim.get(len(rays), ()):
            raise InputError(f"{rays} is not a cone of this fan")
        return Cone(self, rays)

    def max_cone_inverse(self, cone_rays):
        return self._max_inverse[tuple(sorted(cone_rays))]

    # -- point location --------------------------------------------------

    def cone_coordinates(self, cone_rays, v):
        """Coordinates of v in the generator basis of a maximal cone."""
        inv = self._max_inverse[tuple(sorted(cone_rays))]
        return tuple(dot(inv_col, v) for inv_col in _columns(inv))

    def locate(self, v):
        """A maximal cone containing v (fan must be complete)."""
        for cone in self.max_cones:
            if all(c >= 0 for c in self.cone_coordinates(cone, v)):
                return Cone(self, cone)
        raise IncompleteFanError(f"no maximal cone contains {v}")

    def contains(self, cone, v):
        """Exact membership of v in a (possibly lower-dimensional) cone."""
        cone = tuple(sorted(cone.rays if isinstance(cone, Cone) else cone))
        if not cone:
            return all(c == 0 for c in v)
        gens = [self.rays[i] for i in cone]
        # solve v = sum l_i g_i ; generators are linearly independent
        sol = _solve_rectangular(gens, v)
        if sol is None:
            return False
        return all(l >= 0 for l in sol)

    def __repr__(self):
        label = self.name or f"fan(dim={self.dim})"
        return f"<Fan {label}: {len(self.rays)} rays, {len(self.max_cones)} maximal cones>"

    def __hash__(self):
        return hash((self.dim, self.rays, self.max_cones))

    def __eq__(self, other):
        return (isinstance(other, Fan) and self.dim == other.dim
                and self.rays == other.rays and self.max_cones == other.max_cones)


def _columns(rows):
    return [tuple(r[j] for r in rows) for j in range(len(rows[0]))] if rows else []


def _solve_rectangular(cols, v):
    """Solve sum_i x_i * cols[i] = v for linearly independent cols, else None."""
    n = len(v)
    k = len(cols)
    rows = [[cols[i][j] for i in range(k)] for j in range(n)]
    aug = [list(map(Fraction, row)) + [Fraction(v[j])] for j, row in enumerate(rows)]
    piv_rows = []
    row = 0
    for col in range(k):
        piv = None
        for i in range(row, n):
            if aug[i][col] != 0:
                piv = i
                break
        if piv is None:
            return None
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(n):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        piv_rows.append(row)
        row += 1
    sol = tuple(aug[r][k] for r in piv_rows)
    # consistency of the remaining equations
    for i in range(row, n):
        if aug[i][k] != 0:
            return None
    return sol


# ---------------------------------------------------------------------------
# operations


def dual_cone(c):
    """H-representation of the dual cone: list of normals v with <x,v> >= 0.

    For a simplicial smooth cone the inequalities are exactly the primitive
    generators of c; the zero cone dualizes to all of M_R (empty list).
    """
    _require_smooth_cone(c)
    return [tuple(g) for g in c.generators]


def dual_cone_generators(c):
    """Generators of the dual cone, via a containing maximal cone's basis.

    If the cone's rays are the first k members of a lattice basis, the dual
    is spanned by the k matching dual-basis covectors plus the span of the
    remaining n-k (included as opposite pairs).
    """
    fan = c.fan
    container = next(mc for mc in fan.max_cones if set(c.rays) <= set(mc))
    ordered = list(c.rays) + [i for i in container if i not in c.rays]
    basis = [fan.rays[i] for i in ordered]
    inv = invert_square(basis)
    n = fan.dim
    duals = [tuple(inv[t][i] for t in range(n)) for i in range(n)]
    gens = list(duals[:c.dim])
    for w in duals[c.dim:]:
        gens.append(w)
        gens.append(tuple(-x for x in w))
    return [tuple(int(x) for x in w) for w in gens]


def faces(c):
    """All faces of a simplicial cone: one per subset of its generators."""
    fan = c.fan
    return [Cone(fan, sub) for k in range(c.dim + 1) for sub in combinations(c.rays, k)]


def is_smooth(fan):
    """True iff every maximal cone's generators form a lattice basis."""
    for cone in fan.max_cones:
        if abs(det([fan.rays[i] for i in cone])) != 1:
            return False
    return True


def cone_is_smooth(generators):
    """Unimodularity test for a single full-dimensional cone."""
    return abs(det(list(generators))) == 1


def is_complete(fan):
    """Exact completeness test.

    Combines (a) every (n-1)-cone bounds exactly two maximal cones with
    (b) point location of all 3^n sign-pattern directions.  Documented
    regime: simplicial fans with n <= 3.
    """
    try:
        wall_pairs(fan)
    except IncompleteFanError:
        return False
    for signs in product((-1, 0, 1), repeat=fan.dim):
        located = False
        for cone in fan.max_cones:
            if all(c >= 0 for c in fan.cone_coordinates(cone, signs)):
                located = True
                break
        if not located:
            return False
    return True


def wall_pairs(fan):
    """Each wall (cone of dimension n-1) with its two incident maximal cones."""
    out = []
    for wall in fan._cones_by_dim[fan.dim - 1]:
        incident = [mc for mc in fan.max_cones if set(wall) <= set(mc)]
        if len(incident) != 2:
            raise IncompleteFanError(
                f"wall {wall} bounds {len(incident)} maximal cones, expected 2")
        out.append((Cone(fan, wall), Cone(fan, incident[0]), Cone(fan, incident[1])))
    return out


def _require_smooth_cone(c):
    if c.dim == 0:
        return
    gens = list(c.generators)
    if _rank_of(gens) != len(gens):
        raise UnsupportedConeError(f"cone {c.rays} is not simplicial")
    if c.dim == c.fan.dim and abs(det(gens)) != 1:
        raise UnsupportedConeError(f"cone {c.rays} is not smooth")


def _rank_of(rows):
    from .linalg import mat_rank
    return mat_rank(rows)


# ---------------------------------------------------------------------------
# built-in fans and JSON loading

_BUILTINS = {
    "P1": {
        "dim": 1,
        "rays": [[1], [-1]],
        "max_cones": [[0], [1]],
    },
    "P2": {
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, -1]],
        "max_cones": [[0, 1], [1, 2], [2, 0]],
    },
    "P1xP1": {
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, 0], [0, -1]],
        "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]],
    },
    # Hirzebruch surfaces: v3 = (-1, -a) with the fourth ray closing the fan.
    "F2": {
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, -2], [0, -1]],
        "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]],
    },
    "F3": {
        "dim": 2,
        "rays": [[1, 0], [0, 1], [-1, -3], [0, -1]],
        "max_cones": [[0, 1], [1, 2], [2, 3], [3, 0]],
    },
}

_BUILTIN_CACHE = {}


def builtin_fan(name):
    if name not in _BUILTINS:
        raise InputError(f"unknown built-in fan {name!r}; choices: {sorted(_BUILTINS)}")
    if name not in _BUILTIN_CACHE:
        spec = _BUILTINS[name]
        _BUILTIN_CACHE[name] = Fan(spec["dim"], spec["rays"], spec["max_cones"], name=name)
    return _BUILTIN_CACHE[name]


def builtin_fan_names():
    return sorted(_BUILTINS)


def fan_from_dict(data, name=None, validate=True):
    try:
        return Fan(data["dim"], data["rays"], data["max_cones"],
                   name=name or data.get("name"), validate=validate)
    except KeyError as e:
        raise InputError(f"fan JSON is missing key {e}") from None


def load_fan(source, validate=True):
    """Load a fan from a built-in name, a JSON file path, or a dict."""
    if isinstance(source, Fan):
        return source
    if isinstance(source, dict):
        return fan_from_dict(source, validate=validate)
    if isinstance(source, str):
        if source in _BUILTINS:
            return builtin_fan(source)
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as e:
            raise InputError(f"cannot read fan {source!r}: {e}") from None
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON in {source!r}: {e}") from None
        return fan_from_dict(data, name=source, validate=validate)
    raise InputError(f"cannot load a fan from {source!r}")
