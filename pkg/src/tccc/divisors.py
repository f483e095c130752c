"""Toric divisors with their three equivalent views.

A divisor D = sum a_rho D_rho on a smooth complete fan is stored as its
ray coefficients; the equivalent piecewise-linear support function and the
vertex assignment chi (one vertex per maximal cone, glued along walls) are
derived exactly.  Ampleness is the wall-crossing strict-convexity test.

The module also builds the two special gadgets used by the verification
harness: the probe divisor of a point (floor(<x,v>)+1 coefficients) and
the affine one-parameter family interpolating from a thickened point to
the probe divisor through ample divisors.
"""

import json
from fractions import Fraction

from .errors import AmplenessRequiredError, InputError, PathConstructionError
from .lattice_fan import Cone, load_fan
from .linalg import (dot, hnf_rows, parse_rational, residue_mod_rowspace,
                     solve_unique, vadd, vneg)


class DivisorData:
    """One divisor, three views: coefficients, support function, vertices.

    vertices[sigma] is the unique chi with <chi, v_rho> = a_rho for every
    ray rho of the maximal cone sigma (solvable exactly by smoothness).
    """

    __slots__ = ("fan", "coeffs", "vertices")

    def __init__(self, fan, coeffs):
        self.fan = fan
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != len(fan.rays):
            raise InputError("need one coefficient per ray")
        self.coeffs = coeffs
        self.vertices = {}
        for mc in fan.max_cones:
            rows = [fan.rays[i] for i in mc]
            rhs = [coeffs[i] for i in mc]
            chi = solve_unique(rows, rhs)
            self.vertices[mc] = tuple(chi)

    # -- views -------------------------------------------------------------

    @property
    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)

    def vertex(self, cone):
        """chi_sigma for any cone: the vertex of a containing maximal cone.

        For non-maximal sigma this representative is well defined modulo
        sigma-perp; gluing makes any choice equivalent for shard purposes.
        """
        rays = cone.rays if isinstance(cone, Cone) else tuple(sorted(cone))
        for mc in self.fan.max_cones:
            if set(rays) <= set(mc):
                return self.vertices[mc]
        raise InputError(f"{rays} is not a cone of the fan")

    def vertex_list(self):
        return [self.vertices[mc] for mc in self.fan.max_cones]

    # -- arithmetic ----------------------------------------------------------

    def translate(self, m):
        return translate(self, m)

    def __add__(self, other):
        if self.fan is not other.fan and self.fan != other.fan:
            raise InputError("divisors live on different fans")
        return DivisorData(self.fan, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return DivisorData(self.fan, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return DivisorData(self.fan, [Fraction(c) * a for a in self.coeffs])

    def __eq__(self, other):
        return (isinstance(other, DivisorData) and self.fan == other.fan
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.fan, self.coeffs))

    def __repr__(self):
        return f"DivisorData({[str(c) for c in self.coeffs]})"

    def class_rep(self):
        """Canonical representative of the divisor class in Z^rays / M.

        The quotient is by the image of m -> (<m, v_rho>)_rho; reduction is
        by the Hermite form of that image lattice, so equal classes get
        identical tuples.
        """
        if not self.is_integral:
            raise InputError("divisor classes are computed for integral divisors")
        h, piv = _class_lattice(self.fan)
        return residue_mod_rowspace(h, piv, [int(c) for c in self.coeffs])


_CLASS_CACHE = {}


def _class_lattice(fan):
    key = fan
    if key not in _CLASS_CACHE:
        n = fan.dim
        rows = [[fan.rays[r][i] for r in range(len(fan.rays))] for i in range(n)]
        _CLASS_CACHE[key] = hnf_rows(rows)
    return _CLASS_CACHE[key]


# ---------------------------------------------------------------------------
# constructors


def divisor_from_coeffs(fan, coeffs):
    """Divisor from one rational coefficient per ray."""
    return DivisorData(fan, [parse_rational(c) for c in coeffs])


def divisor_from_vertices(fan, vertices):
    """Divisor from a full vertex assignment {max cone rays: point}.

    The assignment must glue: all maximal cones sharing a ray must give
    that ray the same coefficient.
    """
    coeffs = [None] * len(fan.rays)
    for mc, chi in vertices.items():
        mc = tuple(sorted(mc))
        if mc not in fan.max_cones:
            raise InputError(f"{mc} is not a maximal cone")
        chi = tuple(Fraction(c) for c in chi)
        for i in mc:
            a = dot(chi, fan.rays[i])
            if coeffs[i] is None:
                coeffs[i] = a
            elif coeffs[i] != a:
                raise InputError(f"vertex assignment does not glue along ray {i}")
    if any(c is None for c in coeffs):
        raise InputError("vertex assignment must cover every maximal cone")
    D = DivisorData(fan, coeffs)
    for mc, chi in vertices.items():
        if D.vertices[tuple(sorted(mc))] != tuple(Fraction(c) for c in chi):
            raise InputError("inconsistent vertex assignment")
    return D


def divisor_from_json(data, fan=None):
    """Divisor from {"fan": <name|file|dict>, "coeffs": {...} | [...]}.

    Rationals are 'p/q' strings or integers.  A fan passed explicitly
    overrides the JSON field.
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise InputError(f"invalid divisor JSON: {e}") from None
    if not isinstance(data, dict):
        raise InputError("divisor JSON must be an object")
    if fan is None:
        if "fan" not in data:
            raise InputError("divisor JSON needs a 'fan' field")
        fan = load_fan(data["fan"])
    raw = data.get("coeffs")
    if isinstance(raw, dict):
        coeffs = [Fraction(0)] * len(fan.rays)
        for key, val in raw.items():
            idx = int(key)
            if not 0 <= idx < len(fan.rays):
                raise InputError(f"ray index {idx} out of range")
            coeffs[idx] = parse_rational(val)
    elif isinstance(raw, (list, tuple)):
        if len(raw) != len(fan.rays):
            raise InputError("coefficient list length must match ray count")
        coeffs = [parse_rational(v) for v in raw]
    else:
        raise InputError("divisor JSON needs 'coeffs' as object or array")
    return DivisorData(fan, coeffs)


# ---------------------------------------------------------------------------
# the support function and convexity


def support_value(D, v):
    """Value of the piecewise-linear support function at v in N_R."""
    cone = D.fan.locate(v)
    return dot(D.vertices[cone.rays], v)


def _wall_excesses(D):
    """For each wall, <chi_sigma1, v2> - a_v2 and the mirror value.

    Convexity across a wall means the linear extension of one side
    undershoots the true coefficient on the opposite ray.
    """
    from .lattice_fan import wall_pairs
    out = []
    for wall, c1, c2 in wall_pairs(D.fan):
        v2 = next(i for i in c2.rays if i not in wall.rays)
        v1 = next(i for i in c1.rays if i not in wall.rays)
        e12 = dot(D.vertices[c1.rays], D.fan.rays[v2]) - D.coeffs[v2]
        e21 = dot(D.vertices[c2.rays], D.fan.rays[v1]) - D.coeffs[v1]
        out.append((wall, e12, e21))
    return out


def is_convex(D):
    return all(e12 <= 0 and e21 <= 0 for _, e12, e21 in _wall_excesses(D))


def is_strictly_convex(D):
    return all(e12 < 0 and e21 < 0 for _, e12, e21 in _wall_excesses(D))


class AmplePolytope:
    """Open polytope {x : <x, v_rho> < a_rho} of a strictly convex divisor."""

    __slots__ = ("divisor", "hrep", "vertices")

    def __init__(self, divisor, hrep, vertices):
        self.divisor = divisor
        self.hrep = hrep          # list of (normal, offset): <x,n> < offset
        self.vertices = vertices  # the chi_sigma, one per maximal cone

    def contains(self, x, closed=False):
        if closed:
            return all(dot(x, n) <= c for n, c in self.hrep)
        return all(dot(x, n) < c for n, c in self.hrep)

    def lattice_points_closed(self):
        lo = tuple(min(v[i] for v in self.vertices) for i in range(len(self.vertices[0])))
        hi = tuple(max(v[i] for v in self.vertices) for i in range(len(self.vertices[0])))
        from .linalg import iter_lattice_points
        return [p for p in iter_lattice_points(lo, hi) if self.contains(p, closed=True)]


def ample_polytope(D):
    if not is_strictly_convex(D):
        raise AmplenessRequiredError("divisor is not ample (support function "
                                     "is not strictly convex)")
    hrep = [(D.fan.rays[i], D.coeffs[i]) for i in range(len(D.fan.rays))]
    return AmplePolytope(D, hrep, D.vertex_list())


# ---------------------------------------------------------------------------
# probes, translates, projectivity


def probe_divisor(fan, x):
    """The integral divisor with coefficients floor(<x, v_rho>) + 1."""
    certify_projective(fan)
    coeffs = []
    for v in fan.rays:
        val = Fraction(dot(x, v))
        coeffs.append(val.numerator // val.denominator + 1)
    return DivisorData(fan, coeffs)


def translate(D, m):
    """Translate the vertex data by m: chi += m, a_rho += <m, v_rho>."""
    return DivisorData(D.fan, [a + dot(m, v) for a, v in zip(D.coeffs, D.fan.rays)])


_AMPLE_CACHE = {}


def certify_projective(fan, bound=3, positive=False):
    """A strictly convex integral divisor on the fan, found by bounded search.

    Raises PathConstructionError when the search bound is exhausted; for
    the supported surface fans a certificate exists with small entries.
    """
    key = (fan, positive)
    if key in _AMPLE_CACHE:
        return _AMPLE_CACHE[key]
    r = len(fan.rays)
    from itertools import product as iproduct
    lo = 1 if positive else -bound
    for shell in range(1, bound + 1):
        for coeffs in iproduct(range(lo, shell + 1), repeat=r):
            if max(abs(c) for c in coeffs) != shell:
                continue
            D = DivisorData(fan, coeffs)
            if is_strictly_convex(D):
                _AMPLE_CACHE[key] = D
                return D
    raise PathConstructionError(
        f"no strictly convex integral divisor with |coeffs| <= {bound} found")


# ---------------------------------------------------------------------------
# deformation paths


class DeformationPath:
    """Affine family a_{rho,s} from a thickened point to its probe divisor.

    Endpoints: a_{rho,0} = <x,v_rho> + (R+eps0) a_rho and
    a_{rho,1} = floor(<x,v_rho>) + 1 + R a_rho, with A = (a_rho) an ample
    reference with positive integer coefficients.
    """

    __slots__ = ("fan", "base", "reference", "eps0", "big_r", "start", "end")

    def __init__(self, fan, base, reference, eps0, big_r, start, end):
        self.fan = fan
        self.base = tuple(Fraction(c) for c in base)
        self.reference = reference
        self.eps0 = Fraction(eps0)
        self.big_r = int(big_r)
        self.start = tuple(start)  # a_{rho,0}
        self.end = tuple(end)      # a_{rho,1}

    def coeff_at(self, ray_index, s):
        s = Fraction(s)
        return (1 - s) * self.start[ray_index] + s * self.end[ray_index]

    def divisor_at(self, s):
        s = Fraction(s)
        return DivisorData(self.fan, [self.coeff_at(i, s) for i in range(len(self.start))])


def build_deformation_path(fan, x, reference, r_bound=64, eps0_override=None):
    """Deformation family for the probe of x against an ample reference A.

    eps0 is half the smallest gap (floor(<x,v>)+1 - <x,v>) / a_rho, which
    makes the strict sandwich automatic; R is the least positive integer
    with D_[x] + R A strictly convex.  eps0_override exists only to build
    deliberately broken paths in tests.
    """
    x = tuple(Fraction(c) for c in x)
    A = reference
    if not A.is_integral or any(c <= 0 for c in A.coeffs):
        raise InputError("reference divisor must be integral with positive coefficients")
    if not is_strictly_convex(A):
        raise AmplenessRequiredError("reference divisor must be ample")
    probe = probe_divisor(fan, x)
    gaps = []
    for i, v in enumerate(fan.rays):
        val = Fraction(dot(x, v))
        gaps.append((probe.coeffs[i] - val) / (2 * A.coeffs[i]))
    eps0 = min(gaps) if eps0_override is None else Fraction(eps0_override)
    big_r = None
    for r in range(1, r_bound + 1):
        cand = DivisorData(fan, [p + r * a for p, a in zip(probe.coeffs, A.coeffs)])
        if is_strictly_convex(cand):
            big_r = r
            break
    if big_r is None:
        raise PathConstructionError(f"no R <= {r_bound} makes the probe ample")
    start = tuple(Fraction(dot(x, v)) + (big_r + eps0) * A.coeffs[i]
                  for i, v in enumerate(fan.rays))
    end = tuple(Fraction(probe.coeffs[i]) + big_r * A.coeffs[i]
                for i in range(len(fan.rays)))
    return DeformationPath(fan, x, A, eps0, big_r, start, end)
