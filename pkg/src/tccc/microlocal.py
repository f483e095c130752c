"""Combinatorial singular-support bounds and deformation certificates.

The conical Lagrangian of a fan is the union over cones sigma of
(sigma-perp + M) x sigma inside T*M_R; a shard complex has its singular
support bounded from above by the pieces (chi_sigma + sigma-perp) x sigma.
Both are represented combinatorially (cone plus an integer basis of
sigma-perp in M) and all membership tests are exact.

Disjointness at infinity is certified through the per-ray integrality
criterion: any intersection of the two conical sets over a shared ray rho
forces <x, v_rho> = a_rho to have an integer value, so coefficients that
are all non-integral certify disjointness; otherwise the answer is
"unknown" (the criterion is one-sided).

Deformation paths get exact certificates: the affine coefficient family
of each ray is solved for integer crossings, none may lie strictly inside
the parameter interval, and ampleness is spot-checked at both endpoints
and the midpoint (the ample cone is convex, so the endpoints dominate).
"""

from fractions import Fraction

from .divisors import is_strictly_convex
from .linalg import dot, format_rational, integer_kernel


class LambdaSigma:
    """The fan's conical Lagrangian: one piece (sigma-perp + M) x sigma per
    cone, with sigma-perp recorded by an integer basis."""

    __slots__ = ("fan", "pieces")

    def __init__(self, fan, pieces):
        self.fan = fan
        self.pieces = pieces  # list of (cone rays tuple, perp basis tuple)


class SSEstimate:
    """Upper bound for the singular support of a shard complex: pieces
    (chi_sigma + sigma-perp) x sigma over all cones sigma."""

    __slots__ = ("divisor", "pieces")

    def __init__(self, divisor, pieces):
        self.divisor = divisor
        self.pieces = pieces  # list of (cone rays, apex, perp basis)


def _perp_basis(fan, rays):
    if not rays:
        return tuple()
    mat = [fan.rays[i] for i in rays]
    return tuple(integer_kernel(mat, fan.dim))


def lambda_sigma(fan):
    pieces = []
    for k in range(fan.dim + 1):
        for rays in fan._cones_by_dim[k]:
            pieces.append((rays, _perp_basis(fan, rays)))
    return LambdaSigma(fan, pieces)


def lambda_contains(fan, x, p):
    """Exact membership of (x, p) in the fan's conical Lagrangian.

    Some cone must contain the covector p while x lies in sigma-perp + M.
    For cones whose generators extend to a lattice basis (always true in a
    smooth fan) the lattice condition is integrality of <x, v> for every
    generator v.
    """
    x = tuple(Fraction(c) for c in x)
    p = tuple(Fraction(c) for c in p)
    for k in range(fan.dim + 1):
        for rays in fan._cones_by_dim[k]:
            if not fan.contains(rays, p):
                continue
            if all(Fraction(dot(x, fan.rays[i])).denominator == 1 for i in rays):
                return True
    return False


def ss_estimate(divisor):
    fan = divisor.fan
    pieces = []
    for k in range(fan.dim + 1):
        for rays in fan._cones_by_dim[k]:
            apex = divisor.vertex(rays) if rays else tuple([Fraction(0)] * fan.dim)
            pieces.append((rays, apex, _perp_basis(fan, rays)))
    return SSEstimate(divisor, pieces)


class DisjointnessResult:
    """Outcome of the at-infinity disjointness criterion.

    verdict is "disjoint" (with one fractional-part witness per ray) or
    "unknown" when some coefficient is an integer: the criterion is
    sufficient, never refuting.
    """

    __slots__ = ("verdict", "witnesses")

    def __init__(self, verdict, witnesses):
        self.verdict = verdict
        self.witnesses = witnesses

    @property
    def is_disjoint(self):
        return self.verdict == "disjoint"

    def to_json(self):
        return {"verdict": self.verdict,
                "witnesses": {str(i): format_rational(w)
                              for i, w in self.witnesses.items()}}


def disjoint_at_infinity(divisor):
    witnesses = {}
    verdict = "disjoint"
    for i, a in enumerate(divisor.coeffs):
        frac = a - (a.numerator // a.denominator)
        witnesses[i] = frac
        if frac == 0:
            verdict = "unknown"
    return DisjointnessResult(verdict, witnesses)


class PathCertificate:
    """Exact transcript of a deformation-path check."""

    __slots__ = ("path", "rays", "verdict", "_ample_spots")

    def __init__(self, path, rays, verdict):
        self.path = path
        self.rays = rays      # list of per-ray dicts
        self.verdict = verdict
        self._ample_spots = []

    def to_json(self):
        return {
            "rays": [
                {"rho": r["rho"],
                 "breakpoints": [format_rational(s) for s in r["breakpoints"]],
                 "in_unit_interval": r["in_unit_interval"],
                 "endpoints_ok": r["endpoints_ok"]}
                for r in self.rays
            ],
            "ample_at": {str(s): ok for s, ok in self.rays_ample()},
            "verdict": "pass" if self.verdict else "fail",
        }

    def rays_ample(self):
        return self._ample_spots


def validate_path(path):
    """Certificate that a deformation path is non-characteristic.

    Per ray: solve the affine coefficient family for integer values; no
    crossing may lie strictly inside (0,1); the strict sandwich between
    <x,v> + eps0*a and floor(<x,v>)+1 must hold; ampleness is verified at
    s in {0, 1/2, 1}.
    """
    fan = path.fan
    rays_report = []
    ok = True
    for i in range(len(fan.rays)):
        c0 = path.start[i]
        c1 = path.end[i]
        breakpoints = []
        interior = False
        if c0 == c1:
            if c0.denominator == 1:
                interior = True  # constant integer family
                breakpoints = [Fraction(0), Fraction(1)]
        else:
            lo, hi = (c0, c1) if c0 < c1 else (c1, c0)
            z = lo.numerator // lo.denominator
            if z < lo:
                z += 1
            while z <= hi:
                s = (Fraction(z) - c0) / (c1 - c0)
                breakpoints.append(s)
                if 0 < s < 1:
                    interior = True
                z += 1
        # strict sandwich endpoints: <x,v> + eps0 a  <  floor(<x,v>) + 1
        lower = c0 - path.big_r * path.reference.coeffs[i]
        upper = c1 - path.big_r * path.reference.coeffs[i]
        endpoints_ok = lower < upper
        if interior or not endpoints_ok:
            ok = False
        rays_report.append({"rho": i, "breakpoints": breakpoints,
                            "in_unit_interval": interior,
                            "endpoints_ok": endpoints_ok})
    spots = []
    for s in (Fraction(0), Fraction(1, 2), Fraction(1)):
        ample = is_strictly_convex(path.divisor_at(s))
        spots.append((s, ample))
        if not ample:
            ok = False
    cert = PathCertificate(path, rays_report, ok)
    cert._ample_spots = spots
    return cert
