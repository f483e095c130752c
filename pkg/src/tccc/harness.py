"""Verification suites tying both sides of the correspondence together.

The line-bundle cohomology oracle works entirely on the fan side: for each
character m, the rays whose coefficient inequality <m, v_rho> <= a_rho
fails span a subcomplex of the fan's boundary complex, and the degree-p
weight space is the reduced cohomology of that subcomplex one degree down.
The oracle shares nothing with the sheaf-side machinery beyond the fan
itself, so hom/cohomology comparisons are genuine two-route checks:

* ccc-hom: total graded dims of the torus-level derived hom between two
  twisted polytope sheaves against the oracle at the difference divisor;
* corepresentability: the torus stalk of a twisted polytope sheaf at a
  point against the hom out of the point's probe sheaf, after one global
  degree calibration frozen on the simplest one-dimensional instance.

run_suite exposes these and the invariant sweeps as named suites with
deterministic sampling.
"""

import random
from fractions import Fraction
from itertools import product as iproduct

from .arrangement import build_arrangement
from .cellular import GradedDims, sparse_rank
from .divisors import (DivisorData, build_deformation_path, certify_projective,
                       divisor_from_coeffs, is_strictly_convex, probe_divisor,
                       translate)
from .errors import InputError, UnknownSuiteError
from .lattice_fan import builtin_fan, is_complete, is_smooth, load_fan, wall_pairs
from .linalg import dot, format_rational, iter_lattice_points, solve_unique
from .microlocal import disjoint_at_infinity, validate_path
from .twisted_sheaf import (build_P, convolution_blocks, degree_bound_check,
                            stalk_P, torus_hom, torus_hom_by_translate,
                            torus_stalk, verdier_pair_check)


# ---------------------------------------------------------------------------
# the fan-side cohomology oracle


class CohomologyReport:
    """Sheaf cohomology of a line bundle, by character and in total."""

    __slots__ = ("divisor", "by_weight", "total")

    def __init__(self, divisor, by_weight):
        self.divisor = divisor
        self.by_weight = by_weight
        total = GradedDims({})
        for dims in by_weight.values():
            total = total + dims
        self.total = total

    def to_json(self):
        return {
            "coeffs": [format_rational(c) for c in self.divisor.coeffs],
            "total": self.total.to_json(),
            "by_weight": {",".join(map(str, m)): dims.to_json()
                          for m, dims in sorted(self.by_weight.items())},
        }


def _weight_box(divisor):
    """Integer box guaranteed to contain all contributing characters,
    inflated by one unit so the boundary shell can be asserted empty.

    Candidate extremes are the divisor's vertices together with all
    pairwise intersections of the character-side boundary hyperplanes."""
    fan = divisor.fan
    pts = list(divisor.vertex_list())
    rays = fan.rays
    if fan.dim == 2:
        for i in range(len(rays)):
            for j in range(i + 1, len(rays)):
                sol = solve_unique([rays[i], rays[j]],
                                   [divisor.coeffs[i], divisor.coeffs[j]])
                if sol is not None:
                    pts.append(sol)
    lo = []
    hi = []
    for k in range(fan.dim):
        vals = [Fraction(p[k]) for p in pts]
        lo.append(int(min(vals) // 1) - 1)            # floor - 1
        hi.append(int(-((-max(vals)) // 1)) + 1)      # ceil + 1
    return tuple(lo), tuple(hi)


def _weight_dims(fan, divisor, m):
    """Graded dims of the weight-m piece: reduced cohomology, one degree
    down, of the subcomplex spanned by the rays violating <m,v> <= a."""
    violated = [i for i, v in enumerate(fan.rays)
                if dot(m, v) > divisor.coeffs[i]]
    vset = set(violated)
    faces = {-1: [()]}
    for k in range(1, fan.dim + 1):
        lv = [rays for rays in fan._cones_by_dim[k] if set(rays) <= vset]
        if lv:
            faces[k - 1] = lv
    index = {q: {f: i for i, f in enumerate(fs)} for q, fs in faces.items()}
    dims = {q: len(fs) for q, fs in faces.items()}
    mats = {}
    for q in sorted(faces):
        if q + 1 not in faces:
            continue
        rows = [dict() for _ in faces[q + 1]]
        for f in faces[q + 1]:
            ri = index[q + 1][f]
            for pos in range(len(f)):
                sub = f[:pos] + f[pos + 1:]
                ci = index[q].get(sub)
                if ci is not None:
                    rows[ri][ci] = rows[ri].get(ci, 0) + (-1) ** pos
        mats[q] = rows
    ranks = {q: sparse_rank(rows) for q, rows in mats.items()}
    out = {}
    for q, n in dims.items():
        h = n - ranks.get(q, 0) - ranks.get(q - 1, 0)
        if h:
            out[q + 1] = h  # degree p corresponds to reduced degree p-1
    return GradedDims(out)


def toric_cohomology(fan, divisor):
    """Cohomology oracle for an integral divisor, with weight breakdown.

    The contributing characters always lie strictly inside the computed
    box; the one-cell boundary shell is asserted to contribute nothing.
    """
    if not divisor.is_integral:
        raise InputError("the cohomology oracle needs an integral divisor")
    lo, hi = _weight_box(divisor)
    by_weight = {}
    for m in iter_lattice_points(lo, hi):
        dims = _weight_dims(fan, divisor, m)
        if dims.is_zero():
            continue
        on_shell = any(mi == a or mi == b for mi, a, b in zip(m, lo, hi))
        if on_shell:
            raise AssertionError(
                f"weight {m} on the safety shell contributes {dims}")
        by_weight[m] = dims
    return CohomologyReport(divisor, by_weight)


_ORACLE_VALIDATED = set()


def validate_oracle(fan):
    """Freeze the oracle's inequality convention on this fan.

    (a) ample divisors: H^0 counts closed-polytope lattice points, higher
    cohomology vanishes; (b) the trivial bundle gives C in degree 0;
    (c) Serre duality against the canonical divisor on a small sample.
    """
    if fan in _ORACLE_VALIDATED:
        return
    from .divisors import ample_polytope
    ample = certify_projective(fan)
    for mult in (1, 2):
        D = DivisorData(fan, [mult * c for c in ample.coeffs])
        rep = toric_cohomology(fan, D)
        npts = len(ample_polytope(D).lattice_points_closed())
        if rep.total != GradedDims({0: npts}):
            raise AssertionError(f"oracle validation (a) failed on {fan}: "
                                 f"{rep.total} vs {npts} lattice points")
    zero = DivisorData(fan, [0] * len(fan.rays))
    if toric_cohomology(fan, zero).total != GradedDims({0: 1}):
        raise AssertionError(f"oracle validation (b) failed on {fan}")
    canonical = DivisorData(fan, [-1] * len(fan.rays))
    samples = [zero, ample, -ample]
    for D in samples:
        lhs = toric_cohomology(fan, D).total
        rhs = toric_cohomology(fan, canonical - D).total
        flipped = GradedDims({fan.dim - d: v for d, v in rhs.items()})
        if lhs != flipped:
            raise AssertionError(f"oracle validation (c) failed on {fan}")
    _ORACLE_VALIDATED.add(fan)


# ---------------------------------------------------------------------------
# verification results


class VerificationResult:
    """Per-instance pass/fail transcript of one suite run."""

    __slots__ = ("suite", "instances")

    def __init__(self, suite):
        self.suite = suite
        self.instances = []

    def record(self, key, passed, **details):
        self.instances.append({"key": key, "passed": bool(passed),
                               "details": details})

    @property
    def passed(self):
        return all(inst["passed"] for inst in self.instances)

    def counts(self):
        good = sum(1 for i in self.instances if i["passed"])
        return good, len(self.instances)

    def failures(self):
        return [i for i in self.instances if not i["passed"]]

    def to_json(self):
        good, total = self.counts()
        return {"suite": self.suite, "passed": self.passed,
                "instances_run": total, "instances_passed": good,
                "failures": [{"key": f["key"],
                              "details": {k: repr(v) for k, v in f["details"].items()}}
                             for f in self.failures()]}


# ---------------------------------------------------------------------------
# the two main comparisons


def verify_ccc_hom(fan, d1, d2, result=None):
    """Torus-level hom dims against the cohomology oracle at d2 - d1."""
    validate_oracle(fan)
    res = result if result is not None else VerificationResult("ccc-hom")
    hom = torus_hom(d1, d2)
    coh = toric_cohomology(fan, d2 - d1).total
    res.record(
        f"{fan.name or 'fan'}:{[str(c) for c in d1.coeffs]}->{[str(c) for c in d2.coeffs]}",
        hom == coh, fan=fan.name, d1=d1.coeffs, d2=d2.coeffs,
        hom=hom.to_json(), cohomology=coh.to_json())
    return res


_SHIFT_CACHE = {}


def calibration_shift():
    """Frozen calibration constant for the probe-hom degree shift.

    The probe sheaf enters homs with an n-fold downward shift, n being the
    fan dimension, plus a convention constant that the literature does not
    fix uniquely.  That constant is calibrated once, on the one-dimensional
    skyscraper instance, and then frozen: every corepresentability check
    shifts by dim + this constant.
    """
    if "excess" not in _SHIFT_CACHE:
        fan = builtin_fan("P1")
        zero = DivisorData(fan, [0, 0])
        lhs = torus_stalk(zero, (Fraction(0),))
        raw = torus_hom(probe_divisor(fan, (Fraction(0),)), zero)
        candidates = [s for s in range(-3, 4)
                      if GradedDims({d - fan.dim - s: v for d, v in raw.items()}) == lhs]
        if len(candidates) != 1:
            raise AssertionError(f"calibration did not pin a unique shift: {candidates}")
        _SHIFT_CACHE["excess"] = candidates[0]
    return _SHIFT_CACHE["excess"]


def verify_corepresentability(fan, theta, dprime, result=None):
    """Stalk of the twisted polytope sheaf at theta against the shifted hom
    out of the probe sheaf of theta."""
    validate_oracle(fan)
    res = result if result is not None else VerificationResult("corepresentability")
    s = fan.dim + calibration_shift()
    x = tuple(Fraction(c) for c in theta)
    lhs = torus_stalk(dprime, x)
    raw = torus_hom(probe_divisor(fan, x), dprime)
    rhs = GradedDims({d - s: v for d, v in raw.items()})
    res.record(
        f"{fan.name or 'fan'}:theta={[str(c) for c in x]}"
        f":D={[str(c) for c in dprime.coeffs]}",
        lhs == rhs, fan=fan.name, theta=x, coeffs=dprime.coeffs,
        stalk=lhs.to_json(), hom_shifted=rhs.to_json())
    return res


def probe_collection(fan, grid):
    """Set of divisor classes of the probes of all grid points."""
    classes = set()
    for x in grid:
        classes.add(probe_divisor(fan, x).class_rep())
    return classes


def rational_grid(fan, max_denominator):
    """All points of [0,1)^n whose coordinates have denominator <= d."""
    values = sorted({Fraction(p, q) for q in range(1, max_denominator + 1)
                     for p in range(q)})
    return [tuple(v) for v in iproduct(values, repeat=fan.dim)]


# ---------------------------------------------------------------------------
# suites


def _coeff_range(rng_bound):
    return range(-rng_bound, rng_bound + 1)


def _suite_fan_axioms(config):
    res = VerificationResult("fan-axioms")
    from itertools import product as _prod
    from .lattice_fan import builtin_fan_names, dual_cone_generators, faces
    from .linalg import dot as _dot
    for name in builtin_fan_names():
        fan = builtin_fan(name)
        ok = is_smooth(fan) and is_complete(fan)
        res.record(f"{name}:smooth-complete", ok, fan=name)
        walls = wall_pairs(fan)
        res.record(f"{name}:walls", len(walls) == len(fan.cones(fan.dim - 1)), fan=name)
        ok = all(len(faces(c)) == 2 ** c.dim for c in fan.cones())
        res.record(f"{name}:face-counts", ok, fan=name)
        # the dual of the dual cone cuts out the cone itself
        grid = list(_prod(range(-2, 3), repeat=fan.dim))
        ok = True
        for c in fan.cones():
            gens = dual_cone_generators(c)
            for y in grid:
                if (all(_dot(w, y) >= 0 for w in gens)) != fan.contains(c, y):
                    ok = False
        res.record(f"{name}:duality", ok, fan=name)
        if fan.dim == 2:
            res.record(f"{name}:ray-maxcone-count",
                       len(fan.cones(1)) == len(fan.cones(2)), fan=name)
    return res


def _p1_cases():
    fan = builtin_fan("P1")
    half = Fraction(1, 2)
    pts = [(-Fraction(5, 2),), (-Fraction(3, 2),), (-1,), (-half,), (0,),
           (half,), (1,), (Fraction(3, 2),), (Fraction(5, 2),)]
    closed = GradedDims({0: 1})
    shifted = GradedDims({-1: 1})
    zero = GradedDims({})

    def seg(x):  # closed [-1,1]
        return closed if -1 <= x[0] <= 1 else zero

    def sky(x):
        return closed if x[0] == 0 else zero

    def open_seg(x):
        return shifted if -1 < x[0] < 1 else zero

    return fan, pts, [
        ((-1, -1), seg),      # vertices (-1, 1): constant on [-1,1]
        ((0, 0), sky),        # skyscraper at the origin
        ((1, 1), open_seg),   # costandard on (-1,1), degree -1
    ]


def _suite_p1_examples(config):
    res = VerificationResult("p1-examples")
    fan, pts, cases = _p1_cases()
    for coeffs, expected in cases:
        D = divisor_from_coeffs(fan, coeffs)
        ok = True
        bad = None
        for x in pts:
            got = stalk_P(D, x)
            if got != expected(x):
                ok = False
                bad = (x, got.to_json())
                break
        res.record(f"P1:{coeffs}", ok, coeffs=coeffs, first_failure=bad)
    return res


def _p2_points():
    # interior of {x < 1, y < 1, x + y > -1}; exterior strictly outside the
    # closed triangle with vertices (1,1), (-2,1), (1,-2)
    f = Fraction
    interior = [(0, 0), (f(1, 2), 0), (0, f(1, 2)), (f(1, 2), f(1, 2)),
                (-f(1, 2), 0), (0, -f(1, 2)), (f(9, 10), f(9, 10)),
                (-f(1, 4), -f(1, 4)), (-f(1, 2), -f(1, 4)), (f(1, 2), -1),
                (-1, f(1, 2)), (f(3, 4), f(1, 8))]
    exterior = [(2, 0), (0, 2), (2, 2), (-3, 0), (0, -3), (-2, -2),
                (f(3, 2), f(3, 2)), (-3, 2), (2, -3), (3, 3),
                (-f(5, 2), f(5, 2)), (f(5, 2), -f(5, 2))]
    vertices = [(1, 1), (-2, 1), (1, -2)]
    return interior, exterior, vertices


def _suite_p2_example(config):
    res = VerificationResult("p2-example")
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    ok_v = set(D.vertex_list()) == {(1, 1), (-2, 1), (1, -2)}
    res.record("P2:vertices", ok_v, vertices=D.vertex_list())
    interior, exterior, vertices = _p2_points()
    expected_in = GradedDims({-2: 1})
    zero = GradedDims({})
    ok = all(stalk_P(D, x) == expected_in for x in interior)
    res.record("P2:interior", ok)
    ok = all(stalk_P(D, x) == zero for x in exterior)
    res.record("P2:exterior", ok)
    ok = all(stalk_P(D, x) == zero for x in vertices)
    res.record("P2:vertices-stalks", ok)
    return res


def _suite_degree_bounds(config):
    res = VerificationResult("degree-bounds")
    fans = config.get("fans", ("P1", "P2", "F2"))
    bound = int(config.get("range", 2))
    for name in fans:
        fan = builtin_fan(name)
        all_ok = True
        first_bad = None
        count = 0
        for coeffs in iproduct(_coeff_range(bound), repeat=len(fan.rays)):
            D = divisor_from_coeffs(fan, coeffs)
            count += 1
            if not degree_bound_check(D):
                all_ok = False
                first_bad = coeffs
                break
        res.record(f"{name}:degree-bounds[{count} divisors]", all_ok,
                   fan=name, first_failure=first_bad)
    return res


def _suite_convolution_euler(config):
    res = VerificationResult("convolution-euler")
    fan = builtin_fan(config.get("fan", "P2"))
    pairs = int(config.get("pairs", 50))
    bound = int(config.get("range", 1))
    rng = random.Random(config.get("seed", 0))
    from .cellular import convolution_euler_stalk
    from .twisted_sheaf import build_P as _build
    for k in range(pairs):
        c1 = [rng.randint(-bound, bound) for _ in fan.rays]
        c2 = [rng.randint(-bound, bound) for _ in fan.rays]
        d1 = divisor_from_coeffs(fan, c1)
        d2 = divisor_from_coeffs(fan, c2)
        dsum = d1 + d2
        sh = build_P(dsum)
        arr = build_arrangement(
            _build(d1).required_hyperplanes() + _build(d2).required_hyperplanes()
            + sh.required_hyperplanes(),
            _merge(sh.support_box(),
                   _merge(_build(d1).support_box(), _build(d2).support_box())))
        b1 = convolution_blocks(d1)
        b2 = convolution_blocks(d2)
        ok = True
        bad = None
        for cell in arr.cells:
            lhs = convolution_euler_stalk(b1, b2, cell.sample)
            rhs = sh.stalk(cell.sample).euler()
            if lhs != rhs:
                ok = False
                bad = (cell.sample, lhs, rhs)
                break
        res.record(f"{fan.name}:pair{k}:{c1}+{c2}", ok, d1=c1, d2=c2, failure=bad)
    return res


def _merge(b1, b2):
    return tuple((min(a1, a2), max(c1, c2)) for (a1, c1), (a2, c2) in zip(b1, b2))


def _suite_convolution_1d(config):
    res = VerificationResult("convolution-1d")
    fan = builtin_fan("P1")
    bound = int(config.get("range", 2))
    from .cellular import convolution_fiber_1d
    all_ok = True
    bad = None
    count = 0
    for c1 in iproduct(_coeff_range(bound), repeat=2):
        for c2 in iproduct(_coeff_range(bound), repeat=2):
            d1 = divisor_from_coeffs(fan, c1)
            d2 = divisor_from_coeffs(fan, c2)
            dsum = d1 + d2
            sh = build_P(dsum)
            arr = build_arrangement(sh.required_hyperplanes(), sh.support_box())
            b1 = convolution_blocks(d1)
            b2 = convolution_blocks(d2)
            count += 1
            for cell in arr.cells:
                lhs = convolution_fiber_1d(b1, b2, cell.sample)
                rhs = sh.stalk(cell.sample)
                if lhs != rhs:
                    all_ok = False
                    bad = (c1, c2, cell.sample, lhs.to_json(), rhs.to_json())
                    break
            if bad:
                break
        if bad:
            break
    res.record(f"P1:all-pairs-range-{bound}[{count} pairs]", all_ok, failure=bad)
    return res


def _suite_verdier_pairs(config):
    res = VerificationResult("verdier-pairs")
    fans = config.get("fans", ("P1", "P2", "P1xP1"))
    for name in fans:
        fan = builtin_fan(name)
        D = certify_projective(fan)
        res.record(f"{name}:certificate", verdier_pair_check(D),
                   coeffs=D.coeffs)
        ones = divisor_from_coeffs(fan, [1] * len(fan.rays))
        if is_strictly_convex(ones):
            res.record(f"{name}:all-ones", verdier_pair_check(ones))
    return res


def _suite_ss_certificates(config):
    res = VerificationResult("ss-certificates")
    fan = builtin_fan(config.get("fan", "P2"))
    count = int(config.get("count", 100))
    rng = random.Random(config.get("seed", 0))
    denoms = tuple(config.get("denominators", (2, 3, 5, 7)))
    all_ok = True
    bad = None
    for _ in range(count):
        coeffs = []
        for _ray in fan.rays:
            q = rng.choice(denoms)
            p = rng.randint(-2 * q, 2 * q)
            if p % q == 0:
                p += 1
            coeffs.append(Fraction(p, q))
        D = DivisorData(fan, coeffs)
        cert = disjoint_at_infinity(D)
        if cert.verdict != "disjoint":
            all_ok = False
            bad = [str(c) for c in coeffs]
            break
    res.record(f"{fan.name}:{count} non-integral divisors", all_ok, failure=bad)
    integral = divisor_from_coeffs(fan, [1] * len(fan.rays))
    res.record(f"{fan.name}:integral-gives-unknown",
               disjoint_at_infinity(integral).verdict == "unknown")
    return res


def _suite_path_certificates(config):
    res = VerificationResult("path-certificates")
    fan = builtin_fan(config.get("fan", "P2"))
    count = int(config.get("count", 50))
    rng = random.Random(config.get("seed", 0))
    reference = certify_projective(fan, positive=True)
    all_ok = True
    bad = None
    for _ in range(count):
        x = tuple(Fraction(rng.randint(-21, 21), rng.choice((1, 2, 3, 4, 5, 6, 7)))
                  for _ in range(fan.dim))
        path = build_deformation_path(fan, x, reference)
        cert = validate_path(path)
        if not cert.verdict:
            all_ok = False
            bad = [str(c) for c in x]
            break
    res.record(f"{fan.name}:{count} probe paths", all_ok, failure=bad)
    return res


def _suite_ccc_hom(config):
    res = VerificationResult("ccc-hom")
    fan = builtin_fan(config.get("fan", "P1"))
    bound = int(config.get("range", 2))
    pairs = config.get("pairs")
    r = len(fan.rays)
    if pairs is None:
        combos = [(c1, c2)
                  for c1 in iproduct(_coeff_range(bound), repeat=r)
                  for c2 in iproduct(_coeff_range(bound), repeat=r)]
    else:
        rng = random.Random(config.get("seed", 0))
        combos = []
        for _ in range(int(pairs)):
            combos.append((tuple(rng.randint(-bound, bound) for _ in range(r)),
                           tuple(rng.randint(-bound, bound) for _ in range(r))))
    for c1, c2 in combos:
        verify_ccc_hom(fan, divisor_from_coeffs(fan, c1),
                       divisor_from_coeffs(fan, c2), result=res)
    return res


def _suite_corepresentability(config):
    res = VerificationResult("corepresentability")
    fan = builtin_fan(config.get("fan", "P1"))
    denom = int(config.get("denom", 3))
    bound = int(config.get("range", 1))
    grid = rational_grid(fan, denom)
    r = len(fan.rays)
    for theta in grid:
        for coeffs in iproduct(_coeff_range(bound), repeat=r):
            verify_corepresentability(fan, theta,
                                      divisor_from_coeffs(fan, coeffs), result=res)
    return res


def _suite_probe_collection(config):
    res = VerificationResult("probe-collection")
    fan = builtin_fan(config.get("fan", "P1"))
    denom = int(config.get("denom", 4))
    grid = rational_grid(fan, denom)
    classes = probe_collection(fan, grid)
    expected = None
    if fan.name == "P1":
        expected = {divisor_from_coeffs(fan, (0, d)).class_rep() for d in (1, 2)}
    elif fan.name == "P2":
        expected = {divisor_from_coeffs(fan, (0, 0, d)).class_rep() for d in (1, 2, 3)}
    if expected is not None:
        res.record(f"{fan.name}:classes", classes == expected,
                   classes=sorted(classes), expected=sorted(expected))
    else:
        res.record(f"{fan.name}:classes-finite[{len(classes)}]",
                   len(classes) > 0 and len(classes) < len(grid) + 1,
                   classes=sorted(classes))
    return res


_SUITES = {
    "fan-axioms": _suite_fan_axioms,
    "p1-examples": _suite_p1_examples,
    "p2-example": _suite_p2_example,
    "degree-bounds": _suite_degree_bounds,
    "convolution-euler": _suite_convolution_euler,
    "convolution-1d": _suite_convolution_1d,
    "verdier-pairs": _suite_verdier_pairs,
    "ss-certificates": _suite_ss_certificates,
    "path-certificates": _suite_path_certificates,
    "ccc-hom": _suite_ccc_hom,
    "corepresentability": _suite_corepresentability,
    "probe-collection": _suite_probe_collection,
}


def suite_names():
    return sorted(_SUITES)


def run_suite(name, config=None):
    if name not in _SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; choices: {suite_names()}")
    return _SUITES[name](config or {})
