import random
from fractions import Fraction

import pytest

from tccc.arrangement import build_arrangement
from tccc.cellular import GradedDims, convolution_euler_stalk, convolution_fiber_1d, stalk
from tccc.divisors import divisor_from_coeffs, divisor_from_vertices, translate
from tccc.errors import AlignmentError, AmplenessRequiredError
from tccc.lattice_fan import builtin_fan
from tccc.twisted_sheaf import (build_P, convolution_blocks, degree_bound_check,
                                required_hyperplanes, stalk_P, to_cellular,
                                torus_hom, torus_hom_by_translate, torus_stalk,
                                verdier_pair_check)

F = Fraction
ZERO = GradedDims({})
C0 = GradedDims({0: 1})
C1 = GradedDims({-1: 1})
C2 = GradedDims({-2: 1})


def p1_divisor(chi_plus, chi_minus):
    """Divisor on P1 from its two vertices."""
    fan = builtin_fan("P1")
    return divisor_from_vertices(fan, {(0,): (chi_plus,), (1,): (chi_minus,)})


def test_build_p1_shard_supports():
    # vertices (-1, 1): full line in degree -1, two half lines in degree 0
    D = p1_divisor(-1, 1)
    sh = build_P(D)
    assert sorted(sh.terms) == [-1, 0]
    assert sh.terms[-1][0][2] == ()  # the full-space shard has no constraints
    cons = sorted(c for (_, _, c) in sh.terms[0])
    # [-1, oo) is <x, 1> >= -1 and (-oo, 1] is <x, -1> >= -1
    supports = {c[0] for c in cons}
    assert supports == {((1,), F(-1)), ((-1,), F(-1))}


def test_p1_triptych_stalks():
    pts = [(-F(5, 2),), (-F(3, 2),), (-1,), (-F(1, 2),), (0,),
           (F(1, 2),), (1,), (F(3, 2),), (F(5, 2),)]
    # vertices (-1, 1): constant sheaf on the closed interval [-1, 1]
    D = p1_divisor(-1, 1)
    for x in pts:
        expected = C0 if -1 <= x[0] <= 1 else ZERO
        assert stalk_P(D, x) == expected
    # vertices (0, 0): skyscraper at the origin
    D = p1_divisor(0, 0)
    for x in pts:
        expected = C0 if x[0] == 0 else ZERO
        assert stalk_P(D, x) == expected
    # vertices (1, -1): shifted constant on the open interval
    D = p1_divisor(1, -1)
    for x in pts:
        expected = C1 if -1 < x[0] < 1 else ZERO
        assert stalk_P(D, x) == expected


def test_build_p2_shard_counts():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    sh = build_P(D)
    assert [len(sh.terms[d]) for d in (-2, -1, 0)] == [1, 3, 3]
    assert set(D.vertex_list()) == {(1, 1), (-2, 1), (1, -2)}


def test_p2_stalks():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    assert stalk_P(D, (0, 0)) == C2
    assert stalk_P(D, (1, 1)) == ZERO      # vertex
    assert stalk_P(D, (2, 0)) == ZERO      # outside
    assert stalk_P(D, (F(1, 2), F(1, 2))) == C2
    assert stalk_P(D, (1, 0)) == ZERO      # boundary edge


def test_required_hyperplanes():
    assert {(h.normal, h.offset) for h in required_hyperplanes(p1_divisor(-1, 1))} \
        == {((1,), F(-1)), ((1,), F(1))}
    assert {(h.normal, h.offset) for h in required_hyperplanes(p1_divisor(0, 0))} \
        == {((1,), F(0))}
    # oracle: enumerate every facet hyperplane of every shard and dedupe
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    sh = build_P(D)
    from tccc.arrangement import Hyperplane
    seen = set()
    for deg, shards in sh.terms.items():
        for _, _, cons in shards:
            for nrm, off in cons:
                seen.add(Hyperplane(nrm, off).key())
    got = {h.key() for h in required_hyperplanes(D)}
    assert got == seen
    assert len(got) == 3  # one line per ray for this divisor


def test_to_cellular_matches_stalks():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    sh = build_P(D)
    arr = build_arrangement(sh.required_hyperplanes(), sh.support_box())
    cellular = to_cellular(D, arr)
    rng = random.Random(7)
    pts = [cell.sample for cell in arr.cells]
    pts += [(F(rng.randint(-11, 11), 4), F(rng.randint(-11, 11), 4))
            for _ in range(25)]
    for x in pts:
        if not arr.in_box(x):
            continue
        assert stalk(cellular, x) == sh.stalk(x), x


def test_to_cellular_matches_stalks_p1():
    for verts in [(-1, 1), (0, 0), (1, -1), (2, 0)]:
        D = p1_divisor(*verts)
        sh = build_P(D)
        arr = build_arrangement(sh.required_hyperplanes(), sh.support_box())
        cellular = to_cellular(D, arr)
        for cell in arr.cells:
            assert stalk(cellular, cell.sample) == sh.stalk(cell.sample)


def test_degree_bounds():
    for verts in [(-1, 1), (0, 0), (1, -1)]:
        assert degree_bound_check(p1_divisor(*verts))
    fan = builtin_fan("P2")
    assert degree_bound_check(divisor_from_coeffs(fan, (1, 1, 1)))
    f3 = builtin_fan("F3")
    rng = random.Random(3)
    for _ in range(6):
        coeffs = [rng.randint(-2, 2) for _ in f3.rays]
        assert degree_bound_check(divisor_from_coeffs(f3, coeffs)), coeffs


def test_lattice_translate_invariance():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 0, -1))
    rng = random.Random(5)
    for _ in range(10):
        m = (rng.randint(-2, 2), rng.randint(-2, 2))
        x = (F(rng.randint(-8, 8), 3), F(rng.randint(-8, 8), 3))
        shifted_x = tuple(a + b for a, b in zip(x, m))
        assert stalk_P(translate(D, m), shifted_x) == stalk_P(D, x)


def test_skyscraper_law():
    fan = builtin_fan("P1xP1")
    D = divisor_from_coeffs(fan, (0, 0, 0, 0))
    assert stalk_P(D, (0, 0)) == C0
    for x in [(1, 0), (0, 1), (F(1, 2), 0), (-1, -1)]:
        assert stalk_P(D, x) == ZERO


def test_ample_law():
    fan = builtin_fan("P1xP1")
    D = divisor_from_coeffs(fan, (1, 1, 1, 1))
    assert stalk_P(D, (0, 0)) == C2
    assert stalk_P(D, (1, 1)) == ZERO
    assert stalk_P(D, (1, 0)) == ZERO
    assert stalk_P(D, (F(1, 2), -F(1, 2))) == C2


def test_verdier_pairs():
    assert verdier_pair_check(p1_divisor(1, -1))  # divisor (1,1) on P1
    fan = builtin_fan("P2")
    assert verdier_pair_check(divisor_from_coeffs(fan, (1, 1, 1)))
    q = builtin_fan("P1xP1")
    assert verdier_pair_check(divisor_from_coeffs(q, (1, 1, 1, 1)))
    with pytest.raises(AmplenessRequiredError):
        verdier_pair_check(divisor_from_coeffs(fan, (0, 0, 0)))


def test_convolution_euler_law_p1():
    fan = builtin_fan("P1")
    d1 = divisor_from_coeffs(fan, (1, 0))
    d2 = divisor_from_coeffs(fan, (0, 1))
    dsum = d1 + d2
    sh = build_P(dsum)
    b1 = convolution_blocks(d1)
    b2 = convolution_blocks(d2)
    for x in [(-F(3, 2),), (0,), (F(1, 2),), (1,), (F(3, 2),)]:
        assert convolution_euler_stalk(b1, b2, x) == sh.stalk(x).euler()


def test_convolution_full_p1():
    fan = builtin_fan("P1")
    rng = random.Random(11)
    for _ in range(8):
        c1 = (rng.randint(-2, 2), rng.randint(-2, 2))
        c2 = (rng.randint(-2, 2), rng.randint(-2, 2))
        d1 = divisor_from_coeffs(fan, c1)
        d2 = divisor_from_coeffs(fan, c2)
        dsum = d1 + d2
        sh = build_P(dsum)
        arr = build_arrangement(sh.required_hyperplanes(), sh.support_box())
        b1 = convolution_blocks(d1)
        b2 = convolution_blocks(d2)
        for cell in arr.cells:
            assert convolution_fiber_1d(b1, b2, cell.sample) == sh.stalk(cell.sample)


def test_convolution_euler_law_p2():
    fan = builtin_fan("P2")
    rng = random.Random(2)
    for _ in range(3):
        c1 = tuple(rng.randint(-1, 1) for _ in range(3))
        c2 = tuple(rng.randint(-1, 1) for _ in range(3))
        d1 = divisor_from_coeffs(fan, c1)
        d2 = divisor_from_coeffs(fan, c2)
        dsum = d1 + d2
        sh = build_P(dsum)
        hps = (build_P(d1).required_hyperplanes() + build_P(d2).required_hyperplanes()
               + sh.required_hyperplanes())
        box = sh.support_box()
        b1x = build_P(d1).support_box()
        b2x = build_P(d2).support_box()
        box = tuple((min(a, b[0], c[0]), max(aa, b[1], c[1]))
                    for (a, aa), b, c in zip(box, b1x, b2x))
        arr = build_arrangement(hps, box)
        b1 = convolution_blocks(d1)
        b2 = convolution_blocks(d2)
        for cell in arr.cells:
            lhs = convolution_euler_stalk(b1, b2, cell.sample)
            rhs = sh.stalk(cell.sample).euler()
            assert lhs == rhs, (c1, c2, cell.sample)


# ---------------------------------------------------------------------------
# torus-level homs


def test_torus_hom_p1_sections():
    fan = builtin_fan("P1")
    zero = divisor_from_coeffs(fan, (0, 0))
    o2 = divisor_from_coeffs(fan, (1, 1))
    # oracle: sections of the degree-2 bundle = lattice points of [-1, 1]
    assert torus_hom(zero, o2) == GradedDims({0: 3})


def test_torus_hom_self():
    fan = builtin_fan("P1")
    for coeffs in [(0, 0), (1, 1), (2, -1)]:
        D = divisor_from_coeffs(fan, coeffs)
        assert torus_hom(D, D) == GradedDims({0: 1})


def test_torus_hom_negative_twist():
    fan = builtin_fan("P1")
    zero = divisor_from_coeffs(fan, (0, 0))
    minus2 = divisor_from_coeffs(fan, (-1, -1))
    # classical two-chart computation: h^1 of the degree -2 bundle is 1
    d = -2
    cech_h0 = max(d + 1, 0)
    cech_h1 = max(-d - 1, 0)
    assert torus_hom(zero, minus2) == GradedDims({k: v for k, v in
                                                  ((0, cech_h0), (1, cech_h1)) if v})


def test_torus_hom_by_translate_p1():
    fan = builtin_fan("P1")
    zero = divisor_from_coeffs(fan, (0, 0))
    o2 = divisor_from_coeffs(fan, (1, 1))
    per_m = torus_hom_by_translate(zero, o2)
    assert set(per_m) == {(-1,), (0,), (1,)}
    assert all(dims == GradedDims({0: 1}) for dims in per_m.values())


def test_torus_hom_alignment_error():
    fan = builtin_fan("P1")
    with pytest.raises(AlignmentError):
        torus_hom(divisor_from_coeffs(fan, (F(1, 2), 0)),
                  divisor_from_coeffs(fan, (0, 0)))
    # equal fractional parts are allowed
    torus_hom(divisor_from_coeffs(fan, (F(1, 2), 0)),
              divisor_from_coeffs(fan, (F(3, 2), 1)))


def test_torus_stalk():
    fan = builtin_fan("P1")
    # support [-1,1] wraps around the circle: lifts of 0 are -1, 0, 1
    D = p1_divisor(-1, 1)
    assert torus_stalk(D, (0,)) == GradedDims({0: 3})
    # lifts of 1/2 inside [-1,1] are -1/2 and 1/2
    assert torus_stalk(D, (F(1, 2),)) == GradedDims({0: 2})
    # a wide twisted divisor picks up its stalk away from the naive lift
    wide = p1_divisor(2, 0)   # divisor (2, 0): open support (0, 2)
    assert stalk_P(wide, (0,)) == ZERO
    assert torus_stalk(wide, (0,)) == GradedDims({-1: 1})


def test_disjoint_supports_vanish():
    fan = builtin_fan("P1")
    sky0 = divisor_from_coeffs(fan, (0, 0))
    per_m = torus_hom_by_translate(sky0, sky0)
    assert set(per_m) == {(0,)}
