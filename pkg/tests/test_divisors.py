from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tccc.divisors import (DivisorData, ample_polytope, build_deformation_path,
                           certify_projective, divisor_from_coeffs,
                           divisor_from_json, divisor_from_vertices, is_convex,
                           is_strictly_convex, probe_divisor, support_value,
                           translate)
from tccc.errors import AmplenessRequiredError, InputError
from tccc.lattice_fan import builtin_fan
from tccc.linalg import convex_hull_2d, dot


F = Fraction


def test_vertices_p2_all_ones():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    assert set(D.vertex_list()) == {(1, 1), (-2, 1), (1, -2)}


def test_vertices_zero():
    for name in ("P1", "P2", "F3"):
        fan = builtin_fan(name)
        D = divisor_from_coeffs(fan, [0] * len(fan.rays))
        assert all(all(c == 0 for c in v) for v in D.vertex_list())


def test_vertices_p1_standard_cases():
    # vertex data (-1, 1) on P1 comes from the divisor (-1, -1)
    fan = builtin_fan("P1")
    D = divisor_from_coeffs(fan, (-1, -1))
    assert D.vertices[(0,)] == (-1,)
    assert D.vertices[(1,)] == (1,)
    # and round-trips through divisor_from_vertices
    D2 = divisor_from_vertices(fan, {(0,): (-1,), (1,): (1,)})
    assert D2 == D


def test_vertex_gluing_along_walls():
    from tccc.lattice_fan import wall_pairs
    for name in ("P2", "F2", "F3", "P1xP1"):
        fan = builtin_fan(name)
        D = divisor_from_coeffs(fan, range(1, len(fan.rays) + 1))
        for wall, c1, c2 in wall_pairs(fan):
            chi1 = D.vertices[c1.rays]
            chi2 = D.vertices[c2.rays]
            for i in wall.rays:
                assert dot(chi1, fan.rays[i]) == dot(chi2, fan.rays[i])


def test_support_value():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    # defining property at the ray generators
    for i, v in enumerate(fan.rays):
        assert support_value(D, v) == D.coeffs[i]
    # interior sample: cone(e1,e2) has vertex (1,1)
    assert support_value(D, (1, 1)) == 2
    assert support_value(D, (0, 0)) == 0


def test_support_value_cone_independent():
    fan = builtin_fan("F3")
    D = divisor_from_coeffs(fan, (2, -1, 3, 0))
    # wall directions lie in two cones; value must not depend on the choice
    for i, v in enumerate(fan.rays):
        assert support_value(D, v) == D.coeffs[i]
        assert support_value(D, tuple(3 * c for c in v)) == 3 * D.coeffs[i]


def test_convexity():
    fan = builtin_fan("P2")
    assert is_strictly_convex(divisor_from_coeffs(fan, (1, 1, 1)))
    zero = divisor_from_coeffs(fan, (0, 0, 0))
    assert is_convex(zero) and not is_strictly_convex(zero)
    f3 = builtin_fan("F3")
    anti = divisor_from_coeffs(f3, (1, 1, 1, 1))
    assert not is_convex(anti)


def test_strict_convexity_hull_oracle():
    # strictly convex <=> all vertices are extreme points of their hull
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    hull = convex_hull_2d(D.vertex_list())
    assert len(hull) == len(fan.max_cones)
    # midpoint convexity oracle across cones
    from tccc.divisors import support_value as phi
    samples = [((2, 1), (-1, -2)), ((1, 0), (-1, 1)), ((0, 1), (1, -1))]
    for x, y in samples:
        mid = tuple(Fraction(a + b, 2) for a, b in zip(x, y))
        assert phi(D, mid) <= Fraction(phi(D, x) + phi(D, y), 2)


def test_ample_polytope_p2():
    fan = builtin_fan("P2")
    P = ample_polytope(divisor_from_coeffs(fan, (1, 1, 1)))
    assert set(P.vertices) == {(1, 1), (-2, 1), (1, -2)}
    assert P.contains((0, 0))
    assert not P.contains((1, 1))
    assert P.contains((1, 1), closed=True)


def test_ample_polytope_p1():
    fan = builtin_fan("P1")
    P = ample_polytope(divisor_from_coeffs(fan, (1, 1)))
    assert set(P.vertices) == {(1,), (-1,)}
    assert P.contains((0,)) and not P.contains((1,))
    P2 = ample_polytope(divisor_from_coeffs(fan, (0, 1)))
    assert set(P2.vertices) == {(0,), (-1,)}
    assert not P2.contains((0,))
    assert P2.contains((-F(1, 2),))


def test_ample_polytope_requires_ample():
    fan = builtin_fan("P2")
    with pytest.raises(AmplenessRequiredError):
        ample_polytope(divisor_from_coeffs(fan, (0, 0, 0)))


def test_probe_divisor():
    p1 = builtin_fan("P1")
    assert probe_divisor(p1, (0,)).coeffs == (1, 1)
    assert probe_divisor(p1, (F(1, 2),)).coeffs == (1, 0)
    p2 = builtin_fan("P2")
    assert probe_divisor(p2, (-F(1, 2), 0)).coeffs == (0, 1, 1)


def test_probe_always_dominates_point():
    fan = builtin_fan("P2")
    for x in [(0, 0), (F(1, 3), -F(2, 3)), (-F(5, 7), F(1, 7))]:
        D = probe_divisor(fan, x)
        for i, v in enumerate(fan.rays):
            assert D.coeffs[i] > dot(x, v)


def test_translate():
    fan = builtin_fan("P1")
    D = divisor_from_coeffs(fan, (-1, 1))
    assert translate(D, (0,)) == D
    # m = 1 pairs to +1 with the ray 1 and -1 with the ray -1
    assert translate(D, (1,)).coeffs == (0, 0)
    # class is translation-invariant
    assert D.class_rep() == translate(D, (1,)).class_rep()
    assert D.class_rep() == translate(D, (-3,)).class_rep()


def test_class_rep():
    fan = builtin_fan("P1")
    assert divisor_from_coeffs(fan, (1, 1)).class_rep() == (0, 2)
    assert divisor_from_coeffs(fan, (2, 0)).class_rep() == (0, 2)
    assert divisor_from_coeffs(fan, (0, 1)).class_rep() != \
        divisor_from_coeffs(fan, (0, 2)).class_rep()


@given(st.integers(-3, 3), st.integers(-3, 3),
       st.fractions(min_value=-3, max_value=3, max_denominator=8),
       st.fractions(min_value=-3, max_value=3, max_denominator=8))
@settings(max_examples=60, deadline=None)
def test_probe_translate_identity(m1, m2, x1, x2):
    fan = builtin_fan("P2")
    x = (x1, x2)
    m = (m1, m2)
    shifted = tuple(a + b for a, b in zip(x, m))
    assert probe_divisor(fan, shifted) == translate(probe_divisor(fan, x), m)


@given(st.fractions(min_value=-4, max_value=4, max_denominator=6),
       st.fractions(min_value=-4, max_value=4, max_denominator=6),
       st.fractions(min_value=-4, max_value=4, max_denominator=6),
       st.fractions(min_value=-4, max_value=4, max_denominator=6))
@settings(max_examples=40, deadline=None)
def test_coeff_vertex_roundtrip(a, b, c, d):
    fan = builtin_fan("F2")
    D = divisor_from_coeffs(fan, (a, b, c, d))
    D2 = divisor_from_vertices(fan, D.vertices)
    assert D2.coeffs == D.coeffs


def test_convex_sum_stays_convex():
    fan = builtin_fan("P2")
    import itertools
    convex = [divisor_from_coeffs(fan, c)
              for c in itertools.product(range(-1, 2), repeat=3)]
    convex = [D for D in convex if is_convex(D)]
    for D1 in convex[:6]:
        for D2 in convex[:6]:
            assert is_convex(D1 + D2)
    strict = [D for D in convex if is_strictly_convex(D)]
    for D1 in strict[:4]:
        for D2 in strict[:4]:
            assert is_strictly_convex(D1 + D2)


def test_certify_projective_builtins():
    for name in ("P1", "P2", "P1xP1", "F2", "F3"):
        fan = builtin_fan(name)
        cert = certify_projective(fan)
        assert is_strictly_convex(cert)
        pos = certify_projective(fan, positive=True)
        assert is_strictly_convex(pos) and all(c > 0 for c in pos.coeffs)


def test_deformation_path_p1():
    fan = builtin_fan("P1")
    A = divisor_from_coeffs(fan, (1, 1))
    path = build_deformation_path(fan, (0,), A)
    assert path.eps0 == F(1, 2)
    assert path.big_r == 1
    # endpoint identities
    for i, v in enumerate(fan.rays):
        val = F(dot((0,), v))
        floor_plus = val.numerator // val.denominator + 1
        assert path.end[i] - path.big_r * A.coeffs[i] == floor_plus
        assert path.start[i] - path.big_r * A.coeffs[i] == val + path.eps0 * A.coeffs[i]


def test_deformation_path_sandwich():
    fan = builtin_fan("P2")
    A = certify_projective(fan, positive=True)
    x = (-F(1, 2), 0)
    path = build_deformation_path(fan, x, A)
    for i, v in enumerate(fan.rays):
        val = F(dot(x, v))
        floor_plus = val.numerator // val.denominator + 1
        lower = val + path.eps0 * A.coeffs[i]
        for s in (F(1, 4), F(1, 2), F(3, 4)):
            mid = path.coeff_at(i, s) - path.big_r * A.coeffs[i]
            assert lower < mid < floor_plus


def test_divisor_json():
    fan = builtin_fan("P2")
    D = divisor_from_json({"fan": "P2", "coeffs": {"0": "1", "2": "1/2"}})
    assert D.coeffs == (1, 0, F(1, 2))
    D2 = divisor_from_json('{"coeffs": [1, 2, 3]}', fan=fan)
    assert D2.coeffs == (1, 2, 3)
    with pytest.raises(InputError):
        divisor_from_json({"coeffs": [1, 2, 3]})
    with pytest.raises(InputError):
        divisor_from_json({"fan": "P2", "coeffs": [1, 2]})
