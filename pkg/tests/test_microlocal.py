import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tccc.divisors import (DivisorData, build_deformation_path, certify_projective,
                           divisor_from_coeffs)
from tccc.lattice_fan import builtin_fan
from tccc.microlocal import (disjoint_at_infinity, lambda_contains, lambda_sigma,
                             ss_estimate, validate_path)

F = Fraction


def test_ss_estimate_p1():
    fan = builtin_fan("P1")
    D = divisor_from_coeffs(fan, (-1, -1))  # vertices (-1, 1)
    est = ss_estimate(D)
    pieces = {rays: (apex, perp) for rays, apex, perp in est.pieces}
    assert set(pieces) == {(), (0,), (1,)}
    assert pieces[(0,)][0] == (-1,)
    assert pieces[(1,)][0] == (1,)
    # rays in a 1-d fan have trivial perp
    assert pieces[(0,)][1] == ()
    # the zero-section piece has the full dual space: no constraints stored
    assert pieces[()][1] == ()


def test_ss_estimate_zero_divisor():
    fan = builtin_fan("P1")
    D = divisor_from_coeffs(fan, (0, 0))
    est = ss_estimate(D)
    for rays, apex, _ in est.pieces:
        assert all(c == 0 for c in apex)


def test_ss_estimate_p2_counts():
    fan = builtin_fan("P2")
    D = divisor_from_coeffs(fan, (1, 1, 1))
    est = ss_estimate(D)
    nonzero = [(rays, apex, perp) for rays, apex, perp in est.pieces if rays]
    assert len(nonzero) == 6  # 3 rays + 3 maximal cones
    for rays, _, perp in nonzero:
        # dim of the perp lattice piece is n - dim sigma
        assert len(perp) == 2 - len(rays)


def test_disjoint_at_infinity():
    fan = builtin_fan("P1")
    cert = disjoint_at_infinity(divisor_from_coeffs(fan, (F(1, 2), F(1, 2))))
    assert cert.verdict == "disjoint"
    assert all(w != 0 for w in cert.witnesses.values())
    cert2 = disjoint_at_infinity(divisor_from_coeffs(fan, (1, F(1, 2))))
    assert cert2.verdict == "unknown"
    data = cert.to_json()
    assert data["verdict"] == "disjoint"


def test_disjoint_along_probe_path():
    fan = builtin_fan("P2")
    A = certify_projective(fan, positive=True)
    path = build_deformation_path(fan, (-F(1, 2), 0), A)
    D_third = path.divisor_at(F(1, 3))
    assert disjoint_at_infinity(D_third).verdict == "disjoint"


def test_validate_path_p1():
    fan = builtin_fan("P1")
    A = divisor_from_coeffs(fan, (1, 1))
    cert = validate_path(build_deformation_path(fan, (0,), A))
    assert cert.verdict
    assert all(not r["in_unit_interval"] for r in cert.rays)
    data = cert.to_json()
    assert data["verdict"] == "pass"
    assert all(not r["in_unit_interval"] for r in data["rays"])


def test_validate_path_p2():
    fan = builtin_fan("P2")
    A = divisor_from_coeffs(fan, (1, 1, 1))
    cert = validate_path(build_deformation_path(fan, (-F(1, 2), 0), A))
    assert cert.verdict


def test_validate_path_adversarial():
    # forcing eps0 far too large pushes an integer crossing into (0,1)
    fan = builtin_fan("P1")
    A = divisor_from_coeffs(fan, (1, 1))
    broken = build_deformation_path(fan, (0,), A, eps0_override=F(5, 2))
    cert = validate_path(broken)
    assert not cert.verdict
    assert any(r["in_unit_interval"] or not r["endpoints_ok"] for r in cert.rays)


def test_path_certificates_random_sweep():
    rng = random.Random(0)
    for name in ("P1", "P2", "P1xP1", "F2", "F3"):
        fan = builtin_fan(name)
        A = certify_projective(fan, positive=True)
        for _ in range(40):
            x = tuple(F(rng.randint(-35, 35), rng.choice((1, 2, 3, 4, 5, 6, 7)))
                      for _ in range(fan.dim))
            cert = validate_path(build_deformation_path(fan, x, A))
            assert cert.verdict, (name, x)


def test_lambda_contains():
    fan = builtin_fan("P1")
    # the zero-section piece accepts every base point
    assert lambda_contains(fan, (F(1, 7),), (0,))
    # covector on the positive ray needs an integral pairing
    assert not lambda_contains(fan, (F(1, 2),), (1,))
    assert lambda_contains(fan, (3,), (-2,))


def test_lambda_pieces():
    fan = builtin_fan("P2")
    lam = lambda_sigma(fan)
    assert len(lam.pieces) == 7  # 1 + 3 + 3 cones
    by_rays = {rays: perp for rays, perp in lam.pieces}
    assert len(by_rays[(0,)]) == 1  # perp of a ray is a line
    assert by_rays[(0, 1)] == ()    # perp of a maximal cone is zero


@given(st.integers(-4, 4), st.integers(-4, 4),
       st.fractions(min_value=-2, max_value=2, max_denominator=5),
       st.fractions(min_value=-2, max_value=2, max_denominator=5))
@settings(max_examples=50, deadline=None)
def test_lambda_contains_lattice_periodic(m1, m2, x1, x2):
    fan = builtin_fan("P2")
    p = (1, 1)  # covector in the first maximal cone
    x = (x1, x2)
    shifted = (x1 + m1, x2 + m2)
    assert lambda_contains(fan, x, p) == lambda_contains(fan, shifted, p)
