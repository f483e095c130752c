from fractions import Fraction

import pytest

from tccc.cellular import GradedDims
from tccc.divisors import divisor_from_coeffs, probe_divisor
from tccc.errors import InputError, UnknownSuiteError
from tccc.harness import (CohomologyReport, calibration_shift, probe_collection,
                          rational_grid, run_suite, suite_names, toric_cohomology,
                          validate_oracle, verify_ccc_hom,
                          verify_corepresentability)
from tccc.lattice_fan import builtin_fan

F = Fraction


def cech_p1(d):
    """Classical two-chart computation for the degree-d bundle on the line."""
    return GradedDims({k: v for k, v in ((0, max(d + 1, 0)), (1, max(-d - 1, 0)))
                       if v})


def test_toric_cohomology_p1():
    fan = builtin_fan("P1")
    # lattice points of [-1, 1]
    assert toric_cohomology(fan, divisor_from_coeffs(fan, (1, 1))).total == \
        GradedDims({0: 3})
    assert toric_cohomology(fan, divisor_from_coeffs(fan, (-1, -1))).total == \
        cech_p1(-2)
    for a in range(-3, 4):
        for b in range(-3, 4):
            got = toric_cohomology(fan, divisor_from_coeffs(fan, (a, b))).total
            assert got == cech_p1(a + b), (a, b)


def test_toric_cohomology_p2():
    fan = builtin_fan("P2")
    # degree -3: Serre dual of the structure sheaf
    got = toric_cohomology(fan, divisor_from_coeffs(fan, (-1, -1, -1))).total
    assert got == GradedDims({2: 1})
    assert toric_cohomology(fan, divisor_from_coeffs(fan, (0, 0, 0))).total == \
        GradedDims({0: 1})
    # ample degree d: binomial(d+2, 2) sections
    for d in (1, 2, 3):
        D = divisor_from_coeffs(fan, (0, 0, d))
        got = toric_cohomology(fan, D).total
        assert got == GradedDims({0: (d + 1) * (d + 2) // 2}), d


def test_toric_cohomology_serre_duality():
    for name in ("P1", "P2", "F2"):
        fan = builtin_fan(name)
        K = divisor_from_coeffs(fan, [-1] * len(fan.rays))
        import itertools
        for coeffs in itertools.islice(
                itertools.product(range(-2, 3), repeat=len(fan.rays)), 0, 40, 3):
            D = divisor_from_coeffs(fan, coeffs)
            lhs = toric_cohomology(fan, D).total
            rhs = toric_cohomology(fan, K - D).total
            assert lhs == GradedDims({fan.dim - d: v for d, v in rhs.items()}), coeffs


def test_toric_cohomology_rejects_fractional():
    fan = builtin_fan("P1")
    with pytest.raises(InputError):
        toric_cohomology(fan, divisor_from_coeffs(fan, (F(1, 2), 0)))


def test_validate_oracle_builtins():
    for name in ("P1", "P2", "P1xP1", "F2", "F3"):
        validate_oracle(builtin_fan(name))


def test_weight_decomposition_reports():
    fan = builtin_fan("P1")
    rep = toric_cohomology(fan, divisor_from_coeffs(fan, (1, 1)))
    assert isinstance(rep, CohomologyReport)
    assert set(rep.by_weight) == {(-1,), (0,), (1,)}
    data = rep.to_json()
    assert data["total"] == {"0": 3}


def test_verify_ccc_hom_examples():
    fan = builtin_fan("P1")
    zero = divisor_from_coeffs(fan, (0, 0))
    o2 = divisor_from_coeffs(fan, (1, 1))
    res = verify_ccc_hom(fan, zero, o2)
    assert res.passed
    res = verify_ccc_hom(fan, o2, zero)
    assert res.passed
    for name in ("P2", "F2"):
        f = builtin_fan(name)
        D = divisor_from_coeffs(f, [1] * len(f.rays))
        assert verify_ccc_hom(f, D, D).passed


def test_calibration_shift_constant_vanishes():
    # the probe enters homs shifted by the dimension; the frozen residual
    # convention constant calibrated on the 1-d skyscraper instance is zero
    assert calibration_shift() == 0


def test_verify_corepresentability_examples():
    p1 = builtin_fan("P1")
    zero = divisor_from_coeffs(p1, (0, 0))
    assert verify_corepresentability(p1, (0,), zero).passed
    o2 = divisor_from_coeffs(p1, (1, 1))
    assert verify_corepresentability(p1, (F(1, 2),), o2).passed
    p2 = builtin_fan("P2")
    anti = divisor_from_coeffs(p2, (1, 1, 1))
    assert verify_corepresentability(p2, (-F(1, 2), 0), anti).passed


def test_probe_collection_p1():
    fan = builtin_fan("P1")
    grid = [(F(0),), (F(1, 4),), (F(1, 2),), (F(3, 4),)]
    classes = probe_collection(fan, grid)
    expected = {divisor_from_coeffs(fan, (0, d)).class_rep() for d in (1, 2)}
    assert classes == expected


def test_probe_collection_p2():
    fan = builtin_fan("P2")
    grid = rational_grid(fan, 4)
    classes = probe_collection(fan, grid)
    expected = {divisor_from_coeffs(fan, (0, 0, d)).class_rep() for d in (1, 2, 3)}
    assert classes == expected


def test_probe_collection_f2_finite():
    fan = builtin_fan("F2")
    classes = probe_collection(fan, rational_grid(fan, 3))
    assert 0 < len(classes) < 50


def test_rational_grid():
    fan = builtin_fan("P1")
    grid = rational_grid(fan, 3)
    assert (F(0),) in grid and (F(1, 2),) in grid and (F(2, 3),) in grid
    assert len(grid) == 4


def test_run_suite_smoke():
    res = run_suite("p1-examples")
    assert res.passed
    good, total = res.counts()
    assert (good, total) == (3, 3)
    res = run_suite("fan-axioms")
    assert res.passed
    with pytest.raises(UnknownSuiteError):
        run_suite("no-such-suite")
    assert "ccc-hom" in suite_names()


def test_run_suite_p2_example():
    res = run_suite("p2-example")
    assert res.passed
    data = res.to_json()
    assert data["passed"] is True
