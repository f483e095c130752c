"""Exact combinatorics of toric fans, twisted polytope sheaves, and
cellular sheaf homs, with verification harnesses tying the two sides of
the coherent-constructible dictionary together on desk-scale examples.

All core arithmetic is exact (ints and fractions); no floating point.
"""

from .lattice_fan import (Cone, Fan, builtin_fan, builtin_fan_names, dual_cone,
                          faces, is_complete, is_smooth, load_fan, wall_pairs)
from .divisors import (AmplePolytope, DeformationPath, DivisorData,
                       ample_polytope, build_deformation_path, certify_projective,
                       divisor_from_coeffs, divisor_from_json, divisor_from_vertices,
                       is_convex, is_strictly_convex, probe_divisor, support_value,
                       translate)
from .arrangement import ArrangementComplex, Cell, Hyperplane, build_arrangement
from .cellular import (CellularSheaf, GradedDims, SheafComplex, cohomology, cone,
                       constant_on_closed, convolution_euler_stalk,
                       convolution_fiber_1d, costandard_on_open, direct_sum,
                       hom_complex, shift, stalk)
from .twisted_sheaf import (ShardComplex, build_P, degree_bound_check,
                            required_hyperplanes, stalk_P, support_box, to_cellular,
                            torus_hom, torus_stalk, verdier_pair_check)
from .microlocal import (LambdaSigma, PathCertificate, SSEstimate,
                         disjoint_at_infinity, lambda_contains, lambda_sigma,
                         ss_estimate, validate_path)
from .harness import (CohomologyReport, VerificationResult, probe_collection,
                      run_suite, suite_names, toric_cohomology, verify_ccc_hom,
                      verify_corepresentability)

__version__ = "0.1.0"
