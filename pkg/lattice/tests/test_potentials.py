import math

import numpy as np
from django.test import SimpleTestCase

from lattice.exceptions import ConfigurationError, DomainError, InputError
from lattice.potentials import PotentialFamily, audit_assumptions


class PotentialFamilyTests(SimpleTestCase):
    def setUp(self):
        self.fam = PotentialFamily(k1=1.0, k2=1.0, K=2)

    def test_delta1_is_the_minimizer(self):
        """Checks that J_1 is stationary at delta_1 = (2 k1 / k2)^(1/6)"""
        delta1 = self.fam.delta1
        slope = self.fam.derivative(1, delta1)

        self.assertAlmostEqual(
            delta1, 2.0 ** (1.0 / 6.0), places=14,
            msg="""Wrong delta_1. Expected: {}. Obtained: {}""".format(
                2.0 ** (1.0 / 6.0), delta1
            )
        )
        self.assertLess(
            abs(slope), 1e-12,
            msg="""J_1' should vanish at delta_1. Obtained: {}""".format(slope)
        )

    def test_evaluate_is_infinite_off_the_domain(self):
        """Checks J_j(z) = +inf for every z <= 0"""
        values = self.fam.evaluate(2, np.array([-3.0, -1e-9, 0.0]))

        self.assertTrue(
            np.all(np.isposinf(values)),
            msg="""J_2 should be +inf on z <= 0. Obtained: {}""".format(values)
        )
        self.assertTrue(
            np.isfinite(self.fam.evaluate(1, 1e-3)),
            msg="""J_1 should be finite on z > 0."""
        )

    def test_evaluate_scalar_returns_scalar(self):
        """Checks that a scalar strain gives a scalar energy"""
        value = self.fam.evaluate(1, self.fam.delta1)

        self.assertFalse(
            isinstance(value, np.ndarray),
            msg="""evaluate() should not wrap scalars in arrays."""
        )
        self.assertAlmostEqual(
            value, -self.fam.energy_scale, places=14,
            msg="""J_1(delta_1) should equal -k2^2/(4 k1). Obtained: {}"""
            .format(value)
        )

    def test_derivatives_match_finite_differences(self):
        """Checks closed-form J_j' and J_j'' against central differences"""
        h = 1e-6
        delta1 = self.fam.delta1
        strains = np.random.default_rng(0).uniform(delta1 / 2, 4 * delta1, 100)
        for j in (1, 2):
            for z in strains:
                fd1 = (self.fam.evaluate(j, z + h)
                       - self.fam.evaluate(j, z - h)) / (2 * h)
                fd2 = (self.fam.derivative(j, z + h)
                       - self.fam.derivative(j, z - h)) / (2 * h)
                exact1 = self.fam.derivative(j, z)
                exact2 = self.fam.derivative(j, z, order=2)

                self.assertLess(
                    abs(fd1 - exact1), 1e-6 * max(1.0, abs(exact1)),
                    msg="""Wrong J_{}'({}). Expected: {}. Obtained: {}"""
                    .format(j, z, fd1, exact1)
                )
                self.assertLess(
                    abs(fd2 - exact2), 1e-6 * max(1.0, abs(exact2)),
                    msg="""Wrong J_{}''({}). Expected: {}. Obtained: {}"""
                    .format(j, z, fd2, exact2)
                )

    def test_derivative_outside_domain(self):
        """Checks that derivatives at z <= 0 raise DomainError"""
        with self.assertRaises(DomainError):
            self.fam.derivative(1, 0.0)
        with self.assertRaises(DomainError):
            self.fam.derivative(2, np.array([1.0, -1.0]), order=2)

    def test_invalid_family(self):
        """Checks that non-positive constants or K out of range are refused"""
        for k1, k2, K in ((0.0, 1.0, 2), (1.0, -1.0, 2), (1.0, 1.0, 0),
                          (1.0, 1.0, 9)):
            with self.assertRaises(InputError, msg="""Family ({}, {}, {})
                    should be rejected.""".format(k1, k2, K)):
                PotentialFamily(k1=k1, k2=k2, K=K)

    def test_landmarks_ordering(self):
        """Checks zc1 > delta_1 > zc2 > delta_2 for next-to-nearest
        neighbours"""
        marks = self.fam.landmarks()
        delta1, delta2 = marks.delta

        self.assertGreater(marks.zc1, delta1)
        self.assertGreater(delta1, marks.zc2)
        self.assertGreater(marks.zc2, delta2)
        self.assertEqual(
            marks.zc3, delta1,
            msg="""zc3 should equal delta_1. Obtained: {}""".format(marks.zc3)
        )
        self.assertLess(
            abs(self.fam.derivative(1, marks.zc1, order=2)), 1e-12,
            msg="""J_1'' should vanish at the inflection point zc1."""
        )

    def test_energy_scale(self):
        """Checks |J_1(delta_1)| = k2^2 / (4 k1) for another family"""
        fam = PotentialFamily(k1=2.0, k2=3.0, K=1)

        self.assertAlmostEqual(
            fam.energy_scale, 9.0 / 8.0, places=14,
            msg="""Wrong energy scale. Obtained: {}""".format(fam.energy_scale)
        )
        self.assertAlmostEqual(
            fam.evaluate(1, fam.delta1), -fam.energy_scale, places=13
        )

    def test_cauchy_born_sums_the_orders(self):
        """Checks J_CB(z) = J_1(z) + J(2z) for K = 2"""
        z = 1.3
        expected = (z ** -12 - z ** -6) + ((2 * z) ** -12 - (2 * z) ** -6)

        self.assertAlmostEqual(
            self.fam.cauchy_born(z), expected, places=14,
            msg="""Wrong J_CB({}). Expected: {}. Obtained: {}""".format(
                z, expected, self.fam.cauchy_born(z)
            )
        )


class AuditTests(SimpleTestCase):
    def test_lennard_jones_passes(self):
        """Checks that the standard next-to-nearest neighbour family passes
        every structural check"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        report = audit_assumptions(fam)

        self.assertTrue(
            report.passed,
            msg="""Audit failed: {}""".format(
                [(check.name, check.margin) for check in report.failures()]
            )
        )
        for check in report.checks:
            self.assertNotEqual(
                check.status, 'skipped',
                msg="""No check should be skipped for K = 2: {}""".format(
                    check.name
                )
            )

    def test_nearest_neighbours_skip_splitting(self):
        """Checks that splitting checks are skipped for K = 1"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=1)
        report = audit_assumptions(fam)

        self.assertEqual(report.get('(v) splitting coefficients').status,
                         'skipped')
        self.assertEqual(report.get('(1) convex/concave windows').status,
                         'skipped')
        self.assertTrue(report.passed)

    def test_longer_range_splitting(self):
        """Checks the splitting coefficients of K = 3"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=3)
        report = audit_assumptions(fam)
        check = report.get('(v) splitting coefficients')

        self.assertEqual(
            check.status, 'pass',
            msg="""Splitting check failed with margin {}""".format(
                check.margin
            )
        )
        self.assertFalse(check.sampled)

    def test_negative_half_line_is_exact(self):
        """Checks that the growth check at -inf is not a sampled check"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        check = audit_assumptions(fam).get('(ii) superlinear growth at -inf')

        self.assertFalse(check.sampled)
        self.assertEqual(check.status, 'pass')

    def test_coarse_grid(self):
        """Checks that a grid below the minimum size is refused"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=2)

        with self.assertRaises(ConfigurationError):
            audit_assumptions(fam, grid=np.linspace(0.5, 3.0, 20))

    def test_margin_is_signed(self):
        """Checks that a failing check reports a non-positive margin"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        report = audit_assumptions(fam)

        for check in report.checks:
            if check.passed is None:
                continue
            self.assertEqual(
                check.passed, check.margin > 0,
                msg="""Status and margin disagree for {}""".format(check.name)
            )
            self.assertFalse(math.isnan(check.margin))

    def test_single_inflection_on_extreme_families(self):
        """Checks J_1'' changes sign once, at zc1, on far-apart families"""
        for k1, k2 in ((1e-3, 50.0), (50.0, 1e-3), (1.0, 1.0)):
            fam = PotentialFamily(k1=k1, k2=k2, K=2)
            zc1 = fam.landmarks().zc1
            z = np.linspace(fam.delta1 / 4.0, 20.0 * fam.delta1, 20001)
            signs = np.sign(fam.derivative(1, z, order=2))
            changes = np.flatnonzero(np.diff(signs) != 0)

            self.assertEqual(
                changes.size, 1,
                msg="""J_1'' should change sign once for k1={}, k2={}.
                Obtained: {}""".format(k1, k2, changes.size)
            )
            self.assertLessEqual(z[changes[0]], zc1)
            self.assertGreaterEqual(z[changes[0] + 1], zc1)
            self.assertEqual(
                audit_assumptions(fam).get('(1) convex/concave windows')
                .status, 'pass'
            )
