import itertools
import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from lattice.boundary_layer import beta
from lattice.chain_model import (
    ELASTIC, FRACTURED, ChainState, affine_start, cracked_start,
    energy_bulk, energy_rescaled, minimize_chain, sweep, zeta_terms
)
from lattice.effective_density import build_model
from lattice.exceptions import InputError, UnsupportedError
from lattice.potentials import PotentialFamily


def random_state(n, ell, seed, noise=0.01):
    rng = np.random.default_rng(seed)
    v = affine_start(n, ell) + rng.normal(scale=noise / math.sqrt(n), size=n)
    v[0] = 0.0
    return ChainState(n=n, ell=ell, v=v)


class ChainStateTests(SimpleTestCase):
    def test_first_entry_is_pinned(self):
        """Checks that v^0 != 0 is refused"""
        with self.assertRaises(InputError):
            ChainState(n=4, ell=0.1, v=np.array([0.1, 0.2, 0.3, 0.4]))

    def test_wrong_length(self):
        """Checks that v must hold n entries"""
        with self.assertRaises(InputError):
            ChainState(n=4, ell=0.1, v=np.zeros(3))

    def test_gaps_wrap_around(self):
        """Checks v^{i+n} = v^i + l in the bond jumps"""
        state = ChainState(n=4, ell=1.0, v=np.array([0.0, 0.1, 0.3, 0.6]))

        self.assertTrue(np.allclose(state.gaps(), [0.1, 0.2, 0.3, 0.4]))
        self.assertAlmostEqual(float(np.sum(state.gaps())), 1.0, places=14)


class EnergyTests(SimpleTestCase):
    def setUp(self):
        self.fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        self.model = build_model(self.fam)

    def test_bulk_energy_of_the_ground_state(self):
        """Checks H_n of the uniform chain at gamma is J_CB(gamma)"""
        n = 16
        u = self.model.gamma * np.arange(n + 1) / n
        value = energy_bulk(self.fam, u, n)

        self.assertAlmostEqual(
            value, self.model.jcb_at_gamma, places=12,
            msg="""Wrong bulk energy. Expected: {}. Obtained: {}""".format(
                self.model.jcb_at_gamma, value
            )
        )

    def test_bulk_energy_nearest_neighbours(self):
        """Checks H_n = J_1(delta_1) on the uniform K = 1 chain"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=1)
        n = 8
        u = fam.delta1 * np.arange(n + 1) / n

        self.assertAlmostEqual(energy_bulk(fam, u, n), -fam.energy_scale,
                               places=12)

    def test_bulk_energy_interpenetration(self):
        """Checks H_n = +inf when two atoms coincide"""
        n = 8
        u = np.arange(n + 1) / n
        u[3] = u[2]

        self.assertTrue(np.isposinf(energy_bulk(self.fam, u, n)))

    def test_bulk_energy_translation(self):
        """Checks H_n(u + c) = H_n(u)"""
        n = 16
        rng = np.random.default_rng(4)
        u = self.model.gamma * np.arange(n + 1) / n \
            + rng.normal(scale=1e-3, size=n + 1)

        self.assertAlmostEqual(energy_bulk(self.fam, u + 3.7, n),
                               energy_bulk(self.fam, u, n), places=10)

    def test_rescaled_energy_relabelled_origin(self):
        """Checks E_n^l is unchanged when the pinned site moves"""
        state = random_state(32, 0.3, seed=8)
        value, _ = energy_rescaled(self.fam, self.model, state)
        for k in (1, 5, 31):
            ext = state.extended(k)
            moved = ChainState(n=32, ell=0.3, v=ext[k:k + 32] - ext[k])
            shifted, _ = energy_rescaled(self.fam, self.model, moved)

            self.assertAlmostEqual(
                shifted, value, places=11,
                msg="""Energy depends on the pinned site k={}""".format(k)
            )

    def test_rescaled_energy_vanishes_at_rest(self):
        """Checks E_n^0(0) = 0"""
        value, grad = energy_rescaled(
            self.fam, self.model, ChainState(n=32, ell=0.0, v=np.zeros(32))
        )

        self.assertEqual(value, 0.0)
        self.assertLess(np.max(np.abs(grad)), 1e-12)

    def test_affine_small_stretch(self):
        """Checks E_n^l(affine) ~ alpha l^2 for small l"""
        n, ell = 1024, 0.1
        value, _ = energy_rescaled(
            self.fam, self.model,
            ChainState(n=n, ell=ell, v=affine_start(n, ell))
        )
        expected = self.model.alpha * ell * ell

        self.assertLess(
            abs(value - expected), 0.1 * expected,
            msg="""Affine energy. Expected about: {}. Obtained: {}""".format(
                expected, value
            )
        )

    def test_gradient_matches_finite_differences(self):
        """Checks the rescaled gradient against central differences"""
        h = 1e-6
        for K, seed in itertools.product((2, 3), range(25)):
            fam = PotentialFamily(k1=1.0, k2=1.0, K=K)
            model = build_model(fam)
            state = random_state(32, 0.3, seed=seed)
            _, grad = energy_rescaled(fam, model, state)
            fd = np.zeros(state.n - 1)
            for i in range(1, state.n):
                step = np.zeros(state.n)
                step[i] = h
                plus = ChainState(n=state.n, ell=state.ell, v=state.v + step)
                minus = ChainState(n=state.n, ell=state.ell, v=state.v - step)
                fd[i - 1] = (energy_rescaled(fam, model, plus)[0]
                             - energy_rescaled(fam, model, minus)[0]) / (2 * h)

            self.assertLess(
                np.linalg.norm(fd - grad), 1e-4 * np.linalg.norm(grad),
                msg="""Rescaled gradient disagrees with finite differences
                for K={}, seed={}""".format(K, seed)
            )

    def test_zeta_terms_sum_to_energy(self):
        """Checks sum zeta_{j,i} = E_n^l and zeta_{j,i} >= 0"""
        for K, seed in itertools.product((2, 3, 4), range(7)):
            fam = PotentialFamily(k1=1.0, k2=1.0, K=K)
            model = build_model(fam)
            state = random_state(32, 0.2, seed=10 + seed)
            energy, _ = energy_rescaled(fam, model, state)
            terms = zeta_terms(fam, model, state)

            self.assertEqual(terms.shape, (K - 1, 32))
            self.assertLess(
                abs(float(np.sum(terms)) - energy),
                1e-10 * max(1.0, abs(energy)),
                msg="""zeta terms do not add up to E_n^l for K={}""".format(K)
            )
            self.assertGreaterEqual(
                float(np.min(terms)), -1e-12,
                msg="""zeta terms should be nonnegative for K={}""".format(K)
            )

    def test_zeta_terms_need_splitting(self):
        """Checks that zeta terms are refused for K = 1"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=1)
        model = build_model(fam)

        with self.assertRaises(UnsupportedError):
            zeta_terms(fam, model, ChainState(n=8, ell=0.0, v=np.zeros(8)))


class MinimizeChainTests(SimpleTestCase):
    def setUp(self):
        self.fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        self.model = build_model(self.fam)
        self.beta = beta(self.fam, self.model).beta
        self.ell_star = math.sqrt(self.beta / self.model.alpha)

    def test_unstretched_chain(self):
        """Checks min E_n^0 = 0 at the ground state"""
        result = minimize_chain(self.fam, self.model, 64, 0.0,
                                beta_value=self.beta)

        self.assertLess(abs(result.energy), 1e-9)
        self.assertEqual(result.classification, ELASTIC)

    def test_elastic_regime(self):
        """Checks E_n^l ~ alpha l^2 below the critical stretch"""
        ell = 0.5 * self.ell_star
        result = minimize_chain(self.fam, self.model, 512, ell,
                                beta_value=self.beta)
        expected = self.model.alpha * ell * ell

        self.assertEqual(result.classification, ELASTIC)
        self.assertLess(
            abs(result.energy - expected), 0.1 * expected,
            msg="""Elastic energy. Expected about: {}. Obtained: {}""".format(
                expected, result.energy
            )
        )
        self.assertAlmostEqual(result.predicted_limit, expected, places=12)

    def test_fractured_regime(self):
        """Checks E_n^l ~ beta above the critical stretch"""
        ell = 2.0 * self.ell_star
        result = minimize_chain(self.fam, self.model, 512, ell,
                                beta_value=self.beta)

        self.assertEqual(result.classification, FRACTURED)
        self.assertTrue(result.start.startswith('cracked'))
        self.assertLess(
            abs(result.energy - self.beta), 0.1 * self.beta,
            msg="""Fractured energy. Expected about: {}. Obtained: {}"""
            .format(self.beta, result.energy)
        )
        self.assertGreater(result.max_gap, ell / 2.0)

    def test_seeded_jitter_is_deterministic(self):
        """Checks that equal seeds give equal results"""
        runs = [
            minimize_chain(self.fam, self.model, 64, 0.1,
                           beta_value=self.beta, starts=('jitter',),
                           rng=np.random.default_rng(7))
            for _ in range(2)
        ]

        self.assertEqual(runs[0].energy, runs[1].energy)
        self.assertTrue(np.array_equal(runs[0].state.v, runs[1].state.v))

    def test_more_starts_never_raise_energy(self):
        """Checks min E_n^l does not grow when start kinds are appended"""
        ell = 2.0 * self.ell_star
        energies = [
            minimize_chain(self.fam, self.model, 128, ell,
                           beta_value=self.beta, starts=starts,
                           rng=np.random.default_rng(1)).energy
            for starts in (('affine',), ('affine', 'cracked'),
                           ('affine', 'cracked', 'jitter'))
        ]

        for before, after in zip(energies, energies[1:]):
            self.assertLessEqual(
                after, before,
                msg="""More starts raised the energy: {}""".format(energies)
            )

    def test_losing_starts_are_screened(self):
        """Checks cracked starts are dropped early in the elastic regime"""
        ell = 0.5 * self.ell_star
        result = minimize_chain(self.fam, self.model, 128, ell,
                                beta_value=self.beta, screen_iter=1)
        affine = minimize_chain(self.fam, self.model, 128, ell,
                                beta_value=self.beta, starts=('affine',))

        self.assertEqual(result.start, 'affine')
        self.assertEqual(result.screened,
                         ['cracked@32', 'cracked@64', 'cracked@96'])
        self.assertEqual(result.energy, affine.energy)
        self.assertFalse(result.notes)

    def test_cracked_start(self):
        """Checks the crack sits across bond m -> m + 1"""
        v = cracked_start(8, 0.5, 3)

        self.assertTrue(np.array_equal(v, [0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5]))

    def test_chain_too_short(self):
        """Checks that n < 8K is refused"""
        with self.assertRaises(InputError):
            minimize_chain(self.fam, self.model, 15, 0.1,
                           beta_value=self.beta)

    def test_unknown_start(self):
        """Checks that an unknown start kind is refused"""
        with self.assertRaises(InputError):
            minimize_chain(self.fam, self.model, 16, 0.1,
                           beta_value=self.beta, starts=('random',))

    def test_sweep(self):
        """Checks the sweep rows and the elastic to fractured crossover"""
        ells = [1.5 * self.ell_star, 0.5 * self.ell_star]
        rows = sweep(self.fam, self.model, [128], ells, beta_value=self.beta)

        self.assertEqual([row.ell for row in rows], sorted(ells))
        self.assertEqual([row.classification for row in rows],
                         [ELASTIC, FRACTURED])
        for row in rows:
            self.assertAlmostEqual(
                row.normalized_energy, row.energy / self.fam.energy_scale,
                places=12
            )
            self.assertIsNotNone(row.relative_gap)


@pytest.mark.slow
class LimitLawTests(SimpleTestCase):
    def test_large_chain_follows_the_limit(self):
        """Checks min E_n^l against min(alpha l^2, beta) at n = 8192"""
        fam = PotentialFamily(k1=1.0, k2=1.0, K=2)
        model = build_model(fam)
        beta_value = beta(fam, model).beta
        ell_star = math.sqrt(beta_value / model.alpha)
        factors = (0.25, 0.5, 0.75, 1.25, 1.5, 2.0)
        rows = sweep(fam, model, [8192], [f * ell_star for f in factors],
                     beta_value=beta_value)

        self.assertEqual(len(rows), len(factors))
        for factor, row in zip(factors, rows):
            self.assertLessEqual(
                row.relative_gap, 0.05,
                msg="""Relative gap {} at l = {} l*""".format(
                    row.relative_gap, factor
                )
            )
            self.assertEqual(
                row.classification, ELASTIC if factor < 1.0 else FRACTURED,
                msg="""Wrong classification at l = {} l*""".format(factor)
            )
