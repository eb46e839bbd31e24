"""Experiment driver: one function per CLI subcommand, plus ``run``.

Each experiment fills a ``RunResult`` with tables and summary entries.
``run`` adds the model constants, writes every table and the summary once
all cells are computed, and only then raises a failure the experiment
recorded (failed audit, unconverged layer, failed decay certificate).
"""
import logging
import math
from pathlib import Path

import numpy as np

from . import __version__
from .boundary_layer import (
    beta, certify_decay, decay_rows, equilibrium_residuals, with_residuals
)
from .cell_formula import lower_bound, phi_convergence, upper_bound
from .chain_model import FRACTURED, sweep
from .conf import lattice_settings
from .constants import NOT_CONVERGED_ERROR
from .effective_density import (
    build_model, convex_envelope, gamma_numeric, jcb_star_star,
    psi_star_star
)
from .exceptions import ConsistencyError, NonConvergenceError
from .models import RunResult, Table
from .potentials import audit_assumptions
from .serializers import (
    AuditCheckSerializer, BetaReportSerializer, DecayReportSerializer,
    EffectiveModelSerializer
)
from .utils import write_csv, write_json

logger = logging.getLogger(__name__)

DENSITY_FACTORS = np.round(np.arange(0.8, 5.0 + 5e-4, 1e-3), 6)
PHI_FACTORS = (0.95, 1.0, 1.5, 3.0)
PHI_SIZES = (16, 32, 64, 128)
CHAIN_SIZES = (512,)
ELL_FACTORS = (0.25, 0.5, 0.75, 1.25, 1.5, 2.0)


def _strains(config, model, default_factors):
    grids = config.grids
    if 'z_grid' in grids:
        return np.sort(np.asarray(grids['z_grid'], dtype=float))
    factors = grids.get('z_factors', default_factors)
    return np.sort(np.asarray(factors, dtype=float)) * model.gamma


def _ell_star(model, beta_report):
    if beta_report.beta <= 0:
        return None
    return math.sqrt(beta_report.beta / model.alpha)


def run_audit(config, model, beta_report, result):
    grid = config.grids.get('z_grid')
    report = audit_assumptions(config.family, grid=grid)
    result.tables.append(Table(
        name='audit',
        header=('check', 'status', 'margin', 'witness', 'sampled', 'note'),
        rows=[(check.name, check.status, check.margin, check.witness,
               check.sampled, check.note) for check in report.checks]
    ))
    result.summary['audit'] = {
        'passed': report.passed,
        'grid_points': report.grid_points,
        'checks': AuditCheckSerializer(report.checks, many=True).data,
    }
    if not report.passed:
        names = ', '.join(check.name for check in report.failures())
        result.failure = ConsistencyError(f'Audit failed: {names}')


def run_density(config, model, beta_report, result):
    fam = config.family
    z = _strains(config, model, DENSITY_FACTORS)
    jcb = fam.cauchy_born(z)
    closed = jcb_star_star(model, z)
    header = ['z', 'jcb', 'jcb_star_star']
    columns = [z, jcb, closed]
    for j in range(2, fam.K + 1):
        header += [f'psi_{j}', f'psi_{j}_star_star']
        columns += [model.psi(j, z), psi_star_star(model, j, z)]
    result.tables.append(Table(
        name='density', header=header, rows=list(zip(*columns))
    ))

    envelopes = {}
    functions = [('jcb', jcb, closed)] + [
        (f'psi_{j}', model.psi(j, z), psi_star_star(model, j, z))
        for j in range(2, fam.K + 1)
    ]
    for name, values, exact in functions:
        table = convex_envelope(np.column_stack((z, values)), tail_limit=0.0)
        result.tables.append(Table(
            name=f'envelope_{name}', header=('z', 'f', 'f_star_star'),
            rows=table.rows()
        ))
        envelopes[name] = {
            'kink': table.kink,
            'sup_error': float(np.max(np.abs(table.values - exact))),
        }

    oracle = gamma_numeric(fam)
    result.summary['density'] = {
        'gamma_numeric': oracle,
        'gamma_discrepancy': abs(oracle - model.gamma),
        'c_sum': float(sum(model.c)) if model.c else None,
        'envelopes': envelopes,
    }


def run_phi(config, model, beta_report, result):
    fam = config.family
    strains = _strains(config, model, PHI_FACTORS)
    sizes = config.grids.get('N_list', PHI_SIZES)
    table = Table(name='phi',
                  header=('N', 'z', 'phi_N', 'jcb_star_star', 'abs_error'))
    trends = []
    for z in strains:
        convergence = phi_convergence(fam, model, z, sizes)
        sandwich = True
        for row in convergence.rows:
            table.rows.append((row.N, row.z, row.phi_N, row.jcb_star_star,
                               row.abs_error))
            slack = 1e-9 * fam.energy_scale
            if row.phi_N < lower_bound(fam, model, z, row.N) - slack:
                sandwich = False
            if z <= model.gamma and \
                    row.phi_N > upper_bound(fam, z, row.N) + slack:
                sandwich = False
        trends.append({
            'z': float(z), 'trend': convergence.trend,
            'monotone': convergence.monotone, 'sandwich': sandwich,
        })
    result.tables.append(table)
    result.summary['phi'] = trends


def run_chain(config, model, beta_report, result):
    fam = config.family
    grids = config.grids
    ell_star = _ell_star(model, beta_report)
    if 'ell_grid' in grids:
        ells = grids['ell_grid']
    else:
        factors = grids.get('ell_factors', ELL_FACTORS)
        ells = [factor * (ell_star or 0.0) for factor in factors]
    rng = np.random.default_rng(config.seed)
    rows = sweep(fam, model, grids.get('n_list', CHAIN_SIZES), ells,
                 beta_value=beta_report.beta, rng=rng,
                 starts=('affine', 'cracked', 'jitter'))
    result.tables.append(Table(
        name='chain',
        header=('n', 'ell', 'energy', 'normalized_energy', 'classification',
                'predicted', 'relative_gap', 'start'),
        rows=[(row.n, row.ell, row.energy, row.normalized_energy,
               row.classification, row.predicted_limit, row.relative_gap,
               row.start) for row in rows]
    ))
    crossover = {}
    for row in rows:
        if row.classification == FRACTURED and row.n not in crossover:
            crossover[row.n] = row.ell
    result.summary['chain'] = {
        'first_fractured_ell': {str(n): ell for n, ell in crossover.items()},
    }


def _check_converged(beta_report, result):
    if not beta_report.converged:
        result.failure = NonConvergenceError(
            NOT_CONVERGED_ERROR.format(N=beta_report.N)
        )


def _layer_profile(config, model, beta_report):
    if config.family.K == 1:
        return beta_report.profile_tilde
    return beta_report.profile


def run_layer(config, model, beta_report, result):
    fam = config.family
    profile = _layer_profile(config, model, beta_report)
    residuals = equilibrium_residuals(fam, model, profile) \
        if fam.K == 2 else profile.residuals
    bound = [None] * profile.N
    if fam.K == 2:
        report = certify_decay(fam, model, profile)
        bound = report.lam ** np.arange(profile.N) * profile.r[0]
    result.tables.append(Table(
        name='layer', header=('i', 'r_i', 'bound', 'residual'),
        rows=[(i + 1, profile.r[i], bound[i], residuals[i])
              for i in range(profile.N)]
    ))
    layer = {
        'history': [list(step) for step in profile.history],
        'max_residual': float(np.max(np.abs(residuals))),
    }
    if fam.K == 2:
        layer['C_const'] = report.C_const
        layer['alpha_lb'] = report.alpha_lb
    result.summary['layer'] = layer
    _check_converged(beta_report, result)


def run_decay(config, model, beta_report, result):
    fam = config.family
    profile = _layer_profile(config, model, beta_report)
    profile = with_residuals(fam, model, profile)
    report = certify_decay(fam, model, profile)
    result.tables.append(Table(
        name='decay',
        header=('i', 'r_i', 'lambda^{i-1} r1', 'residual_i'),
        rows=decay_rows(profile, report)
    ))
    result.summary['decay'] = DecayReportSerializer(report).data
    _check_converged(beta_report, result)
    if result.failure is None and not report.certified:
        result.failure = ConsistencyError(
            f'Decay certificate fails at geometric {report.violations}, '
            f'monotone {report.monotone_violations}, '
            f'window {report.window_violations}'
        )


RUNNERS = {
    'audit': run_audit,
    'density': run_density,
    'phi': run_phi,
    'chain': run_chain,
    'layer': run_layer,
    'decay': run_decay,
}


def output_dir(config):
    if config.output_dir is not None:
        return Path(config.output_dir)
    return Path(lattice_settings.OUTPUT_DIR) / config.experiment


def run(config):
    """Run one experiment, write its CSV tables and ``summary.json``.

    Returns the ``RunResult``; raises the recorded failure after the
    artifacts are on disk.
    """
    logger.info('Starting experiment %s', config)
    result = RunResult(config=config)
    with lattice_settings.override(**config.tolerances):
        fam = config.family
        model = build_model(fam)
        beta_report = beta(fam, model)
        RUNNERS[config.experiment](config, model, beta_report, result)

        constants = {
            'model': EffectiveModelSerializer(model).data,
            'beta': BetaReportSerializer(beta_report).data,
            'beta_discrepancy': beta_report.discrepancy,
            'ell_star': _ell_star(model, beta_report),
            'lambda': None,
        }
        if fam.K == 2:
            constants['lambda'] = certify_decay(
                fam, model, beta_report.profile
            ).lam
    result.summary.update(constants)
    result.summary['config'] = config.echo()
    result.summary['version'] = __version__

    directory = output_dir(config)
    for table in result.tables:
        result.paths.append(
            write_csv(directory / table.filename, table.header, table.rows)
        )
    result.paths.append(write_json(directory / 'summary.json',
                                   _plain(result.summary)))
    logger.info('Experiment %s wrote %d files to %s', config.experiment,
                len(result.paths), directory)

    if result.failure is not None:
        raise result.failure
    return result


def _plain(value):
    """Summary data with numpy scalars and DRF containers made JSON-ready."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value
