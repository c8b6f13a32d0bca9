import io
import json
import os
import tempfile

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, override_settings

from market.exceptions import DomainError
from market.params import ModelParams, SensingParams

from .csvio import read_csv, render_csv, write_csv
from .observations import (
    cost_sensing_findings, energy_crossover, monotone_trend, profit_ordering, scheme_preference, share_bounds,
    wps_gain,
)
from .pipeline import run_three_stage
from .sweep import SWEEP_COLUMNS, SweepSpec, run_sweep, scheme_row

FAST = {'points': 401}


def run_command(name, **options):
    out = io.StringIO()
    call_command(name, stdout=out, **options)
    out.seek(0)
    return read_csv(out)


class CsvTests(SimpleTestCase):

    def test_schema_line_and_float_format(self):
        frame = pd.DataFrame([{'eta_l': 1 / 3, 'converged': True}])
        text = render_csv(frame, 'sweep')
        self.assertEqual(text.splitlines()[0], '# schema: sweep/1')
        self.assertIn('0.3333333333', text)
        self.assertEqual(text, render_csv(frame.copy(), 'sweep'))

    def test_file_round_trip(self):
        frame = pd.DataFrame([{'scheme': 'rss', 'eta_l': 0.25}])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'out.csv')
            write_csv(frame, 'benchmarks', path)
            schema, version, loaded = read_csv(path)
        self.assertEqual((schema, version), ('benchmarks', 1))
        self.assertEqual(loaded.loc[0, 'eta_l'], 0.25)

    def test_missing_schema(self):
        with self.assertRaises(DomainError):
            read_csv(io.StringIO('a,b\n1,2\n'))


class SweepSpecTests(SimpleTestCase):

    def test_inclusive_grid(self):
        values = SweepSpec('lambda', 0.4, 1.8, 0.1).values()
        self.assertEqual(len(values), 15)
        self.assertEqual(values[0], 0.4)
        self.assertEqual(values[-1], 1.8)

    def test_lambda_varies_beta2_only(self):
        params, sensing = ModelParams.defaults(), SensingParams.defaults()
        swept, same_sensing = SweepSpec('lambda', 0.4, 1.8, 0.1).apply(0.5, params, sensing)
        self.assertEqual(swept.beta2, 0.5 * params.beta1)
        self.assertEqual(swept.replace(beta2=params.beta2), params)
        self.assertIs(same_sensing, sensing)

    def test_sensing_cost(self):
        _, sensing = SweepSpec('cost_sensing', 0.0, 0.4, 0.1).apply(0.3, ModelParams.defaults(),
                                                                   SensingParams.defaults())
        self.assertEqual(sensing.c_s, 0.3)

    def test_invalid_specs(self):
        for kwargs in (
            dict(parameter='gamma1', start=0.1, stop=1.0, step=0.1),
            dict(parameter='lambda', start=1.0, stop=1.0, step=0.1),
            dict(parameter='lambda', start=0.4, stop=1.8, step=0.0),
            dict(parameter='lambda', start=0.4, stop=1.8, step=0.1, schemes=('monopoly',)),
        ):
            with self.assertRaises(DomainError):
                SweepSpec(**kwargs)


class PipelineTests(SimpleTestCase):

    def test_revenue_share(self):
        params = ModelParams.defaults()
        report = run_three_stage('rss', params, grid_steps=11, **FAST)
        self.assertTrue(report.agreed)
        self.assertTrue(0.0 < report.outcome.commission < 1.0)
        self.assertLessEqual(report.fixed_point_residual, 1e-8)
        self.assertLessEqual(report.stage3.shares.distance(report.shares), 1e-6)
        row = report.as_row()
        self.assertEqual(row['scheme'], 'rss')
        self.assertAlmostEqual(row['network_profit'], row['u_sl'] + row['u_db'])

    def test_disagreement_surfaces(self):
        report = run_three_stage('rss', ModelParams.defaults(cost_leasing=7.0), grid_steps=11, **FAST)
        self.assertFalse(report.agreed)
        self.assertEqual(report.shares.eta_l, 0.0)
        self.assertGreater(report.shares.eta_a, 0.0)
        self.assertEqual(report.as_row()['scheme'], 'rss')

    def test_unknown_scheme(self):
        with self.assertRaises(DomainError):
            run_three_stage('barter', ModelParams.defaults())


class RunSweepTests(SimpleTestCase):

    def test_benchmark_rows_in_order(self):
        spec = SweepSpec('lambda', 1.0, 1.4, 0.2, schemes=('pure_info', 'coordination'))
        frame = run_sweep(spec, ModelParams.defaults(), workers=2)
        self.assertEqual(list(frame.columns), list(SWEEP_COLUMNS))
        self.assertEqual(list(frame['value']), [1.0, 1.0, 1.2, 1.2, 1.4, 1.4])
        self.assertEqual(list(frame['scheme']), ['pure_info', 'coordination'] * 3)
        self.assertTrue((frame['error'] == '').all())
        self.assertTrue((frame['fixed_point_residual'] <= 1e-8).all())
        info = frame[frame['scheme'] == 'pure_info']['u_db'].to_numpy()
        self.assertTrue(np.all(np.diff(info) >= 0))

    def test_failures_fill_error_column(self):
        spec = SweepSpec('cost_sensing', 0.0, 0.1, 0.1, schemes=('sensing', 'pure_info'))
        frame = run_sweep(spec, ModelParams.defaults(), SensingParams(g1=5.5, c_s=0.1), grid_steps=11, **FAST)
        sensing = frame[frame['scheme'] == 'sensing']
        self.assertTrue(sensing['error'].str.contains('Q_L').all())
        self.assertTrue((frame[frame['scheme'] == 'pure_info']['error'] == '').all())

    def test_column_selection(self):
        spec = SweepSpec('lambda', 1.0, 1.2, 0.2, schemes=('pure_info',), outputs=('value', 'u_db'))
        self.assertEqual(list(run_sweep(spec, ModelParams.defaults()).columns), ['value', 'u_db'])

    def test_scheme_row_third_party(self):
        row = scheme_row('third_party', ModelParams.defaults(), SensingParams.defaults(), **FAST)
        self.assertEqual(row['delta_or_w'], 0.0)
        self.assertLessEqual(row['fixed_point_residual'], 1e-8)


class ObservationTests(SimpleTestCase):

    def frame(self, scheme, column, values):
        return pd.DataFrame({
            'value': np.arange(len(values)) * 0.1, 'scheme': scheme, column: values, 'error': '',
        })

    def test_monotone_trend_allows_search_noise(self):
        frame = self.frame('rss', 'u_db', [0.1, 0.2, 0.19995, 0.3])
        self.assertTrue(monotone_trend(frame, 'rss', 'u_db', increasing=True).holds)
        frame = self.frame('rss', 'u_db', [0.1, 0.2, 0.15, 0.3])
        self.assertFalse(monotone_trend(frame, 'rss', 'u_db', increasing=True).holds)

    def test_profit_ordering(self):
        profits = {'coordination': 1.0, 'rss': 0.9, 'wps': 0.95, 'third_party': 0.8, 'pure_info': 0.5}
        frame = pd.DataFrame([
            {'value': 1.0, 'scheme': scheme, 'network_profit': profit, 'error': ''}
            for scheme, profit in profits.items()
        ])
        self.assertTrue(profit_ordering(frame).holds)
        frame.loc[frame['scheme'] == 'pure_info', 'network_profit'] = 0.85
        self.assertFalse(profit_ordering(frame).holds)

    def test_energy_crossover(self):
        frame = pd.concat([
            self.frame('sensing', 'energy_cost', [0.0, 0.01, 0.03, 0.05]),
            self.frame('rss', 'energy_cost', [0.02, 0.02, 0.02, 0.02]),
        ])
        self.assertAlmostEqual(energy_crossover(frame), 0.2)

    def test_energy_crossover_outside_range_fails(self):
        values = np.arange(4) * 0.1
        frame = pd.concat([
            pd.DataFrame({'value': values, 'scheme': 'sensing', 'energy_cost': [0.0, 0.01, 0.03, 0.05],
                          'social_welfare': [1.0, 0.9, 0.8, 0.7], 'error': ''}),
            pd.DataFrame({'value': values, 'scheme': 'rss', 'energy_cost': 0.02,
                          'social_welfare': 1.2, 'error': ''}),
        ])
        crossover, welfare = cost_sensing_findings(frame)
        self.assertFalse(crossover.holds)
        self.assertAlmostEqual(crossover.value, 0.2)
        self.assertTrue(welfare.holds)

    def test_wps_gain_uses_wps_profit(self):
        frame = pd.DataFrame([
            {'value': 1.8, 'scheme': 'wps', 'network_profit': 1.0, 'error': ''},
            {'value': 1.8, 'scheme': 'pure_info', 'network_profit': 0.17, 'error': ''},
        ])
        self.assertAlmostEqual(wps_gain(frame), 0.83)

    def test_share_bounds_ignore_disagreements(self):
        frame = pd.DataFrame([
            {'value': 1.0, 'scheme': 'rss', 'agreed': True, 'bounds_hold': True, 'error': ''},
            {'value': 1.0, 'scheme': 'wps', 'agreed': False, 'bounds_hold': False, 'error': ''},
        ])
        self.assertTrue(share_bounds(frame).holds)
        frame.loc[1, 'agreed'] = True
        self.assertFalse(share_bounds(frame).holds)

    def test_scheme_preference_at_sweep_ends(self):
        spec = SweepSpec('lambda', 0.4, 1.8, 1.4)
        finding = scheme_preference(run_sweep(spec, ModelParams.defaults(), grid_steps=11, **FAST))
        self.assertEqual(finding.name, 'scheme preference crossover')
        failing = finding.detail.split('failing: ')[1]
        self.assertNotIn('database rss > wps at 0.4', failing)
        self.assertNotIn('licensee wps > rss at 1.8', failing)


class CommandTests(SimpleTestCase):

    def test_equilibrium(self):
        schema, _, frame = run_command('equilibrium', p_l=2.0, p_a=0.3)
        self.assertEqual(schema, 'equilibrium')
        self.assertAlmostEqual(frame.loc[0, 'eta_l'], 0.6056, places=3)
        self.assertAlmostEqual(frame.loc[0, 'eta_a'], 0.1571, places=3)
        self.assertEqual(frame.loc[0, 'branch'], 'active')

    def test_equilibrium_trace(self):
        schema, _, frame = run_command('equilibrium', p_l=2.0, p_a=0.3, trace=True)
        self.assertEqual(schema, 'equilibrium_trace')
        self.assertEqual(list(frame.columns), ['iter', 'eta_l', 'eta_a', 'residual'])
        self.assertEqual(list(frame['iter']), list(range(len(frame))))
        self.assertEqual(frame.loc[0, 'eta_l'], 0.0)
        self.assertAlmostEqual(frame['eta_l'].iloc[-1], 0.6056, places=3)
        self.assertGreater(frame.loc[0, 'residual'], 0.1)
        self.assertLessEqual(frame['residual'].iloc[-1], 1e-8)

    @override_settings(TVWS={**settings.TVWS, 'STAGE3_MAX_ITER': 3})
    def test_non_convergence_exit_code(self):
        with self.assertRaises(CommandError) as caught:
            run_command('equilibrium', p_l=2.0, p_a=0.3, trace=True)
        self.assertEqual(caught.exception.returncode, 2)

    def test_compete(self):
        _, _, frame = run_command('compete', scheme='rss:0.3', points=401)
        self.assertTrue(frame.loc[0, 'converged'])
        self.assertEqual(frame.loc[0, 'scheme'], 'rss')
        self.assertLess(frame.loc[0, 'eta_l'], 0.5)

    def test_bad_scheme_is_usage_error(self):
        with self.assertRaises(CommandError) as caught:
            run_command('compete', scheme='bogus')
        self.assertEqual(caught.exception.returncode, 1)

    def test_invalid_config(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'params.json')
            with open(path, 'w') as handle:
                json.dump({'alpha1': 1.0, 'colour': 'blue'}, handle)
            with self.assertRaises(CommandError) as caught:
                run_command('equilibrium', p_l=2.0, p_a=0.3, config=path)
        self.assertEqual(caught.exception.returncode, 1)

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'params.toml')
            with open(path, 'w') as handle:
                handle.write('beta1 = 0.0\nalpha2 = 1.0\nbeta2 = 1.0\n')
            _, _, frame = run_command('equilibrium', p_l=2.0, p_a=0.2, config=path)
        self.assertAlmostEqual(frame.loc[0, 'eta_l'], 0.55, places=9)
        self.assertAlmostEqual(frame.loc[0, 'eta_a'], 0.25, places=9)

    def test_mc_oracle(self):
        _, _, frame = run_command('mc_oracle', curve='basic', samples=20000, chunk=5000, points=6, seed=3)
        self.assertEqual(list(frame.columns), ['share', 'mean_rate', 'stderr'])
        self.assertEqual(len(frame), 6)
        self.assertTrue(np.all(np.diff(frame['mean_rate']) < 0))

    def test_writes_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'eq.csv')
            call_command('equilibrium', p_l=2.0, p_a=0.3, out=path, stdout=io.StringIO())
            schema, _, frame = read_csv(path)
        self.assertEqual(schema, 'equilibrium')
        self.assertEqual(len(frame), 1)
