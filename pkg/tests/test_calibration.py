""" Tests for weight calibration """
import itertools

import numpy as np

from metricfuse.bayes_opt import BoConfig
from metricfuse.calibration import (CalibrationJob, ObjectiveUndefined,
                                    calibrate, calibrate_global, composite,
                                    composite_many, derive_seed,
                                    metric_correlations, objective_tau, prune,
                                    sparsify)
from metricfuse.correlation import CorrelationUndefined, kendall_tau_b
from metricfuse.engine import Engine
from metricfuse.models import MetricSpec, REFERENCE_FREE
from metricfuse.preprocess import ScoreMatrix, preprocess_matrix
from metricfuse.tests import SyntheticDataTest, make_record

try:
    import unittest2 as unittest  # pylint: disable=F0401
except ImportError:
    import unittest


def grid_best(matrix, gold, step=0.05):
    """ Best tau over a regular grid of the weight cube """
    ticks = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    best = -np.inf
    for weights in itertools.product(ticks, repeat=len(matrix.metric_order)):
        try:
            best = max(best, objective_tau(weights, matrix, gold))
        except CorrelationUndefined:
            continue
    return best


class TestComposite(unittest.TestCase):

    """ Tests for the weighted sum """

    def test_reference_weights(self):
        """ Weighted sum with the published reference-based weights """
        value = composite((1.0, 0.2055, 0.2733), (0.8, 0.6, 0.9))
        self.assertAlmostEqual(value, 1.16927, delta=1e-9)

    def test_zero_weights(self):
        """ Zero weights give zero """
        self.assertEqual(composite((0, 0), (0.4, 0.9)), 0.0)

    def test_identity(self):
        """ One metric with weight 1 passes its score through """
        self.assertEqual(composite((1.0,), (0.37,)), 0.37)

    def test_length_mismatch(self):
        """ Weights and scores must align """
        with self.assertRaises(ValueError):
            composite((1.0,), (0.3, 0.4))
        with self.assertRaises(ValueError):
            composite_many((1.0,), [[0.3, 0.4]])

    def test_rows_match_scalar(self):
        """ The vectorized sum matches the scalar one exactly """
        rng = np.random.RandomState(8)
        values = rng.uniform(size=(200, 5))
        weights = rng.uniform(size=5)
        totals = composite_many(weights, values)
        for row, total in zip(values, totals):
            self.assertEqual(composite(weights, row), total)


class TestObjective(SyntheticDataTest):

    """ Tests for the tau objective """

    def matrix(self, columns):
        """ A normalized matrix from unit-range columns """
        names = sorted(columns)
        values = np.column_stack([columns[name] for name in names])
        keys = [('en-de', 'sys', str(i)) for i in range(len(values))]
        return ScoreMatrix(names, values, keys, 'normalized')

    def test_self_correlation(self):
        """ Gold equal to a metric gives tau 1 """
        m = np.random.RandomState(0).uniform(size=50)
        matrix = self.matrix({'a': m, 'b': np.zeros(50)})
        self.assertAlmostEqual(objective_tau((1, 0), matrix, m), 1.0)
        self.assertAlmostEqual(objective_tau((1, 0), matrix, -m), -1.0)

    def test_true_mixture_wins(self):
        """ The generating weights beat the swapped ones """
        rng = np.random.RandomState(1)
        m1 = rng.uniform(size=200)
        m2 = rng.uniform(size=200)
        matrix = self.matrix({'a': m1, 'b': m2})
        gold = 0.7 * m1 + 0.3 * m2
        self.assertGreaterEqual(objective_tau((0.7, 0.3), matrix, gold),
                                objective_tau((0.3, 0.7), matrix, gold))

    def test_scale_invariant(self):
        """ Rescaling the weights leaves the objective unchanged """
        rng = np.random.RandomState(2)
        matrix = self.matrix({'a': rng.uniform(size=80),
                              'b': rng.uniform(size=80)})
        gold = rng.normal(size=80)
        weights = np.array([0.3, 0.6])
        base = objective_tau(weights, matrix, gold)
        self.assertEqual(objective_tau(2 * weights, matrix, gold), base)
        self.assertEqual(objective_tau(0.25 * weights, matrix, gold), base)

    def test_all_zero_weights(self):
        """ A constant composite has no tau """
        matrix = self.matrix({'a': np.linspace(0, 1, 5)})
        with self.assertRaises(CorrelationUndefined):
            objective_tau((0.0,), matrix, [1, 2, 3, 4, 5])

    def test_gold_length(self):
        """ Gold must align with the matrix rows """
        matrix = self.matrix({'a': np.linspace(0, 1, 5)})
        with self.assertRaises(ValueError):
            objective_tau((1.0,), matrix, [1, 2, 3])


class TestSparsify(unittest.TestCase):

    """ Tests for post-hoc sparsification """

    def test_small_weight(self):
        """ Weights under the threshold become exactly zero """
        self.assertEqual(sparsify((1.0, 0.0005, 0.2733), 1e-3),
                         (1.0, 0.0, 0.2733))

    def test_unchanged(self):
        """ Weights over the threshold are kept """
        self.assertEqual(sparsify((0.5, 0.25), 1e-3), (0.5, 0.25))

    def test_keeps_largest(self):
        """ The largest weight survives even under the threshold """
        self.assertEqual(sparsify((0.0002, 0.0001), 1e-3), (0.0002, 0.0))

    def test_negative_threshold(self):
        """ The threshold must be non-negative """
        with self.assertRaises(ValueError):
            sparsify((0.5,), -1)


class TestPrune(unittest.TestCase):

    """ Tests for pruning weights that do not help """

    def test_prune_useless(self):
        """ Weights whose removal keeps the objective are zeroed """
        def objective(w):
            return 1.0 if w[0] > 0 else 0.5

        self.assertEqual(prune((0.5, 0.1, 0.9), objective, 1.0),
                         (0.5, 0.0, 0.9))

    def test_keeps_largest(self):
        """ The largest weight is never tried """
        objective = lambda w: 1.0
        self.assertEqual(prune((0.2, 0.9), objective, 1.0), (0.0, 0.9))

    def test_tolerance(self):
        """ Small losses are accepted up to the tolerance """
        def objective(w):
            return 0.8 - 0.004 * (w[0] == 0) - 0.1 * (w[1] == 0)

        self.assertEqual(prune((0.3, 0.4, 1.0), objective, 0.8, 0.005),
                         (0.0, 0.4, 1.0))

    def test_disabled(self):
        """ A negative tolerance disables pruning """
        self.assertEqual(prune((0.2, 0.9), lambda w: 1.0, 1.0, -1),
                         (0.2, 0.9))

    def test_failing_objective(self):
        """ Weights whose removal breaks the objective are kept """
        def objective(w):
            raise CorrelationUndefined("tied")

        self.assertEqual(prune((0.2, 0.9), objective, 1.0), (0.2, 0.9))


class TestDeriveSeed(unittest.TestCase):

    """ Tests for per-language seeds """

    def test_stable(self):
        """ Seeds depend only on the inputs """
        self.assertEqual(derive_seed(42, 'en-de'), derive_seed(42, 'en-de'))

    def test_distinct(self):
        """ Different pairs and seeds give different streams """
        self.assertNotEqual(derive_seed(42, 'en-de'), derive_seed(42, 'ja-zh'))
        self.assertNotEqual(derive_seed(42, 'en-de'), derive_seed(43, 'en-de'))

    def test_range(self):
        """ Seeds fit in a non-negative 31-bit integer """
        for key in ('en-de', 'ja-zh', 'en-es', ''):
            seed = derive_seed(7, key)
            self.assertTrue(0 <= seed <= 0x7fffffff)


class TestCalibrationJob(SyntheticDataTest):

    """ Tests for job validation """

    def test_missing_gold(self):
        """ Every record needs a human score """
        records = [make_record(a=0.5)]
        with self.assertRaises(ValueError):
            CalibrationJob(records, self.specs('a'))

    def test_missing_score(self):
        """ Every record needs every metric """
        records = [make_record(human_score=1.0, a=0.5)]
        with self.assertRaises(ValueError):
            CalibrationJob(records, self.specs('a', 'b'))

    def test_empty(self):
        """ A job needs records and metrics """
        with self.assertRaises(ValueError):
            CalibrationJob([], self.specs('a'))
        with self.assertRaises(ValueError):
            CalibrationJob([make_record(human_score=1.0)], [])

    def test_mode_rules(self):
        """ The mode must agree with the metrics """
        records = [make_record(human_score=1.0, a=0.5)]
        with self.assertRaises(ValueError):
            CalibrationJob(records, self.specs('a'), mode=REFERENCE_FREE)
        qe = [MetricSpec('a', 0, 1, needs_reference=False)]
        with self.assertRaises(ValueError):
            CalibrationJob(records, qe, mode='reference_based')
        self.assertEqual(CalibrationJob(records, qe).mode, REFERENCE_FREE)

    def test_dimension(self):
        """ The optimizer dimension must match the metric count """
        records = [make_record(human_score=1.0, a=0.5)]
        with self.assertRaises(ValueError):
            CalibrationJob(records, self.specs('a'), bo=BoConfig(2))


class TestCalibrateGlobal(SyntheticDataTest):

    """ End-to-end tests for global calibration """

    @classmethod
    def setUpClass(cls):
        super(TestCalibrateGlobal, cls).setUpClass()
        fixture = cls('test_matches_grid')
        cls.records, cls.metric_specs = fixture.noisy_dataset()
        cls.result = Engine().calibrate(cls.records, cls.metric_specs,
                                        seed=42)

    def test_matches_grid(self):
        """ Calibrated tau is close to an exhaustive grid search """
        matrix = preprocess_matrix(self.records, self.metric_specs)
        gold = [record.human_score for record in self.records]
        self.assertGreaterEqual(self.result.final_objective,
                                grid_best(matrix, gold) - 0.02)

    def test_noise_weight_zero(self):
        """ The independent noise metric gets exactly zero weight """
        weights = dict(zip(self.result.config.metric_names,
                           self.result.config.weights))
        self.assertEqual(weights['noise'], 0.0)
        self.assertGreater(max(weights['m1'], weights['m3']), 0.0)

    def test_weights_in_range(self):
        """ All weights lie in [0, 1] """
        for weight in self.result.config.weights:
            self.assertTrue(0.0 <= weight <= 1.0)

    def test_sparsification_cost(self):
        """ Sparsification barely moves the objective """
        self.assertLessEqual(abs(self.result.final_objective -
                                 self.result.best_objective), 0.01)

    def test_best_is_trace_max(self):
        """ best_objective is the best traced evaluation """
        self.assertEqual(self.result.best_objective,
                         max(value for _, _, value in self.result.trace))
        self.assertEqual(len(self.result.trace), 105)

    def test_final_objective(self):
        """ final_objective is the tau of the saved weights """
        matrix = preprocess_matrix(self.records, self.metric_specs)
        gold = [record.human_score for record in self.records]
        self.assertEqual(objective_tau(self.result.config.weights, matrix,
                                       gold), self.result.final_objective)

    def test_provenance(self):
        """ The config records how it was produced """
        provenance = self.result.config.provenance
        self.assertEqual(provenance['seed'], 42)
        self.assertEqual(provenance['bo']['init_points'], 5)
        self.assertEqual(provenance['bo']['steps'], 100)
        self.assertEqual(provenance['bo']['acquisition'], 'ucb')
        self.assertEqual(provenance['kernel']['nu'], 2.5)
        self.assertEqual(provenance['objective']['measure'], 'kendall_tau_b')
        self.assertEqual(provenance['sparsify']['zero_threshold'], 1e-3)
        self.assertIn('version', provenance)

    def test_summary(self):
        """ The summary names the objective and weights """
        summary = self.result.summary()
        self.assertIn('best objective', summary)
        self.assertIn('noise=0.0000', summary)


class TestCalibrationEdgeCases(SyntheticDataTest):

    """ Calibration on small and degenerate data """

    def test_deterministic(self):
        """ The same seed gives the same result """
        records, specs = self.noisy_dataset(size=100)
        first = self.engine.calibrate(records, specs, steps=10, seed=3)
        second = self.engine.calibrate(records, specs, steps=10, seed=3)
        self.assertEqual(first.config, second.config)
        self.assertEqual(first.trace, second.trace)

    def test_single_metric(self):
        """ One metric keeps a positive weight and its own tau """
        rng = np.random.RandomState(4)
        m = rng.uniform(size=60)
        gold = m + rng.normal(0, 0.1, 60)
        records = self.records_from_columns({'m': m}, gold)
        result = self.engine.calibrate(records, self.specs('m'), steps=5)
        self.assertGreater(result.config.weights[0], 0.0)
        self.assertAlmostEqual(result.final_objective, kendall_tau_b(m, gold),
                               delta=1e-12)

    def test_duplicate_columns(self):
        """ A duplicated metric calibrates to the metric's own tau """
        rng = np.random.RandomState(5)
        m = rng.uniform(size=80)
        gold = np.sqrt(m) + rng.normal(0, 0.1, 80)
        records = self.records_from_columns({'a': m, 'b': m}, gold)
        result = self.engine.calibrate(records, self.specs('a', 'b'),
                                       steps=10)
        self.assertAlmostEqual(result.final_objective, kendall_tau_b(m, gold),
                               delta=1e-9)

    def test_constant_column(self):
        """ A constant metric never hurts the calibrated tau """
        records, specs = self.noisy_dataset(size=150)
        base = self.engine.calibrate(records, specs, steps=20, seed=1)
        padded = [make_record(segment_id=record.segment_id,
                              system_id=record.system_id,
                              human_score=record.human_score,
                              flat=0.5, **dict(record.raw_scores))
                  for record in records]
        result = self.engine.calibrate(
            padded, specs + [MetricSpec('flat', 0, 1)], steps=20, seed=1)
        self.assertGreaterEqual(result.final_objective,
                                base.final_objective - 0.01)

    def test_tied_gold(self):
        """ Gold with no variation cannot be calibrated """
        records = self.records_from_columns({'a': [0.1, 0.5, 0.9]},
                                            [1.0, 1.0, 1.0])
        job = CalibrationJob(records, self.specs('a'),
                             bo=BoConfig(1, steps=2))
        with self.assertRaises(ObjectiveUndefined) as cm:
            calibrate_global(job)
        self.assertEqual(str(cm.exception),
                         'objective undefined on this slice')

    def test_metric_correlations(self):
        """ Per-metric taus against gold and each other """
        records, specs = self.noisy_dataset(size=100)
        report = self.engine.correlations(records, specs)
        self.assertEqual(list(report['gold']), ['m1', 'noise', 'm3'])
        self.assertGreater(report['gold']['m1'], 0.5)
        self.assertAlmostEqual(report['between']['m1']['m1'], 1.0)
        self.assertAlmostEqual(report['between']['m1']['noise'],
                               report['between']['noise']['m1'],
                               delta=1e-12)

    def test_metric_correlations_undefined(self):
        """ A constant column reports None """
        matrix = ScoreMatrix(['a'], [[0.5], [0.5]],
                             [('x', 's', '1'), ('x', 's', '2')], 'normalized')
        report = metric_correlations(matrix, [1.0, 2.0])
        self.assertIsNone(report['gold']['a'])


class TestCalibratePerLanguage(SyntheticDataTest):

    """ Tests for per-language calibration """

    def test_opposite_pairs(self):
        """ Each pair weights its informative metric highest """
        records, specs = self.two_pair_dataset()
        result = self.engine.calibrate(records, specs, per_language=True,
                                       steps=30, seed=42)
        per_lang = result.config.per_lang
        self.assertEqual(list(per_lang), ['en-de', 'ja-zh'])
        self.assertGreater(per_lang['en-de'][0], per_lang['en-de'][1])
        self.assertGreater(per_lang['ja-zh'][1], per_lang['ja-zh'][0])
        self.assertEqual(result.warnings, [])
        seeds = result.config.provenance['per_language']['seeds']
        self.assertEqual(seeds['ja-zh'], derive_seed(42, 'ja-zh'))

    def test_threaded(self):
        """ Threaded calibration gives the same weights """
        records, specs = self.two_pair_dataset(size=60)
        serial = self.engine.calibrate(records, specs, per_language=True,
                                       steps=5, workers=1)
        threaded = self.engine.calibrate(records, specs, per_language=True,
                                         steps=5, workers=2)
        self.assertEqual(serial.config, threaded.config)

    def test_tied_pair_fallback(self):
        """ A pair with tied gold falls back to the global weights """
        records, specs = self.two_pair_dataset(size=60)
        records.extend(self.records_from_columns(
            {'m1': [0.2, 0.4, 0.6], 'm2': [0.9, 0.1, 0.5]}, [3.0, 3.0, 3.0],
            lang_pair='fr-en'))
        job = CalibrationJob(records, specs, bo=BoConfig(2, steps=5),
                             per_language=True)
        result = calibrate(job)
        self.assertEqual(result.config.per_lang['fr-en'],
                         result.config.weights)
        self.assertIsNone(result.per_lang_objectives['fr-en'])
        self.assertEqual(len(result.warnings), 1)
        self.assertIn('fr-en', result.warnings[0])
        self.assertEqual(
            result.config.provenance['per_language']['fallbacks'], ['fr-en'])
        self.assertIn('global fallback', result.summary())
