""" Tests for models """
from metricfuse import Field, Model
from metricfuse.model_meta import ValidationError
from metricfuse.models import (CALIBRATION, CompositeConfig, ConfigError,
                               MetricSpec, REFERENCE_BASED, REFERENCE_FREE,
                               SCORING, SegmentRecord, ValidationIssue,
                               check_unique_names, group_records,
                               validate_dataset)
from metricfuse.tests import make_record

try:
    import unittest2 as unittest  # pylint: disable=F0401
except ImportError:
    import unittest
# pylint: disable=E1101


class TestModelDeclaration(unittest.TestCase):

    """ Tests for declaring models """

    def test_no_fields(self):
        """ A concrete model must declare a field """
        with self.assertRaises(ValidationError):
            class Empty(Model):  # pylint: disable=W0612

                """ Model without fields """
                pass

    def test_bad_key(self):
        """ A model key must reference declared fields """
        with self.assertRaises(ValidationError):
            class BadKey(Model):  # pylint: disable=W0612

                """ Model keyed on a missing field """
                __metadata__ = {'key': ('nope',)}
                name = Field()

    def test_bad_field_name(self):
        """ Field names cannot end with an underscore """
        with self.assertRaises(ValidationError):
            class BadName(Model):  # pylint: disable=W0612

                """ Model with a reserved field name """
                name_ = Field()

    def test_abstract(self):
        """ The base model cannot be instantiated """
        with self.assertRaises(TypeError):
            Model()


class TestMetricSpec(unittest.TestCase):

    """ Tests for metric specs """

    def test_defaults(self):
        """ Specs are reference-based and not inverted by default """
        spec = MetricSpec('comet', 0, 1)
        self.assertFalse(spec.invert)
        self.assertTrue(spec.needs_reference)
        self.assertEqual(spec.clip_min, 0.0)
        self.assertTrue(isinstance(spec.clip_max, float))

    def test_clip_order(self):
        """ clip_min must be strictly less than clip_max """
        with self.assertRaises(ValueError):
            MetricSpec('m', 1, 1)
        with self.assertRaises(ValueError):
            MetricSpec('m', 2, 1)

    def test_finite_bounds(self):
        """ Clip bounds must be finite """
        with self.assertRaises(ValueError):
            MetricSpec('m', 0, float('inf'))
        with self.assertRaises(ValueError):
            MetricSpec('m', float('nan'), 1)

    def test_string_bounds(self):
        """ Numeric strings are accepted as bounds """
        spec = MetricSpec('m', '0', '25')
        self.assertEqual(spec.clip_max, 25.0)

    def test_immutable(self):
        """ Specs cannot be modified after construction """
        spec = MetricSpec('m', 0, 1)
        with self.assertRaises(AttributeError):
            spec.invert = True
        with self.assertRaises(AttributeError):
            del spec.name

    def test_equality(self):
        """ Specs with the same values are equal and hash the same """
        a = MetricSpec('m', 0, 25, invert=True)
        b = MetricSpec('m', 0, 25, invert=True)
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertNotEqual(a, MetricSpec('m', 0, 25))

    def test_dump_load(self):
        """ dump_ and load_ are inverses """
        spec = MetricSpec('m', 0, 25, invert=True, needs_reference=False)
        self.assertEqual(MetricSpec.load_(spec.dump_()), spec)

    def test_key(self):
        """ Specs are keyed by name """
        self.assertEqual(MetricSpec('m', 0, 1).key_, ('m',))

    def test_unique_names(self):
        """ Duplicate names are rejected """
        with self.assertRaises(ConfigError):
            check_unique_names([MetricSpec('m', 0, 1), MetricSpec('m', 0, 2)])


class TestSegmentRecord(unittest.TestCase):

    """ Tests for segment records """

    def test_key(self):
        """ The key is (lang_pair, system_id, segment_id) """
        record = make_record(segment_id='7', m=0.5)
        self.assertEqual(record.key_, ('en-de', 'sys', '7'))

    def test_coerce_ids(self):
        """ Numeric ids are converted to strings """
        record = SegmentRecord(lang_pair='en-de', system_id=3, segment_id=12)
        self.assertEqual(record.key_, ('en-de', '3', '12'))

    def test_required(self):
        """ The key fields are required """
        with self.assertRaises(ValueError):
            SegmentRecord(lang_pair='en-de', system_id='a')

    def test_unknown_field(self):
        """ Unknown constructor arguments are rejected """
        with self.assertRaises(TypeError):
            SegmentRecord(lang_pair='en-de', system_id='a', segment_id='1',
                          colour='red')

    def test_defaults(self):
        """ Records have a reference and no scores by default """
        record = SegmentRecord(lang_pair='en-de', system_id='a',
                               segment_id='1', raw_scores=None,
                               has_reference=None)
        self.assertTrue(record.has_reference)
        self.assertEqual(dict(record.raw_scores), {})
        self.assertIsNone(record.human_score)

    def test_score(self):
        """ score() returns None for absent metrics """
        record = make_record(a=0.25, b=None)
        self.assertEqual(record.score('a'), 0.25)
        self.assertIsNone(record.score('b'))
        self.assertIsNone(record.score('c'))

    def test_with_human_score(self):
        """ with_human_score copies the record """
        record = make_record(human_score=1.0, a=0.5)
        other = record.with_human_score(-1.0)
        self.assertEqual(other.human_score, -1.0)
        self.assertEqual(record.human_score, 1.0)
        self.assertEqual(other.key_, record.key_)
        self.assertEqual(dict(other.raw_scores), {'a': 0.5})

    def test_scores_immutable(self):
        """ The score mapping cannot be modified """
        record = make_record(a=0.5)
        with self.assertRaises(TypeError):
            record.raw_scores['a'] = 1.0

    def test_load_ignores_extra(self):
        """ load_ ignores undeclared keys """
        record = SegmentRecord.load_({
            'lang_pair': 'en-de', 'system_id': 'a', 'segment_id': '1',
            'source': 'Hallo',
        })
        self.assertEqual(record.key_, ('en-de', 'a', '1'))

    def test_group_records(self):
        """ Groups are sorted and keep input order within a group """
        records = [make_record('ja-zh', 'A', '1'),
                   make_record('en-de', 'B', '1'),
                   make_record('en-de', 'A', '2')]
        groups = group_records(records, 'lang_pair')
        self.assertEqual(list(groups), ['en-de', 'ja-zh'])
        self.assertEqual(groups['en-de'], records[1:])
        self.assertEqual(group_records(reversed(records), 'system_id')['A'],
                         [records[2], records[0]])


class TestCompositeConfig(unittest.TestCase):

    """ Tests for composite configurations """

    def setUp(self):
        super(TestCompositeConfig, self).setUp()
        self.specs = [MetricSpec('a', 0, 1), MetricSpec('b', 0, 25,
                                                        invert=True)]

    def test_weight_count(self):
        """ There must be one weight per metric """
        with self.assertRaises(ConfigError):
            CompositeConfig(self.specs, [0.5])

    def test_weight_range(self):
        """ Weights must lie in [0, 1] """
        with self.assertRaises(ConfigError):
            CompositeConfig(self.specs, [0.5, 1.5])
        with self.assertRaises(ConfigError):
            CompositeConfig(self.specs, [0.5, float('nan')])

    def test_empty(self):
        """ A composite needs a metric """
        with self.assertRaises(ConfigError):
            CompositeConfig([], [])

    def test_duplicate_metric(self):
        """ Metric names must be unique """
        with self.assertRaises(ConfigError):
            CompositeConfig([MetricSpec('a', 0, 1), MetricSpec('a', 0, 1)],
                            [0.5, 0.5])

    def test_infer_mode(self):
        """ The mode follows the metrics' reference needs """
        config = CompositeConfig(self.specs, [1, 0])
        self.assertEqual(config.mode, REFERENCE_BASED)
        qe = CompositeConfig([MetricSpec('q', 0, 1, needs_reference=False)],
                             [1])
        self.assertEqual(qe.mode, REFERENCE_FREE)

    def test_reference_free_mode(self):
        """ A reference-free config rejects reference-based metrics """
        with self.assertRaises(ConfigError):
            CompositeConfig(self.specs, [1, 0], mode=REFERENCE_FREE)

    def test_qe_fallback_reference_free(self):
        """ The QE fallback must not need references """
        fallback = CompositeConfig(self.specs, [1, 0])
        with self.assertRaises(ConfigError):
            CompositeConfig(self.specs, [1, 0], qe_fallback=fallback)

    def test_weights_for(self):
        """ Per-language weights replace the global ones """
        config = CompositeConfig(self.specs, [1, 0],
                                 per_lang={'ja-zh': [0.25, 0.5]})
        self.assertEqual(config.weights_for('ja-zh'), ((0.25, 0.5), 'ja-zh'))
        self.assertEqual(config.weights_for('en-de'), ((1.0, 0.0), None))
        self.assertEqual(config.weights_for(), ((1.0, 0.0), None))

    def test_per_lang_sorted(self):
        """ Language pairs are kept in sorted order """
        config = CompositeConfig(self.specs, [1, 0], per_lang={
            'zh-en': [1, 1], 'de-en': [0, 1]})
        self.assertEqual(list(config.per_lang), ['de-en', 'zh-en'])

    def test_total_weight(self):
        """ total_weight sums the applicable weights """
        config = CompositeConfig(self.specs, [0.25, 0.5],
                                 per_lang={'ja-zh': [1, 1]})
        self.assertEqual(config.total_weight(), 0.75)
        self.assertEqual(config.total_weight('ja-zh'), 2.0)

    def test_replace(self):
        """ replace() returns a modified copy """
        config = CompositeConfig(self.specs, [1, 0], provenance={'seed': 1})
        other = config.replace(weights=[0, 1])
        self.assertEqual(other.weights, (0.0, 1.0))
        self.assertEqual(config.weights, (1.0, 0.0))
        self.assertEqual(other.provenance, {'seed': 1})
        self.assertNotEqual(config, other)
        self.assertEqual(config, config.replace())

    def test_provenance_copied(self):
        """ The provenance dict is copied on construction """
        provenance = {'seed': 1}
        config = CompositeConfig(self.specs, [1, 0], provenance=provenance)
        provenance['seed'] = 2
        self.assertEqual(config.provenance['seed'], 1)

    def test_metric_names(self):
        """ metric_names follows the metric order """
        config = CompositeConfig(self.specs, [1, 0])
        self.assertEqual(config.metric_names, ('a', 'b'))


class TestValidateDataset(unittest.TestCase):

    """ Tests for dataset validation """

    def setUp(self):
        super(TestValidateDataset, self).setUp()
        self.specs = [MetricSpec('a', 0, 1), MetricSpec('b', 0, 1)]
        self.qe = [MetricSpec('q', 0, 1, needs_reference=False)]

    def test_clean(self):
        """ Complete records have no issues """
        records = [make_record(human_score=1.0, a=0.5, b=0.5)]
        self.assertEqual(validate_dataset(records, self.specs, CALIBRATION),
                         [])

    def test_missing_human_score(self):
        """ Calibration needs a human score """
        records = [make_record(segment_id='3', a=0.5, b=0.5)]
        issues = validate_dataset(records, self.specs, CALIBRATION)
        self.assertEqual(issues, [ValidationIssue(
            0, ('en-de', 'sys', '3'), 'human_score', 'missing human_score')])
        self.assertEqual(str(issues[0]),
                         'record 0 (en-de/sys/3): missing human_score')

    def test_non_finite_human_score(self):
        """ Calibration needs a finite human score """
        records = [make_record(human_score=float('nan'), a=0.5, b=0.5)]
        issues = validate_dataset(records, self.specs, CALIBRATION)
        self.assertEqual(issues[0].message, 'non-finite human_score')

    def test_missing_metric(self):
        """ Every metric is needed for calibration """
        records = [make_record(human_score=1.0, a=0.5, b=None),
                   make_record(segment_id='1', human_score=1.0, a=0.5)]
        issues = validate_dataset(records, self.specs, CALIBRATION)
        self.assertEqual([(i.index, i.field) for i in issues],
                         [(0, 'b'), (1, 'b')])
        self.assertEqual(issues[0].message, "missing score for metric 'b'")

    def test_scoring_ignores_human_score(self):
        """ Scoring does not need human scores """
        records = [make_record(a=0.5, b=0.5)]
        self.assertEqual(validate_dataset(records, self.specs, SCORING), [])

    def test_scoring_missing(self):
        """ Scoring reports the missing metrics of unscoreable records """
        records = [make_record(a=0.5)]
        issues = validate_dataset(records, self.specs, SCORING)
        self.assertEqual(issues[0].message,
                         'no applicable configuration: missing b')

    def test_scoring_fallback(self):
        """ Records covered by the fallback metrics pass """
        records = [make_record(a=0.5, q=0.5), make_record(segment_id='1')]
        issues = validate_dataset(records, self.specs, SCORING,
                                  fallback_specs=self.qe)
        self.assertEqual([issue.index for issue in issues], [1])

    def test_unknown_mode(self):
        """ Unknown validation modes raise """
        with self.assertRaises(ValueError):
            validate_dataset([], self.specs, 'training')
