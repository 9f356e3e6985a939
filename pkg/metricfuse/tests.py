""" Unit and system tests for metricfuse """
import io
import json
import os
import shutil
import tempfile

import numpy as np

from metricfuse.engine import Engine
from metricfuse.models import CompositeConfig, MetricSpec, SegmentRecord


try:
    import unittest2 as unittest  # pylint: disable=F0401
except ImportError:
    import unittest


def make_record(lang_pair='en-de', system_id='sys', segment_id='0',
                human_score=None, has_reference=True, domain=None, **scores):
    """ Build a :class:`~metricfuse.models.SegmentRecord` from score kwargs """
    return SegmentRecord(lang_pair=lang_pair, system_id=system_id,
                         segment_id=segment_id, human_score=human_score,
                         has_reference=has_reference, domain=domain,
                         raw_scores=scores)


def published_config():
    """
    The published hybrid configuration: MetricX-23-XXL, COMET and XCOMET-XL
    with a MetricX-23-XXL-QE and CometKiwi fallback

    """
    qe = CompositeConfig([
        MetricSpec('MetricX-23-XXL-QE', 0, 25, invert=True,
                   needs_reference=False),
        MetricSpec('CometKiwi (QE)', 0, 1, needs_reference=False),
        MetricSpec('CometKiwi-XL (QE)', 0, 1, needs_reference=False),
    ], [0.9905, 0.1267, 0.0584])
    return CompositeConfig([
        MetricSpec('MetricX-23-XXL', 0, 25, invert=True),
        MetricSpec('COMET', 0, 1),
        MetricSpec('XCOMET-XL', 0, 1),
    ], [1.0, 0.2055, 0.2733], qe_fallback=qe)


class SyntheticDataTest(unittest.TestCase):

    """
    Base class for tests that need an :class:`~metricfuse.engine.Engine` and
    generated datasets

    """
    default_strict = True

    def setUp(self):
        super(SyntheticDataTest, self).setUp()
        self.engine = Engine(default_strict=self.default_strict)

    @staticmethod
    def specs(*names, **kwargs):
        """ Unit-range specs for each name """
        return [MetricSpec(name, 0, 1, **kwargs) for name in names]

    @staticmethod
    def records_from_columns(columns, gold, lang_pair='en-de',
                             systems=None, has_reference=True, domain=None):
        """
        Records whose raw scores are taken from a dict of metric columns

        Parameters
        ----------
        columns : dict
            Metric name to a sequence of raw scores
        gold : sequence
            Human scores
        systems : int, optional
            Spread rows round-robin across this many systems (default a single
            system)

        """
        records = []
        for i, human in enumerate(gold):
            system_id = 'sys%d' % (i % systems) if systems else 'sys'
            records.append(SegmentRecord(
                lang_pair=lang_pair, system_id=system_id,
                segment_id='%s-%d' % (lang_pair, i),
                human_score=float(human), has_reference=has_reference,
                domain=domain,
                raw_scores=dict((name, float(values[i])) for name, values in
                                columns.items())))
        return records

    def noisy_dataset(self, size=500, seed=7):
        """
        Gold is a noisy monotone transform of m1, m2 is independent noise and
        m3 is an inverted copy of m1 on a [0, 25] scale

        Returns
        -------
        records : list
        specs : list

        """
        rng = np.random.RandomState(seed)
        m1 = rng.uniform(0, 1, size)
        gold = np.tanh(3 * m1) + rng.normal(0, 0.05, size)
        m2 = rng.uniform(0, 1, size)
        m3 = 25 * (1 - m1) + rng.normal(0, 0.5, size)
        specs = [MetricSpec('m1', 0, 1), MetricSpec('noise', 0, 1),
                 MetricSpec('m3', 0, 25, invert=True)]
        records = self.records_from_columns(
            {'m1': m1, 'noise': m2, 'm3': m3}, gold, systems=10)
        return records, specs

    def two_pair_dataset(self, size=200, seed=11):
        """
        Pair 'en-de' follows m1 and pair 'ja-zh' follows m2

        Returns
        -------
        records : list
        specs : list

        """
        rng = np.random.RandomState(seed)
        records = []
        for lang_pair, leader in (('en-de', 'm1'), ('ja-zh', 'm2')):
            m1 = rng.uniform(0, 1, size)
            m2 = rng.uniform(0, 1, size)
            lead = m1 if leader == 'm1' else m2
            gold = lead + rng.normal(0, 0.05, size)
            records.extend(self.records_from_columns(
                {'m1': m1, 'm2': m2}, gold, lang_pair=lang_pair, systems=4))
        return records, self.specs('m1', 'm2')


class FileTest(SyntheticDataTest):

    """ Base class for tests that read and write files in a scratch dir """

    def setUp(self):
        super(FileTest, self).setUp()
        self.tmpdir = tempfile.mkdtemp(prefix='metricfuse-test-')

    def tearDown(self):
        super(FileTest, self).tearDown()
        shutil.rmtree(self.tmpdir)

    def path(self, name):
        """ Absolute path of a file in the scratch dir """
        return os.path.join(self.tmpdir, name)

    def write_text(self, name, text):
        """ Write a file and return its path """
        path = self.path(name)
        with io.open(path, 'w', encoding='utf-8') as ofile:
            ofile.write(text)
        return path

    def write_lines(self, name, rows):
        """ Write dicts as JSON lines and return the path """
        return self.write_text(name, ''.join(json.dumps(row) + '\n'
                                             for row in rows))

    def read_text(self, name):
        """ Contents of a file in the scratch dir """
        with io.open(self.path(name), 'r', encoding='utf-8') as ifile:
            return ifile.read()
