""" Clipping, min-max normalization and inversion of raw metric scores """
import logging
import math

import numpy as np

LOG = logging.getLogger(__name__)

RAW = 'raw'
CLIPPED = 'clipped'
NORMALIZED = 'normalized'
STAGES = (RAW, CLIPPED, NORMALIZED)


class CorruptScoreError(ValueError):

    """ Raised when a raw score is missing or not a finite number """


def _check_finite(y, spec):
    """ Reject NaN and infinities """
    if y is None or not math.isfinite(y):
        raise CorruptScoreError("Non-finite score %r for metric '%s'" %
                                (y, spec.name))


def clip(y, spec):
    """
    Clip a raw score into the valid range of its metric

    Raises
    ------
    exc : :class:`.CorruptScoreError`
        If ``y`` is NaN or infinite

    """
    _check_finite(y, spec)
    return min(max(float(y), spec.clip_min), spec.clip_max)


def normalize(y_clipped, spec):
    """ Map a clipped score linearly onto [0, 1] """
    _check_finite(y_clipped, spec)
    if not spec.clip_min <= y_clipped <= spec.clip_max:
        raise ValueError("Score %r is outside the clip range [%r, %r] of "
                         "metric '%s'" % (y_clipped, spec.clip_min,
                                          spec.clip_max, spec.name))
    return (y_clipped - spec.clip_min) / (spec.clip_max - spec.clip_min)


def invert(y_norm, spec):
    """ Flip a normalized score when lower raw scores mean better """
    _check_finite(y_norm, spec)
    if not 0.0 <= y_norm <= 1.0:
        raise ValueError("Normalized score %r for metric '%s' is outside "
                         "[0, 1]" % (y_norm, spec.name))
    if spec.invert:
        return 1.0 - y_norm
    return y_norm


def preprocess_value(y, spec):
    """ Run a raw score through clip, normalize and invert """
    return invert(normalize(clip(y, spec), spec), spec)


class ScoreMatrix(object):

    """
    Column-aligned metric scores for a slice of records

    Parameters
    ----------
    metric_order : list
        Metric names, one per column
    values : :class:`numpy.ndarray`
        Array of shape (len(row_keys), len(metric_order))
    row_keys : list
        (lang_pair, system_id, segment_id) for each row
    stage : str, optional
        One of 'raw', 'clipped', 'normalized' (default 'raw')

    Notes
    -----
    A matrix only moves forward through the stages::

        matrix.clipped(specs).normalized(specs)

    """

    def __init__(self, metric_order, values, row_keys, stage=RAW):
        self.metric_order = tuple(metric_order)
        values = np.array(values, dtype=float, copy=True)
        if values.size == 0:
            values = values.reshape(len(row_keys), len(self.metric_order))
        if values.ndim != 2 or values.shape[1] != len(self.metric_order):
            raise ValueError("Rows must have %d columns, got shape %s" %
                             (len(self.metric_order), values.shape))
        if values.shape[0] != len(row_keys):
            raise ValueError("Got %d rows for %d row keys" %
                             (values.shape[0], len(row_keys)))
        if stage not in STAGES:
            raise ValueError("Unknown stage '%s'" % stage)
        values.flags.writeable = False
        self.values = values
        self.row_keys = list(row_keys)
        self.stage = stage

    @property
    def rows(self):
        """ Rows as a list of tuples """
        return [tuple(row) for row in self.values.tolist()]

    def column(self, name):
        """ One metric's scores as an array """
        return self.values[:, self.metric_order.index(name)]

    def subset(self, indices):
        """ A new matrix with only the selected rows, in the given order """
        indices = list(indices)
        return ScoreMatrix(self.metric_order, self.values[indices, :],
                           [self.row_keys[i] for i in indices], self.stage)

    def _check_specs(self, specs):
        names = tuple(spec.name for spec in specs)
        if names != self.metric_order:
            raise ValueError("Specs %s do not match matrix columns %s" %
                             (names, self.metric_order))

    def clipped(self, specs):
        """ Clip every column into its metric's valid range """
        if self.stage != RAW:
            raise ValueError("Cannot clip a matrix in stage '%s'" % self.stage)
        self._check_specs(specs)
        lo = np.array([spec.clip_min for spec in specs])
        hi = np.array([spec.clip_max for spec in specs])
        return ScoreMatrix(self.metric_order,
                           np.minimum(np.maximum(self.values, lo), hi),
                           self.row_keys, CLIPPED)

    def normalized(self, specs):
        """ Normalize clipped columns to [0, 1], inverting where needed """
        if self.stage != CLIPPED:
            raise ValueError("Cannot normalize a matrix in stage '%s'" %
                             self.stage)
        self._check_specs(specs)
        lo = np.array([spec.clip_min for spec in specs])
        hi = np.array([spec.clip_max for spec in specs])
        values = (self.values - lo) / (hi - lo)
        flip = np.array([spec.invert for spec in specs], dtype=bool)
        values[:, flip] = 1.0 - values[:, flip]
        return ScoreMatrix(self.metric_order, values, self.row_keys,
                           NORMALIZED)

    def __len__(self):
        return self.values.shape[0]

    def __repr__(self):
        return 'ScoreMatrix(%s, %d rows, %s)' % (
            ', '.join(self.metric_order), len(self), self.stage)


def raw_matrix(records, specs):
    """
    Collect the raw scores of records into a matrix

    Raises
    ------
    exc : :class:`.CorruptScoreError`
        If a record is missing a score or has a non-finite one. The message
        names the record and the metric.

    """
    values = np.empty((len(records), len(specs)), dtype=float)
    for i, record in enumerate(records):
        for j, spec in enumerate(specs):
            value = record.score(spec.name)
            if value is None:
                raise CorruptScoreError(
                    "Record %s is missing a score for metric '%s'" %
                    ('/'.join(record.key_), spec.name))
            if not math.isfinite(value):
                raise CorruptScoreError(
                    "Record %s has non-finite score %r for metric '%s'" %
                    ('/'.join(record.key_), value, spec.name))
            values[i, j] = value
    return ScoreMatrix([spec.name for spec in specs], values,
                       [record.key_ for record in records])


def preprocess_matrix(records, specs):
    """
    Build the normalized score matrix for a list of records

    Parameters
    ----------
    records : list
        List of :class:`~metricfuse.models.SegmentRecord`
    specs : list
        Ordered list of :class:`~metricfuse.models.MetricSpec`. This is the
        column order of the result.

    Returns
    -------
    matrix : :class:`.ScoreMatrix`
        Entries are ``invert(normalize(clip(raw)))``, all within [0, 1]

    """
    matrix = raw_matrix(records, specs).clipped(specs).normalized(specs)
    LOG.debug("Preprocessed %d records over %d metrics", len(matrix),
              len(specs))
    return matrix
