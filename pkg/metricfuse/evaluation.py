""" Correlation of composite scores with human scores """
import logging
from collections import OrderedDict

import numpy as np
import six

from .correlation import (CorrelationUndefined, MEASURES, correlate,
                          grouped_correlation)

LOG = logging.getLogger(__name__)

SEGMENT = 'segment'
SYSTEM = 'system'
LEVELS = (SEGMENT, SYSTEM)
GROUPINGS = {
    'lang': 'lang_pair',
    'domain': 'domain',
}
MAX_REPORTED_KEYS = 10


class KeyMismatchError(ValueError):

    """
    Raised when scores and gold data do not cover the same segments

    Attributes
    ----------
    unmatched : list
        Up to 10 of the segment keys present on only one side

    """

    def __init__(self, unmatched, total):
        self.unmatched = unmatched
        self.total = total
        super(KeyMismatchError, self).__init__(
            "%d segment(s) do not match between scores and data: %s" %
            (total, ', '.join('/'.join(key) for key in unmatched)))


def match_scores(scores, records):
    """
    Pair composite scores with records by segment key

    Parameters
    ----------
    scores : dict
        Segment key to composite score
    records : list
        :class:`~metricfuse.models.SegmentRecord` with human scores

    Returns
    -------
    pairs : list
        (record, composite score) in record order

    """
    record_keys = set(record.key_ for record in records)
    unmatched = sorted(set(scores).symmetric_difference(record_keys))
    if unmatched:
        raise KeyMismatchError(unmatched[:MAX_REPORTED_KEYS], len(unmatched))
    pairs = []
    for record in records:
        if record.human_score is None:
            raise ValueError("Segment %s has no human_score" %
                             '/'.join(record.key_))
        pairs.append((record, scores[record.key_]))
    return pairs


def _system_average(rows):
    """ Average (score, gold) per (group, system); rows are 4-tuples """
    sums = OrderedDict()
    for group, system_id, score, gold in rows:
        entry = sums.setdefault((group, system_id), [0.0, 0.0, 0])
        entry[0] += score
        entry[1] += gold
        entry[2] += 1
    return [(group, system_id, score / count, gold / count)
            for (group, system_id), (score, gold, count) in
            sorted(six.iteritems(sums))]


class EvaluationReport(object):

    """
    Overall and grouped correlations

    Attributes
    ----------
    level : str
        'segment' or 'system'
    size : int
        Number of points correlated (segments or systems)
    overall : :class:`~collections.OrderedDict`
        Measure name to coefficient, None when undefined
    groups : :class:`~collections.OrderedDict`
        Grouping name ('lang', 'domain') to a mapping of measure name to
        :class:`~metricfuse.correlation.GroupedCorrelation`

    """

    def __init__(self, level, size, overall, groups):
        self.level = level
        self.size = size
        self.overall = overall
        self.groups = groups

    def dump(self):
        """ A JSON-friendly dict """
        groups = OrderedDict()
        for grouping, measures in six.iteritems(self.groups):
            groups[grouping] = OrderedDict()
            for measure, result in six.iteritems(measures):
                groups[grouping][measure] = OrderedDict([
                    ('per_group', OrderedDict(
                        ('/'.join(key) if isinstance(key, tuple) else
                         six.text_type(key), value)
                        for key, value in six.iteritems(result.per_group))),
                    ('unweighted_mean', result.mean),
                    ('undefined', [six.text_type(key)
                                   for key in result.undefined]),
                ])
        return OrderedDict([
            ('level', self.level),
            ('size', self.size),
            ('overall', self.overall),
            ('groups', groups),
        ])

    def render(self):
        """ The report as text """
        def fmt(value):
            return 'undefined' if value is None else '%.6f' % value

        lines = ['%s-level correlation over %d points' % (self.level,
                                                          self.size)]
        for measure, value in six.iteritems(self.overall):
            lines.append('  %-14s %s' % (measure, fmt(value)))
        for grouping, measures in six.iteritems(self.groups):
            lines.append('')
            lines.append('by %s:' % grouping)
            for measure, result in six.iteritems(measures):
                lines.append('  %s' % measure)
                for key, value in six.iteritems(result.per_group):
                    lines.append('    %-12s %s (n=%d)' % (
                        key, fmt(value), result.sizes[key]))
                lines.append('    %-12s %s' % ('unweighted mean over groups',
                                               fmt(result.mean)))
                if result.undefined:
                    lines.append('    undefined (excluded): %s' % ', '.join(
                        six.text_type(key) for key in result.undefined))
        return '\n'.join(lines)


def _correlate_or_none(x, y, measure):
    try:
        return correlate(x, y, measure)
    except CorrelationUndefined as e:
        LOG.warning("Overall %s is undefined: %s", measure, e)
        return None


def evaluate(scores, records, group_by=None, level=SEGMENT,
             measures=MEASURES):
    """
    Correlate composite scores with the human scores of records

    Parameters
    ----------
    scores : dict
        Segment key to composite score, e.g. from
        :func:`~metricfuse.dataset.read_scored`
    records : list
        :class:`~metricfuse.models.SegmentRecord` carrying human scores
    group_by : list, optional
        Groupings to report, from 'lang' and 'domain'. By default 'lang',
        plus 'domain' when any record has one. Records without a domain
        are left out of the domain groups.
    level : str, optional
        'segment' (default) or 'system'. At system level, scores are averaged
        per system (within each group) before correlating.
    measures : list, optional
        Correlation measures (default Kendall tau-b and Pearson)

    Returns
    -------
    report : :class:`.EvaluationReport`

    Raises
    ------
    exc : :class:`.KeyMismatchError`
        If the scores and records do not cover the same segments

    """
    if level not in LEVELS:
        raise ValueError("Unknown level '%s'" % level)
    for measure in measures:
        if measure not in MEASURES:
            raise ValueError("Unknown measure '%s'" % measure)
    pairs = match_scores(scores, records)
    if group_by is None:
        group_by = ['lang']
        if any(record.domain is not None for record, _ in pairs):
            group_by.append('domain')
    for grouping in group_by:
        if grouping not in GROUPINGS:
            raise ValueError("Unknown grouping '%s'" % grouping)

    rows = [(None, record.system_id, score, record.human_score)
            for record, score in pairs]
    if level == SYSTEM:
        rows = _system_average(rows)
    x = np.array([row[2] for row in rows])
    y = np.array([row[3] for row in rows])
    overall = OrderedDict((measure, _correlate_or_none(x, y, measure))
                          for measure in measures)

    groups = OrderedDict()
    for grouping in group_by:
        field_name = GROUPINGS[grouping]
        rows = [(getattr(record, field_name), record.system_id, score,
                 record.human_score) for record, score in pairs
                if getattr(record, field_name) is not None]
        if len(rows) < len(pairs):
            LOG.info("%d segment(s) have no %s; left out of the %s groups",
                     len(pairs) - len(rows), field_name, grouping)
        if level == SYSTEM:
            rows = _system_average(rows)
        keys = [row[0] for row in rows]
        gx = [row[2] for row in rows]
        gy = [row[3] for row in rows]
        groups[grouping] = OrderedDict(
            (measure, grouped_correlation(gx, gy, keys, measure))
            for measure in measures)
    return EvaluationReport(level, len(x), overall, groups)
