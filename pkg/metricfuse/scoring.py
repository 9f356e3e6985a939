""" Apply a calibrated composite to new records """
import logging
from collections import OrderedDict

from .preprocess import preprocess_value

LOG = logging.getLogger(__name__)

PRIMARY = 'primary'
QE_FALLBACK = 'qe_fallback'
GLOBAL_WEIGHTS = 'global'
PER_LANG_PREFIX = 'per_lang:'


class ScoringError(ValueError):

    """ Raised when a record cannot be scored with a configuration """


class ScoredSegment(object):

    """
    The composite score of one record

    Attributes
    ----------
    key : tuple
        (lang_pair, system_id, segment_id)
    composite_score : float or None
        Weighted sum of normalized scores, in [0, sum of weights]. None for a
        skipped record.
    config_used : str
        'primary' or 'qe_fallback'
    weights_used : str
        'global' or 'per_lang:<lang_pair>'
    display_score : float or None
        ``composite_score`` divided by the sum of the weights, when requested.
        Never used for correlations.
    error : str or None
        Why the record was skipped (lenient scoring only)

    """

    def __init__(self, key, composite_score, config_used=None,
                 weights_used=None, display_score=None, error=None):
        self.key = tuple(key)
        self.composite_score = composite_score
        self.config_used = config_used
        self.weights_used = weights_used
        self.display_score = display_score
        self.error = error

    @classmethod
    def skip(cls, record, error):
        """ Placeholder for a record that could not be scored """
        return cls(record.key_, None, error=str(error))

    @property
    def skipped(self):
        """ True if the record was not scored """
        return self.composite_score is None

    def dump(self):
        """ A JSON-friendly dict """
        lang_pair, system_id, segment_id = self.key
        data = OrderedDict([
            ('lang_pair', lang_pair),
            ('system_id', system_id),
            ('segment_id', segment_id),
            ('composite_score', self.composite_score),
        ])
        if self.skipped:
            data['skipped'] = True
            data['error'] = self.error
            return data
        data['config_used'] = self.config_used
        data['weights_used'] = self.weights_used
        if self.display_score is not None:
            data['display_score'] = self.display_score
        return data

    def __eq__(self, other):
        return isinstance(other, ScoredSegment) and \
            self.dump() == other.dump()

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return 'ScoredSegment(%s, %r, %s, %s)' % (
            '/'.join(self.key), self.composite_score, self.config_used,
            self.weights_used)


def _select_config(record, config, hybrid):
    """ The sub-configuration that applies to a record """
    if hybrid and not record.has_reference:
        if config.qe_fallback is None:
            raise ScoringError("Record %s has no reference and the config "
                               "has no qe_fallback" % '/'.join(record.key_))
        return config.qe_fallback, QE_FALLBACK
    return config, PRIMARY


def score_segment(record, config, hybrid=False, display_normalized=False):
    """
    Score one record

    Parameters
    ----------
    record : :class:`~metricfuse.models.SegmentRecord`
    config : :class:`~metricfuse.models.CompositeConfig`
    hybrid : bool, optional
        Use ``config.qe_fallback`` for records without a reference
        (default False)
    display_normalized : bool, optional
        Also compute the score divided by the sum of the weights
        (default False)

    Returns
    -------
    scored : :class:`.ScoredSegment`

    Raises
    ------
    exc : :class:`.ScoringError`
        If the fallback is needed but missing, or a score with a non-zero
        weight is missing or corrupt

    """
    sub_config, config_used = _select_config(record, config, hybrid)
    weights, lang_pair = sub_config.weights_for(record.lang_pair)
    total = 0.0
    for spec, weight in zip(sub_config.specs, weights):
        if weight == 0:
            continue
        raw = record.score(spec.name)
        if raw is None:
            raise ScoringError("Record %s is missing a score for metric '%s'"
                               % ('/'.join(record.key_), spec.name))
        try:
            value = preprocess_value(raw, spec)
        except ValueError as e:
            raise ScoringError("Record %s: %s" % ('/'.join(record.key_), e))
        total = total + weight * value
    display = None
    if display_normalized:
        weight_sum = sub_config.total_weight(record.lang_pair)
        display = total / weight_sum if weight_sum > 0 else None
    weights_used = GLOBAL_WEIGHTS if lang_pair is None else \
        PER_LANG_PREFIX + lang_pair
    return ScoredSegment(record.key_, total, config_used, weights_used,
                         display)


def score_batch(records, config, hybrid=False, strict=True,
                display_normalized=False):
    """
    Score records in order

    Parameters
    ----------
    records : list
    config : :class:`~metricfuse.models.CompositeConfig`
    hybrid : bool, optional
    strict : bool, optional
        If True (default), the first failing record raises and nothing is
        returned. If False, failing records become skip entries.
    display_normalized : bool, optional

    Returns
    -------
    scored : list
        One :class:`.ScoredSegment` per record

    """
    results = []
    for index, record in enumerate(records):
        try:
            results.append(score_segment(record, config, hybrid,
                                         display_normalized))
        except ScoringError as e:
            if strict:
                raise ScoringError("record %d (%s): %s" % (
                    index + 1, '/'.join(record.key_), e))
            LOG.warning("Skipping record %d: %s", index + 1, e)
            results.append(ScoredSegment.skip(record, e))
    return results
