""" Rank and linear correlation between metric scores and human scores """
import logging
import math
from collections import OrderedDict

import numpy as np
import six
from scipy import stats

LOG = logging.getLogger(__name__)

KENDALL_TAU_B = 'kendall_tau_b'
PEARSON = 'pearson'
MEASURES = (KENDALL_TAU_B, PEARSON)


class CorrelationUndefined(ValueError):

    """ Raised when a correlation has no meaningful value for the inputs """


def _as_vectors(x, y):
    """ Convert to float arrays and check the shared preconditions """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("Correlation inputs must be vectors")
    if len(x) != len(y):
        raise ValueError("Length mismatch: %d != %d" % (len(x), len(y)))
    if len(x) < 2:
        raise CorrelationUndefined("Correlation needs at least 2 points, "
                                   "got %d" % len(x))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("Correlation inputs must be finite")
    return x, y


def kendall_tau_b(x, y):
    """
    Kendall's tau-b, with the tie correction in both variables

    Parameters
    ----------
    x : array_like
    y : array_like
        Same length as ``x`` (at least 2)

    Returns
    -------
    tau : float
        In [-1, 1]

    Raises
    ------
    exc : :class:`.CorrelationUndefined`
        If either vector has all values tied

    """
    x, y = _as_vectors(x, y)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise CorrelationUndefined("Kendall tau is undefined when every "
                                   "value of a vector is tied")
    tau, _ = stats.kendalltau(x, y, variant='b')
    return float(tau)


def pearson(x, y):
    """ Sample Pearson correlation coefficient """
    x, y = _as_vectors(x, y)
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise CorrelationUndefined("Pearson correlation is undefined for a "
                                   "vector with zero variance")
    r, _ = stats.pearsonr(x, y)
    return float(r)


MEASURE_FUNCTIONS = {
    KENDALL_TAU_B: kendall_tau_b,
    PEARSON: pearson,
}


def correlate(x, y, measure=KENDALL_TAU_B):
    """ Dispatch to a correlation measure by name """
    try:
        func = MEASURE_FUNCTIONS[measure]
    except KeyError:
        raise ValueError("Unknown correlation measure '%s'" % measure)
    return func(x, y)


class GroupedCorrelation(object):

    """
    Per-group coefficients and their unweighted mean

    Attributes
    ----------
    measure : str
    per_group : :class:`~collections.OrderedDict`
        Group key to coefficient, sorted by key. Undefined groups map to None.
    sizes : :class:`~collections.OrderedDict`
        Group key to number of points
    undefined : list
        Keys of the groups whose coefficient is undefined
    mean : float or None
        Arithmetic mean over the defined groups, None if there are none

    """

    def __init__(self, measure, per_group, sizes):
        self.measure = measure
        self.per_group = per_group
        self.sizes = sizes
        self.undefined = [key for key, val in six.iteritems(per_group)
                          if val is None]
        defined = [val for val in six.itervalues(per_group) if val is not None]
        self.mean = math.fsum(defined) / len(defined) if defined else None

    @property
    def has_undefined(self):
        """ True if any group was excluded from the mean """
        return bool(self.undefined)

    def __repr__(self):
        return 'GroupedCorrelation(%s, mean=%r, groups=%d)' % (
            self.measure, self.mean, len(self.per_group))


def grouped_correlation(scores, gold, group_keys, measure=KENDALL_TAU_B):
    """
    Correlate within each group and average the groups

    Parameters
    ----------
    scores : array_like
    gold : array_like
    group_keys : list
        A sortable group label for each point
    measure : str, optional
        'kendall_tau_b' or 'pearson' (default 'kendall_tau_b')

    Returns
    -------
    result : :class:`.GroupedCorrelation`

    """
    scores = np.asarray(scores, dtype=float)
    gold = np.asarray(gold, dtype=float)
    group_keys = list(group_keys)
    if not len(scores) == len(gold) == len(group_keys):
        raise ValueError("scores, gold and group_keys must have equal "
                         "lengths (%d, %d, %d)" % (len(scores), len(gold),
                                                   len(group_keys)))
    members = {}
    for i, key in enumerate(group_keys):
        members.setdefault(key, []).append(i)
    per_group = OrderedDict()
    sizes = OrderedDict()
    for key in sorted(members):
        indices = members[key]
        sizes[key] = len(indices)
        try:
            per_group[key] = correlate(scores[indices], gold[indices],
                                       measure)
        except CorrelationUndefined as e:
            LOG.warning("Group %s excluded from the mean: %s", key, e)
            per_group[key] = None
    return GroupedCorrelation(measure, per_group, sizes)
