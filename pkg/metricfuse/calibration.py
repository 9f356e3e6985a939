""" Weight calibration: composite scores, the tau objective and the BO run """
import hashlib
import logging
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import six

from .bayes_opt import BoConfig, optimize
from .correlation import CorrelationUndefined, KENDALL_TAU_B, kendall_tau_b
from .gp import (DEFAULT_JITTER, DEFAULT_NOISE_VARIANCE, IllConditionedError,
                 MAX_JITTER, MIN_SIGNAL_VARIANCE, NU)
from .models import (CALIBRATION, CompositeConfig, MODES, REFERENCE_BASED,
                     REFERENCE_FREE, group_records, validate_dataset)
from .preprocess import preprocess_matrix

LOG = logging.getLogger(__name__)

DEFAULT_ZERO_THRESHOLD = 1e-3
DEFAULT_PRUNE_TOLERANCE = 0.005


class ObjectiveUndefined(ValueError):

    """ Raised when the tau objective cannot be computed on a data slice """

    def __init__(self, message="objective undefined on this slice"):
        super(ObjectiveUndefined, self).__init__(message)


def derive_seed(seed, key):
    """
    Derive a stable seed for a sub-calibration

    The result depends only on ``seed`` and ``key``, never on scheduling.

    """
    digest = hashlib.sha256(('%d:%s' % (seed, key)).encode('utf-8'))
    return int(digest.hexdigest()[:8], 16) & 0x7fffffff


def composite(weights, row):
    """
    Weighted sum of one row of normalized scores

    Terms are accumulated left to right so the result is bitwise equal to
    :func:`.composite_many` on the same row.

    """
    if len(weights) != len(row):
        raise ValueError("Got %d weights for %d scores" % (len(weights),
                                                          len(row)))
    total = 0.0
    for weight, value in zip(weights, row):
        total = total + float(weight) * float(value)
    return total


def composite_many(weights, values):
    """ :func:`.composite` applied to every row of a 2-D array """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(weights):
        raise ValueError("Got %d weights for rows of shape %s" %
                         (len(weights), values.shape[1:]))
    total = np.zeros(values.shape[0])
    for j, weight in enumerate(weights):
        total = total + float(weight) * values[:, j]
    return total


def objective_tau(weights, matrix, gold):
    """
    Kendall tau-b between the composite scores of a matrix and gold scores

    Parameters
    ----------
    weights : array_like
    matrix : :class:`~metricfuse.preprocess.ScoreMatrix`
    gold : array_like
        One human score per matrix row

    Raises
    ------
    exc : :class:`~metricfuse.correlation.CorrelationUndefined`
        If the composite or the gold scores are all tied

    """
    if len(gold) != len(matrix):
        raise ValueError("Got %d gold scores for %d rows" % (len(gold),
                                                             len(matrix)))
    return kendall_tau_b(composite_many(weights, matrix.values), gold)


def sparsify(weights, threshold=DEFAULT_ZERO_THRESHOLD):
    """
    Set negligible weights to exactly zero

    The largest weight is always kept, so the result is never all zeros
    unless the input is.

    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative, got %r" % threshold)
    weights = [float(w) for w in weights]
    if not weights:
        return ()
    keep = int(np.argmax(weights))
    return tuple(w if w >= threshold or i == keep else 0.0
                 for i, w in enumerate(weights))


def prune(weights, objective, incumbent, tolerance=DEFAULT_PRUNE_TOLERANCE):
    """
    Zero out weights that do not help the objective

    Tries each non-zero weight except the largest, smallest first, and keeps
    the zero if the objective stays within ``tolerance`` of ``incumbent``.

    Parameters
    ----------
    weights : tuple
    objective : callable
        Maps a weight vector to its objective value
    incumbent : float
        Objective value of the unpruned weights
    tolerance : float, optional
        Allowed loss against ``incumbent`` (default 0.005). Negative disables
        pruning.

    Returns
    -------
    weights : tuple

    """
    weights = tuple(float(w) for w in weights)
    if tolerance < 0 or not weights:
        return weights
    keep = int(np.argmax(weights))
    order = sorted((w, i) for i, w in enumerate(weights)
                   if w > 0 and i != keep)
    for _, index in order:
        trial = list(weights)
        trial[index] = 0.0
        try:
            value = objective(trial)
        except (ValueError, ArithmeticError) as e:
            LOG.debug("Not pruning weight %d: %s", index, e)
            continue
        if value >= incumbent - tolerance:
            LOG.debug("Pruned weight %d (objective %r)", index, value)
            weights = tuple(trial)
    return weights


def metric_correlations(matrix, gold):
    """
    Tau-b of each metric against gold and between metrics

    Returns
    -------
    report : :class:`~collections.OrderedDict`
        ``gold`` maps metric name to tau against the gold scores, ``between``
        maps metric name to a mapping of metric name to tau. Undefined values
        are None.

    """
    def tau(x, y):
        try:
            return kendall_tau_b(x, y)
        except CorrelationUndefined:
            return None

    names = matrix.metric_order
    report = OrderedDict()
    report['gold'] = OrderedDict((name, tau(matrix.column(name), gold))
                                 for name in names)
    report['between'] = OrderedDict()
    for a in names:
        report['between'][a] = OrderedDict(
            (b, tau(matrix.column(a), matrix.column(b))) for b in names)
    return report


class CalibrationJob(object):

    """
    Everything needed to calibrate one composite

    Parameters
    ----------
    records : list
        :class:`~metricfuse.models.SegmentRecord` with human scores
    specs : list
        Ordered :class:`~metricfuse.models.MetricSpec`
    mode : str, optional
        'reference_based' or 'reference_free'. Inferred from the specs when
        omitted.
    bo : :class:`~metricfuse.bayes_opt.BoConfig`, optional
        Defaults to 5 initial points, 100 steps and seed 0
    per_language : bool, optional
        Also calibrate one weight vector per language pair (default False)
    zero_threshold : float, optional
        Weights below this become exactly 0 (default 1e-3)
    prune_tolerance : float, optional
        Objective loss allowed when zeroing weights that do not help
        (default 0.005). Negative disables pruning.
    workers : int, optional
        Threads used for per-language calibrations (default 1)

    """

    def __init__(self, records, specs, mode=None, bo=None, per_language=False,
                 zero_threshold=DEFAULT_ZERO_THRESHOLD,
                 prune_tolerance=DEFAULT_PRUNE_TOLERANCE, workers=1):
        self.records = list(records)
        self.specs = tuple(specs)
        if not self.records:
            raise ValueError("Calibration needs at least one record")
        if not self.specs:
            raise ValueError("Calibration needs at least one metric")
        if mode is None:
            mode = (REFERENCE_BASED if any(spec.needs_reference for spec in
                                           self.specs) else REFERENCE_FREE)
        if mode not in MODES:
            raise ValueError("Unknown mode '%s'" % mode)
        if mode == REFERENCE_BASED and not any(spec.needs_reference
                                               for spec in self.specs):
            raise ValueError("Reference-based calibration needs at least one "
                             "reference-based metric")
        if mode == REFERENCE_FREE and any(spec.needs_reference
                                          for spec in self.specs):
            raise ValueError("Reference-free calibration cannot use "
                             "reference-based metrics")
        issues = validate_dataset(self.records, self.specs, CALIBRATION)
        if issues:
            raise ValueError("%d record(s) are not usable for calibration; "
                             "first: %s" % (len(issues), issues[0]))
        if bo is None:
            bo = BoConfig(len(self.specs))
        if bo.dimension != len(self.specs):
            raise ValueError("BoConfig dimension %d does not match %d "
                             "metrics" % (bo.dimension, len(self.specs)))
        if zero_threshold < 0:
            raise ValueError("zero_threshold must be non-negative")
        if workers < 1:
            raise ValueError("workers must be at least 1")
        self.mode = mode
        self.bo = bo
        self.per_language = per_language
        self.zero_threshold = float(zero_threshold)
        self.prune_tolerance = float(prune_tolerance)
        self.workers = int(workers)

    @property
    def seed(self):
        """ Seed of the global calibration """
        return self.bo.seed

    @property
    def gold(self):
        """ Human scores of the records, in record order """
        return np.array([record.human_score for record in self.records])


class CalibrationResult(object):

    """
    A calibrated configuration and the history that produced it

    Attributes
    ----------
    config : :class:`~metricfuse.models.CompositeConfig`
    best_objective : float
        Best tau found by the optimizer (the maximum over ``trace``)
    final_objective : float
        Tau of ``config.weights`` after sparsification and pruning
    trace : list
        (iteration, weights, value) for every evaluation
    seed : int
    per_lang_objectives : :class:`~collections.OrderedDict`
        Language pair to the final tau of its weights (None when the pair
        fell back to the global weights)
    warnings : list
        Human-readable messages about fallbacks

    """

    def __init__(self, config, best_objective, final_objective, trace, seed,
                 per_lang_objectives=None, warnings=None):
        self.config = config
        self.best_objective = best_objective
        self.final_objective = final_objective
        self.trace = trace
        self.seed = seed
        self.per_lang_objectives = per_lang_objectives or OrderedDict()
        self.warnings = list(warnings or [])

    @property
    def provenance(self):
        """ Settings recorded in the config """
        return self.config.provenance

    def summary(self):
        """ A short multi-line description for terminals """
        lines = [
            'best objective (kendall tau-b): %.6f' % self.best_objective,
            'final objective after sparsification: %.6f' %
            self.final_objective,
            'evaluations: %d' % len(self.trace),
            'weights: %s' % ', '.join(
                '%s=%.4f' % (name, weight) for name, weight in
                zip(self.config.metric_names, self.config.weights)),
        ]
        for lang_pair, value in six.iteritems(self.per_lang_objectives):
            lines.append('  %s: %s' % (lang_pair, 'global fallback' if value
                                       is None else '%.6f' % value))
        for warning in self.warnings:
            lines.append('warning: %s' % warning)
        return '\n'.join(lines)

    def __repr__(self):
        return 'CalibrationResult(best_objective=%r, final_objective=%r)' % (
            self.best_objective, self.final_objective)


def kernel_settings(bo):
    """ Kernel description recorded for reproducibility """
    if bo.kernel_params is not None:
        return bo.kernel_params.dump()
    return {
        'kernel': 'matern',
        'nu': NU,
        'length_scale': 0.25 * math.sqrt(bo.dimension),
        'signal_variance': 'variance of observations, floor %g' %
                           MIN_SIGNAL_VARIANCE,
        'noise_variance': DEFAULT_NOISE_VARIANCE,
        'jitter': DEFAULT_JITTER,
        'max_jitter': MAX_JITTER,
        'prior_mean': 'mean of observations',
    }


def _provenance(job, best_objective, final_objective, trace):
    from . import __version__
    failures = sum(1 for _, _, value in trace if value == -np.inf)
    return {
        'seed': job.seed,
        'bo': job.bo.dump(),
        'kernel': kernel_settings(job.bo),
        'objective': {
            'measure': KENDALL_TAU_B,
            'slice': 'pooled segments',
            'best': best_objective,
            'final': final_objective,
            'evaluations': len(trace),
            'failed_evaluations': failures,
        },
        'sparsify': {
            'zero_threshold': job.zero_threshold,
            'prune_tolerance': job.prune_tolerance,
        },
        'version': __version__,
    }


def _calibrate_slice(matrix, gold, bo, zero_threshold, prune_tolerance):
    """ Optimize, sparsify and prune the weights for one slice """
    gold = np.asarray(gold, dtype=float)
    if len(gold) < 2 or np.all(gold == gold[0]):
        raise ObjectiveUndefined()

    def objective(weights):
        return objective_tau(weights, matrix, gold)

    result = optimize(objective, bo)
    if result.best_weights is None:
        raise ObjectiveUndefined()
    incumbent = result.best_weights
    weights = sparsify(incumbent, zero_threshold)
    try:
        final = objective(weights)
    except CorrelationUndefined:
        LOG.warning("Sparsified weights have an undefined objective; "
                    "keeping the optimizer's weights")
        weights, final = incumbent, result.best_value
    pruned = prune(weights, objective, result.best_value, prune_tolerance)
    if pruned != weights:
        weights, final = pruned, objective(pruned)
    return weights, result.best_value, final, result.trace


def calibrate_global(job):
    """
    Calibrate one weight vector on all records of a job

    Returns
    -------
    result : :class:`.CalibrationResult`

    Raises
    ------
    exc : :class:`.ObjectiveUndefined`
        If the gold scores are all tied or every evaluation failed

    """
    matrix = preprocess_matrix(job.records, job.specs)
    gold = job.gold
    LOG.info("Calibrating %d metrics on %d segments", len(job.specs),
             len(matrix))
    for name, value in six.iteritems(metric_correlations(matrix,
                                                         gold)['gold']):
        LOG.info("  %s tau-b vs gold: %s", name, value)
    weights, best, final, trace = _calibrate_slice(
        matrix, gold, job.bo, job.zero_threshold, job.prune_tolerance)
    LOG.info("Calibrated weights %s: tau %.6f (best %.6f)", weights, final,
             best)
    config = CompositeConfig(job.specs, weights, mode=job.mode,
                             provenance=_provenance(job, best, final, trace))
    return CalibrationResult(config, best, final, trace, job.seed)


def _calibrate_pair(job, lang_pair, records):
    """ Calibrate one language pair; returns (weights, objective) """
    bo = job.bo.replace(seed=derive_seed(job.seed, lang_pair))
    matrix = preprocess_matrix(records, job.specs)
    gold = np.array([record.human_score for record in records])
    LOG.info("Calibrating %s on %d segments (seed %d)", lang_pair,
             len(records), bo.seed)
    weights, _, final, _ = _calibrate_slice(
        matrix, gold, bo, job.zero_threshold, job.prune_tolerance)
    return weights, final


def calibrate_per_language(job):
    """
    Calibrate a global weight vector plus one per language pair

    Each pair is calibrated on its own records with a seed derived from the
    job seed and the pair. A pair whose objective cannot be computed falls
    back to the global weights and a warning is recorded.

    Returns
    -------
    result : :class:`.CalibrationResult`
        ``config.per_lang`` has one entry per language pair in the data

    """
    result = calibrate_global(job)
    groups = group_records(job.records, 'lang_pair')

    def run(item):
        lang_pair, records = item
        try:
            return _calibrate_pair(job, lang_pair, records)
        except (ObjectiveUndefined, CorrelationUndefined,
                IllConditionedError) as e:
            return e

    if job.workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=job.workers) as executor:
            outcomes = list(executor.map(run, six.iteritems(groups)))
    else:
        outcomes = [run(item) for item in six.iteritems(groups)]

    per_lang = OrderedDict()
    objectives = OrderedDict()
    warnings = []
    for lang_pair, outcome in zip(groups, outcomes):
        if isinstance(outcome, Exception):
            message = "%s uses the global weights: %s" % (lang_pair, outcome)
            LOG.warning(message)
            warnings.append(message)
            per_lang[lang_pair] = result.config.weights
            objectives[lang_pair] = None
        else:
            per_lang[lang_pair], objectives[lang_pair] = outcome

    provenance = dict(result.config.provenance)
    provenance['per_language'] = {
        'seeds': dict((lang_pair, derive_seed(job.seed, lang_pair))
                      for lang_pair in groups),
        'fallbacks': [key for key, val in six.iteritems(objectives)
                      if val is None],
    }
    config = result.config.replace(per_lang=per_lang, provenance=provenance)
    return CalibrationResult(config, result.best_objective,
                             result.final_objective, result.trace, job.seed,
                             per_lang_objectives=objectives,
                             warnings=warnings)


def calibrate(job):
    """ Run the calibration a job asks for """
    if job.per_language:
        return calibrate_per_language(job)
    return calibrate_global(job)
