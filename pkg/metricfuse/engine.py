""" Calibration and scoring engine """
import logging

from .bayes_opt import BoConfig, DEFAULT_KAPPA
from .calibration import (CalibrationJob, DEFAULT_PRUNE_TOLERANCE,
                          DEFAULT_ZERO_THRESHOLD, calibrate,
                          metric_correlations)
from .evaluation import SEGMENT, evaluate
from .models import (CALIBRATION, ConfigError, REFERENCE_BASED, SCORING,
                     validate_dataset)
from .preprocess import preprocess_matrix
from .scoring import score_batch


LOG = logging.getLogger(__name__)

NO_ARG = object()


class Engine(object):

    """
    Entry point for calibrating, scoring and evaluating composites

    Parameters
    ----------
    default_strict : bool, optional
        Default setting for :meth:`~.Engine.score` (default True)
    workers : int, optional
        Default number of threads for per-language calibration (default 1)

    Notes
    -----
    A typical session calibrates on training records and scores new ones:

    .. code-block:: python

        engine = Engine()
        result = engine.calibrate(train, specs, steps=100, init_points=5,
                                  seed=42)
        scored = engine.score(test, result.config, hybrid=True)
        report = engine.evaluate(scored, test)

    """

    def __init__(self, default_strict=True, workers=1):
        self._default_strict = None
        self.default_strict = default_strict
        if workers < 1:
            raise ValueError("workers must be at least 1, got %r" % workers)
        self.workers = workers

    @property
    def default_strict(self):
        """
        Get the default_strict value

        Notes
        -----
        With ``default_strict = True``, :meth:`~.Engine.score` raises on the
        first record it cannot score and returns nothing. With False it
        emits a skip entry for the record and keeps going.

        """
        return self._default_strict

    @default_strict.setter
    def default_strict(self, default_strict):
        """ Protected setter for default_strict """
        if not isinstance(default_strict, bool):
            raise ValueError("Unrecognized value '%s' for default_strict" %
                             default_strict)
        self._default_strict = default_strict

    def validate(self, records, specs, mode=CALIBRATION, fallback_specs=None):
        """
        Report the records that cannot be used for calibration or scoring

        Returns
        -------
        issues : list
            :class:`~metricfuse.models.ValidationIssue`

        """
        if mode not in (CALIBRATION, SCORING):
            raise ValueError("Unrecognized validation mode '%s'" % mode)
        return validate_dataset(records, specs, mode, fallback_specs)

    def correlations(self, records, specs):
        """ Tau-b of each preprocessed metric against gold and each other """
        matrix = preprocess_matrix(records, specs)
        gold = [record.human_score for record in records]
        return metric_correlations(matrix, gold)

    def calibrate(self, records, specs, mode=None, per_language=False,
                  init_points=5, steps=100, seed=0, kappa=DEFAULT_KAPPA,
                  zero_threshold=DEFAULT_ZERO_THRESHOLD,
                  prune_tolerance=DEFAULT_PRUNE_TOLERANCE, workers=NO_ARG,
                  qe_fallback=None, **kwargs):
        """
        Calibrate composite weights against human scores

        Parameters
        ----------
        records : list
            :class:`~metricfuse.models.SegmentRecord` with human scores
        specs : list
            Ordered :class:`~metricfuse.models.MetricSpec`
        mode : str, optional
            'reference_based' or 'reference_free' (inferred by default)
        per_language : bool, optional
            Calibrate one weight vector per language pair too (default False)
        init_points : int, optional
            Random initial points (default 5)
        steps : int, optional
            Optimization steps after initialization (default 100)
        seed : int, optional
        kappa : float, optional
            UCB exploration weight (default 2.576)
        zero_threshold : float, optional
        prune_tolerance : float, optional
        workers : int, optional
            Threads for per-language calibration (default ``self.workers``)
        qe_fallback : :class:`~metricfuse.models.CompositeConfig`, optional
            Reference-free config attached to the result for hybrid scoring
        **kwargs :
            Passed to :class:`~metricfuse.bayes_opt.BoConfig`
            (e.g. ``candidate_count``, ``refine_iterations``)

        Returns
        -------
        result : :class:`~metricfuse.calibration.CalibrationResult`

        """
        if workers is NO_ARG:
            workers = self.workers
        bo = BoConfig(len(specs), init_points=init_points, steps=steps,
                      seed=seed, kappa=kappa, **kwargs)
        job = CalibrationJob(records, specs, mode=mode, bo=bo,
                             per_language=per_language,
                             zero_threshold=zero_threshold,
                             prune_tolerance=prune_tolerance, workers=workers)
        result = calibrate(job)
        if qe_fallback is not None:
            if result.config.mode != REFERENCE_BASED:
                raise ConfigError("Only reference-based configs take a "
                                  "qe_fallback")
            result.config = result.config.replace(qe_fallback=qe_fallback)
        return result

    def score(self, records, config, hybrid=False, strict=None,
              display_normalized=False):
        """
        Apply a config to records

        Parameters
        ----------
        records : list
        config : :class:`~metricfuse.models.CompositeConfig`
        hybrid : bool, optional
            Route records without a reference to ``config.qe_fallback``
        strict : bool, optional
            Raise on the first failing record (default ``default_strict``)
        display_normalized : bool, optional
            Add the score divided by the sum of the weights

        Returns
        -------
        scored : list
            :class:`~metricfuse.scoring.ScoredSegment` in record order

        """
        if strict is None:
            strict = self.default_strict
        return score_batch(records, config, hybrid=hybrid, strict=strict,
                           display_normalized=display_normalized)

    def evaluate(self, scored, records, group_by=None, level=SEGMENT):
        """
        Correlate scores with the human scores of records

        Parameters
        ----------
        scored : dict or list
            Segment key to composite score, or a list of
            :class:`~metricfuse.scoring.ScoredSegment` (skips are ignored)
        records : list
        group_by : list, optional
        level : str, optional
            'segment' (default) or 'system'

        Returns
        -------
        report : :class:`~metricfuse.evaluation.EvaluationReport`

        """
        if not isinstance(scored, dict):
            scored = dict((segment.key, segment.composite_score)
                          for segment in scored if not segment.skipped)
        return evaluate(scored, records, group_by=group_by, level=level)
