""" Sequential Bayesian optimization over the weight cube [0, 1]^N """
import logging
import math

import numpy as np

from .gp import GpState, posterior_many

LOG = logging.getLogger(__name__)

UCB = 'ucb'
ACQUISITIONS = (UCB,)
DEFAULT_KAPPA = 2.576
MAX_CANDIDATES = 20000
# Golden ratio conjugate
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class BoConfig(object):

    """
    Settings for one optimization run

    Parameters
    ----------
    dimension : int
        Number of weights
    init_points : int, optional
        Seeded uniform points evaluated before the surrogate is used
        (default 5)
    steps : int, optional
        Number of suggested points evaluated after initialization
        (default 100)
    seed : int, optional
        Seed of the single random stream of the run (default 0)
    kappa : float, optional
        Exploration weight of the UCB acquisition (default 2.576)
    acquisition : str, optional
        Acquisition function. Only 'ucb' is available.
    candidate_count : int, optional
        Uniform candidates scored per suggestion (default
        ``min(1000 * dimension, 20000)``)
    refine_iterations : int, optional
        Golden-section iterations per coordinate when refining the best
        candidate (default 20). 0 disables refinement.
    kernel_params : :class:`~metricfuse.gp.KernelParams`, optional
        Fixed kernel settings. By default they are derived from the
        observations at every step.

    """

    def __init__(self, dimension, init_points=5, steps=100, seed=0,
                 kappa=DEFAULT_KAPPA, acquisition=UCB, candidate_count=None,
                 refine_iterations=20, kernel_params=None):
        if dimension < 1:
            raise ValueError("dimension must be at least 1, got %r" %
                             dimension)
        if init_points < 1:
            raise ValueError("init_points must be at least 1, got %r" %
                             init_points)
        if steps < 0:
            raise ValueError("steps must be non-negative, got %r" % steps)
        if not kappa > 0:
            raise ValueError("kappa must be positive, got %r" % kappa)
        if acquisition not in ACQUISITIONS:
            raise ValueError("Unknown acquisition '%s'" % acquisition)
        if candidate_count is None:
            candidate_count = min(1000 * dimension, MAX_CANDIDATES)
        if candidate_count < 1:
            raise ValueError("candidate_count must be at least 1, got %r" %
                             candidate_count)
        if refine_iterations < 0:
            raise ValueError("refine_iterations must be non-negative, got %r"
                             % refine_iterations)
        self.dimension = int(dimension)
        self.init_points = int(init_points)
        self.steps = int(steps)
        self.seed = int(seed)
        self.kappa = float(kappa)
        self.acquisition = acquisition
        self.candidate_count = int(candidate_count)
        self.refine_iterations = int(refine_iterations)
        self.kernel_params = kernel_params

    @property
    def budget(self):
        """ Total number of objective evaluations """
        return self.init_points + self.steps

    def replace(self, **kwargs):
        """ Copy of this config with some settings replaced """
        args = {
            'dimension': self.dimension,
            'init_points': self.init_points,
            'steps': self.steps,
            'seed': self.seed,
            'kappa': self.kappa,
            'acquisition': self.acquisition,
            'candidate_count': self.candidate_count,
            'refine_iterations': self.refine_iterations,
            'kernel_params': self.kernel_params,
        }
        args.update(kwargs)
        return BoConfig(**args)

    def random_state(self):
        """ A fresh random stream seeded from this config """
        return np.random.RandomState(self.seed)

    def dump(self):
        """ Settings as a JSON-friendly dict """
        return {
            'acquisition': self.acquisition,
            'kappa': self.kappa,
            'init_points': self.init_points,
            'steps': self.steps,
            'candidate_count': self.candidate_count,
            'refine_iterations': self.refine_iterations,
            'seed': self.seed,
        }

    def __repr__(self):
        return 'BoConfig(dimension=%d, init_points=%d, steps=%d, seed=%d)' % (
            self.dimension, self.init_points, self.steps, self.seed)


def ucb(posterior, kappa):
    """ Upper confidence bound: mean + kappa * std """
    return posterior.mean + kappa * math.sqrt(posterior.variance)


def _ucb_many(state, points, kappa):
    means, variances = posterior_many(state, points)
    return means + kappa * np.sqrt(variances)


def _golden_section(func, low, high, iterations):
    """ Maximize a 1-D function on [low, high]; returns (x, f(x)) """
    c = high - INVPHI * (high - low)
    d = low + INVPHI * (high - low)
    fc, fd = func(c), func(d)
    for _ in range(iterations):
        if fc >= fd:
            high, d, fd = d, c, fc
            c = high - INVPHI * (high - low)
            fc = func(c)
        else:
            low, c, fc = c, d, fd
            d = low + INVPHI * (high - low)
            fd = func(d)
    if fc >= fd:
        return c, fc
    return d, fd


def _refine(state, config, point, value):
    """ One sweep of coordinate-wise golden-section search around a point """
    half_width = config.candidate_count ** (-1.0 / config.dimension)
    point = point.copy()
    for dim in range(config.dimension):
        low = max(0.0, point[dim] - half_width)
        high = min(1.0, point[dim] + half_width)
        if high <= low:
            continue

        def acquisition(t, dim=dim):
            trial = point.copy()
            trial[dim] = t
            return _ucb_many(state, trial.reshape(1, -1), config.kappa)[0]

        t, t_value = _golden_section(acquisition, low, high,
                                     config.refine_iterations)
        if t_value > value:
            point[dim] = t
            value = t_value
    return point, value


def suggest(state, config, rng):
    """
    Pick the next weight vector to evaluate

    Scores ``config.candidate_count`` uniform candidates by UCB, takes the
    best (lowest index on ties) and refines it coordinate by coordinate.

    Parameters
    ----------
    state : :class:`~metricfuse.gp.GpState`
    config : :class:`.BoConfig`
    rng : :class:`numpy.random.RandomState`

    Returns
    -------
    weights : :class:`numpy.ndarray`
        A point inside [0, 1]^N

    """
    if state.dimension != config.dimension:
        raise ValueError("State has dimension %d, config has %d" %
                         (state.dimension, config.dimension))
    candidates = rng.uniform(0.0, 1.0, (config.candidate_count,
                                        config.dimension))
    scores = _ucb_many(state, candidates, config.kappa)
    best = int(np.argmax(scores))
    point, value = candidates[best], scores[best]
    if config.refine_iterations > 0:
        point, value = _refine(state, config, point, value)
    return np.clip(point, 0.0, 1.0)


class OptimizationResult(object):

    """
    Outcome of :func:`.optimize`

    Attributes
    ----------
    best_weights : tuple or None
        The incumbent, None if every evaluation failed
    best_value : float
        The incumbent objective, ``-inf`` if every evaluation failed
    trace : list
        (iteration, weights, value) for every evaluation. Failed evaluations
        have value ``-inf``.

    """

    def __init__(self, best_weights, best_value, trace):
        self.best_weights = best_weights
        self.best_value = best_value
        self.trace = trace

    @property
    def failures(self):
        """ Number of failed evaluations """
        return sum(1 for _, _, value in self.trace if value == -np.inf)

    def __iter__(self):
        return iter((self.best_weights, self.best_value, self.trace))

    def __repr__(self):
        return 'OptimizationResult(best_value=%r, evaluations=%d)' % (
            self.best_value, len(self.trace))


def _evaluate(objective, weights, iteration):
    """ Call the objective, mapping failures to -inf """
    try:
        value = float(objective(weights.copy()))
    except Exception as e:  # pylint: disable=W0703
        LOG.warning("Objective failed at iteration %d: %s", iteration, e)
        return -np.inf
    if math.isnan(value) or math.isinf(value):
        LOG.warning("Objective returned %r at iteration %d", value,
                    iteration)
        return -np.inf
    return value


def optimize(objective, config):
    """
    Maximize an objective over [0, 1]^N

    Parameters
    ----------
    objective : callable
        Takes a weight vector (:class:`numpy.ndarray`) and returns a float.
        Any exception it raises (other than interrupts) marks the point
        as failed.
    config : :class:`.BoConfig`

    Returns
    -------
    result : :class:`.OptimizationResult`
        Unpacks as ``(best_weights, best_value, trace)``

    """
    rng = config.random_state()
    trace = []
    best_weights, best_value = None, -np.inf
    xs, ys = [], []

    def record(weights):
        iteration = len(trace)
        value = _evaluate(objective, weights, iteration)
        weights = tuple(float(w) for w in weights)
        trace.append((iteration, weights, value))
        LOG.debug("Iteration %d: %s -> %r", iteration, weights, value)
        if value != -np.inf:
            xs.append(weights)
            ys.append(value)
        return weights, value

    for point in rng.uniform(0.0, 1.0, (config.init_points,
                                        config.dimension)):
        weights, value = record(point)
        if value > best_value:
            best_weights, best_value = weights, value

    for _ in range(config.steps):
        if xs:
            state = GpState.fit(xs, ys, config.kernel_params)
            point = suggest(state, config, rng)
        else:
            point = rng.uniform(0.0, 1.0, config.dimension)
        weights, value = record(point)
        if value > best_value:
            best_weights, best_value = weights, value

    LOG.info("Optimization finished: best %r after %d evaluations",
             best_value, len(trace))
    return OptimizationResult(best_weights, best_value, trace)
