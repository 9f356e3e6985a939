""" Gaussian-process regression with a Matern 5/2 kernel """
import logging
import math

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist

LOG = logging.getLogger(__name__)

NU = 2.5
SQRT5 = math.sqrt(5.0)
MIN_SIGNAL_VARIANCE = 1e-4
DEFAULT_NOISE_VARIANCE = 1e-6
DEFAULT_JITTER = 1e-10
MAX_JITTER = 1e-4


class IllConditionedError(ArithmeticError):

    """ Raised when the Gram matrix cannot be factored even with jitter """


class KernelParams(object):

    """
    Hyperparameters of the Matern 5/2 kernel

    Parameters
    ----------
    length_scale : float
        Positive length scale
    signal_variance : float
        Positive prior variance
    noise_variance : float, optional
        Observation noise added to the Gram diagonal (default 1e-6)
    jitter : float, optional
        Initial numerical floor on the diagonal (default 1e-10). It grows by
        a factor of 10 up to 1e-4 when the factorization fails.

    """

    def __init__(self, length_scale, signal_variance,
                 noise_variance=DEFAULT_NOISE_VARIANCE, jitter=DEFAULT_JITTER):
        self.length_scale = float(length_scale)
        self.signal_variance = float(signal_variance)
        self.noise_variance = float(noise_variance)
        self.jitter = float(jitter)
        if not self.length_scale > 0:
            raise ValueError("length_scale must be positive, got %r" %
                             length_scale)
        if not self.signal_variance > 0:
            raise ValueError("signal_variance must be positive, got %r" %
                             signal_variance)
        if not self.noise_variance >= 0:
            raise ValueError("noise_variance must be non-negative, got %r" %
                             noise_variance)
        if not self.jitter > 0:
            raise ValueError("jitter must be positive, got %r" % jitter)

    @property
    def nu(self):
        """ Smoothness of the kernel, fixed at 2.5 """
        return NU

    @classmethod
    def default_for(cls, dimension, observed_y=()):
        """
        Scale-aware defaults for a weight cube of a given dimension

        The length scale is ``0.25 * sqrt(dimension)`` and the signal variance
        is the variance of the observations, floored at 1e-4.

        """
        if dimension < 1:
            raise ValueError("dimension must be positive, got %r" % dimension)
        observed_y = np.asarray(observed_y, dtype=float)
        variance = float(np.var(observed_y)) if observed_y.size else 0.0
        return cls(0.25 * math.sqrt(dimension),
                   max(variance, MIN_SIGNAL_VARIANCE))

    def dump(self):
        """ Settings as a JSON-friendly dict """
        return {
            'kernel': 'matern',
            'nu': NU,
            'length_scale': self.length_scale,
            'signal_variance': self.signal_variance,
            'noise_variance': self.noise_variance,
            'jitter': self.jitter,
        }

    def __eq__(self, other):
        return isinstance(other, KernelParams) and self.dump() == other.dump()

    def __ne__(self, other):
        return not self.__eq__(other)

    __hash__ = None

    def __repr__(self):
        return ('KernelParams(length_scale=%r, signal_variance=%r, '
                'noise_variance=%r)' % (self.length_scale,
                                        self.signal_variance,
                                        self.noise_variance))


def _matern_from_distance(r, params):
    """ Kernel value(s) for Euclidean distance(s) r """
    scaled = SQRT5 * np.asarray(r, dtype=float) / params.length_scale
    return params.signal_variance * (1.0 + scaled + scaled ** 2 / 3.0) * \
        np.exp(-scaled)


def matern25(x1, x2, params):
    """
    Matern kernel with nu = 5/2 between two points

    Raises
    ------
    exc : ValueError
        If the points have different dimensions

    """
    x1 = np.asarray(x1, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x1.shape != x2.shape:
        raise ValueError("Dimension mismatch: %d != %d" % (len(x1), len(x2)))
    r = math.sqrt(float(np.sum((x1 - x2) ** 2)))
    return float(_matern_from_distance(r, params))


def _as_points(points, dimension=None):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1) if dimension == 1 else \
            points.reshape(1, -1)
    if points.ndim != 2:
        raise ValueError("Points must be a list of vectors")
    if dimension is not None and points.shape[1] != dimension:
        raise ValueError("Points have dimension %d, expected %d" %
                         (points.shape[1], dimension))
    return points


def cross_covariance(a, b, params):
    """ Kernel matrix between two sets of points """
    return _matern_from_distance(cdist(a, b, metric='euclidean'), params)


def gram(points, params, jitter=None):
    """
    Gram matrix of a set of points

    The diagonal carries ``noise_variance + jitter`` on top of the kernel.

    """
    points = _as_points(points)
    if points.shape[0] < 1:
        raise ValueError("gram needs at least one point")
    if jitter is None:
        jitter = params.jitter
    matrix = cross_covariance(points, points, params)
    matrix[np.diag_indices_from(matrix)] += params.noise_variance + jitter
    return matrix


class GpPosterior(object):

    """ Posterior mean and variance at one query point """

    def __init__(self, mean, variance):
        self.mean = float(mean)
        self.variance = max(float(variance), 0.0)

    @property
    def std(self):
        """ Standard deviation """
        return math.sqrt(self.variance)

    def __repr__(self):
        return 'GpPosterior(mean=%r, variance=%r)' % (self.mean,
                                                       self.variance)


class GpState(object):

    """
    Observed (weights, objective) pairs and the kernel that models them

    The state never changes after construction. Use
    :meth:`.with_observation` to get a new state with one more point.

    Parameters
    ----------
    observed_x : list
        Weight vectors, all of the same dimension
    observed_y : list
        One finite objective value per weight vector
    params : :class:`.KernelParams`

    """

    def __init__(self, observed_x, observed_y, params):
        observed_y = np.array(observed_y, dtype=float).ravel()
        if len(observed_y) == 0:
            raise ValueError("GpState needs at least one observation")
        observed_x = _as_points(observed_x)
        if observed_x.shape[0] != len(observed_y):
            raise ValueError("Got %d points for %d values" %
                             (observed_x.shape[0], len(observed_y)))
        if not np.all(np.isfinite(observed_y)):
            raise ValueError("Observed values must be finite")
        observed_x.flags.writeable = False
        observed_y.flags.writeable = False
        self.observed_x = observed_x
        self.observed_y = observed_y
        self.params = params
        self._factor = None
        self._alpha = None

    @classmethod
    def fit(cls, observed_x, observed_y, params=None):
        """ Build a state, deriving default kernel params from the data """
        observed_x = _as_points(observed_x)
        if params is None:
            params = KernelParams.default_for(observed_x.shape[1],
                                              observed_y)
        return cls(observed_x, observed_y, params)

    @property
    def dimension(self):
        """ Dimension of the weight vectors """
        return self.observed_x.shape[1]

    @property
    def prior_mean(self):
        """ The sample mean of the observations """
        return float(np.mean(self.observed_y))

    def __len__(self):
        return len(self.observed_y)

    def with_observation(self, x, y):
        """ A new state with one more observation and the same kernel """
        x = _as_points([np.asarray(x, dtype=float).ravel()], self.dimension)
        return GpState(np.vstack([self.observed_x, x]),
                       np.append(self.observed_y, float(y)), self.params)

    def factorization(self):
        """
        Cholesky factor of the Gram matrix and the centered weights

        The jitter escalates by a factor of 10 on failure, up to 1e-4.

        Raises
        ------
        exc : :class:`.IllConditionedError`

        """
        if self._factor is None:
            jitter = self.params.jitter
            while True:
                matrix = gram(self.observed_x, self.params, jitter)
                try:
                    factor = linalg.cho_factor(matrix, lower=True)
                    break
                except linalg.LinAlgError:
                    if jitter * 10 > MAX_JITTER * (1 + 1e-9):
                        raise IllConditionedError(
                            "Gram matrix of %d observations is not positive "
                            "definite with jitter %g" % (len(self), jitter))
                    jitter *= 10
                    LOG.debug("Raising GP jitter to %g", jitter)
            centered = self.observed_y - self.prior_mean
            self._alpha = linalg.cho_solve(factor, centered)
            self._factor = factor
        return self._factor, self._alpha


def posterior_many(state, queries):
    """
    Posterior means and variances at many query points

    Returns
    -------
    means : :class:`numpy.ndarray`
    variances : :class:`numpy.ndarray`
        Clamped at 0

    """
    queries = _as_points(queries, state.dimension)
    factor, alpha = state.factorization()
    k_star = cross_covariance(state.observed_x, queries, state.params)
    means = state.prior_mean + k_star.T.dot(alpha)
    solved = linalg.cho_solve(factor, k_star)
    variances = state.params.signal_variance - np.sum(k_star * solved, axis=0)
    return means, np.maximum(variances, 0.0)


def posterior(state, query):
    """
    Posterior at one query point

    Parameters
    ----------
    state : :class:`.GpState`
    query : array_like
        Weight vector with the state's dimension

    Returns
    -------
    posterior : :class:`.GpPosterior`

    """
    query = np.asarray(query, dtype=float).ravel()
    if len(query) != state.dimension:
        raise ValueError("Query has dimension %d, expected %d" %
                         (len(query), state.dimension))
    means, variances = posterior_many(state, query.reshape(1, -1))
    return GpPosterior(means[0], variances[0])
