# Copyright The gphedge Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Gaussian-process regression with an ARD squared-exponential kernel.

The kernel has unit amplitude, ``k(a, b) = exp(-0.5 * sum(((a - b) / theta) ** 2))``,
and the prior mean is zero. All linear algebra runs as float64 TensorFlow ops;
randomness always comes from a caller-provided ``numpy.random.Generator``.
"""
import collections
import math
import numpy as np
import tensorflow as tf
from scipy.stats import qmc
from tensorflow.python.platform import tf_logging as logging
from gphedge.python.errors import InvalidArgumentError, NumericalFailureError
from gphedge.python.utils import check_finite


DEFAULT_NOISE_VARIANCE = 1e-6
DEFAULT_FIT_STARTS = 64
DEFAULT_GOLDEN_ITERATIONS = 8
DEFAULT_GOLDEN_PASSES = 1

# diagonal jitter escalates x10 from 1e-10 up to 1e-4
_JITTER_SCHEDULE = [1e-10 * 10.0 ** k for k in range(7)]
_NEGATIVE_VARIANCE_TOLERANCE = 1e-6
_LOG_2PI = math.log(2.0 * math.pi)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def as_point(coords, dimension=None):
    point = np.array(check_finite('point', coords), dtype=np.float64).reshape(-1)
    if dimension is not None and point.size != dimension:
        raise InvalidArgumentError('point {} has dimension {}, expected {}'.format(
            point, point.size, dimension))
    return point


def as_points(points, dimension):
    points = np.array(check_finite('points', points), dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1) if dimension == 1 else points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != dimension:
        raise InvalidArgumentError('points of shape {} do not match dimension {}'.format(
            points.shape, dimension))
    return points


class BoxDomain:
    """The search space: finite lower and upper bounds on every coordinate."""

    def __init__(self, lower, upper):
        lower = np.array(check_finite('lower', lower), dtype=np.float64).reshape(-1)
        upper = np.array(check_finite('upper', upper), dtype=np.float64).reshape(-1)
        if lower.size < 1 or lower.shape != upper.shape:
            raise InvalidArgumentError('bounds {} and {} must be non-empty and of equal length'.format(
                lower, upper))
        if not np.all(lower < upper):
            raise InvalidArgumentError('lower bounds {} must be below upper bounds {}'.format(lower, upper))
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.lower = lower
        self.upper = upper

    @property
    def dimension(self):
        return self.lower.size

    @property
    def range(self):
        return self.upper - self.lower

    def contains(self, point):
        point = np.asarray(point, dtype=np.float64)
        return bool(np.all(self.lower <= point) and np.all(point <= self.upper))

    def clip(self, points):
        return np.clip(points, self.lower, self.upper)

    def axis_neighbors(self, points, fractions):
        """Compass neighbors at ``fraction * range`` along each axis, clipped to the box.

        A point of shape ``(d,)`` with a scalar fraction gives ``(2 d, d)``; points of
        shape ``(n, d)`` with ``n`` fractions give ``(n, 2 d, d)``. The first ``d`` rows
        step up along each axis, the last ``d`` step down.
        """
        points = np.asarray(points, dtype=np.float64)
        fractions = np.asarray(fractions, dtype=np.float64)
        directions = np.concatenate([np.eye(self.dimension), -np.eye(self.dimension)]) * self.range
        return self.clip(points[..., np.newaxis, :] + fractions[..., np.newaxis, np.newaxis] * directions)

    def uniform(self, num_points, rng):
        return self.clip(self.lower + rng.random((num_points, self.dimension)) * self.range)

    def latin_hypercube(self, num_points, rng):
        sampler = qmc.LatinHypercube(d=self.dimension, seed=rng)
        return qmc.scale(sampler.random(num_points), self.lower, self.upper)

    def __repr__(self):
        return 'BoxDomain(lower={}, upper={})'.format(list(self.lower), list(self.upper))


Observation = collections.namedtuple('Observation', ['x', 'y'])


class Dataset:
    """Observations in insertion order; index 0 is the first sample of a run."""

    def __init__(self, observations=(), dimension=None):
        points = []
        values = []
        for x, y in observations:
            x = as_point(x, dimension)
            dimension = x.size
            points.append(x)
            values.append(float(check_finite('observation value', y)))
        self.dimension = dimension
        width = 0 if dimension is None else dimension
        self._x = np.array(points, dtype=np.float64).reshape(len(points), width)
        self._y = np.array(values, dtype=np.float64)
        self._x.setflags(write=False)
        self._y.setflags(write=False)

    @classmethod
    def from_arrays(cls, x, y):
        x = np.asarray(x, dtype=np.float64)
        return cls(zip(x, np.asarray(y, dtype=np.float64).reshape(-1)), dimension=x.shape[-1])

    @property
    def observations(self):
        return [Observation(x, y) for x, y in zip(self._x, self._y)]

    @property
    def x(self):
        return self._x

    @property
    def y(self):
        return self._y

    def append(self, x, y):
        return Dataset(self.observations + [Observation(x, y)], dimension=self.dimension)

    def best(self):
        if not len(self):
            raise InvalidArgumentError('an empty dataset has no incumbent')
        index = int(np.argmax(self._y))
        return Observation(self._x[index], float(self._y[index]))

    def __len__(self):
        return self._y.size

    def __getitem__(self, index):
        return Observation(self._x[index], float(self._y[index]))

    def __iter__(self):
        return iter(self.observations)


class KernelParams(collections.namedtuple('KernelParams', ['theta', 'noise_variance'])):
    __slots__ = ()

    def __new__(cls, theta, noise_variance=DEFAULT_NOISE_VARIANCE):
        theta = np.array(check_finite('theta', theta), dtype=np.float64).reshape(-1)
        if theta.size < 1 or np.any(theta <= 0.0):
            raise InvalidArgumentError('length scales must be positive, got {}'.format(theta))
        noise_variance = float(check_finite('noise_variance', noise_variance))
        if noise_variance < 0.0:
            raise InvalidArgumentError('noise_variance must be non-negative, got {}'.format(noise_variance))
        theta.setflags(write=False)
        return super().__new__(cls, theta, noise_variance)

    @property
    def dimension(self):
        return self.theta.size


PosteriorGaussian = collections.namedtuple('PosteriorGaussian', ['mean', 'variance'])


class GPModel:
    """A GP conditioned on a dataset; immutable once built.

    ``factorization`` is the lower Cholesky factor of ``K + (noise + jitter) * I`` and
    ``alpha`` the solve of that system against the observed values. Both are None for
    the prior model of an empty dataset.
    """

    def __init__(self, dataset, params, factorization, alpha, jitter):
        self.dataset = dataset
        self.params = params
        self.factorization = factorization
        self.alpha = alpha
        self.jitter = jitter
        self._x = tf.constant(dataset.x, dtype=tf.float64) if len(dataset) else None

    @property
    def dimension(self):
        return self.params.dimension

    @property
    def is_prior(self):
        return self.factorization is None


def kernel_matrix(x1, x2, theta):
    """Gram block between the rows of ``x1`` (n, d) and ``x2`` (m, d)."""
    x1 = tf.convert_to_tensor(x1, dtype=tf.float64)
    x2 = tf.convert_to_tensor(x2, dtype=tf.float64)
    theta = tf.convert_to_tensor(theta, dtype=tf.float64)
    scaled = (x1[:, None, :] - x2[None, :, :]) / theta
    return tf.exp(-0.5 * tf.reduce_sum(tf.square(scaled), axis=-1))


def kernel_eval(xi, xj, params):
    xi = as_point(xi, params.dimension)
    xj = as_point(xj, params.dimension)
    return float(kernel_matrix(xi[None, :], xj[None, :], params.theta)[0, 0])


def _cholesky_with_jitter(matrix, what):
    eye = tf.eye(matrix.shape[-1], dtype=tf.float64)
    for jitter in _JITTER_SCHEDULE:
        try:
            factor = tf.linalg.cholesky(matrix + jitter * eye)
        except tf.errors.InvalidArgumentError:
            continue
        if bool(tf.reduce_all(tf.math.is_finite(factor))):
            if jitter > _JITTER_SCHEDULE[0]:
                logging.warning('factorized {} only after raising jitter to {:g}'.format(what, jitter))
            return factor, jitter
    raise NumericalFailureError('{} is not positive definite'.format(what), jitter=_JITTER_SCHEDULE[-1])


def _check_dimension(dataset, params):
    if dataset.dimension is not None and dataset.dimension != params.dimension:
        raise InvalidArgumentError('dataset has dimension {} but theta has {} entries'.format(
            dataset.dimension, params.dimension))


def _factorize(dataset, params):
    x = tf.constant(dataset.x, dtype=tf.float64)
    gram = kernel_matrix(x, x, params.theta)
    gram += params.noise_variance * tf.eye(len(dataset), dtype=tf.float64)
    factor, jitter = _cholesky_with_jitter(gram, 'Gram matrix of {} observations'.format(len(dataset)))
    y = tf.constant(dataset.y, dtype=tf.float64)[:, None]
    alpha = tf.linalg.cholesky_solve(factor, y)[:, 0]
    return factor, alpha, jitter


def build_model(dataset, params):
    _check_dimension(dataset, params)
    if not len(dataset):
        return GPModel(dataset, params, None, None, 0.0)
    factor, alpha, jitter = _factorize(dataset, params)
    return GPModel(dataset, params, factor, alpha, jitter)


def _clamp_variance(variance):
    if np.any(variance < -_NEGATIVE_VARIANCE_TOLERANCE):
        raise NumericalFailureError('predictive variance {:g} is negative beyond round-off'.format(
            float(np.min(variance))))
    return np.maximum(variance, 0.0)


def predict_batch(model, points):
    """Pointwise posterior at many points with a single triangular solve."""
    points = as_points(points, model.dimension)
    if model.is_prior:
        return PosteriorGaussian(np.zeros(len(points)), np.ones(len(points)))
    cross = kernel_matrix(model._x, points, model.params.theta)
    mean = tf.linalg.matvec(cross, model.alpha, transpose_a=True)
    v = tf.linalg.triangular_solve(model.factorization, cross, lower=True)
    variance = 1.0 - tf.reduce_sum(tf.square(v), axis=0)
    return PosteriorGaussian(mean.numpy(), _clamp_variance(variance.numpy()))


def predict(model, xstar):
    xstar = as_point(xstar, model.dimension)
    mean, variance = predict_batch(model, xstar[None, :])
    return PosteriorGaussian(float(mean[0]), float(variance[0]))


def joint_posterior(model, points):
    """Posterior mean vector and full covariance over a finite point set."""
    points = as_points(points, model.dimension)
    prior_cov = kernel_matrix(points, points, model.params.theta)
    if model.is_prior:
        return np.zeros(len(points)), prior_cov.numpy()
    cross = kernel_matrix(model._x, points, model.params.theta)
    mean = tf.linalg.matvec(cross, model.alpha, transpose_a=True)
    v = tf.linalg.triangular_solve(model.factorization, cross, lower=True)
    cov = prior_cov - tf.matmul(v, v, transpose_a=True)
    return mean.numpy(), (0.5 * (cov + tf.transpose(cov))).numpy()


def sample_posterior_batch(model, candidates, num_samples, rng):
    """``num_samples`` independent joint draws over ``candidates``, shape (num_samples, m)."""
    points = as_points(candidates, model.dimension)
    if not len(points):
        raise InvalidArgumentError('cannot sample over an empty candidate set')
    mean, cov = joint_posterior(model, points)
    factor, _ = _cholesky_with_jitter(cov, 'posterior covariance of {} candidates'.format(len(points)))
    normals = rng.standard_normal((num_samples, len(points)))
    return mean[None, :] + normals @ factor.numpy().T


def sample_posterior(model, candidates, rng):
    """One joint draw of the latent function over ``candidates``."""
    return sample_posterior_batch(model, candidates, 1, rng)[0]


def log_marginal_likelihood(dataset, params):
    _check_dimension(dataset, params)
    if not len(dataset):
        raise InvalidArgumentError('log marginal likelihood needs at least one observation')
    factor, alpha, _ = _factorize(dataset, params)
    data_fit = -0.5 * float(tf.tensordot(tf.constant(dataset.y, dtype=tf.float64), alpha, 1))
    log_det = float(tf.reduce_sum(tf.math.log(tf.linalg.diag_part(factor))))
    return data_fit - log_det - 0.5 * len(dataset) * _LOG_2PI


def _batched_log_marginal_likelihood(dataset, log_theta, noise):
    """Evidence for every row of ``log_theta`` (B, d) with noise ``noise`` (B,).

    All members are factorized together; members that fail fall back to the
    escalating-jitter path, and score -inf when that fails too.
    """
    x = tf.constant(dataset.x, dtype=tf.float64)
    y = tf.constant(dataset.y, dtype=tf.float64)
    theta = tf.exp(tf.constant(log_theta, dtype=tf.float64))
    num = len(dataset)
    scaled = (x[None, :, None, :] - x[None, None, :, :]) / theta[:, None, None, :]
    gram = tf.exp(-0.5 * tf.reduce_sum(tf.square(scaled), axis=-1))
    diag = tf.constant(noise + _JITTER_SCHEDULE[0], dtype=tf.float64)[:, None, None]
    gram += diag * tf.eye(num, dtype=tf.float64)[None, :, :]
    try:
        factor = tf.linalg.cholesky(gram)
    except tf.errors.InvalidArgumentError:
        factor = None
    if factor is not None:
        finite = tf.reduce_all(tf.math.is_finite(factor), axis=[1, 2]).numpy()
        rhs = tf.broadcast_to(y[None, :, None], [len(log_theta), num, 1])
        safe_factor = tf.where(finite[:, None, None], factor, tf.eye(num, dtype=tf.float64)[None])
        alpha = tf.linalg.cholesky_solve(safe_factor, rhs)[:, :, 0]
        data_fit = -0.5 * tf.reduce_sum(y[None, :] * alpha, axis=1)
        log_det = tf.reduce_sum(tf.math.log(tf.linalg.diag_part(safe_factor)), axis=1)
        values = (data_fit - log_det).numpy() - 0.5 * num * _LOG_2PI
    else:
        finite = np.zeros(len(log_theta), dtype=bool)
        values = np.empty(len(log_theta))
    for index in np.flatnonzero(~finite):
        try:
            values[index] = log_marginal_likelihood(dataset, KernelParams(np.exp(log_theta[index]), noise[index]))
        except NumericalFailureError:
            values[index] = -np.inf
    return values


def _log_bounds(bounds, dimension, what):
    bounds = np.array(check_finite(what, bounds), dtype=np.float64).reshape(dimension, 2)
    if np.any(bounds[:, 0] <= 0.0) or np.any(bounds[:, 0] > bounds[:, 1]):
        raise InvalidArgumentError('{} must be positive intervals, got {}'.format(what, bounds.tolist()))
    return np.log(bounds)


def _draw_starts(theta_bounds, noise_bounds, dimension, num_starts, rng):
    """Log-uniform random starts; the first thing ``fit_hyperparams`` draws from ``rng``."""
    log_theta_bounds = _log_bounds(theta_bounds, dimension, 'theta_bounds')
    low, high = log_theta_bounds[:, 0], log_theta_bounds[:, 1]
    log_theta = low + rng.random((num_starts, dimension)) * (high - low)
    noise_low, noise_high = (float(bound) for bound in check_finite('noise_bounds', noise_bounds))
    if noise_low == noise_high and noise_low >= 0.0:
        log_noise = None
        noise = np.full(num_starts, noise_low)
    else:
        (log_noise_bounds,) = _log_bounds([noise_low, noise_high], 1, 'noise_bounds')
        log_noise = log_noise_bounds[0] + rng.random(num_starts) * (log_noise_bounds[1] - log_noise_bounds[0])
        noise = np.exp(log_noise)
    return log_theta, log_theta_bounds, log_noise, noise


def fit_hyperparams(dataset, theta_bounds, noise_bounds, rng, num_starts=DEFAULT_FIT_STARTS,
                    passes=DEFAULT_GOLDEN_PASSES, iterations=DEFAULT_GOLDEN_ITERATIONS):
    """Maximizes the log marginal likelihood over length scales (and noise).

    Multi-start random search, log-uniform within ``theta_bounds`` (one
    ``(low, high)`` pair per dimension) and ``noise_bounds``; every start is then
    refined by coordinate-wise golden-section passes in log space, all starts in
    lockstep. A refinement is only kept when it improves its start, so the result
    is never worse than the best raw start. Equal noise bounds hold the noise fixed.
    """
    if len(dataset) < 2:
        raise InvalidArgumentError('fitting hyperparameters needs at least 2 observations, got {}'.format(
            len(dataset)))
    dimension = dataset.dimension
    log_theta, log_theta_bounds, log_noise, noise = _draw_starts(
        theta_bounds, noise_bounds, dimension, num_starts, rng)
    values = _batched_log_marginal_likelihood(dataset, log_theta, noise)
    if not np.any(np.isfinite(values)):
        raise NumericalFailureError('every one of {} hyperparameter starts failed to factorize'.format(num_starts),
                                    jitter=_JITTER_SCHEDULE[-1])

    coordinates = list(range(dimension)) + ([dimension] if log_noise is not None else [])
    for _ in range(passes):
        for coord in coordinates:
            if coord < dimension:
                low, high = log_theta_bounds[coord]
            else:
                low, high = np.log(noise_bounds)

            def objective(probe, coord=coord):
                probe_theta = log_theta.copy()
                probe_noise = noise
                if coord < dimension:
                    probe_theta[:, coord] = probe
                else:
                    probe_noise = np.exp(probe)
                return _batched_log_marginal_likelihood(dataset, probe_theta, probe_noise)

            if high <= low:
                continue
            best_probe, best_value = _golden_section(objective, low, high, len(values), iterations)
            improved = best_value > values
            values = np.where(improved, best_value, values)
            if coord < dimension:
                log_theta[:, coord] = np.where(improved, best_probe, log_theta[:, coord])
            else:
                noise = np.where(improved, np.exp(best_probe), noise)

    best = int(np.argmax(values))
    params = KernelParams(np.exp(log_theta[best]), noise[best])
    logging.debug('fitted theta={} noise={:g} (log evidence {:.6g}) on {} observations'.format(
        params.theta.tolist(), params.noise_variance, values[best], len(dataset)))
    return params


def _golden_section(objective, low, high, batch, iterations):
    """Lockstep golden-section maximization of ``objective`` on ``[low, high]``.

    Returns the best probe seen per batch member and its value.
    """
    a = np.full(batch, low)
    b = np.full(batch, high)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = objective(c)
    fd = objective(d)
    best_probe = np.where(fc >= fd, c, d)
    best_value = np.maximum(fc, fd)
    for _ in range(iterations):
        keep_left = fc >= fd
        a, b = np.where(keep_left, a, c), np.where(keep_left, d, b)
        new_c = np.where(keep_left, b - _INV_PHI * (b - a), d)
        new_d = np.where(keep_left, c, a + _INV_PHI * (b - a))
        probe = np.where(keep_left, new_c, new_d)
        value = objective(probe)
        fc, fd = np.where(keep_left, value, fd), np.where(keep_left, fc, value)
        c, d = new_c, new_d
        better = value > best_value
        best_probe = np.where(better, probe, best_probe)
        best_value = np.where(better, value, best_value)
    return best_probe, best_value
