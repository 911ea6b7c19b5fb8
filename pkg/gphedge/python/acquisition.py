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
"""Closed-form acquisition functions over a Gaussian posterior.

Every function accepts a ``PosteriorGaussian`` whose fields are either scalars or
equal-length vectors and returns a float or a numpy vector accordingly. The
conventions follow maximization: larger acquisition values are more desirable.
"""
import collections
import math
import numpy as np
import tensorflow as tf
from gphedge.python.errors import InvalidArgumentError, UnsupportedDispatchError
from gphedge.python.utils import check_finite


PI = 'pi'
EI = 'ei'
UCB = 'ucb'
EIPI = 'eipi'
GPUCB = 'gpucb'
THOMPSON = 'thompson'
KINDS = (PI, EI, UCB, EIPI, GPUCB, THOMPSON)
_KIND_ALIASES = {'gp-ucb': GPUCB, 'gp_ucb': GPUCB, 'ei-pi': EIPI, 'ei_pi': EIPI, 'ts': THOMPSON}

DEFAULT_XI = 0.01
DEFAULT_LAMBDA = 1.0
DEFAULT_DELTA = 0.1
DEFAULT_NU = 0.2
DEFAULT_THOMPSON_CANDIDATES = 500

# fields consulted by each kind, in label order
_RELEVANT_FIELDS = {
    PI: ('xi',),
    EI: ('xi',),
    UCB: ('lambda_',),
    EIPI: ('xi', 'lambda_'),
    GPUCB: ('delta', 'nu'),
    THOMPSON: ('thompson_candidates',),
}
_TEXT_KEYS = {'xi': 'xi', 'eps': 'xi', 'lambda': 'lambda_', 'lam': 'lambda_', 'delta': 'delta',
              'nu': 'nu', 'candidates': 'thompson_candidates', 'thompson_candidates': 'thompson_candidates'}

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class AcquisitionSpec(collections.namedtuple(
        'AcquisitionSpec', ['kind', 'xi', 'lambda_', 'delta', 'nu', 'thompson_candidates'])):
    """Which acquisition function an arm uses, and its parameters."""
    __slots__ = ()

    def __new__(cls, kind, xi=DEFAULT_XI, lambda_=DEFAULT_LAMBDA, delta=DEFAULT_DELTA, nu=DEFAULT_NU,
                thompson_candidates=DEFAULT_THOMPSON_CANDIDATES):
        kind = _KIND_ALIASES.get(str(kind).lower(), str(kind).lower())
        if kind not in KINDS:
            raise InvalidArgumentError('unknown acquisition kind "{}"; expected one of {}'.format(kind, KINDS))
        xi = float(check_finite('xi', xi))
        lambda_ = float(check_finite('lambda', lambda_))
        delta = float(check_finite('delta', delta))
        nu = float(check_finite('nu', nu))
        if xi < 0.0:
            raise InvalidArgumentError('xi must be non-negative, got {}'.format(xi))
        if lambda_ < 0.0:
            raise InvalidArgumentError('lambda must be non-negative, got {}'.format(lambda_))
        if not 0.0 < delta < 1.0:
            raise InvalidArgumentError('delta must lie in (0, 1), got {}'.format(delta))
        if nu <= 0.0:
            raise InvalidArgumentError('nu must be positive, got {}'.format(nu))
        if int(thompson_candidates) != thompson_candidates or thompson_candidates < 1:
            raise InvalidArgumentError('thompson_candidates must be a positive integer, got {}'.format(
                thompson_candidates))
        return super().__new__(cls, kind, xi, lambda_, delta, nu, int(thompson_candidates))

    @classmethod
    def parse(cls, text):
        """Parses ``kind[:key=value[,key=value...]]``, e.g. ``gpucb:delta=0.1,nu=0.2``."""
        kind, _, params = text.strip().partition(':')
        kwargs = {}
        for item in filter(None, (part.strip() for part in params.split(','))):
            key, sep, value = item.partition('=')
            field = _TEXT_KEYS.get(key.strip().lower())
            if not sep or field is None:
                raise InvalidArgumentError('cannot parse "{}" in acquisition spec "{}"'.format(item, text))
            try:
                kwargs[field] = float(value)
            except ValueError:
                raise InvalidArgumentError('"{}" is not a number in acquisition spec "{}"'.format(value, text))
        return cls(kind, **kwargs)

    @property
    def label(self):
        params = ','.join('{}={:g}'.format(name.rstrip('_'), getattr(self, name))
                          for name in _RELEVANT_FIELDS[self.kind])
        return '{}:{}'.format(self.kind, params)


class IncumbentContext(collections.namedtuple('IncumbentContext', ['f_plus', 't', 'd'])):
    """The best value observed so far, the iteration index and the domain dimension."""
    __slots__ = ()

    def __new__(cls, f_plus, t=1, d=1):
        f_plus = float(check_finite('f_plus', f_plus))
        if int(t) != t or t < 1 or int(d) != d or d < 1:
            raise InvalidArgumentError('t and d must be positive integers, got t={} d={}'.format(t, d))
        return super().__new__(cls, f_plus, int(t), int(d))


def _posterior_tensors(post):
    mean = check_finite('posterior mean', post.mean)
    variance = check_finite('posterior variance', post.variance)
    if np.any(variance < 0.0):
        raise InvalidArgumentError('posterior variance must be non-negative, got {}'.format(variance))
    return tf.constant(mean, dtype=tf.float64), tf.constant(variance, dtype=tf.float64)


def _to_host(value):
    value = value.numpy()
    return float(value) if np.ndim(value) == 0 else value


def _non_negative(name, value):
    value = float(check_finite(name, value))
    if value < 0.0:
        raise InvalidArgumentError('{} must be non-negative, got {}'.format(name, value))
    return value


def normal_cdf(z):
    return 0.5 * tf.math.erfc(-z / _SQRT2)


def normal_pdf(z):
    return _INV_SQRT_2PI * tf.exp(-0.5 * tf.square(z))


def _standardized_excess(post, ctx, xi):
    mean, variance = _posterior_tensors(post)
    xi = _non_negative('xi', xi)
    sigma = tf.sqrt(variance)
    excess = mean - ctx.f_plus - xi
    positive = sigma > 0.0
    z = excess / tf.where(positive, sigma, tf.ones_like(sigma))
    return excess, sigma, z, positive


def pi_value(post, ctx, xi):
    excess, _, z, positive = _standardized_excess(post, ctx, xi)
    # at sigma == 0 the CDF limit is the indicator of strict improvement
    degenerate = tf.where(excess > 0.0, tf.ones_like(excess), tf.zeros_like(excess))
    return _to_host(tf.where(positive, normal_cdf(z), degenerate))


def ei_value(post, ctx, xi):
    excess, sigma, z, positive = _standardized_excess(post, ctx, xi)
    value = excess * normal_cdf(z) + sigma * normal_pdf(z)
    return _to_host(tf.where(positive, tf.maximum(value, 0.0), tf.zeros_like(value)))


def ucb_value(post, lambda_):
    mean, variance = _posterior_tensors(post)
    lambda_ = _non_negative('lambda', lambda_)
    return _to_host(mean + lambda_ * tf.sqrt(variance))


def gp_ucb_beta(t, d, delta, nu):
    """``beta_t = 2 * nu * log(t ** (d / 2 + 2) * pi ** 2 / (3 * delta))``, increasing in t."""
    if int(t) != t or t < 1 or int(d) != d or d < 1:
        raise InvalidArgumentError('t and d must be positive integers, got t={} d={}'.format(t, d))
    if not 0.0 < delta < 1.0:
        raise InvalidArgumentError('delta must lie in (0, 1), got {}'.format(delta))
    if not nu > 0.0:
        raise InvalidArgumentError('nu must be positive, got {}'.format(nu))
    log_argument = (d / 2.0 + 2.0) * math.log(t) + math.log(math.pi ** 2 / (3.0 * delta))
    return nu * 2.0 * log_argument


def gp_ucb_value(post, beta_t):
    beta_t = _non_negative('beta_t', beta_t)
    return ucb_value(post, math.sqrt(beta_t))


def eipi_value(post, ctx, xi, lambda_):
    lambda_ = _non_negative('lambda', lambda_)
    return pi_value(post, ctx, xi) + lambda_ * ei_value(post, ctx, xi)


def acquisition_value(spec, post, ctx, beta_schedule=gp_ucb_beta):
    """Evaluates ``spec`` on ``post``; ``beta_schedule(t, d, delta, nu)`` feeds GP-UCB."""
    if spec.kind == PI:
        return pi_value(post, ctx, spec.xi)
    if spec.kind == EI:
        return ei_value(post, ctx, spec.xi)
    if spec.kind == UCB:
        return ucb_value(post, spec.lambda_)
    if spec.kind == EIPI:
        return eipi_value(post, ctx, spec.xi, spec.lambda_)
    if spec.kind == GPUCB:
        return gp_ucb_value(post, beta_schedule(ctx.t, ctx.d, spec.delta, spec.nu))
    raise UnsupportedDispatchError('{} is a set-level procedure and has no pointwise value; '
                                   'use optimizer.nominate instead'.format(spec.label))
