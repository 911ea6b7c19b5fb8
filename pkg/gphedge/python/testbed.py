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
"""Benchmark objectives with known optima, the gap metric and regret traces.

Branin and Hartmann are standard minimization benchmarks; they are negated here so
every objective in the package is maximized.
"""
import collections
import math
import threading
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import gp
from gphedge.python.errors import ConfigError, DegenerateStartError, DomainError, InvalidArgumentError
from gphedge.python.utils import check_finite


_SELF_CHECK_TOLERANCE = 1e-4
_KNOWN_POINT_TOLERANCE = 1e-6
_GRID_POINTS_PER_DIM = 301
_GRID_POLISH_STARTS = 16
_ORACLE_STARTS = 10000
_ORACLE_MAX_ITERATIONS = 400
_ORACLE_MIN_STEP = 1e-9


class TestFunction:
    """A named black-box objective on a box with its known maximum.

    Calling the instance evaluates a single point and returns a float;
    ``evaluate_batch`` maps an ``(n, d)`` array to ``n`` values. Both raise
    ``DomainError`` for points outside the box.
    """

    __test__ = False

    def __init__(self, name, domain, batch_fn, known_opt_value, known_opt_points):
        self.name = name
        self.domain = domain
        self._batch_fn = batch_fn
        self.known_opt_value = float(known_opt_value)
        self.known_opt_points = [gp.as_point(p, domain.dimension) for p in known_opt_points]

    @property
    def dimension(self):
        return self.domain.dimension

    def evaluate_batch(self, points):
        points = gp.as_points(points, self.dimension)
        outside = ~np.all((self.domain.lower <= points) & (points <= self.domain.upper), axis=1)
        if np.any(outside):
            raise DomainError('{} is defined on {}; got {}'.format(
                self.name, self.domain, points[np.argmax(outside)].tolist()))
        return self._batch_fn(points)

    def evaluate(self, point):
        return float(self.evaluate_batch(gp.as_point(point, self.dimension).reshape(1, -1))[0])

    __call__ = evaluate

    def __repr__(self):
        return 'TestFunction({}, d={})'.format(self.name, self.dimension)


def _branin_batch(points):
    x1, x2 = points[:, 0], points[:, 1]
    b = 5.1 / (4.0 * math.pi ** 2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    value = (x2 - b * x1 ** 2 + c * x1 - 6.0) ** 2 + 10.0 * (1.0 - t) * np.cos(x1) + 10.0
    return -value


_HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array([
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
])
_HARTMANN3_P = 1e-4 * np.array([
    [3689, 1170, 2673],
    [4699, 4387, 7470],
    [1091, 8732, 5547],
    [381, 5743, 8828],
])
_HARTMANN6_A = np.array([
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
])
_HARTMANN6_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])


def _hartmann_batch(a, p):
    def batch_fn(points):
        # (n, 4, d) squared distances to the four centers
        inner = np.sum(a * (points[:, np.newaxis, :] - p) ** 2, axis=-1)
        return np.sum(_HARTMANN_ALPHA * np.exp(-inner), axis=-1)
    return batch_fn


def _make_branin():
    return TestFunction(
        'branin', gp.BoxDomain([-5.0, 0.0], [10.0, 15.0]), _branin_batch,
        known_opt_value=-0.397887357729738,
        known_opt_points=[[-math.pi, 12.275], [math.pi, 2.275], [3.0 * math.pi, 2.475]])


def _make_hartmann3():
    return TestFunction(
        'hartmann3', gp.BoxDomain(np.zeros(3), np.ones(3)), _hartmann_batch(_HARTMANN3_A, _HARTMANN3_P),
        known_opt_value=3.86278214782076,
        known_opt_points=[[0.114614, 0.555649, 0.852547]])


def _make_hartmann6():
    return TestFunction(
        'hartmann6', gp.BoxDomain(np.zeros(6), np.ones(6)), _hartmann_batch(_HARTMANN6_A, _HARTMANN6_P),
        known_opt_value=3.32236801141551,
        known_opt_points=[[0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573]])


def branin(p):
    return get_test_function('branin').evaluate(p)


def hartmann3(p):
    return get_test_function('hartmann3').evaluate(p)


def hartmann6(p):
    return get_test_function('hartmann6').evaluate(p)


def pattern_search_batch(batch_fn, starts, domain, max_iterations=_ORACLE_MAX_ITERATIONS,
                         min_step=_ORACLE_MIN_STEP):
    """Compass search from many starts at once.

    Each start keeps its own step, initially a quarter of the range; a start moves to
    its best axis neighbor on strict improvement and halves its step otherwise.
    Returns the final points and their values.
    """
    points = domain.clip(np.array(starts, dtype=np.float64))
    values = batch_fn(points)
    steps = np.full(len(points), 0.25)
    d = domain.dimension
    for _ in range(max_iterations):
        active = steps * np.max(domain.range) > min_step
        if not np.any(active):
            break
        neighbors = domain.axis_neighbors(points[active], steps[active])
        neighbor_values = batch_fn(neighbors.reshape(-1, d)).reshape(len(neighbors), 2 * d)
        best = np.argmax(neighbor_values, axis=1)
        best_values = neighbor_values[np.arange(len(best)), best]
        improved = best_values > values[active]
        index = np.flatnonzero(active)
        points[index[improved]] = neighbors[improved, best[improved]]
        values[index[improved]] = best_values[improved]
        steps[index[~improved]] *= 0.5
    return points, values


def oracle_maximum(function, rng=None):
    """Brute-force maximum of the implemented formula.

    A dense grid polished by compass search for ``d <= 2``; a ``10**4``-start compass
    search otherwise.
    """
    domain = function.domain
    if domain.dimension <= 2:
        axes = [np.linspace(lo, hi, _GRID_POINTS_PER_DIM) for lo, hi in zip(domain.lower, domain.upper)]
        grid = np.stack([axis.reshape(-1) for axis in np.meshgrid(*axes, indexing='ij')], axis=1)
        grid_values = function._batch_fn(grid)
        starts = grid[np.argsort(-grid_values)[:_GRID_POLISH_STARTS]]
    else:
        rng = rng or np.random.default_rng(0)
        starts = domain.uniform(_ORACLE_STARTS, rng)
    points, values = pattern_search_batch(function._batch_fn, starts, domain)
    best = int(np.argmax(values))
    return points[best], float(values[best])


def self_check(function):
    """Returns a list of problems with ``function``'s registered optimum; empty if it passes."""
    problems = []
    for point in function.known_opt_points:
        if not function.domain.contains(point):
            problems.append('known optimizer {} lies outside {}'.format(point.tolist(), function.domain))
            continue
        value = function.evaluate(point)
        if abs(value - function.known_opt_value) > _KNOWN_POINT_TOLERANCE:
            problems.append('value {:.9f} at known optimizer {} differs from {:.9f}'.format(
                value, point.tolist(), function.known_opt_value))
    _, oracle_value = oracle_maximum(function)
    if abs(oracle_value - function.known_opt_value) > _SELF_CHECK_TOLERANCE:
        problems.append('oracle maximum {:.9f} differs from registered {:.9f}'.format(
            oracle_value, function.known_opt_value))
    return problems


_FACTORIES = collections.OrderedDict([
    ('branin', _make_branin),
    ('hartmann3', _make_hartmann3),
    ('hartmann6', _make_hartmann6),
])
_REGISTRY = {}
_REGISTRY_LOCK = threading.Lock()


def registered_names():
    return list(_FACTORIES)


def get_test_function(name):
    """Looks up a benchmark by name, building and self-checking it on first use."""
    key = str(name).lower()
    if key not in _FACTORIES:
        raise ConfigError('unknown test function "{}"; choose from {}'.format(name, registered_names()))
    with _REGISTRY_LOCK:
        if key not in _REGISTRY:
            function = _FACTORIES[key]()
            problems = self_check(function)
            if problems:
                raise ConfigError('refusing to register {}: {}'.format(key, '; '.join(problems)))
            logging.debug('registered test function {}'.format(function))
            _REGISTRY[key] = function
        return _REGISTRY[key]


def gap_metric(f_best_t, f_first, f_opt):
    """Normalized improvement ``(f_best_t - f_first) / (f_opt - f_first)``, clamped to [0, 1]."""
    f_best_t, f_first, f_opt = (float(check_finite(name, value)) for name, value in
                                (('f_best_t', f_best_t), ('f_first', f_first), ('f_opt', f_opt)))
    if not f_opt > f_first:
        raise DegenerateStartError('the first sample {} already reaches the optimum {}'.format(f_first, f_opt))
    return min(1.0, max(0.0, (f_best_t - f_first) / (f_opt - f_first)))


class GapTrace(collections.namedtuple('GapTrace', ['values'])):
    __slots__ = ()

    def last(self, num_iterations):
        return self.values[len(self.values) - num_iterations:]


def gap_trace(dataset, f_opt):
    """Gap after every observation of a run; the first entry is 0."""
    if not len(dataset):
        raise InvalidArgumentError('a gap trace needs at least one observation')
    incumbents = np.maximum.accumulate(dataset.y)
    return GapTrace(np.array([gap_metric(f_best, dataset.y[0], f_opt) for f_best in incumbents]))


class RegretTrace(collections.namedtuple('RegretTrace', ['instantaneous', 'cumulative'])):
    __slots__ = ()

    def last(self, num_iterations):
        """Regret of the last ``num_iterations`` observations, accumulated from zero."""
        instantaneous = self.instantaneous[len(self.instantaneous) - num_iterations:]
        return RegretTrace(instantaneous, np.cumsum(instantaneous))


def regret_traces(dataset, f_opt):
    instantaneous = np.maximum(0.0, float(f_opt) - np.asarray(dataset.y, dtype=np.float64))
    return RegretTrace(instantaneous, np.cumsum(instantaneous))
