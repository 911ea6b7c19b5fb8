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
"""Inner maximization: each acquisition function's nominee over the box domain."""
import collections
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import acquisition
from gphedge.python import gp
from gphedge.python.errors import InvalidArgumentError


DEFAULT_CANDIDATES_PER_DIM = 1000
DEFAULT_LOCAL_STEPS = 20
DEFAULT_LOCAL_SHRINK = 0.5


class ProposalBudget(collections.namedtuple('ProposalBudget', ['n_candidates', 'n_local_steps', 'local_shrink'])):
    __slots__ = ()

    def __new__(cls, n_candidates, n_local_steps=DEFAULT_LOCAL_STEPS, local_shrink=DEFAULT_LOCAL_SHRINK):
        if int(n_candidates) != n_candidates or n_candidates < 1:
            raise InvalidArgumentError('n_candidates must be a positive integer, got {}'.format(n_candidates))
        if int(n_local_steps) != n_local_steps or n_local_steps < 0:
            raise InvalidArgumentError('n_local_steps must be a non-negative integer, got {}'.format(
                n_local_steps))
        if not 0.0 < local_shrink < 1.0:
            raise InvalidArgumentError('local_shrink must lie in (0, 1), got {}'.format(local_shrink))
        return super().__new__(cls, int(n_candidates), int(n_local_steps), float(local_shrink))

    @classmethod
    def for_domain(cls, domain):
        return cls(DEFAULT_CANDIDATES_PER_DIM * domain.dimension)


def _check_domain(model, domain):
    if domain.dimension != model.dimension:
        raise InvalidArgumentError('domain dimension {} does not match model dimension {}'.format(
            domain.dimension, model.dimension))


def _score(model, spec, ctx, points):
    return np.asarray(acquisition.acquisition_value(spec, gp.predict_batch(model, points), ctx))


def propose(model, spec, domain, ctx, budget, rng):
    """Random multi-start search followed by axis-aligned pattern search.

    Candidates are ``rng.random((n_candidates, d))`` scaled into the box; the first
    maximum wins ties. Refinement step ``k`` (1-based) probes all ``2 d`` axis
    neighbors at distance ``local_shrink ** k * range`` (clipped to the box) and moves
    only on strict improvement, so the result never scores below the best candidate.
    """
    _check_domain(model, domain)
    candidates = domain.uniform(budget.n_candidates, rng)
    scores = _score(model, spec, ctx, candidates)
    best = int(np.argmax(scores))
    point, value = candidates[best], scores[best]
    for k in range(1, budget.n_local_steps + 1):
        neighbors = domain.axis_neighbors(point, budget.local_shrink ** k)
        neighbor_scores = _score(model, spec, ctx, neighbors)
        index = int(np.argmax(neighbor_scores))
        if neighbor_scores[index] > value:
            point, value = neighbors[index], neighbor_scores[index]
    logging.debug('{} nominee {} scores {:.6g}'.format(spec.label, point.tolist(), float(value)))
    return point


def propose_thompson(model, domain, n_candidates, rng):
    """Argmax of one joint posterior draw over ``n_candidates`` uniform points."""
    _check_domain(model, domain)
    if int(n_candidates) != n_candidates or n_candidates < 1:
        raise InvalidArgumentError('n_candidates must be a positive integer, got {}'.format(n_candidates))
    candidates = domain.uniform(int(n_candidates), rng)
    draw = gp.sample_posterior(model, candidates, rng)
    return candidates[int(np.argmax(draw))]


def propose_thompson_batch(model, domain, n_candidates, batch_size, rng):
    """Parallel Thompson sampling: one independent joint draw per batch member.

    The draws share a single candidate set, so the posterior covariance is
    factorized once.
    """
    _check_domain(model, domain)
    if int(batch_size) != batch_size or batch_size < 1:
        raise InvalidArgumentError('batch_size must be a positive integer, got {}'.format(batch_size))
    if int(n_candidates) != n_candidates or n_candidates < 1:
        raise InvalidArgumentError('n_candidates must be a positive integer, got {}'.format(n_candidates))
    candidates = domain.uniform(int(n_candidates), rng)
    draws = gp.sample_posterior_batch(model, candidates, int(batch_size), rng)
    return [candidates[int(np.argmax(draw))] for draw in draws]


def nominate(model, spec, domain, ctx, budget, rng):
    if spec.kind == acquisition.THOMPSON:
        return propose_thompson(model, domain, spec.thompson_candidates, rng)
    return propose(model, spec, domain, ctx, budget, rng)
