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
"""Portfolio allocation over acquisition functions: Hedge, GP-Hedge and Exp3."""
import collections
import math
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import acquisition
from gphedge.python import gp
from gphedge.python import optimizer
from gphedge.python.errors import EvaluationError, InvalidArgumentError
from gphedge.python.surrogate import INITIAL_THETA_FRACTION, Surrogate
from gphedge.python.utils import check_finite


HEDGE = 'hedge'
EXP3 = 'exp3'
SINGLE = 'single'

DEFAULT_ETA = 1.0
DEFAULT_EXP3_MIX = 0.1
DEFAULT_INITIAL_POINTS = 2


class Strategy(collections.namedtuple('Strategy', ['kind', 'arm'])):
    """HEDGE, EXP3, or SINGLE with the index of the only arm ever selected."""
    __slots__ = ()

    def __new__(cls, kind, arm=None):
        kind = str(kind).lower()
        if kind not in (HEDGE, EXP3, SINGLE):
            raise InvalidArgumentError('unknown strategy "{}"'.format(kind))
        if kind == SINGLE:
            if arm is None or int(arm) != arm or arm < 0:
                raise InvalidArgumentError('single strategy needs a non-negative arm index, got {}'.format(arm))
            arm = int(arm)
        elif arm is not None:
            raise InvalidArgumentError('strategy {} takes no arm'.format(kind))
        return super().__new__(cls, kind, arm)

    @classmethod
    def parse(cls, text, specs):
        """Parses ``hedge``, ``exp3`` or ``single:<arm>``.

        ``<arm>`` is an index into ``specs``, a spec label such as ``ei:xi=0.01``, or a
        bare kind such as ``ei`` when exactly one spec has that kind.
        """
        kind, _, arm = text.strip().partition(':')
        if kind.lower() != SINGLE:
            return cls(kind)
        if arm.isdigit():
            return cls(SINGLE, int(arm))
        labels = [spec.label for spec in specs]
        if ':' in arm or arm not in acquisition.KINDS:
            wanted = acquisition.AcquisitionSpec.parse(arm).label
            matches = [index for index, label in enumerate(labels) if label == wanted]
        else:
            matches = [index for index, spec in enumerate(specs) if spec.kind == arm]
        if len(matches) != 1:
            raise InvalidArgumentError('"{}" must name exactly one of the portfolio arms {}'.format(arm, labels))
        return cls(SINGLE, matches[0])

    def label(self, specs):
        if self.kind == SINGLE:
            return '{}:{}'.format(SINGLE, specs[self.arm].label)
        return self.kind


class PortfolioState(collections.namedtuple('PortfolioState', ['gains', 'eta', 'exp3_mix', 'strategy'])):
    __slots__ = ()

    def __new__(cls, gains, eta=DEFAULT_ETA, exp3_mix=DEFAULT_EXP3_MIX, strategy=Strategy(HEDGE)):
        gains = np.array(check_finite('gains', gains), dtype=np.float64).reshape(-1)
        if not gains.size:
            raise InvalidArgumentError('a portfolio needs at least one arm')
        if not eta > 0.0:
            raise InvalidArgumentError('eta must be positive, got {}'.format(eta))
        if not 0.0 <= exp3_mix <= 1.0:
            raise InvalidArgumentError('exp3_mix must lie in [0, 1], got {}'.format(exp3_mix))
        if strategy.kind == SINGLE and strategy.arm >= gains.size:
            raise InvalidArgumentError('single arm {} is out of range for {} arms'.format(strategy.arm, gains.size))
        gains.setflags(write=False)
        return super().__new__(cls, gains, float(eta), float(exp3_mix), strategy)

    @classmethod
    def initial(cls, num_arms, eta=DEFAULT_ETA, exp3_mix=DEFAULT_EXP3_MIX, strategy=Strategy(HEDGE)):
        return cls(np.zeros(num_arms), eta, exp3_mix, strategy)

    @property
    def num_arms(self):
        return self.gains.size


NomineeSet = collections.namedtuple('NomineeSet', ['nominees', 'rewards'])

HedgeStep = collections.namedtuple('HedgeStep', [
    'state', 'dataset', 'chosen', 'nominees', 'probabilities', 'y', 'nominee_stddev', 'beta'])


def hedge_probabilities(gains, eta):
    """``p(i) = exp(eta * g_i) / sum_l exp(eta * g_l)``, shifted by ``max(g)`` first."""
    gains = check_finite('gains', gains).reshape(-1)
    if not gains.size:
        raise InvalidArgumentError('gains must not be empty')
    if not eta > 0.0:
        raise InvalidArgumentError('eta must be positive, got {}'.format(eta))
    weights = np.exp(eta * (gains - np.max(gains)))
    return weights / np.sum(weights)


def exp3_probabilities(gains, eta, mix):
    if not 0.0 <= mix <= 1.0:
        raise InvalidArgumentError('mix must lie in [0, 1], got {}'.format(mix))
    hedge = hedge_probabilities(gains, eta)
    return (1.0 - mix) * hedge + mix / hedge.size


def select_nominee(probs, rng):
    """Inverse-CDF categorical draw; a single arm is returned without drawing."""
    probs = check_finite('probabilities', probs).reshape(-1)
    if not probs.size or np.any(probs < 0.0) or abs(np.sum(probs) - 1.0) > 1e-9:
        raise InvalidArgumentError('{} is not a probability vector'.format(probs.tolist()))
    if probs.size == 1:
        return 0
    cdf = np.cumsum(probs)
    index = int(np.searchsorted(cdf, rng.random() * cdf[-1], side='right'))
    return min(index, probs.size - 1)


def compute_rewards(model_after_update, nominees):
    return gp.predict_batch(model_after_update, np.asarray(nominees)).mean


def update_gains(state, rewards, chosen):
    rewards = check_finite('rewards', rewards).reshape(-1)
    if rewards.size != state.num_arms:
        raise InvalidArgumentError('expected {} rewards, got {}'.format(state.num_arms, rewards.size))
    if int(chosen) != chosen or not 0 <= chosen < state.num_arms:
        raise InvalidArgumentError('chosen arm {} is out of range for {} arms'.format(chosen, state.num_arms))
    gains = np.array(state.gains)
    if state.strategy.kind == HEDGE:
        gains += rewards
    elif state.strategy.kind == EXP3:
        # Hedge probability before mixing, floored at the mixing share mix / N
        p_hat = hedge_probabilities(state.gains, state.eta)
        p_chosen = max(p_hat[chosen], state.exp3_mix / state.num_arms)
        if not p_chosen > 0.0:
            raise InvalidArgumentError('arm {} was chosen with probability {}'.format(chosen, p_chosen))
        gains[chosen] += rewards[chosen] / p_chosen
    return state._replace(gains=gains)


def _strategy_probabilities(state):
    if state.strategy.kind == SINGLE:
        probs = np.zeros(state.num_arms)
        probs[state.strategy.arm] = 1.0
        return probs
    if state.strategy.kind == EXP3:
        return exp3_probabilities(state.gains, state.eta, state.exp3_mix)
    return hedge_probabilities(state.gains, state.eta)


def evaluate_objective(objective, point):
    try:
        value = float(objective(point))
    except (TypeError, ValueError) as err:
        raise EvaluationError('objective returned a non-numeric value at {}: {}'.format(
            point.tolist(), err), point=point)
    if not math.isfinite(value):
        raise EvaluationError('objective returned {} at {}'.format(value, point.tolist()), point=point)
    return value


def default_surrogate(domain):
    return Surrogate(gp.KernelParams(INITIAL_THETA_FRACTION * domain.range))


def gp_hedge_step(state, dataset, specs, objective, domain, budget, rng, surrogate=None,
                  beta_schedule=acquisition.gp_ucb_beta):
    """One GP-Hedge iteration.

    Builds the model on the data so far, lets every arm nominate a point, selects
    one nominee by the state's strategy, evaluates the objective there, rebuilds
    the model with the new observation and rewards every arm with the updated
    posterior mean at its nominee. ``surrogate`` defaults to fixed length scales of
    a quarter of the domain range without standardization.
    """
    if len(specs) != state.num_arms:
        raise InvalidArgumentError('{} acquisition specs for a portfolio of {} arms'.format(
            len(specs), state.num_arms))
    surrogate = surrogate or default_surrogate(domain)
    t = len(dataset) + 1
    model = surrogate.build(dataset)
    ctx = surrogate.incumbent(dataset, t)
    nominees = [optimizer.nominate(model, spec, domain, ctx, budget, rng) for spec in specs]
    nominee_stddev = np.sqrt(gp.predict_batch(model, np.asarray(nominees)).variance)

    probabilities = _strategy_probabilities(state)
    if state.strategy.kind == SINGLE:
        chosen = state.strategy.arm
    else:
        chosen = select_nominee(probabilities, rng)
    y = evaluate_objective(objective, nominees[chosen])
    dataset = dataset.append(nominees[chosen], y)

    rewards = compute_rewards(surrogate.build(dataset), nominees)
    state = update_gains(state, rewards, chosen)
    beta = np.array([beta_schedule(t, domain.dimension, spec.delta, spec.nu)
                     if spec.kind == acquisition.GPUCB else np.nan for spec in specs])
    logging.debug('t={} chose {} at {} -> {:.6g}'.format(t, specs[chosen].label, nominees[chosen].tolist(), y))
    return HedgeStep(state, dataset, chosen, NomineeSet(nominees, rewards), probabilities, y, nominee_stddev, beta)


def initial_design(objective, domain, num_points, rng):
    """Latin-hypercube start; the first point is x_1 of the gap metric."""
    dataset = gp.Dataset(dimension=domain.dimension)
    for point in domain.latin_hypercube(num_points, rng):
        dataset = dataset.append(point, evaluate_objective(objective, point))
    return dataset


def run_portfolio(objective, domain, specs, iterations, rng, strategy=Strategy(HEDGE), eta=DEFAULT_ETA,
                  exp3_mix=DEFAULT_EXP3_MIX, budget=None, surrogate=None, initial_points=DEFAULT_INITIAL_POINTS):
    """Initial design followed by ``iterations`` GP-Hedge steps.

    Returns the final dataset and the list of ``HedgeStep`` records.
    """
    budget = budget or optimizer.ProposalBudget.for_domain(domain)
    surrogate = surrogate or Surrogate.for_domain(domain)
    state = PortfolioState.initial(len(specs), eta, exp3_mix, strategy)
    dataset = initial_design(objective, domain, initial_points, rng)
    steps = []
    for _ in range(iterations):
        surrogate.update(dataset, rng)
        step = gp_hedge_step(state, dataset, specs, objective, domain, budget, rng, surrogate=surrogate)
        state, dataset = step.state, step.dataset
        steps.append(step)
    return dataset, steps
