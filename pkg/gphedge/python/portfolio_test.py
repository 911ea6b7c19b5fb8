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
import math
import unittest
import numpy as np
from gphedge.python import gp
from gphedge.python import optimizer
from gphedge.python import portfolio
from gphedge.python import testbed
from gphedge.python.acquisition import AcquisitionSpec
from gphedge.python.errors import EvaluationError, InvalidArgumentError
from gphedge.python.optimizer import ProposalBudget
from gphedge.python.portfolio import PortfolioState, Strategy
from gphedge.python.surrogate import Surrogate
from gphedge.python.unittest_base import TestCase


_DOMAIN = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
_BUDGET = ProposalBudget(100, n_local_steps=5)
_SPECS = [AcquisitionSpec.parse(text) for text in ['ei:xi=0.01', 'pi:xi=0.01', 'gpucb:delta=0.1,nu=0.2']]


def _objective(point):
    return -float(np.sum((np.asarray(point) - 0.3) ** 2))


def _start(rng, size=3):
    return portfolio.initial_design(_objective, _DOMAIN, size, rng)


class TestProbabilities(TestCase):

    def test_hedge_examples(self):
        np.testing.assert_allclose(portfolio.hedge_probabilities([0.3, 0.3, 0.3], 2.0), [1 / 3] * 3, atol=1e-15)
        np.testing.assert_allclose(portfolio.hedge_probabilities([1.0, 0.0], math.log(2.0)), [2 / 3, 1 / 3],
                                   atol=1e-15)
        with self.assertRaises(InvalidArgumentError):
            portfolio.hedge_probabilities([], 1.0)
        with self.assertRaises(InvalidArgumentError):
            portfolio.hedge_probabilities([1.0], 0.0)
        with self.assertRaises(InvalidArgumentError):
            portfolio.hedge_probabilities([1.0, float('nan')], 1.0)

    def test_hedge_matches_naive_softmax(self):
        rng = self.rng()
        for _ in range(100):
            gains = rng.normal(scale=5.0, size=int(rng.integers(1, 10)))
            eta = rng.uniform(0.1, 3.0)
            naive = np.exp(eta * gains) / np.sum(np.exp(eta * gains))
            probs = portfolio.hedge_probabilities(gains, eta)
            np.testing.assert_allclose(probs, naive, rtol=0.0, atol=1e-12)
            assert abs(np.sum(probs) - 1.0) <= 1e-12
            assert np.all(probs > 0.0)
            np.testing.assert_allclose(portfolio.hedge_probabilities(gains + 3.5, eta), probs, atol=1e-12)
            np.testing.assert_allclose(portfolio.hedge_probabilities(gains / 2.0, 2.0 * eta), probs, atol=1e-12)

    def test_hedge_large_gains(self):
        probs = portfolio.hedge_probabilities([1e5, 1e5 - 1.0], 1.0)
        assert np.all(np.isfinite(probs))
        np.testing.assert_allclose(probs, [1.0 / (1.0 + math.exp(-1.0)), 1.0 / (1.0 + math.e)], atol=1e-12)

    def test_exp3_examples(self):
        gains = [1.0, 0.0]
        np.testing.assert_allclose(portfolio.exp3_probabilities(gains, math.log(2.0), 1.0), [0.5, 0.5], atol=1e-15)
        np.testing.assert_array_equal(portfolio.exp3_probabilities(gains, 0.7, 0.0),
                                      portfolio.hedge_probabilities(gains, 0.7))
        np.testing.assert_allclose(portfolio.exp3_probabilities(gains, math.log(2.0), 0.5),
                                   [0.5833333333333333, 0.4166666666666667], atol=1e-12)
        probs = portfolio.exp3_probabilities([50.0, 0.0, 0.0], 1.0, 0.3)
        assert np.all(probs >= 0.1 - 1e-15)
        assert abs(np.sum(probs) - 1.0) <= 1e-12
        with self.assertRaises(InvalidArgumentError):
            portfolio.exp3_probabilities(gains, 1.0, 1.5)


class TestSelection(TestCase):

    def test_degenerate(self):
        rng = self.rng()
        assert all(portfolio.select_nominee([1.0, 0.0, 0.0], rng) == 0 for _ in range(1000))
        assert all(portfolio.select_nominee([0.0, 0.0, 1.0], rng) == 2 for _ in range(1000))

    def test_uniform_frequencies(self):
        rng = self.rng()
        picks = [portfolio.select_nominee([1 / 3, 1 / 3, 1 / 3], rng) for _ in range(30000)]
        counts = np.bincount(picks, minlength=3) / len(picks)
        np.testing.assert_allclose(counts, [1 / 3] * 3, atol=0.02)

    def test_determinism_and_draw_count(self):
        probs = [0.2, 0.5, 0.3]
        assert portfolio.select_nominee(probs, self.rng(1)) == portfolio.select_nominee(probs, self.rng(1))
        rng = self.rng(2)
        assert portfolio.select_nominee([1.0], rng) == 0
        assert rng.random() == self.rng(2).random()

    def test_malformed(self):
        for probs in [[], [0.5, 0.6], [1.5, -0.5], [float('nan'), 1.0]]:
            with self.assertRaises(InvalidArgumentError):
                portfolio.select_nominee(probs, self.rng())


class TestGains(TestCase):

    def test_hedge(self):
        state = PortfolioState.initial(2)
        state = portfolio.update_gains(state, [0.5, 0.2], 1)
        np.testing.assert_array_equal(state.gains, [0.5, 0.2])
        state = portfolio.update_gains(state, [0.1, -0.4], 0)
        np.testing.assert_allclose(state.gains, [0.6, -0.2], atol=1e-15)

    def test_exp3(self):
        state = PortfolioState.initial(2, eta=3.0, strategy=Strategy(portfolio.EXP3))
        state = portfolio.update_gains(state, [0.5, 0.2], 0)
        np.testing.assert_array_equal(state.gains, [1.0, 0.0])
        p_hat = portfolio.hedge_probabilities([1.0, 0.0], 3.0)
        state = portfolio.update_gains(state, [0.5, 0.2], 1)
        np.testing.assert_allclose(state.gains, [1.0, 0.2 / max(p_hat[1], 0.05)], rtol=1e-14)
        state = PortfolioState.initial(2, eta=1.0, exp3_mix=0.5, strategy=Strategy(portfolio.EXP3))
        state = portfolio.update_gains(state._replace(gains=np.array([1.0, 0.0])), [0.5, 0.2], 1)
        p_hat = portfolio.hedge_probabilities([1.0, 0.0], 1.0)
        np.testing.assert_allclose(state.gains, [1.0, 0.2 / p_hat[1]], rtol=1e-14)

    def test_exp3_underflowed_arm_stays_finite(self):
        state = PortfolioState(np.array([0.0, -800.0]), 1.0, 0.1, Strategy(portfolio.EXP3))
        assert portfolio.hedge_probabilities(state.gains, state.eta)[1] == 0.0
        state = portfolio.update_gains(state, [0.3, -1.5], 1)
        np.testing.assert_allclose(state.gains, [0.0, -800.0 - 1.5 / 0.05], rtol=1e-14)
        probs = portfolio.exp3_probabilities(state.gains, state.eta, state.exp3_mix)
        assert np.all(probs >= 0.05 - 1e-15)

    def test_exp3_long_runs_stay_finite(self):
        for seed in range(50):
            rng = self.rng(seed)
            state = PortfolioState.initial(3, eta=1.0, exp3_mix=0.1, strategy=Strategy(portfolio.EXP3))
            for _ in range(100):
                probs = portfolio.exp3_probabilities(state.gains, state.eta, state.exp3_mix)
                chosen = portfolio.select_nominee(probs, rng)
                state = portfolio.update_gains(state, rng.normal(scale=2.0, size=3), chosen)
            assert np.all(np.isfinite(state.gains))
            # each step moves one gain by at most |r| * N / mix
            assert np.max(np.abs(state.gains)) < 100 * 30.0 * 10.0

    def test_exp3_zero_probability_arm(self):
        state = PortfolioState(np.array([0.0, -800.0]), 1.0, 0.0, Strategy(portfolio.EXP3))
        with self.assertRaises(InvalidArgumentError):
            portfolio.update_gains(state, [0.3, -1.5], 1)

    def test_single(self):
        state = PortfolioState.initial(3, strategy=Strategy(portfolio.SINGLE, 1))
        state = portfolio.update_gains(state, [0.5, 0.2, 0.1], 1)
        np.testing.assert_array_equal(state.gains, [0.0, 0.0, 0.0])

    def test_invalid(self):
        state = PortfolioState.initial(2)
        with self.assertRaises(InvalidArgumentError):
            portfolio.update_gains(state, [0.5, 0.2], 2)
        with self.assertRaises(InvalidArgumentError):
            portfolio.update_gains(state, [0.5], 0)
        with self.assertRaises(InvalidArgumentError):
            PortfolioState.initial(2, strategy=Strategy(portfolio.SINGLE, 2))
        with self.assertRaises(InvalidArgumentError):
            PortfolioState.initial(0)
        with self.assertRaises(InvalidArgumentError):
            PortfolioState.initial(2, eta=-1.0)


class TestStrategy(TestCase):

    def test_parse(self):
        assert Strategy.parse('hedge', _SPECS) == Strategy(portfolio.HEDGE)
        assert Strategy.parse('EXP3', _SPECS) == Strategy(portfolio.EXP3)
        assert Strategy.parse('single:2', _SPECS) == Strategy(portfolio.SINGLE, 2)
        assert Strategy.parse('single:pi', _SPECS) == Strategy(portfolio.SINGLE, 1)
        assert Strategy.parse('single:ei:xi=0.01', _SPECS) == Strategy(portfolio.SINGLE, 0)
        assert Strategy.parse('single:gpucb', _SPECS).label(_SPECS) == 'single:gpucb:delta=0.1,nu=0.2'
        for text in ['greedy', 'single:ucb', 'single:ei:xi=0.5', 'single']:
            with self.assertRaises(InvalidArgumentError):
                Strategy.parse(text, _SPECS)


class TestRewards(TestCase):

    def test_matches_predict(self):
        dataset = _start(self.rng(), 5)
        model = gp.build_model(dataset, gp.KernelParams([0.3, 0.3]))
        nominees = [np.array([0.1, 0.2]), np.array([0.9, 0.4]), np.array([0.5, 0.5])]
        rewards = portfolio.compute_rewards(model, nominees)
        for reward, nominee in zip(rewards, nominees):
            np.testing.assert_allclose(reward, gp.predict(model, nominee).mean, atol=1e-12)
        same = portfolio.compute_rewards(model, [nominees[0]] * 3)
        assert np.all(same == same[0])


class TestGpHedgeStep(TestCase):

    def test_one_step(self):
        rng = self.rng()
        dataset = _start(rng)
        state = PortfolioState.initial(len(_SPECS))
        step = portfolio.gp_hedge_step(state, dataset, _SPECS, _objective, _DOMAIN, _BUDGET, rng)
        assert len(step.dataset) == len(dataset) + 1
        np.testing.assert_array_equal(step.dataset.x[-1], step.nominees.nominees[step.chosen])
        assert step.y == _objective(step.nominees.nominees[step.chosen])
        np.testing.assert_array_equal(step.state.gains, step.nominees.rewards)
        assert all(_DOMAIN.contains(nominee) for nominee in step.nominees.nominees)
        np.testing.assert_allclose(step.probabilities, [1 / 3] * 3, atol=1e-15)
        assert np.isnan(step.beta[0]) and step.beta[2] > 0.0
        assert np.all(step.nominee_stddev >= 0.0)

    def test_determinism(self):
        def run(seed):
            rng = self.rng(seed)
            dataset = _start(rng)
            state = PortfolioState.initial(len(_SPECS))
            trace = []
            for _ in range(4):
                step = portfolio.gp_hedge_step(state, dataset, _SPECS, _objective, _DOMAIN, _BUDGET, rng)
                state, dataset = step.state, step.dataset
                trace.append((np.array(step.nominees.nominees), step.chosen, step.y, state.gains))
            return trace

        for first, second in zip(run(7), run(7)):
            np.testing.assert_array_equal(first[0], second[0])
            assert first[1] == second[1] and first[2] == second[2]
            np.testing.assert_array_equal(first[3], second[3])

    def test_single_arm_portfolio(self):
        rng = self.rng()
        dataset = _start(rng)
        state = PortfolioState.initial(1)
        for _ in range(3):
            step = portfolio.gp_hedge_step(state, dataset, _SPECS[:1], _objective, _DOMAIN, _BUDGET, rng)
            state, dataset = step.state, step.dataset
            assert step.chosen == 0

    def test_single_strategy(self):
        rng = self.rng()
        dataset = _start(rng)
        state = PortfolioState.initial(3, strategy=Strategy(portfolio.SINGLE, 2))
        step = portfolio.gp_hedge_step(state, dataset, _SPECS, _objective, _DOMAIN, _BUDGET, rng)
        assert step.chosen == 2
        np.testing.assert_array_equal(step.probabilities, [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(step.state.gains, [0.0, 0.0, 0.0])
        assert len(step.nominees.rewards) == 3

    def test_bad_objective(self):
        rng = self.rng()
        dataset = _start(rng)
        with self.assertRaises(EvaluationError) as context:
            portfolio.gp_hedge_step(PortfolioState.initial(3), dataset, _SPECS, lambda x: float('inf'), _DOMAIN,
                                    _BUDGET, rng)
        assert _DOMAIN.contains(context.exception.point)
        with self.assertRaises(InvalidArgumentError):
            portfolio.gp_hedge_step(PortfolioState.initial(2), dataset, _SPECS, _objective, _DOMAIN, _BUDGET, rng)


class TestRunPortfolio(TestCase):

    def test_hedge_accounting(self):
        dataset, steps = portfolio.run_portfolio(_objective, _DOMAIN, _SPECS, 8, self.rng(), budget=_BUDGET,
                                                 surrogate=Surrogate.for_domain(_DOMAIN, fit_starts=8))
        assert len(dataset) == portfolio.DEFAULT_INITIAL_POINTS + 8
        total = np.sum([step.nominees.rewards for step in steps], axis=0)
        np.testing.assert_allclose(steps[-1].state.gains, total, atol=1e-9)
        incumbents = np.maximum.accumulate(dataset.y)
        assert np.all(np.diff(incumbents) >= 0.0)

    def test_exp3_run(self):
        _, steps = portfolio.run_portfolio(_objective, _DOMAIN, _SPECS, 100, self.rng(),
                                           budget=ProposalBudget(40, n_local_steps=3),
                                           strategy=Strategy(portfolio.EXP3), exp3_mix=0.1,
                                           surrogate=Surrogate.for_domain(_DOMAIN, fit_starts=8))
        assert len(steps) == 100
        for step in steps:
            assert np.all(step.probabilities >= 0.1 / 3 - 1e-12)
            assert np.all(np.isfinite(step.state.gains))

    def test_reduces_to_single_acquisition_loop(self):
        branin = testbed.get_test_function('branin')
        domain = branin.domain
        spec = AcquisitionSpec('ei', xi=0.01)
        iterations = 30

        rng = self.rng(11)
        hedge_dataset, steps = portfolio.run_portfolio(branin, domain, [spec], iterations, rng)
        assert all(step.chosen == 0 for step in steps)

        rng = self.rng(11)
        surrogate = Surrogate.for_domain(domain)
        budget = ProposalBudget.for_domain(domain)
        dataset = gp.Dataset(dimension=2)
        for point in domain.latin_hypercube(portfolio.DEFAULT_INITIAL_POINTS, rng):
            dataset = dataset.append(point, branin(point))
        for _ in range(iterations):
            surrogate.update(dataset, rng)
            model = surrogate.build(dataset)
            point = optimizer.propose(model, spec, domain, surrogate.incumbent(dataset), budget, rng)
            dataset = dataset.append(point, branin(point))

        np.testing.assert_array_equal(hedge_dataset.x, dataset.x)
        np.testing.assert_array_equal(hedge_dataset.y, dataset.y)


if __name__ == '__main__':
    unittest.main()
