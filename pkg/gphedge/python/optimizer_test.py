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
import unittest
import numpy as np
from gphedge.python import acquisition
from gphedge.python import gp
from gphedge.python import optimizer
from gphedge.python.acquisition import AcquisitionSpec, IncumbentContext
from gphedge.python.errors import InvalidArgumentError
from gphedge.python.optimizer import ProposalBudget
from gphedge.python.unittest_base import TestCase


class _FixedCandidates:
    """Generator stand-in whose uniform draws are a fixed set of unit-box fractions."""

    def __init__(self, fractions, seed=0):
        self.fractions = np.asarray(fractions, dtype=np.float64)
        self._rng = np.random.default_rng(seed)

    def random(self, shape):
        return self.fractions.reshape(shape)

    def standard_normal(self, shape):
        return self._rng.standard_normal(shape)


def _model(rng, dimension=2, size=6):
    x = rng.random((size, dimension))
    y = np.cos(4.0 * x).sum(axis=1)
    return gp.build_model(gp.Dataset.from_arrays(x, y), gp.KernelParams(np.full(dimension, 0.3)))


class TestProposalBudget(TestCase):

    def test_validation(self):
        with self.assertRaises(InvalidArgumentError):
            ProposalBudget(0)
        with self.assertRaises(InvalidArgumentError):
            ProposalBudget(10, n_local_steps=-1)
        with self.assertRaises(InvalidArgumentError):
            ProposalBudget(10, local_shrink=1.0)
        assert ProposalBudget.for_domain(gp.BoxDomain([0.0] * 3, [1.0] * 3)).n_candidates == 3000


class TestPropose(TestCase):

    def test_feasible_and_improving(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = _model(self.rng())
        ctx = IncumbentContext(float(np.max(model.dataset.y)), t=7, d=2)
        budget = ProposalBudget(200, n_local_steps=10)
        for text in ['pi:xi=0.01', 'ei:xi=0.01', 'ucb:lambda=2', 'eipi:xi=0.01,lambda=1', 'gpucb']:
            spec = AcquisitionSpec.parse(text)
            point = optimizer.propose(model, spec, domain, ctx, budget, self.rng(1))
            assert domain.contains(point)
            raw = domain.uniform(budget.n_candidates, self.rng(1))
            best_raw = np.max(acquisition.acquisition_value(spec, gp.predict_batch(model, raw), ctx))
            chosen = acquisition.acquisition_value(spec, gp.predict_batch(model, point[None, :]), ctx)
            assert chosen[0] >= best_raw - 1e-12

    def test_grid_oracle(self):
        domain = gp.BoxDomain([-1.0], [2.0])
        x = np.array([[-0.5], [0.3], [1.1], [1.8]])
        model = gp.build_model(gp.Dataset.from_arrays(x, [0.2, 1.0, -0.4, 0.6]), gp.KernelParams([0.4]))
        ctx = IncumbentContext(1.0)
        fractions = np.linspace(0.0, 1.0, 200)
        grid = domain.lower + fractions[:, None] * domain.range
        for spec in [AcquisitionSpec('ei'), AcquisitionSpec('pi'), AcquisitionSpec('ucb', lambda_=1.5)]:
            point = optimizer.propose(model, spec, domain, ctx, ProposalBudget(200, n_local_steps=0),
                                      _FixedCandidates(fractions))
            scan = acquisition.acquisition_value(spec, gp.predict_batch(model, grid), ctx)
            np.testing.assert_array_equal(point, grid[int(np.argmax(scan))])

    def test_flat_prior_keeps_first_candidate(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = gp.build_model(gp.Dataset(dimension=2), gp.KernelParams([0.5, 0.5]))
        point = optimizer.propose(model, AcquisitionSpec('pi'), domain, IncumbentContext(0.0),
                                  ProposalBudget(50, n_local_steps=5), self.rng(2))
        np.testing.assert_array_equal(point, domain.uniform(50, self.rng(2))[0])

    def test_determinism(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = _model(self.rng())
        ctx = IncumbentContext(float(np.max(model.dataset.y)))
        spec = AcquisitionSpec('ei')
        first = optimizer.propose(model, spec, domain, ctx, ProposalBudget(300), self.rng(3))
        second = optimizer.propose(model, spec, domain, ctx, ProposalBudget(300), self.rng(3))
        np.testing.assert_array_equal(first, second)

    def test_dimension_mismatch(self):
        model = _model(self.rng())
        with self.assertRaises(InvalidArgumentError):
            optimizer.propose(model, AcquisitionSpec('ei'), gp.BoxDomain([0.0], [1.0]), IncumbentContext(0.0),
                              ProposalBudget(10), self.rng())


class TestThompson(TestCase):

    def test_single_candidate(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = _model(self.rng())
        point = optimizer.propose_thompson(model, domain, 1, self.rng(4))
        np.testing.assert_array_equal(point, domain.uniform(1, self.rng(4))[0])

    def test_concentrates_on_high_mean(self):
        domain = gp.BoxDomain([0.0], [1.0])
        dataset = gp.Dataset.from_arrays([[0.0], [1.0]], [5.0, -5.0])
        model = gp.build_model(dataset, gp.KernelParams([0.1]))
        picks = [float(optimizer.propose_thompson(model, domain, 2, _FixedCandidates([1.0, 0.0], seed))[0])
                 for seed in range(1000)]
        assert np.mean(np.array(picks) == 0.0) >= 0.99

    def test_determinism_and_dispatch(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = _model(self.rng())
        first = optimizer.propose_thompson(model, domain, 100, self.rng(5))
        second = optimizer.propose_thompson(model, domain, 100, self.rng(5))
        np.testing.assert_array_equal(first, second)
        spec = AcquisitionSpec('thompson', thompson_candidates=100)
        nominee = optimizer.nominate(model, spec, domain, IncumbentContext(0.0), ProposalBudget(10), self.rng(5))
        np.testing.assert_array_equal(nominee, first)

    def test_batch(self):
        domain = gp.BoxDomain([0.0, 0.0], [1.0, 1.0])
        model = _model(self.rng())
        batch = optimizer.propose_thompson_batch(model, domain, 100, 4, self.rng(6))
        assert len(batch) == 4
        assert all(domain.contains(point) for point in batch)
        again = optimizer.propose_thompson_batch(model, domain, 100, 4, self.rng(6))
        np.testing.assert_array_equal(np.array(batch), np.array(again))
        single = optimizer.propose_thompson_batch(model, domain, 100, 1, self.rng(5))
        np.testing.assert_array_equal(single[0], optimizer.propose_thompson(model, domain, 100, self.rng(5)))
        with self.assertRaises(InvalidArgumentError):
            optimizer.propose_thompson_batch(model, domain, 100, 0, self.rng())


if __name__ == '__main__':
    unittest.main()
