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
"""Kernel hyperparameters and target standardization maintained over a run."""
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import gp
from gphedge.python.acquisition import IncumbentContext
from gphedge.python.errors import InvalidArgumentError


DEFAULT_REFIT_INTERVAL = 5
THETA_BOUND_FRACTIONS = (1e-2, 10.0)
INITIAL_THETA_FRACTION = 0.25


class Surrogate:
    """Builds GP models for one run.

    Targets are standardized with an offset and scale frozen between refits; the
    length scales are refit by maximum evidence whenever ``refit_interval`` new
    observations have arrived since the last fit. ``refit_interval=None`` keeps
    ``params`` fixed for the whole run.
    """

    def __init__(self, params, theta_bounds=None, noise_bounds=None, refit_interval=None,
                 standardize=False, fit_starts=gp.DEFAULT_FIT_STARTS):
        if refit_interval is not None and (int(refit_interval) != refit_interval or refit_interval < 1):
            raise InvalidArgumentError('refit_interval must be a positive integer, got {}'.format(refit_interval))
        if refit_interval is not None and theta_bounds is None:
            raise InvalidArgumentError('refitting needs theta_bounds')
        self.params = params
        self.theta_bounds = theta_bounds
        self.noise_bounds = noise_bounds or (params.noise_variance, params.noise_variance)
        self.refit_interval = refit_interval
        self.standardize = standardize
        self.fit_starts = fit_starts
        self.offset = 0.0
        self.scale = 1.0
        self.fitted_at = None

    @classmethod
    def for_domain(cls, domain, noise_variance=gp.DEFAULT_NOISE_VARIANCE, refit_interval=DEFAULT_REFIT_INTERVAL,
                   standardize=True, fit_starts=gp.DEFAULT_FIT_STARTS):
        low, high = THETA_BOUND_FRACTIONS
        theta_bounds = np.stack([low * domain.range, high * domain.range], axis=1)
        params = gp.KernelParams(INITIAL_THETA_FRACTION * domain.range, noise_variance)
        return cls(params, theta_bounds=theta_bounds, refit_interval=refit_interval, standardize=standardize,
                   fit_starts=fit_starts)

    def due(self, dataset):
        if self.refit_interval is None or len(dataset) < 2:
            return False
        return self.fitted_at is None or len(dataset) - self.fitted_at >= self.refit_interval

    def update(self, dataset, rng):
        """Refits when due; returns whether it did."""
        if not self.due(dataset):
            return False
        if self.standardize:
            scale = float(np.std(dataset.y))
            if scale <= 0.0:
                logging.warning('all {} observed values are equal; not rescaling targets'.format(len(dataset)))
                scale = 1.0
            self.offset, self.scale = float(np.mean(dataset.y)), scale
        self.params = gp.fit_hyperparams(self.standardized(dataset), self.theta_bounds, self.noise_bounds, rng,
                                         num_starts=self.fit_starts)
        self.fitted_at = len(dataset)
        return True

    def standardized(self, dataset):
        if not len(dataset):
            return dataset
        return gp.Dataset.from_arrays(dataset.x, (dataset.y - self.offset) / self.scale)

    def build(self, dataset):
        return gp.build_model(self.standardized(dataset), self.params)

    def incumbent(self, dataset, t=None):
        """Incumbent context in standardized units; ``t`` defaults to ``len(dataset) + 1``."""
        _, f_plus = dataset.best()
        t = len(dataset) + 1 if t is None else t
        return IncumbentContext((f_plus - self.offset) / self.scale, t, dataset.dimension)
