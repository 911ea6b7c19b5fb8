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
"""Seeded multi-trial benchmark runs and their aggregation."""
import collections
from concurrent import futures
import numpy as np
from tensorflow.python.framework import errors as tf_errors
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import acquisition
from gphedge.python import optimizer
from gphedge.python import portfolio
from gphedge.python import testbed
from gphedge.python.errors import ConfigError, EmptyAggregateError, InvalidArgumentError
from gphedge.python.gp import DEFAULT_NOISE_VARIANCE
from gphedge.python.performance import TrialTimer
from gphedge.python.surrogate import DEFAULT_REFIT_INTERVAL, Surrogate


DEFAULT_ITERATIONS = 100
DEFAULT_TRIALS = 25
DEFAULT_SEED = 0

PRESETS = collections.OrderedDict([
    ('replication3', ['ei:xi=0.01', 'pi:xi=0.01', 'gpucb:delta=0.1,nu=0.2']),
    ('replication9', ['pi:xi=0.01', 'pi:xi=0.1', 'pi:xi=1',
                      'ei:xi=0.01', 'ei:xi=0.1', 'ei:xi=1',
                      'gpucb:delta=0.1,nu=0.1', 'gpucb:delta=0.1,nu=0.2', 'gpucb:delta=0.1,nu=1']),
])
DEFAULT_PRESET = 'replication3'


def preset_specs(name):
    if name not in PRESETS:
        raise ConfigError('unknown preset "{}"; choose from {}'.format(name, list(PRESETS)))
    return [acquisition.AcquisitionSpec.parse(text) for text in PRESETS[name]]


class ExperimentConfig(collections.namedtuple('ExperimentConfig', [
        'function_name', 'strategy', 'specs', 'iterations', 'trials', 'base_seed', 'eta', 'exp3_mix',
        'budget', 'noise_variance', 'refit_interval', 'standardize', 'initial_points', 'workers',
        'series'])):
    """Everything that determines a benchmark run.

    ``budget=None`` uses the per-domain default proposal budget, ``refit_interval=None``
    keeps the initial length scales and ``series=None`` names the run after its strategy.
    """
    __slots__ = ()

    def __new__(cls, function_name, specs, strategy=portfolio.Strategy(portfolio.HEDGE),
                iterations=DEFAULT_ITERATIONS, trials=DEFAULT_TRIALS, base_seed=DEFAULT_SEED,
                eta=portfolio.DEFAULT_ETA, exp3_mix=portfolio.DEFAULT_EXP3_MIX, budget=None,
                noise_variance=DEFAULT_NOISE_VARIANCE, refit_interval=DEFAULT_REFIT_INTERVAL,
                standardize=True, initial_points=portfolio.DEFAULT_INITIAL_POINTS, workers=1, series=None):
        return super().__new__(cls, function_name, strategy, tuple(specs), iterations, trials, base_seed, eta,
                               exp3_mix, budget, noise_variance, refit_interval, standardize, initial_points,
                               workers, series)

    def validate(self):
        """Raises ConfigError on the first problem, before any trial runs."""
        for name in ('iterations', 'trials', 'initial_points', 'workers'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError('{} must be a positive integer, got {}'.format(name, value))
        if int(self.base_seed) != self.base_seed:
            raise ConfigError('base_seed must be an integer, got {}'.format(self.base_seed))
        if not self.specs:
            raise ConfigError('the portfolio needs at least one acquisition spec')
        if self.refit_interval is not None and (int(self.refit_interval) != self.refit_interval
                                                or self.refit_interval < 1):
            raise ConfigError('refit_interval must be a positive integer, got {}'.format(self.refit_interval))
        if not self.noise_variance > 0.0:
            raise ConfigError('noise_variance must be positive, got {}'.format(self.noise_variance))
        try:
            portfolio.PortfolioState.initial(len(self.specs), self.eta, self.exp3_mix, self.strategy)
        except InvalidArgumentError as err:
            raise ConfigError(err.message)
        testbed.get_test_function(self.function_name)
        return self

    @property
    def series_name(self):
        return self.series or self.strategy.label(self.specs)

    def snapshot(self):
        budget = self.budget
        return collections.OrderedDict([
            ('function', self.function_name),
            ('strategy', self.strategy.label(self.specs)),
            ('specs', [spec.label for spec in self.specs]),
            ('iterations', self.iterations),
            ('trials', self.trials),
            ('base_seed', self.base_seed),
            ('eta', self.eta),
            ('exp3_mix', self.exp3_mix),
            ('budget', None if budget is None else list(budget)),
            ('noise_variance', self.noise_variance),
            ('refit_interval', self.refit_interval),
            ('standardize', self.standardize),
            ('initial_points', self.initial_points),
        ])


TrialRecord = collections.namedtuple('TrialRecord', [
    'index', 'seed', 'dataset', 'gap', 'regret', 'chosen', 'probabilities', 'exploration', 'error', 'seconds'])


class RunRecord(collections.namedtuple('RunRecord', ['config', 'trials'])):
    __slots__ = ()

    @property
    def succeeded(self):
        return [trial for trial in self.trials if trial.error is None]

    @property
    def failed(self):
        return [trial for trial in self.trials if trial.error is not None]

    def summary(self):
        """JSON-compatible content of the run without wall-clock times."""
        trials = []
        for trial in self.trials:
            entry = collections.OrderedDict([('index', trial.index), ('seed', trial.seed), ('error', trial.error)])
            if trial.error is None:
                entry['x'] = trial.dataset.x.tolist()
                entry['y'] = trial.dataset.y.tolist()
                entry['gap'] = trial.gap.values.tolist()
                entry['cumulative_regret'] = trial.regret.cumulative.tolist()
                entry['chosen'] = list(trial.chosen)
                entry['probabilities'] = trial.probabilities.tolist()
            trials.append(entry)
        return collections.OrderedDict([('config', self.config.snapshot()), ('trials', trials)])


def _exploration_increments(specs, steps):
    """``sqrt(beta_t) * sigma_{t-1}`` at the first GP-UCB arm's nominee, or None without one."""
    arms = [index for index, spec in enumerate(specs) if spec.kind == acquisition.GPUCB]
    if not arms:
        return None
    arm = arms[0]
    return np.array([np.sqrt(step.beta[arm]) * step.nominee_stddev[arm] for step in steps])


def run_trial(config, index, function=None):
    """Runs trial ``index`` with seed ``base_seed + index`` and returns its TrialRecord."""
    function = function or testbed.get_test_function(config.function_name)
    seed = config.base_seed + index
    rng = np.random.default_rng(seed)
    surrogate = Surrogate.for_domain(function.domain, config.noise_variance, config.refit_interval,
                                     config.standardize)
    budget = config.budget or optimizer.ProposalBudget.for_domain(function.domain)
    dataset, steps = portfolio.run_portfolio(
        function.evaluate, function.domain, list(config.specs), config.iterations, rng,
        strategy=config.strategy, eta=config.eta, exp3_mix=config.exp3_mix, budget=budget,
        surrogate=surrogate, initial_points=config.initial_points)
    gap = testbed.gap_trace(dataset, function.known_opt_value)
    regret = testbed.regret_traces(dataset, function.known_opt_value)
    return TrialRecord(
        index=index, seed=seed, dataset=dataset, gap=gap, regret=regret,
        chosen=[step.chosen for step in steps],
        probabilities=np.array([step.probabilities for step in steps]),
        exploration=_exploration_increments(config.specs, steps), error=None, seconds=None)


def _failed_trial(config, index, err):
    return TrialRecord(index=index, seed=config.base_seed + index, dataset=None, gap=None, regret=None,
                       chosen=None, probabilities=None, exploration=None, error=str(err), seconds=None)


def run_experiment(config):
    """Runs ``config.trials`` independent seeded trials.

    Trials that fail with a library error are recorded with their message and left
    out of aggregates. With ``workers > 1`` trials run on a thread pool; records stay
    in trial order either way.
    """
    config.validate()
    function = testbed.get_test_function(config.function_name)
    timer = TrialTimer()

    def one_trial(index):
        with timer.measure(index):
            try:
                trial = run_trial(config, index, function)
            except tf_errors.OpError as err:
                logging.warning('trial {} (seed {}) failed: {}'.format(index, config.base_seed + index, err))
                trial = _failed_trial(config, index, err)
        return trial

    indices = range(config.trials)
    if config.workers > 1:
        with futures.ThreadPoolExecutor(max_workers=config.workers) as executor:
            trials = list(executor.map(one_trial, indices))
    else:
        trials = [one_trial(index) for index in indices]
    trials = [trial._replace(seconds=timer.durations[trial.index]) for trial in trials]
    failed = sum(trial.error is not None for trial in trials)
    if failed:
        logging.warning('{} of {} trials failed and are excluded from aggregates'.format(failed, len(trials)))
    timer.report()
    return RunRecord(config, trials)


class AggregateReport(collections.namedtuple('AggregateReport', [
        'series', 'arm_labels', 'num_trials', 'num_failed', 'single_trial', 'mean_gap', 'var_gap',
        'mean_cum_regret', 'arm_frequencies', 'mean_probabilities', 'mean_exploration'])):
    """Per-iteration statistics over the successful trials of a run.

    Arrays are indexed by iteration ``t = 1..T``; ``arm_frequencies`` and
    ``mean_probabilities`` are ``T x N``. ``mean_exploration`` is the mean cumulative
    GP-UCB exploration term, or None when the portfolio has no GP-UCB arm.
    """
    __slots__ = ()

    @property
    def iterations(self):
        return len(self.mean_gap)


def aggregate(record):
    trials = record.succeeded
    if not trials:
        raise EmptyAggregateError('all {} trials of {} failed'.format(len(record.trials), record.config.series_name))
    iterations = record.config.iterations
    num_arms = len(record.config.specs)
    gaps = np.array([trial.gap.last(iterations) for trial in trials])
    regrets = np.array([trial.regret.last(iterations).cumulative for trial in trials])
    single_trial = len(trials) == 1
    var_gap = np.zeros(iterations) if single_trial else np.var(gaps, axis=0, ddof=1)
    chosen = np.array([trial.chosen for trial in trials])
    arm_frequencies = np.stack([np.mean(chosen == arm, axis=0) for arm in range(num_arms)], axis=1)
    mean_probabilities = np.mean([trial.probabilities for trial in trials], axis=0)
    if trials[0].exploration is None:
        mean_exploration = None
    else:
        mean_exploration = np.mean([np.cumsum(trial.exploration) for trial in trials], axis=0)
    return AggregateReport(
        series=record.config.series_name,
        arm_labels=[spec.label for spec in record.config.specs],
        num_trials=len(trials),
        num_failed=len(record.failed),
        single_trial=single_trial,
        mean_gap=np.mean(gaps, axis=0),
        var_gap=var_gap,
        mean_cum_regret=np.mean(regrets, axis=0),
        arm_frequencies=arm_frequencies,
        mean_probabilities=mean_probabilities,
        mean_exploration=mean_exploration)
