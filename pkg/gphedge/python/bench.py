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
"""Command-line benchmark harness: ``gphedge-bench``.

Runs seeded multi-trial experiments on the registered test functions and writes
aggregate gap and regret statistics as CSV or plot data. Settings come from an
optional ``key = value`` file (``--config``) overridden by the command line.
"""
import argparse
import os
import re
import sys
import tensorflow as tf
from tensorflow.python.framework import errors as tf_errors
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import acquisition
from gphedge.python import experiment
from gphedge.python import optimizer
from gphedge.python import portfolio
from gphedge.python import report
from gphedge.python import testbed
from gphedge.python.errors import ConfigError
from gphedge.python.gp import DEFAULT_NOISE_VARIANCE
from gphedge.python.surrogate import DEFAULT_REFIT_INTERVAL
from gphedge.python.utils import VERBOSE_CHOICES, log_level_from_verbose, logging_show_info, read_config_args


EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2

_EMIT_CHOICES = ['csv', 'plotdata']
_DEFAULT_OUT = {'csv': 'results.csv', 'plotdata': 'results.dat'}


class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        raise ConfigError('{}: {}'.format(self.prog, message))


def build_parser():
    parser = _ArgumentParser(prog='gphedge-bench', description='Portfolio Bayesian optimization benchmarks')
    parser.add_argument('--config', default=None, help='key = value file with default settings')
    parser.add_argument('--function', default='branin', help='one of {}'.format(testbed.registered_names()))
    parser.add_argument('--strategy', default=portfolio.HEDGE,
                        help='hedge, exp3, or single:<arm> where <arm> is an index or acquisition spec')
    parser.add_argument('--spec', action='append', default=None,
                        help='portfolio arm such as ei:xi=0.01 or gpucb:delta=0.1,nu=0.2; repeatable')
    parser.add_argument('--preset', default=experiment.DEFAULT_PRESET, choices=list(experiment.PRESETS),
                        help='named portfolio used when no --spec is given')
    parser.add_argument('--iterations', type=int, default=experiment.DEFAULT_ITERATIONS)
    parser.add_argument('--trials', type=int, default=experiment.DEFAULT_TRIALS)
    parser.add_argument('--seed', type=int, default=experiment.DEFAULT_SEED, help='seed of trial 0')
    parser.add_argument('--eta', type=float, default=portfolio.DEFAULT_ETA)
    parser.add_argument('--exp3-mix', type=float, default=portfolio.DEFAULT_EXP3_MIX)
    parser.add_argument('--noise-variance', type=float, default=DEFAULT_NOISE_VARIANCE)
    parser.add_argument('--refit-interval', type=int, default=DEFAULT_REFIT_INTERVAL,
                        help='refit length scales every N observations; 0 keeps them fixed')
    parser.add_argument('--standardize', dest='standardize', action='store_true', default=True)
    parser.add_argument('--no-standardize', dest='standardize', action='store_false')
    parser.add_argument('--candidates', type=int, default=None,
                        help='random candidates per proposal (default {} per dimension)'.format(
                            optimizer.DEFAULT_CANDIDATES_PER_DIM))
    parser.add_argument('--local-steps', type=int, default=optimizer.DEFAULT_LOCAL_STEPS)
    parser.add_argument('--local-shrink', type=float, default=optimizer.DEFAULT_LOCAL_SHRINK)
    parser.add_argument('--thompson-candidates', type=int, default=None,
                        help='override the joint-draw size of every thompson arm')
    parser.add_argument('--initial-points', type=int, default=portfolio.DEFAULT_INITIAL_POINTS)
    parser.add_argument('--workers', type=int, default=1, help='trials run concurrently')
    parser.add_argument('--compare', dest='compare', action='store_true', default=False,
                        help='also run every arm alone and emit one series per strategy')
    parser.add_argument('--no-compare', dest='compare', action='store_false')
    parser.add_argument('--emit', choices=_EMIT_CHOICES, default='csv')
    parser.add_argument('--out', default=None)
    parser.add_argument('--verbose', choices=VERBOSE_CHOICES, default=None)
    return parser


def _split_config_flag(argv):
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument('--config', default=None)
    known, _ = pre_parser.parse_known_args(argv)
    return known.config


def parse_args(argv):
    """Merges the ``--config`` file with ``argv``; the command line wins.

    A ``--spec`` given on the command line replaces every ``spec`` of the file.
    """
    argv = list(argv)
    config_path = _split_config_flag(argv)
    file_args = read_config_args(config_path) if config_path else []
    if any(arg == '--spec' or arg.startswith('--spec=') for arg in argv):
        file_args = [arg for arg in file_args if not arg.startswith('--spec=')]
    return build_parser().parse_args(file_args + argv)


def _parse_specs(args):
    texts = args.spec if args.spec else experiment.PRESETS[args.preset]
    specs = [acquisition.AcquisitionSpec.parse(text) for text in texts]
    if args.thompson_candidates is not None:
        specs = [spec._replace(thompson_candidates=args.thompson_candidates)
                 if spec.kind == acquisition.THOMPSON else spec for spec in specs]
        specs = [acquisition.AcquisitionSpec(*spec) for spec in specs]
    return specs


def config_from_args(args):
    """Builds and validates the ExperimentConfig; any problem becomes a ConfigError."""
    try:
        specs = _parse_specs(args)
        strategy = portfolio.Strategy.parse(args.strategy, specs)
        budget = None
        if args.candidates is not None or args.local_steps != optimizer.DEFAULT_LOCAL_STEPS \
                or args.local_shrink != optimizer.DEFAULT_LOCAL_SHRINK:
            domain = testbed.get_test_function(args.function).domain
            n_candidates = (args.candidates if args.candidates is not None
                            else optimizer.ProposalBudget.for_domain(domain).n_candidates)
            budget = optimizer.ProposalBudget(n_candidates, args.local_steps, args.local_shrink)
        config = experiment.ExperimentConfig(
            args.function, specs, strategy=strategy, iterations=args.iterations, trials=args.trials,
            base_seed=args.seed, eta=args.eta, exp3_mix=args.exp3_mix, budget=budget,
            noise_variance=args.noise_variance, refit_interval=args.refit_interval or None,
            standardize=args.standardize, initial_points=args.initial_points, workers=args.workers)
        return config.validate()
    except ConfigError:
        raise
    except tf_errors.InvalidArgumentError as err:
        raise ConfigError(err.message)


def comparison_configs(config):
    """The configured portfolio followed by each of its arms run alone."""
    configs = [config]
    if len(config.specs) > 1 or config.strategy.kind != portfolio.SINGLE:
        for spec in config.specs:
            configs.append(config._replace(specs=(spec,), strategy=portfolio.Strategy(portfolio.SINGLE, 0),
                                           series='{}:{}'.format(portfolio.SINGLE, spec.label)))
    return configs


def _series_path(path, index, series):
    if index == 0:
        return path
    root, ext = os.path.splitext(path)
    return '{}.{}{}'.format(root, re.sub(r'[^A-Za-z0-9.=-]+', '_', series), ext)


def run(args):
    config = config_from_args(args)
    if hasattr(tf.config.experimental, 'enable_op_determinism'):
        tf.config.experimental.enable_op_determinism()
    configs = comparison_configs(config) if args.compare else [config]
    reports = []
    for each in configs:
        logging.info('running {} on {}: {} trials x {} iterations'.format(
            each.series_name, each.function_name, each.trials, each.iterations))
        reports.append(experiment.aggregate(experiment.run_experiment(each)))
    out = args.out or _DEFAULT_OUT[args.emit]
    if args.emit == 'plotdata':
        report.emit_plotdata(reports, out)
    else:
        for index, each in enumerate(reports):
            report.emit_csv(each, _series_path(out, index, each.series))
    with logging_show_info():
        for each in reports:
            logging.info('{}: mean final gap {:.4f} over {} trials ({} failed)'.format(
                each.series, each.mean_gap[-1], each.num_trials, each.num_failed))
    return reports


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        logging.set_verbosity(log_level_from_verbose(args.verbose))
        run(args)
    except ConfigError as err:
        logging.error(err.message)
        return EXIT_CONFIG_ERROR
    except tf_errors.OpError as err:
        logging.error(err.message)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
