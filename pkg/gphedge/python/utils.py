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
import os
import shlex
from contextlib import contextmanager
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python.errors import ConfigError, InvalidArgumentError


@contextmanager
def logging_show_info():
    verbosity = logging.get_verbosity()
    logging.set_verbosity(logging.INFO)
    try:
        yield
    finally:
        logging.set_verbosity(verbosity)


_VERBOSE_MAP = {
    'debug': 'DEBUG',
    'info': 'INFO',
    'warning': 'WARN',
    'error': 'ERROR',
    'critical': 'FATAL',
}
VERBOSE_CHOICES = list(_VERBOSE_MAP) + [key.upper() for key in _VERBOSE_MAP]


def log_level_from_verbose(verbose):
    if verbose is None:
        return logging.WARN
    return getattr(logging, _VERBOSE_MAP.get(verbose.lower(), 'WARN'))


def check_finite(name, value):
    array = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError('{} must be finite, got {}'.format(name, value))
    return array


def read_config_args(path):
    """Turns a ``key = value`` config file into long command-line flags.

    Blank lines and ``#`` comments are ignored; keys may repeat. ``key = true``
    becomes the ``--key`` switch and ``key = false`` its ``--no-key`` counterpart.
    """
    if not os.path.isfile(path):
        raise ConfigError('config file {} does not exist'.format(path))
    args = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError('{}:{}: expected "key = value", got "{}"'.format(path, lineno, line))
            key, value = (part.strip() for part in line.split('=', 1))
            flag = '--{}'.format(key.replace('_', '-'))
            if value.lower() == 'true':
                args.append(flag)
            elif value.lower() == 'false':
                args.append('--no-{}'.format(key.replace('_', '-')))
            else:
                args.append('{}={}'.format(flag, ' '.join(shlex.split(value))))
    return args
