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
import unittest
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python import utils
from gphedge.python.errors import ConfigError, InvalidArgumentError
from gphedge.python.unittest_base import TestCase


class TestUtils(TestCase):

    def test_logging_show_info(self):
        verbosity = logging.get_verbosity()
        logging.set_verbosity(logging.ERROR)
        try:
            with utils.logging_show_info():
                assert logging.get_verbosity() == logging.INFO
            assert logging.get_verbosity() == logging.ERROR
        finally:
            logging.set_verbosity(verbosity)

    def test_log_level_from_verbose(self):
        assert utils.log_level_from_verbose(None) == logging.WARN
        assert utils.log_level_from_verbose('debug') == logging.DEBUG
        assert utils.log_level_from_verbose('CRITICAL') == logging.FATAL

    def test_check_finite(self):
        np.testing.assert_array_equal(utils.check_finite('x', [1, 2]), [1.0, 2.0])
        with self.assertRaises(InvalidArgumentError):
            utils.check_finite('x', [1.0, np.nan])

    def test_read_config_args(self):
        path = os.path.join(self.get_temp_dir(), 'settings.cfg')
        with open(path, 'w') as f:
            f.write('# comment\n\nexp3_mix = 0.2\ncompare = true\nstandardize = FALSE\nspec = ei:xi=0.01\n')
        assert utils.read_config_args(path) == [
            '--exp3-mix=0.2', '--compare', '--no-standardize', '--spec=ei:xi=0.01']
        with self.assertRaises(ConfigError):
            utils.read_config_args(path + '.missing')


if __name__ == '__main__':
    unittest.main()
