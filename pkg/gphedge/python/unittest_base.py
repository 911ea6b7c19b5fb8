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
import functools
import os
import unittest
import numpy as np
import tensorflow as tf


_RANDOM_SEED = 15213
SLOW_TESTS_ENV = 'GPHEDGE_RUN_SLOW_TESTS'


class TestCase(tf.test.TestCase):

    def setUp(self):
        super().setUp()
        np.random.seed(_RANDOM_SEED)
        tf.random.set_seed(_RANDOM_SEED)

    def rng(self, offset=0):
        return np.random.default_rng(_RANDOM_SEED + offset)


def slow_test(test_func):
    @functools.wraps(test_func)
    def wrapper(*args, **kwargs):
        if os.environ.get(SLOW_TESTS_ENV, '').lower() not in {'1', 'true', 'yes'}:
            raise unittest.SkipTest('set {}=1 to run replication-sized tests'.format(SLOW_TESTS_ENV))
        return test_func(*args, **kwargs)
    return wrapper
