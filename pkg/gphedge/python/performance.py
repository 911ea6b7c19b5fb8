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
import json
import math
import time
from contextlib import ContextDecorator
from tensorflow.python.platform import tf_logging as logging
from gphedge.python.utils import logging_show_info


class TrialTimer:
    """Wall-clock bookkeeping for benchmark trials.

    Usage:

    ```
    timer = TrialTimer()
    with timer.measure(trial_index):
        ... (run one trial) ...
    report_json = timer.report()
    ```

    The report is displayed as an INFO level log and returned as a JSON-compatible dict.
    """

    def __init__(self):
        self.durations = {}

    def measure(self, key):
        return _measure(self, key)

    def add_duration(self, key, seconds):
        self.durations[key] = seconds

    def report(self):
        if not self.durations:
            return {}
        seconds = list(self.durations.values())
        report_json = {
            'trials': len(seconds),
            'total': sum(seconds),
            'latency': {
                'p50': percentile(seconds, 50),
                'p90': percentile(seconds, 90),
                'p100': percentile(seconds, 100),
            },
            'description': 'Wall-clock seconds per trial.',
        }
        with logging_show_info():
            logging.info('trial timing report:\n{}'.format(json.dumps(report_json, indent=4)))
        return report_json


class _measure(ContextDecorator):

    def __init__(self, timer, key):
        self.timer = timer
        self.key = key
        self.start = None

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.timer.add_duration(self.key, time.perf_counter() - self.start)
        return False


def percentile(number_list, percent):
    pos_float = len(number_list) * percent / 100
    max_pos = len(number_list) - 1
    pos_floor = min(math.floor(pos_float), max_pos)
    pos_ceil = min(math.ceil(pos_float), max_pos)
    number_list = sorted(number_list)
    return number_list[pos_ceil] if pos_float - pos_floor > 0.5 else number_list[pos_floor]
