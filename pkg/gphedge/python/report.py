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
"""CSV and plot-data renderings of aggregate reports."""
import csv
import os
import numpy as np
from tensorflow.python.platform import tf_logging as logging
from gphedge.python.errors import OutputError


CSV_HEADER = ['iteration', 'mean_gap', 'var_gap', 'mean_cum_regret']


def format_float(value):
    """Plain decimal with 17 significant digits, never exponent notation."""
    return np.format_float_positional(float(value), precision=17, unique=False, fractional=False, trim='k')


def _open_for_write(path):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        return open(path, 'w', newline='')
    except OSError as err:
        raise OutputError(path, err.strerror or str(err))


def csv_rows(report):
    yield CSV_HEADER
    for t in range(report.iterations):
        yield [str(t + 1), format_float(report.mean_gap[t]), format_float(report.var_gap[t]),
               format_float(report.mean_cum_regret[t])]


def emit_csv(report, path):
    """Writes one row per iteration after the ``iteration,mean_gap,var_gap,mean_cum_regret`` header."""
    with _open_for_write(path) as f:
        try:
            csv.writer(f, lineterminator='\n').writerows(csv_rows(report))
        except OSError as err:
            raise OutputError(path, err.strerror or str(err))
    logging.info('wrote {} rows of {} to {}'.format(report.iterations, report.series, path))


def plotdata_lines(report):
    columns = ['iteration', 'mean_gap', 'var_gap', 'mean_cum_regret']
    columns += ['freq[{}]'.format(label) for label in report.arm_labels]
    yield '# series: {}'.format(report.series)
    yield '# ' + ' '.join(columns)
    for t in range(report.iterations):
        values = [report.mean_gap[t], report.var_gap[t], report.mean_cum_regret[t]]
        values += list(report.arm_frequencies[t])
        yield ' '.join([str(t + 1)] + [format_float(value) for value in values])


def emit_plotdata(reports, path):
    """Writes one whitespace-separated block per series, blocks separated by two blank lines.

    ``reports`` is a single AggregateReport or a sequence of them.
    """
    if hasattr(reports, 'mean_gap'):
        reports = [reports]
    blocks = ['\n'.join(plotdata_lines(report)) + '\n' for report in reports]
    with _open_for_write(path) as f:
        try:
            f.write('\n\n'.join(blocks))
        except OSError as err:
            raise OutputError(path, err.strerror or str(err))
    logging.info('wrote plot data for {} to {}'.format([report.series for report in reports], path))
