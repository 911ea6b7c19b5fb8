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
"""Error types raised by gphedge.

All errors derive from TensorFlow's canonical ``OpError`` family so that callers may
catch either the specific class below or ``tf.errors.OpError``.
"""
from tensorflow.python.framework import errors


class InvalidArgumentError(errors.InvalidArgumentError):

    def __init__(self, message):
        super().__init__(None, None, message)


class ConfigError(InvalidArgumentError):
    pass


class NumericalFailureError(errors.InternalError):
    """A factorization failed even at the largest jitter tried."""

    def __init__(self, message, jitter=None):
        if jitter is not None:
            message = '{} (final jitter tried: {:g})'.format(message, jitter)
        super().__init__(None, None, message)
        self.jitter = jitter


class UnsupportedDispatchError(errors.UnimplementedError):

    def __init__(self, message):
        super().__init__(None, None, message)


class DomainError(errors.OutOfRangeError):

    def __init__(self, message):
        super().__init__(None, None, message)


class DegenerateStartError(errors.FailedPreconditionError):

    def __init__(self, message):
        super().__init__(None, None, message)


class EmptyAggregateError(errors.FailedPreconditionError):

    def __init__(self, message):
        super().__init__(None, None, message)


class EvaluationError(errors.UnknownError):

    def __init__(self, message, point=None):
        super().__init__(None, None, message)
        self.point = point


class OutputError(errors.UnknownError):

    def __init__(self, path, message):
        super().__init__(None, None, 'cannot write {}: {}'.format(path, message))
        self.path = path
