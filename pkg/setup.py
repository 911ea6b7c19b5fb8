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
import re
from setuptools import setup, find_packages


def get_version():
    version_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'gphedge', 'python', '_version.py')
    with open(version_file) as f:
        default_version, = re.findall(r"__version__ = '([^']+)'", f.read())
    return os.environ.get('GPHEDGE_VERSION', default_version)


def get_install_requires():
    install_requires = ['tensorflow >= 2.8']
    install_requires.append('numpy >= 1.21')
    install_requires.append('scipy >= 1.9')
    return install_requires


setup(
    name='gphedge',
    version=get_version(),
    description='Bayesian optimization with portfolios of acquisition functions',
    license='Apache 2.0',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Software Development :: Libraries :: Python Modules',
    ],
    keywords='bayesian optimization gaussian process hedge exp3 tensorflow',
    packages=find_packages(include=['gphedge', 'gphedge.*']),
    python_requires='>=3.8',
    install_requires=get_install_requires(),
    extras_require={'test': ['pytest']},
    entry_points={
        'console_scripts': ['gphedge-bench=gphedge.python.bench:main'],
    },
)
