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

from gphedge.python._version import __version__
from gphedge.python.acquisition import (
    AcquisitionSpec,
    IncumbentContext,
    acquisition_value,
    ei_value,
    eipi_value,
    gp_ucb_beta,
    gp_ucb_value,
    pi_value,
    ucb_value,
)
from gphedge.python.experiment import ExperimentConfig, aggregate, run_experiment
from gphedge.python.gp import (
    BoxDomain,
    Dataset,
    GPModel,
    KernelParams,
    PosteriorGaussian,
    build_model,
    fit_hyperparams,
    joint_posterior,
    kernel_eval,
    log_marginal_likelihood,
    predict,
    predict_batch,
    sample_posterior,
)
from gphedge.python.optimizer import ProposalBudget, nominate, propose, propose_thompson, propose_thompson_batch
from gphedge.python.portfolio import (
    PortfolioState,
    Strategy,
    compute_rewards,
    exp3_probabilities,
    gp_hedge_step,
    hedge_probabilities,
    run_portfolio,
    select_nominee,
    update_gains,
)
from gphedge.python.report import emit_csv, emit_plotdata
from gphedge.python.surrogate import Surrogate
from gphedge.python.testbed import gap_metric, gap_trace, get_test_function, regret_traces
