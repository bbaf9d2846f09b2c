# Copyright 2026 The graphgp Authors
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

"""Gaussian process regression on graph signals with learned spectral kernels."""

from ._core import (
    IoError,
    NumericalError,
    ValidationError,
    __version__,
    eigendecompose,
    fit_baseline,
    fit_polynomial,
    generate_filtered_signals,
    generate_wishart_dataset,
    knn_graph,
    laplacian,
    log_marginal_likelihood,
    posterior_predict,
    random_graph,
    spectrum,
)

__all__ = [
    "IoError",
    "NumericalError",
    "ValidationError",
    "__version__",
    "eigendecompose",
    "fit_baseline",
    "fit_polynomial",
    "generate_filtered_signals",
    "generate_wishart_dataset",
    "knn_graph",
    "laplacian",
    "log_marginal_likelihood",
    "posterior_predict",
    "random_graph",
    "spectrum",
]
