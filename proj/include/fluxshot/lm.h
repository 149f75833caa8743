// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLUXSHOT_LM_H
#define FLUXSHOT_LM_H

#include <functional>

#include <Eigen/Core>

namespace fluxshot {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;  // relative cost change and step size
    double initial_damping = 1e-3;
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1
    double cost = 0.0;           // sum of squared residuals
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt minimization of |r(x)|^2 with a central-difference Jacobian.
LmResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd x0,
                             const LmOptions& options = {});

}  // namespace fluxshot

#endif
