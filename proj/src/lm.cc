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

#include "fluxshot/lm.h"

#include <cmath>

#include <Eigen/Dense>

#include "fluxshot/errors.h"

namespace fluxshot {

namespace {

Eigen::MatrixXd jacobian(const ResidualFunction& residual, const Eigen::VectorXd& x,
                         Eigen::Index m) {
    Eigen::MatrixXd jac(m, x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * std::max(std::abs(x[k]), 1e-3);
        Eigen::VectorXd up = x;
        Eigen::VectorXd dn = x;
        up[k] += h;
        dn[k] -= h;
        jac.col(k) = (residual(up) - residual(dn)) / (2.0 * h);
    }
    return jac;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFunction& residual, Eigen::VectorXd x0,
                             const LmOptions& options) {
    LmResult out;
    Eigen::VectorXd x = std::move(x0);
    Eigen::VectorXd r = residual(x);
    if (r.size() < x.size()) {
        throw FitError("fewer residuals than parameters");
    }
    double cost = r.squaredNorm();
    if (!std::isfinite(cost)) {
        throw FitError("non-finite residuals at the initial guess");
    }
    double damping = options.initial_damping;
    Eigen::MatrixXd jac = jacobian(residual, x, r.size());
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += damping * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd step = a.ldlt().solve(-grad);
            const Eigen::VectorXd trial = x + step;
            const Eigen::VectorXd r_trial = residual(trial);
            const double c_trial = r_trial.squaredNorm();
            if (std::isfinite(c_trial) && c_trial <= cost) {
                const double rel = (cost - c_trial) / std::max(cost, 1e-300);
                const double step_rel = step.norm() / (x.norm() + 1e-12);
                x = trial;
                r = r_trial;
                cost = c_trial;
                damping = std::max(damping / 3.0, 1e-12);
                improved = true;
                if (rel < options.tolerance || step_rel < options.tolerance) {
                    out.converged = true;
                }
                break;
            }
            damping *= 4.0;
        }
        if (!improved) {
            out.converged = true;
            break;
        }
        if (out.converged) {
            break;
        }
        jac = jacobian(residual, x, r.size());
    }
    jac = jacobian(residual, x, r.size());
    const auto dof = static_cast<double>(std::max<Eigen::Index>(r.size() - x.size(), 1));
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    out.covariance = (cost / dof) * jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.params = x;
    out.residuals = r;
    out.cost = cost;
    out.iterations = it;
    return out;
}

}  // namespace fluxshot
