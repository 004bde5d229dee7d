// SPDX-License-Identifier: Apache-2.0
//
// starcf: downlink simulation and power allocation for STAR-RIS-assisted
// cell-free massive MIMO with multi-antenna users.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "starcf/power_allocation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "starcf/spectral_efficiency.hpp"

namespace starcf
{

PowerAllocation PowerAllocation::from_eta(const Eigen::MatrixXd &eta, const EstimationStatistics &est)
{
    return {eta, eta.cwiseProduct(est.z).cwiseSqrt()};
}

PowerAllocation PowerAllocation::from_zeta(const Eigen::MatrixXd &zeta, const EstimationStatistics &est)
{
    return {zeta.cwiseAbs2().cwiseQuotient(est.z), zeta};
}

PowerAllocation no_power_control(const EstimationStatistics &est, const SystemConfig &config)
{
    const double scale = config.downlink_power / (double(est.num_users()) * config.ap_antennas * config.user_antennas);
    return PowerAllocation::from_eta(est.z.cwiseInverse() * scale, est);
}

PowerAllocation fractional_power_control(const ChannelStatistics &chan, const EstimationStatistics &est,
                                         const SystemConfig &config, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("fractional_power_control: alpha must lie in [0, 1]");
    const int M = est.num_aps(), K = est.num_users();
    const double dims = double(config.ap_antennas) * config.user_antennas;

    // G_k^alpha with G_k = sum_m tr(Delta_bar_mk)
    Eigen::VectorXd weight(K);
    for (int k = 0; k < K; ++k)
        weight[k] = std::pow(chan.delta_bar.col(k).sum() * dims, alpha);

    Eigen::MatrixXd eta(M, K);
    for (int m = 0; m < M; ++m)
    {
        double denom = 0.0; // sum_k' tr(Delta_hat_mk') / G_k'^alpha
        for (int j = 0; j < K; ++j)
            denom += est.z(m, j) * dims / weight[j];
        for (int k = 0; k < K; ++k)
            eta(m, k) = config.downlink_power / (weight[k] * denom);
    }
    return PowerAllocation::from_eta(eta, est);
}

FpCoefficients build_fp_coefficients(const ChannelStatistics &chan, const EstimationStatistics &est,
                                     const SystemConfig &config)
{
    const int M = chan.num_aps(), K = chan.num_users();
    const double Nap = config.ap_antennas, Nu = config.user_antennas;

    FpCoefficients c;
    c.num_aps = M;
    c.num_users = K;
    c.user_antennas = config.user_antennas;
    c.noise_power = config.noise_power;
    c.pilots = est.pilots;
    c.a = est.z.cwiseSqrt() * Nap;

    const std::size_t pairs = std::size_t(K) * K;
    c.k1.assign(pairs, Eigen::VectorXd::Zero(M));
    c.k2.assign(pairs, Eigen::VectorXd::Zero(M));
    c.k3.assign(pairs, Eigen::MatrixXd::Zero(M, M));
    c.k4.assign(pairs, Eigen::MatrixXd::Zero(M, M));

    for (int k = 0; k < K; ++k)
    {
        const double xi_k = est.pilot_coeff[k];
        for (int j = 0; j < K; ++j)
        {
            const double xi_j = est.pilot_coeff[j];
            const double amp_j = std::sqrt(est.pilot_gain(j));
            const std::size_t p = c.pair(k, j);

            // eta z_bar^2 rewritten through zeta^2: z_bar_mj / (sqrt(tau_p p_p xi_j) Delta_mj)
            const Eigen::ArrayXd ratio = est.z_bar.col(j).array() / (amp_j * chan.delta_bar.col(j).array());
            c.k1[p] = ratio * est.pilot_gain(k) * chan.beta_ap.array().square() * chan.beta_u[k] * chan.beta_u[k] *
                      chan.trace_sq(k) * Nap;
            c.k2[p] = ratio * Nu * Nap * chan.delta_bar.col(k).array() * est.received.col(j).array();

            // sqrt(z_mj) / Delta_mj, the shared factor of both rank-one blocks
            const Eigen::ArrayXd root = est.z.col(j).array().sqrt() / chan.delta_bar.col(j).array();
            const Eigen::VectorXd x = (root * chan.delta_bar.col(k).array()).matrix();
            c.k3[p] = (xi_k / xi_j) * Nap * Nap * x * x.transpose();

            double cross = 0.0;
            for (int i : est.pilots.sharing(j))
                cross += est.pilot_coeff[i] * chan.beta_u[k] * chan.beta_u[i] * chan.cross(k, i);
            const Eigen::VectorXd y = (root * chan.beta_ap.array()).matrix();
            c.k4[p] = (Nu * Nap * Nap * cross / xi_j) * y * y.transpose();
        }
    }
    return c;
}

RatioTerms ratio_terms(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta)
{
    const int K = coeffs.num_users, Nu = coeffs.user_antennas;
    RatioTerms r;
    r.A.resize(K, Nu);
    r.B.resize(K, Nu);
    for (int k = 0; k < K; ++k)
    {
        const double signal = coeffs.a.col(k).dot(zeta.col(k));
        const double A = signal * signal;
        double total = 0.0;
        for (int j : coeffs.pilots.sharing(k))
        {
            const std::size_t p = coeffs.pair(k, j);
            const auto z = zeta.col(j);
            total += z.cwiseAbs2().dot(coeffs.k1[p]) + z.dot(coeffs.k3[p] * z);
        }
        for (int j = 0; j < K; ++j)
        {
            const std::size_t p = coeffs.pair(k, j);
            const auto z = zeta.col(j);
            total += z.cwiseAbs2().dot(coeffs.k2[p]) + z.dot(coeffs.k4[p] * z);
        }
        r.A.row(k).setConstant(A);
        r.B.row(k).setConstant(total - A + coeffs.noise_power);
    }
    return r;
}

Eigen::MatrixXd update_gamma(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta)
{
    const RatioTerms r = ratio_terms(coeffs, zeta);
    return r.A.cwiseQuotient(r.B);
}

Eigen::MatrixXd update_varpi(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma)
{
    const RatioTerms r = ratio_terms(coeffs, zeta);
    return ((1.0 + gamma.array()) * r.A.array()).sqrt() / (r.A + r.B).array();
}

double evaluate_f1(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma)
{
    const RatioTerms r = ratio_terms(coeffs, zeta);
    const Eigen::ArrayXXd g = gamma.array();
    return ((1.0 + g).log() - g + (1.0 + g) * r.A.array() / (r.A + r.B).array()).sum();
}

double evaluate_f2(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta, const Eigen::MatrixXd &gamma,
                   const Eigen::MatrixXd &varpi)
{
    const RatioTerms r = ratio_terms(coeffs, zeta);
    const Eigen::ArrayXXd g = gamma.array(), w = varpi.array();
    double linear = 0.0;
    for (int k = 0; k < coeffs.num_users; ++k)
        linear += 2.0 * (w.row(k) * (1.0 + g.row(k)).sqrt()).sum() * coeffs.a.col(k).dot(zeta.col(k));
    return linear - (w.square() * (r.A + r.B).array()).sum() +
           ((1.0 + g).log() - g).sum();
}

double sum_log_rate(const FpCoefficients &coeffs, const Eigen::MatrixXd &zeta)
{
    const RatioTerms r = ratio_terms(coeffs, zeta);
    return (1.0 + r.A.array() / r.B.array()).log().sum();
}

Eigen::VectorXd project_ball(const Eigen::VectorXd &nu, double radius2)
{
    const double norm2 = nu.squaredNorm();
    if (norm2 <= radius2)
        return nu;
    return nu * std::sqrt(radius2 / norm2);
}

std::vector<Eigen::MatrixXd> admm_system_matrices(const FpCoefficients &coeffs, const Eigen::MatrixXd &varpi,
                                                  double penalty)
{
    const int M = coeffs.num_aps, K = coeffs.num_users;
    const Eigen::VectorXd w2 = varpi.cwiseAbs2().rowwise().sum(); // sum_n varpi_jn^2
    std::vector<Eigen::MatrixXd> out(K);
    for (int k = 0; k < K; ++k)
    {
        // zeta_k appears in B_j through the (j, k) blocks
        Eigen::MatrixXd A = 0.5 * penalty * Eigen::MatrixXd::Identity(M, M);
        for (int j : coeffs.pilots.sharing(k))
        {
            const std::size_t p = coeffs.pair(j, k);
            A.diagonal() += w2[j] * coeffs.k1[p];
            A += w2[j] * coeffs.k3[p];
        }
        for (int j = 0; j < K; ++j)
        {
            const std::size_t p = coeffs.pair(j, k);
            A.diagonal() += w2[j] * coeffs.k2[p];
            A += w2[j] * coeffs.k4[p];
        }
        out[k] = 0.5 * (A + A.transpose());
    }
    return out;
}

Eigen::MatrixXd admm_linear_terms(const FpCoefficients &coeffs, const Eigen::MatrixXd &gamma,
                                  const Eigen::MatrixXd &varpi)
{
    const Eigen::VectorXd weight = (varpi.array() * (1.0 + gamma.array()).sqrt()).rowwise().sum().matrix();
    return coeffs.a * weight.asDiagonal();
}

AdmmResult admm_inner(const FpCoefficients &coeffs, const Eigen::MatrixXd &gamma, const Eigen::MatrixXd &varpi,
                      const Eigen::MatrixXd &q0, const SystemConfig &config)
{
    const int M = coeffs.num_aps, K = coeffs.num_users;
    const double radius2 = config.downlink_power / (double(config.ap_antennas) * config.user_antennas);
    const double half_penalty = 0.5 * config.penalty;

    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors;
    factors.reserve(K);
    for (const auto &A : admm_system_matrices(coeffs, varpi, config.penalty))
    {
        factors.emplace_back(A);
        if (factors.back().info() != Eigen::Success)
            throw std::runtime_error("admm_inner: system matrix is not positive definite");
    }
    const Eigen::MatrixXd linear = admm_linear_terms(coeffs, gamma, varpi);

    Eigen::MatrixXd q = q0, u = Eigen::MatrixXd::Zero(M, K), zeta(M, K), q_prev(M, K);
    AdmmResult out;
    for (int t = 1; t <= config.max_admm_iters; ++t)
    {
        for (int k = 0; k < K; ++k)
            zeta.col(k) = factors[k].solve(linear.col(k) + half_penalty * (q.col(k) + u.col(k)));
        q_prev = q;
        // per AP: nonnegative part of zeta - u, then onto the power ball
        for (int m = 0; m < M; ++m)
        {
            const Eigen::VectorXd nu = (zeta.row(m) - u.row(m)).transpose().cwiseMax(0.0);
            q.row(m) = project_ball(nu, radius2).transpose();
        }
        u += q - zeta;

        if (!zeta.allFinite() || !q.allFinite() || !u.allFinite())
            throw std::runtime_error("admm_inner: non-finite iterate at iteration " + std::to_string(t));

        const double scale = zeta.norm();
        out.iterations = t;
        out.residual = scale > 0.0 ? (zeta - q).norm() / scale : (zeta - q).norm();
        // Once zeta is feasible the primal residual vanishes whether or not
        // the subproblem is solved, so movement of q is checked as well.
        const double q_scale = q.norm();
        out.dual_residual = q_scale > 0.0 ? (q - q_prev).norm() / q_scale : (q - q_prev).norm();
        const bool settled = !config.admm_dual_check || out.dual_residual <= config.eps_admm;
        if (out.residual <= config.eps_admm && settled)
            break;
    }
    out.hit_cap = out.residual > config.eps_admm ||
                  (config.admm_dual_check && out.dual_residual > config.eps_admm);
    out.zeta = q;
    return out;
}

void to_json(nlohmann::json &j, const FpDiagnostics &d)
{
    j = nlohmann::json{
        {"f1_history", d.f1_history},
        {"admm_iterations", d.admm_iterations},
        {"admm_residuals", d.admm_residuals},
        {"fp_iterations", d.fp_iterations},
        {"admm_iterations_total", d.admm_iterations_total},
        {"admm_cap_hits", d.admm_cap_hits},
        {"rejected_steps", d.rejected_steps},
        {"fp_cap_hit", d.fp_cap_hit},
    };
}

FpResult admm_fp_optimize(const EstimationStatistics &est, const ChannelStatistics &chan, const SystemConfig &config,
                          const PowerAllocation &eta0)
{
    const int M = est.num_aps(), K = est.num_users();
    if (eta0.eta.rows() != M || eta0.eta.cols() != K)
        throw std::invalid_argument("admm_fp_optimize: initial allocation must be M x K");
    if ((eta0.eta.array() < 0.0).any())
        throw std::invalid_argument("admm_fp_optimize: negative initial power coefficient");
    if (power_constraint_excess(eta0.eta, est, config) > 1e-9)
        throw std::invalid_argument("admm_fp_optimize: initial allocation violates the per-AP power budget");

    const FpCoefficients coeffs = build_fp_coefficients(chan, est, config);
    FpResult result;
    FpDiagnostics &diag = result.diagnostics;

    Eigen::MatrixXd zeta = eta0.eta.cwiseProduct(est.z).cwiseSqrt();
    double objective = sum_log_rate(coeffs, zeta);
    diag.f1_history.push_back(objective);

    bool converged = false;
    for (int i = 1; i <= config.max_fp_iters; ++i)
    {
        const Eigen::MatrixXd gamma = update_gamma(coeffs, zeta);
        const Eigen::MatrixXd varpi = update_varpi(coeffs, zeta, gamma);
        AdmmResult admm = admm_inner(coeffs, gamma, varpi, zeta, config);
        diag.admm_iterations.push_back(admm.iterations);
        diag.admm_residuals.push_back(admm.residual);
        diag.admm_iterations_total += admm.iterations;
        diag.admm_cap_hits += admm.hit_cap ? 1 : 0;
        diag.fp_iterations = i;

        // The projected ADMM output is feasible but not guaranteed to improve
        // the surrogate; keeping the current point preserves monotonicity.
        if (evaluate_f2(coeffs, admm.zeta, gamma, varpi) < evaluate_f2(coeffs, zeta, gamma, varpi))
        {
            ++diag.rejected_steps;
            diag.f1_history.push_back(objective);
            converged = true;
            break;
        }
        zeta = std::move(admm.zeta);

        const double next = sum_log_rate(coeffs, zeta);
        diag.f1_history.push_back(next);
        const double change = next - objective;
        objective = next;
        if (config.fp_squared_stop ? change * change <= config.eps_fp : std::abs(change) <= config.eps_fp)
        {
            converged = true;
            break;
        }
    }
    diag.fp_cap_hit = !converged;
    result.allocation = PowerAllocation::from_zeta(zeta, est);
    return result;
}

} // namespace starcf
