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

#include "starcf/spectral_efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace starcf
{

double power_constraint_excess(const Eigen::MatrixXd &eta, const EstimationStatistics &est,
                               const SystemConfig &config)
{
    const double budget = config.downlink_power / (config.ap_antennas * config.user_antennas);
    return (eta.cwiseProduct(est.z).rowwise().sum().array() - budget).maxCoeff();
}

SeReport closed_form_se(const EstimationStatistics &est, const ChannelStatistics &chan, const Eigen::MatrixXd &eta,
                        const SystemConfig &config)
{
    const int M = chan.num_aps(), K = chan.num_users();
    const int Nu = config.user_antennas;
    const double Nap = config.ap_antennas;
    if (eta.rows() != M || eta.cols() != K)
        throw std::invalid_argument("closed_form_se: eta must be M x K");
    if ((eta.array() < 0.0).any())
        throw std::invalid_argument("closed_form_se: negative power coefficient");
    if (const double excess = power_constraint_excess(eta, est, config); excess > 1e-9)
        throw std::invalid_argument("closed_form_se: per-AP power constraint exceeded by " + std::to_string(excess));

    const Eigen::MatrixXd root_eta = eta.cwiseSqrt();
    // sum_m sqrt(eta_mk') z_bar_mk' beta_ap,m, shared by every k in the cross-trace term
    Eigen::VectorXd ap_weighted(K);
    for (int j = 0; j < K; ++j)
        ap_weighted[j] = (root_eta.col(j).cwiseProduct(est.z_bar.col(j))).dot(chan.beta_ap);

    SeReport r;
    r.noise_power = config.noise_power;
    r.prelog = config.prelog();
    r.d_bar.resize(K, Nu);
    r.c_bar.resize(K, Nu);
    r.sinr.resize(K, Nu);
    r.se_per_user.resize(K);

    for (int k = 0; k < K; ++k)
    {
        const double gain_k = est.pilot_gain(k);
        const double d = Nap * root_eta.col(k).dot(est.z.col(k));

        double own_group = 0.0;  // pilot-group coherent terms, tr(T^2) and Delta Delta
        for (int j : est.pilots.sharing(k))
        {
            for (int m = 0; m < M; ++m)
            {
                const double bb = chan.beta_ap[m] * chan.beta_u[k];
                own_group += eta(m, j) * est.z_bar(m, j) * est.z_bar(m, j) * gain_k * bb * bb * chan.trace_sq(k) * Nap;
            }
            const double coherent = root_eta.col(j).cwiseProduct(est.z_bar.col(j)).dot(chan.delta_bar.col(k));
            own_group += gain_k * Nap * Nap * coherent * coherent;
        }

        double everyone = 0.0; // full-sum incoherent and cross-trace terms
        for (int j = 0; j < K; ++j)
        {
            for (int m = 0; m < M; ++m)
                everyone += eta(m, j) * est.z_bar(m, j) * est.z_bar(m, j) * Nu * Nap * chan.delta_bar(m, k) *
                            est.received(m, j);
            double cross = 0.0;
            for (int i : est.pilots.sharing(j))
                cross += est.pilot_gain(i) * chan.beta_u[k] * chan.beta_u[i] * chan.cross(k, i);
            everyone += Nu * Nap * Nap * ap_weighted[j] * ap_weighted[j] * cross;
        }

        const double c = own_group + everyone;
        const double sinr = d * d / (c - d * d + config.noise_power);
        r.d_bar.row(k).setConstant(d);
        r.c_bar.row(k).setConstant(c);
        r.sinr.row(k).setConstant(sinr);
        r.se_per_user[k] = Nu * std::log2(1.0 + sinr);
    }
    r.sum_se = r.prelog * r.se_per_user.sum();
    r.avg_se = r.sum_se / K;
    return r;
}

Eigen::VectorXd mmse_sic_se(const SeReport &report)
{
    const auto K = report.d_bar.rows(), Nu = report.d_bar.cols();
    Eigen::VectorXd out(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const Eigen::MatrixXd D = report.d_bar.row(k).asDiagonal();
        const Eigen::VectorXd interference =
            report.c_bar.row(k).transpose() - report.d_bar.row(k).transpose().cwiseAbs2() +
            Eigen::VectorXd::Constant(Nu, report.noise_power);
        const Eigen::MatrixXd Sigma = interference.asDiagonal();
        const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(Nu, Nu) + D.transpose() * Sigma.ldlt().solve(D);
        out[k] = S.ldlt().vectorD().array().log().sum() / std::numbers::ln2;
    }
    return out;
}

std::pair<double, double> network_se(const SeReport &report, const SystemConfig &config)
{
    const double sum = config.prelog() * report.se_per_user.sum();
    return {sum, sum / double(report.se_per_user.size())};
}

MomentEstimate monte_carlo_moments(const Scenario &scenario, const StarRisState &ris, const EstimationStatistics &est,
                                   const Eigen::MatrixXd &eta, const SystemConfig &config, int trials, Rng &rng)
{
    if (trials < 1)
        throw std::invalid_argument("monte_carlo_moments: trials must be >= 1");
    const int M = scenario.num_aps(), K = scenario.num_users(), Nu = config.user_antennas;
    const Eigen::MatrixXd root_eta = eta.cwiseSqrt();

    MomentEstimate out;
    out.trials = trials;
    out.num_users = K;
    out.mean_gain.assign(std::size_t(M) * K, Eigen::MatrixXcd::Zero(Nu, Nu));
    out.second_moment.assign(K, Eigen::MatrixXcd::Zero(Nu, Nu));
    Eigen::MatrixXd gain_sum = Eigen::MatrixXd::Zero(M, K), gain_sq = Eigen::MatrixXd::Zero(M, K);
    Eigen::MatrixXd c_sum = Eigen::MatrixXd::Zero(K, Nu), c_sq = Eigen::MatrixXd::Zero(K, Nu);

    std::vector<Eigen::MatrixXcd> C(K, Eigen::MatrixXcd(Nu, Nu));
    for (int t = 0; t < trials; ++t)
    {
        const ChannelRealization G = sample_channel(scenario, ris, config.ap_antennas, Nu, rng);
        const ChannelRealization W = simulate_pilot_estimation(G, est, config.noise_power, rng);
        for (int k = 0; k < K; ++k)
        {
            for (auto &c : C)
                c.setZero();
            for (int m = 0; m < M; ++m)
            {
                const Eigen::MatrixXcd GH = G.at(m, k).adjoint();
                for (int j = 0; j < K; ++j)
                {
                    const Eigen::MatrixXcd X = GH * W.at(m, j);
                    C[j] += root_eta(m, j) * X;
                    if (j == k)
                    {
                        out.mean_gain[std::size_t(m) * K + k] += X;
                        const double diag = X.diagonal().real().mean();
                        gain_sum(m, k) += diag;
                        gain_sq(m, k) += diag * diag;
                    }
                }
            }
            Eigen::VectorXd rows = Eigen::VectorXd::Zero(Nu);
            for (int j = 0; j < K; ++j)
            {
                out.second_moment[k] += C[j] * C[j].adjoint();
                rows += C[j].rowwise().squaredNorm();
            }
            c_sum.row(k) += rows.transpose();
            c_sq.row(k) += rows.cwiseAbs2().transpose();
        }
    }

    const double n = trials;
    auto stderr_of = [n](double sum, double sq) {
        if (n < 2)
            return std::numeric_limits<double>::infinity();
        const double mean = sum / n;
        const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1));
        return std::sqrt(var / n);
    };

    for (auto &g : out.mean_gain)
        g /= n;
    for (auto &s : out.second_moment)
        s /= n;
    out.gain_diag_stderr.resize(M, K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
            out.gain_diag_stderr(m, k) = stderr_of(gain_sum(m, k), gain_sq(m, k));

    out.D.assign(K, Eigen::MatrixXcd::Zero(Nu, Nu));
    out.d_bar.resize(K, Nu);
    out.c_bar.resize(K, Nu);
    out.c_bar_stderr.resize(K, Nu);
    for (int k = 0; k < K; ++k)
    {
        for (int m = 0; m < M; ++m)
            out.D[k] += root_eta(m, k) * out.gain(m, k);
        for (int s = 0; s < Nu; ++s)
        {
            out.d_bar(k, s) = out.D[k](s, s).real();
            out.c_bar(k, s) = c_sum(k, s) / n;
            out.c_bar_stderr(k, s) = stderr_of(c_sum(k, s), c_sq(k, s));
        }
    }
    return out;
}

DetectorContext assemble_detectors(const MomentEstimate &moments, double noise_power)
{
    DetectorContext ctx;
    ctx.noise_power = noise_power;
    const auto K = moments.D.size();
    for (std::size_t k = 0; k < K; ++k)
    {
        const auto Nu = moments.D[k].rows();
        Eigen::MatrixXcd psi = moments.second_moment[k] + noise_power * Eigen::MatrixXcd::Identity(Nu, Nu);
        psi = 0.5 * (psi + psi.adjoint()).eval();
        Eigen::LLT<Eigen::MatrixXcd> llt(psi);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("assemble_detectors: detector matrix is not positive definite");
        ctx.detectors.push_back(llt.solve(moments.D[k]));
        ctx.D.push_back(moments.D[k]);
        ctx.psi.push_back(std::move(psi));
    }
    return ctx;
}

Eigen::MatrixXd detector_sinr(const DetectorContext &ctx)
{
    const auto K = Eigen::Index(ctx.D.size());
    const auto Nu = K > 0 ? ctx.D.front().cols() : 0;
    Eigen::MatrixXd out(K, Nu);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        for (Eigen::Index n = 0; n < Nu; ++n)
        {
            const Eigen::VectorXcd f = ctx.detectors[k].col(n);
            const double signal = std::norm(f.dot(ctx.D[k].col(n)));
            const double total = (f.adjoint() * ctx.psi[k] * f).value().real();
            out(k, n) = signal / (total - signal);
        }
    }
    return out;
}

} // namespace starcf
