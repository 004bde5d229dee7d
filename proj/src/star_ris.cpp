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

#include "starcf/star_ris.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace starcf
{

namespace
{

double sinc(double a)
{
    if (a == 0.0)
        return 1.0;
    const double x = std::numbers::pi * a;
    return std::sin(x) / x;
}

} // namespace

Eigen::MatrixXd build_correlation(int cols, int rows, double spacing_h, double spacing_v, double wavelength)
{
    if (cols < 1 || rows < 1)
        throw std::invalid_argument("build_correlation: element counts must be >= 1");
    if (!(spacing_h > 0.0 && spacing_v > 0.0 && wavelength > 0.0))
        throw std::invalid_argument("build_correlation: spacings and wavelength must be positive");

    const int L = cols * rows;
    Eigen::MatrixXd R(L, L);
    for (int x = 0; x < L; ++x)
    {
        const double hx = (x % cols) * spacing_h, vx = (x / cols) * spacing_v;
        R(x, x) = 1.0;
        for (int y = x + 1; y < L; ++y)
        {
            const double hy = (y % cols) * spacing_h, vy = (y / cols) * spacing_v;
            const double d = std::hypot(hx - hy, vx - vy);
            R(x, y) = R(y, x) = sinc(2.0 * d / wavelength);
        }
    }
    return R;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd &R)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd S = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (S + S.transpose());
}

Eigen::MatrixXcd build_theta(const Eigen::VectorXd &amplitude, const Eigen::VectorXd &phase)
{
    if (amplitude.size() != phase.size())
        throw std::invalid_argument("build_theta: amplitude and phase lengths differ");
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(amplitude.size(), amplitude.size());
    for (Eigen::Index l = 0; l < amplitude.size(); ++l)
    {
        if (!(amplitude[l] >= 0.0 && amplitude[l] <= 1.0))
            throw std::invalid_argument("build_theta: amplitude " + std::to_string(amplitude[l]) + " outside [0, 1]");
        theta(l, l) = std::polar(amplitude[l], phase[l]);
    }
    return theta;
}

double trace_product(const Eigen::MatrixXcd &X, const Eigen::MatrixXcd &Y)
{
    return X.transpose().cwiseProduct(Y).sum().real();
}

CouplingMatrix coupling_matrix(const Eigen::MatrixXd &R, const Eigen::MatrixXd &R_sqrt,
                               const Eigen::MatrixXcd &theta, double element_area)
{
    const Eigen::MatrixXcd Rs = R_sqrt.cast<std::complex<double>>();
    const Eigen::MatrixXcd inner = theta * R.cast<std::complex<double>>() * theta.adjoint();
    Eigen::MatrixXcd T = (element_area * element_area) * (Rs * inner * Rs);
    T = 0.5 * (T + T.adjoint()).eval();

    CouplingMatrix out;
    out.trace = T.trace().real();
    out.trace_sq = trace_product(T, T);
    out.T = std::move(T);
    return out;
}

StarRisState make_star_ris(const SystemConfig &config, const Eigen::VectorXd &amp_r, const Eigen::VectorXd &amp_t,
                           const Eigen::VectorXd &phase_r, const Eigen::VectorXd &phase_t)
{
    const int L = config.elements();
    if (amp_r.size() != L || amp_t.size() != L || phase_r.size() != L || phase_t.size() != L)
        throw std::invalid_argument("make_star_ris: coefficient vectors must have L entries");
    for (int l = 0; l < L; ++l)
    {
        const double total = amp_r[l] * amp_r[l] + amp_t[l] * amp_t[l];
        if (std::abs(total - 1.0) >= 1e-12)
            throw std::invalid_argument("make_star_ris: energy splitting violated at element " + std::to_string(l));
    }

    StarRisState s;
    s.R = build_correlation(config.ris_cols, config.ris_rows, config.element_width, config.element_height,
                            config.wavelength);
    s.R_sqrt = psd_sqrt(s.R);
    s.element_area = config.element_area();
    s.amp_r = amp_r;
    s.amp_t = amp_t;
    s.phase_r = phase_r;
    s.phase_t = phase_t;
    s.theta[index(Mode::reflection)] = build_theta(amp_r, phase_r);
    s.theta[index(Mode::transmission)] = build_theta(amp_t, phase_t);

    const Eigen::MatrixXcd Rs = s.R_sqrt.cast<std::complex<double>>();
    for (int w = 0; w < 2; ++w)
    {
        s.cascade[w] = s.element_area * (Rs * s.theta[w] * Rs);
        s.coupling[w] = coupling_matrix(s.R, s.R_sqrt, s.theta[w], s.element_area);
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            s.trace_cross[a][b] = trace_product(s.coupling[a].T, s.coupling[b].T);
    return s;
}

namespace
{

void draw_phases(const SystemConfig &config, std::uint64_t scenario_seed, Eigen::VectorXd &phase_r,
                 Eigen::VectorXd &phase_t)
{
    const int L = config.elements();
    Rng rng(stream_seed(scenario_seed, SeedStream::ris_phases));
    phase_r.resize(L);
    phase_t.resize(L);
    for (int l = 0; l < L; ++l)
        phase_r[l] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    for (int l = 0; l < L; ++l)
        phase_t[l] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
}

} // namespace

StarRisState default_star_ris(const SystemConfig &config, std::uint64_t scenario_seed)
{
    Eigen::VectorXd phase_r, phase_t;
    draw_phases(config, scenario_seed, phase_r, phase_t);
    const Eigen::VectorXd amp = Eigen::VectorXd::Constant(config.elements(), std::sqrt(0.5));
    return make_star_ris(config, amp, amp, phase_r, phase_t);
}

StarRisState conventional_ris_pair(const SystemConfig &config, std::uint64_t scenario_seed)
{
    Eigen::VectorXd phase_r, phase_t;
    draw_phases(config, scenario_seed, phase_r, phase_t);
    const int L = config.elements();
    Eigen::VectorXd amp_r = Eigen::VectorXd::Zero(L), amp_t = Eigen::VectorXd::Zero(L);
    for (int l = 0; l < L; ++l)
        (l < L / 2 ? amp_r : amp_t)[l] = 1.0;
    return make_star_ris(config, amp_r, amp_t, phase_r, phase_t);
}

ChannelStatistics channel_covariance(const Scenario &scenario, const StarRisState &ris)
{
    const int M = scenario.num_aps(), K = scenario.num_users();
    ChannelStatistics c;
    c.beta_ap = scenario.beta_ap;
    c.beta_u = scenario.beta_u;
    c.mode = scenario.mode;
    for (int w = 0; w < 2; ++w)
    {
        c.trace_T[w] = ris.coupling[w].trace;
        c.trace_T2[w] = ris.coupling[w].trace_sq;
    }
    c.trace_cross = ris.trace_cross;
    c.delta_bar.resize(M, K);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            c.delta_bar(m, k) = scenario.beta_ap[m] * scenario.beta_u[k] * c.trace_T[index(scenario.mode[k])];
    return c;
}

ChannelRealization sample_channel(const Scenario &scenario, const StarRisState &ris, int ap_antennas,
                                  int user_antennas, Rng &rng)
{
    const int M = scenario.num_aps(), K = scenario.num_users(), L = ris.elements();
    std::vector<Eigen::MatrixXcd> ap_side(M), user_side(K);
    for (int m = 0; m < M; ++m)
        ap_side[m] = complex_normal_matrix(rng, ap_antennas, L);
    for (int k = 0; k < K; ++k)
        user_side[k] = ris.cascade[index(scenario.mode[k])] * complex_normal_matrix(rng, L, user_antennas);

    ChannelRealization out;
    out.num_aps = M;
    out.num_users = K;
    out.G.resize(std::size_t(M) * K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
            out.at(m, k) = std::sqrt(scenario.beta_ap[m] * scenario.beta_u[k]) * (ap_side[m] * user_side[k]);
    return out;
}

} // namespace starcf
