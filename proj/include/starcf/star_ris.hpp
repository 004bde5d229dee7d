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

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "starcf/config.hpp"
#include "starcf/random.hpp"
#include "starcf/scenario.hpp"

namespace starcf
{

/// Spatial correlation of a planar L_h x L_v surface:
/// [R]_{x,y} = sinc(2 |u_x - u_y| / lambda), sinc(a) = sin(pi a)/(pi a).
Eigen::MatrixXd build_correlation(int cols, int rows, double spacing_h, double spacing_v, double wavelength);

/// Symmetric square root through an eigendecomposition; eigenvalues below
/// zero (numerical rank loss of sub-half-wavelength sinc matrices) are floored at 0.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd &R);

/// diag(u_l * exp(i phi_l)). Throws if any amplitude leaves [0, 1] or the sizes differ.
Eigen::MatrixXcd build_theta(const Eigen::VectorXd &amplitude, const Eigen::VectorXd &phase);

struct CouplingMatrix
{
    Eigen::MatrixXcd T;
    double trace = 0.0;    // tr(T)
    double trace_sq = 0.0; // tr(T^2)
};

/// T = A^2 R^{1/2} Theta R Theta^H R^{1/2}.
CouplingMatrix coupling_matrix(const Eigen::MatrixXd &R, const Eigen::MatrixXd &R_sqrt,
                               const Eigen::MatrixXcd &theta, double element_area);

/// Real part of tr(X Y) without forming the product.
double trace_product(const Eigen::MatrixXcd &X, const Eigen::MatrixXcd &Y);

/// Surface state: correlation, ES coefficients and the per-mode coupling
/// matrices. Immutable once built.
struct StarRisState
{
    Eigen::MatrixXd R;
    Eigen::MatrixXd R_sqrt;
    double element_area = 0.0;
    Eigen::VectorXd amp_r, amp_t;
    Eigen::VectorXd phase_r, phase_t;
    std::array<Eigen::MatrixXcd, 2> theta;   // indexed by Mode
    std::array<Eigen::MatrixXcd, 2> cascade; // A R^{1/2} Theta R^{1/2}, the per-mode channel core
    std::array<CouplingMatrix, 2> coupling;
    std::array<std::array<double, 2>, 2> trace_cross{}; // tr(T_a T_b)

    int elements() const { return int(R.rows()); }
    const Eigen::MatrixXcd &T(Mode m) const { return coupling[index(m)].T; }
};

/// Builds the state from explicit amplitudes and phases. The ES constraint
/// (u^r)^2 + (u^t)^2 = 1 is checked to 1e-12 per element.
StarRisState make_star_ris(const SystemConfig &config, const Eigen::VectorXd &amp_r, const Eigen::VectorXd &amp_t,
                           const Eigen::VectorXd &phase_r, const Eigen::VectorXd &phase_t);

/// Uniform phases drawn from the scenario seed's phase stream, amplitudes 1/sqrt(2).
StarRisState default_star_ris(const SystemConfig &config, std::uint64_t scenario_seed);

/// Baseline of two co-located conventional surfaces with L/2 elements each:
/// elements 0..L/2-1 reflect only (u^r = 1), the rest transmit only (u^t = 1).
/// Same geometry and phases as default_star_ris.
StarRisState conventional_ris_pair(const SystemConfig &config, std::uint64_t scenario_seed);

/// Second-order channel statistics. The covariance of vec(G_mk) is
/// delta_bar(m, k) * I and is never materialized.
struct ChannelStatistics
{
    Eigen::MatrixXd delta_bar; // M x K
    Eigen::VectorXd beta_ap;
    Eigen::VectorXd beta_u;
    std::vector<Mode> mode;
    std::array<double, 2> trace_T{};
    std::array<double, 2> trace_T2{};
    std::array<std::array<double, 2>, 2> trace_cross{};

    int num_aps() const { return int(delta_bar.rows()); }
    int num_users() const { return int(delta_bar.cols()); }
    /// tr(T_{w_k} T_{w_j})
    double cross(int k, int j) const { return trace_cross[index(mode[k])][index(mode[j])]; }
    /// tr(T_{w_k}^2)
    double trace_sq(int k) const { return trace_T2[index(mode[k])]; }
};

ChannelStatistics channel_covariance(const Scenario &scenario, const StarRisState &ris);

/// One realization of every G_mk (N_ap x N_u), stored AP-major.
struct ChannelRealization
{
    int num_aps = 0;
    int num_users = 0;
    std::vector<Eigen::MatrixXcd> G;

    Eigen::MatrixXcd &at(int m, int k) { return G[std::size_t(m) * num_users + k]; }
    const Eigen::MatrixXcd &at(int m, int k) const { return G[std::size_t(m) * num_users + k]; }
};

/// G_mk = sqrt(beta_ap,m beta_u,k) V_ap,m (A R^{1/2} Theta R^{1/2}) V_u,k with fresh
/// CN(0,1) fast fading. V_ap,m is shared by all users of AP m and V_u,k by all
/// APs of user k, as in the cascaded model.
ChannelRealization sample_channel(const Scenario &scenario, const StarRisState &ris, int ap_antennas,
                                  int user_antennas, Rng &rng);

} // namespace starcf
