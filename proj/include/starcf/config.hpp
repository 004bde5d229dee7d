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

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace starcf
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kCarrierHz = 1.9e9;          // matches the Hata-COST231 constant

/// STAR-RIS operation mode seen by a user.
enum class Mode : int
{
    reflection = 0,
    transmission = 1
};

inline constexpr int index(Mode m) { return static_cast<int>(m); }
const char *to_string(Mode m);

/// How the per-hop large-scale fading is referenced.
///   absolute     - linear gain of the three-slope model as is
///   flat_region  - gain divided by the model's flat-region gain (d <= d0),
///                  so a node within 10 m of the surface sees unit gain
enum class GainReference
{
    absolute,
    flat_region
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// All scalar system parameters. Powers are in mW, lengths in meters.
struct SystemConfig
{
    int num_aps = 20;            // M
    int ap_antennas = 4;         // N_ap
    int num_users = 10;          // K
    int num_reflect_users = 5;   // K_r, users 0..K_r-1 are reflection users
    int num_transmit_users = 5;  // K_t
    int user_antennas = 4;       // N_u
    int ris_cols = 4;            // L_h
    int ris_rows = 4;            // L_v
    double wavelength = kSpeedOfLight / kCarrierHz;
    double element_width = kSpeedOfLight / kCarrierHz / 4.0;  // d_H
    double element_height = kSpeedOfLight / kCarrierHz / 4.0; // d_V
    int coherence_length = 200;  // tau_c
    int pilot_length = 20;       // tau_p
    double pilot_power = 100.0;  // p_p, 20 dBm
    double downlink_power = 199.52623149688787; // p_d, 23 dBm
    double noise_power = 2.5118864315095718e-10; // sigma^2, -96 dBm
    double pilot_coeff = 0.25;   // xi_k, uniform over users
    double penalty = 0.1;        // ADMM penalty
    double eps_fp = 0.01;
    bool fp_squared_stop = true; // stop on (delta f1)^2 <= eps_fp; false compares |delta f1|
    double eps_admm = 0.01;
    bool admm_dual_check = true; // also require |q^t - q^(t-1)| / |q^t| <= eps_admm before stopping
    int max_fp_iters = 100;
    int max_admm_iters = 500;
    bool shadowing = false;
    double shadowing_std_db = 8.0;
    GainReference gain_reference = GainReference::flat_region;

    int elements() const { return ris_cols * ris_rows; }
    double element_area() const { return element_width * element_height; }
    double prelog() const;

    /// tau_p = K*N_u/2 and xi = 1/N_u, the default pilot rule of the experiments.
    void apply_pilot_rule();

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

void to_json(nlohmann::json &j, const SystemConfig &c);
void from_json(const nlohmann::json &j, SystemConfig &c);

/// Stateless 64-bit mixer used to derive independent RNG streams from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

} // namespace starcf
