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

#include "starcf/config.hpp"

#include <cmath>
#include <stdexcept>

namespace starcf
{

const char *to_string(Mode m)
{
    return m == Mode::reflection ? "reflection" : "transmission";
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw)
{
    if (!(mw > 0.0))
        throw std::invalid_argument("mw_to_dbm: power must be positive");
    return 10.0 * std::log10(mw);
}

double SystemConfig::prelog() const
{
    if (pilot_length >= coherence_length)
        throw std::invalid_argument("prelog: pilot length must be shorter than the coherence block");
    return double(coherence_length - pilot_length) / double(coherence_length);
}

void SystemConfig::apply_pilot_rule()
{
    pilot_length = num_users * user_antennas / 2;
    pilot_coeff = 1.0 / user_antennas;
}

void SystemConfig::validate() const
{
    auto require = [](bool ok, const char *what) {
        if (!ok)
            throw std::invalid_argument(std::string("SystemConfig: ") + what);
    };
    require(num_aps >= 1 && ap_antennas >= 1 && num_users >= 1 && user_antennas >= 1, "counts must be >= 1");
    require(ris_cols >= 1 && ris_rows >= 1, "surface dimensions must be >= 1");
    require(num_reflect_users >= 0 && num_transmit_users >= 0, "mode counts must be non-negative");
    require(num_reflect_users + num_transmit_users == num_users, "K_r + K_t must equal K");
    require(wavelength > 0.0 && element_width > 0.0 && element_height > 0.0, "lengths must be positive");
    require(pilot_length >= 1 && pilot_length <= coherence_length, "need 1 <= tau_p <= tau_c");
    require(pilot_length % user_antennas == 0, "tau_p must be a multiple of N_u");
    require((num_users * user_antennas) % pilot_length == 0, "tau_p must divide K*N_u");
    require(pilot_length <= num_users * user_antennas, "tau_p must not exceed K*N_u");
    require(pilot_coeff > 0.0 && user_antennas * pilot_coeff <= 1.0 + 1e-12, "need 0 < xi and N_u*xi <= 1");
    require(pilot_power > 0.0 && downlink_power > 0.0 && noise_power > 0.0, "powers must be positive");
    require(penalty > 0.0 && eps_fp > 0.0 && eps_admm > 0.0, "penalty and tolerances must be positive");
    require(max_fp_iters >= 1 && max_admm_iters >= 1, "iteration caps must be >= 1");
    require(shadowing_std_db >= 0.0, "shadowing std must be non-negative");
}

void to_json(nlohmann::json &j, const SystemConfig &c)
{
    j = nlohmann::json{
        {"M", c.num_aps},
        {"N_ap", c.ap_antennas},
        {"K", c.num_users},
        {"K_r", c.num_reflect_users},
        {"K_t", c.num_transmit_users},
        {"N_u", c.user_antennas},
        {"L_h", c.ris_cols},
        {"L_v", c.ris_rows},
        {"L", c.elements()},
        {"lambda", c.wavelength},
        {"d_h", c.element_width},
        {"d_v", c.element_height},
        {"tau_c", c.coherence_length},
        {"tau_p", c.pilot_length},
        {"p_p", c.pilot_power},
        {"p_d", c.downlink_power},
        {"sigma2", c.noise_power},
        {"xi_pilot", c.pilot_coeff},
        {"penalty", c.penalty},
        {"eps_fp", c.eps_fp},
        {"fp_squared_stop", c.fp_squared_stop},
        {"eps_admm", c.eps_admm},
        {"admm_dual_check", c.admm_dual_check},
        {"max_fp_iters", c.max_fp_iters},
        {"max_admm_iters", c.max_admm_iters},
        {"shadowing", c.shadowing},
        {"shadowing_std_db", c.shadowing_std_db},
        {"gain_reference", c.gain_reference == GainReference::absolute ? "absolute" : "flat_region"},
    };
}

void from_json(const nlohmann::json &j, SystemConfig &c)
{
    auto get = [&j](const char *key, auto &field) {
        if (j.contains(key))
            j.at(key).get_to(field);
    };
    get("M", c.num_aps);
    get("N_ap", c.ap_antennas);
    get("K", c.num_users);
    get("K_r", c.num_reflect_users);
    get("K_t", c.num_transmit_users);
    get("N_u", c.user_antennas);
    get("L_h", c.ris_cols);
    get("L_v", c.ris_rows);
    get("lambda", c.wavelength);
    get("d_h", c.element_width);
    get("d_v", c.element_height);
    get("tau_c", c.coherence_length);
    get("tau_p", c.pilot_length);
    get("p_p", c.pilot_power);
    get("p_d", c.downlink_power);
    get("sigma2", c.noise_power);
    get("xi_pilot", c.pilot_coeff);
    get("penalty", c.penalty);
    get("eps_fp", c.eps_fp);
    get("fp_squared_stop", c.fp_squared_stop);
    get("eps_admm", c.eps_admm);
    get("admm_dual_check", c.admm_dual_check);
    get("max_fp_iters", c.max_fp_iters);
    get("max_admm_iters", c.max_admm_iters);
    get("shadowing", c.shadowing);
    get("shadowing_std_db", c.shadowing_std_db);
    if (j.contains("gain_reference"))
    {
        const auto ref = j.at("gain_reference").get<std::string>();
        if (ref == "absolute")
            c.gain_reference = GainReference::absolute;
        else if (ref == "flat_region")
            c.gain_reference = GainReference::flat_region;
        else
            throw std::invalid_argument("SystemConfig: unknown gain_reference '" + ref + "'");
    }
    // dBm conveniences, converted at the boundary
    if (j.contains("p_p_dbm"))
        c.pilot_power = dbm_to_mw(j.at("p_p_dbm").get<double>());
    if (j.contains("p_d_dbm"))
        c.downlink_power = dbm_to_mw(j.at("p_d_dbm").get<double>());
    if (j.contains("sigma2_dbm"))
        c.noise_power = dbm_to_mw(j.at("sigma2_dbm").get<double>());
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream)
{
    // splitmix64 over (root, stream)
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace starcf
