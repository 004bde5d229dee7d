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
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "starcf/config.hpp"

namespace starcf
{

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

double distance(Point2 a, Point2 b);

// Three-slope path loss (Hata-COST231 constant, 1.9 GHz, AP 15 m, terminal 1.65 m).
namespace pathloss
{
inline constexpr double kBreak0Km = 0.010;
inline constexpr double kBreak1Km = 0.050;
inline constexpr double kCarrierMHz = 1900.0;
inline constexpr double kApHeight = 15.0;
inline constexpr double kUserHeight = 1.65;

/// Hata-COST231 constant L in dB (about 140.7 dB).
double hata_constant_db();

/// Path gain in dB (negative), without shadowing.
double gain_db(double distance_km);
} // namespace pathloss

/// Linear path gain at `distance_km`. `shadowing_db` is added only beyond the
/// second breakpoint, as in the three-slope model. Throws on distance <= 0.
double path_loss(double distance_km, double shadowing_db = 0.0);

/// Linear gain of the flat region (d <= d0); the normalizer for GainReference::flat_region.
double flat_region_gain();

/// Users sharing a pilot matrix. `groups` partitions {0..K-1}; `group_of[k]`
/// indexes the group containing k.
struct PilotAssignment
{
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of;

    /// P_k, self-inclusive.
    const std::vector<int> &sharing(int k) const { return groups[group_of[k]]; }
    bool share_pilot(int k, int j) const { return group_of[k] == group_of[j]; }
};

/// Round-robin over a seed-shuffled user order into tau_p/N_u equal groups.
PilotAssignment assign_pilots(int num_users, int user_antennas, int pilot_length, std::uint64_t seed);

struct Scenario
{
    std::vector<Point2> ap_positions;   // km
    std::vector<Point2> user_positions; // km
    Point2 ris_position{0.5, 0.5};
    Eigen::VectorXd beta_ap; // per AP, RIS-AP hop
    Eigen::VectorXd beta_u;  // per user, RIS-user hop
    std::vector<Mode> mode;
    PilotAssignment pilots;

    int num_aps() const { return int(ap_positions.size()); }
    int num_users() const { return int(user_positions.size()); }
};

/// Independent RNG streams per scenario seed. Each entity type draws from its
/// own stream, so e.g. the first 10 APs of an M=50 scenario coincide with an
/// M=10 scenario of the same seed, and users do not depend on M at all.
enum class SeedStream : std::uint64_t
{
    aps = 1,
    users = 2,
    shadowing = 3,
    pilots = 4,
    ris_phases = 5,
    fading = 6,
};

std::uint64_t stream_seed(std::uint64_t scenario_seed, SeedStream s);

Scenario generate_scenario(const SystemConfig &config, std::uint64_t seed);

void to_json(nlohmann::json &j, const Scenario &s);
void from_json(const nlohmann::json &j, Scenario &s);

} // namespace starcf
