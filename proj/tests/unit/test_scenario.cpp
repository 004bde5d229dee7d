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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "starcf/scenario.hpp"

using namespace starcf;

namespace
{
// Hata-COST231 constant at 1.9 GHz, h_AP = 15 m, h_u = 1.65 m, evaluated by hand.
constexpr double kHandHata = 140.71508370390842;
} // namespace

TEST_CASE("three-slope path loss against hand evaluation")
{
    CHECK(pathloss::hata_constant_db() == doctest::Approx(kHandHata).epsilon(1e-13));
    // middle region: -L - 15 log10(d1) - 20 log10(d)
    CHECK(pathloss::gain_db(0.03) == doctest::Approx(-90.74205886334195).epsilon(1e-13));
    // far region: -L - 35 log10(d)
    CHECK(pathloss::gain_db(0.2) == doctest::Approx(-116.25113355214776).epsilon(1e-13));
    // flat region equals the value at d0
    CHECK(pathloss::gain_db(0.001) == doctest::Approx(pathloss::gain_db(0.010)).epsilon(1e-15));
}

TEST_CASE("path loss is continuous at both breakpoints")
{
    for (double d : {pathloss::kBreak0Km, pathloss::kBreak1Km})
    {
        const double below = pathloss::gain_db(d * (1.0 - 1e-12));
        const double above = pathloss::gain_db(d * (1.0 + 1e-12));
        CHECK(std::abs(above - below) < 1e-9);
    }
}

TEST_CASE("far region: doubling distance costs a factor 2^-3.5")
{
    for (double d : {0.06, 0.2, 0.7})
        CHECK(path_loss(2.0 * d) / path_loss(d) == doctest::Approx(std::pow(2.0, -3.5)).epsilon(1e-12));
}

TEST_CASE("without shadowing path loss is monotone non-increasing")
{
    double prev = path_loss(1e-4);
    for (double d = 2e-4; d < 1.5; d *= 1.07)
    {
        const double g = path_loss(d);
        CHECK(g <= prev);
        prev = g;
    }
    CHECK_THROWS_AS(path_loss(0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(-1.0), std::invalid_argument);
}

TEST_CASE("shadowing applies only beyond d1")
{
    CHECK(path_loss(0.03, 8.0) == path_loss(0.03));
    CHECK(path_loss(0.3, 10.0) == doctest::Approx(10.0 * path_loss(0.3)).epsilon(1e-12));
}

TEST_CASE("pilot groups: documented partitions")
{
    SUBCASE("K=10, N_u=4, tau_p=20 gives 5 groups of 2")
    {
        const auto p = assign_pilots(10, 4, 20, 11);
        REQUIRE(p.groups.size() == 5);
        for (const auto &g : p.groups)
            CHECK(g.size() == 2);
    }
    SUBCASE("tau_p = K N_u gives singletons")
    {
        const auto p = assign_pilots(6, 2, 12, 5);
        REQUIRE(p.groups.size() == 6);
        for (int k = 0; k < 6; ++k)
            CHECK(p.sharing(k) == std::vector<int>{k});
    }
    SUBCASE("K=4, N_u=2, tau_p=4 gives 2 groups of 2 covering every user once")
    {
        const auto p = assign_pilots(4, 2, 4, 9);
        REQUIRE(p.groups.size() == 2);
        std::multiset<int> all;
        for (const auto &g : p.groups)
        {
            CHECK(g.size() == 2);
            all.insert(g.begin(), g.end());
        }
        CHECK(all == std::multiset<int>{0, 1, 2, 3});
        for (int k = 0; k < 4; ++k)
        {
            const auto &g = p.sharing(k);
            CHECK(std::find(g.begin(), g.end(), k) != g.end());
        }
    }
    CHECK_THROWS_AS(assign_pilots(10, 4, 6, 1), std::invalid_argument);  // not a multiple of N_u
    CHECK_THROWS_AS(assign_pilots(10, 4, 12, 1), std::invalid_argument); // 3 groups do not divide 10
    CHECK(assign_pilots(10, 4, 20, 3).groups == assign_pilots(10, 4, 20, 3).groups);
}

TEST_CASE("generated scenario respects placement regions and counts")
{
    SystemConfig c; // K = 10, K_r = K_t = 5
    const Scenario s = generate_scenario(c, 42);
    REQUIRE(s.num_aps() == c.num_aps);
    REQUIRE(s.num_users() == 10);
    CHECK(s.ris_position.x == 0.5);
    CHECK(s.ris_position.y == 0.5);
    int reflect = 0, transmit = 0;
    for (int k = 0; k < s.num_users(); ++k)
    {
        const auto p = s.user_positions[k];
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 0.8);
        if (s.mode[k] == Mode::reflection)
        {
            ++reflect;
            CHECK(p.y >= 0.0);
            CHECK(p.y < 0.5);
        }
        else
        {
            ++transmit;
            CHECK(p.y > 0.5);
            CHECK(p.y <= 0.8);
        }
        CHECK(s.beta_u[k] > 0.0);
    }
    CHECK(reflect == 5);
    CHECK(transmit == 5);
    for (int m = 0; m < s.num_aps(); ++m)
    {
        const auto p = s.ap_positions[m];
        CHECK(p.x >= -0.5);
        CHECK(p.x < 0.5);
        CHECK(p.y >= -0.5);
        CHECK(p.y < 0.5);
        CHECK(s.beta_ap[m] > 0.0);
    }
}

TEST_CASE("large-scale fading follows the distance to the surface")
{
    SystemConfig c;
    c.num_aps = 50;
    const Scenario s = generate_scenario(c, 3);
    const double ref = flat_region_gain();
    for (int m = 0; m < s.num_aps(); ++m)
        CHECK(s.beta_ap[m] == doctest::Approx(path_loss(distance(s.ap_positions[m], s.ris_position)) / ref));

    c.gain_reference = GainReference::absolute;
    const Scenario a = generate_scenario(c, 3);
    for (int m = 0; m < a.num_aps(); ++m)
        CHECK(a.beta_ap[m] == doctest::Approx(s.beta_ap[m] * ref).epsilon(1e-12));
}

TEST_CASE("same (config, seed) regenerates bit-identical scenarios")
{
    SystemConfig c;
    c.shadowing = true;
    const nlohmann::json a = generate_scenario(c, 77), b = generate_scenario(c, 77);
    CHECK(a.dump() == b.dump());
    const nlohmann::json other = generate_scenario(c, 78);
    CHECK(a.dump() != other.dump());
}

TEST_CASE("entity streams are independent of the other counts")
{
    SystemConfig small, large;
    large.num_aps = 50;
    const Scenario a = generate_scenario(small, 5), b = generate_scenario(large, 5);
    for (int m = 0; m < small.num_aps; ++m)
    {
        CHECK(a.ap_positions[m].x == b.ap_positions[m].x);
        CHECK(a.ap_positions[m].y == b.ap_positions[m].y);
    }
    for (int k = 0; k < small.num_users; ++k)
        CHECK(a.user_positions[k].x == b.user_positions[k].x);
}

TEST_CASE("full-length pilots make every group a singleton")
{
    SystemConfig c;
    c.pilot_length = c.num_users * c.user_antennas;
    const Scenario s = generate_scenario(c, 1);
    for (int k = 0; k < c.num_users; ++k)
        CHECK(s.pilots.sharing(k).size() == 1);
}

TEST_CASE("scenario JSON round trip")
{
    SystemConfig c;
    c.shadowing = true;
    const Scenario s = generate_scenario(c, 8);
    const nlohmann::json j = s;
    const auto back = j.get<Scenario>();
    CHECK(nlohmann::json(back).dump() == j.dump());
}
