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

#include <set>

#include "starcf/config.hpp"

using namespace starcf;

TEST_CASE("dBm conversion matches the decibel identity")
{
    CHECK(dbm_to_mw(-96.0) == doctest::Approx(2.511886431509582e-10).epsilon(1e-12));
    CHECK(dbm_to_mw(20.0) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(dbm_to_mw(23.0) == doctest::Approx(199.52623149688787).epsilon(1e-14));
    CHECK(mw_to_dbm(dbm_to_mw(-37.5)) == doctest::Approx(-37.5).epsilon(1e-14));
}

TEST_CASE("defaults follow the documented operating point")
{
    const SystemConfig c;
    CHECK(c.num_aps == 20);
    CHECK(c.elements() == 16);
    CHECK(c.element_width == doctest::Approx(c.wavelength / 4.0));
    CHECK(c.wavelength == doctest::Approx(0.15778).epsilon(1e-4));
    CHECK(c.noise_power == doctest::Approx(dbm_to_mw(-96.0)));
    CHECK(c.penalty == 0.1);
    CHECK(c.eps_fp == 0.01);
    CHECK(c.eps_admm == 0.01);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("prelog")
{
    SystemConfig c; // tau_c = 200, K = 10, N_u = 4, tau_p = 20
    CHECK(c.prelog() == doctest::Approx(0.9).epsilon(1e-15));
    c.pilot_length = 100;
    c.pilot_coeff = 0.25;
    CHECK(c.prelog() == 0.5);
    c.pilot_length = 200;
    CHECK_THROWS_AS(c.prelog(), std::invalid_argument);
}

TEST_CASE("pilot rule sets tau_p = K N_u / 2 and xi = 1 / N_u")
{
    SystemConfig c;
    c.num_users = 4;
    c.num_reflect_users = c.num_transmit_users = 2;
    c.user_antennas = 3;
    c.apply_pilot_rule();
    CHECK(c.pilot_length == 6);
    CHECK(c.pilot_coeff == doctest::Approx(1.0 / 3.0));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("validate rejects configurations outside the invariants")
{
    auto broken = [](auto edit) {
        SystemConfig c;
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.num_reflect_users = 4; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.pilot_coeff = 0.3; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.pilot_length = 22; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.pilot_length = 240; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.noise_power = 0.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.penalty = -1.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(broken([](SystemConfig &c) { c.num_aps = 0; }).validate(), std::invalid_argument);
}

TEST_CASE("JSON round trip keeps every field")
{
    SystemConfig c;
    c.num_aps = 7;
    c.shadowing = true;
    c.gain_reference = GainReference::absolute;
    c.fp_squared_stop = false;
    c.admm_dual_check = false;
    const nlohmann::json j = c;
    const auto back = j.get<SystemConfig>();
    CHECK(nlohmann::json(back) == j);
    CHECK(j.at("M") == 7);
    CHECK(j.at("L") == 16);
}

TEST_CASE("dBm keys are accepted at the boundary")
{
    const auto c = nlohmann::json{{"p_d_dbm", 30.0}, {"sigma2_dbm", -100.0}}.get<SystemConfig>();
    CHECK(c.downlink_power == doctest::Approx(1000.0));
    CHECK(c.noise_power == doctest::Approx(1e-10));
    CHECK_THROWS(nlohmann::json{{"gain_reference", "bogus"}}.get<SystemConfig>());
}

TEST_CASE("seed derivation is deterministic and spreads nearby inputs")
{
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    std::set<std::uint64_t> seen;
    for (std::uint64_t root = 0; root < 20; ++root)
        for (std::uint64_t s = 0; s < 20; ++s)
            seen.insert(derive_seed(root, s));
    CHECK(seen.size() == 400);
}
