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

#include "starcf/scenario.hpp"

#include "starcf/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace starcf
{

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace pathloss
{

double hata_constant_db()
{
    const double lf = std::log10(kCarrierMHz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(kApHeight) - (1.1 * lf - 0.7) * kUserHeight + (1.56 * lf - 0.8);
}

double gain_db(double d)
{
    if (!(d > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive, got " + std::to_string(d));
    const double L = hata_constant_db();
    if (d > kBreak1Km)
        return -L - 35.0 * std::log10(d);
    if (d > kBreak0Km)
        return -L - 15.0 * std::log10(kBreak1Km) - 20.0 * std::log10(d);
    return -L - 15.0 * std::log10(kBreak1Km) - 20.0 * std::log10(kBreak0Km);
}

} // namespace pathloss

double path_loss(double distance_km, double shadowing_db)
{
    double db = pathloss::gain_db(distance_km);
    if (distance_km > pathloss::kBreak1Km)
        db += shadowing_db;
    return std::pow(10.0, db / 10.0);
}

double flat_region_gain() { return path_loss(pathloss::kBreak0Km); }

PilotAssignment assign_pilots(int num_users, int user_antennas, int pilot_length, std::uint64_t seed)
{
    if (num_users < 1 || user_antennas < 1 || pilot_length < 1)
        throw std::invalid_argument("assign_pilots: counts must be positive");
    if (pilot_length % user_antennas != 0)
        throw std::invalid_argument("assign_pilots: tau_p must be a multiple of N_u");
    const int num_groups = pilot_length / user_antennas;
    if (num_groups > num_users || num_users % num_groups != 0)
        throw std::invalid_argument("assign_pilots: tau_p/N_u = " + std::to_string(num_groups) +
                                    " does not divide K = " + std::to_string(num_users));

    std::vector<int> order(num_users);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    // Fisher-Yates with an explicit draw so the permutation is identical across standard libraries
    for (int i = num_users - 1; i > 0; --i)
    {
        const int j = int(rng() % std::uint64_t(i + 1));
        std::swap(order[i], order[j]);
    }

    PilotAssignment out;
    out.groups.assign(num_groups, {});
    out.group_of.assign(num_users, -1);
    for (int i = 0; i < num_users; ++i)
    {
        const int g = i % num_groups;
        out.groups[g].push_back(order[i]);
        out.group_of[order[i]] = g;
    }
    for (auto &g : out.groups)
        std::sort(g.begin(), g.end());
    return out;
}

std::uint64_t stream_seed(std::uint64_t scenario_seed, SeedStream s)
{
    return derive_seed(scenario_seed, static_cast<std::uint64_t>(s));
}

Scenario generate_scenario(const SystemConfig &config, std::uint64_t seed)
{
    config.validate();
    Scenario s;
    s.ris_position = {0.5, 0.5};

    Rng ap_rng(stream_seed(seed, SeedStream::aps));
    s.ap_positions.resize(config.num_aps);
    for (auto &p : s.ap_positions)
    {
        p.x = uniform(ap_rng, -0.5, 0.5);
        p.y = uniform(ap_rng, -0.5, 0.5);
    }

    Rng user_rng(stream_seed(seed, SeedStream::users));
    s.user_positions.resize(config.num_users);
    s.mode.resize(config.num_users);
    for (int k = 0; k < config.num_users; ++k)
    {
        auto &p = s.user_positions[k];
        p.x = uniform(user_rng, 0.0, 0.8);
        const double v = uniform(user_rng, 0.0, 1.0);
        if (k < config.num_reflect_users)
        {
            s.mode[k] = Mode::reflection;
            p.y = 0.5 * v; // [0, 0.5)
        }
        else
        {
            s.mode[k] = Mode::transmission;
            p.y = 0.8 - 0.3 * v; // (0.5, 0.8]
        }
    }

    Rng shadow_rng(stream_seed(seed, SeedStream::shadowing));
    const double ref = config.gain_reference == GainReference::flat_region ? flat_region_gain() : 1.0;
    auto gain = [&](Point2 p) {
        const double sh = config.shadowing ? config.shadowing_std_db * standard_normal(shadow_rng) : 0.0;
        return path_loss(distance(p, s.ris_position), sh) / ref;
    };
    s.beta_ap.resize(config.num_aps);
    for (int m = 0; m < config.num_aps; ++m)
        s.beta_ap[m] = gain(s.ap_positions[m]);
    s.beta_u.resize(config.num_users);
    for (int k = 0; k < config.num_users; ++k)
        s.beta_u[k] = gain(s.user_positions[k]);

    s.pilots = assign_pilots(config.num_users, config.user_antennas, config.pilot_length,
                             stream_seed(seed, SeedStream::pilots));
    return s;
}

void to_json(nlohmann::json &j, const Scenario &s)
{
    auto points = [](const std::vector<Point2> &v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto &p : v)
            a.push_back({p.x, p.y});
        return a;
    };
    std::vector<std::string> modes;
    for (auto m : s.mode)
        modes.emplace_back(to_string(m));
    j = nlohmann::json{
        {"ris_position", {s.ris_position.x, s.ris_position.y}},
        {"ap_positions", points(s.ap_positions)},
        {"user_positions", points(s.user_positions)},
        {"beta_ap", std::vector<double>(s.beta_ap.data(), s.beta_ap.data() + s.beta_ap.size())},
        {"beta_u", std::vector<double>(s.beta_u.data(), s.beta_u.data() + s.beta_u.size())},
        {"mode", modes},
        {"pilot_groups", s.pilots.groups},
    };
}

void from_json(const nlohmann::json &j, Scenario &s)
{
    auto points = [](const nlohmann::json &a) {
        std::vector<Point2> v;
        for (const auto &p : a)
            v.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return v;
    };
    const auto ris = j.at("ris_position");
    s.ris_position = {ris.at(0).get<double>(), ris.at(1).get<double>()};
    s.ap_positions = points(j.at("ap_positions"));
    s.user_positions = points(j.at("user_positions"));
    const auto bap = j.at("beta_ap").get<std::vector<double>>();
    const auto bu = j.at("beta_u").get<std::vector<double>>();
    s.beta_ap = Eigen::Map<const Eigen::VectorXd>(bap.data(), Eigen::Index(bap.size()));
    s.beta_u = Eigen::Map<const Eigen::VectorXd>(bu.data(), Eigen::Index(bu.size()));
    s.mode.clear();
    for (const auto &m : j.at("mode"))
        s.mode.push_back(m.get<std::string>() == "reflection" ? Mode::reflection : Mode::transmission);
    s.pilots.groups = j.at("pilot_groups").get<std::vector<std::vector<int>>>();
    s.pilots.group_of.assign(s.user_positions.size(), -1);
    for (int g = 0; g < int(s.pilots.groups.size()); ++g)
        for (int k : s.pilots.groups[g])
            s.pilots.group_of.at(k) = g;
}

} // namespace starcf
