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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starcf/config.hpp"
#include "starcf/power_allocation.hpp"
#include "starcf/spectral_efficiency.hpp"

namespace starcf
{

inline constexpr const char *kVersion = "0.1.0";
/// Environment variable consulted for the root seed when no flag is given.
inline constexpr const char *kSeedEnv = "STARCF_SEED";

enum class Surface
{
    star,
    conventional, // two co-located L/2-element surfaces, one reflecting and one transmitting
};

Surface parse_surface(const std::string &name);
std::string to_string(Surface s);

struct AlgorithmSpec
{
    enum class Kind
    {
        admm_fp,
        fractional,
        none,
    } kind = Kind::none;
    double alpha = 1.0; // fractional only

    /// "admm_fp", "none", "fractional" (alpha 1), "fractional:0.5" or "fractional(0.5)".
    static AlgorithmSpec parse(const std::string &text);
    std::string name() const;  // CSV algorithm column
    std::string label() const; // round-trips through parse
};

/// Sets one named parameter: M, N_ap, K (splits K_r = K/2), N_u, L (square
/// array), d_spacing (element size in wavelengths), or any SystemConfig JSON
/// key. Returns true if the variable changes K or N_u.
bool apply_variable(SystemConfig &config, const std::string &variable, double value);

struct SweepAxis
{
    std::string variable;
    std::vector<double> values;
};

/// One comparison arm: the surface type plus parameter overrides.
struct ExperimentArm
{
    std::string label;
    Surface surface = Surface::star;
    nlohmann::json overrides = nlohmann::json::object();
};

struct ExperimentSpec
{
    std::string experiment_id = "custom";
    std::string figure_id = "custom";
    SystemConfig base;
    SweepAxis sweep;
    std::optional<SweepAxis> series; // optional second axis (e.g. N_ap in the M sweep)
    std::vector<ExperimentArm> arms{{"star", Surface::star, nlohmann::json::object()}};
    std::vector<AlgorithmSpec> algorithms;
    int trials = 20;
    int mc_trials = 10000; // used by validation runs
    std::uint64_t root_seed = 1;
    int threads = 0; // 0 picks hardware concurrency

    /// Throws std::invalid_argument on empty value lists, trials < 1, or a
    /// resolved configuration outside SystemConfig's invariants.
    void validate() const;
    /// Row count: |arms| x |series| x |sweep| x trials x |algorithms|.
    std::size_t row_count() const;
};

void to_json(nlohmann::json &j, const ExperimentSpec &s);
void from_json(const nlohmann::json &j, ExperimentSpec &s);

/// Figure presets 2, 3 and 4. `full` adds L = 196 to the figure 4 sweep.
ExperimentSpec figure_preset(int figure, bool full = false);

/// Scenario seed of trial t. Shared across sweep points, arms and algorithms,
/// so every comparison is paired on the same drop.
std::uint64_t trial_seed(std::uint64_t root_seed, int trial);

struct ResultRow
{
    std::string experiment_id;
    std::string figure_id;
    std::uint64_t seed = 0;
    int M = 0, N_ap = 0, K = 0, K_r = 0, K_t = 0, N_u = 0, L = 0;
    double d_spacing = 0.0; // element size in wavelengths
    std::string algorithm;
    std::optional<double> alpha;
    double sum_se = 0.0;
    double avg_se = 0.0;
    int fp_iters = 0;
    int admm_iters_total = 0;
    double runtime_ms = 0.0;
};

const std::vector<std::string> &csv_header();
void write_csv(std::ostream &out, const std::vector<ResultRow> &rows);

struct AlgorithmOutcome
{
    AlgorithmSpec algorithm;
    PowerAllocation allocation;
    SeReport se;
    std::optional<FpDiagnostics> diagnostics;
    double runtime_ms = 0.0;
};

/// Draws the scenario for `seed`, builds the requested surface and evaluates
/// each algorithm. ADMM-FP starts from the no-power-control allocation.
std::vector<AlgorithmOutcome> evaluate_instance(const SystemConfig &config, Surface surface, std::uint64_t seed,
                                                const std::vector<AlgorithmSpec> &algorithms);

struct ExperimentResult
{
    std::vector<ResultRow> rows;
    nlohmann::json metadata;
};

/// Runs every (arm, series, sweep value, trial) instance on a worker pool and
/// returns rows in spec order.
ExperimentResult run_experiment(const ExperimentSpec &spec);

/// Writes <dir>/<experiment_id>.csv and <dir>/<experiment_id>.meta.json.
/// Throws std::runtime_error on I/O failure.
std::filesystem::path write_experiment(const ExperimentResult &result, const ExperimentSpec &spec,
                                       const std::filesystem::path &dir);

/// Monte Carlo check of the closed-form moments at a small configuration.
struct ValidationReport
{
    int trials = 0;
    int seeds = 0;
    bool sufficient = false; // fewer than kMinValidationTrials samples cannot support the tolerances
    double d_tolerance = 0.02;
    double c_tolerance = 0.05;
    // per seed: |E_mc{G^H w} - z N_ap I|_F / |z N_ap I|_F pooled over every (m, k)
    std::vector<double> d_rel_error;
    // per seed: max over users of |C_mc - C| / C
    std::vector<double> c_rel_error;
    // per seed: max over users of |D_mc - D| / D (reported, not gated)
    std::vector<double> d_user_rel_error;
    double d_median = 0.0;
    double c_median = 0.0;
    double d_user_median = 0.0;
    bool pass = false;

    std::string text() const;
};

inline constexpr int kMinValidationTrials = 100;

/// Small default: M = 4, K = 4 (K_r = K_t = 2), N_u = 2, L = 16.
SystemConfig validation_config();

/// Runs `seeds` independent drops with `trials` channel realizations each under
/// no power control. Seeds derive from root_seed; single-threaded.
ValidationReport validate_run(const SystemConfig &config, int trials, int seeds, std::uint64_t root_seed);

double median(std::vector<double> values);

} // namespace starcf
