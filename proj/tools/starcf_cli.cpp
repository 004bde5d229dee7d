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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "starcf/experiment.hpp"

namespace
{

// Flag first, then the environment, then the built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag, std::uint64_t fallback)
{
    if (flag)
        return *flag;
    if (const char *env = std::getenv(starcf::kSeedEnv); env && *env)
    {
        std::size_t used = 0;
        const std::string text(env);
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size())
            throw std::invalid_argument(std::string(starcf::kSeedEnv) + " is not an unsigned integer");
        return v;
    }
    return fallback;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"STAR-RIS cell-free massive MIMO simulator"};
    app.set_version_flag("--version", starcf::kVersion);
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "run a sweep and write <out>/<experiment_id>.csv plus .meta.json");
    std::string spec_file, out_dir = "results";
    int figure = 0, trials = 0, threads = 0;
    std::optional<std::uint64_t> run_seed;
    bool full = false;
    auto *spec_opt = run->add_option("--spec", spec_file, "experiment spec (JSON)")->check(CLI::ExistingFile);
    auto *fig_opt = run->add_option("--figure", figure, "figure preset")->check(CLI::IsMember({2, 3, 4}));
    spec_opt->excludes(fig_opt);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--seed", run_seed, std::string("root seed (default: $") + starcf::kSeedEnv + " or the spec)");
    run->add_option("--trials", trials, "scenario seeds per point (overrides the spec)")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    run->add_flag("--full", full, "figure 4 only: extend the L sweep to 196");

    auto *validate = app.add_subcommand("validate", "Monte Carlo check of the closed-form moments");
    int val_trials = 10000, val_seeds = 20;
    std::optional<std::uint64_t> val_seed;
    validate->add_option("--trials", val_trials, "channel realizations per drop")->capture_default_str();
    validate->add_option("--seeds", val_seeds, "independent drops")->capture_default_str()->check(CLI::PositiveNumber);
    validate->add_option("--seed", val_seed, "root seed");

    auto *print = app.add_subcommand("print-config", "print the resolved configuration as JSON");
    int print_figure = 0;
    print->add_option("--figure", print_figure, "show a figure preset instead of the defaults")
        ->check(CLI::IsMember({2, 3, 4}));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            if (!*spec_opt && !*fig_opt)
                throw std::invalid_argument("run: pass --spec FILE or --figure {2,3,4}");
            starcf::ExperimentSpec spec;
            if (*spec_opt)
            {
                std::ifstream in(spec_file);
                spec = nlohmann::json::parse(in).get<starcf::ExperimentSpec>();
            }
            else
            {
                spec = starcf::figure_preset(figure, full);
            }
            spec.root_seed = resolve_seed(run_seed, spec.root_seed);
            if (trials > 0)
                spec.trials = trials;
            if (threads > 0)
                spec.threads = threads;
            const auto result = starcf::run_experiment(spec);
            const auto path = starcf::write_experiment(result, spec, out_dir);
            std::cout << "wrote " << result.rows.size() << " rows to " << path.string() << '\n';
            return 0;
        }
        if (*validate)
        {
            const auto report = starcf::validate_run(starcf::validation_config(), val_trials, val_seeds,
                                                     resolve_seed(val_seed, 1));
            std::cout << report.text();
            if (!report.sufficient)
                return 2;
            return report.pass ? 0 : 1;
        }
        if (*print)
        {
            if (print_figure)
                std::cout << nlohmann::json(starcf::figure_preset(print_figure)).dump(2) << '\n';
            else
                std::cout << nlohmann::json(starcf::SystemConfig{}).dump(2) << '\n';
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
