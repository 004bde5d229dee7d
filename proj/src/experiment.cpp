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

#include "starcf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "starcf/estimation.hpp"
#include "starcf/scenario.hpp"
#include "starcf/star_ris.hpp"

#ifndef STARCF_GIT_REVISION
#define STARCF_GIT_REVISION "unknown"
#endif

namespace starcf
{

Surface parse_surface(const std::string &name)
{
    if (name == "star")
        return Surface::star;
    if (name == "cris" || name == "conventional")
        return Surface::conventional;
    throw std::invalid_argument("unknown surface '" + name + "' (expected star or cris)");
}

std::string to_string(Surface s)
{
    return s == Surface::star ? "star" : "cris";
}

AlgorithmSpec AlgorithmSpec::parse(const std::string &text)
{
    AlgorithmSpec a;
    if (text == "admm_fp")
    {
        a.kind = Kind::admm_fp;
        return a;
    }
    if (text == "none")
        return a;
    if (text.rfind("fractional", 0) == 0)
    {
        a.kind = Kind::fractional;
        std::string rest = text.substr(std::string("fractional").size());
        if (rest.empty())
            return a;
        if (rest.front() == ':')
            rest = rest.substr(1);
        else if (rest.front() == '(' && rest.back() == ')')
            rest = rest.substr(1, rest.size() - 2);
        else
            throw std::invalid_argument("malformed algorithm '" + text + "'");
        std::size_t used = 0;
        try
        {
            a.alpha = std::stod(rest, &used);
        }
        catch (const std::exception &)
        {
            used = 0;
        }
        if (used == 0 || used != rest.size() || !(a.alpha >= 0.0 && a.alpha <= 1.0))
            throw std::invalid_argument("fractional exponent must be a number in [0, 1]: '" + text + "'");
        return a;
    }
    throw std::invalid_argument("unknown algorithm '" + text + "' (expected admm_fp, fractional[:alpha] or none)");
}

std::string AlgorithmSpec::name() const
{
    switch (kind)
    {
    case Kind::admm_fp:
        return "admm_fp";
    case Kind::fractional:
        return "fractional";
    case Kind::none:
        break;
    }
    return "none";
}

std::string AlgorithmSpec::label() const
{
    if (kind != Kind::fractional)
        return name();
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "fractional:" << alpha;
    return os.str();
}

bool apply_variable(SystemConfig &config, const std::string &variable, double value)
{
    auto as_count = [&](double v) {
        if (v < 1.0 || std::floor(v) != v)
            throw std::invalid_argument("sweep value for " + variable + " must be a positive integer");
        return int(v);
    };
    if (variable == "M")
        config.num_aps = as_count(value);
    else if (variable == "N_ap")
        config.ap_antennas = as_count(value);
    else if (variable == "K")
    {
        config.num_users = as_count(value);
        config.num_reflect_users = config.num_users / 2;
        config.num_transmit_users = config.num_users - config.num_reflect_users;
        return true;
    }
    else if (variable == "N_u")
    {
        config.user_antennas = as_count(value);
        return true;
    }
    else if (variable == "L")
    {
        const int L = as_count(value);
        const int side = int(std::lround(std::sqrt(double(L))));
        if (side * side != L)
            throw std::invalid_argument("L must be a perfect square for a square array");
        config.ris_cols = config.ris_rows = side;
    }
    else if (variable == "d_spacing")
    {
        if (!(value > 0.0))
            throw std::invalid_argument("d_spacing must be positive");
        config.element_width = config.element_height = value * config.wavelength;
    }
    else
    {
        nlohmann::json j = config;
        if (!j.contains(variable))
            throw std::invalid_argument("unknown sweep variable '" + variable + "'");
        j[variable] = j[variable].is_number_integer() ? nlohmann::json(as_count(value)) : nlohmann::json(value);
        config = j.get<SystemConfig>();
        return variable == "K_r" || variable == "K_t" || variable == "tau_p";
    }
    return false;
}

namespace
{

// An arm's overrides go through the same path as sweep variables.
bool apply_overrides(SystemConfig &config, const nlohmann::json &overrides)
{
    bool users_changed = false;
    for (const auto &[key, value] : overrides.items())
    {
        if (!value.is_number())
            throw std::invalid_argument("override '" + key + "' must be numeric");
        users_changed |= apply_variable(config, key, value.get<double>());
    }
    return users_changed;
}

struct Instance
{
    std::size_t arm = 0;
    std::optional<double> series_value;
    double sweep_value = 0.0;
    int trial = 0;
};

std::vector<Instance> enumerate(const ExperimentSpec &spec)
{
    std::vector<std::optional<double>> series;
    if (spec.series)
        series.assign(spec.series->values.begin(), spec.series->values.end());
    else
        series.push_back(std::nullopt);

    std::vector<Instance> out;
    for (std::size_t a = 0; a < spec.arms.size(); ++a)
        for (const auto &s : series)
            for (double v : spec.sweep.values)
                for (int t = 0; t < spec.trials; ++t)
                    out.push_back({a, s, v, t});
    return out;
}

SystemConfig resolve(const ExperimentSpec &spec, const Instance &inst)
{
    SystemConfig c = spec.base;
    bool pilot_rule = apply_overrides(c, spec.arms[inst.arm].overrides);
    if (spec.series && inst.series_value)
        pilot_rule |= apply_variable(c, spec.series->variable, *inst.series_value);
    pilot_rule |= apply_variable(c, spec.sweep.variable, inst.sweep_value);
    if (pilot_rule)
        c.apply_pilot_rule();
    c.validate();
    return c;
}

nlohmann::json axis_json(const SweepAxis &a)
{
    return {{"variable", a.variable}, {"values", a.values}};
}

SweepAxis axis_from(const nlohmann::json &j)
{
    SweepAxis a;
    j.at("variable").get_to(a.variable);
    j.at("values").get_to(a.values);
    return a;
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

void ExperimentSpec::validate() const
{
    if (sweep.variable.empty() || sweep.values.empty())
        throw std::invalid_argument("ExperimentSpec: sweep needs a variable and at least one value");
    if (series && (series->variable.empty() || series->values.empty()))
        throw std::invalid_argument("ExperimentSpec: series needs a variable and at least one value");
    if (arms.empty())
        throw std::invalid_argument("ExperimentSpec: at least one arm is required");
    if (algorithms.empty())
        throw std::invalid_argument("ExperimentSpec: at least one algorithm is required");
    if (trials < 1)
        throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (mc_trials < 1)
        throw std::invalid_argument("ExperimentSpec: mc_trials must be >= 1");
    // every resolved point must be a valid configuration; trial index does not matter
    for (const auto &inst : enumerate(*this))
        if (inst.trial == 0)
            resolve(*this, inst);
}

std::size_t ExperimentSpec::row_count() const
{
    const std::size_t s = series ? series->values.size() : 1;
    return arms.size() * s * sweep.values.size() * std::size_t(trials) * algorithms.size();
}

void to_json(nlohmann::json &j, const ExperimentSpec &s)
{
    nlohmann::json arms = nlohmann::json::array();
    for (const auto &a : s.arms)
        arms.push_back({{"label", a.label}, {"surface", to_string(a.surface)}, {"overrides", a.overrides}});
    std::vector<std::string> algorithms;
    for (const auto &a : s.algorithms)
        algorithms.push_back(a.label());
    j = nlohmann::json{
        {"experiment_id", s.experiment_id},
        {"figure_id", s.figure_id},
        {"base", s.base},
        {"sweep", axis_json(s.sweep)},
        {"arms", arms},
        {"algorithms", algorithms},
        {"trials", s.trials},
        {"mc_trials", s.mc_trials},
        {"root_seed", s.root_seed},
        {"threads", s.threads},
    };
    if (s.series)
        j["series"] = axis_json(*s.series);
}

void from_json(const nlohmann::json &j, ExperimentSpec &s)
{
    s = ExperimentSpec{};
    if (j.contains("experiment_id"))
        j.at("experiment_id").get_to(s.experiment_id);
    if (j.contains("figure_id"))
    {
        const auto &f = j.at("figure_id");
        s.figure_id = f.is_string() ? f.get<std::string>() : "fig" + std::to_string(f.get<int>());
    }
    if (j.contains("base"))
        s.base = j.at("base").get<SystemConfig>();
    s.sweep = axis_from(j.at("sweep"));
    if (j.contains("series") && !j.at("series").is_null())
        s.series = axis_from(j.at("series"));
    if (j.contains("arms"))
    {
        s.arms.clear();
        for (const auto &a : j.at("arms"))
        {
            ExperimentArm arm;
            arm.surface = parse_surface(a.value("surface", std::string("star")));
            arm.label = a.value("label", to_string(arm.surface));
            if (a.contains("overrides"))
                arm.overrides = a.at("overrides");
            s.arms.push_back(std::move(arm));
        }
    }
    else if (j.contains("surfaces"))
    {
        s.arms.clear();
        for (const auto &name : j.at("surfaces"))
        {
            const Surface surface = parse_surface(name.get<std::string>());
            s.arms.push_back({to_string(surface), surface, nlohmann::json::object()});
        }
    }
    if (j.contains("algorithms"))
        for (const auto &a : j.at("algorithms"))
            s.algorithms.push_back(AlgorithmSpec::parse(a.get<std::string>()));
    else
        s.algorithms = {AlgorithmSpec::parse("admm_fp"), AlgorithmSpec::parse("fractional:1"),
                        AlgorithmSpec::parse("none")};
    if (j.contains("trials"))
        j.at("trials").get_to(s.trials);
    if (j.contains("mc_trials"))
        j.at("mc_trials").get_to(s.mc_trials);
    if (j.contains("root_seed"))
        j.at("root_seed").get_to(s.root_seed);
    if (j.contains("threads"))
        j.at("threads").get_to(s.threads);
}

ExperimentSpec figure_preset(int figure, bool full)
{
    ExperimentSpec s;
    s.base.shadowing = true;
    s.algorithms = {AlgorithmSpec::parse("admm_fp"), AlgorithmSpec::parse("fractional:1"),
                    AlgorithmSpec::parse("none")};
    switch (figure)
    {
    case 2:
        s.experiment_id = s.figure_id = "fig2";
        s.base.num_users = 10;
        s.base.num_reflect_users = s.base.num_transmit_users = 5;
        s.base.user_antennas = 4;
        s.base.ris_cols = s.base.ris_rows = 4;
        s.sweep = {"M", {10, 20, 30, 40, 50}};
        s.series = SweepAxis{"N_ap", {2, 4}};
        break;
    case 3:
        s.experiment_id = s.figure_id = "fig3";
        s.base.num_aps = 20;
        s.base.ap_antennas = 4;
        s.base.num_users = 4;
        s.base.num_reflect_users = s.base.num_transmit_users = 2;
        s.base.ris_cols = s.base.ris_rows = 4;
        s.sweep = {"N_u", {1, 2, 3, 4, 5, 6}};
        break;
    case 4:
        s.experiment_id = s.figure_id = "fig4";
        s.base.num_aps = 20;
        s.base.ap_antennas = 4;
        s.base.num_users = 10;
        s.base.num_reflect_users = s.base.num_transmit_users = 5;
        s.base.user_antennas = 4;
        s.sweep = {"L", {16, 36, 64, 100}};
        if (full)
            s.sweep.values.push_back(196);
        s.arms = {{"star", Surface::star, nlohmann::json::object()},
                  {"cris", Surface::conventional, nlohmann::json::object()},
                  {"star-half-wavelength", Surface::star, nlohmann::json{{"d_spacing", 0.5}}}};
        break;
    default:
        throw std::invalid_argument("figure preset must be 2, 3 or 4");
    }
    s.base.apply_pilot_rule();
    return s;
}

std::uint64_t trial_seed(std::uint64_t root_seed, int trial)
{
    return derive_seed(root_seed, std::uint64_t(trial));
}

const std::vector<std::string> &csv_header()
{
    static const std::vector<std::string> header{
        "experiment_id", "figure_id", "seed", "M", "N_ap", "K", "K_r", "K_t", "N_u", "L", "d_spacing",
        "algorithm", "alpha", "sum_se", "avg_se", "fp_iters", "admm_iters_total", "runtime_ms"};
    return header;
}

void write_csv(std::ostream &out, const std::vector<ResultRow> &rows)
{
    std::ostringstream os;
    os.imbue(std::locale::classic()); // '.' decimal separator regardless of the process locale
    os.precision(17);
    const auto &h = csv_header();
    for (std::size_t i = 0; i < h.size(); ++i)
        os << (i ? "," : "") << h[i];
    os << '\n';
    for (const auto &r : rows)
    {
        os << r.experiment_id << ',' << r.figure_id << ',' << r.seed << ',' << r.M << ',' << r.N_ap << ',' << r.K
           << ',' << r.K_r << ',' << r.K_t << ',' << r.N_u << ',' << r.L << ',' << r.d_spacing << ',' << r.algorithm
           << ',';
        if (r.alpha)
            os << *r.alpha;
        os << ',' << r.sum_se << ',' << r.avg_se << ',' << r.fp_iters << ',' << r.admm_iters_total << ',';
        os.precision(6);
        os << r.runtime_ms << '\n';
        os.precision(17);
    }
    out << os.str();
}

std::vector<AlgorithmOutcome> evaluate_instance(const SystemConfig &config, Surface surface, std::uint64_t seed,
                                                const std::vector<AlgorithmSpec> &algorithms)
{
    const auto setup_start = std::chrono::steady_clock::now();
    const Scenario scenario = generate_scenario(config, seed);
    const StarRisState ris =
        surface == Surface::star ? default_star_ris(config, seed) : conventional_ris_pair(config, seed);
    const ChannelStatistics chan = channel_covariance(scenario, ris);
    const EstimationStatistics est = estimation_stats(chan, config, scenario.pilots);
    const double setup_ms = elapsed_ms(setup_start);

    std::vector<AlgorithmOutcome> out;
    for (const auto &algo : algorithms)
    {
        const auto start = std::chrono::steady_clock::now();
        AlgorithmOutcome o;
        o.algorithm = algo;
        switch (algo.kind)
        {
        case AlgorithmSpec::Kind::none:
            o.allocation = no_power_control(est, config);
            break;
        case AlgorithmSpec::Kind::fractional:
            o.allocation = fractional_power_control(chan, est, config, algo.alpha);
            break;
        case AlgorithmSpec::Kind::admm_fp: {
            FpResult fp = admm_fp_optimize(est, chan, config, no_power_control(est, config));
            o.allocation = std::move(fp.allocation);
            o.diagnostics = std::move(fp.diagnostics);
            break;
        }
        }
        o.se = closed_form_se(est, chan, o.allocation.eta, config);
        o.runtime_ms = setup_ms + elapsed_ms(start);
        out.push_back(std::move(o));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec &spec)
{
    spec.validate();
    const std::vector<Instance> instances = enumerate(spec);
    const std::size_t per_instance = spec.algorithms.size();
    std::vector<ResultRow> rows(instances.size() * per_instance);
    std::vector<nlohmann::json> diagnostics(instances.size() * per_instance);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < instances.size(); i = next++)
        {
            try
            {
                const Instance &inst = instances[i];
                const SystemConfig config = resolve(spec, inst);
                const ExperimentArm &arm = spec.arms[inst.arm];
                const std::uint64_t seed = trial_seed(spec.root_seed, inst.trial);
                const auto outcomes = evaluate_instance(config, arm.surface, seed, spec.algorithms);
                for (std::size_t a = 0; a < outcomes.size(); ++a)
                {
                    const auto &o = outcomes[a];
                    ResultRow &r = rows[i * per_instance + a];
                    r.experiment_id = spec.arms.size() > 1 || arm.label != "star"
                                          ? spec.experiment_id + "-" + arm.label
                                          : spec.experiment_id;
                    r.figure_id = spec.figure_id;
                    r.seed = seed;
                    r.M = config.num_aps;
                    r.N_ap = config.ap_antennas;
                    r.K = config.num_users;
                    r.K_r = config.num_reflect_users;
                    r.K_t = config.num_transmit_users;
                    r.N_u = config.user_antennas;
                    r.L = config.elements();
                    r.d_spacing = config.element_width / config.wavelength;
                    r.algorithm = o.algorithm.name();
                    if (o.algorithm.kind == AlgorithmSpec::Kind::fractional)
                        r.alpha = o.algorithm.alpha;
                    r.sum_se = o.se.sum_se;
                    r.avg_se = o.se.avg_se;
                    if (o.diagnostics)
                    {
                        r.fp_iters = o.diagnostics->fp_iterations;
                        r.admm_iters_total = o.diagnostics->admm_iterations_total;
                        diagnostics[i * per_instance + a] = *o.diagnostics;
                    }
                    r.runtime_ms = o.runtime_ms;
                }
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
                next = instances.size();
            }
        }
    };

    unsigned threads = spec.threads > 0 ? unsigned(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(std::max<std::size_t>(1, instances.size())));
    const auto start = std::chrono::steady_clock::now();
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (failure)
        std::rethrow_exception(failure);

    ExperimentResult result;
    result.rows = std::move(rows);

    int fp_cap_hits = 0, admm_cap_hits = 0, rejected = 0;
    nlohmann::json fp_runs = nlohmann::json::array();
    for (std::size_t i = 0; i < diagnostics.size(); ++i)
    {
        if (diagnostics[i].is_null())
            continue;
        fp_cap_hits += diagnostics[i]["fp_cap_hit"].get<bool>() ? 1 : 0;
        admm_cap_hits += diagnostics[i]["admm_cap_hits"].get<int>();
        rejected += diagnostics[i]["rejected_steps"].get<int>();
        nlohmann::json entry = diagnostics[i];
        entry["row"] = i;
        fp_runs.push_back(std::move(entry));
    }

    nlohmann::json points = nlohmann::json::array();
    for (const auto &inst : instances)
        if (inst.trial == 0)
        {
            nlohmann::json p = {{"arm", spec.arms[inst.arm].label}, {"config", resolve(spec, inst)}};
            if (inst.series_value)
                p[spec.series->variable] = *inst.series_value;
            p[spec.sweep.variable] = inst.sweep_value;
            points.push_back(std::move(p));
        }

    result.metadata = {
        {"code_version", kVersion},
        {"git_revision", STARCF_GIT_REVISION},
        {"spec", spec},
        {"seed_scheme", "scenario seed of trial t = splitmix64 mix of (root_seed, t); shared by every point, arm "
                        "and algorithm"},
        {"resolved_points", points},
        {"rows", result.rows.size()},
        {"csv_header", csv_header()},
        {"threads", threads},
        {"wall_time_ms", elapsed_ms(start)},
        {"fp_summary", {{"runs", fp_runs.size()}, {"fp_cap_hits", fp_cap_hits}, {"admm_cap_hits", admm_cap_hits},
                        {"rejected_steps", rejected}}},
        {"fp_diagnostics", fp_runs},
    };
    return result;
}

std::filesystem::path write_experiment(const ExperimentResult &result, const ExperimentSpec &spec,
                                       const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

    const auto csv_path = dir / (spec.experiment_id + ".csv");
    const auto meta_path = dir / (spec.experiment_id + ".meta.json");
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv)
            throw std::runtime_error("cannot open " + csv_path.string());
        write_csv(csv, result.rows);
        if (!csv.flush())
            throw std::runtime_error("write failed: " + csv_path.string());
    }
    {
        std::ofstream meta(meta_path, std::ios::binary);
        if (!meta)
            throw std::runtime_error("cannot open " + meta_path.string());
        meta << result.metadata.dump(2) << '\n';
        if (!meta.flush())
            throw std::runtime_error("write failed: " + meta_path.string());
    }
    return csv_path;
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (values.size() % 2)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

SystemConfig validation_config()
{
    SystemConfig c;
    c.num_aps = 4;
    c.ap_antennas = 4;
    c.num_users = 4;
    c.num_reflect_users = c.num_transmit_users = 2;
    c.user_antennas = 2;
    c.ris_cols = c.ris_rows = 4;
    c.apply_pilot_rule();
    return c;
}

ValidationReport validate_run(const SystemConfig &config, int trials, int seeds, std::uint64_t root_seed)
{
    config.validate();
    ValidationReport rep;
    rep.trials = trials;
    rep.seeds = seeds;
    rep.sufficient = trials >= kMinValidationTrials && seeds >= 1;
    if (!rep.sufficient)
        return rep;

    for (int s = 0; s < seeds; ++s)
    {
        const std::uint64_t seed = trial_seed(root_seed, s);
        const Scenario scenario = generate_scenario(config, seed);
        const StarRisState ris = default_star_ris(config, seed);
        const ChannelStatistics chan = channel_covariance(scenario, ris);
        const EstimationStatistics est = estimation_stats(chan, config, scenario.pilots);
        const PowerAllocation eta = no_power_control(est, config);
        const SeReport cf = closed_form_se(est, chan, eta.eta, config);

        Rng rng(stream_seed(seed, SeedStream::fading));
        const MomentEstimate mc = monte_carlo_moments(scenario, ris, est, eta.eta, config, trials, rng);
        const int M = chan.num_aps(), K = chan.num_users(), Nu = config.user_antennas;
        double gap = 0.0, scale = 0.0;
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
            {
                const Eigen::MatrixXcd ref = Eigen::MatrixXcd::Identity(Nu, Nu) * (est.z(m, k) * config.ap_antennas);
                gap += (mc.gain(m, k) - ref).squaredNorm();
                scale += ref.squaredNorm();
            }
        double d_err = 0.0, c_err = 0.0;
        for (int k = 0; k < K; ++k)
        {
            // streams are statistically identical, so pool them
            d_err = std::max(d_err, std::abs(mc.d_bar.row(k).mean() / cf.d_bar(k, 0) - 1.0));
            c_err = std::max(c_err, std::abs(mc.c_bar.row(k).mean() / cf.c_bar(k, 0) - 1.0));
        }
        rep.d_rel_error.push_back(std::sqrt(gap / scale));
        rep.d_user_rel_error.push_back(d_err);
        rep.c_rel_error.push_back(c_err);
    }
    rep.d_median = median(rep.d_rel_error);
    rep.c_median = median(rep.c_rel_error);
    rep.d_user_median = median(rep.d_user_rel_error);
    rep.pass = rep.d_median <= rep.d_tolerance && rep.c_median <= rep.c_tolerance;
    return rep;
}

std::string ValidationReport::text() const
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "moment validation: " << seeds << " drop(s) x " << trials << " channel realization(s)\n";
    if (!sufficient)
    {
        os << "INSUFFICIENT: at least " << kMinValidationTrials
           << " realizations per drop are needed before the tolerances mean anything\n";
        return os.str();
    }
    os.setf(std::ios::fixed);
    os.precision(4);
    os << (d_median <= d_tolerance ? "PASS" : "FAIL") << " E{G^H w} vs z N_ap I: median pooled rel. error "
       << 100.0 * d_median << "% (tol " << 100.0 * d_tolerance << "%)\n";
    os << "info per-user coherent gain D: median max rel. error " << 100.0 * d_user_median << "%\n";
    os << (c_median <= c_tolerance ? "PASS" : "FAIL") << " second moment C: median max rel. error "
       << 100.0 * c_median << "% (tol " << 100.0 * c_tolerance << "%)\n";
    os << (pass ? "overall: PASS" : "overall: FAIL") << '\n';
    return os.str();
}

} // namespace starcf
