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

// Thin pybind11 layer. Structured values cross the boundary as JSON text and
// are decoded by the pure-Python wrapper in starcf/__init__.py.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "starcf/experiment.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace
{

json row_json(const starcf::ResultRow &r)
{
    json j{{"experiment_id", r.experiment_id},
           {"figure_id", r.figure_id},
           {"seed", r.seed},
           {"M", r.M},
           {"N_ap", r.N_ap},
           {"K", r.K},
           {"K_r", r.K_r},
           {"K_t", r.K_t},
           {"N_u", r.N_u},
           {"L", r.L},
           {"d_spacing", r.d_spacing},
           {"algorithm", r.algorithm},
           {"alpha", nullptr},
           {"sum_se", r.sum_se},
           {"avg_se", r.avg_se},
           {"fp_iters", r.fp_iters},
           {"admm_iters_total", r.admm_iters_total},
           {"runtime_ms", r.runtime_ms}};
    if (r.alpha)
        j["alpha"] = *r.alpha;
    return j;
}

std::string run_json(const std::string &spec_text)
{
    const auto spec = json::parse(spec_text).get<starcf::ExperimentSpec>();
    starcf::ExperimentResult res;
    {
        py::gil_scoped_release release;
        res = starcf::run_experiment(spec);
    }
    json rows = json::array();
    for (const auto &r : res.rows)
        rows.push_back(row_json(r));
    return json{{"rows", rows}, {"metadata", res.metadata}}.dump();
}

std::string evaluate_json(const std::string &config_text, const std::string &surface, std::uint64_t seed,
                          const std::vector<std::string> &algorithms)
{
    const auto config = json::parse(config_text).get<starcf::SystemConfig>();
    std::vector<starcf::AlgorithmSpec> algos;
    for (const auto &a : algorithms)
        algos.push_back(starcf::AlgorithmSpec::parse(a));
    const auto outcomes = starcf::evaluate_instance(config, starcf::parse_surface(surface), seed, algos);
    json out = json::array();
    for (const auto &o : outcomes)
    {
        json e{{"algorithm", o.algorithm.label()},
               {"sum_se", o.se.sum_se},
               {"avg_se", o.se.avg_se},
               {"se_per_user", std::vector<double>(o.se.se_per_user.begin(), o.se.se_per_user.end())},
               {"runtime_ms", o.runtime_ms}};
        if (o.diagnostics)
            e["diagnostics"] = *o.diagnostics;
        out.push_back(std::move(e));
    }
    return out.dump();
}

std::string validate_json(int trials, int seeds, std::uint64_t root_seed)
{
    starcf::ValidationReport r;
    {
        py::gil_scoped_release release;
        r = starcf::validate_run(starcf::validation_config(), trials, seeds, root_seed);
    }
    return json{{"trials", r.trials},
                {"seeds", r.seeds},
                {"sufficient", r.sufficient},
                {"pass", r.pass},
                {"d_median", r.d_median},
                {"c_median", r.c_median},
                {"d_user_median", r.d_user_median},
                {"d_tolerance", r.d_tolerance},
                {"c_tolerance", r.c_tolerance},
                {"text", r.text()}}
        .dump();
}

std::string csv_text(const std::string &result_text)
{
    const json j = json::parse(result_text);
    std::vector<starcf::ResultRow> rows;
    for (const auto &e : j.at("rows"))
    {
        starcf::ResultRow r;
        e.at("experiment_id").get_to(r.experiment_id);
        e.at("figure_id").get_to(r.figure_id);
        e.at("seed").get_to(r.seed);
        e.at("M").get_to(r.M);
        e.at("N_ap").get_to(r.N_ap);
        e.at("K").get_to(r.K);
        e.at("K_r").get_to(r.K_r);
        e.at("K_t").get_to(r.K_t);
        e.at("N_u").get_to(r.N_u);
        e.at("L").get_to(r.L);
        e.at("d_spacing").get_to(r.d_spacing);
        e.at("algorithm").get_to(r.algorithm);
        if (!e.at("alpha").is_null())
            r.alpha = e.at("alpha").get<double>();
        e.at("sum_se").get_to(r.sum_se);
        e.at("avg_se").get_to(r.avg_se);
        e.at("fp_iters").get_to(r.fp_iters);
        e.at("admm_iters_total").get_to(r.admm_iters_total);
        e.at("runtime_ms").get_to(r.runtime_ms);
        rows.push_back(std::move(r));
    }
    std::ostringstream os;
    starcf::write_csv(os, rows);
    return os.str();
}

} // namespace

PYBIND11_MODULE(_starcf, m)
{
    m.doc() = "STAR-RIS cell-free massive MIMO simulator (native core)";
    m.attr("__version__") = starcf::kVersion;

    m.def("default_config_json", [] { return json(starcf::SystemConfig{}).dump(); });
    m.def("validate_config_json", [](const std::string &text) {
        auto c = json::parse(text).get<starcf::SystemConfig>();
        c.validate();
        return json(c).dump();
    });
    m.def("figure_preset_json", [](int figure, bool full) { return json(starcf::figure_preset(figure, full)).dump(); },
          py::arg("figure"), py::arg("full") = false);
    m.def("run_experiment_json", &run_json, py::arg("spec"));
    m.def("evaluate_instance_json", &evaluate_json, py::arg("config"), py::arg("surface"), py::arg("seed"),
          py::arg("algorithms"));
    m.def("validate_json", &validate_json, py::arg("trials"), py::arg("seeds"), py::arg("root_seed"));
    m.def("csv_text", &csv_text, py::arg("result"));
    m.def("csv_header", [] { return starcf::csv_header(); });
    m.def("trial_seed", &starcf::trial_seed, py::arg("root_seed"), py::arg("trial"));

    // C++ argument errors surface as ValueError
    py::register_exception_translator([](std::exception_ptr p) {
        try
        {
            if (p)
                std::rethrow_exception(p);
        }
        catch (const std::invalid_argument &e)
        {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });
}
