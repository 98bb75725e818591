// scenario_run.cpp — evaluating scenarios at one point or over a sweep

#include "gridqfi/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace gridqfi {

namespace {

bool is_single_rotation(const DeformationMap& map)
{
    return map.stages().size() == 1 && std::holds_alternative<deform::Rotation>(map.stages().front());
}

ResultTable empty_table(const ScenarioConfig& config, bool with_sweeps)
{
    ResultTable table;
    if (with_sweeps) {
        for (const auto& axis : config.sweeps) table.sweep_names.push_back(axis.variable);
    }
    table.labels = config.deformation.param_labels();
    table.has_qcrb = config.cost_matrix.has_value();
    table.has_oscillation = is_single_rotation(config.deformation);
    return table;
}

} // namespace

std::vector<std::string> ResultTable::columns(bool timing) const
{
    std::vector<std::string> cols = sweep_names;
    for (const auto& a : labels) {
        for (const auto& b : labels) cols.push_back("I_" + a + b);
    }
    if (has_qcrb) cols.push_back("qcrb");
    for (const auto& a : labels) cols.push_back("qcrb_" + a);
    if (has_oscillation) cols.push_back("oscillation");
    if (timing) cols.push_back("wall_ms");
    return cols;
}

ScenarioConfig at_point(const ScenarioConfig& base, const std::vector<double>& coords)
{
    ScenarioConfig cfg = base;
    const auto names = cfg.deformation.param_names();
    ParamVector params = cfg.deformation.params();
    for (std::size_t i = 0; i < coords.size() && i < cfg.sweeps.size(); ++i) {
        const std::string& v = cfg.sweeps[i].variable;
        const double x = coords[i];
        if (v == "N") cfg.grid.N = static_cast<int>(x);
        else if (v == "M") cfg.grid.M = static_cast<int>(x);
        else if (v == "NM") cfg.grid.N = cfg.grid.M = static_cast<int>(x);
        else if (v == "d_x") cfg.grid.d_x = x;
        else if (v == "d_y") cfg.grid.d_y = x;
        else if (v == "rho") cfg.grid.rho = x;
        else {
            const auto it = std::find(names.begin(), names.end(), v);
            params(it - names.begin()) = x;
        }
    }
    const std::string key = coords.empty() ? "grid" : "sweep.variable";
    try {
        cfg.grid.validate();
        cfg.deformation.set_params(params);
    } catch (const ValidationError& e) {
        throw ConfigError("<sweep>", 0, key, e.what());
    }
    return cfg;
}

ResultRow evaluate_point(const ScenarioConfig& config, std::vector<double> coords)
{
    const auto start = std::chrono::steady_clock::now();
    const ScenarioConfig cfg = at_point(config, coords);

    ResultRow row;
    row.coords = std::move(coords);
    const InfoMatrix info = qfim_grid(cfg.grid, cfg.deformation, cfg.deformation.params());
    row.info = info.entries;
    for (Eigen::Index p = 0; p < info.size(); ++p) {
        const double ipp = info(p, p);
        row.qcrb_diag.push_back(ipp > 0.0 ? 1.0 / ipp : std::numeric_limits<double>::infinity());
    }
    if (cfg.cost_matrix) {
        row.qcrb = qcrb_scalar(info, CostMatrix(*cfg.cost_matrix), cfg.repetitions);
    }
    if (is_single_rotation(cfg.deformation)) {
        row.oscillation = oscillation_criteria(cfg.grid).oscillates;
    }
    const auto stop = std::chrono::steady_clock::now();
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return row;
}

ResultTable run_compute(const ScenarioConfig& config)
{
    ResultTable table = empty_table(config, false);
    ScenarioConfig single = config;
    single.sweeps.clear();
    table.rows.push_back(evaluate_point(single));
    return table;
}

ResultTable run_sweep(const ScenarioConfig& config, unsigned threads)
{
    if (config.sweeps.empty()) {
        throw ConfigError("<config>", 0, "sweep.variable", "sweep requested but no sweep axis configured");
    }
    ResultTable table = empty_table(config, true);

    std::vector<std::vector<double>> points;
    const SweepAxis& outer = config.sweeps.front();
    for (int i = 0; i < outer.steps; ++i) {
        if (config.sweeps.size() == 1) {
            points.push_back({outer.value(i)});
            continue;
        }
        const SweepAxis& inner = config.sweeps[1];
        for (int k = 0; k < inner.steps; ++k) points.push_back({outer.value(i), inner.value(k)});
    }

    std::vector<ResultRow> rows(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                rows[i] = evaluate_point(config, points[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned count = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    count = static_cast<unsigned>(std::min<std::size_t>(count, points.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
        worker();
    }
    // Report the first failure in sweep order, independent of scheduling.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    table.rows = std::move(rows);
    return table;
}

} // namespace gridqfi
