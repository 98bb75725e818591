// gridqfi — command-line front end: compute, sweep, validate
//
// Exit codes: 0 ok, 1 validation-suite failure, 2 config or usage error,
// 3 numerical error.

#include "gridqfi/errors.hpp"
#include "gridqfi/scenario.hpp"
#include "gridqfi/validate.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

enum Exit : int { kOk = 0, kValidationFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct OutputOptions {
    std::optional<gridqfi::OutputFormat> format;
    std::string out;
    bool timing{false};
};

void emit(const gridqfi::ScenarioConfig& config, const OutputOptions& opts,
          const gridqfi::ResultTable& table)
{
    const auto format = opts.format.value_or(config.format);
    const std::string path = opts.out.empty() ? config.output_path : opts.out;
    auto write = [&](std::ostream& os) {
        if (format == gridqfi::OutputFormat::Json) {
            gridqfi::write_json(os, table, opts.timing);
        } else {
            gridqfi::write_csv(os, table, opts.timing);
        }
    };
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw gridqfi::ConfigError(path, 0, "output.path", "cannot open for writing");
    write(file);
    if (!file) throw gridqfi::ConfigError(path, 0, "output.path", "write failed");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum Fisher information of deformed emitter grids"};
    app.require_subcommand(1);

    OutputOptions opts;
    const std::map<std::string, gridqfi::OutputFormat> formats{
        {"csv", gridqfi::OutputFormat::Csv}, {"json", gridqfi::OutputFormat::Json}};
    gridqfi::OutputFormat format_value{};
    auto add_output_flags = [&](CLI::App* cmd) {
        cmd->add_option("--format", format_value, "csv or json (overrides output.format)")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
            ->each([&](const std::string&) { opts.format = format_value; });
        cmd->add_option("--out", opts.out, "output file (overrides output.path; - for stdout)");
        cmd->add_flag("--timing", opts.timing, "add a wall_ms column");
    };

    std::string config_path;
    auto* compute = app.add_subcommand("compute", "QFIM (and QCRB) at a single parameter point");
    compute->add_option("config", config_path, "scenario file")->required();
    add_output_flags(compute);

    auto* sweep = app.add_subcommand("sweep", "QFIM over the configured sweep axes");
    sweep->add_option("config", config_path, "scenario file")->required();
    unsigned threads = 0;
    sweep->add_option("--threads", threads, "worker threads (0: all cores)");
    add_output_flags(sweep);

    std::string suite;
    std::uint64_t seed = gridqfi::kDefaultValidationSeed;
    auto* validate = app.add_subcommand("validate", "run self-check suites");
    validate->add_option("suite", suite, "generators, qfim, grid or all")
        ->required()
        ->check(CLI::IsMember({"generators", "qfim", "grid", "all"}));
    validate->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*validate) {
            const auto report = gridqfi::run_validation(suite, seed);
            gridqfi::print_report(std::cout, report);
            return report.passed() ? kOk : kValidationFailed;
        }
        const auto config = gridqfi::load_config(config_path);
        const auto table = *compute ? gridqfi::run_compute(config) : gridqfi::run_sweep(config, threads);
        emit(config, opts, table);
        return kOk;
    } catch (const gridqfi::SingularInformationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const gridqfi::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const gridqfi::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}
