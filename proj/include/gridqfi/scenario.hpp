// scenario.hpp — scenario configs, single-point and swept QFIM evaluation,
// CSV/JSON result tables

#pragma once

#include "gridqfi/errors.hpp"
#include "gridqfi/fisher.hpp"
#include "gridqfi/grid.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridqfi {

// Config problem with the offending line (0 when not tied to a line) and key.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& source, int line, const std::string& key,
                const std::string& message);
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

enum class OutputFormat { Csv, Json };

struct SweepAxis {
    std::string variable; // N, M, NM, d_x, d_y, rho, or a deformation parameter name
    double from{0.0};
    double to{0.0};
    int steps{1};
    bool half_open{false}; // exclude `to` (default theta sweep over [0, 2 pi))

    bool is_integer() const;
    double value(int i) const;
};

struct ScenarioConfig {
    EmitterGrid grid;
    DeformationMap deformation{DeformationMap::stretch()};
    std::vector<SweepAxis> sweeps; // outer axis first; at most two
    std::string output_path;       // empty: stdout
    OutputFormat format{OutputFormat::Csv};
    std::optional<Eigen::MatrixXd> cost_matrix;
    int repetitions{1};
};

inline constexpr int kDefaultThetaSteps = 256;

// Flat "dotted.key = value" text; '#' starts a comment. Throws ConfigError.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

struct ResultRow {
    std::vector<double> coords;      // one per sweep axis
    Eigen::MatrixXd info;            // QFIM at this point
    std::optional<double> qcrb;      // Tr(R I^-1)/nu when a cost matrix is set
    std::vector<double> qcrb_diag;   // 1 / I_pp per parameter (inf when I_pp = 0)
    std::optional<bool> oscillation; // rotation scenarios only
    double wall_ms{0.0};
};

struct ResultTable {
    std::vector<std::string> sweep_names;
    std::vector<std::string> labels; // one-letter parameter labels
    bool has_qcrb{false};
    bool has_oscillation{false};
    std::vector<ResultRow> rows;

    std::vector<std::string> columns(bool timing = false) const;
};

// The scenario at one sweep point. Throws ConfigError for coordinates that
// break a grid invariant.
ScenarioConfig at_point(const ScenarioConfig& base, const std::vector<double>& coords);

ResultRow evaluate_point(const ScenarioConfig& config, std::vector<double> coords = {});

// Single parameter point (sweeps ignored).
ResultTable run_compute(const ScenarioConfig& config);

// Every sweep point, outer axis slow, inner fast. Points run on `threads`
// workers (0: hardware concurrency); row order does not depend on it.
ResultTable run_sweep(const ScenarioConfig& config, unsigned threads = 0);

// UTF-8, header row, ',' delimiter, LF line endings, 17 significant digits.
void write_csv(std::ostream& out, const ResultTable& table, bool timing = false);
// Array of objects keyed like the CSV columns.
void write_json(std::ostream& out, const ResultTable& table, bool timing = false);

std::string format_number(double value);

} // namespace gridqfi
