// scenario_output.cpp — CSV and JSON result writers

#include "gridqfi/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>

namespace gridqfi {

namespace {

enum class CellKind { Number, Bool };

struct Cell {
    CellKind kind{CellKind::Number};
    double number{0.0};
    bool flag{false};
};

std::vector<Cell> cells(const ResultTable& table, const ResultRow& row, bool timing)
{
    std::vector<Cell> out;
    for (double c : row.coords) out.push_back({CellKind::Number, c, false});
    for (Eigen::Index m = 0; m < row.info.rows(); ++m) {
        for (Eigen::Index n = 0; n < row.info.cols(); ++n) {
            out.push_back({CellKind::Number, row.info(m, n), false});
        }
    }
    if (table.has_qcrb) out.push_back({CellKind::Number, row.qcrb.value_or(NAN), false});
    for (double q : row.qcrb_diag) out.push_back({CellKind::Number, q, false});
    if (table.has_oscillation) out.push_back({CellKind::Bool, 0.0, row.oscillation.value_or(false)});
    if (timing) out.push_back({CellKind::Number, row.wall_ms, false});
    return out;
}

} // namespace

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", value);
}

void write_csv(std::ostream& out, const ResultTable& table, bool timing)
{
    const auto cols = table.columns(timing);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& row : table.rows) {
        const auto cs = cells(table, row, timing);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (i) out << ',';
            if (cs[i].kind == CellKind::Bool) out << (cs[i].flag ? "true" : "false");
            else out << format_number(cs[i].number);
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const ResultTable& table, bool timing)
{
    const auto cols = table.columns(timing);
    out << "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto cs = cells(table, table.rows[r], timing);
        out << (r ? ",\n " : "\n ") << "{";
        for (std::size_t i = 0; i < cs.size(); ++i) {
            out << (i ? ", " : "") << '"' << cols[i] << "\": ";
            if (cs[i].kind == CellKind::Bool) {
                out << (cs[i].flag ? "true" : "false");
            } else if (!std::isfinite(cs[i].number)) {
                out << "null";
            } else {
                out << format_number(cs[i].number);
            }
        }
        out << "}";
    }
    out << (table.rows.empty() ? "]\n" : "\n]\n");
}

} // namespace gridqfi
