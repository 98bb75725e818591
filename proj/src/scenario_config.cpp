// scenario_config.cpp — parsing of flat dotted-key scenario files

#include "gridqfi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace gridqfi {

namespace {

struct Entry {
    std::string value;
    int line{0};
};

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

bool is_angle_name(const std::string& name)
{
    return name == "theta" || name.rfind("theta_", 0) == 0;
}

// Looks up keys, converts values and remembers which keys were consumed.
class Reader {
public:
    Reader(std::string source, std::map<std::string, Entry> entries)
        : source_(std::move(source)), entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const
    {
        const auto it = entries_.find(key);
        throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line, key, message);
    }

    std::optional<std::string> text(const std::string& key)
    {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        used_.insert(key);
        return it->second.value;
    }

    std::optional<double> real(const std::string& key)
    {
        const auto t = text(key);
        if (!t) return std::nullopt;
        return to_real(key, *t);
    }

    std::optional<int> integer(const std::string& key)
    {
        const auto t = text(key);
        if (!t) return std::nullopt;
        return to_integer(key, *t);
    }

    double to_real(const std::string& key, const std::string& t) const
    {
        try {
            std::size_t pos = 0;
            const double v = std::stod(t, &pos);
            if (pos != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            fail(key, "expected a finite number, got '" + t + "'");
        }
    }

    int to_integer(const std::string& key, const std::string& t) const
    {
        try {
            std::size_t pos = 0;
            const long v = std::stol(t, &pos);
            if (pos != t.size() || v < -1000000000L || v > 1000000000L) {
                throw std::invalid_argument(t);
            }
            return static_cast<int>(v);
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + t + "'");
        }
    }

    // A value given either in radians under `key` or in degrees under key_deg.
    std::optional<double> angle(const std::string& key)
    {
        const auto rad = real(key);
        const auto deg = real(key + "_deg");
        if (rad && deg) fail(key, "given both in radians and in degrees");
        if (deg) return *deg * std::numbers::pi / 180.0;
        return rad;
    }

    void reject_unused() const
    {
        for (const auto& [key, entry] : entries_) {
            if (!used_.count(key)) fail(key, "unknown key");
        }
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

std::vector<deform::Stage> parse_stages(Reader& r)
{
    const auto kind = r.text("deformation.kind");
    if (!kind) r.fail("deformation.kind", "missing required key");

    auto one = [&](const std::string& name, const std::string& key) -> deform::Stage {
        if (name == "stretch") return deform::Stretch{};
        if (name == "shear") return deform::Shear{};
        if (name == "rotation") return deform::Rotation{};
        if (name == "inhom_exp") return deform::InhomExp{};
        r.fail(key, "unknown deformation kind '" + name +
                        "' (expected stretch, shear, rotation, inhom_exp or composite)");
    };

    if (*kind == "composite") {
        const auto stages = r.text("deformation.stages");
        if (!stages) r.fail("deformation.stages", "composite deformation needs a stage list");
        std::vector<deform::Stage> out;
        for (const auto& name : split(*stages, ',')) {
            if (name == "composite") r.fail("deformation.stages", "stages cannot nest");
            out.push_back(one(name, "deformation.stages"));
        }
        if (out.empty()) r.fail("deformation.stages", "empty stage list");
        return out;
    }
    if (r.has("deformation.stages")) {
        r.fail("deformation.stages", "only valid with deformation.kind = composite");
    }
    return {one(*kind, "deformation.kind")};
}

DeformationMap parse_deformation(Reader& r)
{
    auto stages = parse_stages(r);
    DeformationMap map(stages);
    const auto names = map.param_names();
    ParamVector params = map.params();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string key = "deformation." + names[i];
        const auto value = is_angle_name(names[i]) ? r.angle(key) : r.real(key);
        if (value) {
            params(static_cast<Eigen::Index>(i)) = *value;
        } else if (names[i].rfind("gamma", 0) == 0) {
            r.fail(key, "inhom_exp needs an explicit gamma (no identity value exists)");
        }
        if (names[i].rfind("gamma", 0) == 0 && params(static_cast<Eigen::Index>(i)) == 0.0) {
            r.fail(key, "gamma must be non-zero");
        }
    }
    map.set_params(params);
    return map;
}

EmitterGrid parse_grid(Reader& r)
{
    EmitterGrid g;
    g.N = r.integer("grid.N").value_or(1);
    g.M = r.integer("grid.M").value_or(1);
    g.d_x = r.real("grid.d_x").value_or(1.0);
    g.d_y = r.real("grid.d_y").value_or(1.0);
    if (const auto s = r.real("grid.sigma")) {
        if (r.has("grid.sigma_x") || r.has("grid.sigma_y")) {
            r.fail("grid.sigma", "give either grid.sigma or grid.sigma_x/grid.sigma_y");
        }
        g.sigma_x = g.sigma_y = *s;
    } else {
        g.sigma_x = r.real("grid.sigma_x").value_or(1.0);
        g.sigma_y = r.real("grid.sigma_y").value_or(1.0);
    }
    g.rho = r.real("grid.rho").value_or(0.0);
    if (const auto p = r.text("grid.photons")) {
        g.photons.clear();
        for (const auto& item : split(*p, ',')) g.photons.push_back(r.to_integer("grid.photons", item));
    }

    auto check = [&](bool ok, const std::string& key, const std::string& message) {
        if (!ok) r.fail(key, message);
    };
    check(g.N >= 1, "grid.N", "must be >= 1");
    check(g.M >= 1, "grid.M", "must be >= 1");
    check(g.d_x > 0.0, "grid.d_x", "must be positive");
    check(g.d_y > 0.0, "grid.d_y", "must be positive");
    check(g.sigma_x > 0.0, r.has("grid.sigma") ? "grid.sigma" : "grid.sigma_x", "must be positive");
    check(g.sigma_y > 0.0, r.has("grid.sigma") ? "grid.sigma" : "grid.sigma_y", "must be positive");
    check(std::abs(g.rho) < 1.0, "grid.rho", "must satisfy |rho| < 1");
    check(!g.photons.empty(), "grid.photons", "needs at least one value");
    check(std::all_of(g.photons.begin(), g.photons.end(), [](int n) { return n >= 1; }),
          "grid.photons", "photon numbers must be positive integers");
    check(g.photons.size() == 1 || g.photons.size() == static_cast<std::size_t>(g.sources()),
          "grid.photons", "give one value or one per source (N*M)");
    return g;
}

std::optional<SweepAxis> parse_axis(Reader& r, const std::string& prefix,
                                    const DeformationMap& map)
{
    const auto variable = r.text(prefix + ".variable");
    if (!variable) {
        for (const char* k : {".from", ".to", ".steps", ".from_deg", ".to_deg"}) {
            if (r.has(prefix + k)) r.fail(prefix + k, "sweep key without " + prefix + ".variable");
        }
        return std::nullopt;
    }
    const auto names = map.param_names();
    const std::string& v = *variable;
    const bool param = std::find(names.begin(), names.end(), v) != names.end();
    const bool known = param || v == "N" || v == "M" || v == "NM" || v == "d_x" || v == "d_y" ||
                       v == "rho";
    if (!known) {
        std::string options = "N, M, NM, d_x, d_y, rho";
        for (const auto& n : names) options += ", " + n;
        r.fail(prefix + ".variable", "unknown sweep variable '" + v + "' (expected one of " + options + ")");
    }

    SweepAxis axis;
    axis.variable = v;
    const bool angle = is_angle_name(v);
    const auto from = angle ? r.angle(prefix + ".from") : r.real(prefix + ".from");
    const auto to = angle ? r.angle(prefix + ".to") : r.real(prefix + ".to");
    const auto steps = r.integer(prefix + ".steps");
    if (steps && *steps < 1) r.fail(prefix + ".steps", "must be >= 1");

    if (angle && !from && !to) {
        axis.from = 0.0;
        axis.to = 2.0 * std::numbers::pi;
        axis.half_open = true;
        axis.steps = steps.value_or(kDefaultThetaSteps);
        return axis;
    }
    if (!from) r.fail(prefix + ".from", "missing sweep start");
    if (!to) r.fail(prefix + ".to", "missing sweep end");
    axis.from = *from;
    axis.to = *to;

    if (axis.is_integer()) {
        if (axis.from != std::floor(axis.from) || axis.to != std::floor(axis.to) || axis.to < axis.from) {
            r.fail(prefix + ".from", "integer sweep needs integer bounds with from <= to");
        }
        const int count = static_cast<int>(axis.to - axis.from) + 1;
        if (steps && *steps != count) {
            r.fail(prefix + ".steps", "integer sweeps use unit stride; steps must be " + std::to_string(count));
        }
        axis.steps = count;
    } else {
        if (!steps) r.fail(prefix + ".steps", "missing number of sweep points");
        axis.steps = *steps;
    }
    return axis;
}

} // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& key,
                         const std::string& message)
    : ValidationError(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                      key + ": " + message),
      line_(line), key_(key)
{
}

bool SweepAxis::is_integer() const
{
    return variable == "N" || variable == "M" || variable == "NM";
}

double SweepAxis::value(int i) const
{
    if (is_integer()) return from + i;
    if (half_open) return from + (to - from) * i / steps;
    if (steps == 1) return from;
    return from + (to - from) * i / (steps - 1);
}

ScenarioConfig parse_config(std::istream& in, const std::string& source)
{
    std::map<std::string, Entry> entries;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source, line_no, line, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source, line_no, key, "empty key");
        if (value.empty()) throw ConfigError(source, line_no, key, "empty value");
        if (entries.count(key)) {
            throw ConfigError(source, line_no, key,
                              "duplicate key (first set on line " +
                                  std::to_string(entries[key].line) + ")");
        }
        entries[key] = Entry{value, line_no};
    }

    Reader r(source, std::move(entries));
    ScenarioConfig cfg;
    cfg.grid = parse_grid(r);
    cfg.deformation = parse_deformation(r);

    if (auto axis = parse_axis(r, "sweep", cfg.deformation)) cfg.sweeps.push_back(*axis);
    if (auto axis = parse_axis(r, "sweep2", cfg.deformation)) {
        if (cfg.sweeps.empty()) r.fail("sweep2.variable", "sweep2 needs a sweep axis first");
        if (axis->variable == cfg.sweeps.front().variable) {
            r.fail("sweep2.variable", "both sweep axes use the same variable");
        }
        cfg.sweeps.push_back(*axis);
    }

    cfg.output_path = r.text("output.path").value_or("");
    if (const auto fmt = r.text("output.format")) {
        if (*fmt == "csv") cfg.format = OutputFormat::Csv;
        else if (*fmt == "json") cfg.format = OutputFormat::Json;
        else r.fail("output.format", "expected csv or json");
    }

    if (const auto cost = r.text("bound.cost_matrix")) {
        const auto rows = split(*cost, ';');
        const auto d = static_cast<Eigen::Index>(rows.size());
        Eigen::MatrixXd m(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            std::vector<std::string> cells;
            for (const auto& c : split(rows[static_cast<std::size_t>(i)], ',')) {
                if (!c.empty()) cells.push_back(c);
            }
            if (static_cast<Eigen::Index>(cells.size()) != d) {
                r.fail("bound.cost_matrix", "rows must be separated by ';' and form a square matrix");
            }
            for (Eigen::Index j = 0; j < d; ++j) {
                m(i, j) = r.to_real("bound.cost_matrix", cells[static_cast<std::size_t>(j)]);
            }
        }
        if (d != cfg.deformation.n_params()) {
            r.fail("bound.cost_matrix", "size " + std::to_string(d) + " does not match the " +
                                            std::to_string(cfg.deformation.n_params()) +
                                            " deformation parameters");
        }
        try {
            CostMatrix check(m);
        } catch (const ValidationError& e) {
            r.fail("bound.cost_matrix", e.what());
        }
        cfg.cost_matrix = m;
    }
    cfg.repetitions = r.integer("bound.repetitions").value_or(1);
    if (cfg.repetitions < 1) r.fail("bound.repetitions", "must be a positive integer");

    r.reject_unused();
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "<file>", "cannot open config file");
    return parse_config(in, path);
}

} // namespace gridqfi
