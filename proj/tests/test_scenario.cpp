#include "gridqfi/errors.hpp"
#include "gridqfi/scenario.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace gridqfi;

namespace {

ScenarioConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

std::string csv(const ResultTable& t)
{
    std::ostringstream out;
    write_csv(out, t);
    return out.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "gridqfi-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int run(const std::string& cmd)
{
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kStretch = R"(# 3 x 2 stretch
grid.N = 3
grid.M = 2
grid.d_x = 1
grid.d_y = 2
grid.sigma = 1
grid.rho = 0
deformation.kind = stretch
)";

} // namespace

TEST_CASE("stretch scenario at the identity")
{
    const ResultTable t = run_compute(parse(kStretch));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.columns() == std::vector<std::string>{"I_aa", "I_ab", "I_ba", "I_bb", "qcrb_a", "qcrb_b"});
    CHECK(t.rows[0].info(0, 0) == doctest::Approx(4.0));
    CHECK(t.rows[0].info(1, 1) == doctest::Approx(6.0));
    CHECK(t.rows[0].info(0, 1) == 0.0);
    CHECK(csv(t) == "I_aa,I_ab,I_ba,I_bb,qcrb_a,qcrb_b\n4,0,0,6,0.25,0.16666666666666666\n");
}

TEST_CASE("rotation scenario reports a constant QFI and no oscillation")
{
    const ResultTable t = run_compute(parse(R"(grid.N = 3
grid.M = 2
grid.d_y = 2
deformation.kind = rotation
deformation.theta_deg = 30
)"));
    REQUIRE(t.has_oscillation);
    CHECK(t.rows[0].info(0, 0) == doctest::Approx(10.0));
    CHECK(t.rows[0].oscillation == false);
    CHECK(t.columns().back() == "oscillation");
}

TEST_CASE("single source has zero information and a singular bound")
{
    auto cfg = parse("deformation.kind = stretch\n");
    const ResultTable t = run_compute(cfg);
    CHECK(t.rows[0].info.cwiseAbs().maxCoeff() == 0.0);
    cfg = parse("deformation.kind = stretch\nbound.cost_matrix = 1,0;0,1\n");
    CHECK_THROWS_AS(run_compute(cfg), SingularInformationError);
}

TEST_CASE("config diagnostics name line and key")
{
    auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("deformation.kind = stretch\ngrid.rho = 1.5\n").find("test.cfg:2: grid.rho") == 0);
    CHECK(message("deformation.kind = twist\n").find("unknown deformation kind") != std::string::npos);
    CHECK(message("deformation.kind = stretch\ngrid.N = 2\ngrid.N = 3\n").find("duplicate") !=
          std::string::npos);
    CHECK(message("deformation.kind = stretch\ngrid.Q = 3\n").find("unknown key") != std::string::npos);
    CHECK(message("deformation.kind = inhom_exp\n").find("gamma") != std::string::npos);
    CHECK(message("deformation.kind = stretch\ngrid.N = 0\n").find("grid.N") != std::string::npos);
    CHECK(message("deformation.kind = stretch\nsweep.variable = theta\n").find("sweep.variable") !=
          std::string::npos);
    CHECK(message("deformation.kind = stretch\nbound.cost_matrix = 1\n").find("bound.cost_matrix") !=
          std::string::npos);
    CHECK(message("grid.N = 2 = 3\n") != "");
}

TEST_CASE("theta sweep defaults to 256 points over [0, 2 pi)")
{
    const auto cfg = parse(R"(grid.N = 3
grid.M = 2
grid.d_y = 2
grid.rho = 0.5
deformation.kind = rotation
sweep.variable = theta
)");
    REQUIRE(cfg.sweeps.size() == 1);
    CHECK(cfg.sweeps[0].steps == kDefaultThetaSteps);
    const ResultTable t = run_sweep(cfg, 2);
    REQUIRE(t.rows.size() == 256);
    CHECK(t.rows[0].coords[0] == 0.0);
    CHECK(t.rows[255].coords[0] < 2 * std::numbers::pi);
    CHECK(t.rows[32].coords[0] == doctest::Approx(std::numbers::pi / 4));
    CHECK(t.rows[32].info(0, 0) == doctest::Approx(12.0));
    CHECK(t.rows[96].info(0, 0) == doctest::Approx(44.0 / 3));
    CHECK(t.rows[0].oscillation == true);
}

TEST_CASE("two-axis sweep: outer slow, thread count does not change output")
{
    const auto cfg = parse(R"(grid.d_x = 1
grid.d_y = 2
deformation.kind = stretch
sweep.variable = N
sweep.from = 1
sweep.to = 4
sweep2.variable = M
sweep2.from = 1
sweep2.to = 3
)");
    const ResultTable one = run_sweep(cfg, 1);
    const ResultTable many = run_sweep(cfg, 4);
    REQUIRE(one.rows.size() == 12);
    CHECK(one.rows[1].coords == std::vector<double>{1.0, 2.0});
    CHECK(one.rows[3].coords == std::vector<double>{2.0, 1.0});
    CHECK(csv(one) == csv(many));
    for (const auto& row : one.rows) {
        const int n = static_cast<int>(row.coords[0]);
        const int m = static_cast<int>(row.coords[1]);
        const double a1 = one.rows[static_cast<std::size_t>((n - 1) * 3)].info(0, 0);
        CHECK(row.info(0, 0) == doctest::Approx(m * a1).epsilon(1e-14));
    }
}

TEST_CASE("square-grid sweep keeps the bound ratio at 4")
{
    const auto cfg = parse(R"(grid.d_x = 1
grid.d_y = 2
deformation.kind = stretch
sweep.variable = NM
sweep.from = 2
sweep.to = 10
)");
    const ResultTable t = run_sweep(cfg, 1);
    REQUIRE(t.rows.size() == 9);
    for (const auto& row : t.rows) {
        CHECK(row.qcrb_diag[0] / row.qcrb_diag[1] == doctest::Approx(4.0).epsilon(1e-12));
    }
}

TEST_CASE("JSON mirrors CSV rows")
{
    const auto cfg = parse(std::string(kStretch) + "bound.cost_matrix = 1,0;0,1\n");
    std::ostringstream out;
    write_json(out, run_compute(cfg));
    const std::string json = out.str();
    CHECK(json.find("\"I_aa\": 4") != std::string::npos);
    CHECK(json.find("\"qcrb\": 0.41666666666666663") != std::string::npos);
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("command-line exit codes and byte-identical sweeps")
{
    const std::string cli = GRIDQFI_CLI;
    const auto cfg = scratch("sweep.cfg");
    write_file(cfg, R"(grid.N = 3
grid.M = 2
grid.d_y = 2
grid.rho = 0.5
deformation.kind = rotation
sweep.variable = theta
)");
    const auto a = scratch("a.csv");
    const auto b = scratch("b.csv");
    CHECK(run(cli + " sweep " + cfg.string() + " --out " + a.string()) == 0);
    CHECK(run(cli + " sweep " + cfg.string() + " --threads 3 --out " + b.string()) == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a).rfind("theta,I_tt,qcrb_t,oscillation\n0,", 0) == 0);

    const auto bad = scratch("bad.cfg");
    write_file(bad, "deformation.kind = stretch\ngrid.rho = 2\n");
    CHECK(run(cli + " compute " + bad.string()) == 2);
    CHECK(run(cli + " compute /nonexistent/file.cfg") == 2);

    const auto single = scratch("single.cfg");
    write_file(single, "deformation.kind = stretch\nbound.cost_matrix = 1,0;0,1\n");
    CHECK(run(cli + " compute " + single.string()) == 3);

    CHECK(run(cli + " validate nonsense") == 2);
    CHECK(run(cli) == 2);
}
