#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fetbind/solver.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
    const char* env = std::getenv("FETBIND_BIN");
    REQUIRE_MESSAGE(env != nullptr, "FETBIND_BIN must point at the CLI binary");
    return env;
}

int run_cli(const std::string& args) {
    std::string cmd = binary_path() + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("fetbind_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Columns of a csv file, parsed as doubles.
std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), "missing csv: " << p.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* kWellMixedConfig = R"(
dimensionless {
  Da = 0.0000001
  K = 1
  l_s = 1e-3
  epsilon = 0.4
}
solver {
  n_nodes = 9
  t_end = 2
  output_times = 9
  rel_tol = 1e-9
  abs_tol = 1e-12
}
output {
  format = csv
  precision = 12
}
)";

}  // namespace

TEST_CASE("solve writes the full file set and honors the well-mixed limit") {
    fs::path dir = fresh_dir("solve");
    write_file(dir / "run.conf", kWellMixedConfig);
    // Da must be accepted at exactly zero too.
    std::string zero_da = kWellMixedConfig;
    auto pos = zero_da.find("0.0000001");
    zero_da.replace(pos, 9, "0");
    write_file(dir / "run0.conf", zero_da);

    int rc = run_cli("solve " + (dir / "run0.conf").string() + " --out " + (dir / "out").string());
    CHECK(rc == 0);
    for (const char* name : {"trajectory.csv", "average.csv", "depletion.csv", "params.json"}) {
        CHECK(fs::exists(dir / "out" / name));
    }
    auto avg = read_csv(dir / "out" / "average.csv");
    REQUIRE(avg.size() == 9);
    for (const auto& row : avg) {
        double exact = fetbind::well_mixed_bound(row[0], 1.0);
        CHECK(row[1] == doctest::Approx(exact).epsilon(1e-6));
    }
    auto traj = read_csv(dir / "out" / "trajectory.csv");
    REQUIRE(traj.size() == 9);
    REQUIRE(traj[0].size() == 10);  // t plus nine nodes
    for (std::size_t c = 1; c < traj[0].size(); ++c) CHECK(traj[0][c] == 0.0);

    auto params = nlohmann::json::parse(slurp(dir / "out" / "params.json"));
    CHECK(params["derived"]["Da"] == 0.0);
    CHECK(params["derived"]["K"] == 1.0);
    CHECK(params["input"].contains("dimensionless"));
    fs::remove_all(dir);
}

TEST_CASE("malformed configs exit with code 2 and leave no partial output") {
    fs::path dir = fresh_dir("bad");
    write_file(dir / "bad.conf", "dimensionless {\n  Da = oops\n}\n");
    int rc = run_cli("solve " + (dir / "bad.conf").string() + " --out " + (dir / "out").string());
    CHECK(rc == 2);
    CHECK_FALSE(fs::exists(dir / "out"));

    // Usage errors share the exit code.
    CHECK(run_cli("solve /nonexistent/path.conf") == 2);
    CHECK(run_cli("") == 2);
    fs::remove_all(dir);
}

TEST_CASE("repeated runs produce byte-identical outputs") {
    fs::path dir = fresh_dir("determinism");
    write_file(dir / "run.conf", kWellMixedConfig);
    CHECK(run_cli("solve " + (dir / "run.conf").string() + " --out " + (dir / "a").string()) == 0);
    CHECK(run_cli("solve " + (dir / "run.conf").string() + " --out " + (dir / "b").string()) == 0);
    for (const char* name : {"trajectory.csv", "average.csv", "depletion.csv", "params.json"}) {
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    }
    fs::remove_all(dir);
}

TEST_CASE("solve honors the implicit-euler integrator selection") {
    fs::path dir = fresh_dir("be");
    std::string conf = kWellMixedConfig;
    auto pos = conf.find("0.0000001");
    conf.replace(pos, 9, "0");
    conf.insert(conf.find("rel_tol"), "integrator = implicit-euler\n  fixed_dt = 0.001\n  ");
    write_file(dir / "run.conf", conf);
    CHECK(run_cli("solve " + (dir / "run.conf").string() + " --out " + (dir / "out").string()) ==
          0);
    auto avg = read_csv(dir / "out" / "average.csv");
    REQUIRE(avg.size() == 9);
    for (const auto& row : avg) {
        double exact = fetbind::well_mixed_bound(row[0], 1.0);
        CHECK(row[1] == doctest::Approx(exact).epsilon(5e-3));
    }
    fs::remove_all(dir);
}

TEST_CASE("FETBIND_OUT provides the default output directory") {
    fs::path dir = fresh_dir("envout");
    write_file(dir / "run.conf", kWellMixedConfig);
    std::string cmd = "FETBIND_OUT=" + (dir / "from_env").string() + " " + binary_path() +
                      " solve " + (dir / "run.conf").string() + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "from_env" / "trajectory.csv"));
    fs::remove_all(dir);
}

TEST_CASE("quick convergence command emits the table and the fit") {
    fs::path dir = fresh_dir("converge");
    write_file(dir / "run.conf", R"(
dimensionless {
  Da = 66.42
  K = 1
  l_s = 1e-3
  epsilon = 1
}
solver {
  t_end = 5
  output_times = 11
  rel_tol = 1e-8
  abs_tol = 1e-11
}
converge {
  i_max = 3
}
output {
  format = csv
  precision = 12
}
)");
    CHECK(run_cli("converge " + (dir / "run.conf").string() + " --out " + (dir / "out").string()) ==
          0);
    auto rows = read_csv(dir / "out" / "convergence.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][1] == 3.0);
    CHECK(rows[1][1] == 9.0);
    CHECK(rows[0][2] > rows[1][2]);
    auto fit = nlohmann::json::parse(slurp(dir / "out" / "fit.json"));
    CHECK(fit["slope"].is_number());
    CHECK(fit["r_squared"].is_number());
    fs::remove_all(dir);
}

TEST_CASE("association-rate sweep recovers the caption Damkohler/K ladder") {
    fs::path dir = fresh_dir("sweep_ka");
    write_file(dir / "run.conf", R"(
dimensional {
  diffusivity = 1e-6
  assoc_rate = 1e11
  dissoc_rate = 1.67e-5
  inject_conc = 1e-16
  receptor_density = 1.3284e-13
  well_height = 0.2
  well_length = 0.5
  gate_length = 5e-4
}
sweep {
  axis = assoc_rate
  values = [1e11, 5e11, 1e12]
  labels = [ka_1e11, ka_5e11, ka_1e12]
}
solver {
  n_nodes = 9
  t_end = 1
  output_times = 5
}
output {
  format = csv
  precision = 12
}
)");
    CHECK(run_cli("sweep " + (dir / "run.conf").string() + " --out " + (dir / "out").string()) ==
          0);
    auto summary = nlohmann::json::parse(slurp(dir / "out" / "sweep_summary.json"));
    auto& pts = summary["points"];
    REQUIRE(pts.size() == 3);
    CHECK(double(pts[0]["Da"]) == doctest::Approx(6.642).epsilon(1e-6));
    CHECK(double(pts[1]["Da"]) == doctest::Approx(33.21).epsilon(1e-6));
    CHECK(double(pts[2]["Da"]) == doctest::Approx(66.42).epsilon(1e-6));
    CHECK(double(pts[0]["K"]) == doctest::Approx(1.67).epsilon(1e-6));
    CHECK(double(pts[1]["K"]) == doctest::Approx(0.334).epsilon(1e-6));
    CHECK(double(pts[2]["K"]) == doctest::Approx(0.167).epsilon(1e-6));
    for (const char* label : {"ka_1e11", "ka_5e11", "ka_1e12"}) {
        CHECK(fs::exists(dir / "out" / ("average_" + std::string(label) + ".csv")));
    }
    fs::remove_all(dir);
}

TEST_CASE("injection-concentration sweep keeps Da fixed") {
    fs::path dir = fresh_dir("sweep_cu");
    write_file(dir / "run.conf", R"(
dimensional {
  diffusivity = 1e-6
  assoc_rate = 1e11
  dissoc_rate = 1e-5
  inject_conc = 1e-16
  receptor_density = 1.3284e-13
  well_height = 0.2
  well_length = 0.5
  gate_length = 5e-4
}
sweep {
  axis = inject_conc
  values = [1e-17, 5e-17, 1e-16]
}
solver {
  n_nodes = 9
  t_end = 1
  output_times = 5
}
output {
  format = csv
  precision = 12
}
)");
    CHECK(run_cli("sweep " + (dir / "run.conf").string() + " --out " + (dir / "out").string()) ==
          0);
    auto summary = nlohmann::json::parse(slurp(dir / "out" / "sweep_summary.json"));
    auto& pts = summary["points"];
    REQUIRE(pts.size() == 3);
    for (const auto& pt : pts) {
        CHECK(double(pt["Da"]) == doctest::Approx(6.642).epsilon(1e-9));
    }
    CHECK(double(pts[0]["K"]) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(double(pts[1]["K"]) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(double(pts[2]["K"]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fs::exists(dir / "out" / "average_p1.csv"));  // default labels
    fs::remove_all(dir);
}

TEST_CASE("oracle-check passes its suites and reports max errors") {
    fs::path dir = fresh_dir("oracle");
    write_file(dir / "run.conf", R"(
dimensionless {
  Da = 1
  K = 1
  l_s = 1e-3
  epsilon = 0.4
}
oracle {
  suites = [polylog, kernel-integrals]
  n_nodes = 9
  l_s = 1e-3
  epsilon = 0.4
}
output {
  format = csv
  precision = 12
}
)");
    CHECK(run_cli("oracle-check " + (dir / "run.conf").string() + " --out " +
                  (dir / "out").string()) == 0);
    auto report = nlohmann::json::parse(slurp(dir / "out" / "oracle_report.json"));
    CHECK(report["pass"] == true);
    REQUIRE(report["suites"].size() == 2);
    CHECK(double(report["suites"][0]["max_rel_err"]) < 1e-12);
    CHECK(double(report["suites"][1]["max_rel_err"]) < 1e-8);
    fs::remove_all(dir);
}
