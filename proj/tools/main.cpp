#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fetbind/analysis.hpp"
#include "fetbind/config.hpp"
#include "fetbind/kernel.hpp"
#include "fetbind/model.hpp"
#include "fetbind/oracle.hpp"
#include "fetbind/output.hpp"
#include "fetbind/polylog.hpp"
#include "fetbind/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

fs::path resolve_outdir(const std::string& flag_value, const fetbind::OutputConfig& out) {
    if (!flag_value.empty()) return flag_value;
    if (!out.directory.empty()) return out.directory;
    if (const char* env = std::getenv("FETBIND_OUT"); env && *env) return env;
    return "out";
}

ordered_json dimensional_json(const fetbind::DimensionalParams& d) {
    return ordered_json{{"diffusivity", d.diffusivity},
                        {"assoc_rate", d.assoc_rate},
                        {"dissoc_rate", d.dissoc_rate},
                        {"inject_conc", d.inject_conc},
                        {"receptor_density", d.receptor_density},
                        {"well_height", d.well_height},
                        {"well_length", d.well_length},
                        {"gate_length", d.gate_length}};
}

ordered_json dimensionless_json(const fetbind::DimensionlessParams& p) {
    ordered_json j{{"Da", p.damkohler},
                   {"K", p.dissoc_const},
                   {"l_s", p.gate_ratio},
                   {"epsilon", p.aspect}};
    if (p.damkohler_well) j["Da_w"] = *p.damkohler_well;
    if (p.diffusion_well) j["D_w"] = *p.diffusion_well;
    if (p.diffusion_gate) j["D"] = *p.diffusion_gate;
    return j;
}

ordered_json solver_json(const fetbind::SolveConfig& s) {
    ordered_json j{{"n_nodes", s.n_nodes},
                   {"t_end", s.t_end},
                   {"integrator",
                    s.integrator == fetbind::Integrator::adaptive_rk ? "adaptive"
                                                                     : "implicit-euler"},
                   {"rel_tol", s.rel_tol},
                   {"abs_tol", s.abs_tol}};
    if (s.output_times.empty()) {
        j["output_times"] = s.output_count;
    } else {
        j["output_times"] = s.output_times;
    }
    if (s.integrator == fetbind::Integrator::implicit_euler) {
        j["fixed_dt"] = s.fixed_dt;
        j["newton_tol"] = s.newton_tol;
        j["newton_max_iter"] = s.newton_max_iter;
    }
    return j;
}

ordered_json params_echo(const fetbind::RunConfig& cfg,
                         const fetbind::DimensionlessParams& derived) {
    ordered_json j;
    if (cfg.dimensional) {
        j["input"] = ordered_json{{"dimensional", dimensional_json(*cfg.dimensional)}};
    } else {
        j["input"] = ordered_json{{"dimensionless", dimensionless_json(*cfg.dimensionless)}};
    }
    j["derived"] = dimensionless_json(derived);
    ordered_json checks = ordered_json::array();
    for (const auto& c : fetbind::validate_ranges(derived).checks) {
        checks.push_back(ordered_json{{"name", c.name},
                                      {"value", c.value},
                                      {"lower", c.lower},
                                      {"upper", c.upper},
                                      {"in_range", c.in_range}});
    }
    j["range_checks"] = checks;
    j["solver"] = solver_json(cfg.solver);
    j["output"] = ordered_json{
        {"format", cfg.output.format == fetbind::OutputConfig::Format::csv ? "csv" : "json"},
        {"precision", cfg.output.precision}};
    return j;
}

void warn_ranges(const fetbind::DimensionlessParams& p) {
    for (const auto& w : fetbind::validate_ranges(p).warnings()) {
        std::cerr << "warning: " << w << "\n";
    }
}

// Emits one table in the configured format (adds .csv or .json).
void write_table(const fs::path& dir, const std::string& stem,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& rows,
                 const fetbind::OutputConfig& out) {
    if (out.format == fetbind::OutputConfig::Format::csv) {
        fetbind::write_csv(dir / (stem + ".csv"), header, rows, out.precision);
        return;
    }
    ordered_json j{{"columns", header}};
    ordered_json data = ordered_json::array();
    for (const auto& row : rows) data.push_back(row);
    j["rows"] = data;
    fetbind::write_json(dir / (stem + ".json"), j);
}

std::optional<double> time_to_fraction(const std::vector<double>& times,
                                       const std::vector<double>& series, double target) {
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (series[k] >= target) {
            if (k == 0 || series[k] == series[k - 1]) return times[k];
            double f = (target - series[k - 1]) / (series[k] - series[k - 1]);
            return times[k - 1] + f * (times[k] - times[k - 1]);
        }
    }
    return std::nullopt;
}

int run_solve(const fetbind::RunConfig& cfg, const fs::path& outdir) {
    fetbind::DimensionlessParams p = cfg.resolve_params();
    warn_ranges(p);
    fetbind::Trajectory traj = cfg.solver.integrator == fetbind::Integrator::adaptive_rk
                                   ? fetbind::integrate(cfg.solver, p)
                                   : fetbind::integrate_fixed_implicit(cfg.solver, p);

    std::vector<std::string> header = {"t"};
    for (int j = 1; j <= traj.mesh.n_nodes; ++j) header.push_back("x_" + std::to_string(j));
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        std::vector<double> row = {traj.times[r]};
        for (int j = 0; j < traj.mesh.n_nodes; ++j) {
            row.push_back(traj.states(static_cast<Eigen::Index>(r), j));
        }
        rows.push_back(std::move(row));
    }

    auto avg = fetbind::average_bound(traj);
    std::vector<std::vector<double>> avg_rows;
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        avg_rows.push_back({traj.times[r], avg[r]});
    }

    auto dep = fetbind::depletion_metrics(traj);
    std::vector<std::vector<double>> dep_rows;
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        dep_rows.push_back({traj.times[r], dep[r].depth, dep[r].width});
    }

    fs::create_directories(outdir);
    write_table(outdir, "trajectory", header, rows, cfg.output);
    write_table(outdir, "average", {"t", "average_bound"}, avg_rows, cfg.output);
    write_table(outdir, "depletion", {"t", "depth", "width"}, dep_rows, cfg.output);
    fetbind::write_json(outdir / "params.json", params_echo(cfg, p));
    return 0;
}

int run_converge(const fetbind::RunConfig& cfg, const fs::path& outdir, int jobs) {
    if (!cfg.converge) {
        std::cerr << "error: converge requires a 'converge' block with i_max\n";
        return kExitUsage;
    }
    fetbind::DimensionlessParams p = cfg.resolve_params();
    warn_ranges(p);
    fetbind::ConvergenceReport rep =
        fetbind::convergence_study(cfg.solver, p, cfg.converge->i_max, jobs);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.errors.size(); ++i) {
        rows.push_back({double(i + 1), double(rep.mesh_sizes[i]), rep.errors[i]});
    }
    fs::create_directories(outdir);
    write_table(outdir, "convergence", {"i", "N", "error"}, rows, cfg.output);

    ordered_json fit;
    fit["slope"] = rep.slope ? ordered_json(*rep.slope) : ordered_json(nullptr);
    fit["intercept"] = rep.intercept ? ordered_json(*rep.intercept) : ordered_json(nullptr);
    fit["r_squared"] = rep.r_squared ? ordered_json(*rep.r_squared) : ordered_json(nullptr);
    fit["mesh_sizes"] = rep.mesh_sizes;
    fit["errors"] = rep.errors;
    fetbind::write_json(outdir / "fit.json", fit);
    return 0;
}

int run_sweep(const fetbind::RunConfig& cfg, const fs::path& outdir, int jobs) {
    if (!cfg.sweep) {
        std::cerr << "error: sweep requires a 'sweep' block\n";
        return kExitUsage;
    }
    const fetbind::SweepConfig& sw = *cfg.sweep;
    const std::size_t count = sw.values.size();

    std::vector<fetbind::DimensionlessParams> points(count);
    for (std::size_t i = 0; i < count; ++i) {
        switch (sw.axis) {
            case fetbind::SweepConfig::Axis::assoc_rate: {
                fetbind::DimensionalParams d = *cfg.dimensional;
                d.assoc_rate = sw.values[i];
                points[i] = fetbind::nondimensionalize(d);
                break;
            }
            case fetbind::SweepConfig::Axis::inject_conc: {
                fetbind::DimensionalParams d = *cfg.dimensional;
                d.inject_conc = sw.values[i];
                points[i] = fetbind::nondimensionalize(d);
                break;
            }
            case fetbind::SweepConfig::Axis::dissoc_const: {
                points[i] = *cfg.dimensionless;
                points[i].dissoc_const = sw.values[i];
                break;
            }
        }
    }

    std::vector<fetbind::Trajectory> trajectories(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                trajectories[i] = fetbind::integrate(cfg.solver, points[i]);
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = ex.what();
                failed = true;
                return;
            }
        }
    };
    int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed) throw std::runtime_error("sweep point failed: " + failure);

    fs::create_directories(outdir);
    ordered_json summary = ordered_json::array();
    for (std::size_t i = 0; i < count; ++i) {
        const auto& traj = trajectories[i];
        auto avg = fetbind::average_bound(traj);
        std::vector<std::vector<double>> rows;
        for (std::size_t r = 0; r < traj.times.size(); ++r) {
            rows.push_back({traj.times[r], avg[r]});
        }
        write_table(outdir, "average_" + sw.labels[i], {"t", "average_bound"}, rows,
                    cfg.output);

        double eq = fetbind::equilibrium_bound(points[i].dissoc_const);
        auto t90 = time_to_fraction(traj.times, avg, 0.9 * eq);
        ordered_json entry{{"label", sw.labels[i]},
                           {"axis_value", sw.values[i]},
                           {"Da", points[i].damkohler},
                           {"K", points[i].dissoc_const},
                           {"equilibrium", eq}};
        entry["t90"] = t90 ? ordered_json(*t90) : ordered_json(nullptr);
        summary.push_back(entry);
    }
    fetbind::write_json(outdir / "sweep_summary.json",
                        ordered_json{{"axis", cfg.sweep->axis ==
                                                      fetbind::SweepConfig::Axis::assoc_rate
                                                  ? "assoc_rate"
                                                  : (cfg.sweep->axis ==
                                                             fetbind::SweepConfig::Axis::inject_conc
                                                         ? "inject_conc"
                                                         : "K")},
                                     {"points", summary}});
    return 0;
}

ordered_json oracle_polylog_suite(bool& pass) {
    double worst = 0.0;
    auto track = [&worst](double got, double want) {
        worst = std::max(worst, std::abs(got - want) / std::max(1e-300, std::abs(want)));
    };
    track(fetbind::polylog(2, 1.0), fetbind::zeta2);
    track(fetbind::polylog(3, 1.0), fetbind::zeta3);
    const double ln2 = 0.69314718055994530942;
    track(fetbind::polylog(2, 0.5), fetbind::zeta2 / 2.0 - 0.5 * ln2 * ln2);
    for (double z = 0.1; z < 0.95; z += 0.1) {
        track(fetbind::polylog(2, z), fetbind::oracle::polylog_series(2, z, 1e-16));
        track(fetbind::polylog(3, z), fetbind::oracle::polylog_series(3, z, 1e-16));
    }
    const double tol = 1e-12;
    pass = worst <= tol;
    return ordered_json{{"name", "polylog"}, {"max_rel_err", worst}, {"tolerance", tol},
                        {"pass", pass}};
}

ordered_json oracle_kernel_suite(const fetbind::OracleConfig& oc, bool& pass) {
    fetbind::Mesh mesh = fetbind::Mesh::uniform(oc.n_nodes);
    double worst = 0.0;
    for (int lag = 0; lag < oc.n_nodes; ++lag) {
        double closed =
            fetbind::hat_lag_integral(lag, mesh.spacing, oc.gate_ratio, oc.aspect);
        double quad = fetbind::oracle::hat_integral_quadrature(
            mesh.nodes[static_cast<std::size_t>(lag)], mesh.nodes[0], mesh.spacing,
            oc.gate_ratio, oc.aspect, 1e-13);
        worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
    }
    const double tol = 1e-8;
    pass = worst <= tol;
    return ordered_json{{"name", "kernel-integrals"},
                        {"n_nodes", oc.n_nodes},
                        {"l_s", oc.gate_ratio},
                        {"epsilon", oc.aspect},
                        {"max_rel_err", worst},
                        {"tolerance", tol},
                        {"pass", pass}};
}

ordered_json oracle_strip_suite(const fetbind::OracleConfig& oc, bool& pass) {
    const double a = oc.strip_height;
    auto hat = [](double x) {
        double u = std::abs(x);
        return u >= 0.5 ? 0.0 : 1.0 - 2.0 * u;
    };
    auto conv =
        fetbind::oracle::convolution_direct(hat, -0.5, 0.5, {0.0}, 1.0, a, {0.0}, 1e-12);
    const double reference = conv[0];

    fetbind::oracle::StripProblem prob;
    prob.height = a;
    prob.x_extent = 8.0 * std::max(1.0, a);
    prob.flux = hat;
    std::vector<double> errors;
    for (int level = 0; level < 3; ++level) {
        int per_unit = 4 << level;
        prob.nx = static_cast<int>(2.0 * prob.x_extent) * per_unit + 1;
        prob.ny = std::max(3, static_cast<int>(std::lround(a * per_unit)) + 1);
        auto surf = fetbind::oracle::laplace_strip_solve(prob);
        double center = surf[static_cast<std::size_t>((prob.nx - 1) / 2)];
        errors.push_back(std::abs(center - reference));
    }
    double center_rel = errors.back() / std::abs(reference);
    double r1 = errors[0] / errors[1];
    double r2 = errors[1] / errors[2];
    bool ratios_ok = r1 > 2.5 && r1 < 6.0 && r2 > 2.5 && r2 < 6.0;
    pass = center_rel <= 0.02 && ratios_ok;
    return ordered_json{{"name", "laplace-strip"},
                        {"strip_height", a},
                        {"x_extent", prob.x_extent},
                        {"center_rel_err", center_rel},
                        {"tolerance", 0.02},
                        {"refinement_ratios", ordered_json::array({r1, r2})},
                        {"second_order_band", ordered_json::array({2.5, 6.0})},
                        {"pass", pass}};
}

int run_oracle_check(const fetbind::RunConfig& cfg, const fs::path& outdir) {
    if (!cfg.oracle) {
        std::cerr << "error: oracle-check requires an 'oracle' block with suites\n";
        return kExitUsage;
    }
    ordered_json suites = ordered_json::array();
    bool all_pass = true;
    for (const auto& name : cfg.oracle->suites) {
        bool pass = false;
        if (name == "polylog") {
            suites.push_back(oracle_polylog_suite(pass));
        } else if (name == "kernel-integrals") {
            suites.push_back(oracle_kernel_suite(*cfg.oracle, pass));
        } else {
            suites.push_back(oracle_strip_suite(*cfg.oracle, pass));
        }
        all_pass = all_pass && pass;
    }
    fs::create_directories(outdir);
    fetbind::write_json(outdir / "oracle_report.json",
                        ordered_json{{"pass", all_pass}, {"suites", suites}});
    return all_pass ? 0 : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion-limited ligand-receptor binding solver for FET biosensor gates"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir_flag;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "configuration file")->required();
        sub->add_option("--out", outdir_flag, "output directory (overrides config)");
        sub->add_option("--jobs", jobs, "worker parallelism bound");
    };
    CLI::App* solve = app.add_subcommand("solve", "integrate one configuration");
    CLI::App* converge = app.add_subcommand("converge", "mesh-refinement convergence study");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
    CLI::App* oracle_check =
        app.add_subcommand("oracle-check", "run brute-force validation suites");
    for (CLI::App* sub : {solve, converge, sweep, oracle_check}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        fetbind::RunConfig cfg = fetbind::load_config(config_path);
        fs::path outdir = resolve_outdir(outdir_flag, cfg.output);
        if (solve->parsed()) return run_solve(cfg, outdir);
        if (converge->parsed()) return run_converge(cfg, outdir, jobs);
        if (sweep->parsed()) return run_sweep(cfg, outdir, jobs);
        return run_oracle_check(cfg, outdir);
    } catch (const fetbind::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitCheckFailure;
    }
}
