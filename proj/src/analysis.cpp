#include "fetbind/analysis.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace fetbind {

namespace {

bool is_power_of_three(int n) {
    while (n > 1) {
        if (n % 3 != 0) return false;
        n /= 3;
    }
    return n == 1;
}

int pow3(int i) {
    int v = 1;
    for (int k = 0; k < i; ++k) v *= 3;
    return v;
}

}  // namespace

std::vector<double> average_bound(const Trajectory& traj) {
    const double dx = traj.mesh.spacing;
    std::vector<double> out(static_cast<std::size_t>(traj.states.rows()));
    for (Eigen::Index r = 0; r < traj.states.rows(); ++r) {
        out[static_cast<std::size_t>(r)] = dx * traj.states.row(r).sum();
    }
    return out;
}

double error_norm(const Trajectory& coarse, const Trajectory& ref) {
    const int nc = coarse.mesh.n_nodes;
    const int nr = ref.mesh.n_nodes;
    if (!is_power_of_three(nc) || !is_power_of_three(nr) || nc >= nr) {
        throw std::invalid_argument("error_norm requires nested power-of-3 meshes");
    }
    if (coarse.times.size() != ref.times.size()) {
        throw std::invalid_argument("error_norm requires matching output grids");
    }
    for (std::size_t k = 0; k < coarse.times.size(); ++k) {
        if (std::abs(coarse.times[k] - ref.times[k]) >
            1e-12 * (1.0 + std::abs(ref.times[k]))) {
            throw std::invalid_argument("error_norm requires matching output grids");
        }
    }
    const int ratio = nr / nc;  // odd, so every coarse node is a reference node
    double worst = 0.0;
    for (Eigen::Index r = 0; r < coarse.states.rows(); ++r) {
        double acc = 0.0;
        for (int j = 0; j < nc; ++j) {
            int jr = j * ratio + (ratio - 1) / 2;
            double d = coarse.states(r, j) - ref.states(r, jr);
            acc += d * d;
        }
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

ConvergenceReport convergence_study(const SolveConfig& base_cfg,
                                    const DimensionlessParams& params, int i_max,
                                    int jobs) {
    if (i_max < 2) throw std::invalid_argument("convergence study needs i_max >= 2");
    if (jobs < 1) jobs = 1;

    SolveConfig ref_cfg = base_cfg;
    ref_cfg.n_nodes = pow3(i_max);
    const Trajectory ref = integrate(ref_cfg, params);

    const int count = i_max - 1;
    std::vector<Trajectory> coarse(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            SolveConfig cfg = base_cfg;
            cfg.n_nodes = pow3(i + 1);
            coarse[static_cast<std::size_t>(i)] = integrate(cfg, params);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min(jobs, count); ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ConvergenceReport report;
    for (int i = 0; i < count; ++i) {
        int n = pow3(i + 1);
        report.mesh_sizes.push_back(n);
        // sqrt(dx) weight turns the nodal l2 into a mesh-independent L2(x)
        // measure; without it the node count inflates coarse-mesh errors and
        // the fitted order drops by exactly one half.
        report.errors.push_back(std::sqrt(1.0 / n) *
                                error_norm(coarse[static_cast<std::size_t>(i)], ref));
    }

    if (count >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < count; ++i) {
            double x = std::log10(double(report.mesh_sizes[static_cast<std::size_t>(i)]));
            double y = std::log10(report.errors[static_cast<std::size_t>(i)]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = count * sxx - sx * sx;
        double slope = (count * sxy - sx * sy) / denom;
        double intercept = (sy - slope * sx) / count;
        double ss_res = 0, ss_tot = 0;
        double ybar = sy / count;
        for (int i = 0; i < count; ++i) {
            double x = std::log10(double(report.mesh_sizes[static_cast<std::size_t>(i)]));
            double y = std::log10(report.errors[static_cast<std::size_t>(i)]);
            double fit = slope * x + intercept;
            ss_res += (y - fit) * (y - fit);
            ss_tot += (y - ybar) * (y - ybar);
        }
        report.slope = slope;
        report.intercept = intercept;
        report.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    }
    return report;
}

std::vector<DepletionPoint> depletion_metrics(const Trajectory& traj) {
    const int n = traj.mesh.n_nodes;
    const double dx = traj.mesh.spacing;
    std::vector<DepletionPoint> out(static_cast<std::size_t>(traj.states.rows()));
    for (Eigen::Index r = 0; r < traj.states.rows(); ++r) {
        const auto row = traj.states.row(r);
        double center = (n % 2 == 1) ? row(n / 2) : 0.5 * (row(n / 2 - 1) + row(n / 2));
        double peak = row.maxCoeff();
        double edge = std::max(row(0), row(n - 1));
        double threshold = 0.5 * (edge + center);
        int below = 0;
        if (n % 2 == 1) {
            int c = n / 2;
            if (row(c) < threshold) {
                ++below;
                for (int j = c + 1; j < n && row(j) < threshold; ++j) ++below;
                for (int j = c - 1; j >= 0 && row(j) < threshold; --j) ++below;
            }
        } else {
            int cl = n / 2 - 1;
            for (int j = cl + 1; j < n && row(j) < threshold; ++j) ++below;
            for (int j = cl; j >= 0 && row(j) < threshold; --j) ++below;
        }
        out[static_cast<std::size_t>(r)] = {peak - center, below * dx};
    }
    return out;
}

}  // namespace fetbind
