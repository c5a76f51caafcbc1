#include "fetbind/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fetbind {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// Workspace for the per-evaluation linear solve; reused across stages so the
// n-by-n system matrix is allocated once per integration.
struct RateWorkspace {
    Eigen::MatrixXd system;
    Eigen::VectorXd scale;
    Eigen::VectorXd rhs;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

void rate_into(const Eigen::VectorXd& h, const KernelMatrix& m, double dissoc,
               RateWorkspace& ws, Eigen::VectorXd& out) {
    const int n = static_cast<int>(h.size());
    if (m.dim() != n) throw std::invalid_argument("state/kernel dimension mismatch");
    double min_avail = 1.0;
    for (int i = 0; i < n; ++i) min_avail = std::min(min_avail, 1.0 - h[i]);

    if (min_avail > 1e-12) {
        // Symmetrized form: (I + S M S) y = S^{-1} r with S = diag(sqrt(1-h)),
        // h' = S y.  Positive definite, so Cholesky applies.
        ws.scale = (1.0 - h.array()).sqrt();
        ws.system = m.matrix();
        ws.system.array().colwise() *= ws.scale.array();
        ws.system.array().rowwise() *= ws.scale.transpose().array();
        ws.system.diagonal().array() += 1.0;
        ws.rhs = ((1.0 - h.array()) - dissoc * h.array()) / ws.scale.array();
        ws.llt.compute(ws.system);
        if (ws.llt.info() != Eigen::Success) {
            throw std::runtime_error(
                "bound_rate: Cholesky factorization failed (kernel matrix not positive "
                "definite?)");
        }
        out = ws.scale.array() * ws.llt.solve(ws.rhs).array();
        return;
    }
    // Some node is saturated; solve the unsymmetric form directly.
    ws.system = m.matrix();
    ws.system.array().colwise() *= (1.0 - h.array());
    ws.system.diagonal().array() += 1.0;
    ws.rhs = (1.0 - h.array()) - dissoc * h.array();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ws.system);
    out = lu.solve(ws.rhs);
    if (!out.allFinite()) {
        throw std::runtime_error("bound_rate: singular rate system");
    }
}

std::vector<double> uniform_grid(double t_end, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = t_end * double(k) / double(count - 1);
    }
    out.front() = 0.0;
    out.back() = t_end;
    return out;
}

double scaled_rms(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& y1, double rel, double abs) {
    double acc = 0.0;
    const int n = static_cast<int>(err.size());
    for (int i = 0; i < n; ++i) {
        double sc = abs + rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = err[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / n);
}

}  // namespace

std::vector<double> SolveConfig::resolved_output_times() const {
    if (!output_times.empty()) return output_times;
    return uniform_grid(t_end, output_count);
}

void SolveConfig::validate() const {
    if (n_nodes < 1) throw std::invalid_argument("n_nodes must be at least 1");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (output_times.empty()) {
        if (output_count < 2) throw std::invalid_argument("output_count must be at least 2");
    } else {
        if (output_times.front() != 0.0) {
            throw std::invalid_argument("output grid must start at t = 0");
        }
        for (std::size_t k = 1; k < output_times.size(); ++k) {
            if (!(output_times[k] > output_times[k - 1])) {
                throw std::invalid_argument("output grid must be strictly increasing");
            }
        }
        if (output_times.back() > t_end * (1.0 + 1e-12)) {
            throw std::invalid_argument("output grid exceeds t_end");
        }
    }
    if (integrator == Integrator::implicit_euler) {
        if (!(fixed_dt > 0.0)) throw std::invalid_argument("fixed_dt must be positive");
        if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
        if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be >= 1");
    }
}

Eigen::VectorXd bound_rate(const Eigen::VectorXd& h, const KernelMatrix& m,
                           double dissoc_const) {
    RateWorkspace ws;
    Eigen::VectorXd out;
    rate_into(h, m, dissoc_const, ws, out);
    return out;
}

Trajectory integrate(const SolveConfig& cfg, const DimensionlessParams& params) {
    cfg.validate();
    params.validate();

    const Mesh mesh = Mesh::uniform(cfg.n_nodes);
    const KernelMatrix m =
        KernelMatrix::assemble(mesh, params.damkohler, params.gate_ratio, params.aspect);
    const double dissoc = params.dissoc_const;
    const std::vector<double> out_times = cfg.resolved_output_times();
    const int n = cfg.n_nodes;

    Trajectory traj;
    traj.mesh = mesh;
    traj.times = out_times;
    traj.states.resize(static_cast<Eigen::Index>(out_times.size()), n);
    traj.params = params;

    RateWorkspace ws;
    auto f = [&](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        rate_into(y, m, dissoc, ws, dy);
    };

    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Eigen::VectorXd ynew(n), ytmp(n), errv(n);

    std::size_t out_idx = 0;
    if (out_times[0] == 0.0) {
        traj.states.row(0).setZero();
        out_idx = 1;
    }

    double t = 0.0;
    const double t_final = std::max(cfg.t_end, out_times.back());
    f(y, k1);

    // Initial step size from the standard two-sample heuristic.
    double dt;
    {
        double d0 = scaled_rms(y, y, y, cfg.rel_tol, cfg.abs_tol);
        double d1 = scaled_rms(k1, y, y, cfg.rel_tol, cfg.abs_tol);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, t_final);
        ytmp = y + h0 * k1;
        f(ytmp, k2);
        double d2 = scaled_rms((k2 - k1).eval(), y, ytmp, cfg.rel_tol, cfg.abs_tol) / h0;
        double dmax = std::max(d1, d2);
        double h1 = dmax > 1e-15 ? std::pow(0.01 / dmax, 0.2) : std::max(1e-6, h0 * 1e-3);
        dt = std::min({100.0 * h0, h1, t_final});
    }

    bool rejected_last = false;
    while (t < t_final * (1.0 - 1e-14)) {
        if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
            throw std::runtime_error("integrate: step size underflow at t = " +
                                     std::to_string(t));
        }
        dt = std::min(dt, t_final - t);

        ytmp = y + dt * (a21 * k1);
        f(ytmp, k2);
        ytmp = y + dt * (a31 * k1 + a32 * k2);
        f(ytmp, k3);
        ytmp = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
        f(ytmp, k4);
        ytmp = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(ytmp, k5);
        ytmp = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(ytmp, k6);
        ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(ynew, k7);

        errv = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = scaled_rms(errv, y, ynew, cfg.rel_tol, cfg.abs_tol);

        if (err <= 1.0) {
            // Dense output over the accepted step.
            if (out_idx < out_times.size() && out_times[out_idx] <= t + dt * (1.0 + 1e-14)) {
                Eigen::VectorXd ydiff = ynew - y;
                Eigen::VectorXd bspl = dt * k1 - ydiff;
                Eigen::VectorXd r4 = ydiff - dt * k7 - bspl;
                Eigen::VectorXd r5 =
                    dt * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (out_idx < out_times.size() &&
                       out_times[out_idx] <= t + dt * (1.0 + 1e-14)) {
                    double theta = std::clamp((out_times[out_idx] - t) / dt, 0.0, 1.0);
                    traj.states.row(static_cast<Eigen::Index>(out_idx)) =
                        (y + theta * (ydiff + (1.0 - theta) *
                                                  (bspl + theta * (r4 + (1.0 - theta) * r5))))
                            .transpose();
                    ++out_idx;
                }
            }
            t += dt;
            y.swap(ynew);
            k1.swap(k7);  // first-same-as-last
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 10.0);
            dt *= fac;
            rejected_last = false;
        } else {
            dt *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            rejected_last = true;
        }
    }
    if (out_idx < out_times.size()) {
        // Remaining outputs can only be the final time, up to round-off.
        for (; out_idx < out_times.size(); ++out_idx) {
            traj.states.row(static_cast<Eigen::Index>(out_idx)) = y.transpose();
        }
    }
    return traj;
}

Trajectory integrate_fixed_implicit(const SolveConfig& cfg, const DimensionlessParams& params) {
    SolveConfig local = cfg;
    local.integrator = Integrator::implicit_euler;
    local.validate();
    params.validate();

    const Mesh mesh = Mesh::uniform(cfg.n_nodes);
    const KernelMatrix m =
        KernelMatrix::assemble(mesh, params.damkohler, params.gate_ratio, params.aspect);
    const double dissoc = params.dissoc_const;
    const std::vector<double> out_times = local.resolved_output_times();
    const int n = cfg.n_nodes;

    Trajectory traj;
    traj.mesh = mesh;
    traj.times = out_times;
    traj.states.resize(static_cast<Eigen::Index>(out_times.size()), n);
    traj.params = params;

    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u(n), g(n), v(n), du(n);
    Eigen::MatrixXd jac(n, n);

    std::size_t out_idx = 0;
    if (out_times[0] == 0.0) {
        traj.states.row(0).setZero();
        out_idx = 1;
    }

    double t = 0.0;
    long step = 0;
    const double t_final = std::max(cfg.t_end, out_times.back());
    while (out_idx < out_times.size()) {
        double target = out_times[out_idx];
        double dt = std::min(local.fixed_dt, target - t);
        if (dt <= 0.0) {
            traj.states.row(static_cast<Eigen::Index>(out_idx)) = h.transpose();
            ++out_idx;
            continue;
        }
        ++step;
        // Backward Euler: (I + diag(1-u) M)(u - h) = dt [(1-u) - K u].
        u = h;
        bool converged = false;
        for (int it = 0; it < local.newton_max_iter; ++it) {
            v.noalias() = m.matrix() * (u - h);
            g = ((u - h).array() + (1.0 - u.array()) * v.array() -
                 dt * ((1.0 - u.array()) - dissoc * u.array()))
                    .matrix();
            jac = m.matrix();
            jac.array().colwise() *= (1.0 - u.array());
            jac.diagonal().array() += 1.0 + dt * (1.0 + dissoc);
            jac.diagonal() -= v;
            du = jac.partialPivLu().solve(-g);
            u += du;
            if (du.lpNorm<Eigen::Infinity>() <= local.newton_tol) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw std::runtime_error("implicit Euler: Newton failed to converge at step " +
                                     std::to_string(step) + " (t = " + std::to_string(t) +
                                     ")");
        }
        h.swap(u);
        t += dt;
        if (t >= target * (1.0 - 1e-14)) {
            traj.states.row(static_cast<Eigen::Index>(out_idx)) = h.transpose();
            ++out_idx;
        }
        if (t > t_final * (1.0 + 1e-12) && out_idx >= out_times.size()) break;
    }
    return traj;
}

double equilibrium_bound(double dissoc_const) {
    if (!(dissoc_const >= 0.0)) {
        throw std::invalid_argument("dissociation constant must be nonnegative");
    }
    return 1.0 / (1.0 + dissoc_const);
}

double well_mixed_bound(double t, double dissoc_const) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (!(dissoc_const >= 0.0)) {
        throw std::invalid_argument("dissociation constant must be nonnegative");
    }
    double rate = 1.0 + dissoc_const;
    return -std::expm1(-rate * t) / rate;
}

}  // namespace fetbind
