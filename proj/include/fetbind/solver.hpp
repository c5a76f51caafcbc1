#ifndef FETBIND_SOLVER_HPP
#define FETBIND_SOLVER_HPP

/**
 * @file solver.hpp
 * @brief Implicit method-of-lines integration of the nodal bound-ligand
 *        system.
 *
 * The collocated kinetics couple every node through the kernel matrix M:
 * each node obeys h_j' = (1 - h_j)(1 - (M h')_j) - K h_j, i.e. the rate
 * vector appears on both sides.  Rearranged,
 *
 *     (I + diag(1 - h) M) h' = (1 - h) - K h,
 *
 * which is solved by a dense factorization at every rate evaluation (the
 * system matrix depends on the current state, so it is refactored each
 * time; no lagging of the convolution term).
 */

#include <vector>

#include <Eigen/Dense>

#include "fetbind/kernel.hpp"
#include "fetbind/model.hpp"

namespace fetbind {

enum class Integrator { adaptive_rk, implicit_euler };

struct SolveConfig {
    int n_nodes = 81;
    double t_end = 150.0;
    /// Uniform output grid size on [0, t_end] used when output_times is empty.
    int output_count = 151;
    /// Explicit output grid; must be strictly increasing and start at 0.
    std::vector<double> output_times;
    Integrator integrator = Integrator::adaptive_rk;
    double rel_tol = 1e-8;
    double abs_tol = 1e-11;
    double fixed_dt = 1e-2;     ///< implicit-Euler step
    double newton_tol = 1e-12;  ///< implicit-Euler Newton increment tolerance
    int newton_max_iter = 25;

    std::vector<double> resolved_output_times() const;
    void validate() const;
};

/// Immutable result of one integration.
struct Trajectory {
    Mesh mesh;
    std::vector<double> times;
    Eigen::MatrixXd states;  ///< one row per output time, one column per node
    DimensionlessParams params;
};

/**
 * @brief Nodal rate vector h': unique solution of
 *        (I + diag(1-h) M) h' = (1-h) - K h.
 *
 * Solved through the symmetrized form I + S M S (S = diag(sqrt(1-h))),
 * which is positive definite whenever M is; falls back to partially
 * pivoted LU when some h_j is at 1.  A failed factorization signals a bug
 * and raises std::runtime_error.
 */
Eigen::VectorXd bound_rate(const Eigen::VectorXd& h, const KernelMatrix& m,
                           double dissoc_const);

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with dense output.
Trajectory integrate(const SolveConfig& cfg, const DimensionlessParams& params);

/// Backward-Euler with exact Newton per step; robustness cross-check path.
Trajectory integrate_fixed_implicit(const SolveConfig& cfg, const DimensionlessParams& params);

/// Uniform steady state 1/(1+K).
double equilibrium_bound(double dissoc_const);

/// Closed-form Da = 0 solution (1 - exp(-(1+K) t)) / (1+K).
double well_mixed_bound(double t, double dissoc_const);

}  // namespace fetbind

#endif  // FETBIND_SOLVER_HPP
