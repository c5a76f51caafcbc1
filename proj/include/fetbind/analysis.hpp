#ifndef FETBIND_ANALYSIS_HPP
#define FETBIND_ANALYSIS_HPP

/**
 * @file analysis.hpp
 * @brief Observables derived from trajectories (gate-averaged bound
 *        concentration, depletion-region metrics), the cross-mesh error
 *        norm, and the mesh-refinement convergence study.
 */

#include <optional>
#include <vector>

#include "fetbind/model.hpp"
#include "fetbind/solver.hpp"

namespace fetbind {

/**
 * @brief Gate-averaged bound concentration per output time,
 *        Bbar(t_k) = dx * sum_j h_j(t_k) (midpoint rule on nodal values).
 */
std::vector<double> average_bound(const Trajectory& traj);

/**
 * @brief Convergence norm between a coarse trajectory and a reference on a
 *        finer nested mesh: the reference is restricted to the coarse nodes
 *        (exact for meshes with node counts 3^i), the unscaled l2 norm over
 *        nodes is taken per output time, and the maximum over times is
 *        returned.
 *
 * Requires both node counts to be powers of 3 with coarse strictly smaller,
 * and matching output-time grids; throws std::invalid_argument otherwise.
 */
double error_norm(const Trajectory& coarse, const Trajectory& ref);

struct ConvergenceReport {
    std::vector<int> mesh_sizes;  ///< N = 3^i for i = 1..i_max-1
    /// Per-mesh error against the 3^i_max reference: sqrt(dx) * error_norm,
    /// i.e. the L2(x)-consistent measure.  The sqrt(dx) weight matters: a
    /// plain nodal l2 would flatten the fitted order by one half.
    std::vector<double> errors;
    /// Least-squares fit of log10(error) against log10(N); first-order
    /// accuracy corresponds to slope -1.  Unset when fewer than two points.
    std::optional<double> slope;
    std::optional<double> intercept;
    std::optional<double> r_squared;
};

/**
 * @brief Runs the refinement study: reference at N = 3^i_max, coarse solves
 *        at N = 3^i for i = 1..i_max-1, error per mesh, log-log fit.
 *
 * base_cfg supplies everything except n_nodes.  jobs bounds the number of
 * concurrent coarse-mesh solves.
 */
ConvergenceReport convergence_study(const SolveConfig& base_cfg,
                                    const DimensionlessParams& params, int i_max,
                                    int jobs = 1);

/// Depletion-region descriptors at one output time.
struct DepletionPoint {
    double depth;  ///< max_j h_j - h_center
    double width;  ///< extent of the contiguous dip around the center, in x units
};

/**
 * @brief Depth and width of the central depletion dip per output time.
 *
 * Width counts the contiguous nodes around the center lying strictly below
 * the midpoint threshold (h_edge + h_center)/2, scaled by dx; a uniform
 * profile yields depth 0 and width 0.
 */
std::vector<DepletionPoint> depletion_metrics(const Trajectory& traj);

}  // namespace fetbind

#endif  // FETBIND_ANALYSIS_HPP
