#ifndef FETBIND_KERNEL_HPP
#define FETBIND_KERNEL_HPP

/**
 * @file kernel.hpp
 * @brief Singular convolution kernel arctanh(exp(-pi*l_s*|u|/(2*eps))), its
 *        exact integrals against the piecewise-linear hat basis, and the
 *        dense symmetric Toeplitz matrix coupling the nodal kinetics.
 *
 * The kernel has an integrable logarithmic singularity at u = 0.  Its
 * integral against a hat function has a closed form in Li2/Li3, so matrix
 * assembly needs no quadrature.  Entries depend only on the node separation
 * |j - i|: only the N distinct lag values are computed and fanned out.
 */

#include <vector>

#include <Eigen/Dense>

namespace fetbind {

/// N equally spaced collocation nodes on [-1/2, 1/2], spacing 1/N.
struct Mesh {
    int n_nodes;
    double spacing;             ///< node spacing dx = 1/N
    std::vector<double> nodes;  ///< x_j = -1/2 + (j + 1/2) dx, j = 0..N-1

    static Mesh uniform(int n);
};

/**
 * @brief Kernel value arctanh(exp(-pi * gate_ratio * |u| / (2 * aspect))).
 *
 * Even in u, strictly decreasing in |u|.  Throws std::domain_error at
 * u = 0, where the kernel is logarithmically singular; integrate across
 * the singularity instead of sampling it.
 */
double kernel_value(double u, double gate_ratio, double aspect);

/**
 * @brief Exact integral of the kernel centered at x_j against the hat at x_i.
 *
 * Evaluates int arctanh(exp(-pi*l_s*|x_j - v|/(2 eps))) phi_i(v) dv over the
 * hat support of width dx, via the Li2/Li3 closed form.  Finite for x_j = x_i
 * (the singularity is integrable).  Symmetric in (x_j, x_i); the x_j < x_i
 * case is evaluated through the mirror identity.  The nodes must belong to
 * one equally spaced mesh: |x_j - x_i| must be an integer multiple of dx.
 */
double hat_integral(double x_j, double x_i, double dx, double gate_ratio, double aspect);

/// Distinct Toeplitz value for node separation lag >= 0 (dx = 1/N mesh).
double hat_lag_integral(int lag, double dx, double gate_ratio, double aspect);

/**
 * @brief Dense symmetric positive definite Toeplitz matrix
 *        M[j][i] = (2 Da / pi) * hat_integral(x_j, x_i).
 */
class KernelMatrix {
public:
    static KernelMatrix assemble(const Mesh& mesh, double damkohler, double gate_ratio,
                                 double aspect);

    int dim() const { return static_cast<int>(lags_.size()); }
    double lag(int k) const { return lags_.at(static_cast<std::size_t>(k)); }
    double operator()(int j, int i) const { return dense_(j, i); }
    const Eigen::MatrixXd& matrix() const { return dense_; }

private:
    std::vector<double> lags_;
    Eigen::MatrixXd dense_;
};

}  // namespace fetbind

#endif  // FETBIND_KERNEL_HPP
