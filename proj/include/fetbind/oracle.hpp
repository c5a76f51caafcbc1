#ifndef FETBIND_ORACLE_HPP
#define FETBIND_ORACLE_HPP

/**
 * @file oracle.hpp
 * @brief Independent brute-force reference implementations used to validate
 *        the closed-form kernel machinery and the strip-reduction itself.
 *
 * Nothing here shares code with the closed forms it checks: polylogarithms
 * are summed term by term, kernel-hat integrals are done by adaptive
 * quadrature with the integration domain split at the logarithmic
 * singularity, and the surface-concentration convolution formula is compared
 * against a direct second-order finite-difference solve of the Laplace
 * problem on a truncated strip.
 */

#include <functional>
#include <vector>

namespace fetbind::oracle {

/**
 * @brief Naive term-by-term polylogarithm sum, summed until the increment
 *        drops below tol.
 *
 * Requires z <= 1 - 1e-6; closer to 1 the plain series is too slow to be a
 * useful reference.
 */
double polylog_series(int order, double z, double tol);

/**
 * @brief Kernel-hat integral by adaptive quadrature.
 *
 * Splits the hat support at the hat peak and, when x_j lies inside the
 * support, at x_j, so the kernel singularity only ever sits at panel
 * endpoints.  Absolute accuracy tol.  Throws std::runtime_error if the
 * subdivision limit is exceeded.
 */
double hat_integral_quadrature(double x_j, double x_i, double dx, double gate_ratio,
                               double aspect, double tol);

/**
 * @brief Surface-concentration convolution -(2/pi) int k(x - v) g(v) dv
 *        evaluated at each requested point by singularity-split adaptive
 *        quadrature.
 *
 * The flux g must vanish outside [support_lo, support_hi]; breakpoints lists
 * interior kinks of g (hat nodes) so panels stay smooth.
 */
std::vector<double> convolution_direct(const std::function<double(double)>& flux,
                                       double support_lo, double support_hi,
                                       const std::vector<double>& breakpoints,
                                       double gate_ratio, double aspect,
                                       const std::vector<double>& x_eval, double tol);

/**
 * @brief Laplace problem on the truncated strip [-X, X] x [0, a]:
 *        zero Dirichlet on top, prescribed flux dC/dy = g(x) on the bottom,
 *        homogeneous Neumann on the sides.
 */
struct StripProblem {
    double height;    ///< strip height a = aspect / gate_ratio in gate units
    double x_extent;  ///< half-width X of the truncated domain
    int nx;           ///< vertex count in x
    int ny;           ///< vertex count in y
    std::function<double(double)> flux;  ///< surface flux, zero outside [-1/2, 1/2]

    void validate() const;
    std::vector<double> surface_grid() const;  ///< x coordinates of the bottom row
};

/**
 * @brief Second-order finite-difference solve of the strip problem;
 *        returns the bottom-row (y = 0) values.
 *
 * The five-point system is solved exactly by a cosine-transform
 * diagonalization in x and tridiagonal elimination in y.
 */
std::vector<double> laplace_strip_solve(const StripProblem& prob);

}  // namespace fetbind::oracle

#endif  // FETBIND_ORACLE_HPP
