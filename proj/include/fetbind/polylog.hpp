#ifndef FETBIND_POLYLOG_HPP
#define FETBIND_POLYLOG_HPP

/**
 * @file polylog.hpp
 * @brief Real polylogarithms Li2 and Li3 on [0, 1], plus the odd-index
 *        series sum_{n>=0} z^(2n+1)/(2n+1)^s that appears in the closed-form
 *        kernel integrals.
 *
 * Accuracy target is 1e-13 relative across [0, 1].  The direct power series
 * is used for z <= 1/2; near z = 1 the dilogarithm switches to the Euler
 * reflection identity and the trilogarithm to its expansion in w = -ln z,
 * with exact zeta constants at z = 1.
 */

namespace fetbind {

inline constexpr double zeta2 = 1.6449340668482264365;  // pi^2/6
inline constexpr double zeta3 = 1.2020569031595942854;

/// Li2(z) for z in [0, 1]; throws std::domain_error outside.
double dilog(double z);

/// Li3(z) for z in [0, 1]; throws std::domain_error outside.
double trilog(double z);

/// Li_s(z) for s in {2, 3}, z in [0, 1].
double polylog(int order, double z);

/**
 * @brief Odd-index sum Li_s(z) - 2^(-s) Li_s(z^2) for s in {1, 2, 3}.
 *
 * For s = 1 this equals arctanh(z) (z < 1 required); orders 2 and 3 accept
 * the full interval [0, 1].
 */
double odd_series(int order, double z);

// Exponent-argument forms evaluating at z = exp(-w), w >= 0.  These avoid
// the precision loss of forming 1 - z when w is tiny and are the entry
// points used by the kernel closed forms.
double dilog_expneg(double w);
double trilog_expneg(double w);
double odd_series_expneg(int order, double w);

}  // namespace fetbind

#endif  // FETBIND_POLYLOG_HPP
