#include "fetbind/polylog.hpp"

#include <cmath>
#include <stdexcept>

namespace fetbind {

namespace {

void check_unit_interval(double z) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw std::domain_error("polylog argument must lie in [0, 1]");
    }
}

// Direct power series, adequate for z <= 1/2 (about 50 terms to 1e-17).
double series(int order, double z) {
    double sum = 0.0;
    double zk = 1.0;
    for (int k = 1; k < 200; ++k) {
        zk *= z;
        double den = (order == 2) ? double(k) * k : double(k) * k * k;
        double term = zk / den;
        sum += term;
        if (term < 1e-17 * (sum + 1e-300)) break;
    }
    return sum;
}

// Coefficients of the Li3(e^{-w}) expansion
//   Li3(e^{-w}) = zeta3 - zeta2 w + w^2 (3/2 - ln w)/2 + sum_k zc[k] (-w)^k/k!
// where zc[k] = zeta(3-k).  Only k = 3, 4 and even k >= 6 contribute.
constexpr double kZeta0 = -0.5;
constexpr double kZetaM1 = -1.0 / 12.0;
constexpr double kZetaM3 = 1.0 / 120.0;
constexpr double kZetaM5 = -1.0 / 252.0;
constexpr double kZetaM7 = 1.0 / 240.0;
constexpr double kZetaM9 = -1.0 / 132.0;
constexpr double kZetaM11 = 691.0 / 32760.0;
constexpr double kZetaM13 = -1.0 / 12.0;

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

double dilog(double z) {
    check_unit_interval(z);
    if (z <= 0.5) return series(2, z);
    if (z == 1.0) return zeta2;
    return dilog_expneg(-std::log(z));
}

double trilog(double z) {
    check_unit_interval(z);
    if (z <= 0.5) return series(3, z);
    if (z == 1.0) return zeta3;
    return trilog_expneg(-std::log(z));
}

double dilog_expneg(double w) {
    if (w < 0.0) throw std::domain_error("dilog_expneg requires w >= 0");
    if (w == 0.0) return zeta2;
    if (w >= 0.6931471805599453) return series(2, std::exp(-w));
    // Euler reflection Li2(z) = zeta2 - ln(z) ln(1-z) - Li2(1-z), with
    // 1 - z = -expm1(-w) formed without cancellation.
    double y = -std::expm1(-w);  // in (0, 1/2]
    return zeta2 + w * std::log(y) - series(2, y);
}

double trilog_expneg(double w) {
    if (w < 0.0) throw std::domain_error("trilog_expneg requires w >= 0");
    if (w == 0.0) return zeta3;
    if (w >= 0.6931471805599453) return series(3, std::exp(-w));
    double w2 = w * w;
    double v = zeta3 - zeta2 * w + 0.5 * w2 * (1.5 - std::log(w));
    // Tail sum_{k>=3} zeta(3-k) (-w)^k / k!; terms to k = 14 keep the
    // truncation below 1e-16 relative for w < ln 2.
    const double mw = -w;
    double p3 = mw * mw * mw;
    v += kZeta0 * p3 / 6.0;
    double p = p3 * mw;  // (-w)^4
    v += kZetaM1 * p / 24.0;
    p *= w2;
    v += kZetaM3 * p / factorial(6);
    p *= w2;
    v += kZetaM5 * p / factorial(8);
    p *= w2;
    v += kZetaM7 * p / factorial(10);
    p *= w2;
    v += kZetaM9 * p / factorial(12);
    p *= w2;
    v += kZetaM11 * p / factorial(14);
    return v;
}

double polylog(int order, double z) {
    if (order == 2) return dilog(z);
    if (order == 3) return trilog(z);
    throw std::domain_error("polylog supports orders 2 and 3 only");
}

double odd_series(int order, double z) {
    check_unit_interval(z);
    switch (order) {
        case 1:
            if (z == 1.0) throw std::domain_error("odd_series diverges at order 1, z = 1");
            // Li1(z) - Li1(z^2)/2 with Li1(z) = -ln(1-z)
            return -std::log1p(-z) + 0.5 * std::log1p(-z * z);
        case 2:
            return dilog(z) - 0.25 * dilog(z * z);
        case 3:
            return trilog(z) - 0.125 * trilog(z * z);
        default:
            throw std::domain_error("odd_series supports orders 1, 2 and 3 only");
    }
}

double odd_series_expneg(int order, double w) {
    if (w < 0.0) throw std::domain_error("odd_series_expneg requires w >= 0");
    switch (order) {
        case 1: {
            if (w == 0.0) throw std::domain_error("odd_series diverges at order 1, z = 1");
            double z = std::exp(-w);
            return -std::log1p(-z) + 0.5 * std::log1p(-z * z);
        }
        case 2:
            return dilog_expneg(w) - 0.25 * dilog_expneg(2.0 * w);
        case 3:
            return trilog_expneg(w) - 0.125 * trilog_expneg(2.0 * w);
        default:
            throw std::domain_error("odd_series supports orders 1, 2 and 3 only");
    }
}

}  // namespace fetbind
