#include "fetbind/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fetbind/polylog.hpp"

namespace fetbind {

namespace {

constexpr double kPi = std::numbers::pi;

void check_geometry(double gate_ratio, double aspect) {
    if (!(gate_ratio > 0.0)) throw std::invalid_argument("gate_ratio must be positive");
    if (!(aspect > 0.0)) throw std::invalid_argument("aspect must be positive");
}

// Coefficients c_k of the small-argument expansion of the odd trilog sum
//   T(w) := sum_{n odd} e^{-w n}/n^3
//        = (7/8) zeta3 - (pi^2/8) w + (w^2/4)(3/2 + ln 2 - ln w)
//          + sum_{k even >= 4} c_k w^k,
// with c_k = zeta(3-k) (1 - 2^{k-3}) / k!.  Odd k >= 3 drop out.
constexpr double kC4 = 1.0 / 288.0;
constexpr double kC6 = -7.0 / 86400.0;
constexpr double kC8 = 31.0 / 10160640.0;
constexpr double kC10 = -127.0 / 870912000.0;
constexpr double kC12 = 511.0 / 63228303360.0;
constexpr double kC14 = -1414477.0 / 2855999270215680.0;

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kExpansionA = 1.5 + kLn2;  // 3/2 + ln 2

// Tail of the expansion starting at w^4 (constant, linear and w^2 log terms
// handled by callers).
double expansion_tail(double w) {
    double w2 = w * w;
    double p = w2 * w2;
    double v = kC4 * p;
    p *= w2;
    v += kC6 * p;
    p *= w2;
    v += kC8 * p;
    p *= w2;
    v += kC10 * p;
    p *= w2;
    v += kC12 * p;
    p *= w2;
    v += kC14 * p;
    return v;
}

// Second central difference T(w-d) - 2 T(w) + T(w+d) of the odd trilog sum,
// for 0 < d <= w.  This is the whole off-diagonal hat integral up to scale,
// so it must not lose precision when w and d are tiny; the constant and
// linear expansion terms cancel exactly and the quadratic-log term reduces
// to closed form:
//   Delta2[u^2 (A - ln u)] = 2 d^2 (A - ln w) - w^2 phi(d/w),
//   phi(r) = (1 + r^2) ln(1 - r^2) + 4 r artanh(r).
double odd_trilog_second_diff(double w, double d) {
    if (w + d <= 0.5) {
        double r = d / w;
        double phi = (1.0 + r * r) * std::log1p(-r * r) + 4.0 * r * std::atanh(r);
        double quad = 2.0 * d * d * (kExpansionA - std::log(w)) - w * w * phi;
        double tail = expansion_tail(w - d) - 2.0 * expansion_tail(w) + expansion_tail(w + d);
        return 0.25 * quad + tail;
    }
    // Series sum_{n odd} e^{-w n} (e^{d n} + e^{-d n} - 2)/n^3; every term is
    // nonnegative and the sum converges like exp(-(w - d) n).  The branch
    // condition guarantees w - d > 1/6, so a few hundred terms suffice.
    double sum = 0.0;
    for (int n = 1; n < 400000; n += 2) {
        double n3 = double(n) * n * n;
        double term;
        if (d * n < 1.0) {
            double bump = std::expm1(d * n) + std::expm1(-d * n);
            term = std::exp(-w * n) * bump / n3;
        } else {
            term = (std::exp(-(w - d) * n) + std::exp(-(w + d) * n) -
                    2.0 * std::exp(-w * n)) /
                   n3;
        }
        sum += term;
        if (term < 1e-18 * sum && n > 5) break;
    }
    return sum;
}

// T(0) - T(d) = sum_{n odd} (1 - e^{-d n})/n^3, stable for small d via the
// expansion (the zeta3 constants cancel exactly).
double odd_trilog_drop(double d) {
    if (d <= 0.35) {
        return kPi * kPi / 8.0 * d - 0.25 * d * d * (kExpansionA - std::log(d)) -
               expansion_tail(d);
    }
    return 0.875 * zeta3 - odd_series_expneg(3, d);
}

}  // namespace

Mesh Mesh::uniform(int n) {
    if (n < 1) throw std::invalid_argument("mesh needs at least one node");
    Mesh m;
    m.n_nodes = n;
    m.spacing = 1.0 / n;
    m.nodes.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        m.nodes[static_cast<std::size_t>(j)] = -0.5 + (j + 0.5) * m.spacing;
    }
    return m;
}

double kernel_value(double u, double gate_ratio, double aspect) {
    check_geometry(gate_ratio, aspect);
    if (u == 0.0) {
        throw std::domain_error("kernel is singular at zero separation");
    }
    double w = kPi * gate_ratio * std::abs(u) / (2.0 * aspect);
    // atanh(e^{-w}) = (ln(1 + e^{-w}) - ln(1 - e^{-w})) / 2; the expm1 form
    // keeps the log profile finite where e^{-w} rounds to 1.
    return 0.5 * (std::log1p(std::exp(-w)) - std::log(-std::expm1(-w)));
}

double hat_lag_integral(int lag, double dx, double gate_ratio, double aspect) {
    check_geometry(gate_ratio, aspect);
    if (lag < 0) throw std::invalid_argument("lag must be nonnegative");
    if (!(dx > 0.0)) throw std::invalid_argument("spacing must be positive");

    const double c = kPi * gate_ratio / (2.0 * aspect);  // exponent rate
    const double half = 0.5 * c * dx;                    // c * dx/2

    if (lag == 0) {
        // Both hat halves see the singularity at the peak; the leading
        // polylog constants cancel, leaving the integrable-log profile.
        if (half <= 0.35) {
            return 0.25 * dx * (kExpansionA - std::log(half)) +
                   4.0 / (dx * c * c) * expansion_tail(half);
        }
        return 2.0 * (zeta2 * 0.75 / c - 2.0 / (dx * c * c) * odd_trilog_drop(half));
    }
    // Left + right hat pieces collapse to a second central difference of the
    // odd trilog sum; the Li2 contributions cancel identically.
    double w = c * dx * lag;
    return 2.0 / (dx * c * c) * odd_trilog_second_diff(w, half);
}

double hat_integral(double x_j, double x_i, double dx, double gate_ratio, double aspect) {
    if (!(dx > 0.0)) throw std::invalid_argument("spacing must be positive");
    double sep = std::abs(x_j - x_i);
    double ratio = sep / dx;
    int lag = static_cast<int>(std::lround(ratio));
    if (std::abs(ratio - lag) > 1e-8 * (1.0 + ratio)) {
        throw std::invalid_argument(
            "x_j and x_i must be nodes of one equally spaced mesh (separation not a "
            "multiple of dx)");
    }
    return hat_lag_integral(lag, dx, gate_ratio, aspect);
}

KernelMatrix KernelMatrix::assemble(const Mesh& mesh, double damkohler, double gate_ratio,
                                    double aspect) {
    check_geometry(gate_ratio, aspect);
    if (!(damkohler >= 0.0)) throw std::invalid_argument("damkohler must be nonnegative");
    const int n = mesh.n_nodes;
    KernelMatrix km;
    km.lags_.resize(static_cast<std::size_t>(n));
    const double scale = 2.0 * damkohler / kPi;
    for (int k = 0; k < n; ++k) {
        km.lags_[static_cast<std::size_t>(k)] =
            damkohler == 0.0 ? 0.0
                             : scale * hat_lag_integral(k, mesh.spacing, gate_ratio, aspect);
    }
    km.dense_.resize(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            km.dense_(j, i) = km.lags_[static_cast<std::size_t>(std::abs(j - i))];
        }
    }
    return km;
}

}  // namespace fetbind
