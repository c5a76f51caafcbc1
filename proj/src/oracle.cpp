#include "fetbind/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "fetbind/kernel.hpp"

namespace fetbind::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss 7 / Kronrod 15 pair on [-1, 1].
constexpr double kNodes[8] = {0.0,
                              0.207784955007898468,
                              0.405845151377397167,
                              0.586087235467691130,
                              0.741531185599394440,
                              0.864864423359769073,
                              0.949107912342758525,
                              0.991455371120812639};
constexpr double kWeightK[8] = {0.209482141084727828, 0.204432940075298892,
                                0.190350578064785410, 0.169004726639267903,
                                0.140653259715525919, 0.104790010322250184,
                                0.063092092629978553, 0.022935322010529225};
constexpr double kWeightG[4] = {0.417959183673469388, 0.381830050505118945,
                                0.279705391489276668, 0.129484966168869693};

template <typename F>
double gk15(const F& f, double a, double b, double& err, long& evals) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double f0 = f(mid);
    double sk = kWeightK[0] * f0;
    double sg = kWeightG[0] * f0;
    for (int i = 1; i < 8; ++i) {
        double dx = half * kNodes[i];
        double fs = f(mid + dx) + f(mid - dx);
        sk += kWeightK[i] * fs;
        if (i % 2 == 0) sg += kWeightG[i / 2] * fs;
    }
    evals += 15;
    sk *= half;
    sg *= half;
    err = std::abs(sk - sg);
    return sk;
}

// Worst-panel-first adaptive Gauss-Kronrod over the initial panels defined
// by [a, b] plus interior split points (which pin integrand kinks and
// singularities to panel endpoints).  Splitting the worst panel shrinks the
// error geometrically even against an endpoint log singularity, so a global
// error budget converges where per-depth tolerance halving would not.
template <typename F>
double piecewise_adapt(const F& f, double a, double b, std::vector<double> splits,
                       double tol) {
    struct Panel {
        double a, b, val, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    splits.push_back(a);
    splits.push_back(b);
    std::sort(splits.begin(), splits.end());

    long evals = 0;
    const long budget = 6'000'000;
    std::priority_queue<Panel> queue;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
        double lo = splits[i];
        double hi = splits[i + 1];
        if (lo < a || hi > b || hi - lo <= 0.0) continue;
        Panel p{lo, hi, 0.0, 0.0};
        p.val = gk15(f, lo, hi, p.err, evals);
        total += p.val;
        total_err += p.err;
        queue.push(p);
    }
    while (total_err > tol && !queue.empty()) {
        if (evals > budget) {
            throw std::runtime_error("adaptive quadrature subdivision limit exceeded");
        }
        Panel p = queue.top();
        queue.pop();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            // Panel has collapsed to machine width; keep its estimate.
            total_err -= p.err;
            continue;
        }
        Panel l{p.a, mid, 0.0, 0.0};
        Panel r{mid, p.b, 0.0, 0.0};
        l.val = gk15(f, l.a, l.b, l.err, evals);
        r.val = gk15(f, r.a, r.b, r.err, evals);
        total += l.val + r.val - p.val;
        total_err += l.err + r.err - p.err;
        queue.push(l);
        queue.push(r);
    }
    return total;
}

double hat_value(double v, double center, double dx) {
    double u = std::abs(v - center);
    if (u >= 0.5 * dx) return 0.0;
    return 1.0 - 2.0 * u / dx;
}

// ---- cosine-transform machinery for the strip solve -----------------------

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * kPi / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Unnormalized DCT-I of u (length M+1):
//   out_m = u_0 + (-1)^m u_M + 2 sum_{k=1}^{M-1} u_k cos(pi k m / M).
// Applying it twice multiplies by 2M.
std::vector<double> dct1(const std::vector<double>& u) {
    const int m_count = static_cast<int>(u.size());
    const int m_last = m_count - 1;
    std::vector<double> out(u.size());
    if (m_last >= 4 && is_power_of_two(m_last)) {
        std::vector<std::complex<double>> ext(2 * static_cast<std::size_t>(m_last));
        for (int k = 0; k <= m_last; ++k) ext[static_cast<std::size_t>(k)] = u[static_cast<std::size_t>(k)];
        for (int k = 1; k < m_last; ++k)
            ext[static_cast<std::size_t>(2 * m_last - k)] = u[static_cast<std::size_t>(k)];
        fft_inplace(ext);
        for (int m = 0; m <= m_last; ++m) out[static_cast<std::size_t>(m)] = ext[static_cast<std::size_t>(m)].real();
        return out;
    }
    for (int m = 0; m <= m_last; ++m) {
        double s = u[0] + (m % 2 == 0 ? 1.0 : -1.0) * u[static_cast<std::size_t>(m_last)];
        for (int k = 1; k < m_last; ++k) {
            s += 2.0 * u[static_cast<std::size_t>(k)] * std::cos(kPi * k * m / m_last);
        }
        out[static_cast<std::size_t>(m)] = s;
    }
    return out;
}

}  // namespace

double polylog_series(int order, double z, double tol) {
    if (order < 1) throw std::domain_error("polylog_series requires order >= 1");
    if (!(z >= 0.0)) throw std::domain_error("polylog_series requires z >= 0");
    if (z >= 1.0 - 1e-6) {
        throw std::domain_error("polylog_series: z too close to 1 for the naive series");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    // Kahan-compensated so the long near-1 sums stay a trustworthy reference.
    double sum = 0.0;
    double comp = 0.0;
    double zk = 1.0;
    for (long k = 1; k < 50'000'000; ++k) {
        zk *= z;
        double term = zk / std::pow(double(k), order);
        double y = term - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (term < tol) return sum;
    }
    throw std::runtime_error("polylog_series failed to converge");
}

double hat_integral_quadrature(double x_j, double x_i, double dx, double gate_ratio,
                               double aspect, double tol) {
    if (!(dx > 0.0)) throw std::invalid_argument("spacing must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const double lo = x_i - 0.5 * dx;
    const double hi = x_i + 0.5 * dx;
    std::vector<double> splits = {x_i};
    if (x_j > lo && x_j < hi && x_j != x_i) splits.push_back(x_j);
    auto f = [&](double v) {
        return kernel_value(x_j - v, gate_ratio, aspect) * hat_value(v, x_i, dx);
    };
    return piecewise_adapt(f, lo, hi, splits, tol);
}

std::vector<double> convolution_direct(const std::function<double(double)>& flux,
                                       double support_lo, double support_hi,
                                       const std::vector<double>& breakpoints,
                                       double gate_ratio, double aspect,
                                       const std::vector<double>& x_eval, double tol) {
    if (!(support_hi > support_lo)) {
        throw std::invalid_argument("flux support must be a nonempty interval");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    std::vector<double> out;
    out.reserve(x_eval.size());
    for (double x : x_eval) {
        std::vector<double> splits = breakpoints;
        if (x > support_lo && x < support_hi) splits.push_back(x);
        auto f = [&](double v) {
            if (v == x) return 0.0;  // never hit: splits pin the singularity to endpoints
            return kernel_value(x - v, gate_ratio, aspect) * flux(v);
        };
        out.push_back(-2.0 / kPi * piecewise_adapt(f, support_lo, support_hi, splits, tol));
    }
    return out;
}

void StripProblem::validate() const {
    if (!(height > 0.0)) throw std::invalid_argument("strip height must be positive");
    if (!(x_extent > 0.5)) throw std::invalid_argument("x_extent must exceed the gate half-width");
    if (nx < 3 || ny < 3) throw std::invalid_argument("grid counts must be at least 3");
    if (!flux) throw std::invalid_argument("flux profile must be set");
}

std::vector<double> StripProblem::surface_grid() const {
    validate();
    std::vector<double> x(static_cast<std::size_t>(nx));
    const double dx = 2.0 * x_extent / (nx - 1);
    for (int i = 0; i < nx; ++i) x[static_cast<std::size_t>(i)] = -x_extent + i * dx;
    return x;
}

std::vector<double> laplace_strip_solve(const StripProblem& prob) {
    prob.validate();
    const int nx = prob.nx;
    const int ny = prob.ny;
    const int m_last = nx - 1;
    const double dx = 2.0 * prob.x_extent / m_last;
    const double dy = prob.height / (ny - 1);

    // Surface flux samples, clipped to the gate support.
    std::vector<double> g(static_cast<std::size_t>(nx), 0.0);
    auto grid = prob.surface_grid();
    for (int i = 0; i < nx; ++i) {
        double x = grid[static_cast<std::size_t>(i)];
        if (std::abs(x) <= 0.5 + 1e-14) g[static_cast<std::size_t>(i)] = prob.flux(x);
    }

    // Expansion coefficients of g in the Neumann cosine basis.
    std::vector<double> ghat = dct1(g);
    std::vector<double> gcoef(static_cast<std::size_t>(nx));
    for (int m = 0; m <= m_last; ++m) {
        double norm = (m == 0 || m == m_last) ? 2.0 * m_last : double(m_last);
        gcoef[static_cast<std::size_t>(m)] = ghat[static_cast<std::size_t>(m)] / norm;
    }

    // Per-mode tridiagonal solve in y over rows j = 0..ny-2 (top row is
    // Dirichlet zero).  Row 0 carries the ghost-eliminated Neumann flux.
    const int rows = ny - 1;
    std::vector<double> diag(static_cast<std::size_t>(rows));
    std::vector<double> rhs(static_cast<std::size_t>(rows));
    std::vector<double> bottom(static_cast<std::size_t>(nx));
    const double inv_dy2 = 1.0 / (dy * dy);
    for (int m = 0; m <= m_last; ++m) {
        const double lam = (2.0 * std::cos(kPi * m / m_last) - 2.0) / (dx * dx);
        const double d0 = -2.0 * inv_dy2 + lam;
        for (int j = 0; j < rows; ++j) {
            diag[static_cast<std::size_t>(j)] = d0;
            rhs[static_cast<std::size_t>(j)] = 0.0;
        }
        rhs[0] = 2.0 * gcoef[static_cast<std::size_t>(m)] / dy;
        // Forward elimination; sub/super diagonals are inv_dy2 except the
        // first superdiagonal, which is 2*inv_dy2 from the ghost reflection.
        for (int j = 1; j < rows; ++j) {
            double upper_prev = (j == 1) ? 2.0 * inv_dy2 : inv_dy2;
            double w = inv_dy2 / diag[static_cast<std::size_t>(j - 1)];
            diag[static_cast<std::size_t>(j)] -= w * upper_prev;
            rhs[static_cast<std::size_t>(j)] -= w * rhs[static_cast<std::size_t>(j - 1)];
        }
        double prev = rhs[static_cast<std::size_t>(rows - 1)] / diag[static_cast<std::size_t>(rows - 1)];
        for (int j = rows - 2; j >= 0; --j) {
            double upper = (j == 0) ? 2.0 * inv_dy2 : inv_dy2;
            prev = (rhs[static_cast<std::size_t>(j)] - upper * prev) / diag[static_cast<std::size_t>(j)];
            if (j == 0) bottom[static_cast<std::size_t>(m)] = prev;
        }
        if (rows == 1) bottom[static_cast<std::size_t>(m)] = prev;
    }

    // Back-substitution above stored only the j = 0 value per mode; rebuild
    // the surface row from the modal values.
    std::vector<double> packed(static_cast<std::size_t>(nx));
    for (int m = 0; m <= m_last; ++m) {
        double b = bottom[static_cast<std::size_t>(m)];
        packed[static_cast<std::size_t>(m)] = (m == 0 || m == m_last) ? b : 0.5 * b;
    }
    return dct1(packed);
}

}  // namespace fetbind::oracle
