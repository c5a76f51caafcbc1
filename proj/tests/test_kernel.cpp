#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fetbind/kernel.hpp"
#include "fetbind/oracle.hpp"

using namespace fetbind;

TEST_CASE("mesh nodes are symmetric and flush with the gate edges") {
    for (int n : {1, 2, 3, 27, 81}) {
        Mesh m = Mesh::uniform(n);
        CHECK(m.spacing == doctest::Approx(1.0 / n));
        for (int j = 0; j < n; ++j) {
            CHECK(m.nodes[j] == doctest::Approx(-m.nodes[n - 1 - j]).epsilon(1e-14));
            if (j > 0) CHECK(m.nodes[j] > m.nodes[j - 1]);
        }
        CHECK(m.nodes.front() - 0.5 * m.spacing == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(m.nodes.back() + 0.5 * m.spacing == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK_THROWS_AS(Mesh::uniform(0), std::invalid_argument);
}

TEST_CASE("kernel value: pinned point, decay, evenness, singularity") {
    CHECK(std::abs(kernel_value(1.0, 1e-3, 0.4) - 3.1174) < 1e-3);
    CHECK(kernel_value(1e6, 1e-3, 0.4) < 1e-300);
    for (double u : {0.01, 0.3, 2.5}) {
        CHECK(kernel_value(u, 1e-3, 0.4) == kernel_value(-u, 1e-3, 0.4));
        CHECK(kernel_value(u, 1e-3, 0.4) > kernel_value(u * 1.5, 1e-3, 0.4));
    }
    CHECK_THROWS_AS(kernel_value(0.0, 1e-3, 0.4), std::domain_error);
    CHECK_THROWS_AS(kernel_value(1.0, 0.0, 0.4), std::invalid_argument);
}

TEST_CASE("hat integral is finite on the diagonal and symmetric under swap") {
    Mesh m = Mesh::uniform(27);
    double dx = m.spacing;
    double diag = hat_integral(m.nodes[13], m.nodes[13], dx, 1e-3, 0.4);
    CHECK(diag > 0.0);
    CHECK(std::isfinite(diag));
    double ab = hat_integral(m.nodes[4], m.nodes[9], dx, 1e-3, 0.4);
    double ba = hat_integral(m.nodes[9], m.nodes[4], dx, 1e-3, 0.4);
    CHECK(ab == ba);
    CHECK_THROWS_AS(hat_integral(0.3, 0.0, 0.25, 1e-3, 0.4), std::invalid_argument);
}

TEST_CASE("hat integral matches the adaptive-quadrature oracle at N = 27") {
    Mesh m = Mesh::uniform(27);
    double dx = m.spacing;
    for (int lag : {0, 1, 5}) {
        double closed = hat_integral(m.nodes[13 + lag], m.nodes[13], dx, 1e-3, 0.4);
        double quad =
            oracle::hat_integral_quadrature(m.nodes[13 + lag], m.nodes[13], dx, 1e-3, 0.4, 1e-13);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
}

TEST_CASE("closed form vs quadrature over all lags for small meshes") {
    struct Geometry {
        double gate_ratio, aspect;
    };
    for (Geometry geo : {Geometry{1e-3, 0.4}, Geometry{0.25, 1.0}}) {
        for (int n : {3, 9, 27}) {
            Mesh m = Mesh::uniform(n);
            double worst = 0.0;
            for (int lag = 0; lag < n; ++lag) {
                double closed = hat_lag_integral(lag, m.spacing, geo.gate_ratio, geo.aspect);
                double quad = oracle::hat_integral_quadrature(
                    m.nodes[lag], m.nodes[0], m.spacing, geo.gate_ratio, geo.aspect, 1e-13);
                worst = std::max(worst, std::abs(closed - quad) / std::abs(quad));
            }
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("lag evaluation is continuous across its internal branch switch") {
    // The closed form changes evaluation strategy around w + dx/2 ~ 0.5 and,
    // on the diagonal, around c*dx/2 ~ 0.35; sweep geometries that straddle
    // both and compare directly against quadrature.
    for (double gate_ratio : {0.05, 0.2, 0.35, 0.6, 1.0, 2.0}) {
        for (int lag : {0, 1, 2}) {
            double dx = 1.0 / 3;
            Mesh m = Mesh::uniform(3);
            double closed = hat_lag_integral(lag, dx, gate_ratio, 1.0);
            double quad = oracle::hat_integral_quadrature(m.nodes[lag], m.nodes[0], dx,
                                                          gate_ratio, 1.0, 1e-13);
            CHECK(closed == doctest::Approx(quad).epsilon(2e-10));
        }
    }
}

TEST_CASE("kernel matrix: Toeplitz symmetric positive definite structure") {
    Mesh m = Mesh::uniform(9);
    KernelMatrix km = KernelMatrix::assemble(m, 66.42, 1e-3, 0.4);
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) {
            CHECK(km(j, i) == km(i, j));
            CHECK(km(j, i) == km.lag(std::abs(j - i)));
            CHECK(km(j, i) > 0.0);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(km.matrix());
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("kernel matrix row sums peak at the center row") {
    Mesh m = Mesh::uniform(27);
    KernelMatrix km = KernelMatrix::assemble(m, 10.0, 1e-3, 0.4);
    Eigen::VectorXd sums = km.matrix().rowwise().sum();
    for (int j = 0; j < 13; ++j) {
        CHECK(sums(j) < sums(j + 1));                // rising toward the center
        CHECK(sums(j) == doctest::Approx(sums(26 - j)).epsilon(1e-12));
    }
}

TEST_CASE("assembled entries carry the 2 Da / pi scale against raw quadrature") {
    Mesh m = Mesh::uniform(3);
    KernelMatrix km = KernelMatrix::assemble(m, 66.42, 1e-3, 0.4);
    const double scale = 2.0 * 66.42 / 3.14159265358979323846;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            double quad = oracle::hat_integral_quadrature(m.nodes[j], m.nodes[i], m.spacing,
                                                          1e-3, 0.4, 1e-13);
            CHECK(km(j, i) == doctest::Approx(scale * quad).epsilon(1e-8));
        }
    }
}

TEST_CASE("kernel matrix is linear in the Damkohler number") {
    Mesh m = Mesh::uniform(9);
    KernelMatrix a = KernelMatrix::assemble(m, 5.0, 1e-3, 0.4);
    KernelMatrix b = KernelMatrix::assemble(m, 10.0, 1e-3, 0.4);
    CHECK((b.matrix() - 2.0 * a.matrix()).cwiseAbs().maxCoeff() < 1e-14 * b.matrix().maxCoeff());
    KernelMatrix z = KernelMatrix::assemble(m, 0.0, 1e-3, 0.4);
    CHECK(z.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature oracle: diagonal integral vanishes as the hat shrinks") {
    double prev = 1e300;
    for (double dx : {1.0 / 3, 1.0 / 27, 1.0 / 243}) {
        double v = oracle::hat_integral_quadrature(0.0, 0.0, dx, 1e-3, 0.4, 1e-12);
        CHECK(v > 0.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 0.05);
}
