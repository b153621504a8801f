#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sqicube/geometry.hpp"

using namespace sqicube;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("built-in surface points") {
    const auto plane = make_surface("plane");
    CHECK((plane->position({1.0, 0.0}) - Vector3(1, 0, 0)).norm() < 1e-15);
    CHECK((plane->position({-0.5, 0.25}) - Vector3(-0.5, 0.25, 0)).norm() < 1e-15);

    const auto cyl = make_surface("cylinder", 2.0);
    CHECK((cyl->position({0.0, 0.0}) - Vector3(2, 0, 0)).norm() < 1e-15);
    const double r2 = std::sqrt(2.0);
    CHECK((cyl->position({1.0, 1.0}) - Vector3(r2, r2, 1)).norm() < 1e-14);

    const auto hyp = make_surface("hyperboloid");
    CHECK((hyp->position({0.0, 0.0}) - Vector3(1, 0, 0)).norm() < 1e-15);
    CHECK((hyp->position({2.0, 0.0}) - Vector3(0, 1, 0)).norm() < 1e-15);
    const double w = std::sqrt(2.0);
    CHECK((hyp->position({0.0, 1.0}) - Vector3(w, 0, 1)).norm() < 1e-14);

    CHECK_THROWS_AS((void)make_surface("torus"), std::invalid_argument);
}

TEST_CASE("first fundamental form of the cylinder") {
    // angle pi*t1/4 at radius r: A = diag((pi r/4)^2, 1) everywhere
    for (double r : {1.0, 2.0}) {
        const auto cyl = make_surface("cylinder", r);
        for (double t1 : {-1.0, 0.0, 0.7}) {
            const Matrix2 A = first_fundamental_form(*cyl, {t1, 0.3});
            CHECK(A(0, 0) == doctest::Approx(pi * r / 4 * (pi * r / 4)).epsilon(1e-13));
            CHECK(A(1, 1) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(A(0, 1)) < 1e-14);
            CHECK(std::abs(A(0, 1) - A(1, 0)) == 0.0);
        }
    }
}

TEST_CASE("jacobian squared equals the metric determinant") {
    for (const char* name : {"plane", "cylinder", "hyperboloid"}) {
        const auto surf = make_surface(name);
        for (double u : {-0.9, 0.1, 0.8})
            for (double v : {-0.6, 0.0, 1.0}) {
                const Matrix2 A = first_fundamental_form(*surf, {u, v});
                const double J = jacobian(*surf, {u, v});
                CHECK(J * J == doctest::Approx(A.determinant()).epsilon(1e-12));
            }
    }
    // cylinder at radius 2: constant pi/2
    const auto cyl = make_surface("cylinder", 2.0);
    CHECK(jacobian(*cyl, {0.3, -0.8}) == doctest::Approx(pi / 2).epsilon(1e-14));
}

TEST_CASE("kernels and the quadratic form") {
    Matrix2 A;
    A << 2.0, 0.5, 0.5, 1.0;
    const Vector2 s{0.1, -0.2}, t{0.7, 0.4};
    const Vector2 d = t - s;
    const double P = d.dot(A * d);
    CHECK(quadratic_form(A, s, t) == doctest::Approx(P).epsilon(1e-15));
    CHECK(kernel_K(A, s, t) == doctest::Approx(1.0 / std::sqrt(P)).epsilon(1e-15));

    const auto cyl = make_surface("cylinder", 2.0);
    const double dist = (cyl->position(t) - cyl->position(s)).norm();
    CHECK(kernel_G(*cyl, s, t) == doctest::Approx(1.0 / dist).epsilon(1e-14));
}

TEST_CASE("rho closed form on the cylinder") {
    const auto cyl = make_surface("cylinder", 2.0);
    const Vector2 s{0.0, 0.0}, t{1.0, 0.0};
    // sqrt(P) = pi/2 from the metric; chord length 2*sqrt(2-2cos(pi/4))
    const double want = (pi / 2) / (2.0 * std::sqrt(2.0 - 2.0 * std::cos(pi / 4)));
    CHECK(rho(*cyl, s, t) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("rho approaches one at the source") {
    const auto hyp = make_surface("hyperboloid");
    const Vector2 s{0.25, -0.4};
    CHECK(rho(*hyp, s, s) == 1.0);
    double prev_dev = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        double dev = 0;
        for (int k = 0; k < 8; ++k) {
            const double a = 2 * pi * k / 8;
            const Vector2 t = s + eps * Vector2{std::cos(a), std::sin(a)};
            dev = std::max(dev, std::abs(rho(*hyp, s, t) - 1.0));
        }
        CHECK(dev < prev_dev);
        prev_dev = dev;
    }
    CHECK(prev_dev < 1e-4);  // first order vanishing near s
}

TEST_CASE("rho stays near one on the plane") {
    const auto plane = make_surface("plane");
    for (double u : {-1.0, 0.0, 0.9})
        for (double v : {-0.7, 0.3}) {
            CHECK(rho(*plane, {0.1, 0.2}, {u, v}) == doctest::Approx(1.0).epsilon(1e-13));
        }
}

TEST_CASE("spd validation") {
    Matrix2 bad1;
    bad1 << 1.0, 2.0, 2.0, 1.0;  // indefinite
    CHECK_THROWS_AS(check_spd(bad1), std::invalid_argument);
    Matrix2 bad2;
    bad2 << 1.0, 0.0, 0.1, 1.0;  // not symmetric
    CHECK_THROWS_AS(check_spd(bad2), std::invalid_argument);
    Matrix2 good;
    good << 2.0, 0.3, 0.3, 1.0;
    CHECK_NOTHROW(check_spd(good));
}

TEST_CASE("analytic surface with finite difference fallback") {
    AnalyticSurface surf([](const Vector2& t) {
        return Vector3{t[0], t[1], std::sin(t[0]) * t[1]};
    });
    const Vector2 t{0.4, -0.6};
    const Vector3 du = surf.partial_u(t), dv = surf.partial_v(t);
    CHECK(du[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(du[2] == doctest::Approx(std::cos(0.4) * -0.6).epsilon(1e-8));
    CHECK(dv[2] == doctest::Approx(std::sin(0.4)).epsilon(1e-8));

    // supplied derivatives win over the finite differences
    AnalyticSurface exact([](const Vector2& t) { return Vector3{t[0], t[1], 0.0}; },
                          [](const Vector2&) { return Vector3{1, 0, 0}; },
                          [](const Vector2&) { return Vector3{0, 1, 0}; });
    CHECK((exact.partial_u(t) - Vector3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("builtin derivatives match finite differences") {
    for (const char* name : {"cylinder", "hyperboloid"}) {
        const auto surf = make_surface(name);
        const double h = 1e-6;
        for (double u : {-0.8, 0.2})
            for (double v : {-0.5, 0.9}) {
                const Vector2 t{u, v};
                const Vector3 fdu =
                    (surf->position({u + h, v}) - surf->position({u - h, v})) / (2 * h);
                const Vector3 fdv =
                    (surf->position({u, v + h}) - surf->position({u, v - h})) / (2 * h);
                CHECK((surf->partial_u(t) - fdu).norm() < 1e-8);
                CHECK((surf->partial_v(t) - fdv).norm() < 1e-8);
            }
    }
}
