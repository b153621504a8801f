#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "sqicube/quasi_interp.hpp"
#include "sqicube/spline_product.hpp"

using namespace sqicube;

namespace {

std::vector<double> uniform_breaks(double a, double b, int n_elem) {
    std::vector<double> bp(size_t(n_elem) + 1);
    for (int i = 0; i <= n_elem; ++i) bp[size_t(i)] = a + (b - a) * i / n_elem;
    return bp;
}

Spline1D random_spline(int degree, const std::vector<double>& bp, unsigned seed) {
    Spline1D s;
    s.kv = KnotVector::clamped(degree, bp);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    s.coeffs = Vector(s.kv.dimension());
    for (Index i = 0; i < s.coeffs.size(); ++i) s.coeffs[i] = dist(gen);
    return s;
}

TensorSpline2D random_tensor(int p, const std::vector<double>& bp, unsigned seed) {
    TensorSpline2D s;
    s.ku = KnotVector::clamped(p, bp);
    s.kv = s.ku;
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    s.coeffs = Matrix(s.ku.dimension(), s.kv.dimension());
    for (Index i = 0; i < s.coeffs.rows(); ++i)
        for (Index j = 0; j < s.coeffs.cols(); ++j) s.coeffs(i, j) = dist(gen);
    return s;
}

}  // namespace

TEST_CASE("univariate product is pointwise exact") {
    const auto a = random_spline(2, {-1.0, -0.3, 0.4, 1.0}, 2);
    const auto b = random_spline(3, {-1.0, 0.0, 0.6, 1.0}, 3);
    const auto ab = multiply_splines_1d(a, b);
    CHECK(ab.kv.degree() == 5);
    for (int k = 0; k <= 100; ++k) {
        const double t = -1 + 2.0 * k / 100;
        const double want = eval_spline_1d(a, t) * eval_spline_1d(b, t);
        CHECK(std::abs(eval_spline_1d(ab, t) - want) < 1e-13);
    }
}

TEST_CASE("product with the constant spline is degree elevation") {
    const auto a = random_spline(3, uniform_breaks(-1, 1, 4), 17);
    Spline1D one;
    one.kv = KnotVector::clamped(2, uniform_breaks(-1, 1, 4));
    one.coeffs = Vector::Ones(one.kv.dimension());  // partition of unity
    const auto prod = multiply_splines_1d(a, one);
    CHECK(prod.kv.degree() == 5);
    for (int k = 0; k <= 80; ++k) {
        const double t = -1 + 2.0 * k / 80;
        CHECK(std::abs(eval_spline_1d(prod, t) - eval_spline_1d(a, t)) < 1e-13);
    }
}

TEST_CASE("product knot multiplicities") {
    const auto a = random_spline(2, {-1.0, 0.0, 1.0}, 5);
    const auto b = random_spline(3, {-1.0, 0.0, 1.0}, 6);
    const auto ab = multiply_splines_1d(a, b);
    CHECK(ab.kv.multiplicity(0.0) == 4);  // C^1 from the quadratic factor
    CHECK(ab.kv.multiplicity(-1.0) == 6);
}

TEST_CASE("multiply into a caller supplied space") {
    const auto a = random_spline(2, {-1.0, 0.2, 1.0}, 8);
    const auto b = random_spline(2, {-1.0, -0.5, 1.0}, 9);
    const auto target = merge_knot_vectors(a.kv, b.kv, 4);
    const Vector c = multiply_splines_1d_into(a, b, target);
    Spline1D prod{target, c};
    for (int k = 0; k <= 60; ++k) {
        const double t = -1 + 2.0 * k / 60;
        CHECK(std::abs(eval_spline_1d(prod, t) -
                       eval_spline_1d(a, t) * eval_spline_1d(b, t)) < 1e-13);
    }
}

TEST_CASE("product space basis matches its extraction tables") {
    const auto weight = BSplineWeight::uniform(2, 3);
    const auto sigma = KnotVector::clamped(3, uniform_breaks(-1, 1, 5));
    const auto space = make_product_space(sigma, sigma, weight);
    CHECK(space.bp_u.front() == -1.0);
    CHECK(space.bp_u.back() == 1.0);
    CHECK(space.ext_u.size() == space.bp_u.size() - 1);
    CHECK(space.span_u.size() == space.ext_u.size());
    std::mt19937 gen(44);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 40; ++rep) {
        const double u = dist(gen), v = dist(gen);
        const Index i = Index(gen() % unsigned(space.dim_u()));
        const Index j = Index(gen() % unsigned(space.dim_v()));
        const double want = eval_basis(space.u, i, u) * eval_basis(space.v, j, v);
        CHECK(std::abs(space.eval_basis_2d(i, j, u, v) - want) < 1e-13);
    }
}

TEST_CASE("extension margin covers half the smallest weight element") {
    const auto weight = BSplineWeight::uniform(3, 2);
    const auto sigma = KnotVector::clamped(2, uniform_breaks(-1, 1, 9));
    const auto space = make_product_space(sigma, sigma, weight);
    CHECK(space.ext_margin_u == doctest::Approx(0.25));   // elements 2/(3+1)
    CHECK(space.ext_margin_v == doctest::Approx(1.0 / 3));
}

TEST_CASE("tensor product coefficients are exact") {
    const auto weight = BSplineWeight::uniform(2, 2);
    for (int p : {2, 3}) {
        const auto sigma = random_tensor(p, uniform_breaks(-1, 1, 4), 50 + unsigned(p));
        const auto space = make_product_space(sigma.ku, sigma.kv, weight);
        const auto prod = multiply_tensor(sigma, weight, space);
        CHECK(prod.grid.rows() == space.dim_u());
        CHECK(prod.grid.cols() == space.dim_v());
        for (int a = 0; a <= 14; ++a)
            for (int b = 0; b <= 14; ++b) {
                const double u = -1 + 2.0 * a / 14, v = -1 + 2.0 * b / 14;
                const double want = eval_spline_2d(sigma, u, v) * weight.eval(u, v);
                CHECK(std::abs(prod.eval(u, v) - want) < 1e-12);
            }
    }
}

TEST_CASE("unit sigma lifts the weight into the product space") {
    const auto weight = BSplineWeight::uniform(3, 3);
    TensorSpline2D one;
    one.ku = KnotVector::clamped(2, uniform_breaks(-1, 1, 6));
    one.kv = one.ku;
    one.coeffs = Matrix::Ones(one.ku.dimension(), one.kv.dimension());
    const auto space = make_product_space(one.ku, one.kv, weight);
    const auto lifted = multiply_tensor(one, weight, space);
    for (int a = 0; a <= 10; ++a)
        for (int b = 0; b <= 10; ++b) {
            const double u = -1 + 2.0 * a / 10, v = -1 + 2.0 * b / 10;
            CHECK(std::abs(lifted.eval(u, v) - weight.eval(u, v)) < 1e-12);
        }
}

TEST_CASE("factor operators compose the tensor product") {
    const auto weight = BSplineWeight::uniform(2, 3);
    const auto sigma = random_tensor(3, uniform_breaks(-1, 1, 3), 77);
    const auto space = make_product_space(sigma.ku, sigma.kv, weight);
    const auto ops = make_product_operators(sigma.ku, sigma.kv, weight, space);
    CHECK(ops.Pu.rows() == sigma.ku.dimension());
    CHECK(ops.Pu.cols() == space.dim_u());
    const Matrix grid = ops.Pu.transpose() * sigma.coeffs * ops.Pv;
    const auto prod = multiply_tensor(sigma, weight, space);
    CHECK((grid - prod.grid).cwiseAbs().maxCoeff() < 1e-13);
}
