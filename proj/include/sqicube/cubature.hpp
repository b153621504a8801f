#pragma once

#include <array>
#include <functional>
#include <memory>
#include <map>
#include <shared_mutex>

#include "sqicube/geometry.hpp"
#include "sqicube/quasi_interp.hpp"
#include "sqicube/singular_quadrature.hpp"
#include "sqicube/spline_product.hpp"

namespace sqicube {

/// Scalar integrand on the weight support, bound to a source point by the caller.
using IntegrandSampler = std::function<double(double, double)>;

/**
 * The composed rule: QI operators for the integrand factor, the product
 * space joining it with the weight, and a memo of modified moments per
 * source.  Immutable after build_rule except the cache, which behaves as a
 * thread-safe memo (concurrent readers, exclusive insert).
 */
struct CubatureRule {
    BSplineWeight weight;
    QIOperator qi_u, qi_v;
    ProductSpace space;
    ProductOperators ops;
    SingularQuadConfig cfg;

    mutable std::map<std::array<double, 5>, MomentVector> moment_cache;
    mutable std::unique_ptr<std::shared_mutex> cache_mutex;

    /// Moments for (A, s), computed once per distinct pair.
    const MomentVector& moments(const Matrix2& A, const Vector2& s) const;
};

CubatureRule build_rule(const BSplineWeight& weight, const QIOperator& qi_u,
                        const QIOperator& qi_v, const SingularQuadConfig& cfg = {});

/**
 * Approximates the weakly singular integral of K(s,t) * weight(t) * f(t):
 * samples f on the QI node grid, lifts the quasi-interpolant into the
 * product space and dots the coefficients with the modified moments.
 */
double integrate_weakly_singular(const CubatureRule& rule, const IntegrandSampler& f,
                                 const Matrix2& A, const Vector2& s);

/// Same with precomputed samples S(i,j) = f(node_u[i], node_v[j]).
double integrate_weakly_singular(const CubatureRule& rule, const MatrixRef& samples,
                                 const Matrix2& A, const Vector2& s);

/**
 * Single layer integral of G(s,t) = 1/|X(t)-X(s)| times weight * g via the
 * multiplicative split: f_s = rho_s * g_s is regular, and K absorbs the
 * singularity with A = first fundamental form at s.
 */
double integrate_multiplicative(const CubatureRule& rule, const SurfacePatch& surface,
                                const IntegrandSampler& g, const Vector2& s);

/**
 * Same integral via the subtractive split: the K part goes through the
 * modified moments and the bounded remainder (G - K) * weight * g is
 * integrated by a graded regular rule with s on cell corners.
 */
double integrate_subtractive(const CubatureRule& rule, const SurfacePatch& surface,
                             const IntegrandSampler& g, const Vector2& s);

/// The remainder term of the subtractive split alone.
double subtractive_remainder(const CubatureRule& rule, const SurfacePatch& surface,
                             const IntegrandSampler& g, const Vector2& s);

/// Plain tensor Gauss over an explicit cell list.  Throws on non-finite samples.
double regular_integral(const IntegrandSampler& f, const std::vector<Rect>& cells,
                        int gauss_order);

/// Cell list for the remainder term: weight breakpoints plus s on a corner,
/// with graded refinement toward s.
std::vector<Rect> remainder_cells(const BSplineWeight& weight, const Vector2& s);

/// Empirical orders o_k = ln(e_{k-1}/e_k) / ln(N_k/N_{k-1}), length n-1.
std::vector<double> convergence_order(const std::vector<double>& errors,
                                      const std::vector<int>& Ns);

}  // namespace sqicube
