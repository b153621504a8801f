#pragma once

#include <vector>

#include "sqicube/knot_vector.hpp"
#include "sqicube/types.hpp"

namespace sqicube {

/// Index of the knot interval [xi_i, xi_{i+1}) containing t; the right end of
/// the knot range maps to the last nonempty interval (left-continuity).
/// Throws std::domain_error if t lies outside the knot range.
int knot_interval(const KnotVector& kv, double t);

/// Value of the single basis function B_{j,p} at t (Cox-de Boor recurrence).
/// t may lie anywhere in the knot range, including outside the domain.
double eval_basis(const KnotVector& kv, Index j, double t);

/// Knot span for de Boor evaluation: nonempty interval index clamped to the
/// domain.  Pre: domain_left <= t <= domain_right.
int domain_span(const KnotVector& kv, double t);

/// Values of the p+1 basis functions B_{span-p..span,p} that are nonzero on
/// the span containing t, in ascending index order.
Vector basis_nonzero(const KnotVector& kv, int span, double t);

/// Univariate spline sum_j coeffs[j] * B_{j,p}.
struct Spline1D {
    KnotVector kv;
    Vector coeffs;
};

double eval_spline_1d(const Spline1D& s, double t);

/**
 * Polar form (blossom) of the polynomial piece of s on the given span,
 * evaluated at the kv.degree() arguments in args.  Symmetric in the
 * arguments; args equal to t repeated p times gives plain evaluation.
 */
double blossom(const Spline1D& s, int span, const double* args);

/// One polynomial piece in Bernstein form on [left, right].
struct BernsteinPiece {
    double left = 0, right = 0;
    Vector coeffs;  // degree + 1 Bernstein coefficients
};

double eval_bernstein(const BernsteinPiece& piece, double t);

/// Blossom of a Bernstein-form polynomial at degree arguments.
double bernstein_blossom(const BernsteinPiece& piece, const double* args);

/// Values of all degree+1 Bernstein basis polynomials at x in [0,1].
void bernstein_basis(int degree, double x, double* out);

/// Exact product of two Bernstein polynomials on the same interval.
Vector bernstein_multiply(const Vector& a, const Vector& b);

/// Raise the Bernstein degree by one without changing the polynomial.
Vector bernstein_elevate(const Vector& a);

/// Restriction of s to each nonempty knot interval, in Bernstein form.
std::vector<BernsteinPiece> bezier_extract(const Spline1D& s);

/// Tensor-product spline: coeffs(i,j) multiplies B_i(t1) * B_j(t2).
struct TensorSpline2D {
    KnotVector ku, kv;
    Matrix coeffs;
};

double eval_spline_2d(const TensorSpline2D& s, double t1, double t2);

/**
 * Tensor-product B-spline weight factor B(t1,t2) = b1(t1) * b2(t2), where
 * each b_k is the single B-spline of degree d_k over its own d_k+2 knots.
 * Each factor is stored as a Spline1D over a padded knot vector whose domain
 * is exactly the factor support, so all spline machinery applies to it.
 */
struct BSplineWeight {
    Spline1D fu, fv;  // unit-coefficient single-basis splines
    Rect support;

    static BSplineWeight from_knots(std::vector<double> knots_u, std::vector<double> knots_v);
    /// Degrees (d1, d2) with d+2 uniform knots spanning [-1, 1] per direction.
    static BSplineWeight uniform(int d1, int d2);

    int degree_u() const { return fu.kv.degree(); }
    int degree_v() const { return fv.kv.degree(); }
    double eval(double t1, double t2) const;
};

}  // namespace sqicube
