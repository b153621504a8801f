#pragma once

#include "sqicube/bspline.hpp"

namespace sqicube {

/**
 * Exact product of two univariate splines: Bernstein pieces of both factors
 * are multiplied per element of the merged breakpoint grid and recombined
 * into B-spline form through the polar-form identity.  No approximation.
 */
Spline1D multiply_splines_1d(const Spline1D& a, const Spline1D& b);

/// As above but writing into a caller-supplied target space (must equal the
/// merged knot vector of the factors).
Vector multiply_splines_1d_into(const Spline1D& a, const Spline1D& b,
                                const KnotVector& target);

/**
 * Tensor-product spline space holding products sigma * B of a bidegree
 * (p,p) spline with the bidegree (d1,d2) weight, including per-element
 * Bernstein extraction tables used by the moment computation.
 */
struct ProductSpace {
    KnotVector u, v;
    std::vector<double> bp_u, bp_v;      // distinct breakpoints per direction
    std::vector<Matrix> ext_u, ext_v;    // per element: (deg+1)x(deg+1) extraction
    std::vector<int> span_u, span_v;     // knot span per element
    // how far outside the support a source point may sit and still be handled
    // by the graded moment rule: half the smallest weight element per direction
    double ext_margin_u = 0, ext_margin_v = 0;

    Index dim_u() const { return u.dimension(); }
    Index dim_v() const { return v.dimension(); }
    Index size() const { return dim_u() * dim_v(); }
    /// Lexicographic flattening with the second index fastest.
    Index flatten(Index i, Index j) const { return i * dim_v() + j; }

    double eval_basis_2d(Index i, Index j, double t1, double t2) const;
};

ProductSpace make_product_space(const KnotVector& sigma_u, const KnotVector& sigma_v,
                                const BSplineWeight& weight);

/// Coefficients of sigma * weight in the product space: grid(i,j) pairs with
/// B_i(t1) B_j(t2) of the product space.
struct ProductCoefficients {
    const ProductSpace* space = nullptr;
    Matrix grid;

    double eval(double t1, double t2) const;
};

/**
 * Exact coefficients of sigma(t) * B(t) in the product space.  The tensor
 * structure reduces the work to two families of univariate products: with
 * Pu(i,:) the coefficients of B_i^sigma * b1 and Pv likewise, the grid is
 * Pu^T * sigma.coeffs * Pv.
 */
ProductCoefficients multiply_tensor(const TensorSpline2D& sigma, const BSplineWeight& weight,
                                    const ProductSpace& space);

/// The two per-direction factor matrices used by multiply_tensor.
struct ProductOperators {
    Matrix Pu, Pv;
};
ProductOperators make_product_operators(const KnotVector& sigma_u, const KnotVector& sigma_v,
                                        const BSplineWeight& weight, const ProductSpace& space);

}  // namespace sqicube
