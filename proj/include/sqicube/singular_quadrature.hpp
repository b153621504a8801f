#pragma once

#include "sqicube/spline_product.hpp"
#include "sqicube/types.hpp"

namespace sqicube {

struct SingularQuadConfig {
    int gauss_order = 16;        // tensor Gauss order per panel
    int subdivisions = 4;        // graded levels toward the near point
    double grading_ratio = 0.15; // geometric panel shrink factor
    double target_accuracy = 1e-12;
    bool with_estimate = true;   // second pass at reduced order on the
                                 // singular/graded cells
};

/**
 * Moments mu_i(s) = int_{R_I} B_i(t) / sqrt((t-s)^T A (t-s)) dt over every
 * basis function of the product space, flattened with the second index
 * fastest (index = i1 * dim_v + i2).
 */
struct MomentVector {
    Vector values;
    Index dim_u = 0, dim_v = 0;
    Vector2 s;
    Matrix2 A;
    /// max over components of the order-reduction difference, relative.
    double accuracy_estimate = 0;
};

/**
 * Modified moments of the kernel against all product-space basis functions.
 * Cells whose closure contains s are fanned into triangles from s and
 * integrated in Duffy form (the radial factor cancels the kernel exactly);
 * other cells use tensor Gauss with panels graded toward the point of the
 * cell nearest s.  Cost is independent of the number of basis functions per
 * cell.  Pre: A SPD; s inside the extended region of the space.
 */
MomentVector modified_moments(const ProductSpace& space, const Matrix2& A,
                              const Vector2& s, const SingularQuadConfig& cfg = {});

/**
 * Integral over one cell of K(s,t) times the bidegree (n1,n2) Bernstein
 * polynomial with coefficient matrix coeffs ((n1+1) x (n2+1), argument
 * scaled to the cell).  Pre: s in the closure of the cell.
 */
double singular_cell_integral(const Matrix2& A, const Vector2& s, const Rect& cell,
                              const MatrixRef& coeffs, const SingularQuadConfig& cfg = {});

/// As above for s outside the cell (graded tensor Gauss panels).
double nearly_singular_cell_integral(const Matrix2& A, const Vector2& s, const Rect& cell,
                                     const MatrixRef& coeffs,
                                     const SingularQuadConfig& cfg = {});

/**
 * Partition of [a, b] whose panel widths shrink geometrically toward center
 * (clamped into the interval; an interior center is approached from both
 * sides).  Panels below min_width are not produced.
 */
std::vector<double> graded_partition(double a, double b, double center, int levels,
                                     double ratio, double min_width);

}  // namespace sqicube
