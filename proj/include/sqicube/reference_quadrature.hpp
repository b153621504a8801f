#pragma once

#include <functional>
#include <optional>

#include "sqicube/gauss_legendre.hpp"
#include "sqicube/spline_product.hpp"
#include "sqicube/types.hpp"

namespace sqicube {

/**
 * Independent high-accuracy integrator used to produce every reference value.
 * Shares no quadrature internals with the production rule: nodes come from
 * the Jacobi-matrix eigenvalue route and refinement is adaptive (two-order
 * error estimation) instead of graded.
 */
struct OracleRequest {
    std::function<double(double, double)> integrand;
    Rect domain;
    /// When set, cells whose closure contains the point are integrated by
    /// fan triangulation with a radial substitution that cancels a 1/r factor.
    std::optional<Vector2> singular_point;
    /// Interior smoothness lines of the integrand (cells never straddle them).
    std::vector<double> grid_u, grid_v;
    double target_accuracy = 1e-12;
    int max_depth = 30;
    /// 0 refines strictly worst-first; otherwise perturbs the pick among
    /// near-worst cells (self-consistency checks).
    unsigned shuffle_seed = 0;
};

struct OracleResult {
    double value = 0;
    double error_estimate = 0;
    long cells = 0;
};

OracleResult oracle_integrate(const OracleRequest& req);

/// All moments of a product space in one adaptive pass: K(s,t) is scattered
/// into every basis slot active at each node.  Same engine and guarantees as
/// oracle_integrate, vastly cheaper than one call per basis function.
struct OracleMoments {
    Vector values;  // flattened i_u * dim_v + i_v
    double error_estimate = 0;
};

OracleMoments oracle_moments(const ProductSpace& space, const Matrix2& A,
                             const Vector2& s, double target_accuracy = 1e-12,
                             int max_depth = 30);

/// Gauss-Legendre on [-1,1] computed from the symmetric tridiagonal Jacobi
/// matrix (eigenvalue method), independent of the Newton iteration used by
/// the production rule.  Cached per order.
const QuadRule& golub_welsch(int n);

}  // namespace sqicube
