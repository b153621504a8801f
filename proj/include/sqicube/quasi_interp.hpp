#pragma once

#include <utility>
#include <vector>

#include "sqicube/bspline.hpp"

namespace sqicube {

/// Both backends sample only at the breakpoints and reproduce every
/// polynomial of degree <= p exactly.
enum class QIBackend {
    /// Coefficient j is the polar form, at knots xi_{j+1..j+p}, of the
    /// degree-p Taylor truncation at gamma_j of the degree-(p+1) polynomial
    /// interpolating the samples at the p+2 nodes nearest the Greville
    /// abscissa gamma_j.  The truncated coefficients are finite-difference
    /// estimates of f and its derivatives at gamma_j, so this is a
    /// derivative-free Hermite rule.  The even window is symmetric about
    /// gamma_j wherever the grid allows, which keeps the leading error term
    /// balanced; the plain interpolation backend below loses that symmetry on
    /// uniform grids and pays an order of magnitude in the error constant.
    /// Windows clipped at a domain end grow by one node to recover the order
    /// of the difference estimates there.
    hermite_fd,
    /// Coefficient j is the polar form, at knots xi_{j+1..j+p}, of the
    /// degree-p polynomial interpolating the samples at the p+1 nodes nearest
    /// the Greville abscissa gamma_j (ties broken leftward, stencils clipped
    /// at the domain ends).
    local_blossom,
};

/**
 * Linear spline quasi-interpolation operator: coefficients = C * samples,
 * where samples are function values at the nodes (the breakpoints).
 * Rows of C are banded; applying the operator costs O(dimension) with a
 * constant window of p+1 or p+2 nodes per row depending on the backend.
 */
struct QIOperator {
    KnotVector kv;
    Vector nodes;
    Matrix C;                               // dimension x node count
    std::vector<std::pair<int, int>> band;  // per row: [first, last] nonzero column
    /// max_j sum_k |C(j,k)|; values above 100 indicate an unstable scheme.
    double stability_constant = 0;
};

QIOperator build_qi(int degree, const std::vector<double>& breakpoints,
                    QIBackend backend = QIBackend::hermite_fd);

/// Spline with coefficients C * samples; samples[k] = f(nodes[k]).
Spline1D apply_qi(const QIOperator& op, const VectorRef& samples);

/// Tensor application: coefficient grid Cu * samples * Cv^T, where
/// samples(i,j) = f(qu.nodes[i], qv.nodes[j]).
TensorSpline2D apply_qi_tensor(const QIOperator& qu, const QIOperator& qv,
                               const MatrixRef& samples);

}  // namespace sqicube
