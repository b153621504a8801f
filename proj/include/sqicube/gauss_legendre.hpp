#pragma once

#include "sqicube/types.hpp"

namespace sqicube {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct QuadRule {
    Vector nodes;
    Vector weights;
};

/// Cached rule; nodes computed by Newton iteration on P_n, deterministic.
const QuadRule& gauss_legendre(int n);

/// Nodes/weights of gauss_legendre(n) mapped to [a, b].
QuadRule gauss_on_interval(int n, double a, double b);

}  // namespace sqicube
