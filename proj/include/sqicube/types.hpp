#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace sqicube {

using Index = Eigen::Index;
using Scalar = double;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;
using Matrix2 = Eigen::Matrix2d;

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Axis-aligned rectangle [u0,u1] x [v0,v1].
struct Rect {
    double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
    double width() const { return u1 - u0; }
    double height() const { return v1 - v0; }
    double diameter() const;
    bool contains(const Vector2& t, double tol = 0.0) const {
        return t[0] >= u0 - tol && t[0] <= u1 + tol &&
               t[1] >= v0 - tol && t[1] <= v1 + tol;
    }
    /// Euclidean distance from t to the closed rectangle (0 if inside).
    double distance(const Vector2& t) const;
};

inline double Rect::diameter() const {
    return std::sqrt(width() * width() + height() * height());
}

inline double Rect::distance(const Vector2& t) const {
    const double dx = std::max({u0 - t[0], 0.0, t[0] - u1});
    const double dy = std::max({v0 - t[1], 0.0, t[1] - v1});
    return std::sqrt(dx * dx + dy * dy);
}

/// Thrown when the adaptive reference integrator cannot reach its target
/// accuracy within the subdivision depth limit.  Carries the best value
/// obtained so far together with its estimated error.
class ReferenceNonConvergence : public std::runtime_error {
public:
    ReferenceNonConvergence(const std::string& what, double value, double estimate)
        : std::runtime_error(what), best_value(value), best_estimate(estimate) {}
    double best_value;
    double best_estimate;
};

}  // namespace sqicube
