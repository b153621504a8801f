#include "sqicube/geometry.hpp"

#include <cmath>

namespace sqicube {

namespace {

constexpr double kFdStep = 1e-5;

class PlanePatch : public SurfacePatch {
public:
    Vector3 position(const Vector2& t) const override { return {t[0], t[1], 0.0}; }
    Vector3 partial_u(const Vector2&) const override { return {1.0, 0.0, 0.0}; }
    Vector3 partial_v(const Vector2&) const override { return {0.0, 1.0, 0.0}; }
};

class CylinderPatch : public SurfacePatch {
public:
    explicit CylinderPatch(double radius) : r_(radius) {}
    Vector3 position(const Vector2& t) const override {
        const double a = M_PI * t[0] / 4;
        return {r_ * std::cos(a), r_ * std::sin(a), t[1]};
    }
    Vector3 partial_u(const Vector2& t) const override {
        const double a = M_PI * t[0] / 4, c = M_PI / 4;
        return {-r_ * c * std::sin(a), r_ * c * std::cos(a), 0.0};
    }
    Vector3 partial_v(const Vector2&) const override { return {0.0, 0.0, 1.0}; }

private:
    double r_;
};

class HyperboloidPatch : public SurfacePatch {
public:
    Vector3 position(const Vector2& t) const override {
        const double a = M_PI * t[0] / 4, w = std::sqrt(1 + t[1] * t[1]);
        return {std::cos(a) * w, std::sin(a) * w, t[1]};
    }
    Vector3 partial_u(const Vector2& t) const override {
        const double a = M_PI * t[0] / 4, w = std::sqrt(1 + t[1] * t[1]), c = M_PI / 4;
        return {-c * std::sin(a) * w, c * std::cos(a) * w, 0.0};
    }
    Vector3 partial_v(const Vector2& t) const override {
        const double a = M_PI * t[0] / 4, w = std::sqrt(1 + t[1] * t[1]);
        return {std::cos(a) * t[1] / w, std::sin(a) * t[1] / w, 1.0};
    }
};

}  // namespace

AnalyticSurface::AnalyticSurface(PositionFn position, DerivativeFn du, DerivativeFn dv)
    : position_(std::move(position)), du_(std::move(du)), dv_(std::move(dv)) {
    if (!position_) throw std::invalid_argument("AnalyticSurface: null position");
}

Vector3 AnalyticSurface::partial_u(const Vector2& t) const {
    if (du_) return du_(t);
    return (position_({t[0] + kFdStep, t[1]}) - position_({t[0] - kFdStep, t[1]})) /
           (2 * kFdStep);
}

Vector3 AnalyticSurface::partial_v(const Vector2& t) const {
    if (dv_) return dv_(t);
    return (position_({t[0], t[1] + kFdStep}) - position_({t[0], t[1] - kFdStep})) /
           (2 * kFdStep);
}

std::unique_ptr<SurfacePatch> make_surface(const std::string& name, double param) {
    if (name == "plane") return std::make_unique<PlanePatch>();
    if (name == "cylinder") return std::make_unique<CylinderPatch>(param);
    if (name == "hyperboloid") return std::make_unique<HyperboloidPatch>();
    throw std::invalid_argument("make_surface: unknown surface '" + name + "'");
}

Matrix2 first_fundamental_form(const SurfacePatch& surf, const Vector2& t) {
    const Vector3 xu = surf.partial_u(t), xv = surf.partial_v(t);
    Matrix2 A;
    A << xu.dot(xu), xu.dot(xv), xu.dot(xv), xv.dot(xv);
    return A;
}

double quadratic_form(const Matrix2& A, const Vector2& s, const Vector2& t) {
    const Vector2 d = t - s;
    return d.dot(A * d);
}

void check_spd(const Matrix2& A) {
    const double scale = A.cwiseAbs().maxCoeff();
    if (!(A(0, 0) > 0) || !(A(1, 1) > 0) ||
        std::abs(A(0, 1) - A(1, 0)) > 1e-12 * scale ||
        !(A.determinant() > 1e-14 * scale * scale))
        throw std::invalid_argument("metric matrix must be symmetric positive definite");
}

double kernel_K(const Matrix2& A, const Vector2& s, const Vector2& t) {
    const double q = quadratic_form(A, s, t);
    if (!(q > 0)) throw std::domain_error("kernel_K: evaluation at the singular point");
    return 1.0 / std::sqrt(q);
}

double kernel_G(const SurfacePatch& surf, const Vector2& s, const Vector2& t) {
    const double r = (surf.position(t) - surf.position(s)).norm();
    if (!(r > 0)) throw std::domain_error("kernel_G: evaluation at the singular point");
    return 1.0 / r;
}

double rho(const SurfacePatch& surf, const Vector2& s, const Vector2& t) {
    const double scale = std::max(1.0, std::max(s.cwiseAbs().maxCoeff(),
                                                t.cwiseAbs().maxCoeff()));
    if ((t - s).norm() < 1e-13 * scale) return 1.0;
    const Matrix2 A = first_fundamental_form(surf, s);
    return std::sqrt(quadratic_form(A, s, t)) / (surf.position(t) - surf.position(s)).norm();
}

double jacobian(const SurfacePatch& surf, const Vector2& t) {
    return surf.partial_u(t).cross(surf.partial_v(t)).norm();
}

}  // namespace sqicube
