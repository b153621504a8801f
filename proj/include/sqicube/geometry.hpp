#pragma once

#include <functional>
#include <memory>
#include <string>

#include "sqicube/types.hpp"

namespace sqicube {

/**
 * Smooth parametrization X: R^2 -> R^3 with first partial derivatives.
 * Implementations must keep position and derivatives consistent; the test
 * suite checks derivatives against central finite differences.
 */
class SurfacePatch {
public:
    virtual ~SurfacePatch() = default;
    virtual Vector3 position(const Vector2& t) const = 0;
    virtual Vector3 partial_u(const Vector2& t) const = 0;
    virtual Vector3 partial_v(const Vector2& t) const = 0;
};

/// Surface from user callables; derivatives default to central differences
/// with step 1e-5 when not supplied.
class AnalyticSurface : public SurfacePatch {
public:
    using PositionFn = std::function<Vector3(const Vector2&)>;
    using DerivativeFn = std::function<Vector3(const Vector2&)>;

    explicit AnalyticSurface(PositionFn position,
                             DerivativeFn du = nullptr, DerivativeFn dv = nullptr);

    Vector3 position(const Vector2& t) const override { return position_(t); }
    Vector3 partial_u(const Vector2& t) const override;
    Vector3 partial_v(const Vector2& t) const override;

private:
    PositionFn position_;
    DerivativeFn du_, dv_;
};

/// Built-in patches: "plane", "cylinder" (radius parameter, angle pi*t1/4),
/// "hyperboloid".  Throws std::invalid_argument for unknown names.
std::unique_ptr<SurfacePatch> make_surface(const std::string& name, double param = 2.0);

/// First fundamental form: A(t) = [Xu.Xu, Xu.Xv; Xu.Xv, Xv.Xv].
Matrix2 first_fundamental_form(const SurfacePatch& surf, const Vector2& t);

/// P_s(t) = (t-s)^T A (t-s).
double quadratic_form(const Matrix2& A, const Vector2& s, const Vector2& t);

/// K(s,t) = 1 / sqrt((t-s)^T A (t-s)); pre: t != s and A SPD.
double kernel_K(const Matrix2& A, const Vector2& s, const Vector2& t);

/// G(s,t) = 1 / |X(t) - X(s)|.
double kernel_G(const SurfacePatch& surf, const Vector2& s, const Vector2& t);

/**
 * rho_s(t) = sqrt(P_s(t)) / |X(t) - X(s)|, continuously extended by 1 at
 * t = s (points with |t-s| below 1e-13 * scale return exactly 1).
 * A is the first fundamental form at s.
 */
double rho(const SurfacePatch& surf, const Vector2& s, const Vector2& t);

/// Surface area element J(t) = |Xu x Xv| = sqrt(det A(t)).
double jacobian(const SurfacePatch& surf, const Vector2& t);

void check_spd(const Matrix2& A);

}  // namespace sqicube
