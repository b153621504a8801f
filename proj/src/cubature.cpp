#include "sqicube/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "sqicube/gauss_legendre.hpp"

namespace sqicube {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Matrix sample_grid(const IntegrandSampler& f, const Vector& nu, const Vector& nv) {
    Matrix S(nu.size(), nv.size());
    for (Index i = 0; i < nu.size(); ++i)
        for (Index j = 0; j < nv.size(); ++j) S(i, j) = f(nu[i], nv[j]);
    return S;
}

// graded spacing toward the s coordinate in each direction, deep enough that
// the kinked (G - K) remainder integrates refinement-stably to 1e-10
std::vector<double> remainder_lines(const std::vector<double>& bp, double sc) {
    std::vector<double> lines = bp;
    const double tol = 1e-12 * std::max(1.0, std::abs(bp.back() - bp.front()));
    if (sc > bp.front() + tol && sc < bp.back() - tol) {
        bool present = false;
        for (double x : lines) present = present || std::abs(x - sc) <= tol;
        if (!present) lines.push_back(sc);
    }
    std::sort(lines.begin(), lines.end());
    const double c = std::clamp(sc, bp.front(), bp.back());
    std::vector<double> out;
    for (size_t i = 0; i + 1 < lines.size(); ++i) {
        const bool graded = std::abs(lines[i] - c) <= tol || std::abs(lines[i + 1] - c) <= tol;
        const auto part = graded
            ? graded_partition(lines[i], lines[i + 1], c, 9, 0.15, 1e-8)
            : std::vector<double>{lines[i], lines[i + 1]};
        out.insert(out.end(), part.begin(), part.end() - 1);
    }
    out.push_back(lines.back());
    return out;
}

}  // namespace

CubatureRule build_rule(const BSplineWeight& weight, const QIOperator& qi_u,
                        const QIOperator& qi_v, const SingularQuadConfig& cfg) {
    CubatureRule rule;
    rule.weight = weight;
    rule.qi_u = qi_u;
    rule.qi_v = qi_v;
    rule.cfg = cfg;
    rule.space = make_product_space(qi_u.kv, qi_v.kv, weight);
    rule.ops = make_product_operators(qi_u.kv, qi_v.kv, weight, rule.space);
    rule.cache_mutex = std::make_unique<std::shared_mutex>();
    return rule;
}

const MomentVector& CubatureRule::moments(const Matrix2& A, const Vector2& s) const {
    const std::array<double, 5> key{s[0], s[1], A(0, 0), A(0, 1), A(1, 1)};
    {
        std::shared_lock lock(*cache_mutex);
        auto it = moment_cache.find(key);
        if (it != moment_cache.end()) return it->second;
    }
    MomentVector mv = modified_moments(space, A, s, cfg);
    std::unique_lock lock(*cache_mutex);
    return moment_cache.emplace(key, std::move(mv)).first->second;
}

double integrate_weakly_singular(const CubatureRule& rule, const MatrixRef& samples,
                                 const Matrix2& A, const Vector2& s) {
    const TensorSpline2D sigma = apply_qi_tensor(rule.qi_u, rule.qi_v, samples);
    const Matrix grid = rule.ops.Pu.transpose() * sigma.coeffs * rule.ops.Pv;
    const MomentVector& mv = rule.moments(A, s);
    RowMajorMap M(mv.values.data(), mv.dim_u, mv.dim_v);
    return (grid.array() * M.array()).sum();
}

double integrate_weakly_singular(const CubatureRule& rule, const IntegrandSampler& f,
                                 const Matrix2& A, const Vector2& s) {
    return integrate_weakly_singular(
        rule, sample_grid(f, rule.qi_u.nodes, rule.qi_v.nodes), A, s);
}

double integrate_multiplicative(const CubatureRule& rule, const SurfacePatch& surface,
                                const IntegrandSampler& g, const Vector2& s) {
    const Matrix2 A = first_fundamental_form(surface, s);
    auto f = [&](double t1, double t2) {
        return rho(surface, s, {t1, t2}) * g(t1, t2);
    };
    return integrate_weakly_singular(rule, f, A, s);
}

double subtractive_remainder(const CubatureRule& rule, const SurfacePatch& surface,
                             const IntegrandSampler& g, const Vector2& s) {
    const Matrix2 A = first_fundamental_form(surface, s);
    auto h = [&](double t1, double t2) {
        const Vector2 t{t1, t2};
        if ((t - s).norm() < 1e-14) return 0.0;  // bounded, directional limit at s
        return (kernel_G(surface, s, t) - kernel_K(A, s, t)) * rule.weight.eval(t1, t2) *
               g(t1, t2);
    };
    return regular_integral(h, remainder_cells(rule.weight, s),
                            std::max(rule.cfg.gauss_order, 16));
}

double integrate_subtractive(const CubatureRule& rule, const SurfacePatch& surface,
                             const IntegrandSampler& g, const Vector2& s) {
    const Matrix2 A = first_fundamental_form(surface, s);
    return integrate_weakly_singular(rule, g, A, s) +
           subtractive_remainder(rule, surface, g, s);
}

std::vector<Rect> remainder_cells(const BSplineWeight& weight, const Vector2& s) {
    const auto lu = remainder_lines(weight.fu.kv.breakpoints(), s[0]);
    const auto lv = remainder_lines(weight.fv.kv.breakpoints(), s[1]);
    std::vector<Rect> cells;
    cells.reserve((lu.size() - 1) * (lv.size() - 1));
    for (size_t i = 0; i + 1 < lu.size(); ++i)
        for (size_t j = 0; j + 1 < lv.size(); ++j)
            cells.push_back({lu[i], lu[i + 1], lv[j], lv[j + 1]});
    return cells;
}

double regular_integral(const IntegrandSampler& f, const std::vector<Rect>& cells,
                        int gauss_order) {
    double total = 0;
    for (const Rect& r : cells) {
        const QuadRule gu = gauss_on_interval(gauss_order, r.u0, r.u1);
        const QuadRule gv = gauss_on_interval(gauss_order, r.v0, r.v1);
        for (Index i = 0; i < gu.nodes.size(); ++i)
            for (Index j = 0; j < gv.nodes.size(); ++j) {
                const double v = f(gu.nodes[i], gv.nodes[j]);
                if (!std::isfinite(v))
                    throw std::domain_error("regular_integral: non-finite sample");
                total += gu.weights[i] * gv.weights[j] * v;
            }
    }
    return total;
}

std::vector<double> convergence_order(const std::vector<double>& errors,
                                      const std::vector<int>& Ns) {
    if (errors.size() != Ns.size())
        throw std::invalid_argument("convergence_order: size mismatch");
    std::vector<double> orders;
    for (size_t k = 1; k < errors.size(); ++k) {
        if (errors[k] <= 0 || errors[k - 1] <= 0)
            throw std::invalid_argument("convergence_order: errors must be positive");
        if (Ns[k] <= Ns[k - 1])
            throw std::invalid_argument("convergence_order: N must increase");
        orders.push_back(std::log(errors[k - 1] / errors[k]) /
                         std::log(double(Ns[k]) / Ns[k - 1]));
    }
    return orders;
}

}  // namespace sqicube
