#include "sqicube/singular_quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "sqicube/gauss_legendre.hpp"
#include "sqicube/geometry.hpp"

namespace sqicube {

namespace {

constexpr int kMaxDeg = 15;

double geom_tol(const Rect& cell) {
    const double scale = std::max({1.0, std::abs(cell.u0), std::abs(cell.u1),
                                   std::abs(cell.v0), std::abs(cell.v1)});
    return 1e-12 * scale;
}

// accumulate w * bernstein(x)^T bernstein(y) into M
void rank1_accumulate(Matrix& M, int n1, int n2, double x, double y, double w) {
    double bu[kMaxDeg + 1], bv[kMaxDeg + 1];
    bernstein_basis(n1, x, bu);
    bernstein_basis(n2, y, bv);
    for (int i = 0; i <= n1; ++i) {
        const double wi = w * bu[i];
        for (int j = 0; j <= n2; ++j) M(i, j) += wi * bv[j];
    }
}

// Duffy form over the triangle (s, c1, c2): with t = s + u((1-q)a + qb),
// dt = u|a x b| du dq and K = 1/(u sqrt(phi(q))), so the radial factor
// cancels and the integrand is polynomial in u.
void duffy_triangle(const Matrix2& A, const Vector2& s, const Vector2& c1,
                    const Vector2& c2, const Rect& cell, int n1, int n2, int g,
                    Matrix& M) {
    const Vector2 a = c1 - s, b = c2 - s;
    const double area2 = std::abs(a[0] * b[1] - a[1] * b[0]);
    const double tol = geom_tol(cell);
    if (area2 <= tol * tol) return;

    const double p0 = a.dot(A * a), p1 = a.dot(A * b), p2 = b.dot(A * b);
    // phi(q) = alpha q^2 + beta q + gamma, the squared A-length of w(q)
    const double alpha = p0 - 2 * p1 + p2, beta = 2 * (p1 - p0), gamma = p0;
    auto phi = [&](double q) { return (alpha * q + beta) * q + gamma; };

    double qmin = 0;
    if (alpha > 0) qmin = std::clamp(-beta / (2 * alpha), 0.0, 1.0);
    const double phi_min = phi(qmin);
    const double phi_max = std::max(phi(0), phi(1));

    // a thin triangle concentrates variation of 1/sqrt(phi) near qmin;
    // graded panels there restore spectral accuracy
    std::vector<double> qparts{0.0, 1.0};
    if (phi_min < 0.25 * phi_max && alpha > 0) {
        const double dip = 0.5 * std::sqrt(phi_min / alpha);
        qparts = graded_partition(0.0, 1.0, qmin, 3, 0.25, std::max(dip, 1e-3));
    }

    const QuadRule& base = gauss_legendre(g);
    const double inv_w = 1.0 / cell.width(), inv_h = 1.0 / cell.height();
    for (size_t pq = 0; pq + 1 < qparts.size(); ++pq) {
        const QuadRule qr = gauss_on_interval(g, qparts[pq], qparts[pq + 1]);
        for (Index iq = 0; iq < qr.nodes.size(); ++iq) {
            const double q = qr.nodes[iq];
            const Vector2 w = (1 - q) * a + q * b;
            const double cq = qr.weights[iq] * area2 / std::sqrt(phi(q));
            for (Index iu = 0; iu < base.nodes.size(); ++iu) {
                const double u = 0.5 * (base.nodes[iu] + 1);
                const double wu = 0.5 * base.weights[iu];
                const double t1 = s[0] + u * w[0], t2 = s[1] + u * w[1];
                rank1_accumulate(M, n1, n2, (t1 - cell.u0) * inv_w,
                                 (t2 - cell.v0) * inv_h, cq * wu);
            }
        }
    }
}

void singular_cell(const Matrix2& A, const Vector2& s, const Rect& cell, int n1,
                   int n2, int g, Matrix& M) {
    const Vector2 c[4] = {{cell.u0, cell.v0}, {cell.u1, cell.v0},
                          {cell.u1, cell.v1}, {cell.u0, cell.v1}};
    for (int e = 0; e < 4; ++e) duffy_triangle(A, s, c[e], c[(e + 1) % 4], cell, n1, n2, g, M);
}

void near_cell(const Matrix2& A, const Vector2& s, const Rect& cell, int n1, int n2,
               int g, int levels, double ratio, Matrix& M) {
    const double dist = cell.distance(s);
    std::vector<double> pu{cell.u0, cell.u1}, pv{cell.v0, cell.v1};
    if (dist < 2 * cell.diameter()) {
        const double min_w = 0.3 * std::max(dist, 1e-8);
        pu = graded_partition(cell.u0, cell.u1, std::clamp(s[0], cell.u0, cell.u1),
                              levels, ratio, min_w);
        pv = graded_partition(cell.v0, cell.v1, std::clamp(s[1], cell.v0, cell.v1),
                              levels, ratio, min_w);
    }
    const double inv_w = 1.0 / cell.width(), inv_h = 1.0 / cell.height();
    for (size_t eu = 0; eu + 1 < pu.size(); ++eu) {
        const QuadRule ru = gauss_on_interval(g, pu[eu], pu[eu + 1]);
        for (size_t ev = 0; ev + 1 < pv.size(); ++ev) {
            const QuadRule rv = gauss_on_interval(g, pv[ev], pv[ev + 1]);
            for (Index iu = 0; iu < ru.nodes.size(); ++iu) {
                const double t1 = ru.nodes[iu];
                for (Index iv = 0; iv < rv.nodes.size(); ++iv) {
                    const double t2 = rv.nodes[iv];
                    const Vector2 d{t1 - s[0], t2 - s[1]};
                    const double K = 1.0 / std::sqrt(d.dot(A * d));
                    rank1_accumulate(M, n1, n2, (t1 - cell.u0) * inv_w,
                                     (t2 - cell.v0) * inv_h,
                                     ru.weights[iu] * rv.weights[iv] * K);
                }
            }
        }
    }
}

Matrix cell_moment_matrix(const Matrix2& A, const Vector2& s, const Rect& cell,
                          int n1, int n2, const SingularQuadConfig& cfg, int g,
                          bool* used_graded = nullptr) {
    Matrix M = Matrix::Zero(n1 + 1, n2 + 1);
    if (cell.contains(s, geom_tol(cell))) {
        singular_cell(A, s, cell, n1, n2, g, M);
        if (used_graded) *used_graded = true;
    } else {
        near_cell(A, s, cell, n1, n2, g, cfg.subdivisions, cfg.grading_ratio, M);
        if (used_graded) *used_graded = cell.distance(s) < 2 * cell.diameter();
    }
    return M;
}

}  // namespace

std::vector<double> graded_partition(double a, double b, double center, int levels,
                                     double ratio, double min_width) {
    const double c = std::clamp(center, a, b);
    std::vector<double> pts{a, b};
    if (c > a && c < b) pts.push_back(c);
    auto grade_side = [&](double far, double near) {
        const double len = std::abs(near - far);
        const double dir = near > far ? -1.0 : 1.0;
        double w = len;
        for (int l = 1; l <= levels; ++l) {
            w *= ratio;
            if (w <= min_width || w <= 1e-13 * len) break;
            pts.push_back(near + dir * w);
        }
    };
    if (c > a) grade_side(a, c);
    if (c < b) grade_side(b, c);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double singular_cell_integral(const Matrix2& A, const Vector2& s, const Rect& cell,
                              const MatrixRef& coeffs, const SingularQuadConfig& cfg) {
    check_spd(A);
    if (!cell.contains(s, geom_tol(cell)))
        throw std::invalid_argument("singular_cell_integral: s outside the cell");
    const int n1 = int(coeffs.rows()) - 1, n2 = int(coeffs.cols()) - 1;
    Matrix M = Matrix::Zero(n1 + 1, n2 + 1);
    singular_cell(A, s, cell, n1, n2, cfg.gauss_order, M);
    return M.cwiseProduct(coeffs).sum();
}

double nearly_singular_cell_integral(const Matrix2& A, const Vector2& s, const Rect& cell,
                                     const MatrixRef& coeffs, const SingularQuadConfig& cfg) {
    check_spd(A);
    if (cell.contains(s, geom_tol(cell)))
        throw std::invalid_argument("nearly_singular_cell_integral: s inside the cell");
    const int n1 = int(coeffs.rows()) - 1, n2 = int(coeffs.cols()) - 1;
    Matrix M = Matrix::Zero(n1 + 1, n2 + 1);
    near_cell(A, s, cell, n1, n2, cfg.gauss_order, cfg.subdivisions, cfg.grading_ratio, M);
    return M.cwiseProduct(coeffs).sum();
}

MomentVector modified_moments(const ProductSpace& space, const Matrix2& A,
                              const Vector2& s, const SingularQuadConfig& cfg) {
    check_spd(A);
    const Rect support{space.bp_u.front(), space.bp_u.back(),
                       space.bp_v.front(), space.bp_v.back()};
    if (s[0] < support.u0 - space.ext_margin_u || s[0] > support.u1 + space.ext_margin_u ||
        s[1] < support.v0 - space.ext_margin_v || s[1] > support.v1 + space.ext_margin_v)
        throw std::domain_error(
            "modified_moments: source point outside the extended region; "
            "use a regular rule instead");

    const int n1 = space.u.degree(), n2 = space.v.degree();
    MomentVector mv;
    mv.dim_u = space.dim_u();
    mv.dim_v = space.dim_v();
    mv.s = s;
    mv.A = A;
    mv.values = Vector::Zero(mv.dim_u * mv.dim_v);
    Vector second = cfg.with_estimate ? Vector::Zero(mv.dim_u * mv.dim_v) : Vector();
    const int g2 = std::max(6, cfg.gauss_order - 6);

    for (size_t eu = 0; eu + 1 < space.bp_u.size(); ++eu) {
        for (size_t ev = 0; ev + 1 < space.bp_v.size(); ++ev) {
            const Rect cell{space.bp_u[eu], space.bp_u[eu + 1],
                            space.bp_v[ev], space.bp_v[ev + 1]};
            bool graded = false;
            const Matrix M =
                cell_moment_matrix(A, s, cell, n1, n2, cfg, cfg.gauss_order, &graded);
            const Matrix local = space.ext_u[eu] * M * space.ext_v[ev].transpose();
            const Index iu0 = space.span_u[eu] - n1, iv0 = space.span_v[ev] - n2;
            for (int r = 0; r <= n1; ++r)
                for (int c = 0; c <= n2; ++c)
                    mv.values[(iu0 + r) * mv.dim_v + iv0 + c] += local(r, c);

            if (cfg.with_estimate) {
                // far cells at order 16 are exact to machine accuracy; only
                // graded/singular cells contribute to the order sensitivity
                const Matrix M2 = graded
                    ? cell_moment_matrix(A, s, cell, n1, n2, cfg, g2)
                    : M;
                const Matrix local2 = space.ext_u[eu] * M2 * space.ext_v[ev].transpose();
                for (int r = 0; r <= n1; ++r)
                    for (int c = 0; c <= n2; ++c)
                        second[(iu0 + r) * mv.dim_v + iv0 + c] += local2(r, c);
            }
        }
    }

    if (cfg.with_estimate) {
        const double floor = 1e-3 * mv.values.cwiseAbs().maxCoeff();
        double est = 0;
        for (Index i = 0; i < mv.values.size(); ++i)
            est = std::max(est, std::abs(mv.values[i] - second[i]) /
                                    std::max(std::abs(mv.values[i]), floor));
        mv.accuracy_estimate = est;
    }
    return mv;
}

}  // namespace sqicube
