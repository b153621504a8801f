#include "sqicube/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace sqicube {

namespace {

// enough for degree p <= 15 working arrays on the stack
constexpr int kMaxDegree = 15;

void check_degree(int p) {
    if (p > kMaxDegree)
        throw std::invalid_argument("spline degree too large");
}

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

int knot_interval(const KnotVector& kv, double t) {
    const auto& xi = kv.knots();
    const int n = int(xi.size());
    const double tol = knot_merge_tolerance(kv);
    if (t < xi.front() - tol || t > xi.back() + tol)
        throw std::domain_error("knot_interval: t outside knot range");
    if (t >= xi[n - 1]) {
        int i = n - 2;
        while (i > 0 && xi[i] >= xi[n - 1]) --i;
        return i;
    }
    int i = int(std::upper_bound(xi.begin(), xi.end(), t) - xi.begin()) - 1;
    return std::clamp(i, 0, n - 2);
}

double eval_basis(const KnotVector& kv, Index j, double t) {
    if (j < 0 || j >= kv.dimension())
        throw std::invalid_argument("eval_basis: basis index out of range");
    const int p = kv.degree();
    check_degree(p);
    const auto& xi = kv.knots();
    const int i = knot_interval(kv, t);
    if (i < j || i > j + p) return 0.0;

    double w[kMaxDegree + 1] = {0};
    w[i - j] = 1.0;
    for (int r = 1; r <= p; ++r) {
        for (int k = 0; k + r <= p; ++k) {
            const Index a = j + k;
            double v = 0;
            const double den1 = xi[a + r] - xi[a];
            if (den1 > 0) v += (t - xi[a]) / den1 * w[k];
            const double den2 = xi[a + r + 1] - xi[a + 1];
            if (den2 > 0) v += (xi[a + r + 1] - t) / den2 * w[k + 1];
            w[k] = v;
        }
    }
    return w[0];
}

int domain_span(const KnotVector& kv, double t) {
    const int p = kv.degree();
    const double tol = knot_merge_tolerance(kv);
    if (t < kv.domain_left() - tol || t > kv.domain_right() + tol)
        throw std::domain_error("spline evaluation outside domain");
    int i = knot_interval(kv, t);
    return std::clamp(i, p, int(kv.dimension()) - 1);
}

Vector basis_nonzero(const KnotVector& kv, int span, double t) {
    const int p = kv.degree();
    check_degree(p);
    const auto& xi = kv.knots();
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    Vector N(p + 1);
    N[0] = 1.0;
    for (int r = 1; r <= p; ++r) {
        left[r] = t - xi[span + 1 - r];
        right[r] = xi[span + r] - t;
        double saved = 0;
        for (int k = 0; k < r; ++k) {
            const double tmp = N[k] / (right[k + 1] + left[r - k]);
            N[k] = saved + right[k + 1] * tmp;
            saved = left[r - k] * tmp;
        }
        N[r] = saved;
    }
    return N;
}

double eval_spline_1d(const Spline1D& s, double t) {
    const int p = s.kv.degree();
    check_degree(p);
    const int span = domain_span(s.kv, t);
    if (p == 0) return s.coeffs[span];
    const auto& xi = s.kv.knots();
    double d[kMaxDegree + 1];
    for (int j = 0; j <= p; ++j) d[j] = s.coeffs[span - p + j];
    for (int r = 1; r <= p; ++r) {
        for (int j = p; j >= r; --j) {
            const Index g = span - p + j;
            const double den = xi[g + p - r + 1] - xi[g];
            const double a = den > 0 ? (t - xi[g]) / den : 0.0;
            d[j] = (1 - a) * d[j - 1] + a * d[j];
        }
    }
    return d[p];
}

double blossom(const Spline1D& s, int span, const double* args) {
    const int p = s.kv.degree();
    check_degree(p);
    const auto& xi = s.kv.knots();
    if (span < p || span >= int(s.kv.dimension()))
        throw std::invalid_argument("blossom: span outside domain");
    double d[kMaxDegree + 1];
    for (int j = 0; j <= p; ++j) d[j] = s.coeffs[span - p + j];
    for (int r = 1; r <= p; ++r) {
        const double x = args[r - 1];
        for (int j = p; j >= r; --j) {
            const Index g = span - p + j;
            const double den = xi[g + p - r + 1] - xi[g];
            const double a = den > 0 ? (x - xi[g]) / den : 0.0;
            d[j] = (1 - a) * d[j - 1] + a * d[j];
        }
    }
    return d[p];
}

double eval_bernstein(const BernsteinPiece& piece, double t) {
    const int n = int(piece.coeffs.size()) - 1;
    check_degree(n);
    const double x = (t - piece.left) / (piece.right - piece.left);
    double d[kMaxDegree + 1];
    for (int i = 0; i <= n; ++i) d[i] = piece.coeffs[i];
    for (int r = 1; r <= n; ++r)
        for (int i = 0; i <= n - r; ++i)
            d[i] = (1 - x) * d[i] + x * d[i + 1];
    return d[0];
}

double bernstein_blossom(const BernsteinPiece& piece, const double* args) {
    const int n = int(piece.coeffs.size()) - 1;
    check_degree(n);
    double d[kMaxDegree + 1];
    for (int i = 0; i <= n; ++i) d[i] = piece.coeffs[i];
    for (int r = 1; r <= n; ++r) {
        const double x = (args[r - 1] - piece.left) / (piece.right - piece.left);
        for (int i = 0; i <= n - r; ++i)
            d[i] = (1 - x) * d[i] + x * d[i + 1];
    }
    return d[0];
}

void bernstein_basis(int degree, double x, double* out) {
    check_degree(degree);
    out[0] = 1.0;
    const double y = 1 - x;
    for (int r = 1; r <= degree; ++r) {
        double saved = 0;
        for (int i = 0; i < r; ++i) {
            const double tmp = out[i];
            out[i] = saved + y * tmp;
            saved = x * tmp;
        }
        out[r] = saved;
    }
}

Vector bernstein_multiply(const Vector& a, const Vector& b) {
    const int m = int(a.size()) - 1, n = int(b.size()) - 1;
    Vector c = Vector::Zero(m + n + 1);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            c[i + j] += a[i] * b[j] * binomial(m, i) * binomial(n, j) / binomial(m + n, i + j);
    return c;
}

Vector bernstein_elevate(const Vector& a) {
    const int n = int(a.size()) - 1;
    Vector b(n + 2);
    b[0] = a[0];
    b[n + 1] = a[n];
    for (int i = 1; i <= n; ++i) {
        const double w = double(i) / (n + 1);
        b[i] = w * a[i - 1] + (1 - w) * a[i];
    }
    return b;
}

std::vector<BernsteinPiece> bezier_extract(const Spline1D& s) {
    const int p = s.kv.degree();
    check_degree(p);
    std::vector<BernsteinPiece> pieces;
    const auto bp = s.kv.breakpoints();
    double args[kMaxDegree];
    for (size_t e = 0; e + 1 < bp.size(); ++e) {
        BernsteinPiece piece;
        piece.left = bp[e];
        piece.right = bp[e + 1];
        piece.coeffs.resize(p + 1);
        const int span = domain_span(s.kv, 0.5 * (bp[e] + bp[e + 1]));
        for (int i = 0; i <= p; ++i) {
            for (int r = 0; r < p; ++r) args[r] = r < p - i ? piece.left : piece.right;
            piece.coeffs[i] = p == 0 ? s.coeffs[span] : blossom(s, span, args);
        }
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

double eval_spline_2d(const TensorSpline2D& s, double t1, double t2) {
    const int pu = s.ku.degree(), pv = s.kv.degree();
    const int su = domain_span(s.ku, t1), sv = domain_span(s.kv, t2);
    const Vector bu = basis_nonzero(s.ku, su, t1);
    const Vector bv = basis_nonzero(s.kv, sv, t2);
    return bu.transpose() * s.coeffs.block(su - pu, sv - pv, pu + 1, pv + 1) * bv;
}

namespace {

// Embed the single B-spline over d+2 knots into a valid spline space by
// padding d extra knots on each side; the original basis function is the
// coefficient-d unit spline there and the padded domain is exactly the
// support of the weight factor.
Spline1D padded_weight_factor(std::vector<double> knots) {
    const int d = int(knots.size()) - 2;
    if (d < 0) throw std::invalid_argument("weight factor needs at least 2 knots");
    for (size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("weight factor knots must be strictly increasing");
    const double h = (knots.back() - knots.front()) / (d + 1);
    std::vector<double> padded;
    for (int r = d; r >= 1; --r) padded.push_back(knots.front() - r * h);
    for (double k : knots) padded.push_back(k);
    for (int r = 1; r <= d; ++r) padded.push_back(knots.back() + r * h);
    KnotVector kv(d, std::move(padded));
    Vector c = Vector::Zero(kv.dimension());
    c[d] = 1.0;
    return {std::move(kv), std::move(c)};
}

}  // namespace

BSplineWeight BSplineWeight::from_knots(std::vector<double> knots_u, std::vector<double> knots_v) {
    BSplineWeight w;
    w.support = {knots_u.front(), knots_u.back(), knots_v.front(), knots_v.back()};
    w.fu = padded_weight_factor(std::move(knots_u));
    w.fv = padded_weight_factor(std::move(knots_v));
    return w;
}

BSplineWeight BSplineWeight::uniform(int d1, int d2) {
    auto uniform_knots = [](int d) {
        std::vector<double> k(size_t(d) + 2);
        for (int i = 0; i <= d + 1; ++i) k[size_t(i)] = -1.0 + 2.0 * i / (d + 1);
        return k;
    };
    return from_knots(uniform_knots(d1), uniform_knots(d2));
}

double BSplineWeight::eval(double t1, double t2) const {
    return eval_spline_1d(fu, t1) * eval_spline_1d(fv, t2);
}

}  // namespace sqicube
