#include "sqicube/spline_product.hpp"

#include <algorithm>
#include <cmath>

namespace sqicube {

namespace {

// Bernstein coefficients of every nonzero basis function of kv on element
// [bp[e], bp[e+1]]: row r holds basis function span-deg+r.
Matrix element_extraction(const KnotVector& kv, int span, double left, double right) {
    const int p = kv.degree();
    Matrix ext(p + 1, p + 1);
    Vector unit = Vector::Zero(kv.dimension());
    std::vector<double> args(size_t(std::max(p, 1)));
    for (int r = 0; r <= p; ++r) {
        unit[span - p + r] = 1.0;
        Spline1D basis{kv, unit};
        for (int i = 0; i <= p; ++i) {
            for (int q = 0; q < p; ++q) args[size_t(q)] = q < p - i ? left : right;
            ext(r, i) = p == 0 ? 1.0 : blossom(basis, span, args.data());
        }
        unit[span - p + r] = 0.0;
    }
    return ext;
}

std::vector<BernsteinPiece> pieces_on_grid(const Spline1D& s, const std::vector<double>& bp) {
    const int p = s.kv.degree();
    std::vector<BernsteinPiece> pieces;
    std::vector<double> args(size_t(std::max(p, 1)));
    for (size_t e = 0; e + 1 < bp.size(); ++e) {
        BernsteinPiece piece;
        piece.left = bp[e];
        piece.right = bp[e + 1];
        piece.coeffs.resize(p + 1);
        const int span = domain_span(s.kv, 0.5 * (bp[e] + bp[e + 1]));
        for (int i = 0; i <= p; ++i) {
            for (int q = 0; q < p; ++q) args[size_t(q)] = q < p - i ? piece.left : piece.right;
            piece.coeffs[i] = p == 0 ? s.coeffs[span] : blossom(s, span, args.data());
        }
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

// B-spline coefficients of a piecewise polynomial known to lie in the space
// of kv, given its Bernstein pieces on the breakpoint grid of kv.  Each
// coefficient is the polar form of a piece inside the basis support at the
// knots xi_{i+1..i+n}; the piece nearest the middle of the support keeps the
// de Casteljau arguments close to [0,1].
Vector recombine(const KnotVector& kv, const std::vector<BernsteinPiece>& pieces,
                 const std::vector<double>& bp) {
    const int n = kv.degree();
    const double tol = knot_merge_tolerance(kv);
    Vector lambda(kv.dimension());
    std::vector<double> args(size_t(std::max(n, 1)));

    auto element_index = [&](double left) {
        const auto it = std::lower_bound(bp.begin(), bp.end(), left - tol);
        return size_t(it - bp.begin());
    };

    for (Index i = 0; i < kv.dimension(); ++i) {
        // nonempty spans within the support [xi_i, xi_{i+n+1}]
        int chosen = -1;
        std::vector<int> spans;
        for (int k = int(i); k <= int(i) + n; ++k)
            if (kv.knot(k + 1) > kv.knot(k) + tol) spans.push_back(k);
        chosen = spans[spans.size() / 2];
        const size_t e = element_index(kv.knot(chosen));
        for (int r = 0; r < n; ++r) args[size_t(r)] = kv.knot(i + 1 + r);
        lambda[i] = n == 0 ? pieces[e].coeffs[0] : bernstein_blossom(pieces[e], args.data());
    }
    return lambda;
}

}  // namespace

Vector multiply_splines_1d_into(const Spline1D& a, const Spline1D& b,
                                const KnotVector& target) {
    const auto bp = target.breakpoints();
    const auto pa = pieces_on_grid(a, bp);
    const auto pb = pieces_on_grid(b, bp);
    std::vector<BernsteinPiece> prod(pa.size());
    for (size_t e = 0; e < pa.size(); ++e) {
        prod[e].left = pa[e].left;
        prod[e].right = pa[e].right;
        prod[e].coeffs = bernstein_multiply(pa[e].coeffs, pb[e].coeffs);
    }
    return recombine(target, prod, bp);
}

Spline1D multiply_splines_1d(const Spline1D& a, const Spline1D& b) {
    KnotVector merged = merge_knot_vectors(a.kv, b.kv, a.kv.degree() + b.kv.degree());
    Vector c = multiply_splines_1d_into(a, b, merged);
    return {std::move(merged), std::move(c)};
}

double ProductSpace::eval_basis_2d(Index i, Index j, double t1, double t2) const {
    return eval_basis(u, i, t1) * eval_basis(v, j, t2);
}

ProductSpace make_product_space(const KnotVector& sigma_u, const KnotVector& sigma_v,
                                const BSplineWeight& weight) {
    ProductSpace ps;
    ps.u = merge_knot_vectors(sigma_u, weight.fu.kv, sigma_u.degree() + weight.degree_u());
    ps.v = merge_knot_vectors(sigma_v, weight.fv.kv, sigma_v.degree() + weight.degree_v());
    ps.bp_u = ps.u.breakpoints();
    ps.bp_v = ps.v.breakpoints();
    for (size_t e = 0; e + 1 < ps.bp_u.size(); ++e) {
        const int span = domain_span(ps.u, 0.5 * (ps.bp_u[e] + ps.bp_u[e + 1]));
        ps.span_u.push_back(span);
        ps.ext_u.push_back(element_extraction(ps.u, span, ps.bp_u[e], ps.bp_u[e + 1]));
    }
    for (size_t e = 0; e + 1 < ps.bp_v.size(); ++e) {
        const int span = domain_span(ps.v, 0.5 * (ps.bp_v[e] + ps.bp_v[e + 1]));
        ps.span_v.push_back(span);
        ps.ext_v.push_back(element_extraction(ps.v, span, ps.bp_v[e], ps.bp_v[e + 1]));
    }
    auto min_gap = [](const std::vector<double>& bp) {
        double g = bp.back() - bp.front();
        for (size_t i = 0; i + 1 < bp.size(); ++i) g = std::min(g, bp[i + 1] - bp[i]);
        return g;
    };
    ps.ext_margin_u = 0.5 * min_gap(weight.fu.kv.breakpoints());
    ps.ext_margin_v = 0.5 * min_gap(weight.fv.kv.breakpoints());
    return ps;
}

ProductOperators make_product_operators(const KnotVector& sigma_u, const KnotVector& sigma_v,
                                        const BSplineWeight& weight, const ProductSpace& space) {
    ProductOperators ops;
    auto build = [](const KnotVector& sig, const Spline1D& factor, const KnotVector& target) {
        Matrix P(sig.dimension(), target.dimension());
        Vector unit = Vector::Zero(sig.dimension());
        for (Index i = 0; i < sig.dimension(); ++i) {
            unit[i] = 1.0;
            P.row(i) = multiply_splines_1d_into({sig, unit}, factor, target).transpose();
            unit[i] = 0.0;
        }
        return P;
    };
    ops.Pu = build(sigma_u, weight.fu, space.u);
    ops.Pv = build(sigma_v, weight.fv, space.v);
    return ops;
}

double ProductCoefficients::eval(double t1, double t2) const {
    TensorSpline2D s{space->u, space->v, grid};
    return eval_spline_2d(s, t1, t2);
}

ProductCoefficients multiply_tensor(const TensorSpline2D& sigma, const BSplineWeight& weight,
                                    const ProductSpace& space) {
    ProductOperators ops = make_product_operators(sigma.ku, sigma.kv, weight, space);
    ProductCoefficients pc;
    pc.space = &space;
    pc.grid = ops.Pu.transpose() * sigma.coeffs * ops.Pv;
    return pc;
}

}  // namespace sqicube
