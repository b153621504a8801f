#include "sqicube/reference_quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "sqicube/bspline.hpp"
#include "sqicube/geometry.hpp"

namespace sqicube {

const QuadRule& golub_welsch(int n) {
    if (n < 1 || n > 200) throw std::invalid_argument("golub_welsch: order out of range");
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        Matrix J = Matrix::Zero(n, n);
        for (int k = 1; k < n; ++k)
            J(k - 1, k) = J(k, k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
        Eigen::SelfAdjointEigenSolver<Matrix> es(J);
        QuadRule r;
        r.nodes = es.eigenvalues();  // ascending
        r.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
        it = cache.emplace(n, std::move(r)).first;
    }
    return it->second;
}

namespace {

// adds w * integrand(t1, t2) into the accumulator slots
using AccumFn = std::function<void(double t1, double t2, double w, Vector& acc)>;

struct OracleCell {
    Rect r;
    Vector lo, hi;
    double est = 0;
    long id = 0;
    int depth = 0;
};

double rect_tol(const Rect& r) {
    return 1e-12 * std::max({1.0, std::abs(r.u0), std::abs(r.u1),
                             std::abs(r.v0), std::abs(r.v1)});
}

void tensor_gauss(const AccumFn& fn, const Rect& r, int order, Vector& acc) {
    const QuadRule& g = golub_welsch(order);
    const double cu = 0.5 * (r.u0 + r.u1), hu = 0.5 * r.width();
    const double cv = 0.5 * (r.v0 + r.v1), hv = 0.5 * r.height();
    for (Index i = 0; i < g.nodes.size(); ++i)
        for (Index j = 0; j < g.nodes.size(); ++j)
            fn(cu + hu * g.nodes[i], cv + hv * g.nodes[j],
               hu * hv * g.weights[i] * g.weights[j], acc);
}

// Fan the cell into triangles (s, corner, next corner) and substitute
// t = s + u((1-q)a + qb).  The area element contributes the factor u that
// cancels a 1/|t-s| singularity; Gauss nodes never touch u = 0.
void fan_duffy(const AccumFn& fn, const Rect& r, const Vector2& s, int order, Vector& acc) {
    const Vector2 c[4] = {{r.u0, r.v0}, {r.u1, r.v0}, {r.u1, r.v1}, {r.u0, r.v1}};
    const QuadRule& g = golub_welsch(order);
    const double tol = rect_tol(r);
    for (int e = 0; e < 4; ++e) {
        const Vector2 a = c[e] - s, b = c[(e + 1) % 4] - s;
        const double area2 = std::abs(a[0] * b[1] - a[1] * b[0]);
        if (area2 <= tol * tol) continue;
        for (Index iq = 0; iq < g.nodes.size(); ++iq) {
            const double q = 0.5 * (g.nodes[iq] + 1);
            const double wq = 0.5 * g.weights[iq] * area2;
            const Vector2 w = (1 - q) * a + q * b;
            for (Index iu = 0; iu < g.nodes.size(); ++iu) {
                const double u = 0.5 * (g.nodes[iu] + 1);
                const double wu = 0.5 * g.weights[iu];
                fn(s[0] + u * w[0], s[1] + u * w[1], wq * wu * u, acc);
            }
        }
    }
}

void eval_cell(const AccumFn& fn, const std::optional<Vector2>& s, Index dim,
               OracleCell& cell) {
    cell.lo = Vector::Zero(dim);
    cell.hi = Vector::Zero(dim);
    if (s && cell.r.contains(*s, rect_tol(cell.r))) {
        fan_duffy(fn, cell.r, *s, 24, cell.lo);
        fan_duffy(fn, cell.r, *s, 32, cell.hi);
    } else {
        tensor_gauss(fn, cell.r, 10, cell.lo);
        tensor_gauss(fn, cell.r, 20, cell.hi);
    }
    cell.est = (cell.hi - cell.lo).cwiseAbs().maxCoeff();
}

std::vector<double> initial_lines(double lo, double hi, const std::vector<double>& interior,
                                  std::optional<double> extra) {
    std::vector<double> raw;
    for (double x : interior)
        if (x > lo && x < hi) raw.push_back(x);
    if (extra && *extra > lo && *extra < hi) raw.push_back(*extra);
    std::sort(raw.begin(), raw.end());
    const double tol = 1e-9 * std::max(1.0, hi - lo);
    std::vector<double> out{lo};
    for (double x : raw)
        if (x - out.back() > tol && hi - x > tol) out.push_back(x);
    out.push_back(hi);
    return out;
}

struct EngineResult {
    Vector value;        // canonical-order sum of high-order cell values
    Vector est;          // componentwise sum of two-order differences
    long cells = 0;
};

// Worst-first adaptive refinement.  The convergence measure is relative per
// component with a floor, so vector requests are not dominated by their
// largest entry.  Determinism: ties resolve to the oldest cell; a nonzero
// seed perturbs the pick among near-worst cells only.
EngineResult adaptive_integrate(const AccumFn& fn, Index dim, const Rect& domain,
                                const std::optional<Vector2>& s,
                                const std::vector<double>& grid_u,
                                const std::vector<double>& grid_v, double target,
                                int max_depth, unsigned seed, double floor_abs,
                                double floor_rel) {
    if (target < 1e-14)
        throw std::invalid_argument("adaptive_integrate: target below double precision");
    if (!(domain.u1 > domain.u0) || !(domain.v1 > domain.v0))
        throw std::invalid_argument("adaptive_integrate: empty domain");

    const auto lu = initial_lines(domain.u0, domain.u1, grid_u,
                                  s ? std::optional<double>((*s)[0]) : std::nullopt);
    const auto lv = initial_lines(domain.v0, domain.v1, grid_v,
                                  s ? std::optional<double>((*s)[1]) : std::nullopt);

    std::vector<OracleCell> cells;
    long next_id = 0;
    for (size_t i = 0; i + 1 < lu.size(); ++i)
        for (size_t j = 0; j + 1 < lv.size(); ++j) {
            OracleCell c;
            c.r = {lu[i], lu[i + 1], lv[j], lv[j + 1]};
            c.id = next_id++;
            eval_cell(fn, s, dim, c);
            cells.push_back(std::move(c));
        }

    Vector V = Vector::Zero(dim), E = Vector::Zero(dim);
    for (const auto& c : cells) {
        V += c.hi;
        E += (c.hi - c.lo).cwiseAbs();
    }

    std::mt19937 rng(seed);
    auto worst_rel = [&]() {
        const double vmax = V.cwiseAbs().maxCoeff();
        const double floor = std::max(floor_abs, floor_rel * vmax);
        double w = 0;
        for (Index k = 0; k < dim; ++k)
            w = std::max(w, E[k] / std::max(std::abs(V[k]), floor));
        return w;
    };

    const long iteration_cap = 20000;
    for (long iter = 0;; ++iter) {
        if (worst_rel() <= target) break;
        size_t pick = 0;
        double max_est = 0;
        for (size_t k = 0; k < cells.size(); ++k)
            if (cells[k].est > max_est) {
                max_est = cells[k].est;
                pick = k;
            }
        if (seed != 0) {
            std::vector<size_t> pool;
            for (size_t k = 0; k < cells.size(); ++k)
                if (cells[k].est >= 0.25 * max_est) pool.push_back(k);
            pick = pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
        }
        if (cells[pick].depth >= max_depth || iter >= iteration_cap) {
            const double bv = dim == 1 ? V[0] : V.cwiseAbs().maxCoeff();
            throw ReferenceNonConvergence(
                "reference integration did not reach the target accuracy", bv,
                worst_rel());
        }

        const OracleCell parent = cells[pick];
        V -= parent.hi;
        E -= (parent.hi - parent.lo).cwiseAbs();
        const double um = 0.5 * (parent.r.u0 + parent.r.u1);
        const double vm = 0.5 * (parent.r.v0 + parent.r.v1);
        const Rect quads[4] = {{parent.r.u0, um, parent.r.v0, vm},
                               {um, parent.r.u1, parent.r.v0, vm},
                               {parent.r.u0, um, vm, parent.r.v1},
                               {um, parent.r.u1, vm, parent.r.v1}};
        for (int k = 0; k < 4; ++k) {
            OracleCell child;
            child.r = quads[k];
            child.id = next_id++;
            child.depth = parent.depth + 1;
            eval_cell(fn, s, dim, child);
            V += child.hi;
            E += (child.hi - child.lo).cwiseAbs();
            if (k == 0)
                cells[pick] = std::move(child);
            else
                cells.push_back(std::move(child));
        }
    }

    // canonical summation order, independent of refinement history
    std::sort(cells.begin(), cells.end(), [](const OracleCell& a, const OracleCell& b) {
        return a.r.u0 != b.r.u0 ? a.r.u0 < b.r.u0 : a.r.v0 < b.r.v0;
    });
    EngineResult res;
    res.value = Vector::Zero(dim);
    res.est = Vector::Zero(dim);
    for (const auto& c : cells) {
        res.value += c.hi;
        res.est += (c.hi - c.lo).cwiseAbs();
    }
    res.cells = long(cells.size());
    return res;
}

}  // namespace

OracleResult oracle_integrate(const OracleRequest& req) {
    if (!req.integrand) throw std::invalid_argument("oracle_integrate: no integrand");
    AccumFn fn = [&](double t1, double t2, double w, Vector& acc) {
        acc[0] += w * req.integrand(t1, t2);
    };
    EngineResult er = adaptive_integrate(fn, 1, req.domain, req.singular_point,
                                         req.grid_u, req.grid_v, req.target_accuracy,
                                         req.max_depth, req.shuffle_seed, 1e-2, 0.0);
    return {er.value[0], er.est[0], er.cells};
}

OracleMoments oracle_moments(const ProductSpace& space, const Matrix2& A,
                             const Vector2& s, double target_accuracy, int max_depth) {
    check_spd(A);
    const int pu = space.u.degree(), pv = space.v.degree();
    const Index dv = space.dim_v();
    AccumFn fn = [&](double t1, double t2, double w, Vector& acc) {
        const double wK = w * kernel_K(A, s, {t1, t2});
        const int su = domain_span(space.u, t1);
        const int sv = domain_span(space.v, t2);
        const Vector bu = basis_nonzero(space.u, su, t1);
        const Vector bv = basis_nonzero(space.v, sv, t2);
        for (int i = 0; i <= pu; ++i) {
            const double ci = wK * bu[i];
            double* row = acc.data() + (su - pu + i) * dv + (sv - pv);
            for (int j = 0; j <= pv; ++j) row[j] += ci * bv[j];
        }
    };
    const Rect domain{space.bp_u.front(), space.bp_u.back(),
                      space.bp_v.front(), space.bp_v.back()};
    EngineResult er = adaptive_integrate(fn, space.size(), domain, s, space.bp_u,
                                         space.bp_v, target_accuracy, max_depth, 0,
                                         0.0, 1e-6);
    OracleMoments om;
    om.values = std::move(er.value);
    const double vmax = om.values.cwiseAbs().maxCoeff();
    double worst = 0;
    for (Index k = 0; k < om.values.size(); ++k)
        worst = std::max(worst, er.est[k] / std::max(std::abs(om.values[k]), 1e-6 * vmax));
    om.error_estimate = worst;
    return om;
}

}  // namespace sqicube
