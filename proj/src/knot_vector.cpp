#include "sqicube/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sqicube {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 0)
        throw std::invalid_argument("knot vector: negative degree");
    if (Index(knots_.size()) < 2 * (degree_ + 1))
        throw std::invalid_argument("knot vector: too few knots for degree");
    for (size_t i = 1; i < knots_.size(); ++i)
        if (knots_[i] < knots_[i - 1])
            throw std::invalid_argument("knot vector: knots must be nondecreasing");
    // no knot may repeat more than degree+1 times, otherwise some basis
    // function would have empty support
    for (size_t i = 0; i + degree_ + 1 < knots_.size(); ++i)
        if (knots_[i] == knots_[i + degree_ + 1] && degree_ > 0)
            throw std::invalid_argument("knot vector: multiplicity exceeds degree");
    if (!(domain_left() < domain_right()))
        throw std::invalid_argument("knot vector: empty domain");
}

KnotVector KnotVector::clamped(int degree, const std::vector<double>& breakpoints) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("clamped knot vector: need at least 2 breakpoints");
    std::vector<double> k;
    k.reserve(breakpoints.size() + 2 * size_t(degree));
    for (int i = 0; i <= degree; ++i) k.push_back(breakpoints.front());
    for (size_t i = 1; i + 1 < breakpoints.size(); ++i) k.push_back(breakpoints[i]);
    for (int i = 0; i <= degree; ++i) k.push_back(breakpoints.back());
    return KnotVector(degree, std::move(k));
}

std::vector<double> KnotVector::breakpoints() const {
    const double tol = knot_merge_tolerance(*this);
    std::vector<double> bp;
    for (size_t i = degree_; i + degree_ < knots_.size(); ++i) {
        if (bp.empty() || knots_[i] > bp.back() + tol) bp.push_back(knots_[i]);
    }
    return bp;
}

int KnotVector::multiplicity(double x) const {
    const double tol = knot_merge_tolerance(*this);
    int n = 0;
    for (double k : knots_)
        if (std::abs(k - x) <= tol) ++n;
    return n;
}

double knot_merge_tolerance(const KnotVector& a) {
    return 1e-12 * (a.domain_right() - a.domain_left());
}

KnotVector merge_knot_vectors(const KnotVector& a, const KnotVector& b, int target_degree) {
    if (target_degree != a.degree() + b.degree())
        throw std::invalid_argument("merge_knot_vectors: target degree must be sum of factor degrees");
    const double tol = std::max(knot_merge_tolerance(a), knot_merge_tolerance(b));
    if (std::abs(a.domain_left() - b.domain_left()) > tol ||
        std::abs(a.domain_right() - b.domain_right()) > tol)
        throw std::invalid_argument("merge_knot_vectors: factors must share a domain");

    std::vector<double> bp = a.breakpoints();
    for (double x : b.breakpoints()) {
        bool found = false;
        for (double y : bp)
            if (std::abs(x - y) <= tol) { found = true; break; }
        if (!found) bp.push_back(x);
    }
    std::sort(bp.begin(), bp.end());

    std::vector<double> out;
    for (double x : bp) {
        // a factor that is C^{deg-mult} at x leaves the product C^{min} there;
        // endpoint breakpoints of clamped factors come out clamped again
        const int sa = a.degree() - a.multiplicity(x);
        const int sb = b.degree() - b.multiplicity(x);
        int mult = target_degree - std::min(sa, sb);
        mult = std::min(mult, target_degree + 1);
        for (int r = 0; r < mult; ++r) out.push_back(x);
    }
    return KnotVector(target_degree, std::move(out));
}

Vector greville_abscissae(const KnotVector& kv) {
    const int p = kv.degree();
    Vector g(kv.dimension());
    for (Index j = 0; j < kv.dimension(); ++j) {
        if (p == 0) {
            g[j] = 0.5 * (kv.knot(j) + kv.knot(j + 1));
        } else {
            double s = 0;
            for (int r = 1; r <= p; ++r) s += kv.knot(j + r);
            g[j] = s / p;
        }
    }
    return g;
}

std::string format_knot_vector(const KnotVector& kv) {
    std::ostringstream os;
    os << kv.degree() << " |";
    char buf[32];
    for (double k : kv.knots()) {
        std::snprintf(buf, sizeof buf, " %.17g", k);
        os << buf;
    }
    return os.str();
}

KnotVector parse_knot_vector(const std::string& text) {
    const auto bar = text.find('|');
    if (bar == std::string::npos)
        throw std::invalid_argument("knot vector text: missing '|' separator");
    int degree = 0;
    try {
        degree = std::stoi(text.substr(0, bar));
    } catch (const std::exception&) {
        throw std::invalid_argument("knot vector text: bad degree field");
    }
    return KnotVector(degree, parse_number_list(text.substr(bar + 1)));
}

std::vector<double> parse_number_list(const std::string& text) {
    std::istringstream is(text);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("number list: cannot parse '" + tok + "'");
        }
        if (pos != tok.size())
            throw std::invalid_argument("number list: trailing junk in '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace sqicube
