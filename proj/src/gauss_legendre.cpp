#include "sqicube/gauss_legendre.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace sqicube {

namespace {

// value and derivative of the Legendre polynomial P_n at x
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1);
    return {p1, dp};
}

QuadRule compute_rule(int n) {
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1;
        for (int it = 0; it < 100; ++it) {
            const auto [p, d] = legendre(n, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                dp = legendre(n, x).second;
                break;
            }
        }
        // nodes come out in descending order of the cosine seed; store ascending
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
    if (n < 1 || n > 200)
        throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

QuadRule gauss_on_interval(int n, double a, double b) {
    const QuadRule& base = gauss_legendre(n);
    QuadRule r;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    r.nodes = (base.nodes.array() * half + mid).matrix();
    r.weights = base.weights * half;
    return r;
}

}  // namespace sqicube
