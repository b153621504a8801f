#pragma once

#include <string>
#include <vector>

#include "sqicube/types.hpp"

namespace sqicube {

/**
 * Nondecreasing knot sequence for a univariate spline space of fixed degree.
 *
 * With knots xi_0 <= ... <= xi_{m+p+1} the space holds m+1 basis functions
 * B_{0,p}, ..., B_{m,p}; the represented domain is [xi_p, xi_{m+1}].
 * Basis values at the right end of the domain are taken by left-continuity.
 */
class KnotVector {
public:
    KnotVector() = default;
    KnotVector(int degree, std::vector<double> knots);

    /// Open (clamped) vector: end breakpoints repeated degree+1 times,
    /// interior breakpoints simple.
    static KnotVector clamped(int degree, const std::vector<double>& breakpoints);

    int degree() const { return degree_; }
    Index dimension() const { return Index(knots_.size()) - degree_ - 1; }
    const std::vector<double>& knots() const { return knots_; }
    double knot(Index i) const { return knots_[size_t(i)]; }
    double domain_left() const { return knots_[size_t(degree_)]; }
    double domain_right() const { return knots_[knots_.size() - size_t(degree_) - 1]; }

    /// Distinct knot values inside [domain_left, domain_right], endpoints included.
    std::vector<double> breakpoints() const;

    /// Multiplicity of value x among the knots (tolerance-based match).
    int multiplicity(double x) const;

    bool operator==(const KnotVector& other) const {
        return degree_ == other.degree_ && knots_ == other.knots_;
    }

private:
    int degree_ = 0;
    std::vector<double> knots_;
};

/// Knot coincidence tolerance used when merging: 1e-12 times the domain length.
double knot_merge_tolerance(const KnotVector& a);

/**
 * Smallest knot vector of degree target_degree whose spline space contains
 * every product f*g with f in a's space and g in b's space.  Both inputs must
 * share the same domain.  A shared breakpoint keeps the lesser smoothness of
 * the two factors; target_degree must equal a.degree() + b.degree().
 */
KnotVector merge_knot_vectors(const KnotVector& a, const KnotVector& b, int target_degree);

/// Greville abscissae gamma_j = (xi_{j+1} + ... + xi_{j+p}) / p.
Vector greville_abscissae(const KnotVector& kv);

/// Plain-text serialization: "degree | knot knot ...", round-trip safe.
std::string format_knot_vector(const KnotVector& kv);
KnotVector parse_knot_vector(const std::string& text);

/// Whitespace-separated list of reals; throws std::invalid_argument on junk.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace sqicube
