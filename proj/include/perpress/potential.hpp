#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "perpress/rational_map.hpp"

namespace perpress {

/// Real-valued weight function on the dynamical plane, built from a small
/// closed algebra of primitives. Immutable expression tree, cheap to copy
/// and safe to share across threads.
///
/// Text grammar (whitespace-insensitive):
///   const(a)        constant a
///   logderiv        -log|f'(z)|
///   logderiv(t)     -t * log|f'(z)|   (the Bowen family)
///   re              Re z
///   im              Im z
///   sum(e1, e2)     e1 + e2
///   scale(s, e)     s * e
class Potential {
  public:
    static Potential constant(double a);
    /// -t * log|f'(z)|; negative at expanding points for t > 0.
    static Potential log_deriv(double t = 1.0);
    static Potential coord_re();
    static Potential coord_im();
    static Potential sum(Potential a, Potential b);
    static Potential scale(double s, Potential e);

    /// Parse the grammar above. Throws std::invalid_argument with the
    /// offending position on malformed input.
    static Potential parse(std::string_view text);

    /// Evaluate at a finite point. Throws std::domain_error if a
    /// logderiv term hits a critical point (log of zero) or z is not
    /// finite.
    double eval(const RationalMap& map, cplx z) const;
    double operator()(const RationalMap& map, cplx z) const {
        return eval(map, z);
    }

    /// Expression depth; construction rejects depth > 32.
    int depth() const;

    std::string to_string() const;

    struct Node;  // opaque expression node

  private:
    std::shared_ptr<const Node> root_;
    explicit Potential(std::shared_ptr<const Node> n) : root_(std::move(n)) {}
};

/// Birkhoff sum S_n(phi)(z) = sum_{k<n} phi(f^k(z)) over a single computed
/// orbit. Evaluation failures are rethrown with the offending step index.
double birkhoff_sum(const Potential& phi, const RationalMap& map, cplx z,
                    int n);

/// Same sum over an orbit that has already been computed.
double birkhoff_sum(const Potential& phi, const RationalMap& map,
                    std::span<const cplx> orbit);

}  // namespace perpress
