#pragma once

#include "elcoinv/types.hpp"

namespace elcoinv {

/// Hankel function of the first kind H^(1)_order(x) = J_order(x) + i Y_order(x)
/// for integer orders 0..3 and real x > 0. Accurate to >= 10 significant digits
/// over x in [1e-3, 200] (ascending series below x = 14, large-argument
/// asymptotic expansion above). Throws std::domain_error on x <= 0 or an
/// unsupported order.
Complex hankel1(int order, double x);

/// All partial derivatives up to third order (w.r.t. the first argument x) of
///   Phi(x, y) = scale * H^(1)_0(k |x - y|),
/// the outgoing 2-D fundamental-solution building block. The default scale i/4
/// makes Phi the fundamental solution of the Helmholtz operator Delta + k^2.
///
/// Derivatives of the radial function f(r) = scale * H0(k r) reduce to three
/// radial factors, in terms of which (d = x - y, delta = Kronecker):
///   d_a Phi           = B d_a
///   d_a d_b Phi       = C d_a d_b + B delta_ab
///   d_a d_b d_c Phi   = D d_a d_b d_c + C (delta_ab d_c + delta_ac d_b + delta_bc d_a)
struct PhiDerivs {
    double k = 0.0;   ///< wavenumber
    double r = 0.0;   ///< |x - y|
    Vec2 d;           ///< x - y
    Complex value;    ///< Phi itself
    Complex B, C, D;  ///< radial factors (see above)

    /// Partial derivative with n1 d/dx1's and n2 d/dx2's, n1 + n2 <= 3.
    Complex entry(int n1, int n2) const;
};

/// Evaluate PhiDerivs at distinct points x, y (throws GeometryError when
/// coincident or closer than 1e-14). max_order in 0..3 bounds which entries
/// are meaningful; all radial factors up to the requested order are filled.
PhiDerivs phi_derivs(double k, const Vec2& x, const Vec2& y, int max_order = 3,
                     Complex scale = Complex(0.0, 0.25));

} // namespace elcoinv
