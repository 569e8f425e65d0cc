#pragma once

#include "elcoinv/geometry.hpp"
#include "elcoinv/specialfn.hpp"
#include "elcoinv/types.hpp"

#include <vector>

namespace elcoinv {

/// Lame/density/frequency bundle. Enforces mu > 0, lambda + mu > 0, rho > 0,
/// omega > 0, which in particular orders the wavenumbers kp() < ks().
struct MaterialParams {
    double lambda = 1.0, mu = 1.0, rho = 1.0, omega = 1.0;

    MaterialParams() = default;
    MaterialParams(double lambda_, double mu_, double rho_, double omega_);

    double kp() const { return omega * std::sqrt(rho / (lambda + 2.0 * mu)); }
    double ks() const { return omega * std::sqrt(rho / mu); }
};

/// A displacement field value with its spatial gradient,
/// grad(i, j) = d u_i / d x_j.
struct ElasticField {
    CVec2 u = CVec2::Zero();
    CMat2 grad = CMat2::Zero();
};

/// Traction of a displacement gradient on a unit normal n:
///   t = 2 mu (grad u) n + lambda n div u - mu n_perp (d1 u2 - d2 u1),
/// with n_perp = (-n2, n1); algebraically equal to sigma(u) n.
CVec2 traction(const CMat2& grad_u, const Vec2& n, const MaterialParams& p);
inline CVec2 traction(const ElasticField& f, const Vec2& n, const MaterialParams& p) {
    return traction(f.grad, n, p);
}

/// Fundamental displacement matrix: column 1 is the compressional gradient
/// field grad Phi(kp), column 2 the rotated shear gradient (d2, -d1) Phi(ks).
CMat2 kernel_E(const MaterialParams& p, const Vec2& x, const Vec2& y);

/// d/dx_dir of kernel_E (dir in 0..1).
CMat2 kernel_dE(const MaterialParams& p, const Vec2& x, const Vec2& y, int dir);

/// Traction kernel: traction of each kernel_E column at x with unit normal n
/// (tolerance 1e-10 on |n| = 1).
CMat2 kernel_T(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y);

/// d/dx_dir of kernel_T with the normal held frozen; the overload taking
/// dn_ddir adds the moving-normal contribution (traction is linear in n).
CMat2 kernel_dT(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y, int dir);
CMat2 kernel_dT(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y, int dir,
                const Vec2& dn_ddir);

/// Exact outgoing solution u = grad u_p + (d2, -d1) u_s with the scalar
/// potentials u_{p,s} = scale * H^(1)_0(k_{p,s} |x - y0|); singular at y0.
ElasticField point_source_field(const MaterialParams& p, const Vec2& y0, Complex scale,
                                const Vec2& x);

/// Everything a boundary collocation point needs from a field in one pass:
/// displacement, its gradient, the traction on a given unit normal, and the
/// frozen-normal spatial gradient of that traction (columns are d t / d x_dir).
struct FieldSample {
    CVec2 u = CVec2::Zero();
    CMat2 grad = CMat2::Zero();
    CVec2 t = CVec2::Zero();
    CMat2 t_grad = CMat2::Zero();
};

/// Single-layer elastic potential over a sampled curve:
///   u(x) = sum_j w_j E(x, y_j) phi_j,  phi interleaved (phi1, phi2) per node.
/// Provides values, gradients, tractions, and traction gradients (frozen or
/// moving normal) at points off the carrying curve.
class SingleLayerField {
  public:
    SingleLayerField(MaterialParams p, std::vector<CurveSample> nodes, RVec weights,
                     CVec density);

    const MaterialParams& params() const { return params_; }
    const std::vector<CurveSample>& nodes() const { return nodes_; }
    const RVec& weights() const { return weights_; }
    const CVec& density() const { return density_; }

    ElasticField field(const Vec2& x) const;
    CVec2 traction_at(const Vec2& x, const Vec2& n) const;
    /// Columns are d t / d x_dir; optional moving-normal derivatives dn[dir].
    CMat2 traction_grad(const Vec2& x, const Vec2& n) const;
    CMat2 traction_grad(const Vec2& x, const Vec2& n, const Vec2& dn_dx1,
                        const Vec2& dn_dx2) const;
    /// One-pass evaluation sharing the radial derivative ladders across all
    /// outputs; equal to assembling field/traction_at/traction_grad separately.
    FieldSample sample(const Vec2& x, const Vec2& n) const;

  private:
    MaterialParams params_;
    std::vector<CurveSample> nodes_;
    RVec weights_;
    CVec density_;
};

} // namespace elcoinv
