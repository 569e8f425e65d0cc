#include "elcoinv/kernels.hpp"

#include "elcoinv/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace elcoinv {

namespace {

void check_unit_normal(const Vec2& n) {
    if (std::abs(n.norm() - 1.0) > 1e-10)
        throw GeometryError("traction kernel requires a unit normal");
}

void check_dir(int dir, const char* who) {
    if (dir < 0 || dir > 1) throw std::domain_error(std::string(who) + ": dir must be 0 or 1");
}

// Entry (i, ell) of the (n1, n2)-th x-derivative of the fundamental matrix,
// assembled from precomputed radial ladders at kp (pp) and ks (ps):
// column 0 is grad Phi(kp), column 1 is (d2, -d1) Phi(ks).
Complex e_entry(const PhiDerivs& pp, const PhiDerivs& ps, int i, int ell, int n1, int n2) {
    if (ell == 0) return i == 0 ? pp.entry(1 + n1, n2) : pp.entry(n1, 1 + n2);
    return i == 0 ? ps.entry(n1, 1 + n2) : -ps.entry(1 + n1, n2);
}

CMat2 e_matrix(const PhiDerivs& pp, const PhiDerivs& ps, int n1, int n2) {
    CMat2 m;
    for (int i = 0; i < 2; ++i)
        for (int ell = 0; ell < 2; ++ell) m(i, ell) = e_entry(pp, ps, i, ell, n1, n2);
    return m;
}

// Gradient (w.r.t. x) of column ell of the (n1, n2)-th derivative of E.
CMat2 column_gradient(const PhiDerivs& pp, const PhiDerivs& ps, int ell, int n1, int n2) {
    CMat2 g;
    for (int i = 0; i < 2; ++i) {
        g(i, 0) = e_entry(pp, ps, i, ell, n1 + 1, n2);
        g(i, 1) = e_entry(pp, ps, i, ell, n1, n2 + 1);
    }
    return g;
}

} // namespace

MaterialParams::MaterialParams(double lambda_, double mu_, double rho_, double omega_)
    : lambda(lambda_), mu(mu_), rho(rho_), omega(omega_) {
    if (!(mu > 0.0)) throw ConfigError("MaterialParams: mu must be positive");
    if (!(lambda + mu > 0.0)) throw ConfigError("MaterialParams: lambda + mu must be positive");
    if (!(rho > 0.0)) throw ConfigError("MaterialParams: rho must be positive");
    if (!(omega > 0.0)) throw ConfigError("MaterialParams: omega must be positive");
}

CVec2 traction(const CMat2& g, const Vec2& n, const MaterialParams& p) {
    const Complex div = g(0, 0) + g(1, 1);
    const Complex curl = g(1, 0) - g(0, 1);
    const Vec2 n_perp(-n.y(), n.x());
    CVec2 t = 2.0 * p.mu * (g * n.cast<Complex>());
    t += p.lambda * div * n.cast<Complex>();
    t -= p.mu * curl * n_perp.cast<Complex>();
    return t;
}

CMat2 kernel_E(const MaterialParams& p, const Vec2& x, const Vec2& y) {
    const PhiDerivs pp = phi_derivs(p.kp(), x, y, 1);
    const PhiDerivs ps = phi_derivs(p.ks(), x, y, 1);
    return e_matrix(pp, ps, 0, 0);
}

CMat2 kernel_dE(const MaterialParams& p, const Vec2& x, const Vec2& y, int dir) {
    check_dir(dir, "kernel_dE");
    const PhiDerivs pp = phi_derivs(p.kp(), x, y, 2);
    const PhiDerivs ps = phi_derivs(p.ks(), x, y, 2);
    return e_matrix(pp, ps, dir == 0 ? 1 : 0, dir == 0 ? 0 : 1);
}

CMat2 kernel_T(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y) {
    check_unit_normal(n);
    const PhiDerivs pp = phi_derivs(p.kp(), x, y, 2);
    const PhiDerivs ps = phi_derivs(p.ks(), x, y, 2);
    CMat2 t;
    for (int ell = 0; ell < 2; ++ell)
        t.col(ell) = traction(column_gradient(pp, ps, ell, 0, 0), n, p);
    return t;
}

CMat2 kernel_dT(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y, int dir) {
    return kernel_dT(p, x, n, y, dir, Vec2::Zero());
}

CMat2 kernel_dT(const MaterialParams& p, const Vec2& x, const Vec2& n, const Vec2& y, int dir,
                const Vec2& dn_ddir) {
    check_dir(dir, "kernel_dT");
    check_unit_normal(n);
    const PhiDerivs pp = phi_derivs(p.kp(), x, y, 3);
    const PhiDerivs ps = phi_derivs(p.ks(), x, y, 3);
    const int da = dir == 0 ? 1 : 0;
    const int db = dir == 0 ? 0 : 1;
    const bool moving = dn_ddir.squaredNorm() > 0.0;
    CMat2 t;
    for (int ell = 0; ell < 2; ++ell) {
        t.col(ell) = traction(column_gradient(pp, ps, ell, da, db), n, p);
        if (moving) t.col(ell) += traction(column_gradient(pp, ps, ell, 0, 0), dn_ddir, p);
    }
    return t;
}

ElasticField point_source_field(const MaterialParams& p, const Vec2& y0, Complex scale,
                                const Vec2& x) {
    const PhiDerivs pp = phi_derivs(p.kp(), x, y0, 2, scale);
    const PhiDerivs ps = phi_derivs(p.ks(), x, y0, 2, scale);
    ElasticField f;
    for (int i = 0; i < 2; ++i) {
        f.u(i) = e_entry(pp, ps, i, 0, 0, 0) + e_entry(pp, ps, i, 1, 0, 0);
        for (int j = 0; j < 2; ++j)
            f.grad(i, j) = e_entry(pp, ps, i, 0, j == 0, j == 1) +
                           e_entry(pp, ps, i, 1, j == 0, j == 1);
    }
    return f;
}

SingleLayerField::SingleLayerField(MaterialParams p, std::vector<CurveSample> nodes, RVec weights,
                                   CVec density)
    : params_(p), nodes_(std::move(nodes)), weights_(std::move(weights)),
      density_(std::move(density)) {
    const auto m = static_cast<Eigen::Index>(nodes_.size());
    if (weights_.size() != m || density_.size() != 2 * m)
        throw ConfigError("SingleLayerField: inconsistent node/weight/density sizes");
}

ElasticField SingleLayerField::field(const Vec2& x) const {
    ElasticField f;
    for (size_t j = 0; j < nodes_.size(); ++j) {
        const PhiDerivs pp = phi_derivs(params_.kp(), x, nodes_[j].point, 2);
        const PhiDerivs ps = phi_derivs(params_.ks(), x, nodes_[j].point, 2);
        for (int ell = 0; ell < 2; ++ell) {
            const Complex wphi = weights_[j] * density_[2 * j + ell];
            for (int i = 0; i < 2; ++i) f.u(i) += wphi * e_entry(pp, ps, i, ell, 0, 0);
            f.grad += wphi * column_gradient(pp, ps, ell, 0, 0);
        }
    }
    return f;
}

CVec2 SingleLayerField::traction_at(const Vec2& x, const Vec2& n) const {
    check_unit_normal(n);
    return traction(field(x).grad, n, params_);
}

CMat2 SingleLayerField::traction_grad(const Vec2& x, const Vec2& n) const {
    return traction_grad(x, n, Vec2::Zero(), Vec2::Zero());
}

CMat2 SingleLayerField::traction_grad(const Vec2& x, const Vec2& n, const Vec2& dn_dx1,
                                      const Vec2& dn_dx2) const {
    check_unit_normal(n);
    const Vec2 dns[2] = {dn_dx1, dn_dx2};
    CMat2 grad = CMat2::Zero();
    CMat2 dgrad[2] = {CMat2::Zero(), CMat2::Zero()};
    for (size_t j = 0; j < nodes_.size(); ++j) {
        const PhiDerivs pp = phi_derivs(params_.kp(), x, nodes_[j].point, 3);
        const PhiDerivs ps = phi_derivs(params_.ks(), x, nodes_[j].point, 3);
        for (int ell = 0; ell < 2; ++ell) {
            const Complex wphi = weights_[j] * density_[2 * j + ell];
            grad += wphi * column_gradient(pp, ps, ell, 0, 0);
            dgrad[0] += wphi * column_gradient(pp, ps, ell, 1, 0);
            dgrad[1] += wphi * column_gradient(pp, ps, ell, 0, 1);
        }
    }
    CMat2 tg;
    for (int dir = 0; dir < 2; ++dir) {
        tg.col(dir) = traction(dgrad[dir], n, params_);
        if (dns[dir].squaredNorm() > 0.0) tg.col(dir) += traction(grad, dns[dir], params_);
    }
    return tg;
}

FieldSample SingleLayerField::sample(const Vec2& x, const Vec2& n) const {
    check_unit_normal(n);
    FieldSample s;
    CMat2 dgrad[2] = {CMat2::Zero(), CMat2::Zero()};
    for (size_t j = 0; j < nodes_.size(); ++j) {
        const PhiDerivs pp = phi_derivs(params_.kp(), x, nodes_[j].point, 3);
        const PhiDerivs ps = phi_derivs(params_.ks(), x, nodes_[j].point, 3);
        for (int ell = 0; ell < 2; ++ell) {
            const Complex wphi = weights_[j] * density_[2 * j + ell];
            for (int i = 0; i < 2; ++i) s.u(i) += wphi * e_entry(pp, ps, i, ell, 0, 0);
            s.grad += wphi * column_gradient(pp, ps, ell, 0, 0);
            dgrad[0] += wphi * column_gradient(pp, ps, ell, 1, 0);
            dgrad[1] += wphi * column_gradient(pp, ps, ell, 0, 1);
        }
    }
    s.t = traction(s.grad, n, params_);
    for (int dir = 0; dir < 2; ++dir) s.t_grad.col(dir) = traction(dgrad[dir], n, params_);
    return s;
}

} // namespace elcoinv
