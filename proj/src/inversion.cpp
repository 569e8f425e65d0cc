#include "elcoinv/inversion.hpp"

#include "elcoinv/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <utility>

namespace elcoinv {

void InversionSettings::validate() const {
    if (fourier_degree < 0) throw ConfigError("InversionSettings: fourier_degree must be >= 0");
    if (chi_degree < 0) throw ConfigError("InversionSettings: chi_degree must be >= 0");
    if (grid_nodes < 4) throw ConfigError("InversionSettings: grid_nodes must be >= 4");
    if (!(gamma0_end > 0.0) || !(gamma0_end < 2.0 * pi))
        throw ConfigError("InversionSettings: gamma0_end must lie in (0, 2 pi)");
    if (!(stop_tol > 0.0)) throw ConfigError("InversionSettings: stop_tol must be positive");
    if (max_iter < 1) throw ConfigError("InversionSettings: max_iter must be >= 1");
    if (!(damping_rel >= 0.0) || !std::isfinite(damping_rel))
        throw ConfigError("InversionSettings: damping_rel must be nonnegative");
    if (!(init_radius > 0.0)) throw ConfigError("InversionSettings: init_radius must be positive");
    if (!std::isfinite(chi0)) throw ConfigError("InversionSettings: chi0 must be finite");
    if (4 * grid_nodes < 2 * fourier_degree + 1)
        throw ConfigError("InversionSettings: grid too coarse for the boundary degree");
}

ImpedanceModel ImpedanceModel::constant(double chi0, int degree, double interval_start,
                                        double interval_length) {
    if (!(interval_length > 0.0))
        throw ConfigError("ImpedanceModel: interval length must be positive");
    ImpedanceModel m;
    m.degree = degree;
    m.coeffs = RVec::Zero(2 * degree + 1);
    m.coeffs[0] = chi0;
    m.interval_start = interval_start;
    m.interval_length = interval_length;
    return m;
}

ImpedanceModel ImpedanceModel::pointwise_constant(double chi0, Eigen::Index nodes) {
    ImpedanceModel m;
    m.pointwise = true;
    m.coeffs = RVec::Constant(nodes, chi0);
    return m;
}

double ImpedanceModel::value(double theta) const {
    if (pointwise)
        throw ConfigError("ImpedanceModel: pointwise mode has no off-node evaluation");
    const double raw = FourierCurve::basis_row(scaled_angle(theta), degree).dot(coeffs);
    return clamped ? std::max(0.0, raw) : raw;
}

double ImpedanceModel::value_at(Eigen::Index node) const {
    if (!pointwise) throw ConfigError("ImpedanceModel: value_at is for pointwise mode");
    if (node < 0 || node >= coeffs.size())
        throw ConfigError("ImpedanceModel: node index out of range");
    const double raw = coeffs[node];
    return clamped ? std::max(0.0, raw) : raw;
}

RVec damped_least_squares(const RMat& a, const RVec& b, double damping_rel) {
    if (a.rows() != b.size()) throw ConfigError("damped_least_squares: size mismatch");
    const RMat gram = a.transpose() * a;
    const double maxdiag = gram.diagonal().maxCoeff();
    if (!std::isfinite(maxdiag) || maxdiag <= 0.0)
        throw IterationError("damped least squares: system matrix is numerically zero");
    RMat damped = gram;
    damped.diagonal().array() += damping_rel * maxdiag;
    const Eigen::LDLT<RMat> ldlt(damped);
    if (ldlt.info() != Eigen::Success)
        throw IterationError("damped least squares: normal equations not factorizable");
    const RVec x = ldlt.solve(a.transpose() * b);
    if (!x.allFinite())
        throw IterationError("damped least squares: rank deficiency beyond the damping");
    return x;
}

namespace {

/// Rotation by -pi/2, matching the outward-normal convention n = rot(z')/|z'|.
Vec2 rot_minus_half(const Vec2& w) { return Vec2(w.y(), -w.x()); }

/// Realify rows of a complex least-squares system: each complex row becomes a
/// (real; imaginary) pair.
void realify(const CMat& jc, const CVec& rc, RMat& ar, RVec& br) {
    ar.resize(2 * jc.rows(), jc.cols());
    br.resize(2 * rc.size());
    for (Eigen::Index r = 0; r < jc.rows(); ++r) {
        ar.row(2 * r) = jc.row(r).real();
        ar.row(2 * r + 1) = jc.row(r).imag();
        br[2 * r] = rc[r].real();
        br[2 * r + 1] = rc[r].imag();
    }
}

} // namespace

Inverter::Inverter(InversionSettings settings, const FieldEvaluator& fields, TargetFn g,
                   std::function<CurveSample(double)> known_arc)
    : settings_(std::move(settings)), fields_(fields), g_(std::move(g)) {
    settings_.validate();
    if (!g_) throw ConfigError("Inverter: boundary target is empty");
    if (!known_arc) throw ConfigError("Inverter: accessible-arc sampler is empty");

    thetas_ = collocation_grid(settings_.grid_nodes, 0.0, 2.0 * pi);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(thetas_.size()); ++j) {
        if (thetas_[j] < settings_.gamma0_end)
            ++gamma0_count_;
        else
            gm_index_.push_back(j);
    }
    if (gamma0_count_ == 0 || gm_index_.empty())
        throw ConfigError("Inverter: the grid must cover both boundary arcs");

    // Frozen impedance on the accessible arc: with the boundary known there,
    // T_n u + i omega chi u = g pins chi node by node; the per-node real
    // least-squares fit is chi = Re<i omega u, g - t> / |i omega u|^2.
    const double omega = fields_.params().omega;
    chi_gamma0_ = RVec::Zero(gamma0_count_);
    for (Eigen::Index j = 0; j < gamma0_count_; ++j) {
        const CurveSample s = known_arc(thetas_[j]);
        const FieldSample fs = fields_.sample(s.point, s.normal);
        const CVec2 c = iu * omega * fs.u;
        const CVec2 rho = g_(thetas_[j]) - fs.t;
        const double c2 = c.squaredNorm();
        chi_gamma0_[j] = c2 > 1e-24 ? c.dot(rho).real() / c2 : 0.0;
    }
}

FourierCurve Inverter::curve_of(const RVec& coeffs) const {
    return FourierCurve(coeffs, settings_.fourier_degree);
}

CurveSample Inverter::iterate_sample(const FourierCurve& c, double theta) const {
    return c.sample(theta);
}

double Inverter::chi_at(const IterationState& state, Eigen::Index grid_node) const {
    if (grid_node < gamma0_count_) return chi_gamma0_[grid_node];
    if (state.chi.pointwise) return state.chi.value_at(grid_node - gamma0_count_);
    return state.chi.value(thetas_[grid_node]);
}

IterationState Inverter::initial_state() const {
    IterationState st;
    st.boundary = RVec::Zero(2 * settings_.fourier_degree + 1);
    st.boundary[0] = settings_.init_radius;
    st.chi = settings_.pointwise_chi
                 ? ImpedanceModel::pointwise_constant(settings_.chi0,
                                                      static_cast<Eigen::Index>(gm_index_.size()))
                 : ImpedanceModel::constant(settings_.chi0, settings_.chi_degree,
                                            settings_.gamma0_end,
                                            2.0 * pi - settings_.gamma0_end);
    return st;
}

CVec Inverter::residual_Q(const IterationState& state) const {
    const double omega = fields_.params().omega;
    CVec q(2 * static_cast<Eigen::Index>(thetas_.size()));
    try {
        const FourierCurve c = curve_of(state.boundary);
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(thetas_.size()); ++j) {
            const CurveSample s = iterate_sample(c, thetas_[j]);
            const FieldSample fs = fields_.sample(s.point, s.normal);
            const CVec2 qj = fs.t + iu * omega * chi_at(state, j) * fs.u;
            q[2 * j] = qj[0];
            q[2 * j + 1] = qj[1];
        }
    } catch (const GeometryError& e) {
        throw IterationError(std::string("iterate left the admissible region: ") + e.what());
    }
    return q;
}

CVec Inverter::target_values() const {
    CVec g(2 * static_cast<Eigen::Index>(thetas_.size()));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(thetas_.size()); ++j) {
        const CVec2 gj = g_(thetas_[j]);
        g[2 * j] = gj[0];
        g[2 * j + 1] = gj[1];
    }
    return g;
}

double Inverter::residual_norm(const IterationState& state) const {
    return (residual_Q(state) - target_values()).norm();
}

CMat Inverter::shape_jacobian(const IterationState& state) const {
    const double omega = fields_.params().omega;
    const Eigen::Index cols = 2 * settings_.fourier_degree + 1;
    CMat jac(2 * static_cast<Eigen::Index>(thetas_.size()), cols);
    try {
        const FourierCurve c = curve_of(state.boundary);
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(thetas_.size()); ++j) {
            const double th = thetas_[j];
            const CurveSample s = iterate_sample(c, th);
            const FieldSample fs = fields_.sample(s.point, s.normal);
            const double chi = chi_at(state, j);
            const CMat2 grad_q = fs.t_grad + iu * omega * chi * fs.grad;
            const Vec2 xhat(std::cos(th), std::sin(th));
            const CVec2 base = grad_q * xhat.cast<Complex>();
            const RVec basis = FourierCurve::basis_row(th, settings_.fourier_degree);
            for (Eigen::Index m = 0; m < cols; ++m) {
                CVec2 col = base * basis[m];
                if (settings_.moving_normal) {
                    // radial perturbation dz = B_m xhat; the normal n = rot(z')/|z'|
                    // moves by (I - n n^T) rot(dz') / |z'|, and the traction is
                    // linear in the normal direction.
                    const RVec dbasis = FourierCurve::basis_deriv_row(th, settings_.fourier_degree);
                    const Vec2 xhat_perp(-std::sin(th), std::cos(th));
                    const Vec2 dzp = dbasis[m] * xhat + basis[m] * xhat_perp;
                    const Vec2 w = rot_minus_half(dzp);
                    const Vec2 dn = (w - s.normal * s.normal.dot(w)) / s.speed;
                    col += traction(fs.grad, dn, fields_.params());
                }
                jac(2 * j, m) = col[0];
                jac(2 * j + 1, m) = col[1];
            }
        }
    } catch (const GeometryError& e) {
        throw IterationError(std::string("iterate left the admissible region: ") + e.what());
    }
    return jac;
}

RVec Inverter::shape_step(const IterationState& state) const {
    const CMat jac = shape_jacobian(state);
    const CVec rhs = target_values() - residual_Q(state);
    RMat a;
    RVec b;
    realify(jac, rhs, a, b);
    return damped_least_squares(a, b, settings_.damping_rel);
}

RVec Inverter::impedance_step(const IterationState& state) const {
    const double omega = fields_.params().omega;
    const Eigen::Index m = static_cast<Eigen::Index>(gm_index_.size());
    CVec u_vals(2 * m);
    CVec rhs(2 * m);
    double umax = 0.0;
    try {
        const FourierCurve c = curve_of(state.boundary);
        for (Eigen::Index k = 0; k < m; ++k) {
            const Eigen::Index j = gm_index_[static_cast<size_t>(k)];
            const CurveSample s = iterate_sample(c, thetas_[j]);
            const FieldSample fs = fields_.sample(s.point, s.normal);
            const CVec2 qj = fs.t + iu * omega * chi_at(state, j) * fs.u;
            const CVec2 gj = g_(thetas_[j]);
            u_vals[2 * k] = fs.u[0];
            u_vals[2 * k + 1] = fs.u[1];
            rhs[2 * k] = gj[0] - qj[0];
            rhs[2 * k + 1] = gj[1] - qj[1];
            umax = std::max(umax, fs.u.norm());
        }
    } catch (const GeometryError& e) {
        throw IterationError(std::string("iterate left the admissible region: ") + e.what());
    }
    if (umax < 1e-12)
        throw IterationError(
            "impedance update is unidentifiable: the field vanishes on the missing arc");

    RMat basis;
    if (state.chi.pointwise) {
        basis = RMat::Identity(m, m);
    } else {
        const Eigen::Index cols = 2 * settings_.chi_degree + 1;
        basis.resize(m, cols);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double s = state.chi.scaled_angle(thetas_[gm_index_[static_cast<size_t>(k)]]);
            basis.row(k) = FourierCurve::basis_row(s, settings_.chi_degree).transpose();
        }
    }
    return solve_impedance_system(u_vals, basis, omega, rhs, settings_.damping_rel);
}

RVec Inverter::solve_impedance_system(const CVec& u_values, const RMat& basis, double omega,
                                      const CVec& rhs, double damping_rel) {
    if (u_values.size() != rhs.size() || u_values.size() != 2 * basis.rows())
        throw ConfigError("solve_impedance_system: size mismatch");
    CMat jc(u_values.size(), basis.cols());
    for (Eigen::Index k = 0; k < basis.rows(); ++k)
        for (Eigen::Index c = 0; c < 2; ++c)
            jc.row(2 * k + c) = (iu * omega * u_values[2 * k + c]) * basis.row(k);
    RMat a;
    RVec b;
    realify(jc, rhs, a, b);
    return damped_least_squares(a, b, damping_rel);
}

InversionResult Inverter::run() const { return run(initial_state()); }

InversionResult Inverter::run(IterationState start) const {
    if (start.boundary.size() != 2 * settings_.fourier_degree + 1)
        throw ConfigError("run: start boundary does not match the configured degree");
    if (!start.chi.pointwise && start.chi.coeffs.size() != 2 * start.chi.degree + 1)
        throw ConfigError("run: start impedance coefficients do not match its degree");
    if (start.chi.pointwise &&
        start.chi.coeffs.size() != static_cast<Eigen::Index>(gm_index_.size()))
        throw ConfigError("run: start impedance nodes do not match the missing-arc grid");
    InversionResult out;
    IterationState state = std::move(start);
    const double dtheta = 2.0 * pi / static_cast<double>(settings_.grid_nodes);
    for (int n = 1; n <= settings_.max_iter; ++n) {
        const RVec da = shape_step(state);
        const double a_prev = state.boundary.norm();
        state.boundary += da;

        // pointwise impedance norms are weighted discrete L2 over the
        // missing-arc nodes of the updated curve; coefficient mode uses the
        // plain l2 of the coefficient vectors
        auto chi_norm = [&](const RVec& v) {
            if (!state.chi.pointwise) return v.norm();
            const FourierCurve c = curve_of(state.boundary);
            double s2 = 0.0;
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                const double sp = c.sample(thetas_[gm_index_[static_cast<size_t>(k)]]).speed;
                s2 += sp * dtheta * v[k] * v[k];
            }
            return std::sqrt(s2);
        };

        const RVec dchi = impedance_step(state);
        const double chi_prev = chi_norm(state.chi.coeffs);
        state.chi.coeffs += dchi;

        // relative stopping metric; a zero previous iterate falls back to the
        // absolute update size so the metric stays finite
        const double err = da.norm() / (a_prev > 0.0 ? a_prev : 1.0) +
                           chi_norm(dchi) / (chi_prev > 0.0 ? chi_prev : 1.0);

        IterationRecord rec;
        rec.n = n;
        rec.error_metric = err;
        rec.residual_norm = residual_norm(state);
        rec.boundary = state.boundary;
        rec.chi = state.chi.coeffs;
        out.history.push_back(std::move(rec));

        if (err < settings_.stop_tol) {
            out.converged = true;
            break;
        }
    }
    out.iterations = static_cast<int>(out.history.size());
    state.chi.clamped = settings_.clamp_chi;
    out.state = std::move(state);
    return out;
}

} // namespace elcoinv
