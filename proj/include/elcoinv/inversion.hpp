#pragma once

#include "elcoinv/cauchy.hpp"

#include <functional>
#include <vector>

namespace elcoinv {

/// Stage-2 iteration controls. Defaults reproduce the shipped experiments:
/// degree-8 trigonometric boundary and impedance bases, a 64-node angular grid
/// with the accessible arc on [0, pi), relative-error stopping at 1e-5.
struct InversionSettings {
    int fourier_degree = 8;    ///< boundary degree N; 2N+1 radial coefficients
    int chi_degree = 8;        ///< impedance degree when not pointwise
    int grid_nodes = 64;       ///< equispaced angular nodes on [0, 2 pi)
    double gamma0_end = pi;    ///< accessible arc is [0, gamma0_end)
    double stop_tol = 1e-5;    ///< stop once E_n < stop_tol
    int max_iter = 300;
    double damping_rel = 5e-2; ///< damping = damping_rel * max diag of the normal matrix
    bool moving_normal = true;  ///< include normal-variation terms in the shape Jacobian
    bool pointwise_chi = false; ///< per-node impedance unknowns instead of a trig basis
    bool clamp_chi = false;     ///< clamp reported impedance values at zero (post hoc)
    double init_radius = 0.5;   ///< initial boundary guess: circle of this radius
    double chi0 = 0.5;          ///< initial impedance guess: this constant

    void validate() const;
};

/// Impedance unknown over the missing arc: either trigonometric coefficients
/// or one value per missing-arc grid node. In coefficient mode the basis is
/// the trig system over the missing-arc parameter interval, rescaled so the
/// interval spans one full period; on an equispaced grid this keeps the
/// update system well conditioned. Values are not sign-constrained during
/// iteration; `clamped` turns evaluations into max(value, 0) for reporting.
struct ImpedanceModel {
    bool pointwise = false;
    int degree = 0;   ///< trig degree in coefficient mode
    RVec coeffs;      ///< 2*degree+1 coefficients, or one value per node
    bool clamped = false;
    double interval_start = pi;   ///< missing arc starts here...
    double interval_length = pi;  ///< ...and spans this much of [0, 2 pi)

    static ImpedanceModel constant(double chi0, int degree, double interval_start = pi,
                                   double interval_length = pi);
    static ImpedanceModel pointwise_constant(double chi0, Eigen::Index nodes);

    /// Angle rescaled so the missing-arc interval covers one trig period.
    double scaled_angle(double theta) const {
        return 2.0 * pi * (theta - interval_start) / interval_length;
    }

    /// Coefficient mode only (throws otherwise): evaluate chi at an angle.
    double value(double theta) const;
    /// Pointwise mode only: value at the given missing-arc node index.
    double value_at(Eigen::Index node) const;
    double norm() const { return coeffs.norm(); }
};

/// Boundary iterate + impedance iterate of the alternating Newton scheme.
struct IterationState {
    RVec boundary; ///< radial trig coefficients, FourierCurve layout
    ImpedanceModel chi;
};

/// One row of the convergence history.
struct IterationRecord {
    int n = 0;                ///< 1-based update round
    double error_metric = 0;  ///< E_n = |da|/|a_prev| + |dchi|/|chi_prev|
    double residual_norm = 0; ///< ||Q - g|| over the full grid after the round
    RVec boundary;            ///< a^(n)
    RVec chi;                 ///< impedance coefficients (or node values)
};

struct InversionResult {
    std::vector<IterationRecord> history;
    bool converged = false;
    int iterations = 0;
    IterationState state; ///< final iterate
};

/// Alternating Newton-type iteration for the missing boundary and impedance:
/// linearized boundary update over the radial Fourier coefficients, then a
/// linear impedance update, both solved by damped least squares against the
/// boundary target g. Field values come from a FieldEvaluator (the completed
/// Cauchy field in production, closed-form fields in tests).
class Inverter {
  public:
    /// `known_arc` samples the accessible part of the true boundary (angles in
    /// [0, gamma0_end)); it anchors the frozen per-node impedance fit there.
    Inverter(InversionSettings settings, const FieldEvaluator& fields, TargetFn g,
             std::function<CurveSample(double)> known_arc);

    const InversionSettings& settings() const { return settings_; }
    const std::vector<double>& grid() const { return thetas_; }
    /// Indices of grid nodes on the missing arc [gamma0_end, 2 pi).
    const std::vector<Eigen::Index>& missing_nodes() const { return gm_index_; }
    /// Frozen impedance values fitted on the accessible arc (one per grid node
    /// in [0, gamma0_end)).
    const RVec& gamma0_chi() const { return chi_gamma0_; }

    IterationState initial_state() const;

    /// Q = t^delta + i omega chi u^delta at every grid node of the iterate
    /// curve (2 complex entries per node, node-major). Throws IterationError
    /// when the iterate degenerates or leaves the admissible region.
    CVec residual_Q(const IterationState& state) const;
    /// Right-hand side g at the grid angles, same layout as residual_Q.
    CVec target_values() const;
    /// ||Q - g|| over the grid (discrete l2 over nodes and components).
    double residual_norm(const IterationState& state) const;

    /// Complex shape Jacobian: rows = 2 per node (components), columns = the
    /// 2N+1 radial coefficients. Frozen-normal by default; the moving-normal
    /// mode adds the normal-variation term of the traction.
    CMat shape_jacobian(const IterationState& state) const;
    /// Damped least-squares boundary update Delta a.
    RVec shape_step(const IterationState& state) const;

    /// Damped least-squares impedance update on the missing arc, for the
    /// geometry of `state` (call after applying the boundary update).
    RVec impedance_step(const IterationState& state) const;

    /// Full alternating iteration from initial_state().
    InversionResult run() const;
    /// Alternating iteration from an explicit start (warm restarts, plug-in
    /// regressions). The start must match the configured parameterization.
    InversionResult run(IterationState start) const;

    /// The linear algebra of the impedance update, exposed for its scaling
    /// property: minimizes ||i omega diag(u) C x - rhs||^2 + damping ||x||^2
    /// over real x, with rows split into real/imaginary parts and components.
    /// u: field values (2 per node); basis: per-node rows of the chi basis.
    static RVec solve_impedance_system(const CVec& u_values, const RMat& basis, double omega,
                                       const CVec& rhs, double damping_rel);

  private:
    FourierCurve curve_of(const RVec& coeffs) const;
    CurveSample iterate_sample(const FourierCurve& c, double theta) const;
    double chi_at(const IterationState& state, Eigen::Index grid_node) const;

    InversionSettings settings_;
    const FieldEvaluator& fields_;
    TargetFn g_;
    std::vector<double> thetas_;
    std::vector<Eigen::Index> gm_index_;  ///< grid indices on the missing arc
    Eigen::Index gamma0_count_ = 0;       ///< grid nodes on [0, gamma0_end)
    RVec chi_gamma0_;                     ///< frozen accessible-arc impedance fit
};

/// Damped least squares min ||A x - b||^2 + damping_rel * maxdiag(A^T A) ||x||^2
/// for a real system; throws IterationError when the system is unusable.
RVec damped_least_squares(const RMat& a, const RVec& b, double damping_rel);

} // namespace elcoinv
