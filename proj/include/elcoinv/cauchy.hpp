#pragma once

#include "elcoinv/kernels.hpp"

#include <Eigen/SVD>

#include <functional>
#include <vector>

namespace elcoinv {

/// Scalar function of the boundary parameter (impedance profiles).
using ScalarFn = std::function<double(double)>;
/// Complex 2-vector function of the boundary parameter (boundary targets).
using TargetFn = std::function<CVec2(double)>;

/// Displacement/traction pair measured on the accessible arc, with the
/// arc-length weights that define the discrete data norm.
struct CauchyData {
    std::vector<CurveSample> nodes; ///< collocation samples on the accessible arc
    RVec weights;                   ///< arc-length weight per node
    CVec u;                         ///< displacement, 2 entries per node (interleaved)
    CVec t;                         ///< traction, same layout
    double delta = 0.0;             ///< relative noise level of this realization
    double eps = 0.0;               ///< discrepancy radius delta * ||h_exact||

    Eigen::Index count() const { return static_cast<Eigen::Index>(nodes.size()); }
    /// Stacked data vector: displacement block then traction block (4 per node).
    CVec stacked() const;
    /// Weighted norm of a stacked vector under this grid's weights.
    double stacked_norm(const CVec& stacked) const;
    double norm() const { return stacked_norm(stacked()); }
};

/// Discrete completion operator: single-layer densities on the auxiliary
/// boundary mapped to (displacement; traction) traces on the accessible arc.
/// Rows: displacement block (2 per collocation node) then traction block;
/// columns: 2 per source node. Entries carry the source quadrature weights.
class DiscreteOperator {
  public:
    DiscreteOperator(const MaterialParams& p, const std::vector<CurveSample>& colloc,
                     const RVec& colloc_weights, const std::vector<CurveSample>& source,
                     const RVec& source_weights);

    const CMat& matrix() const { return matrix_; }
    /// Arc weights repeated per row (displacement and traction blocks alike).
    const RVec& row_weights() const { return row_weights_; }
    /// Source arc weights repeated per column.
    const RVec& col_weights() const { return col_weights_; }
    const MaterialParams& params() const { return params_; }
    const std::vector<CurveSample>& source_nodes() const { return source_nodes_; }
    const RVec& source_weights() const { return source_weights_; }

    CVec apply(const CVec& density) const { return matrix_ * density; }

  private:
    MaterialParams params_;
    CMat matrix_;
    RVec row_weights_, col_weights_;
    std::vector<CurveSample> source_nodes_;
    RVec source_weights_;
};

/// Tikhonov solver with Morozov parameter choice. One singular value
/// decomposition of the weighted operator is shared across every alpha, so a
/// discrepancy evaluation costs only a filtered expansion.
class CauchySolver {
  public:
    /// Smallest alpha the discrepancy root-finder will return; noise-free data
    /// pins the parameter here (the discretization floor).
    static constexpr double alpha_floor = 1e-16;

    explicit CauchySolver(const DiscreteOperator& op);

    /// Weighted norm of a stacked data vector.
    double data_norm(const CVec& stacked) const;
    /// Density minimizing ||N phi - h||^2_w + alpha ||phi||^2_w; alpha > 0.
    CVec solve(const CVec& stacked, double alpha) const;
    /// Weighted residual norm ||N phi_alpha - h||_w; nondecreasing in alpha.
    double discrepancy(const CVec& stacked, double alpha) const;

    struct Result {
        double alpha = 0.0;
        CVec density;
        double discrepancy = 0.0;
        int evaluations = 0;  ///< discrepancy evaluations spent by the root-finder
        bool at_floor = false;
    };

    /// Picks alpha with |discrepancy - eps| <= 0.005 eps by bisection on
    /// log(alpha), or flags the floor when even alpha_floor over-fits eps.
    /// Requires 0 <= eps < ||h||.
    Result morozov(const CVec& stacked, double eps) const;

    const RVec& singular_values() const { return sv_; }

  private:
    RVec sqrt_row_, sqrt_col_;
    CMat u_, v_;
    RVec sv_;
};

/// Field evaluation interface shared by the regularized completion and the
/// closed-form synthetic fields.
class FieldEvaluator {
  public:
    virtual ~FieldEvaluator() = default;
    virtual const MaterialParams& params() const = 0;
    virtual ElasticField field(const Vec2& x) const = 0;
    virtual CVec2 traction_at(const Vec2& x, const Vec2& n) const = 0;
    /// Frozen-normal traction gradient, columns d t / d x_dir.
    virtual CMat2 traction_grad(const Vec2& x, const Vec2& n) const = 0;
    /// Combined evaluation; the default composes the virtuals above.
    virtual FieldSample sample(const Vec2& x, const Vec2& n) const;
};

/// Layer-potential field with an interior-evaluation guard: query points must
/// keep a positive radial clearance to the carrying curve (the clearance test
/// is exact for the circular auxiliary boundaries used by the toolkit).
class CompletedField final : public FieldEvaluator {
  public:
    CompletedField(MaterialParams p, std::vector<CurveSample> source_nodes, RVec source_weights,
                   CVec density, double clearance = 1e-6);

    const MaterialParams& params() const override { return layer_.params(); }
    ElasticField field(const Vec2& x) const override;
    CVec2 traction_at(const Vec2& x, const Vec2& n) const override;
    CMat2 traction_grad(const Vec2& x, const Vec2& n) const override;
    FieldSample sample(const Vec2& x, const Vec2& n) const override;

    const SingleLayerField& layer() const { return layer_; }

  private:
    void check_clearance(const Vec2& x) const;

    SingleLayerField layer_;
    double clearance_;
};

/// Stage-1 result: the chosen regularization and the completed field.
struct CompletionResult {
    CauchySolver::Result reg;
    CompletedField field;
};

/// Runs assemble -> SVD -> Morozov -> completed field with eps = data.eps.
CompletionResult complete_cauchy(const CauchyData& data, const MaterialParams& p,
                                 const std::vector<CurveSample>& source_nodes,
                                 const RVec& source_weights);

} // namespace elcoinv
